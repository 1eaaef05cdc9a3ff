"""Hot numeric inner loops.

Every kernel exists twice: a pure-numpy version and a numba ``@njit`` loop
version with the same signature. The public names at module level point to
the numba versions unless numba is missing or ``MMHOM_DISABLE_NUMBA`` is set
to a truthy value before import. Both implementations stay importable as
``numpy_impl`` and ``numba_impl`` so tests and the benchmark can compare them.

Random numbers are never drawn inside a kernel; callers pass uniforms drawn
from a numpy ``Generator`` so both paths give bit-identical tallies.
"""

from __future__ import annotations

import math
import os
import types

import numpy as np

N_DETECTORS = 4

_FLAG = os.environ.get("MMHOM_DISABLE_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in {"1", "true", "yes", "on"}

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAS_NUMBA = False


# --------------------------------------------------------------------------
# pure numpy
# --------------------------------------------------------------------------


def _hermite_np(n, x):
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev
    h = 2.0 * x
    for j in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * j * h_prev
    return h


def _laguerre_np(p, alpha, x):
    x = np.asarray(x, dtype=np.float64)
    l_prev = np.ones_like(x)
    if p == 0:
        return l_prev
    lp = 1.0 + alpha - x
    for j in range(1, p):
        l_prev, lp = lp, ((2 * j + 1 + alpha - x) * lp - (j + alpha) * l_prev) / (j + 1)
    return lp


def _hg_field_np(x, y, m, n, wz, kcurv, gouy, norm):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    s = math.sqrt(2.0) / wz
    r2 = x * x + y * y
    amp = norm * _hermite_np(m, s * x) * _hermite_np(n, s * y) * np.exp(-r2 / (wz * wz))
    return amp * np.exp(1j * (kcurv * r2 - (m + n + 1) * gouy))


def _lg_field_np(x, y, p, l, wz, kcurv, gouy, norm):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    al = abs(l)
    r2 = x * x + y * y
    t = 2.0 * r2 / (wz * wz)
    radial = norm * t ** (0.5 * al) * _laguerre_np(p, al, t) * np.exp(-r2 / (wz * wz))
    phi = np.arctan2(y, x)
    return radial * np.exp(1j * (kcurv * r2 - (2 * p + al + 1) * gouy - l * phi))


def _fourier_sum_np(v, qx, qy, sx, sy, chirp):
    """sum_ab v[a,b] exp(i(qx_a sx + qy_b sy) - i chirp (qx_a^2 + qy_b^2)) per point."""
    sx = np.asarray(sx, dtype=np.float64).ravel()
    sy = np.asarray(sy, dtype=np.float64).ravel()
    prop = np.exp(-1j * chirp * (qx[:, None] ** 2 + qy[None, :] ** 2))
    ex = np.exp(1j * np.outer(sx, qx))
    ey = np.exp(1j * np.outer(sy, qy))
    return np.einsum("ab,ja,jb->j", v * prop, ex, ey, optimize=True)


def _detect_gates_np(outcome, photon_det, u_eff, u_dark, efficiency, dark_prob, number_resolving):
    """Encode per-gate detector counts as base-3 integers.

    ``efficiency`` and ``dark_prob`` are per-detector arrays of length 4.
    Counts are capped at 2 with number resolution and at 1 without.
    """
    gates = outcome.shape[0]
    counts = np.zeros((gates, N_DETECTORS), dtype=np.int64)
    rows = np.arange(gates)
    for photon in range(2):
        det = photon_det[outcome, photon]
        hit = u_eff[:, photon] < efficiency[det]
        np.add.at(counts, (rows[hit], det[hit]), 1)
    counts += (u_dark < dark_prob[None, :]).astype(np.int64)
    if number_resolving:
        counts = np.minimum(counts, 2)
    else:
        counts = np.minimum(counts, 1)
    weights = 3 ** np.arange(N_DETECTORS, dtype=np.int64)
    return counts @ weights


numpy_impl = types.SimpleNamespace(
    hermite=_hermite_np,
    laguerre=_laguerre_np,
    hg_field=_hg_field_np,
    lg_field=_lg_field_np,
    fourier_sum=_fourier_sum_np,
    detect_gates=_detect_gates_np,
    name="numpy",
)


# --------------------------------------------------------------------------
# numba
# --------------------------------------------------------------------------

if HAS_NUMBA:

    @numba.njit(cache=True)
    def _hermite_scalar(n, x):
        h_prev = 1.0
        if n == 0:
            return h_prev
        h = 2.0 * x
        for j in range(1, n):
            h_next = 2.0 * x * h - 2.0 * j * h_prev
            h_prev = h
            h = h_next
        return h

    @numba.njit(cache=True)
    def _laguerre_scalar(p, alpha, x):
        l_prev = 1.0
        if p == 0:
            return l_prev
        lp = 1.0 + alpha - x
        for j in range(1, p):
            l_next = ((2 * j + 1 + alpha - x) * lp - (j + alpha) * l_prev) / (j + 1)
            l_prev = lp
            lp = l_next
        return lp

    @numba.njit(cache=True)
    def _hermite_nb_flat(n, x):
        out = np.empty_like(x)
        for i in range(x.size):
            out[i] = _hermite_scalar(n, x[i])
        return out

    @numba.njit(cache=True)
    def _laguerre_nb_flat(p, alpha, x):
        out = np.empty_like(x)
        for i in range(x.size):
            out[i] = _laguerre_scalar(p, alpha, x[i])
        return out

    @numba.njit(cache=True)
    def _hg_field_nb_flat(x, y, m, n, wz, kcurv, gouy, norm):
        out = np.empty(x.size, dtype=np.complex128)
        s = math.sqrt(2.0) / wz
        g = (m + n + 1) * gouy
        for i in range(x.size):
            r2 = x[i] * x[i] + y[i] * y[i]
            amp = norm * _hermite_scalar(m, s * x[i]) * _hermite_scalar(n, s * y[i])
            amp *= math.exp(-r2 / (wz * wz))
            ph = kcurv * r2 - g
            out[i] = complex(amp * math.cos(ph), amp * math.sin(ph))
        return out

    @numba.njit(cache=True)
    def _lg_field_nb_flat(x, y, p, l, wz, kcurv, gouy, norm):
        out = np.empty(x.size, dtype=np.complex128)
        al = abs(l)
        g = (2 * p + al + 1) * gouy
        for i in range(x.size):
            r2 = x[i] * x[i] + y[i] * y[i]
            t = 2.0 * r2 / (wz * wz)
            amp = norm * t ** (0.5 * al) * _laguerre_scalar(p, al, t) * math.exp(-r2 / (wz * wz))
            ph = kcurv * r2 - g - l * math.atan2(y[i], x[i])
            out[i] = complex(amp * math.cos(ph), amp * math.sin(ph))
        return out

    @numba.njit(cache=True)
    def _fourier_sum_nb(v, qx, qy, sx, sy, chirp):
        na = qx.size
        nb = qy.size
        vp = np.empty((na, nb), dtype=np.complex128)
        for a in range(na):
            for b in range(nb):
                ph = -chirp * (qx[a] * qx[a] + qy[b] * qy[b])
                vp[a, b] = v[a, b] * complex(math.cos(ph), math.sin(ph))
        out = np.empty(sx.size, dtype=np.complex128)
        ey = np.empty(nb, dtype=np.complex128)
        for j in range(sx.size):
            for b in range(nb):
                ey[b] = complex(math.cos(qy[b] * sy[j]), math.sin(qy[b] * sy[j]))
            acc = 0.0j
            for a in range(na):
                row = 0.0j
                for b in range(nb):
                    row += vp[a, b] * ey[b]
                acc += row * complex(math.cos(qx[a] * sx[j]), math.sin(qx[a] * sx[j]))
            out[j] = acc
        return out

    @numba.njit(cache=True)
    def _detect_gates_nb(outcome, photon_det, u_eff, u_dark, efficiency, dark_prob, number_resolving):
        gates = outcome.shape[0]
        codes = np.empty(gates, dtype=np.int64)
        cap = 2 if number_resolving else 1
        counts = np.zeros(N_DETECTORS, dtype=np.int64)
        for g in range(gates):
            for d in range(N_DETECTORS):
                counts[d] = 0
            for photon in range(2):
                d = photon_det[outcome[g], photon]
                if u_eff[g, photon] < efficiency[d]:
                    counts[d] += 1
            code = 0
            base = 1
            for d in range(N_DETECTORS):
                if u_dark[g, d] < dark_prob[d]:
                    counts[d] += 1
                c = counts[d] if counts[d] < cap else cap
                code += c * base
                base *= 3
            codes[g] = code
        return codes

    def _hermite_nb(n, x):
        x = np.asarray(x, dtype=np.float64)
        return _hermite_nb_flat(int(n), np.ascontiguousarray(x).ravel()).reshape(x.shape)

    def _laguerre_nb(p, alpha, x):
        x = np.asarray(x, dtype=np.float64)
        return _laguerre_nb_flat(int(p), float(alpha), np.ascontiguousarray(x).ravel()).reshape(x.shape)

    def _coords(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
        return np.ascontiguousarray(x).ravel(), np.ascontiguousarray(y).ravel(), x.shape

    def _hg_field_nb(x, y, m, n, wz, kcurv, gouy, norm):
        fx, fy, shape = _coords(x, y)
        out = _hg_field_nb_flat(fx, fy, int(m), int(n), float(wz), float(kcurv), float(gouy), float(norm))
        return out.reshape(shape)

    def _lg_field_nb(x, y, p, l, wz, kcurv, gouy, norm):
        fx, fy, shape = _coords(x, y)
        out = _lg_field_nb_flat(fx, fy, int(p), int(l), float(wz), float(kcurv), float(gouy), float(norm))
        return out.reshape(shape)

    def _fourier_sum_nb_wrap(v, qx, qy, sx, sy, chirp):
        return _fourier_sum_nb(
            np.ascontiguousarray(v, dtype=np.complex128),
            np.ascontiguousarray(qx, dtype=np.float64),
            np.ascontiguousarray(qy, dtype=np.float64),
            np.ascontiguousarray(sx, dtype=np.float64).ravel(),
            np.ascontiguousarray(sy, dtype=np.float64).ravel(),
            float(chirp),
        )

    def _detect_gates_nb_wrap(outcome, photon_det, u_eff, u_dark, efficiency, dark_prob, number_resolving):
        return _detect_gates_nb(
            np.ascontiguousarray(outcome, dtype=np.int64),
            np.ascontiguousarray(photon_det, dtype=np.int64),
            np.ascontiguousarray(u_eff, dtype=np.float64),
            np.ascontiguousarray(u_dark, dtype=np.float64),
            np.ascontiguousarray(efficiency, dtype=np.float64),
            np.ascontiguousarray(dark_prob, dtype=np.float64),
            bool(number_resolving),
        )

    numba_impl = types.SimpleNamespace(
        hermite=_hermite_nb,
        laguerre=_laguerre_nb,
        hg_field=_hg_field_nb,
        lg_field=_lg_field_nb,
        fourier_sum=_fourier_sum_nb_wrap,
        detect_gates=_detect_gates_nb_wrap,
        name="numba",
    )
else:  # pragma: no cover
    numba_impl = None


active = numba_impl if (HAS_NUMBA and NUMBA_REQUESTED) else numpy_impl
BACKEND = active.name

hermite = active.hermite
laguerre = active.laguerre
hg_field = active.hg_field
lg_field = active.lg_field
fourier_sum = active.fourier_sum
detect_gates = active.detect_gates


def warmup():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    x = np.linspace(-1.0, 1.0, 3)
    hermite(3, x)
    laguerre(2, 1, np.abs(x))
    hg_field(x, x, 1, 1, 1.0, 0.0, 0.0, 1.0)
    lg_field(x, x, 1, 1, 1.0, 0.0, 0.0, 1.0)
    fourier_sum(np.ones((2, 2), complex), x[:2], x[:2], x, x, 0.1)
    detect_gates(
        np.zeros(2, np.int64), np.zeros((1, 2), np.int64), np.zeros((2, 2)), np.ones((2, 4)), np.ones(4), np.zeros(4), False
    )
