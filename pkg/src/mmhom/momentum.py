"""Brute-force detection amplitudes from the angular spectrum of the pump.

Independent of the closed forms in :mod:`mmhom.hom`: the pump's
two-photon spectrum ``Phi(Q/2, Q/2)`` is sampled on a midpoint wavevector
grid, every photon is routed through the beam-splitter mode map (reflected
photons pick up the factor ``i r`` and the mirror flip ``q_y -> -q_y``),
and the sum-momentum integral is carried out as a discrete Fourier sum
with the Fresnel chirp. The relative-momentum integral has no decaying
envelope in the thin-crystal limit and is done analytically; its constant
and the spectrum prefactor are divided out so that results are directly
comparable with the closed forms.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .biphoton import phi_momentum, swap_vector
from .errors import DomainError
from .hom import DetectionAmplitude

GRID_POINTS = 64
GRID_EXTENT = 8.0  # in units of 1 / pump waist
MIRROR = np.array([1.0, -1.0])


def momentum_grid(waist_mm, points=GRID_POINTS, extent=GRID_EXTENT):
    """Midpoint grid on ``[-extent/w, extent/w]`` and its spacing."""
    qmax = extent / waist_mm
    dq = 2.0 * qmax / points
    return -qmax + (np.arange(points) + 0.5) * dq, dq


def sum_spectrum(state, points=GRID_POINTS, extent=GRID_EXTENT):
    """``Phi(Q/2, Q/2)`` on the grid, scaled to the pump's ``A(Q)`` convention.

    ``A`` satisfies ``W(rho, 0) = int A(Q) e^{iQ.rho} d^2Q``.
    """
    q, dq = momentum_grid(state.pump.geometry.waist_mm, points, extent)
    QX, QY = np.meshgrid(q, q, indexing="ij")
    Q = np.stack([QX, QY], axis=-1)
    phi = phi_momentum(state, 0.5 * Q, 0.5 * Q)
    pref = math.sqrt(2.0 * state.crystal.length_mm / state.K) / math.pi
    return q, dq, phi / (pref * 2.0 * math.pi)


def _routes(bs, config):
    """Photon routings as (coefficient, signal->slot, signal flip, idler flip).

    Slot 0 is detector a (1 or A), slot 1 is detector b (2 or B).
    """
    t, ir = bs.t, 1j * bs.r
    if config == "cross":
        # detector a in port 1, b in port 2
        return {"tt": (t * t, 0, False, False), "rr": (ir * ir, 1, True, True)}
    if config == "same1":
        return {"first": (t * ir, 0, False, True), "second": (ir * t, 1, False, True)}
    if config == "same2":
        return {"first": (ir * t, 0, True, False), "second": (t * ir, 1, True, False)}
    raise DomainError(f"unknown detector configuration {config!r}")


def pipeline_terms(state, bs, geom, config, ra, rb, points=GRID_POINTS, extent=GRID_EXTENT):
    """Per-routing amplitudes for detectors at ``ra`` and ``rb``.

    ``config`` is ``"cross"`` (keys ``tt``, ``rr``) or ``"same1"``/``"same2"``
    (keys ``first``, ``second``, the routings where the signal photon reaches
    detector A and B respectively).
    """
    ra = np.asarray(ra, dtype=np.float64)
    rb = np.asarray(rb, dtype=np.float64)
    ra, rb = np.broadcast_arrays(ra, rb)
    shape = ra.shape[:-1]
    q, dq, A = sum_spectrum(state, points, extent)
    Z, K = geom.Z_mm, state.K
    k = 0.5 * K
    c = state.polarization.vector
    out = {}
    for name, (coef, sig_slot, fs, fi) in _routes(bs, config).items():
        rs, ri = (ra, rb) if sig_slot == 0 else (rb, ra)
        rs = rs * MIRROR if fs else rs
        ri = ri * MIRROR if fi else ri
        S = 0.5 * (rs + ri)
        D = rs - ri
        field = _kernels.fourier_sum(
            np.ascontiguousarray(A), q, q,
            np.ascontiguousarray(S[..., 0].ravel()), np.ascontiguousarray(S[..., 1].ravel()),
            Z / (2.0 * K),
        ).reshape(shape) * dq * dq
        rel = np.exp(1j * k * np.sum(D * D, axis=-1) / (4.0 * Z))
        pol = c if sig_slot == 0 else swap_vector(c)
        out[name] = DetectionAmplitude(coef * field * rel, np.broadcast_to(pol, shape + (4,)))
    return out
