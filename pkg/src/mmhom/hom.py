"""Multimode Hong-Ou-Mandel interferometer.

Closed-form detection amplitudes for one photon in each output (``tt``,
``rr``) and for both photons in one output, analyzer projections,
coincidence probabilities, the delay-scan dip model and transverse scan
maps.

Port-local frames: the reflected photon's y axis is mirrored, so the
detector-2 coordinate ``y2`` is mirror-inverted relative to ``y1``.
Every amplitude carries the beam-splitter factors explicitly (``t^2`` for
``tt``, ``-r^2`` for ``rr``, ``i t r`` for same-port) and the relative phase
``exp(i K |d|^2 / 8Z)`` that follows from propagating both photons with
``k = K/2``. The common constant ``(1/pi) sqrt(2L/K) * pi k / (i Z)`` is
dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .biphoton import SQRT2, analyzer, swap_vector
from .errors import DomainError, UnsupportedConfiguration
from .quadrature import gauss_legendre_2d

BALANCE_TOL = 1e-12
INV_SQRT2 = 1.0 / SQRT2


@dataclass(frozen=True)
class BeamSplitter:
    t: float = INV_SQRT2
    r: float = INV_SQRT2

    def __post_init__(self):
        if not (0.0 < self.t < 1.0 and 0.0 < self.r < 1.0):
            raise DomainError(f"t and r must lie in (0, 1), got t={self.t}, r={self.r}")
        if abs(self.t**2 + self.r**2 - 1.0) > 1e-12:
            raise DomainError(f"lossless splitter needs t^2 + r^2 = 1, got {self.t**2 + self.r**2}")

    @property
    def balanced(self):
        return abs(self.t - self.r) <= BALANCE_TOL

    @classmethod
    def from_transmission(cls, t):
        return cls(t, math.sqrt(1.0 - t * t))


@dataclass(frozen=True)
class DetectionGeometry:
    """Both detectors at the same distance ``Z_mm`` from the crystal face."""

    Z_mm: float

    def __post_init__(self):
        if not self.Z_mm > 0:
            raise DomainError(f"detector distance must be positive, got {self.Z_mm!r}")


@dataclass
class DetectionAmplitude:
    """``value`` times the (un-normalized) polarization 4-vector.

    Arrays broadcast over leading axes: ``value`` has shape ``S`` and
    ``polarization_component`` shape ``S + (4,)``.
    """

    value: np.ndarray
    polarization_component: np.ndarray

    @property
    def vector(self):
        return np.asarray(self.value)[..., None] * self.polarization_component

    def __add__(self, other):
        return DetectionAmplitude(np.ones(np.shape(self.value)), self.vector + other.vector)


@dataclass(frozen=True)
class DipModel:
    """Gaussian delay envelope exp(-(delay / l_c)^2).

    ``l_c = shape * lambda^2 / d_lambda``; defaults are the 1 nm filters at
    702 nm.
    """

    center_nm: float = 702.0
    bandwidth_nm: float = 1.0
    shape: float = 1.0 / math.pi

    @property
    def coherence_length_um(self):
        return self.shape * self.center_nm**2 / self.bandwidth_nm * 1e-3

    def envelope(self, delay_um):
        d = np.asarray(delay_um, dtype=np.float64)
        return np.exp(-((d / self.coherence_length_um) ** 2))


def interference_type(parity, symmetry):
    """Cross-port interference type for pump y-parity and polarization symmetry."""
    if parity not in ("Even", "Odd") or symmetry not in ("Symmetric", "Antisymmetric"):
        return "none"
    same = (parity == "Even") == (symmetry == "Symmetric")
    return "destructive" if same else "constructive"


# ----------------------------------------------------------------- amplitudes


def _split(r):
    r = np.asarray(r, dtype=np.float64)
    if r.shape[-1] != 2:
        raise DomainError("detector positions need a trailing axis of length 2")
    return r[..., 0], r[..., 1]


def _check(state, bs, method):
    if not state.crystal.thin_crystal:
        raise UnsupportedConfiguration("closed-form amplitudes need the thin-crystal approximation")
    if method not in ("auto", "closed", "pipeline"):
        raise DomainError(f"unknown method {method!r}")
    if method == "pipeline" or (method == "auto" and not bs.balanced):
        return "pipeline"
    if not bs.balanced:
        raise UnsupportedConfiguration(
            f"closed forms are derived for t = r; got t={bs.t}, r={bs.r}. Use method='auto' or 'pipeline'"
        )
    return "closed"


def _phase(K, Z, dx, dy):
    return np.exp(1j * K * (dx * dx + dy * dy) / (8.0 * Z))


def _pump_at(state, geom):
    return state.pump.at(geom.Z_mm)


def _pol(state, shape, swap=False):
    c = state.polarization.vector
    if swap:
        c = swap_vector(c)
    return np.broadcast_to(c, tuple(shape) + (4,))


def amplitude_tt(state, bs, geom, r1, r2, method="auto"):
    """Both photons transmitted: ``t^2 e^{..} W(x_mean, y_mean, Z) Pi(s1, s2)``."""
    if _check(state, bs, method) == "pipeline":
        from .momentum import pipeline_terms

        return pipeline_terms(state, bs, geom, "cross", r1, r2)["tt"]
    x1, y1 = _split(r1)
    x2, y2 = _split(r2)
    W = _pump_at(state, geom).field(0.5 * (x1 + x2), 0.5 * (y1 + y2))
    val = bs.t**2 * _phase(state.K, geom.Z_mm, x1 - x2, y1 - y2) * W
    return DetectionAmplitude(val, _pol(state, np.shape(val)))


def amplitude_rr(state, bs, geom, r1, r2, method="auto"):
    """Both photons reflected: mirrored y argument and swapped polarization slots."""
    if _check(state, bs, method) == "pipeline":
        from .momentum import pipeline_terms

        return pipeline_terms(state, bs, geom, "cross", r1, r2)["rr"]
    x1, y1 = _split(r1)
    x2, y2 = _split(r2)
    W = _pump_at(state, geom).field(0.5 * (x1 + x2), -0.5 * (y1 + y2))
    val = -(bs.r**2) * _phase(state.K, geom.Z_mm, x1 - x2, y1 - y2) * W
    return DetectionAmplitude(val, _pol(state, np.shape(val), swap=True))


def same_port_terms(state, bs, geom, port, rA, rB):
    """The two terms of the same-port amplitude as separate 4-vectors."""
    if port not in (1, 2):
        raise DomainError(f"port must be 1 or 2, got {port!r}")
    xa, ya = _split(rA)
    xb, yb = _split(rB)
    pump = _pump_at(state, geom)
    xm = 0.5 * (xa + xb)
    pre = 1j * bs.t * bs.r * _phase(state.K, geom.Z_mm, xa - xb, ya + yb)
    w1 = pump.field(xm, 0.5 * (yb - ya))
    w2 = pump.field(xm, 0.5 * (ya - yb))
    first = (pre * w1)[..., None] * _pol(state, np.shape(w1))
    second = (pre * w2)[..., None] * _pol(state, np.shape(w2), swap=True)
    return first, second


def amplitude_same_port(state, bs, geom, port, rA, rB, method="auto"):
    """Both photons in output ``port``; ``rA``, ``rB`` are two detectors behind that port."""
    if _check(state, bs, method) == "pipeline":
        from .momentum import pipeline_terms

        terms = pipeline_terms(state, bs, geom, f"same{port}", rA, rB)
        return terms["first"] + terms["second"]
    first, second = same_port_terms(state, bs, geom, port, rA, rB)
    xa, ya = _split(rA)
    xb, yb = _split(rB)
    pre = 1j * bs.t * bs.r * _phase(state.K, geom.Z_mm, xa - xb, ya + yb)
    safe = np.where(np.abs(pre) > 0, pre, 1.0)
    return DetectionAmplitude(pre, (first + second) / safe[..., None])


# ------------------------------------------------------------------ analyzers


def project(vec, angle_a=None, angle_b=None):
    """Amplitudes after ideal polarizers; ``None`` leaves that photon unanalyzed.

    Returns an array with trailing axes for the unanalyzed outcomes (size 1
    for analyzed photons) so that probabilities are ``sum |.|^2`` over them.
    """
    m = np.asarray(vec).reshape(np.shape(vec)[:-1] + (2, 2))
    if angle_a is not None:
        m = np.einsum("a,...ab->...b", analyzer(angle_a), m)[..., None, :]
    if angle_b is not None:
        m = np.einsum("b,...ab->...a", analyzer(angle_b), m)[..., None]
    return m


def _probability(first, second, angles, envelope=1.0):
    """|P a|^2 + |P b|^2 + 2 e Re(conj(P a) P b) summed over unanalyzed outcomes."""
    pa = project(first, *angles)
    pb = project(second, *angles)
    inc = np.sum(np.abs(pa) ** 2 + np.abs(pb) ** 2, axis=(-2, -1))
    cross = np.sum(2.0 * np.real(np.conj(pa) * pb), axis=(-2, -1))
    # e |a + b|^2 + (1 - e)(|a|^2 + |b|^2): exact cancellation when a = -b
    env = np.asarray(envelope)
    full = np.sum(np.abs(pa + pb) ** 2, axis=(-2, -1))
    return np.maximum(env * full + (1.0 - env) * inc, 0.0), inc, cross


def coincidence_cross(state, bs, geom, r1, r2, basis_angle_1=None, basis_angle_2=None,
                      envelope=1.0, method="auto"):
    """One photon in each output: |projection of (Psi_tt + Psi_rr)|^2.

    ``envelope`` is the two-photon coherence at the current delay (1 for a
    balanced interferometer, 0 for unbalanced).
    """
    tt = amplitude_tt(state, bs, geom, r1, r2, method).vector
    rr = amplitude_rr(state, bs, geom, r1, r2, method).vector
    p, _, _ = _probability(tt, rr, (basis_angle_1, basis_angle_2), envelope)
    return p


def coincidence_same_port(state, bs, geom, port, rA, rB, basis_angle_A=None, basis_angle_B=None,
                          envelope=1.0, method="auto"):
    """Both photons in ``port``, detectors at ``rA`` and ``rB`` behind analyzers."""
    if _check(state, bs, method) == "pipeline":
        from .momentum import pipeline_terms

        terms = pipeline_terms(state, bs, geom, f"same{port}", rA, rB)
        first, second = terms["first"].vector, terms["second"].vector
    else:
        first, second = same_port_terms(state, bs, geom, port, rA, rB)
    p, _, _ = _probability(first, second, (basis_angle_A, basis_angle_B), envelope)
    return p


# ------------------------------------------------------------------ dip curve


@dataclass(frozen=True)
class DetectionConfig:
    """Which coincidences a dip scan records.

    ``kind`` is ``"cross"`` or ``"same"``. With ``points=None`` the detectors
    collect the whole beam (rates integrated over the detection plane);
    otherwise ``points=(rA, rB)`` are point detectors.
    """

    kind: str = "cross"
    port: int = 1
    angles: tuple = (None, None)
    points: tuple | None = None
    quadrature_order: int = 96

    def __post_init__(self):
        if self.kind not in ("cross", "same"):
            raise DomainError(f"detection kind must be 'cross' or 'same', got {self.kind!r}")


@dataclass
class DipCurve:
    delays_um: np.ndarray
    rates: np.ndarray
    visibility: float
    baseline: float
    interference: float
    metadata: dict = field(default_factory=dict)


def _terms_for(state, bs, geom, det):
    """Pairs of interfering amplitude arrays plus quadrature weights."""
    if det.points is not None:
        rA = np.asarray(det.points[0], dtype=np.float64)[None, :]
        rB = np.asarray(det.points[1], dtype=np.float64)[None, :]
        weights = np.ones(1)
    else:
        hw = 4.0 * state.pump.at(geom.Z_mm).geometry.width
        X, Y, W = gauss_legendre_2d(det.quadrature_order, hw)
        weights = W.ravel()
        X, Y = X.ravel(), Y.ravel()
        rA = np.stack([X, Y], axis=-1)
        # cross: r1 = r2 puts the midpoint on the node; same: y_B = -y_A does
        rB = rA if det.kind == "cross" else np.stack([X, -Y], axis=-1)
    if det.kind == "cross":
        a = amplitude_tt(state, bs, geom, rA, rB).vector
        b = amplitude_rr(state, bs, geom, rA, rB).vector
    elif _check(state, bs, "auto") == "pipeline":
        from .momentum import pipeline_terms

        terms = pipeline_terms(state, bs, geom, f"same{det.port}", rA, rB)
        a, b = terms["first"].vector, terms["second"].vector
    else:
        a, b = same_port_terms(state, bs, geom, det.port, rA, rB)
    return a, b, weights


def interference_terms(state, bs, geom, det):
    """(baseline, interference, unanalyzed baseline) integrated over the detectors."""
    a, b, w = _terms_for(state, bs, geom, det)
    _, inc, cross = _probability(a, b, det.angles)
    _, inc_all, _ = _probability(a, b, (None, None))
    return float(np.sum(w * inc)), float(np.sum(w * cross)), float(np.sum(w * inc_all))


def dip_curve(state, bs, geom, delays_um, detection=None, model=None):
    """Coincidence rate versus path-length difference.

    ``rate(d) = B + e(d) I`` with ``B`` the distinguishable-photon baseline,
    ``I`` the amplitude-overlap term at zero delay and ``e`` the delay
    envelope; equivalently ``B [1 + s V0 e(d)]`` with ``s V0 = I / B``.
    Rates are normalized by the unanalyzed baseline. Visibility is
    ``(baseline - extremum) / baseline``: positive for a dip, negative for a
    peak, 0 when the baseline vanishes.
    """
    detection = detection or DetectionConfig()
    model = model or DipModel()
    delays = np.asarray(delays_um, dtype=np.float64)
    B, I, B_all = interference_terms(state, bs, geom, detection)
    scale = B_all if B_all > 0 else 1.0
    env = model.envelope(delays)
    # clip round-off below zero; B + I >= 0 analytically
    rates = np.maximum((B + env * I) / scale, 0.0)
    if B > 0 and delays.size:
        j = int(np.argmax(env))
        base = B / scale
        vis = float((base - rates[j]) / base)
    else:
        vis = 0.0
    meta = {"coherence_length_um": model.coherence_length_um, "detection": detection.kind}
    return DipCurve(delays, rates, vis, B / scale, I / scale, meta)


def channel_probabilities(state, bs, geom, envelope=1.0, order=96):
    """Plane-integrated probabilities of the three output channels.

    Same-port channels carry the factor 1/2 for two identical photons in one
    mode. Normalized so the three sum to 1 for distinguishable photons.
    """
    out = {}
    hw = 4.0 * state.pump.at(geom.Z_mm).geometry.width
    X, Y, W = gauss_legendre_2d(order, hw)
    rA = np.stack([X, Y], axis=-1)
    rM = np.stack([X, -Y], axis=-1)
    tt = amplitude_tt(state, bs, geom, rA, rA).vector
    rr = amplitude_rr(state, bs, geom, rA, rA).vector
    p, inc, _ = _probability(tt, rr, (None, None), envelope)
    out["cross"] = float(np.sum(W * p))
    total_inc = float(np.sum(W * inc))
    for port in (1, 2):
        if bs.balanced:
            a, b = same_port_terms(state, bs, geom, port, rA, rM)
        else:
            from .momentum import pipeline_terms

            terms = pipeline_terms(state, bs, geom, f"same{port}", rA, rM)
            a, b = terms["first"].vector, terms["second"].vector
        p, inc, _ = _probability(a, b, (None, None), envelope)
        out[f"same_{port}"] = 0.5 * float(np.sum(W * p))
        total_inc += 0.5 * float(np.sum(W * inc))
    return {key: max(val / total_inc, 0.0) for key, val in out.items()}


# ----------------------------------------------------------------- scan maps


@dataclass
class CoincidenceMap:
    """Probabilities ``values[iy, ix]`` for the moving detector at ``(xs[ix], ys[iy])``."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    fixed_point: tuple = (0.0, 0.0)
    peak_normalized: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.float64)
        self.ys = np.asarray(self.ys, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.ys.size, self.xs.size):
            raise DomainError(f"map shape {self.values.shape} does not match grid ({self.ys.size}, {self.xs.size})")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise DomainError("map values must be finite and non-negative")

    @property
    def peak(self):
        return float(np.max(self.values)) if self.values.size else 0.0

    def normalized(self):
        peak = self.peak
        vals = self.values / peak if peak > 0 else self.values.copy()
        return CoincidenceMap(self.xs, self.ys, vals, self.fixed_point, True, dict(self.metadata))


def scan_grid(half_width_mm=3.0, points=41):
    return np.linspace(-half_width_mm, half_width_mm, points)


def scan_map(state, bs, geom, xs, ys, fixed_point=(0.0, 0.0), *, kind="cross", balanced=True,
             angles=(None, None), port=1, apertures_mm=(0.0, 0.0), normalize=True):
    """Fixed detector at ``fixed_point``, the other stepped over ``xs`` x ``ys``.

    ``kind="cross"`` scans detector 2 with detector 1 fixed; ``"same"`` scans
    detector B of ``port``. Finite circular apertures (diameters in
    ``apertures_mm``) average |Psi|^2 over 13 samples per detector.
    """
    from .biphoton import disk_offsets

    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    X, Y = np.meshgrid(xs, ys)
    moving = np.stack([X, Y], axis=-1)
    env = 1.0 if balanced else 0.0
    offs_f = disk_offsets(0.5 * apertures_mm[0])
    offs_m = disk_offsets(0.5 * apertures_mm[1])
    acc = np.zeros(X.shape)
    for of in offs_f:
        fixed = np.broadcast_to(np.asarray(fixed_point, dtype=np.float64) + of, moving.shape)
        for om in offs_m:
            mv = moving + om
            if kind == "cross":
                acc += coincidence_cross(state, bs, geom, fixed, mv, *angles, envelope=env)
            elif kind == "same":
                acc += coincidence_same_port(state, bs, geom, port, fixed, mv, *angles, envelope=env)
            else:
                raise DomainError(f"unknown scan kind {kind!r}")
    acc /= len(offs_f) * len(offs_m)
    meta = {"kind": kind, "balanced": balanced, "Z_mm": geom.Z_mm, "apertures_mm": list(apertures_mm)}
    cmap = CoincidenceMap(xs, ys, acc, tuple(fixed_point), False, meta)
    return cmap.normalized() if normalize else cmap
