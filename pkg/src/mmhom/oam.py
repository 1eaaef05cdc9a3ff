"""Orbital angular momentum of the two-photon state for Laguerre-Gauss pumps.

Contents: the sum-frame coordinates, the analytic balanced-interferometer
coincidence profile, LG decomposition coefficients with the OAM selection
rule, the displaced zero-locus test and a falsifier for classically
correlated OAM models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import nnls

from .biphoton import SQRT2, two_photon_mode, wavefunction_direct
from .errors import DomainError, NumericalError
from .modes import LG, BeamGeometry, lg_fourier
from .quadrature import gauss_legendre

MAX_TRUNCATION = (6, 4)
RADIAL_NODES = 256
AZIMUTH_POINTS = 64
CONVERGENCE_RTOL = 1e-6
FALSIFIER_THRESHOLD = 1e-4


@dataclass(frozen=True)
class SumFrameCoords:
    R: np.ndarray
    theta: np.ndarray
    defined: np.ndarray  # False where R == 0 and theta is meaningless


def sum_frame(rho1, rho2):
    """``R = |rho1 + rho2| / sqrt2`` and ``theta``, the direction of ``rho1 + rho2``.

    ``theta`` lies in ``[0, 2pi)`` and is set to 0 (with ``defined=False``)
    where the sum vanishes.
    """
    s = np.asarray(rho1, dtype=np.float64) + np.asarray(rho2, dtype=np.float64)
    norm = np.hypot(s[..., 0], s[..., 1])
    defined = norm > 0
    theta = np.where(defined, np.mod(np.arctan2(s[..., 1], s[..., 0]), 2.0 * math.pi), 0.0)
    return SumFrameCoords(norm / SQRT2, theta, defined)


def lg_coincidence_profile(pump, geom, rho1, rho2):
    """``|u(R)|^2 sin^2(l theta)``, u the radial factor of the two-photon mode at Z.

    Up to a constant this is the balanced cross-port coincidence probability
    for a symmetric polarization state (the constant is 2 with the package's
    normalization).
    """
    if not isinstance(pump, LG):
        raise DomainError("lg_coincidence_profile needs an LG pump")
    frame = sum_frame(rho1, rho2)
    u = two_photon_mode(pump).at(geom.Z_mm).radial(frame.R)
    return np.abs(u) ** 2 * np.sin(pump.l * frame.theta) ** 2


# ------------------------------------------------------------- decomposition


@dataclass
class OamSpectrum:
    """Normalized decomposition coefficients.

    ``entries`` maps ``(l_s, p_s, l_i, p_i)`` to C. Normalization:
    ``sum |C|^2 + deficit = 1`` over ``reference_truncation``. The
    thin-crystal state has no finite norm, so the deficit grows with the
    reference set; ``scale`` converts entries back to absolute coefficients
    (``C_abs = scale * C``) for reconstruction.
    """

    entries: dict
    truncation: tuple
    pump_indices: tuple  # (l, p)
    deficit: float
    reference_truncation: tuple
    scale: float
    basis_waist_mm: float
    convergence: float
    metadata: dict = field(default_factory=dict)

    @property
    def total(self):
        return math.fsum(abs(c) ** 2 for c in self.entries.values())

    def off_rule(self):
        l = self.pump_indices[0]
        return {k: c for k, c in self.entries.items() if k[0] + k[2] != l}


@lru_cache(maxsize=1024)
def _radial_table(p, l, waist, nodes, q_max, stretch=1.0):
    q, _ = gauss_legendre(nodes, 0.0, q_max)
    vals = lg_fourier(p, l, stretch * q, waist)
    vals.setflags(write=False)
    return vals


def _radial_coefficients(pump, keys, basis_waist, nodes):
    """C_abs = 8 pi^2 int q dq V(sqrt2 q) V_s*(q) V_i*(q) for keys on the selection rule."""
    w_u = two_photon_mode(pump).geometry.waist_mm
    q_max = 10.0 / min(basis_waist, w_u)
    q, w = gauss_legendre(nodes, 0.0, q_max)
    pump_v = _radial_table(pump.p, pump.l, w_u, nodes, q_max, SQRT2)
    out = {}
    for ls, ps, li, pi in keys:
        vs = _radial_table(ps, ls, basis_waist, nodes, q_max)
        vi = _radial_table(pi, li, basis_waist, nodes, q_max)
        out[(ls, ps, li, pi)] = 8.0 * math.pi**2 * np.sum(w * q * pump_v * np.conj(vs) * np.conj(vi))
    return out


def _polar_coefficients(pump, keys, basis_waist, nodes, azimuth=AZIMUTH_POINTS):
    """Same overlap with the azimuthal integral done numerically (no delta imposed).

    Each spectrum is rebuilt on a Cartesian polar grid from its radial table
    and the vortex phase exp(-i l atan2(q_y, q_x)).
    """
    w_u = two_photon_mode(pump).geometry.waist_mm
    q_max = 10.0 / min(basis_waist, w_u)
    q, wq = gauss_legendre(nodes, 0.0, q_max)
    phi = 2.0 * math.pi * np.arange(azimuth) / azimuth
    Q, PHI = np.meshgrid(q, phi, indexing="ij")
    angle = np.arctan2(Q * np.sin(PHI), Q * np.cos(PHI))
    weights = (wq * q)[:, None] * (2.0 * math.pi / azimuth)
    pump_v = _radial_table(pump.p, pump.l, w_u, nodes, q_max, SQRT2)[:, None] * np.exp(-1j * pump.l * angle)
    cache = {}

    def basis(p, l):
        if (p, l) not in cache:
            radial = _radial_table(p, l, basis_waist, nodes, q_max)[:, None]
            cache[(p, l)] = np.conj(radial * np.exp(-1j * l * angle))
        return cache[(p, l)]

    out = {}
    for ls, ps, li, pi in keys:
        out[(ls, ps, li, pi)] = 4.0 * math.pi * np.sum(weights * pump_v * basis(ps, ls) * basis(pi, li))
    return out


def _keys(l, l_max, p_max, enforce_delta):
    for ls in range(-l_max, l_max + 1):
        for li in range(-l_max, l_max + 1):
            if enforce_delta and ls + li != l:
                continue
            for ps in range(p_max + 1):
                for pi in range(p_max + 1):
                    yield (ls, ps, li, pi)


def oam_decompose(pump, truncation, *, basis_waist_mm=None, enforce_delta=True, nodes=RADIAL_NODES,
                  reference_truncation=None):
    """Decompose the thin-crystal two-photon amplitude into signal x idler LG modes.

    The basis waist defaults to the two-photon mode's waist (the pump shape
    at the down-converted wavelength). With ``enforce_delta=False`` every
    (l_s, l_i) pair is computed by 2-D polar quadrature so the selection rule
    shows up numerically instead of being imposed. Retained coefficients are
    recomputed with doubled radial nodes; a relative change above 1e-6
    raises :class:`NumericalError`.
    """
    if not isinstance(pump, LG):
        raise DomainError("oam_decompose needs an LG pump")
    l_max, p_max = (int(x) for x in truncation)
    if l_max < 0 or p_max < 0 or l_max > MAX_TRUNCATION[0] or p_max > MAX_TRUNCATION[1]:
        raise DomainError(f"truncation {truncation} outside (0..{MAX_TRUNCATION[0]}, 0..{MAX_TRUNCATION[1]})")
    if reference_truncation is None:
        reference_truncation = (l_max + 3, p_max + 6)
    ref_l, ref_p = reference_truncation
    if ref_l < l_max or ref_p < p_max:
        raise DomainError("reference truncation must contain the requested truncation")
    wb = two_photon_mode(pump).geometry.waist_mm if basis_waist_mm is None else float(basis_waist_mm)

    keys = list(_keys(pump.l, l_max, p_max, enforce_delta))
    compute = _radial_coefficients if enforce_delta else _polar_coefficients
    coarse = compute(pump, keys, wb, nodes)
    fine = compute(pump, keys, wb, 2 * nodes)
    scale_c = max(abs(c) for c in fine.values())
    change = max(abs(fine[k] - coarse[k]) for k in keys) / scale_c
    if change > CONVERGENCE_RTOL:
        raise NumericalError("decomposition quadrature not converged under node doubling",
                             {"nodes": 2 * nodes, "relative_change": change})

    ref_keys = [k for k in _keys(pump.l, ref_l, ref_p, True)]
    ref_vals = _radial_coefficients(pump, ref_keys, wb, nodes)
    ref_total = math.fsum(abs(c) ** 2 for c in ref_vals.values())
    scale = math.sqrt(ref_total)
    entries = {k: complex(v) / scale for k, v in fine.items()}
    on_rule_total = math.fsum(abs(c) ** 2 for k, c in entries.items() if k[0] + k[2] == pump.l)
    return OamSpectrum(
        entries=entries,
        truncation=(l_max, p_max),
        pump_indices=(pump.l, pump.p),
        deficit=max(0.0, 1.0 - on_rule_total),
        reference_truncation=(ref_l, ref_p),
        scale=scale,
        basis_waist_mm=wb,
        convergence=float(change),
        metadata={"nodes": 2 * nodes, "enforce_delta": enforce_delta},
    )


def reconstruct(spectrum, pump, rho_s, rho_i):
    """Sum the truncated expansion at the crystal plane (absolute normalization)."""
    geometry = BeamGeometry(spectrum.basis_waist_mm, 2.0 * pump.geometry.wavelength_nm)
    rs = np.asarray(rho_s, dtype=np.float64)
    ri = np.asarray(rho_i, dtype=np.float64)
    modes = {}

    def mode(p, l, r):
        key = (p, l, id(r))
        if key not in modes:
            modes[key] = LG(p, l, geometry).field(r[..., 0], r[..., 1])
        return modes[key]

    total = 0.0
    for (ls, ps, li, pi), c in spectrum.entries.items():
        total = total + spectrum.scale * c * mode(ps, ls, rs) * mode(pi, li, ri)
    return total


# ----------------------------------------------------------------- zero locus


@dataclass
class ZeroLocusReport:
    max_violation: float
    locus_points: list
    peak: float
    delta_mm: tuple


def _locus_points(half_width, n):
    a = np.linspace(-half_width, half_width, n)
    X, Y = np.meshgrid(a, a)
    return np.stack([X.ravel(), Y.ravel()], axis=-1)


def zero_locus_shift_test(pump, geom, delta, *, half_width_mm=2.0, points=9):
    """Check that |Psi|^2 stays zero on the locus rho_i = -rho_s after (+delta, -delta).

    ``max_violation`` is relative to the peak of |Psi|^2 over a grid of sum
    coordinates; ``locus_points`` lists the (rho_s, rho_i) pairs tested.
    """
    if not isinstance(pump, LG) or pump.l == 0:
        raise DomainError("zero-locus test needs an LG pump with l != 0")
    from .biphoton import BiphotonState, CrystalConfig, TwoPhotonPolarization

    state = BiphotonState(pump, TwoPhotonPolarization((1, 0, 0, 0)), CrystalConfig.for_pump(pump))
    d = np.asarray(delta, dtype=np.float64)
    rs = _locus_points(half_width_mm, points)
    ri = -rs
    vals = np.abs(wavefunction_direct(state, rs + d, ri - d, geom.Z_mm)) ** 2
    grid = _locus_points(2.0 * half_width_mm, 41)
    peak = float(np.max(np.abs(wavefunction_direct(state, grid, np.zeros_like(grid), geom.Z_mm)) ** 2))
    pairs = [(tuple(a), tuple(b)) for a, b in zip(rs + d, ri - d)]
    return ZeroLocusReport(float(np.max(vals)) / peak, pairs, peak, tuple(d))


# ------------------------------------------------------------------ falsifier


@dataclass
class FalsifierReport:
    min_residual_on_locus: float
    verdict: str
    degenerate: bool
    peak: float
    threshold: float
    weights: list
    family: list
    metadata: dict = field(default_factory=dict)


def default_candidate_family(pump, l_max=3):
    """Separable LG pairs (p = 0) with l_s + l_i = l, |l_s|, |l_i| <= l_max."""
    return [(1.0, (0, pump.l - li), (0, li)) for li in range(-l_max, l_max + 1) if abs(pump.l - li) <= l_max]


def classical_model_falsifier(pump, candidate=None, geom=None, *, deltas=None, samples=400, seed=0,
                              fit_weights=True):
    """Test whether a classical OAM mixture can mimic the zero locus of the state.

    ``candidate`` is a list of ``(weight, F, G)``; ``F``/``G`` are
    ``(p, l)`` index pairs of down-converted LG modes or ``None`` for an
    identically zero profile. Weights are refitted by nonnegative least
    squares against |Psi|^2 at random sample pairs unless ``fit_weights`` is
    False. The mixture is evaluated on the zero locus rho_i = -rho_s and on
    its images displaced by each delta; the largest value, relative to the
    quantum peak, is compared with the 1e-4 threshold.
    """
    if not isinstance(pump, LG) or pump.l == 0:
        raise DomainError("falsifier needs an LG pump with l != 0")
    if geom is None:
        from .hom import DetectionGeometry

        geom = DetectionGeometry(1000.0)
    family = default_candidate_family(pump) if candidate is None else list(candidate)
    if not family:
        raise DomainError("empty candidate family")
    for w, _, _ in family:
        if w < 0:
            raise DomainError("candidate weights must be nonnegative")
    if deltas is None:
        deltas = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (1.0, 1.0), (-0.7, 0.4)]

    from .biphoton import BiphotonState, CrystalConfig, TwoPhotonPolarization

    state = BiphotonState(pump, TwoPhotonPolarization((1, 0, 0, 0)), CrystalConfig.for_pump(pump))
    u = two_photon_mode(pump)
    geometry = BeamGeometry(u.geometry.waist_mm, u.geometry.wavelength_nm, geom.Z_mm)
    reach = 2.0 * geometry.width

    def profile(idx, r):
        if idx is None:
            return np.zeros(r.shape[:-1])
        p, l = idx
        return np.abs(LG(p, l, geometry).field(r[..., 0], r[..., 1])) ** 2

    def design(rs, ri):
        return np.stack([profile(F, rs) * profile(G, ri) for _, F, G in family], axis=-1)

    rng = np.random.default_rng(seed)
    rs = rng.uniform(-reach, reach, (samples, 2))
    ri = rng.uniform(-reach, reach, (samples, 2))
    target = np.abs(wavefunction_direct(state, rs, ri, geom.Z_mm)) ** 2
    A = design(rs, ri)
    if fit_weights:
        weights, _ = nnls(A, target)
    else:
        given = np.array([w for w, _, _ in family], dtype=np.float64)
        model = A @ given
        denom = float(model @ model)
        weights = given * (float(model @ target) / denom if denom > 0 else 0.0)

    locus = _locus_points(0.5 * reach, 7)
    values = []
    for d in deltas:
        d = np.asarray(d, dtype=np.float64)
        values.append(design(locus + d, -locus - d) @ weights)
    grid = _locus_points(reach, 41)
    peak = float(np.max(np.abs(wavefunction_direct(state, grid, np.zeros_like(grid), geom.Z_mm)) ** 2))
    residual = float(np.max(values)) / peak

    active = [i for i, w in enumerate(weights) if w > 0]
    zero_profile = [F is None or G is None for _, F, G in family]
    degenerate = all(zero_profile[i] for i in active) if active else all(zero_profile)
    if degenerate:
        verdict = "not excluded"
    else:
        verdict = "excluded" if residual > FALSIFIER_THRESHOLD else "not excluded"
    total = float(np.sum(weights))
    return FalsifierReport(
        min_residual_on_locus=residual,
        verdict=verdict,
        degenerate=bool(degenerate),
        peak=peak,
        threshold=FALSIFIER_THRESHOLD,
        weights=[float(w / total) if total > 0 else 0.0 for w in weights],
        family=[(F, G) for _, F, G in family],
        metadata={"deltas_mm": [tuple(map(float, d)) for d in deltas], "samples": samples, "seed": seed},
    )
