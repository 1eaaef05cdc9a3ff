"""The SPDC two-photon state in the monochromatic, paraxial, thin-crystal
approximations.

Polarization vectors use the ordered basis ``(hh, hv, vh, vv)`` where the
first letter is the signal photon (routed to detector 1 by transmission) and
the second the idler. The vacuum term and pair-production amplitude are
dropped: every probability is conditioned on a pair and defined up to one
global constant per scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedConfiguration
from .modes import TransverseMode

SQRT2 = math.sqrt(2.0)
THIN_FRACTION = 0.1
PARAXIAL_FRACTION = 0.1
SYMMETRY_TOL = 1e-12

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class CrystalConfig:
    length_mm: float
    pump_wavevector: float  # K, rad/mm
    thin_crystal: bool = True

    def __post_init__(self):
        if not self.length_mm > 0:
            raise DomainError(f"crystal length must be positive, got {self.length_mm!r}")
        if not self.pump_wavevector > 0:
            raise DomainError(f"pump wavevector must be positive, got {self.pump_wavevector!r}")

    @classmethod
    def for_pump(cls, pump, length_mm=1.0, thin_crystal=True):
        return cls(length_mm, pump.geometry.k, thin_crystal)


@dataclass(frozen=True)
class TwoPhotonPolarization:
    """Four complex coefficients over ``(hh, hv, vh, vv)``; unit norm."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        if len(c) != 4:
            raise DomainError("two-photon polarization needs exactly 4 coefficients")
        norm = math.fsum(abs(x) ** 2 for x in c)
        if abs(norm - 1.0) > 1e-9:
            raise DomainError(f"polarization vector has squared norm {norm}, expected 1")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_vector(cls, vec, normalize=False):
        vec = np.asarray(vec, dtype=complex).reshape(4)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(tuple(vec))

    @classmethod
    def product(cls, a, b):
        """|a>_1 |b>_2 from two single-photon Jones vectors."""
        return cls.from_vector(np.kron(np.asarray(a, complex), np.asarray(b, complex)), normalize=True)

    @property
    def vector(self):
        return np.array(self.coeffs, dtype=complex)

    def swapped(self):
        hh, hv, vh, vv = self.coeffs
        return TwoPhotonPolarization((hh, vh, hv, vv))

    @property
    def symmetry(self):
        return exchange_symmetry(self.vector)

    def close_to(self, other, up_to_phase=True, tol=1e-12):
        a, b = self.vector, other.vector
        if up_to_phase:
            return abs(abs(np.vdot(a, b)) - 1.0) < tol
        return bool(np.max(np.abs(a - b)) < tol)


def swap_vector(vec):
    """Exchange the two photons' slots of ``(..., 4)`` polarization arrays."""
    vec = np.asarray(vec)
    return vec[..., [0, 2, 1, 3]]


def exchange_symmetry(vec, tol=SYMMETRY_TOL):
    """``"Symmetric"``, ``"Antisymmetric"`` or ``"Mixed"`` under hv <-> vh."""
    vec = np.asarray(vec, dtype=complex)
    sw = swap_vector(vec)
    scale = max(np.max(np.abs(vec)), 1e-300)
    if np.max(np.abs(sw - vec)) <= tol * scale:
        return "Symmetric"
    if np.max(np.abs(sw + vec)) <= tol * scale:
        return "Antisymmetric"
    return "Mixed"


BELL_STATES = ("PsiMinus", "PsiPlus", "PhiPlus", "PhiMinus")


def bell_state(which):
    r = 1.0 / SQRT2
    table = {
        "PsiMinus": (0, r, -r, 0),
        "PsiPlus": (0, r, r, 0),
        "PhiPlus": (r, 0, 0, r),
        "PhiMinus": (r, 0, 0, -r),
    }
    try:
        return TwoPhotonPolarization(table[which])
    except KeyError:
        raise DomainError(f"unknown Bell state {which!r}; expected one of {BELL_STATES}") from None


def rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotate_polarization_bilateral(pol, angle):
    """Apply the same linear-polarization rotation to both photons."""
    r = rotation(angle)
    return TwoPhotonPolarization.from_vector(np.kron(r, r) @ pol.vector)


def analyzer(angle):
    """Jones vector passed by a linear polarizer at ``angle`` from h."""
    return np.array([math.cos(angle), math.sin(angle)], dtype=complex)


@dataclass(frozen=True)
class BiphotonState:
    pump: TransverseMode
    polarization: TwoPhotonPolarization
    crystal: CrystalConfig

    def __post_init__(self):
        k_pump = self.pump.geometry.k
        if abs(self.crystal.pump_wavevector - k_pump) > 1e-9 * k_pump:
            raise DomainError(
                f"crystal pump wavevector {self.crystal.pump_wavevector} rad/mm does not match the pump "
                f"wavelength ({k_pump} rad/mm)"
            )
        if self.crystal.thin_crystal:
            limit = THIN_FRACTION * 2.0 * self.pump.geometry.rayleigh_range
            if not self.crystal.length_mm < limit:
                raise DomainError(
                    f"thin-crystal flag needs L < {limit:.4g} mm (0.1 * 2 Z0), got L = {self.crystal.length_mm} mm"
                )

    @property
    def K(self):
        return self.crystal.pump_wavevector

    @property
    def k(self):
        """Degenerate down-converted wavenumber K / 2."""
        return 0.5 * self.crystal.pump_wavevector


def two_photon_mode(pump):
    """The pump profile rescaled so that ``U((rho_s + rho_i)/sqrt2) = W((rho_s + rho_i)/2) / sqrt2``.

    Waist grows by sqrt2 at fixed Rayleigh range, i.e. it is the pump shape
    at the down-converted wavelength.
    """
    return pump.scaled(SQRT2)


def _xy(v):
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != 2:
        raise DomainError("transverse vectors need a trailing axis of length 2")
    return v[..., 0], v[..., 1]


def phi_momentum(state, q_s, q_i):
    """Phi(q_s, q_i) = (1/pi) sqrt(2L/K) v(q_s + q_i) sinc(L |q_s - q_i|^2 / 4K).

    ``sinc`` is the unnormalized sin(x)/x; it is replaced by 1 for a thin
    crystal.
    """
    sx, sy = _xy(q_s)
    ix, iy = _xy(q_i)
    budget = PARAXIAL_FRACTION * state.K
    for name, (a, b) in (("q_s", (sx, sy)), ("q_i", (ix, iy))):
        mag = np.hypot(a, b)
        if np.any(mag > budget):
            raise DomainError(f"{name} with |q| = {np.max(mag):.4g} rad/mm exceeds the paraxial budget {budget:.4g}")
    L, K = state.crystal.length_mm, state.K
    pref = math.sqrt(2.0 * L / K) / math.pi
    v = state.pump.angular_spectrum(sx + ix, sy + iy)
    if state.crystal.thin_crystal:
        return pref * v
    arg = L * ((sx - ix) ** 2 + (sy - iy) ** 2) / (4.0 * K)
    return pref * v * np.sinc(arg / math.pi)


def wavefunction_direct(state, rho_s, rho_i, Z):
    """Scalar biphoton amplitude without an interferometer.

    The two-photon mode (pump rescaled by sqrt2, see :func:`two_photon_mode`)
    propagated to ``Z`` and evaluated at ``(rho_s + rho_i)/sqrt2``. The
    relative-coordinate phase is left out, so the result depends on the sum
    coordinate only.
    """
    if not state.crystal.thin_crystal:
        raise UnsupportedConfiguration("wavefunction_direct needs the thin-crystal approximation")
    sx, sy = _xy(rho_s)
    ix, iy = _xy(rho_i)
    mode = two_photon_mode(state.pump).at(Z)
    out = mode.field((sx + ix) / SQRT2, (sy + iy) / SQRT2)
    return complex(out) if np.ndim(out) == 0 else out


def disk_offsets(radius, n=13):
    """Sample offsets covering a disk: centre plus two rings (4 + 8 points for n = 13)."""
    if radius <= 0:
        return np.zeros((1, 2))
    if n != 13:
        rng_r = np.sqrt((np.arange(n) + 0.5) / n) * radius
        ang = np.arange(n) * math.pi * (3.0 - math.sqrt(5.0))
        return np.stack([rng_r * np.cos(ang), rng_r * np.sin(ang)], axis=-1)
    # equal-area cells: 1 + 4 + 8 points, each ring sampled at its rms radius
    pts = [(0.0, 0.0)]
    inner = 1.0 / 13.0
    for count in (4, 8):
        outer = inner + count / 13.0
        frac = math.sqrt(0.5 * (inner + outer))
        inner = outer
        for j in range(count):
            a = 2.0 * math.pi * j / count
            pts.append((frac * radius * math.cos(a), frac * radius * math.sin(a)))
    return np.array(pts)
