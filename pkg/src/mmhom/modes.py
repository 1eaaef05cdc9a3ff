"""Transverse beam modes: Hermite/Laguerre polynomials, HG and LG beams,
superpositions, the phase-step pump, parity analysis and the LG Fourier
profile.

Units: transverse lengths in mm, wavelengths in nm, spatial frequencies in
rad/mm. Fields follow the ``exp(i(q.rho - q^2 z / 2k))`` paraxial propagator,
which fixes the curvature phase as ``exp(+i k rho^2 / 2R)`` and the Gouy
phase as ``exp(-i (N + 1) theta)`` with ``N`` the mode order. The LG
azimuthal factor is ``exp(-i l phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import erfc

from . import _kernels
from .errors import DomainError
from .quadrature import gauss_legendre_2d, hankel

MAX_ORDER = 30
PARITY_EPS = 1e-6
NM_PER_MM = 1e6


def wavenumber(wavelength_nm):
    """Vacuum wavenumber in rad/mm."""
    return 2.0 * math.pi * NM_PER_MM / wavelength_nm


# ---------------------------------------------------------------- polynomials


def _check_order(name, n):
    if int(n) != n or n < 0 or n > MAX_ORDER:
        raise DomainError(f"{name}={n!r} outside 0..{MAX_ORDER}")


def hermite_poly(n, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    _check_order("n", n)
    out = _kernels.hermite(int(n), x)
    return float(out) if np.ndim(out) == 0 else out


def laguerre_poly(p, alpha, x):
    """Generalized Laguerre polynomial L_p^alpha(x), x >= 0."""
    _check_order("p", p)
    if alpha < 0:
        raise DomainError(f"alpha={alpha!r} must be >= 0")
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0) or not np.all(np.isfinite(xa)):
        raise DomainError("laguerre_poly requires finite x >= 0")
    out = _kernels.laguerre(int(p), float(alpha), xa)
    return float(out) if np.ndim(out) == 0 else out


# ------------------------------------------------------------------- geometry


@dataclass(frozen=True)
class BeamGeometry:
    """Waist (mm, at z = 0), wavelength (nm) and evaluation plane z (mm)."""

    waist_mm: float
    wavelength_nm: float
    z_mm: float = 0.0

    def __post_init__(self):
        if not (self.waist_mm > 0 and math.isfinite(self.waist_mm)):
            raise DomainError(f"waist_mm must be positive, got {self.waist_mm!r}")
        if not (self.wavelength_nm > 0 and math.isfinite(self.wavelength_nm)):
            raise DomainError(f"wavelength_nm must be positive, got {self.wavelength_nm!r}")
        if not math.isfinite(self.z_mm):
            raise DomainError("z_mm must be finite")

    @property
    def k(self):
        return wavenumber(self.wavelength_nm)

    @property
    def rayleigh_range(self):
        return math.pi * self.waist_mm**2 * NM_PER_MM / self.wavelength_nm

    @property
    def width(self):
        """Beam radius w(z)."""
        return self.waist_mm * math.sqrt(1.0 + (self.z_mm / self.rayleigh_range) ** 2)

    @property
    def curvature_radius(self):
        z = self.z_mm
        if z == 0.0:
            return math.inf
        return (z * z + self.rayleigh_range**2) / z

    @property
    def gouy(self):
        return math.atan2(self.z_mm, self.rayleigh_range)

    @property
    def curvature_coefficient(self):
        """k / 2R(z); zero at the waist."""
        z, zr = self.z_mm, self.rayleigh_range
        return self.k * z / (2.0 * (z * z + zr * zr))

    def at(self, z_mm):
        return replace(self, z_mm=float(z_mm))

    def scaled(self, factor):
        """Waist times ``factor`` with the Rayleigh range held fixed."""
        return replace(self, waist_mm=self.waist_mm * factor, wavelength_nm=self.wavelength_nm * factor**2)


# ---------------------------------------------------------------------- modes


class TransverseMode:
    """Base for evaluatable complex transverse profiles.

    Subclasses are frozen dataclasses carrying a ``geometry``; ``field``
    evaluates at the geometry's plane ``z``.
    """

    geometry: BeamGeometry

    def field(self, x, y):
        raise NotImplementedError

    def at(self, z_mm):
        return replace(self, geometry=self.geometry.at(z_mm))

    def scaled(self, factor):
        return replace(self, geometry=self.geometry.scaled(factor))

    def angular_spectrum(self, qx, qy):
        """(1/2pi) * 2-D Fourier transform of the z = 0 profile."""
        raise NotImplementedError

    def __call__(self, x, y):
        return self.field(x, y)


@dataclass(frozen=True)
class HG(TransverseMode):
    m: int
    n: int
    geometry: BeamGeometry

    def __post_init__(self):
        _check_order("m", self.m)
        _check_order("n", self.n)

    @property
    def order(self):
        return self.m + self.n

    def _norm(self, w):
        return math.sqrt(2.0 / (math.pi * 2 ** (self.m + self.n) * math.factorial(self.m) * math.factorial(self.n))) / w

    def field(self, x, y):
        g = self.geometry
        wz = g.width
        return _kernels.hg_field(x, y, self.m, self.n, wz, g.curvature_coefficient, g.gouy, self._norm(wz))

    def angular_spectrum(self, qx, qy):
        w = self.geometry.waist_mm
        s = w / math.sqrt(2.0)
        qx = np.asarray(qx, dtype=np.float64)
        qy = np.asarray(qy, dtype=np.float64)
        env = np.exp(-(qx * qx + qy * qy) * w * w / 4.0)
        herm = _kernels.hermite(self.m, s * qx) * _kernels.hermite(self.n, s * qy)
        return (-1j) ** (self.m + self.n) * self._norm(w) * (w * w / 2.0) * herm * env


@dataclass(frozen=True)
class LG(TransverseMode):
    p: int
    l: int
    geometry: BeamGeometry

    def __post_init__(self):
        _check_order("p", self.p)
        if int(self.l) != self.l or abs(self.l) > MAX_ORDER:
            raise DomainError(f"l={self.l!r} outside -{MAX_ORDER}..{MAX_ORDER}")

    @property
    def order(self):
        return 2 * self.p + abs(self.l)

    def _norm(self, w):
        al = abs(self.l)
        return math.sqrt(2.0 * math.factorial(self.p) / (math.pi * math.factorial(self.p + al))) / w

    def field(self, x, y):
        g = self.geometry
        wz = g.width
        return _kernels.lg_field(x, y, self.p, self.l, wz, g.curvature_coefficient, g.gouy, self._norm(wz))

    def radial(self, rho):
        """Complex radial factor u(rho) at the geometry's plane (no exp(-i l phi))."""
        return self.field(np.asarray(rho, dtype=np.float64), np.zeros_like(rho, dtype=np.float64))

    def angular_spectrum(self, qx, qy):
        qx = np.asarray(qx, dtype=np.float64)
        qy = np.asarray(qy, dtype=np.float64)
        q = np.hypot(qx, qy)
        flat = q.ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        radial = lg_fourier(self.p, self.l, uniq, waist_mm=self.geometry.waist_mm)[inv].reshape(q.shape)
        return radial * np.exp(-1j * self.l * np.arctan2(qy, qx))


@dataclass(frozen=True)
class Superposition(TransverseMode):
    """Linear combination; weights must have unit total squared magnitude."""

    terms: tuple
    geometry: BeamGeometry = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple((complex(w), m) for w, m in self.terms)
        if not terms:
            raise DomainError("superposition needs at least one term")
        total = sum(abs(w) ** 2 for w, _ in terms)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"superposition weights have squared norm {total}, expected 1")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "geometry", terms[0][1].geometry)

    def field(self, x, y):
        out = 0.0
        for w, m in self.terms:
            out = out + w * m.field(x, y)
        return out

    def at(self, z_mm):
        return Superposition(tuple((w, m.at(z_mm)) for w, m in self.terms))

    def scaled(self, factor):
        return Superposition(tuple((w, m.scaled(factor)) for w, m in self.terms))

    def angular_spectrum(self, qx, qy):
        out = 0.0
        for w, m in self.terms:
            out = out + w * m.angular_spectrum(qx, qy)
        return out


@dataclass(frozen=True)
class PhaseStepGaussian(TransverseMode):
    """Normalized Gaussian with a phase jump for ``y > step_position_y``.

    Kept as an exact step at the waist. Away from z = 0 the profile is
    propagated in Fourier space on a ``grid`` x ``grid`` lattice and
    interpolated linearly.
    """

    step_position_y: float
    phase: float
    geometry: BeamGeometry
    grid: int = 512

    def _waist_field(self, x, y):
        w = self.geometry.waist_mm
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        g = math.sqrt(2.0 / math.pi) / w * np.exp(-(x * x + y * y) / (w * w))
        return np.where(y > self.step_position_y, np.exp(1j * self.phase), 1.0) * g

    def field(self, x, y):
        if self.geometry.z_mm == 0.0:
            return self._waist_field(x, y)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
        interp = _propagated_step(
            self.step_position_y, self.phase, self.geometry.waist_mm, self.geometry.wavelength_nm,
            self.geometry.z_mm, self.grid,
        )
        pts = np.stack([x.ravel(), y.ravel()], axis=-1)
        return interp(pts).reshape(x.shape)

    def scaled(self, factor):
        return replace(self, geometry=self.geometry.scaled(factor), step_position_y=self.step_position_y * factor)

    def angular_spectrum(self, qx, qy):
        w = self.geometry.waist_mm
        qx = np.asarray(qx, dtype=np.float64)
        qy = np.asarray(qy, dtype=np.float64)
        norm = math.sqrt(2.0 / math.pi) / w
        fx = math.sqrt(math.pi) * w * np.exp(-qx * qx * w * w / 4.0)
        tail = 0.5 * erfc(self.step_position_y / w + 0.5j * qy * w)
        fy = math.sqrt(math.pi) * w * np.exp(-qy * qy * w * w / 4.0) * (1.0 + (np.exp(1j * self.phase) - 1.0) * tail)
        return norm * fx * fy / (2.0 * math.pi)


@lru_cache(maxsize=16)
def _propagated_step(step_y, phase, waist, wavelength_nm, z, n):
    geom = BeamGeometry(waist, wavelength_nm, z)
    half = 8.0 * geom.width
    xs = np.linspace(-half, half, n, endpoint=False)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    u0 = PhaseStepGaussian(step_y, phase, BeamGeometry(waist, wavelength_nm, 0.0))._waist_field(X, Y)
    q = 2.0 * np.pi * np.fft.fftfreq(n, d=xs[1] - xs[0])
    QX, QY = np.meshgrid(q, q, indexing="ij")
    uz = np.fft.ifft2(np.fft.fft2(u0) * np.exp(-1j * (QX**2 + QY**2) * z / (2.0 * geom.k)))
    re = RegularGridInterpolator((xs, xs), uz.real, bounds_error=False, fill_value=0.0)
    im = RegularGridInterpolator((xs, xs), uz.imag, bounds_error=False, fill_value=0.0)
    return lambda pts: re(pts) + 1j * im(pts)


def eval_mode(mode, point):
    """Complex field of ``mode`` at the transverse ``point`` (x_mm, y_mm)."""
    x, y = point
    return complex(mode.field(x, y))


# --------------------------------------------------------------------- parity


@dataclass(frozen=True)
class Parity:
    value: str  # "Even" | "Odd" | "Undefined"
    odd_fraction: float

    @classmethod
    def classify(cls, odd_fraction, eps=PARITY_EPS):
        if odd_fraction < eps:
            return cls("Even", odd_fraction)
        if odd_fraction > 1.0 - eps:
            return cls("Odd", odd_fraction)
        return cls("Undefined", odd_fraction)


def plane_norm(mode, order=128, half_width=None):
    """Integral of |field|^2 over [-4w, 4w]^2 (Gauss-Legendre)."""
    hw = 4.0 * mode.geometry.width if half_width is None else half_width
    X, Y, W = gauss_legendre_2d(order, hw)
    return float(np.sum(W * np.abs(mode.field(X, Y)) ** 2))


def parity_y(mode, order=128, eps=PARITY_EPS):
    """Split ``mode`` into y-even and y-odd parts and classify it."""
    hw = 4.0 * mode.geometry.width
    X, Y, W = gauss_legendre_2d(order, hw)
    f = mode.field(X, Y)
    fm = mode.field(X, -Y)
    odd = np.sum(W * np.abs(0.5 * (f - fm)) ** 2)
    even = np.sum(W * np.abs(0.5 * (f + fm)) ** 2)
    frac = float(odd / (odd + even))
    return Parity.classify(frac, eps)


# ------------------------------------------------------------ LG Fourier pair


def _lg_radial_waist(p, l, waist):
    mode = LG(p, l, BeamGeometry(waist, 1.0))
    return lambda r: mode.radial(r).real


def lg_fourier(p, l, q, waist_mm=1.0, *, q_cut=10.0, nodes=128, rtol=1e-12):
    """Radial profile of the 2-D Fourier transform of LG(p, l) at its waist.

    Computed as an order-|l| Hankel transform of the radial factor over
    ``[0, q_cut * w]`` so that ``v(q, phi_q) = lg_fourier(q) exp(-i l phi_q)``
    under the ``(1/2pi) int d^2rho exp(-i q.rho)`` convention.
    """
    q = np.asarray(q, dtype=np.float64)
    if np.any(q < 0):
        raise DomainError("lg_fourier needs q >= 0")
    f = _lg_radial_waist(p, l, waist_mm)
    val = hankel(f, abs(l), q.ravel(), q_cut * waist_mm, nodes=nodes, rtol=rtol)
    out = ((-1j) ** abs(l) * val).reshape(q.shape)
    return complex(out) if out.ndim == 0 else out


def lg_fourier_inverse(p, l, rho, waist_mm=1.0, *, q_cut=10.0, nodes=128, rtol=1e-12):
    """Invert :func:`lg_fourier`: rebuild the radial factor from its transform."""
    rho = np.asarray(rho, dtype=np.float64)

    def spectrum(qn):
        return (1j ** abs(l) * lg_fourier(p, l, qn, waist_mm, q_cut=q_cut, nodes=nodes, rtol=rtol)).real

    val = hankel(spectrum, abs(l), rho.ravel(), q_cut / waist_mm, nodes=nodes, rtol=rtol)
    return val.reshape(rho.shape)
