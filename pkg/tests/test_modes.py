import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmhom.errors import DomainError
from mmhom.modes import (
    HG,
    LG,
    BeamGeometry,
    PhaseStepGaussian,
    Superposition,
    eval_mode,
    hermite_poly,
    laguerre_poly,
    lg_fourier,
    lg_fourier_inverse,
    parity_y,
    plane_norm,
)

from oracles import hermite_terms, laguerre_terms, series

XS = np.linspace(-3.0, 3.0, 13)


def test_hermite_trivial():
    assert hermite_poly(0, 3.7) == 1.0
    assert hermite_poly(2, 1.0) == 2.0


@pytest.mark.parametrize("n", range(11))
def test_hermite_matches_series(n):
    for x in XS:
        ref, scale = series(hermite_terms(n, x))
        assert abs(hermite_poly(n, x) - ref) <= 1e-10 * max(scale, 1.0)


def test_laguerre_trivial():
    assert laguerre_poly(0, 2, 5.0) == 1.0
    assert laguerre_poly(1, 0, 1.0) == 0.0


@pytest.mark.parametrize("p", range(11))
@pytest.mark.parametrize("alpha", [0, 1, 3, 6])
def test_laguerre_matches_series(p, alpha):
    for x in np.linspace(0.0, 8.0, 9):
        ref, scale = series(laguerre_terms(p, alpha, x))
        assert abs(laguerre_poly(p, alpha, x) - ref) <= 1e-10 * max(scale, 1.0)


def test_polynomial_domain_errors():
    with pytest.raises(DomainError):
        hermite_poly(-1, 0.0)
    with pytest.raises(DomainError):
        laguerre_poly(2, 1, -0.5)
    with pytest.raises(DomainError):
        laguerre_poly(2, -1, 0.5)


def test_geometry_derived_quantities():
    g = BeamGeometry(0.5, 351.1, 250.0)
    zr = math.pi * 0.25 / 351.1e-6
    assert g.rayleigh_range == pytest.approx(zr, rel=1e-12)
    assert g.curvature_radius == pytest.approx((250.0**2 + zr**2) / 250.0, rel=1e-12)
    assert g.gouy == pytest.approx(math.atan(250.0 / zr), rel=1e-12)
    assert g.width == pytest.approx(0.5 * math.sqrt(1 + (250.0 / zr) ** 2), rel=1e-12)
    with pytest.raises(DomainError):
        BeamGeometry(0.0, 351.1)


def test_scaled_geometry_keeps_rayleigh_range(geometry):
    s = geometry.scaled(math.sqrt(2.0))
    assert s.rayleigh_range == pytest.approx(geometry.rayleigh_range, rel=1e-12)
    assert s.waist_mm == pytest.approx(math.sqrt(2.0) * geometry.waist_mm)


def test_nodal_lines(geometry):
    for x in XS:
        assert eval_mode(HG(0, 1, geometry), (x, 0.0)) == 0
    assert eval_mode(LG(0, 1, geometry), (0.0, 0.0)) == 0


def test_hg10_hand_value(geometry):
    w = geometry.waist_mm
    # C = 1/(sqrt(pi) w), H_1(1) = 2, exp(-1/2)
    expected = 2.0 * math.exp(-0.5) / (math.sqrt(math.pi) * w)
    assert eval_mode(HG(1, 0, geometry), (w / math.sqrt(2.0), 0.0)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("z", [0.0, 1000.0])
def test_normalization_all_low_orders(geometry, z):
    g = geometry.at(z)
    for m in range(5):
        for n in range(5 - m):
            assert abs(plane_norm(HG(m, n, g)) - 1.0) < 1e-4
    for p in range(3):
        for l in range(-4, 5):
            if 2 * p + abs(l) <= 4:
                assert abs(plane_norm(LG(p, l, g)) - 1.0) < 1e-4


def test_parity_dispatch_hg(geometry):
    for m in range(5):
        for n in range(5):
            par = parity_y(HG(m, n, geometry), order=96)
            assert par.value == ("Even" if n % 2 == 0 else "Odd")


def test_parity_superposition_undefined(geometry):
    r = 1.0 / math.sqrt(2.0)
    sup = Superposition(((r, HG(1, 0, geometry)), (r, HG(0, 1, geometry))))
    par = parity_y(sup)
    assert par.value == "Undefined"
    assert par.odd_fraction == pytest.approx(0.5, abs=1e-9)


def test_superposition_weights_checked(geometry):
    with pytest.raises(DomainError):
        Superposition(((1.0, HG(1, 0, geometry)), (1.0, HG(0, 1, geometry))))


def test_phase_step_is_odd_dominant(geometry):
    par = parity_y(PhaseStepGaussian(0.0, math.pi, geometry))
    assert par.value == "Odd"


def test_phase_step_propagated_norm(geometry):
    # the hard edge diffracts into slow tails, so integrate over the whole lattice
    g = geometry.at(1000.0)
    mode = PhaseStepGaussian(0.0, math.pi, g)
    assert abs(plane_norm(mode, order=160, half_width=8.0 * g.width) - 1.0) < 0.03


@pytest.mark.parametrize("l", [1, 2, 3, -2])
def test_vortex_winding(geometry, l):
    w = geometry.waist_mm
    phi = np.linspace(0.0, 2.0 * math.pi, 2001)
    f = LG(0, l, geometry.at(1000.0)).field(w * np.cos(phi), w * np.sin(phi))
    winding = np.sum(np.angle(f[1:] / f[:-1]))
    assert winding == pytest.approx(-2.0 * math.pi * l, abs=1e-6)


def test_lg_fourier_trivial():
    assert abs(lg_fourier(0, 1, 0.0)) < 1e-15
    q = np.linspace(0.0, 6.0, 31)
    g = np.abs(lg_fourier(0, 0, q))
    assert np.argmax(g) == 0


@pytest.mark.parametrize("p,l", [(0, 1), (1, 2), (2, 0), (0, 3)])
def test_lg_fourier_self_similarity(p, l):
    # transform of LG(p, l) with waist w is (-i)^|l| (-1)^p times LG(p, l) with waist 2/w
    w = 0.7
    q = np.linspace(0.0, 8.0, 17)
    ref = LG(p, l, BeamGeometry(2.0 / w, 1.0)).radial(q)
    got = lg_fourier(p, l, q, w)
    assert np.max(np.abs(got - (-1j) ** abs(l) * (-1) ** p * ref)) < 1e-9 * np.max(np.abs(ref))


@pytest.mark.parametrize("p,l", [(0, 0), (0, 2), (1, 2), (2, 0), (2, 2), (1, 4)])
def test_lg_fourier_round_trip(p, l):
    w = 0.5
    rho = np.linspace(0.0, 1.5, 16)
    ref = LG(p, l, BeamGeometry(w, 1.0)).radial(rho).real
    back = lg_fourier_inverse(p, l, rho, w)
    assert np.max(np.abs(back - ref)) < 1e-5 * np.max(np.abs(ref))


@given(m=st.integers(0, 4), n=st.integers(0, 4), x=st.floats(-2, 2), y=st.floats(-2, 2))
@settings(max_examples=60, deadline=None)
def test_fields_finite(m, n, x, y):
    g = BeamGeometry(0.5, 351.1, 700.0)
    assert np.isfinite(eval_mode(HG(m, n, g), (x, y)))
    assert np.isfinite(eval_mode(LG(m, n - 2, g), (x, y)))
