import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmhom.biphoton import (
    BELL_STATES,
    BiphotonState,
    CrystalConfig,
    TwoPhotonPolarization,
    bell_state,
    exchange_symmetry,
    phi_momentum,
    rotate_polarization_bilateral,
    two_photon_mode,
    wavefunction_direct,
)
from mmhom.errors import DomainError
from mmhom.modes import HG, LG, BeamGeometry

from conftest import INV_SQRT2, make_state

G = BeamGeometry(0.5, 351.1)
coord = st.floats(-2.0, 2.0)
vec2 = st.tuples(coord, coord)


def test_bell_vectors():
    r = INV_SQRT2
    assert np.allclose(bell_state("PsiMinus").vector, [0, r, -r, 0])
    assert np.allclose(bell_state("PhiPlus").vector, [r, 0, 0, r])
    assert bell_state("PsiMinus").symmetry == "Antisymmetric"
    for name in ("PsiPlus", "PhiPlus", "PhiMinus"):
        assert bell_state(name).symmetry == "Symmetric"
    assert TwoPhotonPolarization((1, 0, 0, 0)).symmetry == "Symmetric"
    assert TwoPhotonPolarization((0, 1, 0, 0)).symmetry == "Mixed"
    with pytest.raises(DomainError):
        bell_state("Singlet")


def test_polarization_norm_enforced():
    with pytest.raises(DomainError):
        TwoPhotonPolarization((1, 1, 0, 0))


@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8))
@settings(max_examples=80, deadline=None)
def test_symmetry_classes_total_and_idempotent(parts):
    vec = np.array(parts[:4]) + 1j * np.array(parts[4:])
    if np.linalg.norm(vec) < 1e-3:
        return
    pol = TwoPhotonPolarization.from_vector(vec, normalize=True)
    cls = pol.symmetry
    assert cls in ("Symmetric", "Antisymmetric", "Mixed")
    assert exchange_symmetry(pol.vector) == cls


@given(st.floats(0, 2 * math.pi), st.sampled_from(BELL_STATES))
@settings(max_examples=60, deadline=None)
def test_bilateral_rotation_preserves_norm_and_class(angle, name):
    pol = bell_state(name)
    rot = rotate_polarization_bilateral(pol, angle)
    assert np.linalg.norm(rot.vector) == pytest.approx(1.0, abs=1e-12)
    assert rot.symmetry == pol.symmetry


@given(st.floats(0, 2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_singlet_rotation_invariant(angle):
    pol = bell_state("PsiMinus")
    assert rotate_polarization_bilateral(pol, angle).close_to(pol)


def test_triplet_in_diagonal_basis():
    pol = bell_state("PsiPlus")
    plus = np.array([1.0, 1.0]) * INV_SQRT2
    minus = np.array([1.0, -1.0]) * INV_SQRT2
    assert np.vdot(np.kron(plus, plus), pol.vector) == pytest.approx(INV_SQRT2, abs=1e-14)
    assert np.vdot(np.kron(minus, minus), pol.vector) == pytest.approx(-INV_SQRT2, abs=1e-14)
    assert abs(np.vdot(np.kron(plus, minus), pol.vector)) < 1e-14
    rotated = rotate_polarization_bilateral(pol, math.pi / 4)
    assert rotated.close_to(TwoPhotonPolarization((INV_SQRT2, 0, 0, -INV_SQRT2)))


def test_identity_rotation():
    hh = TwoPhotonPolarization((1, 0, 0, 0))
    assert rotate_polarization_bilateral(hh, 0.0).close_to(hh, up_to_phase=False)


def test_phi_momentum_examples():
    s = make_state(HG(0, 0, G), "hh")
    q0 = np.array([3.0, 0.0])
    peak = phi_momentum(s, q0, -q0)
    assert abs(peak) == pytest.approx(abs(phi_momentum(s, np.zeros(2), np.zeros(2))), rel=1e-14)
    assert abs(peak) > abs(phi_momentum(s, q0, q0))
    odd = make_state(HG(0, 1, G), "hh")
    assert abs(phi_momentum(odd, q0, -q0)) == 0.0


def test_phi_momentum_sinc_zero():
    pump = HG(0, 0, G)
    s = BiphotonState(pump, bell_state("PsiMinus"), CrystalConfig.for_pump(pump, 1.0, thin_crystal=False))
    d = math.sqrt(4.0 * math.pi * s.K / s.crystal.length_mm)
    q = np.array([d / 2, 0.0])
    assert abs(phi_momentum(s, q, -q)) < 1e-16 * abs(phi_momentum(s, 0 * q, 0 * q)) + 1e-18


@given(vec2, vec2)
@settings(max_examples=50, deadline=None)
def test_phi_momentum_exchange_symmetric(a, b):
    pump = HG(1, 2, G)
    s = BiphotonState(pump, bell_state("PsiPlus"), CrystalConfig.for_pump(pump, 5.0, thin_crystal=False))
    qa, qb = np.array(a) * 50, np.array(b) * 50
    assert phi_momentum(s, qa, qb) == pytest.approx(phi_momentum(s, qb, qa), rel=1e-14, abs=1e-300)


def test_paraxial_budget():
    s = make_state(HG(0, 0, G), "hh")
    with pytest.raises(DomainError):
        phi_momentum(s, np.array([0.2 * s.K, 0.0]), np.zeros(2))


def test_thin_crystal_flag_checked():
    pump = HG(0, 0, G)
    limit = 0.2 * G.rayleigh_range
    with pytest.raises(DomainError):
        BiphotonState(pump, bell_state("PsiMinus"), CrystalConfig.for_pump(pump, 1.01 * limit))
    BiphotonState(pump, bell_state("PsiMinus"), CrystalConfig.for_pump(pump, 0.99 * limit))


def test_wavelength_mismatch_rejected():
    pump = HG(0, 0, G)
    with pytest.raises(DomainError):
        BiphotonState(pump, bell_state("PsiMinus"), CrystalConfig(1.0, 2.0 * pump.geometry.k))


def test_two_photon_mode_scaling():
    tp = two_photon_mode(HG(0, 0, G))
    assert tp.geometry.waist_mm == pytest.approx(math.sqrt(2) * G.waist_mm)
    assert tp.geometry.rayleigh_range == pytest.approx(G.rayleigh_range, rel=1e-12)


def test_lg_vortex_null_on_antipodes():
    s = make_state(LG(0, 1, G), "hh")
    assert abs(wavefunction_direct(s, (0.7, -0.3), (-0.7, 0.3), 800.0)) == 0.0


@given(vec2, vec2, vec2, st.sampled_from([HG(1, 0, G), LG(0, 2, G), LG(1, -1, G)]))
@settings(max_examples=60, deadline=None)
def test_translation_invariance(rs, ri, delta, pump):
    s = make_state(pump, "PsiMinus")
    rs, ri, d = map(np.array, (rs, ri, delta))
    a = wavefunction_direct(s, rs + d, ri - d, 1000.0)
    b = wavefunction_direct(s, rs, ri, 1000.0)
    assert abs(a - b) < 1e-10
