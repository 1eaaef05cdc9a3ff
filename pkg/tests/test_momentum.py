"""Closed-form amplitudes against the momentum-space brute force."""

import numpy as np
import pytest

from mmhom.hom import BeamSplitter, DetectionGeometry, amplitude_rr, amplitude_tt, same_port_terms
from mmhom.modes import HG, LG, BeamGeometry, Superposition
from mmhom.momentum import momentum_grid, pipeline_terms, sum_spectrum

from conftest import INV_SQRT2, make_state

G = BeamGeometry(0.5, 351.1)
GEOM = DetectionGeometry(1000.0)
BS = BeamSplitter()
SUPER = Superposition(((INV_SQRT2, HG(1, 0, G)), (INV_SQRT2, HG(0, 1, G))))
PUMPS = [HG(0, 0, G), HG(0, 1, G), LG(0, 1, G), SUPER]
POLS = ["hh", "hv", "PsiMinus", "PsiPlus"]


def rel(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


def points(seed, n=10):
    return np.random.default_rng(seed).uniform(-1.5, 1.5, (2, n, 2))


def test_grid_is_symmetric_midpoint():
    q, dq = momentum_grid(0.5, 8)
    assert np.allclose(q, -q[::-1])
    assert dq == pytest.approx(2 * 16.0 / 8)


def test_spectrum_normalized():
    s = make_state(HG(0, 0, G), "hh")
    q, dq, A = sum_spectrum(s)
    # Parseval for W(rho, 0) = int A e^{iQ.rho}: int |W|^2 = (2 pi)^2 int |A|^2
    assert (2 * np.pi) ** 2 * np.sum(np.abs(A) ** 2) * dq * dq == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("pump", PUMPS, ids=["HG00", "HG01", "LG01", "super"])
@pytest.mark.parametrize("pol", POLS)
def test_cross_terms_match(pump, pol):
    s = make_state(pump, pol)
    r1, r2 = points(1)
    terms = pipeline_terms(s, BS, GEOM, "cross", r1, r2)
    assert rel(terms["tt"].vector, amplitude_tt(s, BS, GEOM, r1, r2, method="closed").vector) < 1e-5
    assert rel(terms["rr"].vector, amplitude_rr(s, BS, GEOM, r1, r2, method="closed").vector) < 1e-5


@pytest.mark.parametrize("pump", PUMPS, ids=["HG00", "HG01", "LG01", "super"])
@pytest.mark.parametrize("pol", ["hv", "PsiMinus", "PsiPlus"])
def test_same_port_two_matches(pump, pol):
    s = make_state(pump, pol)
    rA, rB = points(2)
    first, second = same_port_terms(s, BS, GEOM, 2, rA, rB)
    terms = pipeline_terms(s, BS, GEOM, "same2", rA, rB)
    brute, closed = terms["first"].vector + terms["second"].vector, first + second
    if np.max(np.abs(closed)) < 1e-12:
        assert np.max(np.abs(brute)) < 1e-9
        return
    assert rel(brute, closed) < 1e-5


@pytest.mark.parametrize("pump", PUMPS, ids=["HG00", "HG01", "LG01", "super"])
@pytest.mark.parametrize("pol", ["hv", "PsiMinus", "PsiPlus"])
def test_same_port_one_is_detector_exchange(pump, pol):
    # the printed port-1 form is the physical one with the two detectors relabeled
    s = make_state(pump, pol)
    rA, rB = points(3)
    first, second = same_port_terms(s, BS, GEOM, 1, rA, rB)
    closed = first + second
    terms = pipeline_terms(s, BS, GEOM, "same1", rB, rA)
    brute = terms["first"].vector + terms["second"].vector
    if np.max(np.abs(closed)) < 1e-12:
        assert np.max(np.abs(brute)) < 1e-9
        return
    assert min(rel(brute, closed), rel(-brute, closed)) < 1e-5


def test_unbalanced_pipeline_conserves():
    s = make_state(HG(0, 0, G), "hh")
    bs = BeamSplitter.from_transmission(0.6)
    r1, r2 = points(4)
    tt = amplitude_tt(s, bs, GEOM, r1, r2).vector
    ref = amplitude_tt(s, BS, GEOM, r1, r2, method="closed").vector
    assert rel(tt, ref * 0.36 / 0.5) < 1e-5
