import math

import numpy as np
import pytest

from mmhom.biphoton import two_photon_mode
from mmhom.errors import DomainError
from mmhom.hom import DetectionGeometry
from mmhom.modes import LG, BeamGeometry
from mmhom.oam import (
    classical_model_falsifier,
    default_candidate_family,
    lg_coincidence_profile,
    oam_decompose,
    reconstruct,
    sum_frame,
    zero_locus_shift_test,
)

G = BeamGeometry(0.5, 351.1)
GEOM = DetectionGeometry(1000.0)


@pytest.fixture(scope="module")
def spectrum_lg01():
    return oam_decompose(LG(0, 1, G), (4, 3))


def test_sum_frame_examples():
    f = sum_frame((1.0, 0.0), (-1.0, 0.0))
    assert f.R == 0 and not f.defined
    f = sum_frame((1.0, 0.0), (1.0, 0.0))
    assert f.R == pytest.approx(math.sqrt(2)) and f.theta == 0.0 and f.defined
    f = sum_frame((0.0, 1.0), (0.0, 1.0))
    assert f.R == pytest.approx(math.sqrt(2)) and f.theta == pytest.approx(math.pi / 2)
    f = sum_frame((0.0, -1.0), (0.0, -1.0))
    assert f.theta == pytest.approx(1.5 * math.pi)


def test_profile_examples():
    assert lg_coincidence_profile(LG(0, 1, G), GEOM, (0.8, 0.0), (0.3, 0.0)) == 0.0
    r = 0.6 / math.sqrt(2)
    p2 = LG(0, 2, G)
    on = lg_coincidence_profile(p2, GEOM, (r, r), (0.0, 0.0))
    u = two_photon_mode(p2).at(GEOM.Z_mm).radial(np.hypot(r, r) / math.sqrt(2))
    assert on == pytest.approx(abs(u) ** 2, rel=1e-12)
    with pytest.raises(DomainError):
        from mmhom.modes import HG

        lg_coincidence_profile(HG(0, 1, G), GEOM, (0, 0), (1, 1))


@pytest.mark.parametrize("l", [1, 2])
def test_fringe_count(l):
    phi = np.linspace(0.0, 2 * math.pi, 4001)[:-1]
    r1 = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    prof = lg_coincidence_profile(LG(0, l, G), GEOM, r1, r1)
    peak = prof.max()
    # count minima that touch zero
    idx = np.arange(phi.size)
    mins = (prof <= np.roll(prof, 1)) & (prof <= np.roll(prof, -1)) & (prof < 1e-6 * peak)
    assert np.count_nonzero(mins[idx]) == 2 * l


@pytest.mark.parametrize("l", [0, 1, 2])
def test_selection_rule_polar(l):
    spec = oam_decompose(LG(0, l, G), (3, 2), enforce_delta=False)
    assert max(abs(c) for c in spec.off_rule().values()) < 1e-8
    assert spec.convergence < 1e-6
    on = [abs(c) for k, c in spec.entries.items() if k[0] + k[2] == l]
    assert max(on) > 1e-3


def test_gaussian_pump_leading_term():
    spec = oam_decompose(LG(0, 0, G), (2, 2))
    best = max(spec.entries, key=lambda k: abs(spec.entries[k]))
    assert best == (0, 0, 0, 0)


def test_normalization_bookkeeping(spectrum_lg01):
    on = math.fsum(abs(c) ** 2 for k, c in spectrum_lg01.entries.items() if k[0] + k[2] == 1)
    assert on + spectrum_lg01.deficit == pytest.approx(1.0, abs=1e-12)
    assert 0.0 < spectrum_lg01.deficit < 1.0


def test_truncation_limits():
    with pytest.raises(DomainError):
        oam_decompose(LG(0, 1, G), (7, 2))
    with pytest.raises(DomainError):
        oam_decompose(LG(0, 1, G), (3, 2), reference_truncation=(2, 2))


def test_reconstruction_on_axis(spectrum_lg01):
    pump = LG(0, 1, G)
    xs = np.array([0.1, 0.2, 0.3, 0.4, 0.5])
    r = np.stack([xs, np.zeros_like(xs)], axis=-1)
    rec = reconstruct(spectrum_lg01, pump, r, r)
    direct = two_photon_mode(pump).field(math.sqrt(2) * xs, np.zeros_like(xs))
    err = np.abs(rec - direct) / np.abs(direct)
    assert np.max(err) < 1e-2


def test_zero_locus_shift():
    rep = zero_locus_shift_test(LG(0, 1, G), GEOM, (1.0, 1.0))
    assert rep.max_violation < 1e-10
    assert zero_locus_shift_test(LG(0, 1, G), GEOM, (0.0, 0.0)).max_violation == 0.0
    assert len(rep.locus_points) == 81


def test_default_family_obeys_rule():
    fam = default_candidate_family(LG(0, 2, G))
    assert all(F[1] + Gi[1] == 2 and F[0] == Gi[0] == 0 for _, F, Gi in fam)


@pytest.mark.parametrize("l", [1, 2])
def test_falsifier_excludes(l):
    rep = classical_model_falsifier(LG(0, l, G))
    assert rep.verdict == "excluded" and not rep.degenerate
    assert rep.min_residual_on_locus > rep.threshold


def test_falsifier_degenerate():
    rep = classical_model_falsifier(LG(0, 1, G), [(1.0, None, (0, 1))])
    assert rep.verdict == "not excluded" and rep.degenerate


def test_falsifier_deterministic():
    a = classical_model_falsifier(LG(0, 1, G), seed=5)
    b = classical_model_falsifier(LG(0, 1, G), seed=5)
    assert a.min_residual_on_locus == b.min_residual_on_locus
