"""Bell-state analysis with a multimode HOM interferometer.

Two polarizing beam splitters behind the outputs A (port 1) and B (port 2)
give four detectors A_h, A_v, B_h, B_v. Outcome probabilities come from the
interferometer amplitudes of :mod:`mmhom.hom` projected onto h/v; a
Monte Carlo layer adds detector efficiency, dark counts and the
threshold/number-resolving distinction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import _kernels
from .biphoton import BiphotonState, CrystalConfig, bell_state
from .errors import DomainError, UnsupportedConfiguration
from .hom import BeamSplitter, DetectionGeometry, same_port_terms
from .modes import HG, BeamGeometry
from .quadrature import gauss_legendre_2d

DETECTORS = ("A_h", "A_v", "B_h", "B_v")
CLASSES = ("PsiMinus", "PsiPlus", "PhiPair")
AMBIGUOUS = "ambiguous"
RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence.spawn (one child per chunk)"
CHUNK_GATES = 1 << 16

# every unordered detector pair, same-detector pairs included
PAIRS = tuple(combinations_with_replacement(range(4), 2))


def signature(d1, d2=None):
    """Canonical label such as ``"A_hB_v"`` (ordered A_h < A_v < B_h < B_v)."""
    if d2 is None:
        return DETECTORS[d1]
    a, b = sorted((d1, d2))
    return DETECTORS[a] + DETECTORS[b]


SIGNATURES = tuple(signature(a, b) for a, b in PAIRS)

_TABLES = {
    "Odd": {
        "PsiMinus": {"A_hA_v", "B_hB_v"},
        "PsiPlus": {"A_hB_v", "A_vB_h"},
        "PhiPair": {"A_hB_h", "A_vB_v"},
    },
    "Even": {
        "PsiMinus": {"A_hB_v", "A_vB_h"},
        "PsiPlus": {"A_hA_v", "B_hB_v"},
        "PhiPair": {"A_hA_h", "A_vA_v", "B_hB_h", "B_vB_v"},
    },
}


def _parity(p):
    if p not in ("Even", "Odd"):
        raise DomainError(f"pump parity must be 'Even' or 'Odd', got {p!r}")
    return p


def true_class(bell):
    if bell not in ("PsiMinus", "PsiPlus", "PhiPlus", "PhiMinus"):
        raise DomainError(f"unknown Bell state {bell!r}")
    return "PhiPair" if bell in ("PhiPlus", "PhiMinus") else bell


def classify(sig, pump_parity):
    for cls, members in _TABLES[_parity(pump_parity)].items():
        if sig in members:
            return cls
    return AMBIGUOUS


@dataclass
class OutcomeDistribution:
    probabilities: dict  # signature -> probability, all 10 pairs present

    def __post_init__(self):
        total = math.fsum(self.probabilities.values())
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"outcome probabilities sum to {total}, expected 1")

    def support(self, tol=1e-12):
        return {s for s, p in self.probabilities.items() if p > tol}

    def vector(self):
        return np.array([self.probabilities[s] for s in SIGNATURES])


def default_pump(pump_parity):
    g = BeamGeometry(0.5, 351.1)
    return HG(0, 0, g) if _parity(pump_parity) == "Even" else HG(0, 1, g)


def outcome_distribution(input_state, pump_parity, bs=None, *, visibility=1.0, Z_mm=1000.0, order=64):
    """Ten-signature outcome distribution computed from the interferometer amplitudes.

    The pump is HG00 (even) or HG01 (odd). ``visibility`` mixes the ideal
    zero-delay distribution with the fully distinguishable one:
    ``V * ideal + (1 - V) * incoherent``. Two photons at one detector carry
    the factor 1/2 for identical photons in one mode.
    """
    bs = bs or BeamSplitter()
    if not bs.balanced:
        raise UnsupportedConfiguration("the analyzer is modeled for a 50-50 splitter (t = r)")
    if not 0.0 <= visibility <= 1.0:
        raise DomainError(f"visibility must lie in [0, 1], got {visibility}")
    pol = bell_state(input_state) if isinstance(input_state, str) else input_state
    pump = default_pump(pump_parity)
    state = BiphotonState(pump, pol, CrystalConfig.for_pump(pump))
    geom = DetectionGeometry(Z_mm)
    hw = 4.0 * pump.at(Z_mm).geometry.width
    X, Y, W = gauss_legendre_2d(order, hw)
    r = np.stack([X, Y], axis=-1)
    rm = np.stack([X, -Y], axis=-1)

    from .hom import amplitude_rr, amplitude_tt

    pairs = {
        "cross": (amplitude_tt(state, bs, geom, r, r).vector, amplitude_rr(state, bs, geom, r, r).vector),
        "A": same_port_terms(state, bs, geom, 1, r, rm),
        "B": same_port_terms(state, bs, geom, 2, r, rm),
    }

    def channel(env):
        probs = dict.fromkeys(SIGNATURES, 0.0)
        for where, (a, b) in pairs.items():
            # |a + e b|^2 summed coherently with weight e, incoherently with 1 - e
            ia = np.abs(a) ** 2 + np.abs(b) ** 2
            co = 2.0 * np.real(np.conj(a) * b)
            dens = np.einsum("ij,ijk->k", W, ia + env * co)  # over (hh, hv, vh, vv)
            if where == "cross":
                for k, (pa, pb) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
                    probs[signature(pa, 2 + pb)] += dens[k]
            else:
                off = 0 if where == "A" else 2
                probs[signature(off, off)] += 0.5 * dens[0]
                probs[signature(off + 1, off + 1)] += 0.5 * dens[3]
                probs[signature(off, off + 1)] += dens[1] + dens[2]
        return probs

    ideal = channel(1.0)
    incoherent = channel(0.0)
    mixed = {s: visibility * ideal[s] + (1.0 - visibility) * incoherent[s] for s in SIGNATURES}
    total = math.fsum(mixed.values())
    return OutcomeDistribution({s: float(max(v / total, 0.0)) for s, v in mixed.items()})


def expected_error_rate(input_state, pump_parity, visibility=1.0):
    """Misassigned / assigned probability for ideal detectors (analytic, no sampling)."""
    dist = outcome_distribution(input_state, pump_parity, visibility=visibility)
    truth = true_class(input_state)
    assigned = wrong = 0.0
    for s, p in dist.probabilities.items():
        c = classify(s, pump_parity)
        if c == AMBIGUOUS:
            continue
        assigned += p
        if c != truth:
            wrong += p
    return wrong / assigned if assigned > 0 else 0.0


# --------------------------------------------------------------- Monte Carlo


def _per_detector(value, name):
    arr = np.broadcast_to(np.asarray(value, dtype=np.float64), (4,)).copy()
    if np.any(arr < 0) or np.any(arr > 1):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return arr


@dataclass(frozen=True)
class DetectorModel:
    """Efficiency and per-gate dark probability, scalar or one value per detector."""

    efficiency: object = 1.0
    dark_prob: object = 0.0
    number_resolving: bool = False
    seed: int = 0

    def __post_init__(self):
        _per_detector(self.efficiency, "efficiency")
        _per_detector(self.dark_prob, "dark_prob")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def efficiencies(self):
        return _per_detector(self.efficiency, "efficiency")

    @property
    def dark_probs(self):
        return _per_detector(self.dark_prob, "dark_prob")


@dataclass
class EventTally:
    counts: dict
    total_gates: int
    misidentification_matrix: np.ndarray  # rows: true class, cols: assigned class (CLASSES order)
    pump_parity: str
    input_state: str
    ambiguous: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def assigned(self):
        return int(self.misidentification_matrix.sum())

    @property
    def error_rate(self):
        m = self.misidentification_matrix
        n = m.sum()
        return float((n - np.trace(m)) / n) if n else 0.0

    def rows(self):
        truth = true_class(self.input_state)
        for sig in sorted(self.counts):
            yield sig, self.counts[sig], classify(sig, self.pump_parity), truth

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["signature", "count", "assigned_class", "true_class"])
            for row in self.rows():
                w.writerow(row)


def _decode(code):
    """Click pattern for a base-3 code: signature string, or None for no click."""
    counts = [(code // 3**d) % 3 for d in range(4)]
    fired = [d for d in range(4) if counts[d]]
    if not fired:
        return None
    if len(fired) == 1:
        d = fired[0]
        return signature(d, d) if counts[d] == 2 else signature(d)
    if len(fired) == 2 and all(counts[d] == 1 for d in fired):
        return signature(*fired)
    return "+".join(DETECTORS[d] + ("x2" if counts[d] == 2 else "") for d in fired)


def _photon_table():
    return np.array(PAIRS, dtype=np.int64)


def _run_chunk(cdf, seed_seq, n, model):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    outcome = np.searchsorted(cdf, rng.random(n), side="right")
    outcome = np.minimum(outcome, len(PAIRS) - 1)
    u_eff = rng.random((n, 2))
    u_dark = rng.random((n, 4))
    codes = _kernels.detect_gates(outcome.astype(np.int64), _photon_table(), u_eff, u_dark,
                                  model.efficiencies, model.dark_probs, model.number_resolving)
    return np.bincount(codes, minlength=81)


def run_monte_carlo(input_state, pump_parity, detector_model=None, gates=100_000, *, visibility=1.0,
                    distribution=None):
    """Sample ``gates`` pair events through the detector model and tally them.

    Gates are split into fixed chunks of 65536, each seeded from
    ``SeedSequence(seed).spawn``; results do not depend on how chunks are
    scheduled.
    """
    if int(gates) < 1:
        raise DomainError("gates must be >= 1")
    gates = int(gates)
    model = detector_model or DetectorModel()
    dist = distribution or outcome_distribution(input_state, pump_parity, visibility=visibility)
    probs = dist.vector()
    cdf = np.cumsum(probs) / probs.sum()
    n_chunks = -(-gates // CHUNK_GATES)
    children = np.random.SeedSequence(int(model.seed)).spawn(n_chunks)
    hist = np.zeros(81, dtype=np.int64)
    for j, child in enumerate(children):
        n = min(CHUNK_GATES, gates - j * CHUNK_GATES)
        hist += _run_chunk(cdf, child, n, model)

    counts = {}
    matrix = np.zeros((3, 3), dtype=np.int64)
    truth = CLASSES.index(true_class(input_state))
    ambiguous = 0
    for code in np.nonzero(hist)[0]:
        sig = _decode(int(code))
        if sig is None:
            continue
        counts[sig] = counts.get(sig, 0) + int(hist[code])
        cls = classify(sig, pump_parity)
        if cls == AMBIGUOUS:
            ambiguous += int(hist[code])
        else:
            matrix[truth, CLASSES.index(cls)] += int(hist[code])
    meta = {
        "rng": RNG_ALGORITHM,
        "seed": int(model.seed),
        "chunks": n_chunks,
        "backend": _kernels.BACKEND,
        "visibility": visibility,
    }
    return EventTally(counts, gates, matrix, pump_parity, input_state, ambiguous, meta)
