"""Command-line driver: ``mmhom <experiment> --config cfg.json [--out DIR] [--seed N]``.

Config files are flat JSON objects with unit-suffixed keys; the pump is a
nested object. Unknown keys are rejected. Coordinates are port-local: the
detector-2 y axis is mirror-inverted relative to detector 1.

Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .errors import DomainError, NumericalError, UnsupportedConfiguration

EXPERIMENTS = ("dip", "map", "same_port", "oam_decompose", "zero_locus", "falsifier", "bsa")
PUMP_KEYS = {"family", "m", "n", "p", "l", "terms", "weight_re", "weight_im", "step_position_y_mm", "phase_rad"}
POLARIZATION_PRODUCTS = {"hh": (1, 0, 0, 0), "hv": (0, 1, 0, 0), "vh": (0, 0, 1, 0), "vv": (0, 0, 0, 1)}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    experiment: str
    pump: dict = field(default_factory=lambda: {"family": "HG", "m": 0, "n": 0})
    pump_waist_mm: float = 0.5
    pump_wavelength_nm: float = 351.1
    crystal_length_mm: float = 1.0
    thin_crystal: bool = True
    polarization: object = "PsiPlus"
    detector_distance_mm: float = 1000.0
    bs_transmission: float | None = None
    # map scans
    grid_half_width_mm: float = 3.0
    grid_points: int = 41
    fixed_x_mm: float = 0.0
    fixed_y_mm: float = 0.0
    balanced: bool = True
    scan_kind: str = "cross"
    port: int = 1
    fixed_aperture_mm: float = 0.0
    moving_aperture_mm: float = 0.0
    analyzer_1_rad: float | None = None
    analyzer_2_rad: float | None = None
    # delay scans
    delay_min_um: float = -300.0
    delay_max_um: float = 300.0
    delay_points: int = 61
    filter_center_nm: float = 702.0
    filter_bandwidth_nm: float = 1.0
    envelope_shape: float = 1.0 / math.pi
    # OAM
    l_max: int = 3
    p_max: int = 2
    enforce_delta: bool = True
    delta_x_mm: float = 1.0
    delta_y_mm: float = 1.0
    # Bell-state analyzer
    bell_state: str = "PsiMinus"
    pump_parity: str = "Odd"
    gates: int = 100_000
    visibility: float = 1.0
    efficiency: object = 1.0
    dark_prob: object = 0.0
    number_resolving: bool = False
    seed: int = 0

    @classmethod
    def from_mapping(cls, data, experiment=None):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        data = dict(data)
        if experiment is not None:
            if "experiment" in data and data["experiment"] != experiment:
                raise ConfigError(f"config names experiment {data['experiment']!r} but {experiment!r} was requested")
            data["experiment"] = experiment
        if data.get("experiment") not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {data.get('experiment')!r}")
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self):
        for name in ("pump_waist_mm", "pump_wavelength_nm", "crystal_length_mm", "detector_distance_mm",
                     "grid_half_width_mm", "filter_center_nm", "filter_bandwidth_nm", "envelope_shape"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
                raise ConfigError(f"{name} must be a positive number, got {val!r}")
        for name in ("grid_points", "delay_points", "gates"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise ConfigError(f"{name} must be a positive integer, got {val!r}")
        if self.scan_kind not in ("cross", "same"):
            raise ConfigError(f"scan_kind must be 'cross' or 'same', got {self.scan_kind!r}")
        if self.port not in (1, 2):
            raise ConfigError(f"port must be 1 or 2, got {self.port!r}")
        if self.delay_max_um < self.delay_min_um:
            raise ConfigError("delay_max_um must not be below delay_min_um")
        if not 0.0 <= self.visibility <= 1.0:
            raise ConfigError("visibility must lie in [0, 1]")
        if self.pump_parity not in ("Even", "Odd"):
            raise ConfigError("pump_parity must be 'Even' or 'Odd'")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        _check_pump_keys(self.pump)

    def echo(self):
        return dataclasses.asdict(self)


def _check_pump_keys(spec):
    if not isinstance(spec, dict):
        raise ConfigError("pump must be an object")
    unknown = sorted(set(spec) - PUMP_KEYS)
    if unknown:
        raise ConfigError(f"unknown pump keys: {', '.join(unknown)}")
    for term in spec.get("terms", []):
        _check_pump_keys(term)


# ------------------------------------------------------------------ builders


def build_pump(spec, geometry):
    from .modes import HG, LG, PhaseStepGaussian, Superposition

    family = str(spec.get("family", "HG")).upper()
    if family == "HG":
        return HG(int(spec.get("m", 0)), int(spec.get("n", 0)), geometry)
    if family == "LG":
        return LG(int(spec.get("p", 0)), int(spec.get("l", 0)), geometry)
    if family == "PHASE_STEP":
        return PhaseStepGaussian(float(spec.get("step_position_y_mm", 0.0)), float(spec.get("phase_rad", math.pi)),
                                 geometry)
    if family == "SUPERPOSITION":
        terms = spec.get("terms")
        if not terms:
            raise ConfigError("superposition pump needs a non-empty 'terms' list")
        pairs = []
        for t in terms:
            w = complex(float(t.get("weight_re", 0.0)), float(t.get("weight_im", 0.0)))
            inner = {k: v for k, v in t.items() if k not in ("weight_re", "weight_im")}
            pairs.append((w, build_pump(inner, geometry)))
        return Superposition(tuple(pairs))
    raise ConfigError(f"unknown pump family {spec.get('family')!r}")


def build_polarization(spec):
    from .biphoton import BELL_STATES, TwoPhotonPolarization, bell_state

    if isinstance(spec, str):
        if spec in BELL_STATES:
            return bell_state(spec)
        if spec in POLARIZATION_PRODUCTS:
            return TwoPhotonPolarization(POLARIZATION_PRODUCTS[spec])
        raise ConfigError(f"unknown polarization {spec!r}")
    if isinstance(spec, list) and len(spec) == 4:
        coeffs = [complex(*c) if isinstance(c, list) else complex(c) for c in spec]
        return TwoPhotonPolarization(tuple(coeffs))
    raise ConfigError("polarization must be a Bell-state name, a product such as 'hh', or 4 [re, im] pairs")


def build_state(cfg):
    from .biphoton import BiphotonState, CrystalConfig
    from .modes import BeamGeometry

    geometry = BeamGeometry(cfg.pump_waist_mm, cfg.pump_wavelength_nm)
    pump = build_pump(cfg.pump, geometry)
    crystal = CrystalConfig.for_pump(pump, cfg.crystal_length_mm, cfg.thin_crystal)
    return BiphotonState(pump, build_polarization(cfg.polarization), crystal)


def _bs(cfg):
    from .hom import BeamSplitter

    return BeamSplitter() if cfg.bs_transmission is None else BeamSplitter.from_transmission(cfg.bs_transmission)


# --------------------------------------------------------------- experiments


def _grid(cfg):
    from .hom import scan_grid

    g = scan_grid(cfg.grid_half_width_mm, cfg.grid_points)
    return g, g


def _delays(cfg):
    return np.linspace(cfg.delay_min_um, cfg.delay_max_um, cfg.delay_points)


def _dip_model(cfg):
    from .hom import DipModel

    return DipModel(cfg.filter_center_nm, cfg.filter_bandwidth_nm, cfg.envelope_shape)


def _run_dip(cfg, out):
    from .hom import DetectionConfig, DetectionGeometry, dip_curve
    from .io import write_table

    state = build_state(cfg)
    det = DetectionConfig(cfg.scan_kind, cfg.port, (cfg.analyzer_1_rad, cfg.analyzer_2_rad))
    curve = dip_curve(state, _bs(cfg), DetectionGeometry(cfg.detector_distance_mm), _delays(cfg), det, _dip_model(cfg))
    write_table(out / "dip.csv", ("delay_um", "rate"), zip(curve.delays_um, curve.rates))
    return {"visibility": curve.visibility, "coherence_length_um": curve.metadata["coherence_length_um"]}


def _run_map(cfg, out):
    from .hom import DetectionGeometry, scan_map
    from .io import emit_map

    state = build_state(cfg)
    xs, ys = _grid(cfg)
    cmap = scan_map(state, _bs(cfg), DetectionGeometry(cfg.detector_distance_mm), xs, ys,
                    (cfg.fixed_x_mm, cfg.fixed_y_mm), kind=cfg.scan_kind, balanced=cfg.balanced,
                    angles=(cfg.analyzer_1_rad, cfg.analyzer_2_rad), port=cfg.port,
                    apertures_mm=(cfg.fixed_aperture_mm, cfg.moving_aperture_mm))
    emit_map(cmap, out / "map")
    return {"grid_points": [xs.size, ys.size], "balanced": cfg.balanced}


def _run_same_port(cfg, out):
    from .hom import DetectionConfig, DetectionGeometry, dip_curve
    from .io import write_table

    state = build_state(cfg)
    geom = DetectionGeometry(cfg.detector_distance_mm)
    delays = _delays(cfg)
    curves = {}
    for name, angles in (("hv", (0.0, math.pi / 2)), ("pm", (math.pi / 4, -math.pi / 4))):
        det = DetectionConfig("same", cfg.port, angles)
        curves[name] = dip_curve(state, _bs(cfg), geom, delays, det, _dip_model(cfg))
    write_table(out / "same_port.csv", ("delay_um", "rate_hv", "rate_pm"),
                zip(delays, curves["hv"].rates, curves["pm"].rates))
    return {f"visibility_{k}": c.visibility for k, c in curves.items()}


def _lg_pump(cfg):
    from .modes import LG

    pump = build_state(cfg).pump
    if not isinstance(pump, LG):
        raise ConfigError(f"experiment {cfg.experiment!r} needs an LG pump")
    return pump


def _run_oam(cfg, out):
    from .io import write_table
    from .oam import oam_decompose

    spec = oam_decompose(_lg_pump(cfg), (cfg.l_max, cfg.p_max), enforce_delta=cfg.enforce_delta)
    rows = [(*k, float(c.real), float(c.imag), float(abs(c) ** 2)) for k, c in sorted(spec.entries.items())]
    write_table(out / "oam_spectrum.csv", ("l_s", "p_s", "l_i", "p_i", "re", "im", "abs2"), rows)
    return {"deficit": spec.deficit, "reference_truncation": list(spec.reference_truncation),
            "convergence": spec.convergence, "basis_waist_mm": spec.basis_waist_mm}


def _run_zero_locus(cfg, out):
    from .hom import BeamSplitter, DetectionGeometry, scan_map
    from .io import emit_map
    from .oam import zero_locus_shift_test

    pump = _lg_pump(cfg)
    state = build_state(cfg)
    geom = DetectionGeometry(cfg.detector_distance_mm)
    delta = (cfg.delta_x_mm, cfg.delta_y_mm)
    report = zero_locus_shift_test(pump, geom, delta)
    xs, ys = _grid(cfg)
    base = scan_map(state, BeamSplitter(), geom, xs, ys, (0.0, 0.0))
    moved = scan_map(state, BeamSplitter(), geom, xs, ys, delta)
    emit_map(base, out / "map_undisplaced")
    emit_map(moved, out / "map_displaced")
    return {"max_violation": report.max_violation, "locus_points": len(report.locus_points), "delta_mm": list(delta)}


def _run_falsifier(cfg, out):
    from .hom import DetectionGeometry
    from .oam import classical_model_falsifier

    rep = classical_model_falsifier(_lg_pump(cfg), None, DetectionGeometry(cfg.detector_distance_mm), seed=cfg.seed)
    result = {"verdict": rep.verdict, "degenerate": rep.degenerate, "min_residual_on_locus": rep.min_residual_on_locus,
              "threshold": rep.threshold, "weights": rep.weights, "family": [list(map(list, p)) for p in rep.family]}
    (out / "falsifier.json").write_text(json.dumps(result, indent=2) + "\n")
    return result


def _run_bsa(cfg, out):
    from .bsa import DetectorModel, classify, outcome_distribution, run_monte_carlo
    from .io import write_table

    dist = outcome_distribution(cfg.bell_state, cfg.pump_parity, _bs(cfg), visibility=cfg.visibility)
    write_table(out / "bsa_distribution.csv", ("signature", "probability", "class"),
                [(s, p, classify(s, cfg.pump_parity)) for s, p in dist.probabilities.items()])
    model = DetectorModel(cfg.efficiency, cfg.dark_prob, cfg.number_resolving, cfg.seed)
    tally = run_monte_carlo(cfg.bell_state, cfg.pump_parity, model, cfg.gates, distribution=dist)
    tally.to_csv(out / "bsa_tally.csv")
    return {"error_rate": tally.error_rate, "ambiguous": tally.ambiguous, "assigned": tally.assigned,
            "misidentification_matrix": tally.misidentification_matrix.tolist(), "rng": tally.metadata["rng"]}


RUNNERS = {
    "dip": _run_dip,
    "map": _run_map,
    "same_port": _run_same_port,
    "oam_decompose": _run_oam,
    "zero_locus": _run_zero_locus,
    "falsifier": _run_falsifier,
    "bsa": _run_bsa,
}


def _versions():
    import scipy

    return {
        "mmhom": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernel_backend": _kernels.BACKEND,
    }


def run(cfg, out_dir="."):
    """Execute ``cfg`` and write artifacts into ``out_dir``; returns the result summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = RUNNERS[cfg.experiment](cfg, out)
    meta = {
        "experiment": cfg.experiment,
        "config": cfg.echo(),
        "versions": _versions(),
        "seed": cfg.seed,
        "rng": "numpy.random.PCG64 (SeedSequence)",
        "result": result,
    }
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    return result


def load_config(path, experiment=None, seed=None):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if seed is not None and isinstance(data, dict):
        data["seed"] = seed
    return RunConfig.from_mapping(data, experiment)


def build_parser():
    p = argparse.ArgumentParser(prog="mmhom", description="Multimode Hong-Ou-Mandel simulations.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="JSON file with unit-suffixed keys")
    p.add_argument("--out", default=".", help="output directory (created if missing)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.experiment, args.seed)
        result = run(cfg, args.out)
    except (ConfigError, DomainError, UnsupportedConfiguration) as exc:
        print(f"mmhom: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"mmhom: numerical error: {exc} {exc.diagnostics}", file=sys.stderr)
        return 3
    print(json.dumps(result, default=str))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
