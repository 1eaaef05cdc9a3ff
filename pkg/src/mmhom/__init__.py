"""Multimode Hong-Ou-Mandel interference of transverse-mode-shaped photon pairs."""

__version__ = "0.1.0"

from .biphoton import (  # noqa: E402
    BiphotonState,
    CrystalConfig,
    TwoPhotonPolarization,
    bell_state,
    two_photon_mode,
    wavefunction_direct,
)
from .errors import DomainError, NumericalError, UnsupportedConfiguration  # noqa: E402
from .hom import (  # noqa: E402
    BeamSplitter,
    CoincidenceMap,
    DetectionConfig,
    DetectionGeometry,
    DipCurve,
    DipModel,
    amplitude_rr,
    amplitude_same_port,
    amplitude_tt,
    coincidence_cross,
    coincidence_same_port,
    dip_curve,
    scan_map,
)
from .modes import HG, LG, BeamGeometry, Parity, PhaseStepGaussian, Superposition, parity_y  # noqa: E402

__all__ = [
    "BeamGeometry", "BeamSplitter", "BiphotonState", "CoincidenceMap", "CrystalConfig", "DetectionConfig",
    "DetectionGeometry", "DipCurve", "DipModel", "DomainError", "HG", "LG", "NumericalError", "Parity",
    "PhaseStepGaussian", "Superposition", "TwoPhotonPolarization", "UnsupportedConfiguration", "amplitude_rr",
    "amplitude_same_port", "amplitude_tt", "bell_state", "coincidence_cross", "coincidence_same_port",
    "dip_curve", "parity_y", "scan_map", "two_photon_mode", "wavefunction_direct",
]
