"""Exact spectra, phase shifts and rebound delays for the step-linear and step-exponential potentials."""

__version__ = "0.1.0"

from .common import BoundState, DelaySample, Resonance, RootFindingError, ScatteringState, ThresholdError
from .stepexp import StepExpParams
from .steplinear import StepLinearParams
from .symwells import WellLevel
from .wavepacket import PacketTrace, WavePacketSpec

__all__ = [
    "BoundState",
    "DelaySample",
    "PacketTrace",
    "Resonance",
    "RootFindingError",
    "ScatteringState",
    "StepExpParams",
    "StepLinearParams",
    "ThresholdError",
    "WavePacketSpec",
    "WellLevel",
    "__version__",
]
