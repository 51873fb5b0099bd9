"""Outage probabilities and secrecy transmission capacity of artificial-noise-aided
sectoring and beamforming in Poisson ad hoc networks."""

__version__ = "0.1.0"

from ._validation import CapabilityError, DomainError, InfeasibleError
from .model import NetworkParams, OutageConstraints, PowerSplit, SirThresholds

__all__ = [
    "CapabilityError",
    "DomainError",
    "InfeasibleError",
    "NetworkParams",
    "OutageConstraints",
    "PowerSplit",
    "SirThresholds",
]
