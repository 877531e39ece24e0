"""
crnmix - ergodicity certificates and mixing-time experiments for
stochastically modeled mass-action reaction networks.
"""

__version__ = "0.4.0"

from .certification import ErgodicityCertificate, certify
from .equilibrium import StationaryDistribution, find_equilibrium, is_complex_balanced, stationary_for
from .exceptions import CRNError
from .kinetics import DriftReport, apply_generator, drift_scan, intensity
from .mixing import MixingTimeEstimate, estimate_mixing_time, tv_distance
from .network import ReactionNetwork, parse_network, parse_network_file, render_network
from .simulation import SimulationConfig, TransientDistribution, simulate_until, transient_distribution
from .tiers import GrowthProfile, TierPartition, parse_profile, tier_partition

__all__ = [
    "__version__",
    "CRNError",
    "DriftReport",
    "ErgodicityCertificate",
    "GrowthProfile",
    "MixingTimeEstimate",
    "ReactionNetwork",
    "SimulationConfig",
    "StationaryDistribution",
    "TierPartition",
    "TransientDistribution",
    "apply_generator",
    "certify",
    "drift_scan",
    "estimate_mixing_time",
    "find_equilibrium",
    "intensity",
    "is_complex_balanced",
    "parse_network",
    "parse_network_file",
    "parse_profile",
    "render_network",
    "simulate_until",
    "stationary_for",
    "tier_partition",
    "transient_distribution",
    "tv_distance",
]
