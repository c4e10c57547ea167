"""Optimal jam / eavesdrop / help decisions for a monitor watching a two-hop DF relay link."""
from .channel import (
    ChannelRealization,
    DegenerateGeometryError,
    RankDeficiencyError,
    SystemParams,
    Topology,
    derive_seed,
    distances,
    path_gain_denominator,
    project,
    project_orth,
    sample_channels,
    sample_cn01,
    trial_rng,
)
from .rates import (
    Help,
    JamBeam,
    JamPower,
    LinkGammas,
    Listen,
    RatePair,
    Silent,
    StrategyOutcome,
    effective_rate,
    gammas_eavesdrop_first,
    gammas_jam_first,
    phase1_snrs,
)
from . import benchmarks, eavesdrop_first, jam_first

__version__ = "0.1.0"
