"""SNR/SINR triples for every monitor action and the effective eavesdropping rate."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .channel import ChannelRealization, SystemParams


# Monitor actions. Phase 1 is JamBeam or Listen; phase 2 is Listen (MRC over
# both slots), Help, JamPower or Silent.

@dataclass(frozen=True, eq=False)
class JamBeam:
    w: np.ndarray

    label = "jam_beam"


@dataclass(frozen=True)
class Listen:
    label = "listen"


@dataclass(frozen=True)
class Help:
    pe_w: float

    label = "help"


@dataclass(frozen=True)
class JamPower:
    pe_w: float

    label = "jam"


@dataclass(frozen=True)
class Silent:
    label = "silent"


Phase1Action = Union[JamBeam, Listen]
Phase2Action = Union[Listen, Help, JamPower, Silent]


@dataclass(frozen=True)
class LinkGammas:
    gamma_r: float
    gamma_d: float
    gamma_e: float

    def __post_init__(self):
        for name in ("gamma_r", "gamma_d", "gamma_e"):
            value = getattr(self, name)
            if not (value >= 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")


@dataclass(frozen=True)
class RatePair:
    c_sd: float
    c_se: float


@dataclass(frozen=True)
class StrategyOutcome:
    """Actions taken in both slots, the resulting SINRs and rates."""

    phase1: Phase1Action
    phase2: Phase2Action
    gammas: LinkGammas
    rates: RatePair
    rate: float
    label: str = ""

    @property
    def power_used_w(self) -> float:
        if isinstance(self.phase1, JamBeam):
            return float(np.vdot(self.phase1.w, self.phase1.w).real)
        return float(getattr(self.phase2, "pe_w", 0.0))


def half_log2(x):
    return 0.5 * np.log2(1.0 + x)


def effective_rate(g: LinkGammas) -> tuple[RatePair, float]:
    """Rates of the suspicious and eavesdropping links and the effective rate.

    The effective rate equals ``c_sd`` when ``c_se >= c_sd`` (ties count as
    successful decoding) and 0 otherwise.
    """
    c_sd = float(half_log2(min(g.gamma_r, g.gamma_d)))
    c_se = float(half_log2(g.gamma_e))
    return RatePair(c_sd, c_se), (c_sd if c_se >= c_sd else 0.0)


def outcome(phase1, phase2, g: LinkGammas, label: str = "") -> StrategyOutcome:
    rates, r = effective_rate(g)
    return StrategyOutcome(phase1, phase2, g, rates, r, label)


# -- shared link terms ------------------------------------------------------

def relay_to_monitor_snr(ch: ChannelRealization, params: SystemParams) -> float:
    """SNR at E when it combines the relay's MRT transmission in slot 2."""
    h5 = ch.h5
    beam = ch.H4 @ (h5 / np.linalg.norm(h5))
    return float(params.pr_w * np.vdot(beam, beam).real / (params.path_loss(ch.d[3]) * params.n0_w))


def direct_link_snr(ch: ChannelRealization, params: SystemParams) -> float:
    return float(params.ps_w * abs(ch.h2) ** 2 / (params.path_loss(ch.d[1]) * params.n0_w))


def relay_to_dest_snr(ch: ChannelRealization, params: SystemParams) -> float:
    return float(params.pr_w * np.vdot(ch.h5, ch.h5).real / (params.path_loss(ch.d[4]) * params.n0_w))


def phase1_snrs(ch: ChannelRealization, params: SystemParams) -> tuple[float, float]:
    """SNRs at R and E when E listens in slot 1."""
    snr_r = params.ps_w * np.vdot(ch.h1, ch.h1).real / (params.path_loss(ch.d[0]) * params.n0_w)
    snr_e = params.ps_w * np.vdot(ch.h3, ch.h3).real / (params.path_loss(ch.d[2]) * params.n0_w)
    return float(snr_r), float(snr_e)


# -- strategy I: jam in slot 1, listen in slot 2 ----------------------------

def _check_beam(w, params: SystemParams) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.shape != (params.m_monitor,):
        raise ValueError(f"beamformer has shape {w.shape}, expected ({params.m_monitor},)")
    power = np.vdot(w, w).real
    if power > params.p_max_w * (1 + 1e-9) + 1e-300:
        raise ValueError(f"beamformer power {power!r} exceeds budget {params.p_max_w!r}")
    return w


def gammas_jam_first(ch: ChannelRealization, params: SystemParams, w) -> LinkGammas:
    """SINRs when E jams with beamformer ``w`` in slot 1 and listens in slot 2.

    Evaluated through the same grouped constants as the jam-first objective,
    so ``min(gamma_r, gamma_d)`` equals that objective bit for bit.
    """
    from .jam_first import compute_thetas, objective_terms

    ch.check_shapes(params)
    w = _check_beam(w, params)
    th = compute_thetas(ch, params)
    first_hop, second_hop = objective_terms(w, ch, th)
    return LinkGammas(first_hop, second_hop, th.theta6)


# -- strategy II: listen in slot 1 -------------------------------------------

def dest_snr_helped(ch: ChannelRealization, params: SystemParams, pe_w: float) -> float:
    """Destination SNR when E forwards the decoded symbol with power ``pe_w``."""
    if pe_w == 0:
        return direct_link_snr(ch, params) + relay_to_dest_snr(ch, params)
    amp = (np.sqrt(params.pr_w / params.path_loss(ch.d[4])) * np.linalg.norm(ch.h5)
           + np.sqrt(pe_w / params.path_loss(ch.d[5])) * np.linalg.norm(ch.h6))
    return direct_link_snr(ch, params) + float(amp ** 2 / params.n0_w)


def dest_snr_jammed(ch: ChannelRealization, params: SystemParams, pe_w: float) -> float:
    """Destination SINR when E jams slot 2 with power ``pe_w`` along h6."""
    if pe_w == 0:
        return direct_link_snr(ch, params) + relay_to_dest_snr(ch, params)
    d5, d6 = params.path_loss(ch.d[4]), params.path_loss(ch.d[5])
    num = params.pr_w * d6 * np.vdot(ch.h5, ch.h5).real
    den = pe_w * d5 * np.vdot(ch.h6, ch.h6).real + d5 * d6 * params.n0_w
    return direct_link_snr(ch, params) + float(num / den)


def gammas_eavesdrop_first(ch: ChannelRealization, params: SystemParams, phase2: Phase2Action) -> LinkGammas:
    """SINRs when E listens in slot 1 and takes ``phase2`` in slot 2."""
    snr_r, snr_e = phase1_snrs(ch, params)
    if isinstance(phase2, Listen):
        gamma_d = direct_link_snr(ch, params) + relay_to_dest_snr(ch, params)
        return LinkGammas(snr_r, gamma_d, snr_e + relay_to_monitor_snr(ch, params))
    if isinstance(phase2, Silent):
        return LinkGammas(snr_r, dest_snr_helped(ch, params, 0.0), snr_e)
    pe = phase2.pe_w
    if not pe >= 0:
        raise ValueError(f"monitor power must be nonnegative, got {pe!r}")
    if isinstance(phase2, Help):
        return LinkGammas(snr_r, dest_snr_helped(ch, params, pe), snr_e)
    if isinstance(phase2, JamPower):
        return LinkGammas(snr_r, dest_snr_jammed(ch, params, pe), snr_e)
    raise TypeError(f"unsupported slot-2 action {phase2!r}")
