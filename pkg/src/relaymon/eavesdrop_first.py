"""Strategy II: eavesdrop in slot 1, then help, keep eavesdropping or jam.

If E hears the source at least as well as R does, it is sure to decode and
helps the weaker second hop (silent, tuned power or full power). Otherwise it
stays silent, keeps listening with MRC over both slots, or jams D just enough
to pull the suspicious rate down to what E heard in slot 1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemParams
from .rates import (
    Help,
    JamPower,
    Listen,
    Silent,
    StrategyOutcome,
    dest_snr_helped,
    dest_snr_jammed,
    direct_link_snr,
    gammas_eavesdrop_first,
    outcome,
    phase1_snrs,
    relay_to_dest_snr,
)


class BracketError(ValueError):
    """Closed-form power requested outside the bracket where it is valid."""


class Branch(str, enum.Enum):
    HELP_SILENT = "HelpSilent"
    HELP_FULL = "HelpFull"
    HELP_TUNED = "HelpTuned"
    SILENT_DECODE = "SilentDecode"
    FORCED_EAVESDROP = "ForcedEavesdrop"
    EAVESDROP_CHOSEN = "EavesdropChosen"
    JAM_TUNED = "JamTuned"


@dataclass(frozen=True)
class EavesdropFirstSolution:
    branch: Branch
    pe_w: float
    outcome: StrategyOutcome


def _clamp(pe, p_max):
    return float(min(max(pe, 0.0), p_max))


def helper_power(ch: ChannelRealization, params: SystemParams) -> float:
    """Helping power that makes the second-hop SNR equal the first-hop SNR."""
    pl = params.path_loss
    first = params.ps_w * np.vdot(ch.h1, ch.h1).real / pl(ch.d[0])
    direct = params.ps_w * abs(ch.h2) ** 2 / pl(ch.d[1])
    radicand = first - direct
    if radicand < 0:
        raise BracketError("first hop is weaker than the direct link alone")
    relay_amp = np.sqrt(params.pr_w / pl(ch.d[4])) * np.linalg.norm(ch.h5)
    h6_norm2 = np.vdot(ch.h6, ch.h6).real
    if h6_norm2 == 0:
        raise BracketError("E has no channel to D")
    gap = np.sqrt(radicand) - relay_amp
    if gap < -1e-9 * relay_amp:
        raise BracketError("second hop already beats the first hop without help")
    pe = pl(ch.d[5]) / h6_norm2 * max(gap, 0.0) ** 2
    return _clamp(pe, params.p_max_w)


def jammer_power(ch: ChannelRealization, params: SystemParams) -> float:
    """Jamming power that pulls the destination SINR down to E's slot-1 SNR."""
    pl = params.path_loss
    d2, d3, d5, d6 = pl(ch.d[1]), pl(ch.d[2]), pl(ch.d[4]), pl(ch.d[5])
    h3_norm2 = np.vdot(ch.h3, ch.h3).real
    h2_abs2 = abs(ch.h2) ** 2
    margin = params.ps_w * d2 * h3_norm2 - params.ps_w * d3 * h2_abs2
    if not margin > 0:
        raise BracketError("E's slot-1 SNR does not exceed the direct-link SNR")
    h6_norm2 = np.vdot(ch.h6, ch.h6).real
    if h6_norm2 == 0:
        raise BracketError("E has no channel to D")
    ratio = params.pr_w * d2 * d3 * np.vdot(ch.h5, ch.h5).real / margin
    if ratio < d5 * (1 - 1e-9):
        raise BracketError("destination SINR is already below E's slot-1 SNR")
    pe = d6 * params.n0_w / (d5 * h6_norm2) * (ratio - d5)
    return _clamp(pe, params.p_max_w)


def _nudge_jam_power(ch, params, pe, snr_e):
    """Raise ``pe`` by a few ulps until D's SINR no longer exceeds ``snr_e``."""
    for _ in range(64):
        if dest_snr_jammed(ch, params, pe) <= snr_e or pe >= params.p_max_w:
            break
        pe = min(np.nextafter(pe, np.inf) * (1 + 1e-15), params.p_max_w)
    return pe


def solve(ch: ChannelRealization, params: SystemParams) -> EavesdropFirstSolution:
    snr_r, snr_e = phase1_snrs(ch, params)
    p = params.p_max_w
    unhelped = direct_link_snr(ch, params) + relay_to_dest_snr(ch, params)

    def done(branch, action):
        pe = getattr(action, "pe_w", 0.0)
        g = gammas_eavesdrop_first(ch, params, action)
        return EavesdropFirstSolution(branch, pe, outcome(Listen(), action, g, branch.value))

    if snr_r <= snr_e:
        if snr_r <= unhelped:
            return done(Branch.HELP_SILENT, Silent())
        if snr_r >= dest_snr_helped(ch, params, p):
            return done(Branch.HELP_FULL, Help(p))
        return done(Branch.HELP_TUNED, Help(helper_power(ch, params)))

    if snr_e >= unhelped:
        return done(Branch.SILENT_DECODE, Silent())
    listen = done(Branch.FORCED_EAVESDROP, Listen())
    if snr_e < dest_snr_jammed(ch, params, p):
        return listen
    g = listen.outcome.gammas
    if g.gamma_e >= min(g.gamma_r, g.gamma_d):
        return done(Branch.EAVESDROP_CHOSEN, Listen())
    pe = _nudge_jam_power(ch, params, jammer_power(ch, params), snr_e)
    return done(Branch.JAM_TUNED, JamPower(pe))
