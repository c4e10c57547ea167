"""Non-adaptive reference schemes: listen in slot 1, then always listen or always jam."""
from __future__ import annotations

from .channel import ChannelRealization, SystemParams
from .rates import JamPower, Listen, StrategyOutcome, gammas_eavesdrop_first, outcome


def eval_ee(ch: ChannelRealization, params: SystemParams) -> StrategyOutcome:
    """Eavesdrop in both slots, combining them with MRC."""
    g = gammas_eavesdrop_first(ch, params, Listen())
    return outcome(Listen(), Listen(), g, "EE")


def eval_ej(ch: ChannelRealization, params: SystemParams) -> StrategyOutcome:
    """Eavesdrop in slot 1, jam D with the full budget in slot 2."""
    action = JamPower(params.p_max_w)
    g = gammas_eavesdrop_first(ch, params, action)
    return outcome(Listen(), action, g, "EJ")
