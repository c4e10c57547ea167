"""Strategy I: jam in slot 1, eavesdrop in slot 2.

The monitor picks a jamming beamformer ``w`` (``||w||^2 <= P``) to maximise

    f(w) = min(T1 + T2 / (|h6^H w|^2 + T3),  T4 / (|(H4 h1)^H w|^2 / ||h1||^2 + T5))

subject to ``f(w) <= T6``, where ``T1..T6`` are the grouped channel constants
returned by :func:`compute_thetas`. ``f`` is largest at ``w = 0`` and smallest
on the two-direction family spanned by the components of ``H4 h1`` along and
orthogonal to ``h6``. When the target ``T6`` lies between the two extremes,
the beamformer is found by bisection on the scale of the minimising beam.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemParams, project, project_orth
from .rates import JamBeam, Listen, StrategyOutcome, outcome, relay_to_dest_snr, relay_to_monitor_snr

BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200


class ConvergenceError(RuntimeError):
    """Bisection failed to bracket or converge."""


class JamFirstCase(str, enum.Enum):
    EAVESDROP_ONLY = "EavesdropOnly"
    HOPELESS = "Hopeless"
    FEASIBLE = "Feasible"


@dataclass(frozen=True)
class ThetaSet:
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float
    theta6: float

    def as_tuple(self):
        return (self.theta1, self.theta2, self.theta3, self.theta4, self.theta5, self.theta6)


def compute_thetas(ch: ChannelRealization, params: SystemParams) -> ThetaSet:
    pl = params.path_loss
    d1, d2, d4, d6 = pl(ch.d[0]), pl(ch.d[1]), pl(ch.d[3]), pl(ch.d[5])
    n0 = params.n0_w
    return ThetaSet(
        theta1=relay_to_dest_snr(ch, params),
        theta2=float(params.ps_w * d6 * abs(ch.h2) ** 2 / d2),
        theta3=float(d6 * n0),
        theta4=float(params.ps_w * d4 * np.vdot(ch.h1, ch.h1).real / d1),
        theta5=float(d4 * n0),
        theta6=relay_to_monitor_snr(ch, params),
    )


def _jam_gains(w, ch: ChannelRealization):
    """Jamming power leaked to D and to R's combiner output, per beam."""
    w = np.asarray(w, dtype=complex)
    at_dest = np.abs(w @ ch.h6.conj()) ** 2
    h1_norm2 = np.vdot(ch.h1, ch.h1).real
    at_relay = np.abs(w @ (ch.H4 @ ch.h1).conj()) ** 2 / h1_norm2
    return at_dest, at_relay


def objective_terms(w, ch: ChannelRealization, th: ThetaSet):
    """The first-hop (R) and second-hop (D) SINRs under jamming beam ``w``.

    ``w`` may be a single beam of shape (M,) or a batch of shape (K, M).
    """
    at_dest, at_relay = _jam_gains(w, ch)
    first_hop = th.theta4 / (at_relay + th.theta5)
    second_hop = th.theta1 + th.theta2 / (at_dest + th.theta3)
    if np.ndim(first_hop) == 0:
        return float(first_hop), float(second_hop)
    return first_hop, second_hop


def f_of(w, ch: ChannelRealization, thetas: ThetaSet):
    first_hop, second_hop = objective_terms(w, ch, thetas)
    return np.minimum(first_hop, second_hop) if np.ndim(first_hop) else min(first_hop, second_hop)


@dataclass(frozen=True, eq=False)
class BeamformerFamily:
    """Beams ``sqrt(x) u_par + sqrt(P - x) u_perp`` for ``0 <= x <= P``.

    ``u_par`` is the unit component of ``H4 h1`` along ``h6``, ``u_perp`` the
    unit component orthogonal to it. ``par_gain`` and ``perp_gain`` are the
    norms of those components divided by ``||h1||``.
    """

    u_par: np.ndarray
    u_perp: np.ndarray
    par_gain: float
    perp_gain: float
    p_budget: float

    def beam(self, x: float) -> np.ndarray:
        x = min(max(float(x), 0.0), self.p_budget)
        return np.sqrt(x) * self.u_par + np.sqrt(self.p_budget - x) * self.u_perp

    def g(self, x, th: ThetaSet, h6_norm2: float):
        """Objective along the family, in closed form; ``x`` may be an array."""
        x = np.asarray(x, dtype=float)
        second_hop = th.theta1 + th.theta2 / (x * h6_norm2 + th.theta3)
        leak = (np.sqrt(x) * self.par_gain + np.sqrt(np.maximum(self.p_budget - x, 0.0)) * self.perp_gain) ** 2
        return np.minimum(second_hop, th.theta4 / (leak + th.theta5))

    @property
    def x_relay_opt(self) -> float:
        """Split putting all leaked power onto R's combiner (beam along H4 h1)."""
        total = self.par_gain ** 2 + self.perp_gain ** 2
        if total == 0:
            return self.p_budget
        return self.p_budget * self.par_gain ** 2 / total


def _unit(v) -> tuple[np.ndarray, float]:
    n = float(np.linalg.norm(v))
    return (v / n if n > 0 else np.zeros_like(v)), n


def _orthogonal_unit(u: np.ndarray) -> np.ndarray:
    """Some unit vector orthogonal to unit ``u``; zero when none exists."""
    m = u.shape[0]
    for k in range(m):
        e = np.zeros(m, dtype=complex)
        e[k] = 1.0
        v = e - u * np.vdot(u, e)
        if np.linalg.norm(v) > 1e-6:
            return v / np.linalg.norm(v)
    return np.zeros(m, dtype=complex)


def beamformer_family(ch: ChannelRealization, p_budget: float) -> BeamformerFamily:
    """Build the two-direction family, falling back gracefully on null links.

    If ``H4 h1`` has no component along ``h6``, ``u_par`` becomes ``h6/||h6||``;
    if it has no orthogonal component, ``u_perp`` is any orthogonal unit vector
    (or zero for a single antenna).
    """
    g = ch.H4 @ ch.h1
    h1_norm = float(np.linalg.norm(ch.h1))
    h6_unit, h6_norm = _unit(ch.h6)
    if h6_norm > 0:
        par, par_norm = _unit(project(ch.h6, g))
        perp, perp_norm = _unit(project_orth(ch.h6, g))
    else:
        par, par_norm = np.zeros_like(g), 0.0
        perp, perp_norm = _unit(g)
    if par_norm == 0:
        par = h6_unit if h6_norm > 0 else _orthogonal_unit(perp) if perp_norm > 0 else np.zeros_like(g)
    if perp_norm == 0:
        perp = _orthogonal_unit(par) if np.any(par) else np.zeros_like(g)
    return BeamformerFamily(par, perp, par_norm / h1_norm, perp_norm / h1_norm, float(p_budget))


def f_extremes(ch: ChannelRealization, thetas: ThetaSet, p_budget: float):
    """Largest and smallest objective values over ``||w||^2 <= p_budget``.

    Returns
    -------
    f_max : float
        Objective at ``w = 0``.
    f_min : float
        Minimum over the power ball, attained on the family at either ``x = P``
        (all power toward D) or the split steering along ``H4 h1`` (all power
        toward R).
    w_star : ndarray
        The family member attaining ``f_min``.
    """
    th = thetas
    f_max = min(th.theta1 + th.theta2 / th.theta3, th.theta4 / th.theta5)
    fam = beamformer_family(ch, p_budget)
    h6_norm2 = float(np.vdot(ch.h6, ch.h6).real)
    gain_relay = float(np.vdot(ch.H4 @ ch.h1, ch.H4 @ ch.h1).real / np.vdot(ch.h1, ch.h1).real)
    to_dest = th.theta1 + th.theta2 / (p_budget * h6_norm2 + th.theta3)
    to_relay = th.theta4 / (p_budget * gain_relay + th.theta5)
    f_min = min(to_dest, to_relay)
    candidates = [p_budget, fam.x_relay_opt]
    values = [float(fam.g(x, th, h6_norm2)) for x in candidates]
    w_star = fam.beam(candidates[int(np.argmin(values))])
    return f_max, f_min, w_star


@dataclass(frozen=True)
class JamFirstSolution:
    case_id: JamFirstCase
    w: np.ndarray
    outcome: StrategyOutcome
    thetas: ThetaSet
    f_max: float
    f_min: float
    scale: float = 0.0


def _bisect_scale(w_star, ch, th, target):
    """Smallest-ish ``t`` in [0, 1] with ``f(t w_star) <= target``.

    Keeps the invariant ``f(lo) > target >= f(hi)`` and returns ``hi`` so the
    result is always on the decodable side. Stops once the bracket is
    ``BISECT_TOL`` wide relative to ``hi``; since ``|d log f / d log t| <= 2``,
    this bounds the relative error in ``f``.
    """
    if f_of(0.0 * w_star, ch, th) <= target:
        return 0.0
    lo, hi = 0.0, 1.0
    f_full = f_of(w_star, ch, th)
    if f_full > target:
        # target == f_min up to rounding in the closed form
        if f_full - target <= 1e-12 * abs(target):
            return 1.0
        raise ConvergenceError("target is not bracketed by the scaled beam")
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_TOL * hi:
            return hi
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if f_of(mid * w_star, ch, th) <= target:
            hi = mid
        else:
            lo = mid
    raise ConvergenceError(f"bisection did not converge in {BISECT_MAX_ITER} iterations")


def solve(ch: ChannelRealization, params: SystemParams) -> JamFirstSolution:
    """Best jamming beamformer and the resulting effective rate."""
    from .rates import gammas_jam_first

    th = compute_thetas(ch, params)
    f_max, f_min, w_star = f_extremes(ch, th, params.p_max_w)
    zero = np.zeros(params.m_monitor, dtype=complex)
    t = 0.0
    if th.theta6 > f_max:
        case, w = JamFirstCase.EAVESDROP_ONLY, zero
    elif th.theta6 < f_min:
        case, w = JamFirstCase.HOPELESS, zero
    else:
        case = JamFirstCase.FEASIBLE
        t = _bisect_scale(w_star, ch, th, th.theta6)
        w = t * w_star
    g = gammas_jam_first(ch, params, w)
    out = outcome(JamBeam(w), Listen(), g, case.value)
    return JamFirstSolution(case, w, out, th, f_max, f_min, t)
