"""
Upper bounds on the gap between the excursion and on-policy gradients.

Both bounds control the (1 - gamma)-scaled distance between the normalized
gradients. The occupancy bound holds for every finite MDP. The mixing bound
replaces the total-variation factor by (1 - gamma) times the chain's epsilon
time and needs an irreducible, aperiodic induced chain; using the epsilon time
instead of an exact stationary time costs an additive slack that grows with
epsilon.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chain_analysis import chain_report
from .config import BOUND_TOLERANCE, DEFAULT_EPSILON, DEFAULT_NORM, DEFAULT_T_MAX
from .errors import HypothesisError, InvalidInputError, NotReachedError
from .gradients import check_norm, gradient_pair, policy_jacobian
from .mdp_core import check_distribution, check_gamma, induced_chain
from .objectives import DISCOUNTED, behavioral_visitation

log = logging.getLogger(__name__)

FINITE = "finite"
CONTINUOUS = "continuous"

# CSV column -> BoundReport attribute. The column names are a fixed external schema.
BOUND_FIELDS = {
    "gamma": "gamma",
    "lhs": "lhs",
    "rhs_thm3": "rhs_occupancy",
    "rhs_thm4": "rhs_mixing",
    "t_epsilon": "t_epsilon",
    "d_tv": "d_tv",
    "C": "C",
    "satisfied3": "satisfied_occupancy",
    "satisfied4": "satisfied_mixing",
    "tighter4": "mixing_tighter",
    "slack": "slack",
}
BOUND_COLUMNS = tuple(BOUND_FIELDS)


@dataclass(frozen=True)
class BoundInputs:
    C: float
    action_volume: float
    n_states: int
    gamma: float
    d_tv: float
    t_epsilon: Optional[int] = None
    p: float = DEFAULT_NORM
    volume_mode: str = FINITE

    def __post_init__(self):
        if not self.C >= 0:
            raise InvalidInputError("C", "gradient constant must be nonnegative")
        if not self.action_volume > 0:
            raise InvalidInputError("action_volume", "action volume must be positive")
        if self.n_states < 1:
            raise InvalidInputError("n_states", "at least one state is required")
        if not 0.0 <= self.d_tv <= 1.0:
            raise InvalidInputError("d_tv", f"total variation must lie in [0, 1], got {self.d_tv}")
        if self.t_epsilon is not None and self.t_epsilon < 0:
            raise InvalidInputError("t_epsilon", "epsilon time must be nonnegative")
        check_gamma(self.gamma)


@dataclass(frozen=True)
class BoundReport:
    """
    Measured gradient gap against both bounds.

    rhs_mixing and satisfied_mixing are None when the mixing bound's hypotheses
    are unmet. gamma_threshold is (t - 1) / t, above which the mixing bound is the
    tighter one; it is None when t_epsilon is 0 or unknown.
    """

    gamma: float
    lhs: float
    rhs_occupancy: float
    rhs_mixing: Optional[float]
    satisfied_occupancy: bool
    satisfied_mixing: Optional[bool]
    mixing_tighter: Optional[bool]
    gamma_threshold: Optional[float]
    t_epsilon: Optional[int]
    d_tv: float
    C: float
    slack: float
    action_volume: float
    volume_mode: str
    epsilon: float

    def as_row(self):
        return {column: getattr(self, name) for column, name in BOUND_FIELDS.items()}


def total_variation(d1, d2):
    """
    Total variation distance 0.5 * ||d1 - d2||_1 between two state distributions.
    """

    d1 = check_distribution(d1, "d1")
    d2 = check_distribution(d2, "d2", d1.shape[0])

    return float(min(0.5 * np.abs(d1 - d2).sum(), 1.0))


def policy_grad_constant(policy, p=DEFAULT_NORM, jacobian=None):
    """
    C = max over (s, a) of the p-norm of d pi(a|s) / d theta.
    """

    order = check_norm(p)
    jacobian = policy_jacobian(policy) if jacobian is None else jacobian

    return float(np.linalg.norm(jacobian.tensor, ord=order, axis=2).max())


def action_volume(n_actions=None, a_low=None, a_high=None, dim=None):
    """
    Returns (volume, mode).

    A finite action set contributes its size. A box [a_low, a_high]^dim of
    continuous actions contributes (a_high - a_low)^dim.
    """

    if a_low is not None or a_high is not None or dim is not None:
        if a_low is None or a_high is None or dim is None:
            raise InvalidInputError("action_volume", "a_low, a_high and dim must be given together")
        if not a_high > a_low or dim < 1:
            raise InvalidInputError("action_volume", "need a_high > a_low and dim >= 1")
        return float((a_high - a_low) ** dim), CONTINUOUS

    if n_actions is None or n_actions < 1:
        raise InvalidInputError("n_actions", "a positive number of actions is required")
    return float(n_actions), FINITE


def _state_factor(inputs):
    return 2.0 * inputs.C * inputs.action_volume * inputs.n_states ** 1.5


def occupancy_bound(inputs):
    """
    2 C vol |S|^(3/2) d_tv.
    """

    return _state_factor(inputs) * inputs.d_tv


def mixing_bound(inputs, report):
    """
    (1 - gamma) 2 t_epsilon C vol |S|^(3/2) d_tv.

    Refuses with HypothesisError unless the chain report shows an irreducible,
    aperiodic chain, and with NotReachedError when no epsilon time is known.
    """

    if not report.irreducible:
        raise HypothesisError("mixing bound needs an irreducible induced chain")
    if not report.aperiodic:
        raise HypothesisError(f"mixing bound needs an aperiodic induced chain (period {report.period})")
    if inputs.t_epsilon is None:
        raise NotReachedError("mixing bound needs a finite epsilon time")

    return (1.0 - inputs.gamma) * inputs.t_epsilon * _state_factor(inputs) * inputs.d_tv


def mixing_slack(inputs, epsilon):
    return _state_factor(inputs) * epsilon


def bound_check(mdp, policy, behavior, gamma, p=DEFAULT_NORM, eps_chain=DEFAULT_EPSILON,
                t_max=DEFAULT_T_MAX, mode=DISCOUNTED, volume=None, jacobian=None):
    """
    Measures the scaled gradient gap of (policy, behavior) and evaluates both bounds.

    volume is a (value, mode) pair from action_volume(); the number of actions is
    used when it is omitted. The epsilon time is the chain-wide mixing time of the
    policy's induced chain. When that chain is reducible or periodic the mixing
    bound is left out of the report instead of failing.
    """

    gamma = check_gamma(gamma)
    order = check_norm(p)
    jacobian = policy_jacobian(policy) if jacobian is None else jacobian
    volume, volume_mode = volume if volume is not None else action_volume(mdp.n_actions)

    g_on, g_off = gradient_pair(mdp, policy, behavior, gamma, mode, jacobian)
    lhs = (1.0 - gamma) * float(np.linalg.norm(g_off - g_on, ord=order))

    d_b = behavioral_visitation(mdp, behavior, gamma, mode)
    report = chain_report(induced_chain(mdp, policy), mdp.initial_dist, eps_chain, t_max)
    inputs = BoundInputs(
        C=policy_grad_constant(policy, order, jacobian),
        action_volume=volume,
        n_states=mdp.n_states,
        gamma=gamma,
        d_tv=total_variation(d_b, mdp.initial_dist),
        t_epsilon=report.mixing_time,
        p=order,
        volume_mode=volume_mode,
    )

    rhs_occupancy = occupancy_bound(inputs)
    slack = mixing_slack(inputs, eps_chain)
    try:
        rhs_mixing = mixing_bound(inputs, report)
    except HypothesisError as err:
        log.info("mixing bound omitted: %s", err)
        rhs_mixing = None

    if rhs_mixing is None:
        satisfied_mixing = tighter = threshold = None
    else:
        satisfied_mixing = lhs <= rhs_mixing + slack + BOUND_TOLERANCE
        tighter = (1.0 - gamma) * inputs.t_epsilon < 1.0
        threshold = (inputs.t_epsilon - 1) / inputs.t_epsilon if inputs.t_epsilon > 0 else None

    satisfied_occupancy = lhs <= rhs_occupancy + BOUND_TOLERANCE
    if not satisfied_occupancy:
        log.warning("occupancy bound violated at gamma=%g: %.17g > %.17g", gamma, lhs, rhs_occupancy)

    return BoundReport(
        gamma=gamma,
        lhs=lhs,
        rhs_occupancy=rhs_occupancy,
        rhs_mixing=rhs_mixing,
        satisfied_occupancy=satisfied_occupancy,
        satisfied_mixing=satisfied_mixing,
        mixing_tighter=tighter,
        gamma_threshold=threshold,
        t_epsilon=inputs.t_epsilon,
        d_tv=inputs.d_tv,
        C=inputs.C,
        slack=slack,
        action_volume=volume,
        volume_mode=volume_mode,
        epsilon=eps_chain,
    )

