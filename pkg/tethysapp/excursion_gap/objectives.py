"""
Normalized on-policy and excursion objectives and the gap between them.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .chain_analysis import VisitationVector, discounted_visitation, is_aperiodic, is_irreducible, solve_stationary
from .config import DEFAULT_COVERAGE_TOL
from .errors import HypothesisError, InvalidInputError
from .mdp_core import check_distribution, check_gamma, induced_chain, value_function

log = logging.getLogger(__name__)

DISCOUNTED = "discounted"
STATIONARY = "stationary"
VISITATION_MODES = (DISCOUNTED, STATIONARY)

GAP_COLUMNS = ("gamma", "j_on", "j_off", "value_gap", "policy_id", "behavior_id", "mode")


@dataclass(frozen=True)
class GapReport:
    """
    Normalized objectives of one policy at one discount factor.

    j_on weights the value function by the start distribution, j_off by the
    behavioral visitation d_b. Unnormalized values are never stored.
    """

    gamma: float
    j_on: float
    j_off: float
    value_gap: float
    policy_id: str = "pi"
    behavior_id: str = "b"
    mode: str = DISCOUNTED

    def as_row(self):
        return {column: getattr(self, column) for column in GAP_COLUMNS}


@dataclass(frozen=True)
class CoverageResult:
    covered: bool
    violations: Tuple[Tuple[int, int], ...] = ()

    def __bool__(self):
        return self.covered


def _unit_interval(value):
    # Rounding in the linear solves may step a hair outside [0, 1].
    return float(min(max(value, 0.0), 1.0))


def objective(mdp, policy, nu, gamma):
    """
    Normalized objective (1 - gamma) sum_s nu(s) V_pi(s), a number in [0, 1].
    """

    gamma = check_gamma(gamma)
    nu = check_distribution(nu, "nu", mdp.n_states)

    return _unit_interval((1.0 - gamma) * nu @ value_function(mdp, policy, gamma))


def dual_objective(mdp, policy, nu, gamma):
    """
    Occupancy form of the objective, sum_s d(s) r_pi(s) with d the discounted
    visitation of pi started from nu. Agrees with objective() up to rounding.
    """

    visitation = discounted_visitation(induced_chain(mdp, policy), nu, gamma)

    return _unit_interval(visitation.distribution @ mdp.reward_policy(policy))


def behavioral_visitation(mdp, behavior, gamma, mode=DISCOUNTED):
    """
    State visitation d_b of the behavioral policy.

    The discounted mode starts the behavior from mu at the same gamma as the
    objective. The stationary mode takes the long-run occupancy of the behavior,
    which needs an irreducible and aperiodic induced chain.
    """

    gamma = check_gamma(gamma)
    P_b = induced_chain(mdp, behavior)

    if mode == DISCOUNTED:
        return discounted_visitation(P_b, mdp.initial_dist, gamma, start="mu")
    if mode != STATIONARY:
        raise InvalidInputError("mode", f"expected one of {VISITATION_MODES}, got {mode!r}")

    if not is_irreducible(P_b):
        raise HypothesisError("stationary d_b requires an irreducible behavioral chain")
    aperiodic, period = is_aperiodic(P_b)
    if not aperiodic:
        raise HypothesisError(f"stationary d_b requires an aperiodic behavioral chain (period {period})")

    return VisitationVector(solve_stationary(P_b).vectors[0], gamma, start="stationary")


def coverage_check(policy, behavior, tol=DEFAULT_COVERAGE_TOL):
    """
    Checks that pi(a|s) > tol implies b(a|s) > 0 and lists the pairs that fail.
    """

    if policy.probs.shape != behavior.probs.shape:
        raise InvalidInputError("behavior", f"shape {behavior.probs.shape} does not match policy {policy.probs.shape}")

    failing = np.argwhere((policy.probs > tol) & (behavior.probs <= 0))
    violations = tuple((int(s), int(a)) for s, a in failing)

    return CoverageResult(not violations, violations)


def on_off_gap(mdp, policy, behavior, gamma, mode=DISCOUNTED, policy_id="pi", behavior_id="b"):
    """
    Computes j_on, j_off and their absolute difference.

    A coverage violation only produces a warning, the gap is well defined anyway.
    """

    gamma = check_gamma(gamma)
    coverage = coverage_check(policy, behavior)
    if not coverage:
        log.warning("behavior %s does not cover %s at %s", behavior_id, policy_id, list(coverage.violations))

    d_b = behavioral_visitation(mdp, behavior, gamma, mode)
    V = value_function(mdp, policy, gamma)
    j_on = _unit_interval((1.0 - gamma) * mdp.initial_dist @ V)
    j_off = _unit_interval((1.0 - gamma) * d_b.distribution @ V)

    return GapReport(gamma, j_on, j_off, abs(j_off - j_on), policy_id, behavior_id, mode)
