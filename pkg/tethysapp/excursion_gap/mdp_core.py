"""
Tabular MDP and policy data model with exact evaluation primitives.

Induced chains are column-stochastic: P[s_next, s] is the probability of moving
from s to s_next, so a state distribution d is propagated as P @ d while values
are propagated with the transpose.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import softmax

from .config import STOCHASTIC_TOLERANCE
from .errors import InvalidInputError, SolverError

log = logging.getLogger(__name__)

DIRECT = "direct"
SOFTMAX = "softmax"
POLICY_KINDS = (DIRECT, SOFTMAX)


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


# ---------------- #
#   VALIDATION     #
# ---------------- #

def check_gamma(gamma):
    """
    Validates a discount factor, which must lie in [0, 1).
    """

    try:
        gamma = float(gamma)
    except (TypeError, ValueError):
        raise InvalidInputError("gamma", f"not a number: {gamma!r}")
    if not 0.0 <= gamma < 1.0:
        raise InvalidInputError("gamma", f"discount factor must lie in [0, 1), got {gamma}")

    return gamma


def check_distribution(vector, field="distribution", n_states=None, tol=STOCHASTIC_TOLERANCE):
    """
    Validates a probability vector over states and returns a read-only copy.

    Entries may undershoot zero by at most tol, which absorbs rounding in vectors
    produced by linear solves. Visitation vectors are accepted as they are.
    """

    vector = np.asarray(getattr(vector, "distribution", vector), dtype=float)
    if vector.ndim != 1:
        raise InvalidInputError(field, "expected a one-dimensional probability vector")
    if n_states is not None and vector.shape[0] != n_states:
        raise InvalidInputError(field, f"expected {n_states} entries, got {vector.shape[0]}")
    if not np.all(np.isfinite(vector)):
        raise InvalidInputError(field, "entries must be finite")
    if vector.min() < -tol:
        raise InvalidInputError(field, "entries must be nonnegative")
    if abs(vector.sum() - 1.0) > tol:
        raise InvalidInputError(field, f"entries sum to {vector.sum():.17g}, expected 1")

    return _frozen(vector)


# ------------------ #
#   DOMAIN TYPES     #
# ------------------ #

@dataclass(frozen=True, eq=False)
class Mdp:
    """
    Finite-state, finite-action MDP.

    transition[s, a, s_next] is T(s_next | s, a), reward[s, a] lies in [0, 1] and
    initial_dist is the start distribution mu. Arrays are copied and made
    read-only on construction.
    """

    transition: np.ndarray
    reward: np.ndarray
    initial_dist: np.ndarray

    def __post_init__(self):
        transition = np.asarray(self.transition, dtype=float)
        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            raise InvalidInputError("transition", "expected an array shaped [s][a][s']")
        n_states, n_actions, _ = transition.shape
        if n_states < 1 or n_actions < 1:
            raise InvalidInputError("transition", "at least one state and one action are required")
        if not np.all(np.isfinite(transition)) or transition.min() < 0:
            raise InvalidInputError("transition", "probabilities must be finite and nonnegative")
        worst = np.max(np.abs(transition.sum(axis=2) - 1.0))
        if worst > STOCHASTIC_TOLERANCE:
            raise InvalidInputError("transition", f"rows T[s][a] must sum to 1 (worst deviation {worst:.3g})")

        reward = np.asarray(self.reward, dtype=float)
        if reward.shape != (n_states, n_actions):
            raise InvalidInputError("reward", f"expected shape ({n_states}, {n_actions}), got {reward.shape}")
        # Rewards outside [0, 1] are rejected, never clamped.
        if not np.all(np.isfinite(reward)) or reward.min() < 0 or reward.max() > 1:
            raise InvalidInputError("reward", "rewards must lie in [0, 1]")

        initial = check_distribution(self.initial_dist, "initial_dist", n_states)
        if initial.min() < 0:
            raise InvalidInputError("initial_dist", "entries must be nonnegative")

        object.__setattr__(self, "transition", _frozen(transition))
        object.__setattr__(self, "reward", _frozen(reward))
        object.__setattr__(self, "initial_dist", initial)

    @property
    def n_states(self):
        return self.transition.shape[0]

    @property
    def n_actions(self):
        return self.transition.shape[1]

    def check_policy(self, policy, field="policy"):
        if (policy.n_states, policy.n_actions) != (self.n_states, self.n_actions):
            raise InvalidInputError(
                field,
                f"policy is {policy.n_states}x{policy.n_actions} but the MDP has "
                f"{self.n_states} states and {self.n_actions} actions"
            )

    def reward_policy(self, policy):
        """
        Expected one-step reward r_pi(s) = sum_a pi(a|s) r(s, a).
        """

        self.check_policy(policy)
        return np.einsum("sa,sa->s", policy.probs, self.reward)


@dataclass(frozen=True, eq=False)
class Policy:
    """
    Tabular stochastic policy.

    A direct policy stores the probability table itself. A softmax policy stores
    logits theta[s, a] with pi(a|s) proportional to exp(theta[s, a]). In both
    cases the flat parameter vector is the table in row-major [s][a] order.
    """

    kind: str
    table: np.ndarray
    probs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise InvalidInputError("kind", f"expected one of {POLICY_KINDS}, got {self.kind!r}")
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2 or min(table.shape) < 1:
            raise InvalidInputError("table", "expected a non-empty array shaped [s][a]")
        if not np.all(np.isfinite(table)):
            raise InvalidInputError("table", "entries must be finite")

        if self.kind == DIRECT:
            if table.min() < 0:
                raise InvalidInputError("table", "probabilities must be nonnegative")
            worst = np.max(np.abs(table.sum(axis=1) - 1.0))
            if worst > STOCHASTIC_TOLERANCE:
                raise InvalidInputError("table", f"rows must sum to 1 (worst deviation {worst:.3g})")
            probs = table
        else:
            probs = softmax(table, axis=1)

        object.__setattr__(self, "table", _frozen(table))
        object.__setattr__(self, "probs", _frozen(probs))

    @classmethod
    def direct(cls, table):
        return cls(DIRECT, table)

    @classmethod
    def softmax(cls, logits):
        return cls(SOFTMAX, logits)

    @classmethod
    def uniform(cls, n_states, n_actions, kind=SOFTMAX):
        if kind == SOFTMAX:
            return cls(SOFTMAX, np.zeros((n_states, n_actions)))
        return cls(DIRECT, np.full((n_states, n_actions), 1.0 / n_actions))

    @classmethod
    def deterministic(cls, actions, n_actions):
        """
        Direct policy that always picks actions[s] in state s.
        """

        actions = np.asarray(actions, dtype=int)
        table = np.zeros((actions.shape[0], n_actions))
        table[np.arange(actions.shape[0]), actions] = 1.0
        return cls(DIRECT, table)

    @property
    def n_states(self):
        return self.table.shape[0]

    @property
    def n_actions(self):
        return self.table.shape[1]

    @property
    def is_softmax(self):
        return self.kind == SOFTMAX

    @property
    def parameters(self):
        return self.table.ravel().copy()

    def with_parameters(self, theta):
        """
        Returns a policy of the same kind built from a flat parameter vector.
        """

        theta = np.asarray(theta, dtype=float)
        if theta.size != self.table.size:
            raise InvalidInputError("theta", f"expected {self.table.size} parameters, got {theta.size}")
        return Policy(self.kind, theta.reshape(self.table.shape))


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """
    Column-stochastic matrix, matrix[s_next, s] = Pr(s -> s_next).
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise InvalidInputError("matrix", "expected a non-empty square matrix")
        if not np.all(np.isfinite(matrix)) or matrix.min() < 0:
            raise InvalidInputError("matrix", "entries must be finite and nonnegative")
        worst = np.max(np.abs(matrix.sum(axis=0) - 1.0))
        if worst > STOCHASTIC_TOLERANCE:
            raise InvalidInputError("matrix", f"columns must sum to 1 (worst deviation {worst:.3g})")
        object.__setattr__(self, "matrix", _frozen(matrix))

    @property
    def n_states(self):
        return self.matrix.shape[0]


def as_stochastic_matrix(P):
    if isinstance(P, StochasticMatrix):
        return P
    return StochasticMatrix(P)


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True, eq=False)
class MonteCarloEstimate:
    """
    Per-start-state Monte-Carlo value estimates.

    truncation_bias bounds the bias from cutting episodes at the horizon,
    gamma ** horizon / (1 - gamma), given rewards in [0, 1].
    """

    mean: np.ndarray
    stderr: np.ndarray
    truncation_bias: float
    n_episodes: int
    horizon: int


# ---------------- #
#   EVALUATION     #
# ---------------- #

def solve_dense(matrix, rhs, what):
    """
    Dense LU solve that reports degraded results as SolverError.
    """

    try:
        solution = linalg.solve(matrix, rhs)
    except (linalg.LinAlgError, ValueError) as err:
        raise SolverError(f"{what}: dense solve failed ({err})")
    if not np.all(np.isfinite(solution)):
        raise SolverError(f"{what}: dense solve returned non-finite entries")

    return solution


def induced_chain(mdp, policy):
    """
    Builds the chain P_pi(s_next, s) = sum_a T(s_next | s, a) pi(a | s).
    """

    mdp.check_policy(policy)
    return StochasticMatrix(np.einsum("sat,sa->ts", mdp.transition, policy.probs))


def value_function(mdp, policy, gamma):
    """
    Solves V = r_pi + gamma P_pi^T V for the (unnormalized) value function.
    """

    gamma = check_gamma(gamma)
    P = induced_chain(mdp, policy).matrix
    system = np.eye(mdp.n_states) - gamma * P.T

    return solve_dense(system, mdp.reward_policy(policy), "value function")


def action_value(mdp, policy, gamma):
    gamma = check_gamma(gamma)
    V = value_function(mdp, policy, gamma)

    return mdp.reward + gamma * (mdp.transition @ V)


def rollout(mdp, policy, horizon, seed, start_state=None):
    """
    Simulates one episode of the given horizon.

    The start state is drawn from mu unless start_state forces it. The episode is
    a deterministic function of the seed.
    """

    if horizon < 1:
        raise InvalidInputError("horizon", "horizon must be at least 1")
    mdp.check_policy(policy)
    rng = np.random.default_rng(seed)

    if start_state is None:
        state = int(rng.choice(mdp.n_states, p=mdp.initial_dist))
    else:
        if not 0 <= start_state < mdp.n_states:
            raise InvalidInputError("start_state", f"no state {start_state}")
        state = int(start_state)

    states = np.empty(horizon, dtype=int)
    actions = np.empty(horizon, dtype=int)
    rewards = np.empty(horizon)
    for t in range(horizon):
        action = int(rng.choice(mdp.n_actions, p=policy.probs[state]))
        states[t], actions[t], rewards[t] = state, action, mdp.reward[state, action]
        state = int(rng.choice(mdp.n_states, p=mdp.transition[state, action]))

    return Trajectory(states, actions, rewards)


def sample_rows(rng, cdf_rows):
    """
    Draws one index per row from a stack of cumulative distributions.
    """

    draws = rng.random(cdf_rows.shape[0])
    index = (cdf_rows < draws[:, None]).sum(axis=1)

    return np.minimum(index, cdf_rows.shape[1] - 1)


def discounted_returns(mdp, policy, gamma, starts, horizon, rng):
    """
    Vectorized truncated discounted returns for episodes beginning at starts.
    """

    policy_cdf = np.cumsum(policy.probs, axis=1)
    transition_cdf = np.cumsum(mdp.transition, axis=2)
    states = np.asarray(starts, dtype=int).copy()
    returns = np.zeros(states.shape[0])
    discount = 1.0
    for _ in range(horizon):
        actions = sample_rows(rng, policy_cdf[states])
        returns += discount * mdp.reward[states, actions]
        states = sample_rows(rng, transition_cdf[states, actions])
        discount *= gamma
        if discount == 0.0:
            break

    return returns


def monte_carlo_value(mdp, policy, gamma, n_episodes, horizon, seed):
    """
    Monte-Carlo oracle for value_function.

    Runs n_episodes truncated episodes from every start state and returns the
    mean return and its standard error per state.
    """

    gamma = check_gamma(gamma)
    if n_episodes < 2:
        raise InvalidInputError("n_episodes", "at least two episodes are needed for a standard error")
    if horizon < 1:
        raise InvalidInputError("horizon", "horizon must be at least 1")
    mdp.check_policy(policy)

    rng = np.random.default_rng(seed)
    means = np.empty(mdp.n_states)
    stderrs = np.empty(mdp.n_states)
    for start in range(mdp.n_states):
        returns = discounted_returns(mdp, policy, gamma, np.full(n_episodes, start), horizon, rng)
        means[start] = returns.mean()
        stderrs[start] = returns.std(ddof=1) / math.sqrt(n_episodes)

    bias = gamma ** horizon / (1.0 - gamma)
    log.debug("monte carlo value: %d episodes x %d steps, truncation bias %.3g", n_episodes, horizon, bias)

    return MonteCarloEstimate(_frozen(means), _frozen(stderrs), bias, n_episodes, horizon)


def required_horizon(gamma, eps):
    """
    Smallest horizon H with truncation bias gamma ** H / (1 - gamma) <= eps.
    """

    gamma = check_gamma(gamma)
    if eps <= 0:
        raise InvalidInputError("eps", "truncation tolerance must be positive")
    if gamma == 0.0:
        return 1

    return max(1, math.ceil(math.log(eps * (1.0 - gamma)) / math.log(gamma)))
