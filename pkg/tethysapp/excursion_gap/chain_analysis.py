"""
Markov chain structure and mixing analysis for column-stochastic matrices.

Covers irreducibility and periodicity of the transition graph, stationary and
limiting distributions, the epsilon-strong-stationary time, discounted state
visitation and the residuals that tie discounted visitation to the limiting
distribution of the chain.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import csgraph

from .config import DEFAULT_EPSILON, DEFAULT_T_MAX
from .errors import InvalidInputError, NotReachedError, SolverError
from .mdp_core import as_stochastic_matrix, check_distribution, check_gamma, solve_dense

log = logging.getLogger(__name__)

NOT_REACHED = "not reached"
NULL_SPACE_RCOND = 1e-10


@dataclass(frozen=True, eq=False)
class VisitationVector:
    """
    Normalized discounted state visitation (1 - gamma) sum_t gamma^t P^t start.
    """

    distribution: np.ndarray
    gamma: float
    start: str = "mu"


@dataclass(frozen=True, eq=False)
class StationarySolution:
    """
    Extreme points of the set of stationary distributions, one per closed class.

    ambiguous is set when the numerical rank of (P - I) on some class was not
    clear cut; residuals then tell how far each candidate is from stationarity.
    """

    vectors: Tuple[np.ndarray, ...]
    residuals: Tuple[float, ...]
    ambiguous: bool = False

    @property
    def unique(self):
        return len(self.vectors) == 1


@dataclass(frozen=True, eq=False)
class LimitResult:
    distribution: Optional[np.ndarray]
    iterations: int
    reached: bool
    last_delta: float


@dataclass(frozen=True, eq=False)
class DecompositionCheck:
    residual: float
    t_split: int
    epsilon: float
    within_budget: bool


@dataclass(frozen=True, eq=False)
class ChainReport:
    irreducible: bool
    aperiodic: bool
    period: int
    stationary: Tuple[np.ndarray, ...]
    stationary_residuals: Tuple[float, ...]
    limiting: Optional[np.ndarray]
    limit_iterations: int
    t_epsilon: Optional[int]
    mixing_time: Optional[int]
    epsilon: float

    @property
    def ergodic(self):
        return self.irreducible and self.aperiodic

    def to_dict(self):
        """
        JSON-ready form; missing times and limits are written as "not reached".
        """

        return {
            "irreducible": self.irreducible,
            "aperiodic": self.aperiodic,
            "period": self.period,
            "stationary": [vector.tolist() for vector in self.stationary],
            "stationary_residuals": list(self.stationary_residuals),
            "limiting": NOT_REACHED if self.limiting is None else self.limiting.tolist(),
            "limit_iterations": self.limit_iterations,
            "t_epsilon": NOT_REACHED if self.t_epsilon is None else self.t_epsilon,
            "mixing_time": NOT_REACHED if self.mixing_time is None else self.mixing_time,
            "epsilon": self.epsilon,
        }


def _check_tolerances(eps, t_max):
    if not eps > 0:
        raise InvalidInputError("epsilon", "tolerance must be positive")
    if t_max < 1:
        raise InvalidInputError("t_max", "t_max must be at least 1")


def _adjacency(P):
    # Edge s -> s_next whenever P[s_next, s] > 0.
    return sparse.csr_matrix((P.T > 0).astype(float))


def strongly_connected_components(P):
    """
    Strongly connected components of the transition graph as sorted index arrays.
    """

    P = as_stochastic_matrix(P).matrix
    n_components, labels = csgraph.connected_components(_adjacency(P), directed=True, connection="strong")

    return [np.flatnonzero(labels == k) for k in range(n_components)]


# ------------------------- #
#   STRUCTURE OF THE GRAPH  #
# ------------------------- #

def is_irreducible(P):
    return len(strongly_connected_components(P)) == 1


def component_periods(P):
    """
    Period of every strongly connected component.

    Uses breadth-first levels from one state of the component and takes the gcd of
    level[u] + 1 - level[v] over the component's edges u -> v. A component without
    any cycle (a lone state with no self-loop) gets period 0.
    """

    P = as_stochastic_matrix(P).matrix
    adjacency = P.T > 0
    periods = []
    for component in strongly_connected_components(P):
        block = adjacency[np.ix_(component, component)]
        if not block.any():
            periods.append(0)
            continue
        levels = csgraph.shortest_path(sparse.csr_matrix(block.astype(float)), unweighted=True, indices=0)
        sources, targets = np.nonzero(block)
        offsets = np.abs(levels[sources] + 1 - levels[targets]).astype(int)
        periods.append(int(np.gcd.reduce(offsets)))

    return periods


def is_aperiodic(P):
    """
    Returns (aperiodic, period).

    For an irreducible chain the period is the gcd of its cycle lengths. For a
    reducible chain every component with a cycle is checked, the chain counts as
    aperiodic only when all of them are, and the reported period is the lcm of the
    component periods.
    """

    periods = [period for period in component_periods(P) if period > 0]
    period = math.lcm(*periods)

    return period == 1, period


# ------------------------------------ #
#   STATIONARY AND LIMITING BEHAVIOR   #
# ------------------------------------ #

def _closed_components(P):
    adjacency = P.T > 0
    closed = []
    for component in strongly_connected_components(P):
        outside = np.setdiff1d(np.arange(P.shape[0]), component)
        if not adjacency[np.ix_(component, outside)].any():
            closed.append(component)

    return closed


def solve_stationary(P):
    """
    Finds every extreme stationary distribution of P.

    Each closed communicating class carries exactly one stationary distribution.
    It is read off the null space of (P - I) restricted to the class, normalized
    onto the simplex; when the numerical null space is not one-dimensional the
    candidate with the smallest residual is kept and the result is flagged.
    """

    P = as_stochastic_matrix(P).matrix
    n_states = P.shape[0]
    vectors, residuals = [], []
    ambiguous = False
    for component in _closed_components(P):
        block = P[np.ix_(component, component)] - np.eye(component.size)
        basis = linalg.null_space(block, rcond=NULL_SPACE_RCOND)
        if basis.shape[1] != 1:
            ambiguous = True
            log.warning("null space of dimension %d on class %s", basis.shape[1], component.tolist())
            if basis.shape[1] == 0:
                basis = linalg.svd(block)[2][-1:].T

        candidates = []
        for column in basis.T:
            total = column.sum()
            if abs(total) < 1e-14:
                continue
            local = np.clip(column / total, 0.0, None)
            vector = np.zeros(n_states)
            vector[component] = local / local.sum()
            candidates.append((float(np.abs(P @ vector - vector).sum()), vector))
        if not candidates:
            raise SolverError(f"no stationary candidate on class {component.tolist()}")

        residual, vector = min(candidates, key=lambda item: item[0])
        vector.setflags(write=False)
        vectors.append(vector)
        residuals.append(residual)

    return StationarySolution(tuple(vectors), tuple(residuals), ambiguous)


def _power_steps(P, mu, t_max):
    # Yields (t, P^t mu, ||P^{t+1} mu - P^t mu||_1) for t = 0 .. t_max.
    current = np.array(mu)
    for t in range(t_max + 1):
        following = P @ current
        yield t, current, float(np.abs(following - current).sum())
        current = following


def limiting_distribution(P, mu, eps=DEFAULT_EPSILON, t_max=DEFAULT_T_MAX):
    """
    Power-iterates mu until successive iterates are within eps in L1.

    On success the returned distribution is P^t mu for the first such t. A chain
    that never settles (a periodic one, say) yields reached=False and no
    distribution.
    """

    P = as_stochastic_matrix(P).matrix
    mu = check_distribution(mu, "mu", P.shape[0])
    _check_tolerances(eps, t_max)

    delta = math.inf
    for t, current, delta in _power_steps(P, mu, t_max):
        if delta <= eps:
            current.setflags(write=False)
            return LimitResult(current, t, True, delta)

    log.info("limiting distribution not reached within %d steps (last delta %.3g)", t_max, delta)
    return LimitResult(None, t_max, False, delta)


def strong_stationary_time(P, mu, eps=DEFAULT_EPSILON, t_max=DEFAULT_T_MAX):
    """
    Smallest t <= t_max with ||P^t mu - P^{t+1} mu||_1 <= eps, or None.
    """

    result = limiting_distribution(P, mu, eps, t_max)

    return result.iterations if result.reached else None


def mixing_profile(P, mu, t_max):
    """
    ||P^{t+1} mu - P^t mu||_1 for t = 0 .. t_max - 1.
    """

    P = as_stochastic_matrix(P).matrix
    mu = check_distribution(mu, "mu", P.shape[0])
    _check_tolerances(1.0, t_max)

    return np.array([delta for _, _, delta in _power_steps(P, mu, t_max - 1)])


def mixing_time(P, eps=DEFAULT_EPSILON, t_max=DEFAULT_T_MAX):
    """
    Start-independent epsilon time of the chain.

    Smallest t with max_s ||P^t e_s - d*||_1 <= eps, where d* is the unique
    stationary distribution. Every start distribution is then within eps of d*
    after t steps. Returns None when the stationary distribution is not unique
    or t_max is exhausted.
    """

    P = as_stochastic_matrix(P).matrix
    _check_tolerances(eps, t_max)
    stationary = solve_stationary(P)
    if not stationary.unique:
        return None

    target = stationary.vectors[0][:, None]
    power = np.eye(P.shape[0])
    for t in range(t_max + 1):
        if np.abs(power - target).sum(axis=0).max() <= eps:
            return t
        power = P @ power

    return None


# ----------------------- #
#   DISCOUNTED VISITATION  #
# ----------------------- #

def discounted_visitation(P, mu, gamma, start="mu"):
    """
    Solves (I - gamma P) x = mu and returns the normalized visitation (1 - gamma) x.
    """

    P = as_stochastic_matrix(P).matrix
    mu = check_distribution(mu, "mu", P.shape[0])
    gamma = check_gamma(gamma)

    visitation = (1.0 - gamma) * solve_dense(np.eye(P.shape[0]) - gamma * P, mu, "discounted visitation")
    if visitation.min() < -1e-12:
        raise SolverError("discounted visitation has negative entries")
    visitation = np.clip(visitation, 0.0, None)
    visitation.setflags(write=False)

    return VisitationVector(visitation, gamma, start)


def visitation_limit_residual(P, mu, gamma, eps_chain=DEFAULT_EPSILON, t_max=DEFAULT_T_MAX):
    """
    L1 distance between the discounted visitation and the limiting distribution.

    Raises NotReachedError when the limiting distribution is not reached at
    tolerance eps_chain.
    """

    limit = limiting_distribution(P, mu, eps_chain, t_max)
    if not limit.reached:
        raise NotReachedError(f"limiting distribution not reached within {t_max} steps")
    visitation = discounted_visitation(P, mu, gamma).distribution

    return float(np.abs(visitation - limit.distribution).sum())


def decomposition_check(P, mu, gamma, eps=1e-12, t_max=DEFAULT_T_MAX):
    """
    Splits the visitation series at the epsilon-strong-stationary time T.

    Rebuilds (1 - gamma) sum_{t<T} gamma^t P^t mu + gamma^T P^T mu and compares it
    with the exact discounted visitation. For chains that become exactly
    stationary at T the residual is rounding only; otherwise it stays within a
    small multiple of eps.
    """

    P = as_stochastic_matrix(P).matrix
    mu = check_distribution(mu, "mu", P.shape[0])
    gamma = check_gamma(gamma)
    t_split = strong_stationary_time(P, mu, eps, t_max)
    if t_split is None:
        raise NotReachedError(f"no epsilon-strong-stationary time within {t_max} steps")

    transient = np.zeros(P.shape[0])
    current = np.array(mu)
    for t in range(t_split):
        transient += (1.0 - gamma) * gamma ** t * current
        current = P @ current
    rebuilt = transient + gamma ** t_split * current

    residual = float(np.abs(rebuilt - discounted_visitation(P, mu, gamma).distribution).sum())

    return DecompositionCheck(residual, t_split, eps, residual <= 10 * eps)


def chain_report(P, mu, eps=DEFAULT_EPSILON, t_max=DEFAULT_T_MAX):
    """
    Collects structure, stationary, limiting and timing information for P.
    """

    P = as_stochastic_matrix(P)
    irreducible = is_irreducible(P)
    aperiodic, period = is_aperiodic(P)
    stationary = solve_stationary(P)
    limit = limiting_distribution(P, mu, eps, t_max)
    mixing = mixing_time(P, eps, t_max) if irreducible and aperiodic else None

    return ChainReport(
        irreducible=irreducible,
        aperiodic=aperiodic,
        period=period,
        stationary=stationary.vectors,
        stationary_residuals=stationary.residuals,
        limiting=limit.distribution,
        limit_iterations=limit.iterations,
        t_epsilon=limit.iterations if limit.reached else None,
        mixing_time=mixing,
        epsilon=eps,
    )
