"""
Experiment protocols: the two-state MDP, discount sweeps of the value and
gradient gaps, Expected SARSA off-policy evaluation and offline policy
selection ranked with Kendall's tau.
"""
import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import stats
from scipy.special import logit

from .chain_analysis import is_aperiodic, is_irreducible
from .config import DEFAULT_NORM, DEFAULT_SEED
from .errors import HypothesisError, InvalidInputError, TiedScoresError
from .gradients import PolicyJacobian, check_norm, gradient_pair
from .mdp_core import (
    Mdp, Policy, action_value, check_gamma, discounted_returns, induced_chain, sample_rows
)
from .objectives import DISCOUNTED, behavioral_visitation, coverage_check, on_off_gap

log = logging.getLogger(__name__)

STAY, MOVE = 0, 1
UNIFORM_STAY = "uniform-stay"
PARAMETRIZED = "parametrized"
BEHAVIOR_LAYOUTS = (UNIFORM_STAY, PARAMETRIZED)

DENSE = "dense"
SPARSE = "sparse-irreducible"

CONFIDENCE_LEVEL = 0.95
EXACT_TAU_MAX_N = 8

SWEEP_COLUMNS = ("gamma", "mean_gap", "ci_lo", "ci_hi", "n_policies", "seed")
GRADIENT_COLUMNS = ("gamma", "grad_gap_p", "norm_on", "norm_off", "policy_id", "seed", "grad_gap_scaled")
RANKING_COLUMNS = (
    "gamma", "tau_mean", "tau_ci_lo", "tau_ci_hi", "tau_full", "p_value", "n_policies", "subset_size",
)


# --------------- #
#   TWO STATES    #
# --------------- #

@dataclass(frozen=True)
class TwoStateConfig:
    """
    Two-state MDP with slippage q.

    Action 0 is "stay" and action 1 is "move"; either is executed as chosen with
    probability q and swapped otherwise. Being in state 1 pays 1, state 0 pays 0,
    and the start distribution is uniform. behavior_layout selects how the
    behavior's stay probability is read: the same stay probability in both
    states, or p_b in the policy parametrization of two_state_policy.
    """

    q: float
    behavior_stay_prob: float = 0.9
    behavior_layout: str = UNIFORM_STAY

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise InvalidInputError("q", f"slippage must lie in [0, 1], got {self.q}")
        if not 0.0 <= self.behavior_stay_prob <= 1.0:
            raise InvalidInputError("behavior_stay_prob", "must lie in [0, 1]")
        if self.behavior_layout not in BEHAVIOR_LAYOUTS:
            raise InvalidInputError("behavior_layout", f"expected one of {BEHAVIOR_LAYOUTS}")


def build_two_state_mdp(config):
    q = config.q
    transition = np.zeros((2, 2, 2))
    for s in (0, 1):
        transition[s, STAY, s], transition[s, STAY, 1 - s] = q, 1.0 - q
        transition[s, MOVE, 1 - s], transition[s, MOVE, s] = q, 1.0 - q
    reward = np.array([[0.0, 0.0], [1.0, 1.0]])

    return Mdp(transition, reward, np.array([0.5, 0.5]))


def two_state_policy(p):
    """
    Direct policy staying in state 1 and moving out of state 0 with probability p.
    """

    if not 0.0 <= p <= 1.0:
        raise InvalidInputError("p", f"probability must lie in [0, 1], got {p}")

    return Policy.direct([[1.0 - p, p], [p, 1.0 - p]])


def two_state_softmax_policy(p):
    """
    Softmax policy with the same probabilities as two_state_policy(p).
    """

    z = float(logit(np.clip(p, 1e-12, 1.0 - 1e-12)))

    return Policy.softmax([[0.0, z], [z, 0.0]])


def two_state_jacobian():
    """
    Jacobian of two_state_policy with respect to p: +1 on the favored action of
    each state and -1 on the other.
    """

    tensor = np.zeros((2, 2, 1))
    tensor[1, STAY, 0], tensor[1, MOVE, 0] = 1.0, -1.0
    tensor[0, MOVE, 0], tensor[0, STAY, 0] = 1.0, -1.0

    return PolicyJacobian(tensor)


def behavior_policy(config):
    stay = config.behavior_stay_prob
    if config.behavior_layout == PARAMETRIZED:
        return two_state_policy(stay)

    return Policy.direct([[stay, 1.0 - stay], [stay, 1.0 - stay]])


# ------------------------------- #
#   POLICY SAMPLERS AND SWEEPS    #
# ------------------------------- #

def two_state_sampler(parametrization="softmax"):
    """
    Draws p ~ Uniform[0, 1] and returns (policy, jacobian).

    The softmax parametrization is differentiated through its logits. The direct
    parametrization carries the one-parameter Jacobian of two_state_jacobian.
    """

    if parametrization not in ("softmax", "direct"):
        raise InvalidInputError("parametrization", f"expected softmax or direct, got {parametrization!r}")

    def sample(rng):
        p = float(rng.uniform(0.0, 1.0))
        if parametrization == "direct":
            return two_state_policy(p), two_state_jacobian()
        return two_state_softmax_policy(p), None

    return sample


def softmax_sampler(n_states, n_actions, scale=1.0):
    """
    Draws softmax policies with logits ~ Normal(0, scale^2).
    """

    def sample(rng):
        return Policy.softmax(rng.normal(0.0, scale, size=(n_states, n_actions))), None

    return sample


def _draws(sampler, n_policies, seed, repeat):
    # One stream per repetition so draws do not depend on scheduling.
    rng = np.random.default_rng([seed, repeat])
    return [sampler(rng) for _ in range(n_policies)]


def mean_confidence_interval(values, level=CONFIDENCE_LEVEL):
    """
    Mean with a Student-t confidence interval.

    A single value gives a degenerate interval at the value itself.
    """

    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    if values.size < 2:
        return mean, mean, mean
    half = float(stats.t.ppf(0.5 + level / 2.0, values.size - 1) * stats.sem(values))
    if not math.isfinite(half):
        half = 0.0

    return mean, mean - half, mean + half


@dataclass(frozen=True)
class GapAggregate:
    gamma: float
    mean_gap: float
    ci_lo: float
    ci_hi: float
    n_policies: int
    seed: int

    def as_row(self):
        return {column: getattr(self, column) for column in SWEEP_COLUMNS}


@dataclass(frozen=True)
class GradientGapRow:
    gamma: float
    grad_gap_p: float
    grad_gap_scaled: float
    norm_on: float
    norm_off: float
    policy_id: str
    seed: int

    def as_row(self):
        return {column: getattr(self, column) for column in GRADIENT_COLUMNS}


def _check_sweep(gammas, n_policies, n_repeats):
    gammas = [check_gamma(gamma) for gamma in gammas]
    if not gammas:
        raise InvalidInputError("gammas", "the discount grid is empty")
    if n_policies < 1 or n_repeats < 1:
        raise InvalidInputError("n_policies", "need at least one policy and one repetition")
    return gammas


def _aggregate(gamma, per_repeat, n_policies, seed):
    # Spread over repetitions when there are several, over policies otherwise.
    per_repeat = np.asarray(per_repeat)
    samples = per_repeat.mean(axis=1) if per_repeat.shape[0] > 1 else per_repeat[0]
    mean, lo, hi = mean_confidence_interval(samples)

    return GapAggregate(gamma, mean, lo, hi, n_policies, seed)


def gap_sweep(mdp, behavior, gammas, n_policies, n_repeats, seed=DEFAULT_SEED, sampler=None, mode=DISCOUNTED):
    """
    Mean value gap |j_off - j_on| per discount factor with a 95% confidence interval.

    The same policy draws are evaluated at every gamma.
    """

    gammas = _check_sweep(gammas, n_policies, n_repeats)
    sampler = sampler or softmax_sampler(mdp.n_states, mdp.n_actions)
    draws = [_draws(sampler, n_policies, seed, repeat) for repeat in range(n_repeats)]

    aggregates = []
    for gamma in gammas:
        per_repeat = [
            [on_off_gap(mdp, policy, behavior, gamma, mode).value_gap for policy, _ in repeat]
            for repeat in draws
        ]
        aggregates.append(_aggregate(gamma, per_repeat, n_policies, seed))
        log.info("value gap sweep gamma=%g mean=%.6g", gamma, aggregates[-1].mean_gap)

    return aggregates


def gradient_gap_rows(mdp, behavior, gammas, n_policies, n_repeats, seed=DEFAULT_SEED, sampler=None,
                      p=DEFAULT_NORM, mode=DISCOUNTED):
    """
    Per-policy gradient gaps, ordered by (gamma, repetition, policy).
    """

    gammas = _check_sweep(gammas, n_policies, n_repeats)
    order = check_norm(p)
    sampler = sampler or softmax_sampler(mdp.n_states, mdp.n_actions)
    draws = [_draws(sampler, n_policies, seed, repeat) for repeat in range(n_repeats)]

    rows = []
    for gamma in gammas:
        for repeat, policies in enumerate(draws):
            for k, (policy, jacobian) in enumerate(policies):
                g_on, g_off = gradient_pair(mdp, policy, behavior, gamma, mode, jacobian)
                distance = float(np.linalg.norm(g_off - g_on, ord=order))
                rows.append(GradientGapRow(
                    gamma=gamma,
                    grad_gap_p=distance,
                    grad_gap_scaled=(1.0 - gamma) * distance,
                    norm_on=float(np.linalg.norm(g_on, ord=order)),
                    norm_off=float(np.linalg.norm(g_off, ord=order)),
                    policy_id=f"r{repeat}-p{k}",
                    seed=seed,
                ))

    return rows


def gradient_gap_sweep(mdp, behavior, gammas, n_policies, n_repeats, seed=DEFAULT_SEED, sampler=None,
                       p=DEFAULT_NORM, mode=DISCOUNTED, scaled=False):
    """
    Mean gradient gap per discount factor, aggregated like gap_sweep.

    scaled=True aggregates the (1 - gamma)-scaled distance instead of the plain
    distance between the normalized gradients.
    """

    rows = gradient_gap_rows(mdp, behavior, gammas, n_policies, n_repeats, seed, sampler, p, mode)
    key = "grad_gap_scaled" if scaled else "grad_gap_p"

    aggregates = []
    for i, gamma in enumerate(_check_sweep(gammas, n_policies, n_repeats)):
        cell = rows[i * n_repeats * n_policies:(i + 1) * n_repeats * n_policies]
        per_repeat = np.reshape([getattr(row, key) for row in cell], (n_repeats, n_policies))
        aggregates.append(_aggregate(gamma, per_repeat, n_policies, seed))

    return aggregates


# ------------------------ #
#   OFF-POLICY ESTIMATION  #
# ------------------------ #

@dataclass(frozen=True, eq=False)
class SarsaResult:
    """
    Expected SARSA estimate of Q_pi from behavioral experience.

    error holds |Q_hat - Q_pi| per entry. j_on and j_off are the normalized
    objectives of the estimated values V_hat(s) = sum_a pi(a|s) Q_hat(s, a).
    """

    q_table: np.ndarray
    error: np.ndarray
    v_estimate: np.ndarray
    j_on: float
    j_off: float
    alpha: float
    n_updates: int
    seed: int

    @property
    def max_error(self):
        return float(self.error.max())


def expected_sarsa(mdp, behavior, policy, gamma, alpha=0.5, n_updates=100000, seed=DEFAULT_SEED, q_init=0.0):
    """
    Tabular Expected SARSA evaluation of policy from one trajectory of behavior.

    The trajectory starts from mu and is never reset. Each transition applies
    Q(s, a) += alpha (r + gamma sum_a' pi(a'|s') Q(s', a') - Q(s, a)).
    Refuses with HypothesisError when the behavior does not cover the policy.
    """

    gamma = check_gamma(gamma)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError("alpha", f"learning rate must lie in [0, 1], got {alpha}")
    if n_updates < 0:
        raise InvalidInputError("n_updates", "number of updates must be nonnegative")
    mdp.check_policy(behavior, "behavior")
    coverage = coverage_check(policy, behavior)
    if not coverage:
        raise HypothesisError(f"behavior does not cover the target policy at {list(coverage.violations)}")

    rng = np.random.default_rng(seed)
    n_states, n_actions = mdp.n_states, mdp.n_actions
    q_table = [[float(q_init)] * n_actions for _ in range(n_states)]
    behavior_cdf = np.cumsum(behavior.probs, axis=1).tolist()
    transition_cdf = np.cumsum(mdp.transition, axis=2).tolist()
    target = policy.probs.tolist()
    reward = mdp.reward.tolist()

    state = int(rng.choice(n_states, p=mdp.initial_dist))
    for u_action, u_next in rng.random((n_updates, 2)).tolist():
        action = min(bisect.bisect_right(behavior_cdf[state], u_action), n_actions - 1)
        next_state = min(bisect.bisect_right(transition_cdf[state][action], u_next), n_states - 1)
        expected = sum(p * q for p, q in zip(target[next_state], q_table[next_state]))
        row = q_table[state]
        row[action] += alpha * (reward[state][action] + gamma * expected - row[action])
        state = next_state

    q_table = np.array(q_table)
    error = np.abs(q_table - action_value(mdp, policy, gamma))
    v_estimate = np.einsum("sa,sa->s", policy.probs, q_table)
    d_b = behavioral_visitation(mdp, behavior, gamma).distribution
    log.debug("expected sarsa: %d updates, max error %.3g", n_updates, error.max())

    return SarsaResult(
        q_table=q_table,
        error=error,
        v_estimate=v_estimate,
        j_on=float((1.0 - gamma) * mdp.initial_dist @ v_estimate),
        j_off=float((1.0 - gamma) * d_b @ v_estimate),
        alpha=alpha,
        n_updates=n_updates,
        seed=seed,
    )


@dataclass(frozen=True)
class ObjectiveEstimate:
    j_on: float
    j_on_stderr: float
    j_off: float
    j_off_stderr: float
    truncation_bias: float


def behavioral_dataset(mdp, behavior, gamma, dataset_size, rng):
    """
    States sampled from the discounted visitation of the behavior.

    Each sample runs the behavior from mu for a Geometric(1 - gamma) number of
    steps and keeps the state it stops in.
    """

    stops = rng.geometric(1.0 - gamma, size=dataset_size) - 1
    states = sample_rows(rng, np.tile(np.cumsum(mdp.initial_dist), (dataset_size, 1)))
    behavior_cdf = np.cumsum(behavior.probs, axis=1)
    transition_cdf = np.cumsum(mdp.transition, axis=2)
    for t in range(int(stops.max()) if dataset_size else 0):
        running = stops > t
        current = states[running]
        actions = sample_rows(rng, behavior_cdf[current])
        states[running] = sample_rows(rng, transition_cdf[current, actions])

    return states


def estimate_objectives(mdp, policy, behavior, gamma, n_episodes, horizon, dataset_size, seed=DEFAULT_SEED):
    """
    Sample-based normalized objectives.

    On-policy episodes start from mu. Excursion episodes start from states
    resampled from a behavioral dataset. Standard errors come from the episode
    returns; the truncation bias of the normalized estimates is gamma^horizon.
    """

    gamma = check_gamma(gamma)
    if n_episodes < 2 or dataset_size < 1 or horizon < 1:
        raise InvalidInputError("n_episodes", "need two episodes, a non-empty dataset and a positive horizon")
    mdp.check_policy(policy)
    mdp.check_policy(behavior, "behavior")

    rng = np.random.default_rng(seed)
    scale = 1.0 - gamma
    starts_on = sample_rows(rng, np.tile(np.cumsum(mdp.initial_dist), (n_episodes, 1)))
    returns_on = scale * discounted_returns(mdp, policy, gamma, starts_on, horizon, rng)

    dataset = behavioral_dataset(mdp, behavior, gamma, dataset_size, rng)
    starts_off = dataset[rng.integers(0, dataset_size, size=n_episodes)]
    returns_off = scale * discounted_returns(mdp, policy, gamma, starts_off, horizon, rng)

    return ObjectiveEstimate(
        j_on=float(returns_on.mean()),
        j_on_stderr=float(stats.sem(returns_on)),
        j_off=float(returns_off.mean()),
        j_off_stderr=float(stats.sem(returns_off)),
        truncation_bias=gamma ** horizon,
    )


# ----------------------- #
#   POLICY SELECTION      #
# ----------------------- #

def _check_scores(x, field):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidInputError(field, "need at least two scores")
    if np.all(x == x[0]):
        raise TiedScoresError(field)
    return x


def kendall_tau(x, y):
    """
    Tie-corrected Kendall tau-b between two score lists.
    """

    x, y = _check_scores(x, "x"), _check_scores(y, "y")
    if x.size != y.size:
        raise InvalidInputError("y", f"expected {x.size} scores, got {y.size}")
    tau, _ = stats.kendalltau(x, y, variant="b")

    return float(tau)


def inversion_counts(n):
    """
    Number of permutations of n items with each possible count of inversions.
    """

    counts = np.array([1], dtype=np.int64)
    for k in range(2, n + 1):
        counts = np.convolve(counts, np.ones(k, dtype=np.int64))

    return counts


def tau_p_value(tau, n):
    """
    Two-sided p-value of tau under independence.

    Small samples enumerate every permutation through the inversion counts. From
    n = 9 on the normal approximation with variance 2(2n + 5) / (9n(n - 1)) is
    used.
    """

    if n < 2:
        raise InvalidInputError("n", "need at least two items")
    if not -1.0 <= tau <= 1.0:
        raise InvalidInputError("tau", f"tau must lie in [-1, 1], got {tau}")

    if n <= EXACT_TAU_MAX_N:
        pairs = n * (n - 1) // 2
        counts = inversion_counts(n)
        taus = 1.0 - 2.0 * np.arange(pairs + 1) / pairs
        extreme = np.abs(taus) >= abs(tau) - 1e-12
        return float(min(1.0, int(counts[extreme].sum()) / math.factorial(n)))

    z = tau / math.sqrt(2.0 * (2 * n + 5) / (9.0 * n * (n - 1)))

    return float(min(1.0, 2.0 * stats.norm.sf(abs(z))))


@dataclass(frozen=True, eq=False)
class RankingReport:
    """
    Agreement between the excursion ranking and the on-policy ranking at one gamma.
    """

    gamma: float
    tau_mean: float
    tau_ci_lo: float
    tau_ci_hi: float
    tau_full: float
    p_value: float
    n_policies: int
    subset_size: int
    j_on: Tuple[float, ...] = field(repr=False)
    j_off: Tuple[float, ...] = field(repr=False)

    @property
    def top1_agreement(self):
        return int(np.argmax(self.j_on)) == int(np.argmax(self.j_off))

    def as_row(self):
        return {column: getattr(self, column) for column in RANKING_COLUMNS}


def offline_policy_selection(mdp, behavior, policies, gammas, subset_size, n_resamples, seed=DEFAULT_SEED,
                             mode=DISCOUNTED):
    """
    Ranks candidate policies by j_off and compares with the j_on ranking.

    Each resample draws subset_size candidates without replacement and computes
    tau on the subset; subsets are the same at every gamma. Subsets that happen
    to be all tied are skipped. The full candidate set gives tau_full and its
    p-value.
    """

    policies = list(policies)
    if not 2 <= subset_size <= len(policies):
        raise InvalidInputError("subset_size", f"need 2 <= subset_size <= {len(policies)}")
    if n_resamples < 1:
        raise InvalidInputError("n_resamples", "need at least one resample")
    gammas = [check_gamma(gamma) for gamma in gammas]
    subsets = [
        np.random.default_rng([seed, r]).choice(len(policies), size=subset_size, replace=False)
        for r in range(n_resamples)
    ]

    reports = []
    for gamma in gammas:
        gaps = [on_off_gap(mdp, policy, behavior, gamma, mode, policy_id=str(k)) for k, policy in enumerate(policies)]
        j_on = np.array([gap.j_on for gap in gaps])
        j_off = np.array([gap.j_off for gap in gaps])
        tau_full = kendall_tau(j_on, j_off)

        taus = []
        for subset in subsets:
            try:
                taus.append(kendall_tau(j_on[subset], j_off[subset]))
            except TiedScoresError:
                log.warning("tied subset skipped at gamma=%g", gamma)
        tau_mean, tau_lo, tau_hi = mean_confidence_interval(taus) if taus else (math.nan,) * 3

        reports.append(RankingReport(
            gamma=gamma,
            tau_mean=tau_mean,
            tau_ci_lo=tau_lo,
            tau_ci_hi=tau_hi,
            tau_full=tau_full,
            p_value=tau_p_value(tau_full, len(policies)),
            n_policies=len(policies),
            subset_size=subset_size,
            j_on=tuple(j_on.tolist()),
            j_off=tuple(j_off.tolist()),
        ))
        log.info("policy selection gamma=%g tau=%.4f", gamma, tau_full)

    return reports


# --------------------------- #
#   CONSTRUCTED INSTANCES     #
# --------------------------- #

def random_mdp(n_states, n_actions, structure=DENSE, seed=DEFAULT_SEED, density=0.5, max_tries=1000):
    """
    Random MDP with Dirichlet(1) transition rows and uniform rewards in [0, 1].

    The sparse structure keeps each next state with probability density and
    rejects draws until the uniform-policy chain is irreducible and aperiodic.
    """

    if n_states < 1 or n_actions < 1:
        raise InvalidInputError("n_states", "need at least one state and one action")
    if structure not in (DENSE, SPARSE):
        raise InvalidInputError("structure", f"expected {DENSE} or {SPARSE}, got {structure!r}")

    rng = np.random.default_rng(seed)
    uniform = Policy.uniform(n_states, n_actions)
    for attempt in range(max_tries if structure == SPARSE else 1):
        transition = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
        if structure == SPARSE:
            mask = rng.random(transition.shape) < density
            rows, columns = np.indices((n_states, n_actions))
            mask[rows, columns, rng.integers(0, n_states, size=(n_states, n_actions))] = True
            transition = transition * mask
            transition /= transition.sum(axis=2, keepdims=True)
        mdp = Mdp(transition, rng.random((n_states, n_actions)), rng.dirichlet(np.ones(n_states)))
        if structure == DENSE:
            return mdp

        P = induced_chain(mdp, uniform)
        if is_irreducible(P) and is_aperiodic(P)[0]:
            log.debug("sparse random MDP accepted after %d draws", attempt + 1)
            return mdp

    raise HypothesisError(f"no irreducible aperiodic sparse MDP in {max_tries} draws")


ACTION_A, ACTION_B, JUMP = 0, 1, 2
LEFT, RIGHT = (0, 1, 2), (3, 4, 5)


def two_region_mdp(switch_prob=0.1, left_reward=0.6, right_reward=1.0):
    """
    Six states split into a left and a right region, with actions A, B and jump.

    A and B share their dynamics: stay in the current region with probability
    1 - switch_prob, landing uniformly inside it, or switch region. jump lands
    uniformly in the right region. A pays left_reward on the left, B pays
    right_reward on the right and everything else pays 0. Episodes start
    uniformly on the left.
    """

    transition = np.zeros((6, 3, 6))
    reward = np.zeros((6, 3))
    for region, other in ((LEFT, RIGHT), (RIGHT, LEFT)):
        for s in region:
            for action in (ACTION_A, ACTION_B):
                transition[s, action, list(region)] = (1.0 - switch_prob) / 3
                transition[s, action, list(other)] = switch_prob / 3
            transition[s, JUMP, list(RIGHT)] = 1.0 / 3
    reward[list(LEFT), ACTION_A] = left_reward
    reward[list(RIGHT), ACTION_B] = right_reward
    initial = np.zeros(6)
    initial[list(LEFT)] = 1.0 / 3

    return Mdp(transition, reward, initial)


def two_region_behavior(jump_prob=0.8):
    """
    Behavior that mostly jumps to the right region and splits the rest between A and B.
    """

    rest = (1.0 - jump_prob) / 2

    return Policy.direct(np.tile([rest, rest, jump_prob], (6, 1)))


def two_region_candidates(n=20):
    """
    Candidates that pick B with probability k / (n - 1) and A otherwise, never jumping.
    """

    if n < 2:
        raise InvalidInputError("n", "need at least two candidates")
    candidates = []
    for k in range(n):
        x = k / (n - 1)
        candidates.append(Policy.direct(np.tile([1.0 - x, x, 0.0], (6, 1))))

    return candidates


def perturbed_candidates(base, n, seed=DEFAULT_SEED):
    """
    Mixes a base policy with the uniform policy at strengths drawn from Uniform[0, 1].
    """

    if n < 1:
        raise InvalidInputError("n", "need at least one candidate")
    rng = np.random.default_rng(seed)
    uniform = np.full(base.probs.shape, 1.0 / base.n_actions)

    return [Policy.direct((1.0 - w) * base.probs + w * uniform) for w in rng.uniform(0.0, 1.0, size=n)]
