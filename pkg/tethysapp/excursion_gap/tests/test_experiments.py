import itertools
import math
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from ..chain_analysis import is_aperiodic, is_irreducible
from ..errors import HypothesisError, InvalidInputError, TiedScoresError
from ..experiments import (
    DENSE, GRADIENT_COLUMNS, MOVE, PARAMETRIZED, SPARSE, STAY, SWEEP_COLUMNS, TwoStateConfig, behavior_policy,
    build_two_state_mdp, estimate_objectives, expected_sarsa, gap_sweep, gradient_gap_rows, gradient_gap_sweep,
    inversion_counts, kendall_tau, mean_confidence_interval, offline_policy_selection, perturbed_candidates,
    random_mdp, tau_p_value, two_region_behavior, two_region_candidates, two_region_mdp, two_state_policy,
    two_state_sampler, two_state_softmax_policy
)
from ..mdp_core import Policy, induced_chain, required_horizon
from ..objectives import on_off_gap

SWEEP_GAMMAS = (0.5, 0.7, 0.9, 0.99, 0.999)


def brute_force_tau(x, y):
    concordant = discordant = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        sign = np.sign(x[i] - x[j]) * np.sign(y[i] - y[j])
        concordant += sign > 0
        discordant += sign < 0
    return (concordant - discordant) / (len(x) * (len(x) - 1) / 2)


class TwoStateTestCase(unittest.TestCase):

    def test_slippage(self):
        mdp = build_two_state_mdp(TwoStateConfig(q=0.8))
        self.assertAlmostEqual(mdp.transition[0, STAY, 0], 0.8)
        self.assertAlmostEqual(mdp.transition[0, MOVE, 1], 0.8)
        self.assertAlmostEqual(mdp.transition[1, MOVE, 1], 0.2)
        assert_array_equal(mdp.initial_dist, [0.5, 0.5])

    def test_softmax_and_direct_families_agree(self):
        for p in (0.1, 0.5, 0.9):
            assert_allclose(two_state_softmax_policy(p).probs, two_state_policy(p).probs, atol=1e-12)

    def test_behavior_layouts(self):
        assert_allclose(behavior_policy(TwoStateConfig(q=0.9)).probs, [[0.9, 0.1], [0.9, 0.1]])
        assert_allclose(
            behavior_policy(TwoStateConfig(q=0.9, behavior_layout=PARAMETRIZED)).probs, [[0.1, 0.9], [0.9, 0.1]]
        )

    def test_config_validation(self):
        with self.assertRaises(InvalidInputError):
            TwoStateConfig(q=1.2)
        with self.assertRaises(InvalidInputError):
            TwoStateConfig(q=0.9, behavior_layout="other")


class SweepTestCase(unittest.TestCase):
    """
    Gaps shrink as the discount factor approaches one.
    """

    def setUp(self):
        config = TwoStateConfig(q=0.9, behavior_layout=PARAMETRIZED)
        self.mdp, self.behavior = build_two_state_mdp(config), behavior_policy(config)

    def test_value_gap_decreases(self):
        aggregates = gap_sweep(self.mdp, self.behavior, SWEEP_GAMMAS, 25, 1, seed=7, sampler=two_state_sampler())
        means = [aggregate.mean_gap for aggregate in aggregates]
        self.assertTrue(all(later < earlier for earlier, later in zip(means, means[1:])))
        self.assertLess(means[-1], 1e-2)
        self.assertEqual(tuple(aggregates[0].as_row()), SWEEP_COLUMNS)

    def test_scaled_gradient_gap_decreases(self):
        aggregates = gradient_gap_sweep(
            self.mdp, self.behavior, SWEEP_GAMMAS, 25, 1, seed=7, sampler=two_state_sampler(), scaled=True
        )
        means = [aggregate.mean_gap for aggregate in aggregates]
        self.assertTrue(all(later < earlier for earlier, later in zip(means, means[1:])))
        self.assertLess(means[-1], 1e-2)

    def test_gradient_rows_are_ordered(self):
        rows = gradient_gap_rows(self.mdp, self.behavior, (0.5, 0.9), 3, 2, seed=1, sampler=two_state_sampler())
        self.assertEqual(len(rows), 12)
        self.assertEqual([row.policy_id for row in rows[:6]], ["r0-p0", "r0-p1", "r0-p2", "r1-p0", "r1-p1", "r1-p2"])
        self.assertEqual([row.gamma for row in rows], [0.5] * 6 + [0.9] * 6)
        self.assertEqual(tuple(rows[0].as_row()), GRADIENT_COLUMNS)
        for row in rows:
            self.assertAlmostEqual(row.grad_gap_scaled, (1 - row.gamma) * row.grad_gap_p)

    def test_sweeps_are_reproducible(self):
        first = gap_sweep(self.mdp, self.behavior, (0.5, 0.9), 5, 3, seed=3)
        second = gap_sweep(self.mdp, self.behavior, (0.5, 0.9), 5, 3, seed=3)
        self.assertEqual([a.as_row() for a in first], [b.as_row() for b in second])

    def test_sweep_validation(self):
        with self.assertRaises(InvalidInputError):
            gap_sweep(self.mdp, self.behavior, (), 5, 1)
        with self.assertRaises(InvalidInputError):
            gap_sweep(self.mdp, self.behavior, (0.5,), 0, 1)

    def test_confidence_interval(self):
        mean, lo, hi = mean_confidence_interval([1.0, 2.0, 3.0])
        self.assertAlmostEqual(mean, 2.0)
        self.assertAlmostEqual(hi - mean, mean - lo)
        self.assertAlmostEqual(hi - mean, 4.302652729911275 / math.sqrt(3), places=9)
        self.assertEqual(mean_confidence_interval([4.0]), (4.0, 4.0, 4.0))


class SarsaTestCase(unittest.TestCase):

    def test_deterministic_dynamics_within_tolerance(self):
        config = TwoStateConfig(q=1.0)
        mdp, behavior = build_two_state_mdp(config), behavior_policy(config)
        gamma = 0.9
        within = [
            expected_sarsa(mdp, behavior, two_state_policy(0.5), gamma, 0.5, 100000, seed).max_error
            <= 0.05 / (1 - gamma)
            for seed in range(20)
        ]
        self.assertGreaterEqual(sum(within), 18)

    def test_slippery_dynamics_share_within_tolerance(self):
        # With a constant learning rate of 0.5 the last iterate keeps fluctuating
        # on stochastic dynamics; about half of the seeds land within 0.05 / (1 - gamma).
        config = TwoStateConfig(q=0.9)
        mdp, behavior = build_two_state_mdp(config), behavior_policy(config)
        gamma = 0.9
        errors = [
            expected_sarsa(mdp, behavior, two_state_policy(0.5), gamma, 0.5, 100000, seed).max_error
            for seed in range(20)
        ]
        self.assertGreaterEqual(sum(error <= 0.05 / (1 - gamma) for error in errors), 7)

    def test_slippery_dynamics_within_loose_tolerance(self):
        config = TwoStateConfig(q=0.9)
        mdp, behavior = build_two_state_mdp(config), behavior_policy(config)
        gamma = 0.9
        within = [
            expected_sarsa(mdp, behavior, two_state_policy(0.5), gamma, 0.5, 20000, seed).max_error
            <= 0.2 / (1 - gamma)
            for seed in range(20)
        ]
        self.assertGreaterEqual(sum(within), 15)

    def test_error_shrinks_with_more_updates(self):
        config = TwoStateConfig(q=1.0)
        mdp, behavior = build_two_state_mdp(config), behavior_policy(config)
        errors = [
            expected_sarsa(mdp, behavior, two_state_policy(0.3), 0.9, 0.5, n, seed=4).max_error
            for n in (1000, 10000, 100000)
        ]
        self.assertGreaterEqual(errors[0], errors[1] - 1e-12)
        self.assertLessEqual(errors[2], 1e-9)

    def test_refuses_uncovered_policy(self):
        config = TwoStateConfig(q=0.9, behavior_stay_prob=1.0)
        mdp, behavior = build_two_state_mdp(config), behavior_policy(config)
        with self.assertRaises(HypothesisError):
            expected_sarsa(mdp, behavior, two_state_policy(0.5), 0.9, n_updates=10)

    def test_sample_objectives_agree_with_exact(self):
        config = TwoStateConfig(q=0.9, behavior_layout=PARAMETRIZED)
        mdp, behavior = build_two_state_mdp(config), behavior_policy(config)
        gamma = 0.9
        policy = two_state_policy(0.3)
        estimate = estimate_objectives(
            mdp, policy, behavior, gamma, 4000, required_horizon(gamma, 1e-6), 20000, seed=2
        )
        exact = on_off_gap(mdp, policy, behavior, gamma)

        self.assertLessEqual(abs(estimate.j_on - exact.j_on), 4 * estimate.j_on_stderr + estimate.truncation_bias)
        self.assertLessEqual(
            abs(estimate.j_off - exact.j_off), 4 * estimate.j_off_stderr + estimate.truncation_bias + 2e-3
        )


class RankingTestCase(unittest.TestCase):

    def test_tau_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            x, y = rng.normal(size=7), rng.normal(size=7)
            self.assertAlmostEqual(kendall_tau(x, y), brute_force_tau(x, y), places=12)

    def test_tied_scores(self):
        with self.assertRaises(TiedScoresError):
            kendall_tau([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with self.assertRaises(InvalidInputError):
            kendall_tau([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_inversion_counts(self):
        assert_array_equal(inversion_counts(4), [1, 3, 5, 6, 5, 3, 1])
        self.assertEqual(inversion_counts(8).sum(), math.factorial(8))

    def test_exact_p_value(self):
        self.assertAlmostEqual(tau_p_value(1.0, 5), 1 / 60)

        n = 6
        taus = [brute_force_tau(np.arange(n), np.array(order)) for order in itertools.permutations(range(n))]
        for tau in (1.0, 0.6, 0.2):
            expected = sum(abs(t) >= tau - 1e-12 for t in taus) / math.factorial(n)
            self.assertAlmostEqual(tau_p_value(tau, n), expected)

    def test_normal_approximation(self):
        self.assertAlmostEqual(tau_p_value(0.0, 20), 1.0)
        self.assertLess(tau_p_value(0.9, 20), 1e-6)

    def test_two_region_selection(self):
        reports = offline_policy_selection(
            two_region_mdp(), two_region_behavior(), two_region_candidates(20), (0.5, 0.999), 15, 30, seed=7
        )
        low, high = reports
        self.assertGreaterEqual(high.tau_full, 0.9)
        self.assertGreater(high.tau_full, low.tau_full)
        self.assertTrue(high.top1_agreement)
        self.assertLess(low.tau_full, 0.0)
        self.assertLessEqual(high.tau_ci_lo, high.tau_mean)
        self.assertLessEqual(high.tau_mean, high.tau_ci_hi)

    def test_selection_validation(self):
        with self.assertRaises(InvalidInputError):
            offline_policy_selection(two_region_mdp(), two_region_behavior(), two_region_candidates(5), (0.5,), 6, 3)


class InstanceTestCase(unittest.TestCase):

    def test_random_mdp_is_reproducible(self):
        first, second = random_mdp(4, 3, DENSE, seed=9), random_mdp(4, 3, DENSE, seed=9)
        assert_array_equal(first.transition, second.transition)
        assert_array_equal(first.reward, second.reward)

    def test_sparse_mdp_is_ergodic(self):
        for seed in range(5):
            mdp = random_mdp(6, 2, SPARSE, seed=seed, density=0.3)
            P = induced_chain(mdp, Policy.uniform(6, 2))
            self.assertTrue(is_irreducible(P))
            self.assertTrue(is_aperiodic(P)[0])
            self.assertLess((mdp.transition > 0).mean(), 1.0)

    def test_unknown_structure(self):
        with self.assertRaises(InvalidInputError):
            random_mdp(3, 2, "banded")

    def test_two_region_instance(self):
        mdp = two_region_mdp()
        self.assertEqual((mdp.n_states, mdp.n_actions), (6, 3))
        candidates = two_region_candidates(20)
        self.assertEqual(len(candidates), 20)
        assert_allclose(candidates[0].probs[0], [1.0, 0.0, 0.0])
        assert_allclose(candidates[-1].probs[0], [0.0, 1.0, 0.0])

    def test_perturbed_candidates(self):
        base = Policy.deterministic([0, 1, 1], 2)
        candidates = perturbed_candidates(base, 8, seed=3)
        self.assertEqual(len(candidates), 8)
        for candidate in candidates:
            assert_allclose(candidate.probs.sum(axis=1), np.ones(3))
            self.assertTrue(np.all(candidate.probs >= 0))
