import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from ..errors import InvalidInputError, SolverError
from ..experiments import random_mdp
from ..mdp_core import (
    Mdp, Policy, StochasticMatrix, action_value, check_distribution, check_gamma, induced_chain,
    monte_carlo_value, required_horizon, rollout, solve_dense, value_function
)


class MdpModelTestCase(unittest.TestCase):
    """
    Validation of MDPs, policies and stochastic matrices.
    """

    def test_rejects_gamma_outside_unit_interval(self):
        for gamma in (1.0, -0.1, "abc"):
            with self.assertRaises(InvalidInputError) as context:
                check_gamma(gamma)
            self.assertEqual(context.exception.field, "gamma")
        self.assertEqual(check_gamma(0), 0.0)

    def test_rejects_rewards_outside_unit_interval(self):
        with self.assertRaises(InvalidInputError) as context:
            Mdp([[[1.0]]], [[1.5]], [1.0])
        self.assertEqual(context.exception.field, "reward")

    def test_rejects_rows_that_do_not_sum_to_one(self):
        with self.assertRaises(InvalidInputError) as context:
            Mdp([[[0.5, 0.4]], [[0.0, 1.0]]], [[0.0], [1.0]], [0.5, 0.5])
        self.assertEqual(context.exception.field, "transition")

    def test_rejects_bad_initial_distribution(self):
        with self.assertRaises(InvalidInputError) as context:
            Mdp([[[1.0, 0.0]], [[0.0, 1.0]]], [[0.0], [1.0]], [0.7, 0.7])
        self.assertEqual(context.exception.field, "initial_dist")

    def test_arrays_are_read_only(self):
        mdp = random_mdp(3, 2, seed=0)
        with self.assertRaises(ValueError):
            mdp.transition[0, 0, 0] = 1.0

    def test_policy_shape_must_match(self):
        mdp = random_mdp(3, 2, seed=0)
        with self.assertRaises(InvalidInputError):
            induced_chain(mdp, Policy.uniform(3, 3))

    def test_softmax_policy_probabilities(self):
        policy = Policy.softmax([[0.0, np.log(3.0)], [0.0, 0.0]])
        assert_allclose(policy.probs, [[0.25, 0.75], [0.5, 0.5]])
        self.assertTrue(policy.is_softmax)

    def test_with_parameters_keeps_kind_and_order(self):
        policy = Policy.softmax(np.arange(6.0).reshape(2, 3))
        assert_array_equal(policy.parameters, np.arange(6.0))
        moved = policy.with_parameters(policy.parameters + 1.0)
        self.assertTrue(moved.is_softmax)
        assert_allclose(moved.probs, policy.probs)

        with self.assertRaises(InvalidInputError):
            policy.with_parameters(np.zeros(5))

    def test_deterministic_policy(self):
        policy = Policy.deterministic([1, 0, 2], 3)
        assert_array_equal(policy.probs, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])

    def test_direct_policy_rows_must_sum_to_one(self):
        with self.assertRaises(InvalidInputError):
            Policy.direct([[0.5, 0.6]])

    def test_stochastic_matrix_is_column_stochastic(self):
        StochasticMatrix([[0.9, 0.2], [0.1, 0.8]])
        with self.assertRaises(InvalidInputError):
            StochasticMatrix([[0.9, 0.1], [0.2, 0.8]])

    def test_check_distribution(self):
        assert_allclose(check_distribution([0.25, 0.75]), [0.25, 0.75])
        with self.assertRaises(InvalidInputError):
            check_distribution([1.5, -0.5])
        with self.assertRaises(InvalidInputError):
            check_distribution([0.5, 0.5], n_states=3)


class EvaluationTestCase(unittest.TestCase):
    """
    Exact evaluation against closed forms and independent oracles.
    """

    def setUp(self):
        self.mdp = random_mdp(5, 3, seed=11)
        self.policy = Policy.softmax(np.random.default_rng(11).normal(size=(5, 3)))

    def test_induced_chain_matches_brute_force(self):
        mdp = random_mdp(4, 3, seed=1)
        P = induced_chain(mdp, Policy.uniform(4, 3)).matrix

        expected = np.zeros((4, 4))
        for s in range(4):
            for s_next in range(4):
                expected[s_next, s] = sum(mdp.transition[s, a, s_next] for a in range(3)) / 3
        assert_allclose(P, expected, atol=1e-15)
        assert_allclose(P.sum(axis=0), np.ones(4))

    def test_single_state_value(self):
        mdp = Mdp([[[1.0]]], [[0.5]], [1.0])
        assert_allclose(value_function(mdp, Policy.uniform(1, 1), 0.9), [5.0])

    def test_value_function_satisfies_bellman_equation(self):
        gamma = 0.95
        V = value_function(self.mdp, self.policy, gamma)
        P = induced_chain(self.mdp, self.policy).matrix
        assert_allclose(V, self.mdp.reward_policy(self.policy) + gamma * P.T @ V, atol=1e-12)

    def test_zero_discount_value_is_expected_reward(self):
        assert_allclose(value_function(self.mdp, self.policy, 0.0), self.mdp.reward_policy(self.policy))

    def test_action_value_averages_to_value(self):
        Q = action_value(self.mdp, self.policy, 0.9)
        V = value_function(self.mdp, self.policy, 0.9)
        assert_allclose(np.einsum("sa,sa->s", self.policy.probs, Q), V, atol=1e-12)

    def test_solver_reports_singular_systems(self):
        with self.assertRaises(SolverError):
            solve_dense(np.zeros((2, 2)), np.ones(2), "test system")

    def test_rollout_is_a_function_of_the_seed(self):
        first = rollout(self.mdp, self.policy, 50, seed=3)
        second = rollout(self.mdp, self.policy, 50, seed=3)
        self.assertEqual(len(first), 50)
        assert_array_equal(first.states, second.states)
        assert_array_equal(first.actions, second.actions)

        forced = rollout(self.mdp, self.policy, 5, seed=3, start_state=4)
        self.assertEqual(forced.states[0], 4)

    def test_monte_carlo_value_agrees_with_exact_value(self):
        gamma = 0.9
        horizon = required_horizon(gamma, 1e-6)
        estimate = monte_carlo_value(self.mdp, self.policy, gamma, 4000, horizon, seed=5)
        exact = value_function(self.mdp, self.policy, gamma)

        tolerance = 4 * estimate.stderr + estimate.truncation_bias
        self.assertTrue(np.all(np.abs(estimate.mean - exact) <= tolerance))

    def test_required_horizon(self):
        self.assertEqual(required_horizon(0.5, 1e-3), 11)
        self.assertEqual(required_horizon(0.0, 1e-3), 1)
        with self.assertRaises(InvalidInputError):
            required_horizon(0.5, 0.0)
