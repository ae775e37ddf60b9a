"""
Exact policy gradients of the normalized on-policy and excursion objectives.

Gradients are taken with respect to the flat parameter vector of the policy,
the table in [s][a] order. Every gradient accepts an explicit PolicyJacobian so
parametrizations other than the policy's own table can be used.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .chain_analysis import discounted_visitation
from .config import DEFAULT_FD_STEP, DEFAULT_NORM
from .errors import InvalidInputError
from .mdp_core import action_value, check_gamma, induced_chain, solve_dense
from .objectives import DISCOUNTED, behavioral_visitation, objective

log = logging.getLogger(__name__)

NORM_ORDERS = {"1": 1, "2": 2, "inf": np.inf}


@dataclass(frozen=True, eq=False)
class PolicyJacobian:
    """
    Derivatives of the policy table, tensor[s, a, k] = d pi(a|s) / d theta_k.
    """

    tensor: np.ndarray

    def __post_init__(self):
        tensor = np.array(self.tensor, dtype=float)
        if tensor.ndim != 3:
            raise InvalidInputError("jacobian", "expected an array shaped [s][a][parameter]")
        tensor.setflags(write=False)
        object.__setattr__(self, "tensor", tensor)

    @property
    def n_parameters(self):
        return self.tensor.shape[2]


@dataclass(frozen=True, eq=False)
class EmphaticWeights:
    """
    Emphatic weighting m = (I - gamma P_pi)^-1 (d_b * interest).
    """

    weights: np.ndarray
    interest: np.ndarray
    gamma: float


def check_norm(p):
    """
    Normalizes a norm order given as 1, 2, inf or their string forms.
    """

    key = str(p).strip().lower()
    if key in ("infinity", "max") or p == np.inf:
        key = "inf"
    key = key[:-2] if key.endswith(".0") else key
    if key not in NORM_ORDERS:
        raise InvalidInputError("p", f"norm order must be 1, 2 or inf, got {p!r}")

    return NORM_ORDERS[key]


def policy_jacobian(policy):
    """
    Analytic Jacobian of the policy table with respect to its own parameters.

    Softmax: d pi(a|s) / d theta[s, b] = pi(a|s) (1{a = b} - pi(b|s)).
    Direct table: the identity, one parameter per entry.
    Entries across different states are always zero.
    """

    n_states, n_actions = policy.probs.shape
    tensor = np.zeros((n_states, n_actions, n_states * n_actions))
    eye = np.eye(n_actions)
    for s in range(n_states):
        block = slice(s * n_actions, (s + 1) * n_actions)
        if policy.is_softmax:
            row = policy.probs[s]
            tensor[s, :, block] = row[:, None] * (eye - row[None, :])
        else:
            tensor[s, :, block] = eye

    return PolicyJacobian(tensor)


def _resolve_jacobian(mdp, policy, jacobian):
    mdp.check_policy(policy)
    if jacobian is None:
        return policy_jacobian(policy)
    if jacobian.tensor.shape[:2] != policy.probs.shape:
        raise InvalidInputError("jacobian", f"leading shape {jacobian.tensor.shape[:2]} does not match the policy")
    return jacobian


def _as_weights(d, n_states):
    weights = np.asarray(getattr(d, "distribution", getattr(d, "weights", d)), dtype=float)
    if weights.shape != (n_states,):
        raise InvalidInputError("d", f"expected {n_states} state weights, got shape {weights.shape}")
    if not np.all(np.isfinite(weights)) or weights.min() < 0:
        raise InvalidInputError("d", "state weights must be finite and nonnegative")
    return weights


def weighted_gradient(mdp, policy, weights, gamma, jacobian=None):
    """
    sum_s w(s) sum_a Q_pi(s, a) d pi(a|s) / d theta for a state weighting w.
    """

    jacobian = _resolve_jacobian(mdp, policy, jacobian)
    weights = _as_weights(weights, mdp.n_states)
    Q = action_value(mdp, policy, gamma)

    return np.einsum("s,sa,sak->k", weights, Q, jacobian.tensor)


def on_policy_gradient(mdp, policy, gamma, jacobian=None):
    """
    Gradient of the normalized on-policy objective J_mu.

    The states are weighted by the normalized discounted visitation d_pi of the
    policy from mu.
    """

    gamma = check_gamma(gamma)
    d_pi = discounted_visitation(induced_chain(mdp, policy), mdp.initial_dist, gamma)

    return weighted_gradient(mdp, policy, d_pi, gamma, jacobian)


def emphatic_weights(mdp, policy, d_b, gamma, interest=None):
    gamma = check_gamma(gamma)
    d_b = _as_weights(d_b, mdp.n_states)
    if interest is None:
        interest = np.full(mdp.n_states, 1.0 - gamma)
    interest = np.asarray(interest, dtype=float)
    if interest.shape != (mdp.n_states,) or not np.all(np.isfinite(interest)) or interest.min() < 0:
        raise InvalidInputError("interest", "interest must be a finite nonnegative vector over states")

    P = induced_chain(mdp, policy).matrix
    weights = solve_dense(np.eye(mdp.n_states) - gamma * P, d_b * interest, "emphatic weights")
    weights.setflags(write=False)

    return EmphaticWeights(weights, interest, gamma)


def off_policy_gradient(mdp, policy, d_b, gamma, jacobian=None, interest=None):
    """
    Gradient of the normalized excursion objective (1 - gamma) sum_s d_b(s) V_pi(s).

    d_b is held fixed: it never depends on the policy parameters. The states are
    weighted by the emphatic weights with interest 1 - gamma unless another
    interest is given.
    """

    m = emphatic_weights(mdp, policy, d_b, gamma, interest)

    return weighted_gradient(mdp, policy, m, gamma, jacobian)


def generalized_update(mdp, policy, d, gamma, eta, jacobian=None):
    """
    One step theta' = theta + eta * sum_s d(s) sum_a Q_pi(s, a) d pi(a|s) / d theta.

    d is any nonnegative state weighting: d_pi gives an on-policy ascent step and
    the emphatic weights give an off-policy one. Only softmax policies can take
    arbitrary steps, a direct table would leave the simplex.
    """

    if not policy.is_softmax:
        raise InvalidInputError("policy", "generalized updates need a softmax policy")
    if not eta >= 0:
        raise InvalidInputError("eta", f"step size must be nonnegative, got {eta}")

    step = weighted_gradient(mdp, policy, d, gamma, jacobian)

    return policy.with_parameters(policy.parameters + eta * step)


def finite_difference_gradient(mdp, policy, nu, gamma, h=DEFAULT_FD_STEP):
    """
    Central differences of objective(mdp, policy, nu, gamma) in each logit.

    Only softmax policies are supported since steps on a direct table leave the
    simplex.
    """

    if not policy.is_softmax:
        raise InvalidInputError("policy", "finite differences need a softmax policy")
    if not h > 0:
        raise InvalidInputError("h", "step must be positive")

    theta0 = policy.parameters
    log.debug("finite difference gradient over %d parameters, h=%g", theta0.size, h)

    grad = np.zeros(theta0.size)
    for j in range(theta0.size):
        theta = np.copy(theta0)

        theta[j] = theta0[j] + h
        f_plus = objective(mdp, policy.with_parameters(theta), nu, gamma)

        theta[j] = theta0[j] - h
        f_minus = objective(mdp, policy.with_parameters(theta), nu, gamma)

        grad[j] = (f_plus - f_minus) / (2 * h)

    return grad


def gradient_pair(mdp, policy, behavior, gamma, mode=DISCOUNTED, jacobian=None):
    """
    Returns (on-policy gradient, off-policy gradient) with d_b from the behavior.
    """

    d_b = behavioral_visitation(mdp, behavior, gamma, mode)

    return (
        on_policy_gradient(mdp, policy, gamma, jacobian),
        off_policy_gradient(mdp, policy, d_b, gamma, jacobian),
    )


def gradient_gap(mdp, policy, behavior, gamma, p=DEFAULT_NORM, scaled=False, mode=DISCOUNTED, jacobian=None):
    """
    p-norm distance between the off-policy and on-policy gradients.

    With scaled=True the distance is multiplied by (1 - gamma), which is the
    quantity the gradient-gap bounds control.
    """

    gamma = check_gamma(gamma)
    order = check_norm(p)
    g_on, g_off = gradient_pair(mdp, policy, behavior, gamma, mode, jacobian)
    distance = float(np.linalg.norm(g_off - g_on, ord=order))

    return (1.0 - gamma) * distance if scaled else distance
