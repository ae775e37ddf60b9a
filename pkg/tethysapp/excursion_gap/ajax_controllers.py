import json
import logging
from django.http import JsonResponse
from . import bounds, chain_analysis, experiments
from .config import DEFAULT_EPSILON, DEFAULT_SEED, DEFAULT_T_MAX
from .controllers import get_setting, get_store_session
from .errors import ExcursionGapError, HypothesisError, InvalidInputError
from .mdp_core import induced_chain
from .model import add_analysis_run, add_result_rows, get_result_rows, remove_analysis_run
from .utilities import json_ready, mdp_from_dict, parse_grid, policy_from_dict

log = logging.getLogger(__name__)


def _float(request, key, default):
    value = request.POST.get(key)
    if value in (None, ""):
        return default
    try:
        return float(value)
    except ValueError:
        raise InvalidInputError(key, f"not a number: {value!r}")


def _int(request, key, default):
    value = _float(request, key, default)
    if value != int(value):
        raise InvalidInputError(key, f"expected an integer, got {value}")
    return int(value)


def _document(request, key):
    try:
        return json.loads(request.POST.get(key))
    except (TypeError, json.JSONDecodeError):
        raise InvalidInputError(key, "malformed JSON")


def get_problem(request):
    """
    Reads (mdp, behavior, policy, jacobian) from a request.

    Requests either carry "mdp", "behavior" and "policy" JSON documents or
    describe the two-state MDP with "q", "stay", "layout" and "p".
    """

    if request.POST.get("mdp"):
        mdp = mdp_from_dict(_document(request, "mdp"))
        behavior = policy_from_dict(_document(request, "behavior"))
        policy = policy_from_dict(_document(request, "policy"))
        mdp.check_policy(behavior, "behavior")
        mdp.check_policy(policy)
        return mdp, behavior, policy, None

    config = experiments.TwoStateConfig(
        q=_float(request, "q", 0.9),
        behavior_stay_prob=_float(request, "stay", 0.9),
        behavior_layout=request.POST.get("layout") or experiments.UNIFORM_STAY,
    )
    policy = experiments.two_state_softmax_policy(_float(request, "p", 0.5))

    return experiments.build_two_state_mdp(config), experiments.behavior_policy(config), policy, None


def record(subcommand, seed, request, summary, rows):
    Session = get_store_session()
    run_id = add_analysis_run(Session, subcommand, seed, dict(request.POST.items()), summary)
    add_result_rows(Session, run_id, rows)

    return run_id


def chain_report(request):
    """
    Analyzes the chain induced by a policy.

    Returns the chain report with unreached quantities given as "not reached".
    """

    return_obj = {}

    # -------------------- #
    #   VERIFIES REQUEST   #
    # -------------------- #

    if not (request.is_ajax() and request.method == "POST"):
        return_obj["error"] = "Unable to establish a secure connection with the server."

        return JsonResponse(return_obj)

    # -------------------------- #
    #   GETS DATA FROM REQUEST   #
    # -------------------------- #

    try:
        mdp, _, policy, _ = get_problem(request)
        epsilon = _float(request, "epsilon", get_setting("epsilon_chain", DEFAULT_EPSILON))
        t_max = _int(request, "tMax", get_setting("t_max", DEFAULT_T_MAX))

        report = chain_analysis.chain_report(induced_chain(mdp, policy), mdp.initial_dist, epsilon, t_max)
    except ExcursionGapError as err:
        return_obj["error"] = str(err)

        return JsonResponse(return_obj)

    # -------------------- #
    #   RETURNS RESPONSE   #
    # -------------------- #

    return_obj["report"] = json_ready(report.to_dict())
    return_obj["success"] = True

    return JsonResponse(return_obj)


def gap_sweep(request):
    """
    Runs a value gap sweep and records it in the results store.
    """

    return_obj = {}

    # -------------------- #
    #   VERIFIES REQUEST   #
    # -------------------- #

    if not (request.is_ajax() and request.method == "POST"):
        return_obj["error"] = "Unable to establish a secure connection with the server."

        return JsonResponse(return_obj)

    # -------------------------- #
    #   GETS DATA FROM REQUEST   #
    # -------------------------- #

    try:
        mdp, behavior, _, _ = get_problem(request)
        gammas = parse_grid(request.POST.get("gammas") or "0.5,0.7,0.9,0.99")
        n_policies = _int(request, "policies", 25)
        n_repeats = _int(request, "repeats", 1)
        seed = _int(request, "seed", get_setting("default_seed", DEFAULT_SEED))

        sampler = None if request.POST.get("mdp") else experiments.two_state_sampler()
        aggregates = experiments.gap_sweep(mdp, behavior, gammas, n_policies, n_repeats, seed, sampler)
    except ExcursionGapError as err:
        return_obj["error"] = str(err)

        return JsonResponse(return_obj)

    rows = json_ready([aggregate.as_row() for aggregate in aggregates])
    summary = f"gap-sweep: {len(rows)} rows"

    # -------------------- #
    #   RETURNS RESPONSE   #
    # -------------------- #

    return_obj["runId"] = record("gap-sweep", seed, request, summary, rows)
    return_obj["rows"] = rows
    return_obj["success"] = True

    return JsonResponse(return_obj)


def bounds_check(request):
    """
    Checks the gradient gap against both bounds for each discount factor.

    The mixing bound is refused when the induced chain is reducible or periodic.
    """

    return_obj = {}

    # -------------------- #
    #   VERIFIES REQUEST   #
    # -------------------- #

    if not (request.is_ajax() and request.method == "POST"):
        return_obj["error"] = "Unable to establish a secure connection with the server."

        return JsonResponse(return_obj)

    # -------------------------- #
    #   GETS DATA FROM REQUEST   #
    # -------------------------- #

    try:
        mdp, behavior, policy, jacobian = get_problem(request)
        gammas = parse_grid(request.POST.get("gammas") or "0.5,0.9,0.99")
        norm = request.POST.get("norm") or 2
        epsilon = _float(request, "epsilon", get_setting("epsilon_chain", DEFAULT_EPSILON))
        t_max = _int(request, "tMax", get_setting("t_max", DEFAULT_T_MAX))

        P = induced_chain(mdp, policy)
        if not chain_analysis.is_irreducible(P) or not chain_analysis.is_aperiodic(P)[0]:
            raise HypothesisError("the induced chain must be irreducible and aperiodic")
        reports = [
            bounds.bound_check(mdp, policy, behavior, gamma, norm, epsilon, t_max, jacobian=jacobian)
            for gamma in gammas
        ]
    except ExcursionGapError as err:
        return_obj["error"] = str(err)

        return JsonResponse(return_obj)

    rows = json_ready([report.as_row() for report in reports])
    violations = sum(not row["satisfied3"] or row["satisfied4"] is False for row in rows)
    summary = f"bounds-check: {len(rows)} rows, {violations} violations"

    # -------------------- #
    #   RETURNS RESPONSE   #
    # -------------------- #

    return_obj["runId"] = record("bounds-check", DEFAULT_SEED, request, summary, rows)
    return_obj["rows"] = rows
    return_obj["success"] = True

    return JsonResponse(return_obj)


def get_run_rows(request):
    """
    Gets the stored rows of one run.
    """

    return_obj = {}

    # -------------------- #
    #   VERIFIES REQUEST   #
    # -------------------- #

    if not (request.is_ajax() and request.method == "POST"):
        return_obj["error"] = "Unable to establish a secure connection with the server."

        return JsonResponse(return_obj)

    # -------------------------- #
    #   GETS DATA FROM REQUEST   #
    # -------------------------- #

    run_id = request.POST.get("runId")

    # -------------------- #
    #   RETURNS RESPONSE   #
    # -------------------- #

    return_obj["rows"] = get_result_rows(get_store_session(), run_id)
    return_obj["success"] = True

    return JsonResponse(return_obj)


def remove_run(request):
    """
    Removes a run and its rows from the results store.
    """

    return_obj = {}

    # -------------------- #
    #   VERIFIES REQUEST   #
    # -------------------- #

    if not (request.is_ajax() and request.method == "POST"):
        return_obj["error"] = "Unable to establish a secure connection with the server."

        return JsonResponse(return_obj)

    # -------------------------- #
    #   GETS DATA FROM REQUEST   #
    # -------------------------- #

    run_id = request.POST.get("runId")

    # ----------------- #
    #   REMOVES RUN     #
    # ----------------- #

    removed = remove_analysis_run(get_store_session(), run_id)
    log.info("removed %d run(s) with id %s", removed, run_id)

    # -------------------- #
    #   RETURNS RESPONSE   #
    # -------------------- #

    return_obj["removed"] = removed
    return_obj["success"] = removed > 0

    return JsonResponse(return_obj)
