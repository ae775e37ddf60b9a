"""
Command line entry point: excursion-gap <subcommand> [options].

Exit status is 0 on success, 1 for invalid input (bad flags, malformed JSON,
simplex violations) and 2 when an analysis refuses to run because its
hypotheses are unmet, for example the mixing bound on a reducible chain.

CSV schemas
  gap-sweep      gamma, mean_gap, ci_lo, ci_hi, n_policies, seed
  grad-sweep     gamma, grad_gap_p, norm_on, norm_off, policy_id, seed, grad_gap_scaled
  bounds-check   gamma, lhs, rhs_thm3, rhs_thm4, t_epsilon, d_tv, C,
                 satisfied3, satisfied4, tighter4, slack
                 (rhs_thm3 is the occupancy bound, rhs_thm4 the mixing bound)
  policy-select  gamma, tau_mean, tau_ci_lo, tau_ci_hi, tau_full, p_value, n_policies, subset_size
  sarsa-eval     seed, gamma, alpha, n_updates, max_error, tolerance, within_tolerance, j_on, j_off
  chain-report   JSON report; --profile adds a CSV of t, delta
Floats are written with 17 significant digits.
"""
import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import bounds, chain_analysis, experiments
from .config import (
    DEFAULT_EPSILON, DEFAULT_NORM, DEFAULT_SEED, DEFAULT_T_MAX, get_output_directory, get_store_url
)
from .errors import ExcursionGapError, HypothesisError, InvalidInputError
from .mdp_core import Policy, induced_chain
from .model import add_analysis_run, add_result_rows, get_store_sessionmaker
from .objectives import DISCOUNTED, VISITATION_MODES
from .utilities import (
    json_ready, load_json, load_mdp, load_policy, mdp_to_dict, parse_assignments, parse_grid,
    policy_from_dict, save_json, write_csv
)

log = logging.getLogger(__name__)

SARSA_COLUMNS = (
    "seed", "gamma", "alpha", "n_updates", "max_error", "tolerance", "within_tolerance", "j_on", "j_off",
)
PROFILE_COLUMNS = ("t", "delta")


class ArgumentParser(argparse.ArgumentParser):
    """
    Reports bad flags as input errors so they map to exit status 1.
    """

    def error(self, message):
        raise InvalidInputError("arguments", message)


@dataclass
class Output:
    path: str
    summary: str
    rows: List[dict] = field(default_factory=list)


def configure_logging(verbose):
    package_log = logging.getLogger(__name__.rpartition(".")[0])
    package_log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not package_log.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        package_log.addHandler(handler)


def output_path(args, default_name):
    return args.output or os.path.join(get_output_directory(), default_name)


# --------------------- #
#   INPUT RESOLUTION    #
# --------------------- #

def two_state_config(args):
    values = parse_assignments(args.two_state, "two_state")
    unknown = set(values) - {"q", "stay"}
    if unknown:
        raise InvalidInputError("two_state", f"unknown keys {sorted(unknown)}, expected q and stay")
    if "q" not in values:
        raise InvalidInputError("two_state", "q is required")

    return experiments.TwoStateConfig(values["q"], values.get("stay", 0.9), args.behavior_layout)


def require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InvalidInputError(name, f"--{name.replace('_', '-')} is required without --two-state")


def mdp_and_behavior(args):
    """
    Returns (mdp, behavior, sampler) from --two-state or from --mdp / --behavior files.
    """

    if args.two_state:
        config = two_state_config(args)
        sampler = experiments.two_state_sampler(args.parametrization)
        return experiments.build_two_state_mdp(config), experiments.behavior_policy(config), sampler

    require(args, "mdp", "behavior")
    mdp = load_mdp(args.mdp)
    behavior = load_policy(args.behavior)
    mdp.check_policy(behavior, "behavior")

    return mdp, behavior, experiments.softmax_sampler(mdp.n_states, mdp.n_actions)


def target_policy(args, mdp):
    """
    Returns (policy, jacobian) from --p on the two-state MDP or from --policy.
    """

    if args.two_state:
        if args.parametrization == "direct":
            return experiments.two_state_policy(args.p), experiments.two_state_jacobian()
        return experiments.two_state_softmax_policy(args.p), None

    if args.policy is None:
        return Policy.uniform(mdp.n_states, mdp.n_actions), None
    policy = load_policy(args.policy)
    mdp.check_policy(policy)

    return policy, None


# -------------- #
#   SUBCOMMANDS  #
# -------------- #

def chain_report_command(args):
    if args.two_state:
        config = two_state_config(args)
        mdp = experiments.build_two_state_mdp(config)
    else:
        require(args, "mdp")
        mdp = load_mdp(args.mdp)
    policy, _ = target_policy(args, mdp)

    P = induced_chain(mdp, policy)
    report = chain_analysis.chain_report(P, mdp.initial_dist, args.epsilon, args.t_max)
    path = save_json(json_ready(report.to_dict()), output_path(args, "chain_report.json"))

    if args.profile:
        deltas = chain_analysis.mixing_profile(P, mdp.initial_dist, args.profile_steps)
        write_csv(args.profile, PROFILE_COLUMNS, [{"t": t, "delta": delta} for t, delta in enumerate(deltas)])

    t_epsilon = report.t_epsilon if report.t_epsilon is not None else chain_analysis.NOT_REACHED
    summary = (
        f"chain-report: irreducible={report.irreducible} aperiodic={report.aperiodic} "
        f"period={report.period} t_epsilon={t_epsilon} -> {path}"
    )

    return Output(path, summary, [report.to_dict()])


def gap_sweep_command(args):
    mdp, behavior, sampler = mdp_and_behavior(args)
    aggregates = experiments.gap_sweep(
        mdp, behavior, parse_grid(args.gammas), args.policies, args.repeats, args.seed, sampler, args.d_b_mode
    )
    rows = [aggregate.as_row() for aggregate in aggregates]
    path = write_csv(output_path(args, "gap_sweep.csv"), experiments.SWEEP_COLUMNS, rows)

    return Output(path, f"gap-sweep: {len(rows)} rows, final mean gap {rows[-1]['mean_gap']:.6g} -> {path}", rows)


def grad_sweep_command(args):
    mdp, behavior, sampler = mdp_and_behavior(args)
    records = experiments.gradient_gap_rows(
        mdp, behavior, parse_grid(args.gammas), args.policies, args.repeats, args.seed, sampler,
        args.norm, args.d_b_mode
    )
    rows = [record.as_row() for record in records]
    path = write_csv(output_path(args, "grad_sweep.csv"), experiments.GRADIENT_COLUMNS, rows)

    return Output(path, f"grad-sweep: {len(rows)} rows -> {path}", rows)


def bounds_check_command(args):
    if args.two_state:
        mdp, behavior, _ = mdp_and_behavior(args)
    else:
        require(args, "mdp", "behavior")
        mdp = load_mdp(args.mdp)
        behavior = load_policy(args.behavior)
    policy, jacobian = target_policy(args, mdp)

    P = induced_chain(mdp, policy)
    if not chain_analysis.is_irreducible(P):
        raise HypothesisError("mixing bound hypotheses unmet: the induced chain is not irreducible")
    aperiodic, period = chain_analysis.is_aperiodic(P)
    if not aperiodic:
        raise HypothesisError(f"mixing bound hypotheses unmet: the induced chain has period {period}")

    if args.a_low is not None or args.a_high is not None or args.action_dim is not None:
        volume = bounds.action_volume(a_low=args.a_low, a_high=args.a_high, dim=args.action_dim)
    else:
        volume = bounds.action_volume(mdp.n_actions)

    reports = [
        bounds.bound_check(mdp, policy, behavior, gamma, args.norm, args.epsilon, args.t_max,
                           args.d_b_mode, volume, jacobian)
        for gamma in parse_grid(args.gammas)
    ]
    rows = [report.as_row() for report in reports]
    path = write_csv(output_path(args, "bounds_check.csv"), bounds.BOUND_COLUMNS, rows)
    violations = sum(not report.satisfied_occupancy or report.satisfied_mixing is False for report in reports)

    return Output(path, f"bounds-check: {len(rows)} rows, {violations} violations -> {path}", rows)


def policy_candidates(args):
    if args.mdp is None:
        return (
            experiments.two_region_mdp(),
            experiments.two_region_behavior(),
            experiments.two_region_candidates(args.candidates),
        )

    require(args, "behavior")
    mdp = load_mdp(args.mdp)
    behavior = load_policy(args.behavior)
    if args.policies:
        document = load_json(args.policies)
        documents = document.get("policies") if isinstance(document, dict) else document
        if not isinstance(documents, list):
            raise InvalidInputError("policies", "expected a list of policy documents")
        policies = [policy_from_dict(item) for item in documents]
    else:
        require(args, "policy")
        policies = experiments.perturbed_candidates(load_policy(args.policy), args.candidates, args.seed)
    for policy in policies:
        mdp.check_policy(policy, "policies")

    return mdp, behavior, policies


def policy_select_command(args):
    mdp, behavior, policies = policy_candidates(args)
    subset_size = args.subset_size or min(15, len(policies))
    reports = experiments.offline_policy_selection(
        mdp, behavior, policies, parse_grid(args.gammas), subset_size, args.resamples, args.seed, args.d_b_mode
    )
    rows = [report.as_row() for report in reports]
    path = write_csv(output_path(args, "policy_select.csv"), experiments.RANKING_COLUMNS, rows)
    last = reports[-1]

    return Output(
        path,
        f"policy-select: {len(rows)} rows, tau={last.tau_full:.4f} at gamma={last.gamma:g}, "
        f"top-1 agreement={last.top1_agreement} -> {path}",
        rows,
    )


def sarsa_eval_command(args):
    mdp, behavior, _ = mdp_and_behavior(args)
    if args.two_state:
        policy = experiments.two_state_policy(args.p)
    else:
        policy, _ = target_policy(args, mdp)

    tolerance = args.tolerance / (1.0 - args.gamma)
    rows = []
    for seed in range(args.seed, args.seed + args.seeds):
        result = experiments.expected_sarsa(mdp, behavior, policy, args.gamma, args.alpha, args.updates, seed)
        rows.append({
            "seed": seed,
            "gamma": args.gamma,
            "alpha": args.alpha,
            "n_updates": args.updates,
            "max_error": result.max_error,
            "tolerance": tolerance,
            "within_tolerance": result.max_error <= tolerance,
            "j_on": result.j_on,
            "j_off": result.j_off,
        })
    path = write_csv(output_path(args, "sarsa_eval.csv"), SARSA_COLUMNS, rows)
    share = np.mean([row["within_tolerance"] for row in rows])

    return Output(path, f"sarsa-eval: {len(rows)} seeds, {share:.0%} within {tolerance:.4g} -> {path}", rows)


def make_mdp_command(args):
    if args.two_state:
        mdp = experiments.build_two_state_mdp(two_state_config(args))
    else:
        mdp = experiments.random_mdp(args.states, args.actions, args.structure, args.seed, args.density)
    path = save_json(mdp_to_dict(mdp), output_path(args, "mdp.json"))

    return Output(path, f"make-mdp: {mdp.n_states} states, {mdp.n_actions} actions -> {path}")


# ------------ #
#   PARSING    #
# ------------ #

def _common(parser):
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed")
    parser.add_argument("--output", help="output path (default: $EXCURSION_GAP_OUTPUT_DIR or the working directory)")
    parser.add_argument("--store", default=get_store_url(),
                        help="SQLAlchemy URL recording the run (default: $EXCURSION_GAP_STORE)")
    parser.add_argument("--verbose", action="store_true", help="log debug output")


def _sources(parser, behavior=True):
    parser.add_argument("--two-state", help='two-state MDP, e.g. "q=0.9" or "q=0.9,stay=0.9"')
    parser.add_argument("--behavior-layout", choices=experiments.BEHAVIOR_LAYOUTS, default=experiments.UNIFORM_STAY)
    parser.add_argument("--parametrization", choices=("softmax", "direct"), default="softmax",
                        help="two-state policy parametrization")
    parser.add_argument("--mdp", help="MDP JSON file")
    if behavior:
        parser.add_argument("--behavior", help="behavior policy JSON file")
    parser.add_argument("--d-b-mode", choices=VISITATION_MODES, default=DISCOUNTED)


def _chain(parser):
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="chain tolerance")
    parser.add_argument("--t-max", type=int, default=DEFAULT_T_MAX, help="iteration cap for chain analysis")


def build_parser():
    parser = ArgumentParser(
        prog="excursion-gap",
        description="Exact analysis of the gap between on-policy and excursion objectives.",
        epilog=__doc__.split("\n\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    subparsers.required = True

    chain = subparsers.add_parser("chain-report", help="structure and mixing of an induced chain")
    _common(chain)
    _sources(chain, behavior=False)
    _chain(chain)
    chain.add_argument("--policy", help="policy JSON file (default: uniform)")
    chain.add_argument("--p", type=float, default=0.5, help="two-state policy parameter")
    chain.add_argument("--profile", help="CSV path for ||P^(t+1) mu - P^t mu||_1 per t")
    chain.add_argument("--profile-steps", type=int, default=200)
    chain.set_defaults(handler=chain_report_command)

    for name, handler, help_text in (
        ("gap-sweep", gap_sweep_command, "value gap across discount factors"),
        ("grad-sweep", grad_sweep_command, "gradient gap across discount factors"),
    ):
        sweep = subparsers.add_parser(name, help=help_text)
        _common(sweep)
        _sources(sweep)
        sweep.add_argument("--gammas", default="0.5,0.7,0.9,0.99,0.999", help='list or "linspace:a:b:n"')
        sweep.add_argument("--policies", type=int, default=25)
        sweep.add_argument("--repeats", type=int, default=1)
        if name == "grad-sweep":
            sweep.add_argument("--norm", default=DEFAULT_NORM, help="1, 2 or inf")
        sweep.set_defaults(handler=handler)

    check = subparsers.add_parser("bounds-check", help="gradient gap against the occupancy and mixing bounds")
    _common(check)
    _sources(check)
    _chain(check)
    check.add_argument("--policy", help="policy JSON file (default: uniform softmax)")
    check.add_argument("--p", type=float, default=0.5, help="two-state policy parameter")
    check.add_argument("--gammas", default="0.5,0.9,0.99")
    check.add_argument("--norm", default=DEFAULT_NORM)
    check.add_argument("--a-low", type=float, help="continuous action box lower end")
    check.add_argument("--a-high", type=float, help="continuous action box upper end")
    check.add_argument("--action-dim", type=int, help="continuous action dimension")
    check.set_defaults(handler=bounds_check_command)

    select = subparsers.add_parser("policy-select", help="rank candidates by the excursion objective")
    _common(select)
    select.add_argument("--mdp", help="MDP JSON file (default: the two-region instance)")
    select.add_argument("--behavior", help="behavior policy JSON file")
    select.add_argument("--policies", help="JSON list of candidate policies")
    select.add_argument("--policy", help="base policy perturbed into candidates when --policies is absent")
    select.add_argument("--candidates", type=int, default=20)
    select.add_argument("--gammas", default="0.5,0.9,0.99,0.999")
    select.add_argument("--subset-size", type=int)
    select.add_argument("--resamples", type=int, default=30)
    select.add_argument("--d-b-mode", choices=VISITATION_MODES, default=DISCOUNTED)
    select.set_defaults(handler=policy_select_command)

    sarsa = subparsers.add_parser("sarsa-eval", help="Expected SARSA against the exact action values")
    _common(sarsa)
    _sources(sarsa)
    sarsa.add_argument("--policy", help="target policy JSON file")
    sarsa.add_argument("--p", type=float, default=0.5, help="two-state target policy parameter")
    sarsa.add_argument("--gamma", type=float, default=0.9)
    sarsa.add_argument("--alpha", type=float, default=0.5)
    sarsa.add_argument("--updates", type=int, default=100000)
    sarsa.add_argument("--seeds", type=int, default=20)
    sarsa.add_argument("--tolerance", type=float, default=0.05, help="error tolerance in units of 1/(1-gamma)")
    sarsa.set_defaults(handler=sarsa_eval_command)

    make = subparsers.add_parser("make-mdp", help="write a random or two-state MDP as JSON")
    _common(make)
    make.add_argument("--two-state", help='two-state MDP, e.g. "q=0.9"')
    make.add_argument("--behavior-layout", choices=experiments.BEHAVIOR_LAYOUTS, default=experiments.UNIFORM_STAY)
    make.add_argument("--states", type=int, default=5)
    make.add_argument("--actions", type=int, default=3)
    make.add_argument("--structure", choices=(experiments.DENSE, experiments.SPARSE), default=experiments.DENSE)
    make.add_argument("--density", type=float, default=0.5)
    make.set_defaults(handler=make_mdp_command)

    return parser


def record_run(args, output):
    Session = get_store_sessionmaker(args.store)
    config = {key: value for key, value in vars(args).items() if key not in ("handler", "store")}
    run_id = add_analysis_run(Session, args.subcommand, args.seed, config, output.summary)
    add_result_rows(Session, run_id, output.rows)

    return run_id


def run(argv=None):
    """
    Runs one subcommand and returns the exit status.
    """

    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        output = args.handler(args)
        if args.store:
            log.info("recorded run %s", record_run(args, output))
    except SystemExit as exit_request:
        # --help
        return exit_request.code or 0
    except HypothesisError as err:
        print(f"refused: {err}", file=sys.stderr)
        return 2
    except (InvalidInputError, ExcursionGapError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err.filename}: {err.strerror}", file=sys.stderr)
        return 1

    print(output.summary)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
