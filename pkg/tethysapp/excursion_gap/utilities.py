import csv
import io
import json
import logging
import math

import numpy as np

from .config import CSV_FLOAT_FORMAT, LOAD_TOLERANCE
from .errors import InvalidInputError
from .mdp_core import DIRECT, POLICY_KINDS, SOFTMAX, Mdp, Policy, check_gamma

log = logging.getLogger(__name__)


# ----------------------- #
#   MDP AND POLICY FILES  #
# ----------------------- #

def _array(document, key, ndim):
    if key not in document:
        raise InvalidInputError(key, "missing field")
    try:
        array = np.array(document[key], dtype=float)
    except (TypeError, ValueError):
        raise InvalidInputError(key, "expected a rectangular array of numbers")
    if array.ndim != ndim:
        raise InvalidInputError(key, f"expected a {ndim}-dimensional array, got {array.ndim} dimensions")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(key, "entries must be finite")

    return array


def _renormalized(array, key, axis):
    """
    Checks that probabilities sum to one within the load tolerance, then divides
    by the sums so the stored values sum to one exactly.
    """

    if array.min() < -LOAD_TOLERANCE:
        raise InvalidInputError(key, "probabilities must be nonnegative")
    array = np.clip(array, 0.0, None)
    sums = array.sum(axis=axis, keepdims=True)
    worst = float(np.max(np.abs(sums - 1.0)))
    if worst > LOAD_TOLERANCE:
        raise InvalidInputError(key, f"probabilities must sum to 1 (worst deviation {worst:.3g})")

    return array / sums


def mdp_from_dict(document):
    """
    Builds an Mdp from its JSON document.

    The document holds n_states, n_actions, transition [s][a][s'], reward [s][a]
    and initial_dist.
    """

    if not isinstance(document, dict):
        raise InvalidInputError("mdp", "expected a JSON object")
    transition = _array(document, "transition", 3)
    reward = _array(document, "reward", 2)
    initial = _array(document, "initial_dist", 1)

    for key, expected in (("n_states", transition.shape[0]), ("n_actions", transition.shape[1])):
        if key in document and int(document[key]) != expected:
            raise InvalidInputError(key, f"declared {document[key]} but the transition array implies {expected}")

    return Mdp(
        _renormalized(transition, "transition", 2),
        reward,
        _renormalized(initial, "initial_dist", 0),
    )


def mdp_to_dict(mdp):
    return {
        "n_states": mdp.n_states,
        "n_actions": mdp.n_actions,
        "transition": mdp.transition.tolist(),
        "reward": mdp.reward.tolist(),
        "initial_dist": mdp.initial_dist.tolist(),
    }


def policy_from_dict(document):
    """
    Builds a Policy from {"kind": "direct", "table": ...} or {"kind": "softmax", "logits": ...}.
    """

    if not isinstance(document, dict):
        raise InvalidInputError("policy", "expected a JSON object")
    kind = document.get("kind", DIRECT)
    if kind not in POLICY_KINDS:
        raise InvalidInputError("kind", f"expected one of {POLICY_KINDS}, got {kind!r}")

    if kind == SOFTMAX:
        key = "logits" if "logits" in document else "table"
        return Policy.softmax(_array(document, key, 2))

    return Policy.direct(_renormalized(_array(document, "table", 2), "table", 1))


def policy_to_dict(policy):
    if policy.is_softmax:
        return {"kind": SOFTMAX, "logits": policy.table.tolist()}
    return {"kind": DIRECT, "table": policy.table.tolist()}


def load_json(path):
    """
    Reads a JSON document, reporting unreadable or malformed files as input errors.
    """

    try:
        with open(path, "r") as json_file:
            return json.load(json_file)
    except OSError as err:
        raise InvalidInputError(str(path), f"cannot read file ({err.strerror})")
    except json.JSONDecodeError as err:
        raise InvalidInputError(str(path), f"malformed JSON at line {err.lineno} column {err.colno}")


def save_json(document, path):
    with open(path, "w") as json_file:
        json.dump(document, json_file, sort_keys=True, indent=4, separators=(",", ": "))

    return path


def load_mdp(path):
    return mdp_from_dict(load_json(path))


def load_policy(path):
    return policy_from_dict(load_json(path))


# ------------------ #
#   CSV AND GRIDS    #
# ------------------ #

def format_value(value):
    """
    Formats one CSV cell: round-trippable floats, lowercase booleans and empty
    cells for missing values.
    """

    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return CSV_FLOAT_FORMAT % float(value)
    return str(value)


def csv_text(columns, rows):
    """
    Renders rows (mappings keyed by column) as CSV text with a header line.
    """

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[column]) for column in columns])

    return buffer.getvalue()


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as csv_file:
        csv_file.write(csv_text(columns, rows))

    return path


def read_csv(path):
    """
    Reads a CSV written by write_csv back as (header, list of row dicts of strings).
    """

    with open(path, "r", newline="") as csv_file:
        reader = csv.DictReader(csv_file)
        rows = list(reader)

    return reader.fieldnames, rows


def parse_grid(text):
    """
    Parses a discount grid, either "linspace:a:b:n" or a comma separated list.

    Every value must be a valid discount factor in [0, 1).
    """

    text = str(text).strip()
    try:
        if text.startswith("linspace:"):
            _, start, stop, count = text.split(":")
            count = int(count)
            if count < 1:
                raise InvalidInputError("gammas", "linspace needs at least one point")
            values = np.linspace(float(start), float(stop), count).tolist()
        else:
            values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise InvalidInputError("gammas", f"cannot parse grid {text!r}")
    if not values:
        raise InvalidInputError("gammas", "the discount grid is empty")

    return [check_gamma(value) for value in values]


def parse_assignments(text, field):
    """
    Parses "key=value,key=value" into a dict of floats.
    """

    values = {}
    for item in str(text).split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidInputError(field, f"expected key=value, got {item!r}")
        try:
            values[key.strip()] = float(value)
        except ValueError:
            raise InvalidInputError(field, f"not a number: {value!r}")

    return values


def json_ready(value):
    """
    Converts numpy values and non-finite floats into plain JSON values.
    """

    if isinstance(value, dict):
        return {key: json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(item) for item in value]
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None

    return value
