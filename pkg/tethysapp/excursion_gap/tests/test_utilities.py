import math
import os
import shutil
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose

from ..errors import InvalidInputError
from ..mdp_core import Policy
from ..utilities import (
    csv_text, format_value, json_ready, load_json, load_mdp, mdp_from_dict, mdp_to_dict, parse_assignments,
    parse_grid, policy_from_dict, policy_to_dict, read_csv, save_json, write_csv
)


def two_state_document(top_right=0.0):
    return {
        "n_states": 2,
        "n_actions": 1,
        "transition": [[[1.0 + top_right, 0.0]], [[0.5, 0.5]]],
        "reward": [[0.0], [1.0]],
        "initial_dist": [0.5, 0.5],
    }


class DocumentTestCase(unittest.TestCase):

    def setUp(self):
        self.workspace = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.workspace)

    def test_small_simplex_errors_are_renormalized(self):
        mdp = mdp_from_dict(two_state_document(top_right=5e-10))
        assert_allclose(mdp.transition.sum(axis=2), np.ones((2, 1)), atol=1e-15)

    def test_large_simplex_errors_name_the_field(self):
        with self.assertRaises(InvalidInputError) as context:
            mdp_from_dict(two_state_document(top_right=1e-6))
        self.assertEqual(context.exception.field, "transition")

    def test_missing_and_inconsistent_fields(self):
        document = two_state_document()
        del document["reward"]
        with self.assertRaises(InvalidInputError) as context:
            mdp_from_dict(document)
        self.assertEqual(context.exception.field, "reward")

        document = two_state_document()
        document["n_states"] = 3
        with self.assertRaises(InvalidInputError) as context:
            mdp_from_dict(document)
        self.assertEqual(context.exception.field, "n_states")

    def test_policy_documents(self):
        softmax = policy_from_dict({"kind": "softmax", "logits": [[0.0, 0.0]]})
        assert_allclose(softmax.probs, [[0.5, 0.5]])
        direct = policy_from_dict({"table": [[0.25, 0.75]]})
        self.assertFalse(direct.is_softmax)
        self.assertEqual(policy_to_dict(direct), {"kind": "direct", "table": [[0.25, 0.75]]})
        with self.assertRaises(InvalidInputError):
            policy_from_dict({"kind": "gaussian", "table": [[1.0]]})

    def test_mdp_file_round_trip(self):
        path = save_json(two_state_document(), os.path.join(self.workspace, "mdp.json"))
        mdp = load_mdp(path)
        self.assertEqual(mdp_to_dict(mdp), two_state_document())

    def test_malformed_json(self):
        path = os.path.join(self.workspace, "broken.json")
        with open(path, "w") as broken:
            broken.write("{not json")
        with self.assertRaises(InvalidInputError) as context:
            load_json(path)
        self.assertEqual(context.exception.field, path)

        with self.assertRaises(InvalidInputError):
            load_json(os.path.join(self.workspace, "missing.json"))


class CsvTestCase(unittest.TestCase):

    def setUp(self):
        self.workspace = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.workspace)

    def test_format_value(self):
        self.assertEqual(format_value(0.1), "0.10000000000000001")
        self.assertEqual(format_value(np.float64(2.5)), "2.5")
        self.assertEqual(format_value(True), "true")
        self.assertEqual(format_value(np.bool_(False)), "false")
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(np.int64(7)), "7")

    def test_header_and_values_survive_a_parse(self):
        columns = ("gamma", "value", "flag", "label")
        rows = [
            {"gamma": 0.5, "value": 1 / 3, "flag": True, "label": "r0-p0"},
            {"gamma": 0.9, "value": math.pi, "flag": None, "label": "r0-p1"},
        ]
        path = write_csv(os.path.join(self.workspace, "rows.csv"), columns, rows)
        header, parsed = read_csv(path)

        self.assertEqual(tuple(header), columns)
        self.assertEqual(float(parsed[0]["value"]), 1 / 3)
        self.assertEqual(float(parsed[1]["value"]), math.pi)
        self.assertEqual(parsed[0]["flag"], "true")
        self.assertEqual(parsed[1]["flag"], "")

    def test_csv_text_uses_newlines(self):
        self.assertEqual(csv_text(("a", "b"), [{"a": 1, "b": 0.5}]), "a,b\n1,0.5\n")


class ParsingTestCase(unittest.TestCase):

    def test_linspace_grid(self):
        grid = parse_grid("linspace:0.5:0.999:20")
        self.assertEqual(len(grid), 20)
        self.assertEqual(grid[0], 0.5)
        self.assertAlmostEqual(grid[-1], 0.999)

    def test_list_grid(self):
        self.assertEqual(parse_grid("0.5, 0.9,0.99"), [0.5, 0.9, 0.99])

    def test_bad_grids(self):
        for text in ("0.5,1.0", "linspace:0:1", "abc", "", "linspace:0.1:0.2:0"):
            with self.assertRaises(InvalidInputError):
                parse_grid(text)

    def test_assignments(self):
        self.assertEqual(parse_assignments("q=0.9, stay=0.8", "two_state"), {"q": 0.9, "stay": 0.8})
        with self.assertRaises(InvalidInputError) as context:
            parse_assignments("q", "two_state")
        self.assertEqual(context.exception.field, "two_state")

    def test_json_ready(self):
        ready = json_ready({"a": np.array([1.0, np.nan]), "b": np.int64(3), "c": (np.bool_(True),)})
        self.assertEqual(ready, {"a": [1.0, None], "b": 3, "c": [True]})

    def test_policy_round_trip_keeps_kind(self):
        policy = Policy.softmax([[0.1, 0.2]])
        self.assertTrue(policy_from_dict(policy_to_dict(policy)).is_softmax)
