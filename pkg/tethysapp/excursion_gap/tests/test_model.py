import os
import shutil
import tempfile
import unittest

from ..model import (
    add_analysis_run, add_result_rows, get_analysis_runs, get_result_rows, get_store_sessionmaker, remove_analysis_run
)


class ResultStoreTestCase(unittest.TestCase):
    """
    Runs and rows recorded in a file-backed SQLite store.
    """

    def setUp(self):
        self.workspace = tempfile.mkdtemp()
        self.Session = get_store_sessionmaker("sqlite:///" + os.path.join(self.workspace, "store.db"))

    def tearDown(self):
        shutil.rmtree(self.workspace)

    def test_add_and_list_runs(self):
        first = add_analysis_run(self.Session, "gap-sweep", 7, {"gammas": "0.5,0.9"}, "gap-sweep: 2 rows")
        second = add_analysis_run(self.Session, "bounds-check", 7, {"norm": 2}, "bounds-check: 1 rows")

        runs = get_analysis_runs(self.Session)
        self.assertEqual([run["run_id"] for run in runs], [second, first])
        self.assertEqual(runs[1]["config"], {"gammas": "0.5,0.9"})

        only = get_analysis_runs(self.Session, subcommand="gap-sweep")
        self.assertEqual([run["run_id"] for run in only], [first])

    def test_rows_keep_their_order(self):
        run_id = add_analysis_run(self.Session, "gap-sweep", 1, {}, "", run_id="fixed")
        self.assertEqual(run_id, "fixed")

        rows = [{"gamma": 0.9, "mean_gap": 0.1}, {"gamma": 0.5, "mean_gap": float("nan")}]
        self.assertEqual(add_result_rows(self.Session, run_id, rows), 2)
        self.assertEqual(
            get_result_rows(self.Session, run_id),
            [{"gamma": 0.9, "mean_gap": 0.1}, {"gamma": 0.5, "mean_gap": None}],
        )

    def test_remove_run(self):
        run_id = add_analysis_run(self.Session, "sarsa-eval", 3, {}, "")
        add_result_rows(self.Session, run_id, [{"seed": 3}])

        self.assertEqual(remove_analysis_run(self.Session, run_id), 1)
        self.assertEqual(remove_analysis_run(self.Session, run_id), 0)
        self.assertEqual(get_result_rows(self.Session, run_id), [])
        self.assertEqual(get_analysis_runs(self.Session), [])
