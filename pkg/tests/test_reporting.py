import json
import math

import numpy as np

from pompeiu_lab import reporting
from pompeiu_lab.geometry import Ball
from pompeiu_lab.identities import IdentityReport
from pompeiu_lab.suite import BALL_ONLY, run_suite


def test_fmt_is_17_significant_digits():
    assert reporting.fmt(0.1) == "1.0000000000000001e-01"
    assert float(reporting.fmt(math.pi)) == math.pi


def test_dumps_deterministic_and_nan_null():
    a = reporting.dumps({"b": np.float64(np.nan), "a": [np.int64(1), np.bool_(True)], "c": 1 + 2j})
    assert json.loads(a) == {"a": [1, True], "b": None, "c": [1.0, 2.0]}
    assert a.index('"a"') < a.index('"b"')


def test_render_table_marks_skipped():
    reps = [IdentityReport.compare("x", [1.0], [1.0], 1e-8), IdentityReport.skipped("y", "n/a")]
    table = reporting.render_table(reps)
    assert "pass" in table and "skipped" in table


def test_suite_on_shifted_ball():
    reps = run_suite(Ball(0.8, (0.3, -0.2, 0.1)), seed=3)
    by = {r.name: r for r in reps}
    assert all(r.status == "pass" for r in reps), [r.name for r in reps if r.status != "pass"]
    assert set(BALL_ONLY) <= set(by)
    # the cross field is not zero off the origin, and the diagnostics agree
    assert not by["sphericity_equivalence"].details["sphere_about_origin"]
