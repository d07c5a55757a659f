import numpy as np
import pytest

from wtfb.binary import expression_B
from wtfb.checks import (
    CheckResult,
    check_expression_b,
    ordering_margins,
    run_suite,
    suite_identities,
)


def perturbed_b(p1, p2, alpha):
    return expression_B(p1, p2, alpha) + 1e-6


class TestHarness:
    def test_identities_pass(self):
        res = suite_identities(seed=3, count_scale=0.1)
        assert [r.name for r in res] == ["degraded_identity", "dmc_feedback_identity", "expression_A", "expression_B"]
        assert all(r.ok for r in res)

    def test_broken_expression_is_caught(self):
        res = check_expression_b(np.random.default_rng(0), 50, perturbed_b)
        assert not res.ok and res.name == "expression_B"
        assert res.value > 1e-7
        failing = [r.name for r in suite_identities(seed=0, expression_b=perturbed_b, count_scale=0.1) if not r.ok]
        assert failing == ["expression_B"]

    def test_line_format(self):
        assert CheckResult("x", 1e-12, 1e-9, True, "d").line() == "PASS x: worst 1.000e-12 (tol 1e-09) d"
        assert CheckResult("y", -0.5, 1e-4, False).line().startswith("FAIL y: worst -5.000e-01")

    def test_ordering_margins(self):
        chains = [{"cs": 0.1, "rs": 0.2, "rstar": 0.3, "cfout": 0.25}, {"cs": 0.0, "rs": 0.0, "rstar": 0.1, "cfout": 0.4}]
        m = ordering_margins(chains)
        assert m["cs<=rs"] == 0.0
        assert np.isclose(m["rs<=rstar"], 0.1)
        assert np.isclose(m["rstar<=cfout"], -0.05)

    def test_unknown_suite(self):
        with pytest.raises(ValueError, match="unknown suite"):
            run_suite("nope")
