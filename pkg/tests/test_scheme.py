import json

import numpy as np
import pytest
from scipy.stats import chisquare

from wtfb.channel import BinaryWiretapParams, WiretapChannel, make_binary_channel
from wtfb.info import ConditionalPmf, binary_entropy as h
from wtfb.sim import (
    ConfigError,
    KeyRateError,
    RateAllocation,
    RateInfeasibleError,
    SimConfig,
    run_dmc_feedback_sim,
    run_wiretap_feedback_sim,
)
from wtfb.sim.rates import corner_rates
from wtfb.sim.scheme import (
    TREND_COLUMNS,
    Scheme,
    default_aux,
    equivocation_lower_bound,
    error_trend,
    median_by_n,
    plugin_mutual_information,
    write_trend_csv,
)

BSC01 = ConditionalPmf(np.array([[0.9, 0.1], [0.1, 0.9]]))


@pytest.fixture(scope="module")
def wiretap():
    return make_binary_channel(BinaryWiretapParams(0.1, 0.3))


@pytest.fixture(scope="module")
def rates70(wiretap):
    return corner_rates(wiretap, default_aux(2, 2)).scaled_messages(0.7)


class TestConfig:
    def test_validation(self):
        r = RateAllocation(r1=0.1)
        for bad in ({"n": 2}, {"N": 0}, {"epsilon": 0.0}, {"trials": 0}, {"engine": "fast"}, {"seed": -1}):
            with pytest.raises(ConfigError):
                SimConfig(**{"n": 3, "N": 8, "rates": r, **bad})

    def test_dict_round_trip(self):
        cfg = SimConfig(n=4, N=16, rates=RateAllocation(r1=0.2), seed=5, aux=default_aux(2, 2))
        back = SimConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert back.to_dict() == cfg.to_dict()

    def test_from_dict_errors(self):
        with pytest.raises(ConfigError):
            SimConfig.from_dict({"n": 3, "N": 8, "rates": {}, "colour": 1})
        with pytest.raises(ConfigError):
            SimConfig.from_dict({"n": 3, "rates": {}})
        with pytest.raises(ConfigError):
            SimConfig.from_dict({"n": 3, "N": 8, "rates": {"r1": -1}})


class TestDmc:
    def test_noiseless_channel_no_errors(self):
        cfg = SimConfig(n=4, N=2048, rates=RateAllocation(r1=0.3), epsilon=0.05, trials=10)
        rep = run_dmc_feedback_sim(ConditionalPmf(np.eye(2)), cfg)
        assert rep.decode_error_rate == 0.0
        assert rep.engine == "ensemble"

    def test_above_capacity_stays_bad(self):
        for N in (64, 256):
            cfg = SimConfig(n=4, N=N, rates=RateAllocation(r1=0.8), trials=10)
            rep = run_dmc_feedback_sim(BSC01, cfg, check_rates=False)
            assert rep.decode_error_rate >= 0.5

    def test_rate_gate(self):
        with pytest.raises(RateInfeasibleError):
            run_dmc_feedback_sim(BSC01, SimConfig(n=4, N=64, rates=RateAllocation(r1=0.6)))

    def test_needs_identity_input_map(self):
        aux = default_aux(2, 2)
        bad = type(aux).from_arrays([0.5, 0.5], [[0.9, 0.1], [0.1, 0.9]], np.ones((2, 2, 1)))
        with pytest.raises(ConfigError):
            run_dmc_feedback_sim(BSC01, SimConfig(n=4, N=16, rates=RateAllocation(r1=0.1), aux=bad))

    def test_report_shape(self):
        cfg = SimConfig(n=5, N=32, rates=RateAllocation(r1=0.25), trials=4)
        rep = run_dmc_feedback_sim(BSC01, cfg)
        assert 0.0 <= rep.decode_error_rate <= 1.0
        assert rep.message_blocks == 4 * 4
        assert rep.measured_equivocation_rate is None


class TestWiretap:
    def test_degenerate_wiretap_matches_dmc(self):
        law = BSC01.table[:, :, None] * np.full(2, 0.5)[None, None, :]
        ch = WiretapChannel.from_law3d(law)
        for N in (32, 64):
            cfg = SimConfig(n=4, N=N, rates=RateAllocation(r1=0.3), trials=10, seed=3)
            a = run_wiretap_feedback_sim(ch, cfg).decode_error_rate
            b = run_dmc_feedback_sim(BSC01, cfg).decode_error_rate
            assert a == b

    def test_infeasible_lists_violation(self):
        ch = make_binary_channel(BinaryWiretapParams(0.1, 0.01))
        with pytest.raises(RateInfeasibleError) as err:
            run_wiretap_feedback_sim(ch, SimConfig(n=3, N=16, rates=RateAllocation()))
        assert "equivocation" in str(err.value)

    def test_key_too_long(self, wiretap):
        # key rate 0.6 > H(Y1|Y2,U) = h(0.1); rate gate bypassed to reach the key check
        cfg = SimConfig(n=3, N=32, rates=RateAllocation(r2=0.6))
        with pytest.raises(KeyRateError):
            run_wiretap_feedback_sim(wiretap, cfg, check_rates=False)

    def test_explicit_bit_cap(self, wiretap, rates70):
        with pytest.raises(ConfigError):
            run_wiretap_feedback_sim(wiretap, SimConfig(n=3, N=128, rates=rates70, engine="explicit", trials=1))

    def test_auto_engine_choice(self, wiretap, rates70):
        small = Scheme(wiretap.law3d, default_aux(2, 2), rates70, SimConfig(n=3, N=16, rates=rates70))
        large = Scheme(wiretap.law3d, default_aux(2, 2), rates70, SimConfig(n=3, N=128, rates=rates70))
        assert small.engine == "explicit" and large.engine == "ensemble"

    def test_key_independent_of_message(self, wiretap, rates70):
        cfg = SimConfig(n=6, N=32, rates=rates70, trials=1000, seed=1)
        rep = run_wiretap_feedback_sim(wiretap, cfg)
        assert len(rep.key_histogram) == 4
        assert sum(rep.key_histogram) == 1000 * 4
        assert rep.key_message_mi < 0.01
        assert chisquare(rep.key_histogram).pvalue > 0.01

    def test_histogram_total(self, wiretap, rates70):
        rep = run_wiretap_feedback_sim(wiretap, SimConfig(n=5, N=32, rates=rates70, trials=7))
        assert sum(rep.key_histogram) == 7 * 3
        assert 0.0 <= rep.encoder_failure_rate <= 1.0

    def test_deterministic_across_workers(self, wiretap, rates70, monkeypatch):
        cfg = SimConfig(n=4, N=32, rates=rates70, trials=8, seed=11)
        monkeypatch.setenv("WTFB_THREADS", "1")
        a = run_wiretap_feedback_sim(wiretap, cfg).to_json()
        monkeypatch.setenv("WTFB_THREADS", "4")
        b = run_wiretap_feedback_sim(wiretap, cfg).to_json()
        assert a == b
        assert json.loads(a)["config"]["seed"] == 11

    def test_engines_agree_on_error_level(self, wiretap, rates70):
        cfg = SimConfig(n=3, N=32, rates=rates70, trials=40, seed=2)
        a = run_wiretap_feedback_sim(wiretap, cfg.with_(engine="explicit")).decode_error_rate
        b = run_wiretap_feedback_sim(wiretap, cfg.with_(engine="ensemble")).decode_error_rate
        assert abs(a - b) < 0.25

    def test_plug_in_bound_reported(self, wiretap, rates70):
        rep = run_wiretap_feedback_sim(wiretap, SimConfig(n=4, N=32, rates=rates70, trials=2))
        assert rep.equivocation_method == "plug-in-bound"
        assert rep.measured_equivocation_rate == rep.equivocation_bound


class TestHelpers:
    def test_plugin_mi(self):
        rng = np.random.default_rng(0)
        a = rng.integers(0, 4, 20000)
        b = rng.integers(0, 4, 20000)
        assert plugin_mutual_information(a, b) < 0.002
        assert plugin_mutual_information(a, a) == pytest.approx(2.0, abs=0.01)
        assert plugin_mutual_information([], []) == 0.0

    def test_equivocation_bound_formula(self):
        q = {"I(Y2;U)": 1 - h(0.3), "H(Y1|Y2,U)": h(0.1)}
        r = RateAllocation(r1=0.3, r2=0.1)
        expected = 2 / 3 * 0.3 + 1 / 3 * 0.1 - (1 - h(0.3)) + 1 / 3 * h(0.1)
        assert equivocation_lower_bound(q, r, 3) == pytest.approx(expected, abs=1e-15)

    def test_trend_table(self, tmp_path):
        cfg = SimConfig(n=3, N=16, rates=RateAllocation(r1=0.25), trials=4)
        rows = error_trend(run_dmc_feedback_sim, BSC01, cfg, [16, 32], [1, 2])
        assert [(r.N, r.seed) for r in rows] == [(16, 1), (16, 2), (32, 1), (32, 2)]
        med = median_by_n(rows)
        assert list(med) == [16, 32]
        path = tmp_path / "t.csv"
        write_trend_csv(rows, path, header="bsc trend")
        lines = path.read_text().splitlines()
        assert lines[0] == "# bsc trend"
        assert lines[1].split(",") == list(TREND_COLUMNS)
        assert len(lines) == 6
