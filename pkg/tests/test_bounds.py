import functools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import prob_arrays, stochastic
from wtfb.binary import cb_in, cb_in_new, cb_out
from wtfb.bounds import (
    BOUNDS,
    StructureError,
    bound_chain,
    c_f_out,
    c_f_star_out_nondegraded,
    cs_general,
    degraded_identity_residual,
    dmc_feedback_rate_identity,
    evaluate_via_joint,
    r_double_star_nondegraded,
    r_non_ahlswede_cai_nondegraded,
    r_s_ahlswede_cai,
    r_star_s,
)
from wtfb.channel import BinaryWiretapParams, WiretapChannel, make_binary_channel, make_degraded_channel
from wtfb.info import ConditionalPmf, DimensionError, Pmf, binary_entropy as h

C_01 = 1 - h(0.1)


def bsc(p):
    return ConditionalPmf(np.array([[1 - p, p], [p, 1 - p]]))


@functools.lru_cache(maxsize=None)
def binary(p1, p2):
    return make_binary_channel(BinaryWiretapParams(p1, p2))


@functools.lru_cache(maxsize=None)
def chain(key):
    return bound_chain(CHANNELS[key]())


CORRELATED_SKEW = np.array([
    [[0.6, 0.1], [0.2, 0.1]],
    [[0.1, 0.3], [0.1, 0.5]],
])
CHANNELS = {
    "degraded": lambda: make_degraded_channel(bsc(0.1), bsc(0.15)),
    "uniform_degrader": lambda: make_degraded_channel(bsc(0.1), ConditionalPmf(np.full((2, 2), 0.5))),
    "general": lambda: WiretapChannel.from_law3d(CORRELATED_SKEW),
    "binary_01_03": lambda: binary(0.1, 0.3),
}


class TestCs:
    def test_binary_closed_form(self):
        assert cs_general(binary(0.1, 0.2)).value == pytest.approx(h(0.2) - h(0.1), abs=1e-9)

    def test_equal_channels(self):
        assert cs_general(binary(0.15, 0.15)).value == pytest.approx(0.0, abs=1e-12)

    def test_positive_part_clips(self):
        assert cs_general(binary(0.2, 0.1)).value == 0.0

    def test_degraded(self):
        expected = h(0.1 + 0.15 - 2 * 0.1 * 0.15) - h(0.1)
        assert chain("degraded")["cs"].value == pytest.approx(expected, abs=1e-6)


class TestRs:
    @pytest.mark.parametrize("p1,p2", [(0.1, 0.3), (0.3, 0.1)])
    def test_binary_closed_form_when_capacity_binds(self, p1, p2):
        expected = min(max(h(p2) - h(p1), 0) + h(p1), 1 - h(p1))
        assert r_s_ahlswede_cai(binary(p1, p2)).value == pytest.approx(expected, abs=1e-6)

    def test_binary_general_u_beats_input_only_form(self):
        # a noisy U raises H(Y1|Y2,U) above h(p1) when the key arm binds
        ch = binary(0.05, 0.02)
        res = r_s_ahlswede_cai(ch)
        assert res.value > cb_in(BinaryWiretapParams(0.05, 0.02)) + 0.01
        assert abs(evaluate_via_joint("rs", res.argmax, ch.law3d) - res.value) < 1e-9
        assert res.value <= 1 - h(0.05) + 1e-9

    @pytest.mark.parametrize("p2", [0.05, 0.3])
    def test_noiseless_main(self, p2):
        assert r_s_ahlswede_cai(binary(0.0, p2)).value == pytest.approx(min(h(p2), 1.0), abs=1e-6)

    @pytest.mark.parametrize("p2", [0.01, 0.25, 0.49])
    def test_main_capacity_at_p1_02(self, p2):
        assert r_s_ahlswede_cai(binary(0.2, p2)).value == pytest.approx(0.278072, abs=1e-6)


class TestRStar:
    def test_constant_v_reduces(self):
        ch = CHANNELS["general"]()
        rs = r_s_ahlswede_cai(ch)
        assert abs(r_star_s(ch, v_size=1, rs=rs).value - rs.value) < 1e-6

    def test_degraded_equals_rs(self):
        c = chain("degraded")
        assert c["rstar"].value == pytest.approx(c["rs"].value, abs=1e-6)
        assert c["rs"].value == pytest.approx(C_01, abs=1e-6)

    def test_not_below_rs(self):
        for key in CHANNELS:
            c = chain(key)
            assert c["rstar"].value >= c["rs"].value - 1e-6

    @pytest.mark.slow
    def test_binary_matches_closed_form_optimum(self):
        p = BinaryWiretapParams(0.1, 0.3)
        assert abs(chain("binary_01_03")["rstar"].value - cb_in_new(p).value) < 1e-4

    def test_argmax_respects_caps(self):
        aux = chain("general")["rstar"].argmax
        assert aux.u_size == 3 and aux.v_size == 4


class TestCfOut:
    def test_uniform_degrader(self):
        c = chain("uniform_degrader")
        # H(Y1|Y2) = H(Y1) = 1 bit, so the main-channel capacity binds
        assert c["cfout"].value == pytest.approx(C_01, abs=1e-6)
        assert c["cs"].value == pytest.approx(C_01, abs=1e-6)

    def test_degraded_equals_rs(self):
        c = chain("degraded")
        assert c["cfout"].value == pytest.approx(c["rs"].value, abs=1e-6)

    def test_binary_matches_closed_form(self):
        p = BinaryWiretapParams(0.1, 0.2)
        assert c_f_out(binary(0.1, 0.2)).value == pytest.approx(cb_out(p).value, abs=1e-6)


class TestNonDegraded:
    def test_structure_error_on_degraded(self):
        ch = CHANNELS["degraded"]()
        for fn in (r_non_ahlswede_cai_nondegraded, r_double_star_nondegraded, c_f_star_out_nondegraded):
            with pytest.raises(StructureError):
                fn(ch)

    def test_structure_error_on_general(self):
        with pytest.raises(StructureError):
            r_non_ahlswede_cai_nondegraded(CHANNELS["general"]())

    @pytest.mark.parametrize("p1,p2", [(0.1, 0.3), (0.05, 0.01), (0.2, 0.1)])
    def test_rnon_closed_form(self, p1, p2):
        p = BinaryWiretapParams(p1, p2)
        assert r_non_ahlswede_cai_nondegraded(binary(p1, p2)).value == pytest.approx(cb_in(p), abs=1e-6)

    def test_rnon_noiseless_main(self):
        assert r_non_ahlswede_cai_nondegraded(binary(0.0, 0.3)).value == pytest.approx(h(0.3), abs=1e-6)

    def test_rnon_noiseless_wiretap(self):
        expected = min(h(0.1), 1 - h(0.1))
        assert r_non_ahlswede_cai_nondegraded(binary(0.1, 0.0)).value == pytest.approx(expected, abs=1e-6)

    @pytest.mark.slow
    def test_rdstar_matches_cb_in_new(self):
        p = BinaryWiretapParams(0.1, 0.2)
        assert abs(r_double_star_nondegraded(binary(0.1, 0.2)).value - cb_in_new(p).value) < 1e-4

    def test_rdstar_not_below_rnon(self):
        ch = binary(0.05, 0.02)
        assert r_double_star_nondegraded(ch).value >= r_non_ahlswede_cai_nondegraded(ch).value - 1e-9

    def test_cfstarout_matches_cb_out(self):
        p = BinaryWiretapParams(0.1, 0.2)
        assert c_f_star_out_nondegraded(binary(0.1, 0.2)).value == pytest.approx(cb_out(p).value, abs=1e-6)

    def test_cfstarout_noiseless_wiretap(self):
        assert c_f_star_out_nondegraded(binary(0.1, 0.0)).value == pytest.approx(h(0.1), abs=1e-6)

    def test_cfstarout_above_rnon_on_equal_channels(self):
        ch = binary(0.15, 0.15)
        assert c_f_star_out_nondegraded(ch).value >= r_non_ahlswede_cai_nondegraded(ch).value - 1e-9


class TestRangesAndOrder:
    @pytest.mark.parametrize("key", list(CHANNELS))
    def test_values_in_range(self, key):
        for name, res in chain(key).items():
            assert 0.0 <= res.value <= np.log2(CHANNELS[key]().y1_size) + 1e-12, name

    @pytest.mark.parametrize("key", list(CHANNELS))
    def test_lower_chain(self, key):
        c = chain(key)
        assert c["cs"].value <= c["rs"].value + 1e-4
        assert c["rs"].value <= c["rstar"].value + 1e-4
        assert c["rs"].value <= c["cfout"].value + 1e-4

    def test_bound_kinds(self):
        c = chain("degraded")
        assert {k: r.bound_kind for k, r in c.items()} == {k: k for k in c}
        assert set(BOUNDS) == {"cs", "rs", "rstar", "cfout", "rdstar", "cfstarout", "rnon"}

    def test_deterministic(self):
        ch = CHANNELS["general"]()
        assert r_s_ahlswede_cai(ch).to_dict() == r_s_ahlswede_cai(ch).to_dict()


class TestIdentities:
    def test_dmc_random_aux_on_bsc(self, rng):
        for _ in range(20):
            aux = ConditionalPmf(rng.dirichlet(np.ones(3), size=(2, 2)))
            lhs, rhs = dmc_feedback_rate_identity(bsc(0.1), aux)
            assert lhs == pytest.approx(C_01, abs=1e-9)
            assert rhs == pytest.approx(C_01, abs=1e-9)

    def test_dmc_constant_v(self):
        lhs, rhs = dmc_feedback_rate_identity(bsc(0.2), ConditionalPmf(np.ones((2, 2, 1))), Pmf([0.3, 0.7]))
        assert abs(lhs - rhs) < 1e-12

    def test_dmc_v_copy_of_x(self):
        aux = np.zeros((2, 2, 2))
        aux[0, :, 0] = aux[1, :, 1] = 1.0
        lhs, rhs = dmc_feedback_rate_identity(bsc(0.1), ConditionalPmf(aux))
        assert lhs == pytest.approx(rhs, abs=1e-9)
        assert rhs == pytest.approx(C_01, abs=1e-9)

    def test_dmc_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            dmc_feedback_rate_identity(bsc(0.1), ConditionalPmf(np.ones((3, 2, 1))))

    @given(stochastic(3, 2), stochastic(6, 3), prob_arrays((3,)))
    def test_dmc_identity_property(self, w, aux, px):
        lhs, rhs = dmc_feedback_rate_identity(ConditionalPmf(w), ConditionalPmf(aux.reshape(3, 2, 3)), Pmf(px))
        assert abs(lhs - rhs) < 1e-9

    @given(st.integers(2, 3), st.data())
    def test_degraded_identity_property(self, n, data):
        main = data.draw(stochastic(n, n))
        deg = data.draw(stochastic(n, 2))
        px = data.draw(prob_arrays((n,)))
        ch = make_degraded_channel(ConditionalPmf(main), ConditionalPmf(deg))
        assert degraded_identity_residual(ch, Pmf(px)) < 1e-9

    def test_degraded_identity_fails_on_non_degraded(self):
        ch = binary(0.1, 0.3)
        assert degraded_identity_residual(ch, Pmf([0.5, 0.5])) > 1e-3
