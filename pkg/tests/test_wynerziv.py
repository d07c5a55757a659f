import numpy as np
import pytest

from wtfb.info import ConditionalPmf, JointPmf
from wtfb.sim import ConfigError, wz_encode_decode_trial, wz_success_rate


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


SOURCE = JointPmf(0.5 * bsc(0.1))  # X uniform, Y = X through BSC(0.1)
QUANT = ConditionalPmf(bsc(0.1))
# I(X;U) = 1 - h(0.1) = 0.531, I(Y;U) = 1 - h(0.18) = 0.320


class TestWynerZiv:
    def test_success_improves_with_block_length(self):
        rates = [wz_success_rate(SOURCE, QUANT, (0.64, 0.06), N, 42, trials=20) for N in (64, 256, 1024)]
        assert rates[0] < rates[2]
        assert rates[2] == 1.0

    def test_violated_rates_fail(self):
        # in-bin rate 0.45 > I(Y;U): the decoder cannot single out the codeword
        assert wz_success_rate(SOURCE, QUANT, (0.2, 0.45), 1024, 42, trials=10) == 0.0

    def test_perfect_side_information(self):
        same = JointPmf(np.diag([0.5, 0.5]))
        assert wz_success_rate(same, ConditionalPmf(np.eye(2)), (0.7, 0.3), 2048, 42, trials=10) == 1.0

    def test_engines_agree_at_small_n(self):
        a = wz_success_rate(SOURCE, QUANT, (0.25, 0.25), 16, 7, trials=40, engine="explicit")
        b = wz_success_rate(SOURCE, QUANT, (0.25, 0.25), 16, 7, trials=40, engine="ensemble")
        assert abs(a - b) < 0.3

    def test_deterministic(self):
        a = [wz_encode_decode_trial(SOURCE, QUANT, (0.5, 0.1), 128, 3, trial=t) for t in range(5)]
        b = [wz_encode_decode_trial(SOURCE, QUANT, (0.5, 0.1), 128, 3, trial=t) for t in range(5)]
        assert a == b

    def test_errors(self):
        with pytest.raises(ConfigError):
            wz_encode_decode_trial(SOURCE, QUANT, (-0.1, 0.1), 16, 0)
        with pytest.raises(ConfigError):
            wz_encode_decode_trial(SOURCE, ConditionalPmf(np.eye(3)), (0.1, 0.1), 16, 0)
        with pytest.raises(ConfigError):
            wz_encode_decode_trial(SOURCE, QUANT, (0.9, 0.9), 16, 0, engine="explicit")
        with pytest.raises(ConfigError):
            wz_encode_decode_trial(SOURCE, QUANT, (0.1, 0.1), 16, 0, engine="fast")
