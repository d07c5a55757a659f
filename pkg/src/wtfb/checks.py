"""Cross-module consistency suites, one per name in ``SUITES``.

Each check returns a :class:`CheckResult` carrying the worst residual (or
margin) it saw.  The expression checks accept replacement formulas so the
harness itself can be tested against a deliberately broken one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binary import cb_in, cb_in_new, cb_out, expression_A, expression_B
from .bounds import (
    bound_chain,
    c_f_star_out_nondegraded,
    dmc_feedback_rate_identity,
    degraded_identity_residual,
    r_double_star_nondegraded,
    r_non_ahlswede_cai_nondegraded,
    r_s_ahlswede_cai,
    r_star_s,
)
from .channel import BinaryWiretapParams, WiretapChannel, make_binary_channel, make_degraded_channel
from .info import ConditionalPmf, JointPmf, Pmf, conditional_entropy, mutual_information
from .optimize import OptimizerConfig

SUITES = ("identities", "ordering", "reduction")
IDENTITY_TOL = 1e-9
ORDER_TOL = 1e-4
REDUCTION_TOL = 1e-6
BINARY_MATCH_TOL = 2e-3


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float  # worst residual, or worst signed margin for orderings
    tol: float
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: worst {self.value:.3e} (tol {self.tol:.0e}) {self.detail}".rstrip()


def _residual(name, values, tol, detail="") -> CheckResult:
    worst = float(np.max(values)) if len(values) else 0.0
    return CheckResult(name, worst, tol, bool(worst < tol), detail)


def random_stochastic(rng, rows: int, cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(cols), size=rows)


def random_channel(rng, nx=2, n1=2, n2=2) -> WiretapChannel:
    """General wiretap channel with a Dirichlet law over (y1, y2) per input."""
    law = random_stochastic(rng, nx, n1 * n2).reshape(nx, n1, n2)
    return WiretapChannel.from_law3d(law)


# --- identities -------------------------------------------------------------


def check_degraded_identity(rng, count=100) -> CheckResult:
    res = []
    for _ in range(count):
        nx, n1, n2 = rng.integers(2, 4, size=3)
        ch = make_degraded_channel(ConditionalPmf(random_stochastic(rng, nx, n1)),
                                   ConditionalPmf(random_stochastic(rng, n1, n2)))
        res.append(degraded_identity_residual(ch, Pmf(rng.dirichlet(np.ones(nx)))))
    return _residual("degraded_identity", res, IDENTITY_TOL, f"{count} degraded channels")


def check_dmc_feedback_identity(rng, count=100) -> CheckResult:
    res = []
    for _ in range(count):
        nx, ny, nv = rng.integers(2, 4, size=3)
        w = ConditionalPmf(random_stochastic(rng, nx, ny))
        aux = ConditionalPmf(random_stochastic(rng, nx * ny, nv).reshape(nx, ny, nv))
        lhs, rhs = dmc_feedback_rate_identity(w, aux, Pmf(rng.dirichlet(np.ones(nx))))
        res.append(abs(lhs - rhs))
    return _residual("dmc_feedback_identity", res, IDENTITY_TOL, f"{count} auxiliary maps")


def brute_expression_a(p1, alpha, gamma) -> float:
    """I(X; Y1, V) from the joint P(x) P(y1|x) P(v|x,y1)."""
    px = np.array([alpha, 1 - alpha])
    w = np.array([[1 - p1, p1], [p1, 1 - p1]])
    g = np.asarray(gamma, dtype=float).reshape(2, 2)
    pv = np.stack([g, 1 - g], axis=-1)
    j = JointPmf(px[:, None, None] * w[:, :, None] * pv)
    return mutual_information(j, [0], [1, 2])


def brute_expression_b(p1, p2, alpha) -> float:
    """H(Y1|Y2) from the binary wiretap joint with P(x=0) = alpha."""
    law = make_binary_channel(BinaryWiretapParams(p1, p2)).law3d
    j = JointPmf(np.array([alpha, 1 - alpha])[:, None, None] * law)
    return conditional_entropy(j, [1], [2])


def check_expression_a(rng, count=1000, expr=expression_A) -> CheckResult:
    p1 = rng.uniform(0, 0.5, count)
    alpha = rng.uniform(0, 1, count)
    gamma = rng.uniform(0, 1, (count, 4))
    res = [abs(expr(p1[i], alpha[i], gamma[i]) - brute_expression_a(p1[i], alpha[i], gamma[i]))
           for i in range(count)]
    return _residual("expression_A", res, IDENTITY_TOL, f"{count} draws vs I(X;Y1,V)")


def check_expression_b(rng, count=1000, expr=expression_B) -> CheckResult:
    p1 = rng.uniform(0, 0.5, count)
    p2 = rng.uniform(0, 0.5, count)
    alpha = rng.uniform(0, 1, count)
    res = [abs(expr(p1[i], p2[i], alpha[i]) - brute_expression_b(p1[i], p2[i], alpha[i]))
           for i in range(count)]
    return _residual("expression_B", res, IDENTITY_TOL, f"{count} draws vs H(Y1|Y2)")


def suite_identities(seed=42, expression_a=expression_A, expression_b=expression_B, count_scale=1.0):
    rng = np.random.default_rng(seed)
    n = lambda k: max(1, int(k * count_scale))
    return [
        check_degraded_identity(rng, n(100)),
        check_dmc_feedback_identity(rng, n(100)),
        check_expression_a(rng, n(1000), expression_a),
        check_expression_b(rng, n(1000), expression_b),
    ]


# --- ordering ---------------------------------------------------------------


ORDER_PAIRS = (("cs", "rs"), ("rs", "rstar"), ("rstar", "cfout"))
BINARY_ORDER_POINTS = ((0.05, 0.01), (0.1, 0.3), (0.2, 0.1))


def ordering_margins(chains: list[dict]) -> dict[str, float]:
    """Worst ``upper - lower`` over the chains for each adjacent pair."""
    return {f"{a}<={b}": min(c[b] - c[a] for c in chains) for a, b in ORDER_PAIRS}


def suite_ordering(seed=42, channels=5, binary_points=BINARY_ORDER_POINTS, config=None):
    rng = np.random.default_rng(seed)
    config = config or OptimizerConfig(seed=seed)
    chs = [random_channel(rng) for _ in range(channels)]
    chs += [make_binary_channel(BinaryWiretapParams(*p)) for p in binary_points]
    chains = [{k: r.value for k, r in bound_chain(ch, config).items()} for ch in chs]
    out = []
    for name, margin in ordering_margins(chains).items():
        out.append(CheckResult(f"order {name}", margin, ORDER_TOL, bool(margin >= -ORDER_TOL),
                               f"{channels} random + {len(binary_points)} binary channels"))
    return out


# --- reductions -------------------------------------------------------------


def suite_reduction(seed=42, channels=5, binary_points=BINARY_ORDER_POINTS, config=None):
    rng = np.random.default_rng(seed)
    config = config or OptimizerConfig(seed=seed)
    res = []
    for _ in range(channels):
        ch = random_channel(rng)
        rs = r_s_ahlswede_cai(ch, config)
        res.append(abs(r_star_s(ch, config, v_size=1, rs=rs).value - rs.value))
    out = [_residual("constant_v_reduction", res, REDUCTION_TOL, f"{channels} random channels")]
    gaps = {"rnon_vs_cb_in": [], "rdstar_vs_cb_in_new": [], "cfstarout_vs_cb_out": []}
    for p1, p2 in binary_points:
        p = BinaryWiretapParams(p1, p2)
        ch = make_binary_channel(p)
        gaps["rnon_vs_cb_in"].append(abs(r_non_ahlswede_cai_nondegraded(ch, config).value - cb_in(p)))
        gaps["rdstar_vs_cb_in_new"].append(abs(r_double_star_nondegraded(ch, config).value - cb_in_new(p, config).value))
        gaps["cfstarout_vs_cb_out"].append(abs(c_f_star_out_nondegraded(ch, config).value - cb_out(p).value))
    for name, g in gaps.items():
        out.append(_residual(name, g, BINARY_MATCH_TOL, f"{len(binary_points)} binary channels"))
    return out


def run_suite(name: str, seed=42, **kw) -> list[CheckResult]:
    if name == "identities":
        return suite_identities(seed, **kw)
    if name == "ordering":
        return suite_ordering(seed, **kw)
    if name == "reduction":
        return suite_reduction(seed, **kw)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
