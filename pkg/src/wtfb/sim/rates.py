"""Rate allocations and the feasibility region of the block-Markov feedback scheme.

Rates (bits per symbol) of one block:

- ``r1``       public-looking message part, protected by the wiretapper's confusion
- ``r2``       message part encrypted with the feedback key
- ``r_prime``  randomization index (dummy message)
- ``r_star``   bin index of the helper sequence from the previous block
- ``r_tilde``  helper codebook size, split into bin and in-bin index
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linprog

from ..channel import WiretapChannel
from ..info import (
    ConditionalPmf,
    JointPmf,
    U,
    V,
    Y1,
    Y2,
    assemble_joint,
    conditional_entropy,
    conditional_mutual_information,
    mutual_information,
)
from ..optimize import AuxiliarySystem

RATE_TOL = 1e-9
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class RateAllocation:
    r1: float = 0.0
    r2: float = 0.0
    r_prime: float = 0.0
    r_star: float = 0.0
    r_tilde: float = 0.0

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"rate {k} must be a non-negative number, got {v}")
        if self.r_tilde < self.r_star - RATE_TOL:
            raise ValueError("r_tilde must be at least r_star (the bin index is part of the helper index)")

    def bits(self, n: int) -> dict[str, int]:
        """Index widths for block length ``n``: floor(n * rate)."""
        return {k: int(np.floor(n * v + 1e-9)) for k, v in asdict(self).items()}

    def scaled_messages(self, factor: float) -> "RateAllocation":
        """Scale the message rates r1, r2; the lower-bounded indices stay put."""
        return RateAllocation(self.r1 * factor, self.r2 * factor, self.r_prime, self.r_star, self.r_tilde)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RateAllocation":
        unknown = set(d) - {"r1", "r2", "r_prime", "r_star", "r_tilde"}
        if unknown:
            raise ValueError(f"unknown rate fields {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class Inequality:
    name: str
    formula: str
    lhs: float
    rhs: float
    sense: str  # "<=" or ">="

    @property
    def margin(self) -> float:
        """Positive when satisfied."""
        return self.rhs - self.lhs if self.sense == "<=" else self.lhs - self.rhs

    @property
    def ok(self) -> bool:
        return self.margin >= -RATE_TOL

    def describe(self) -> str:
        status = "ok" if self.ok else "VIOLATED"
        return f"{self.name}: {self.formula}  [{self.lhs:.6g} {self.sense} {self.rhs:.6g}, margin {self.margin:+.3g}] {status}"


@dataclass
class RateRegionReport:
    inequalities: list[Inequality]
    quantities: dict[str, float]
    sum_bound_randomized: float  # R1 + R2 + R' <= I(U;Y1)
    sum_bound_secret: float  # R1 + R2 <= I(Y1,V;U) - I(Y2;U) + H(Y1|Y2,U)
    derived: list[Inequality] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(q.ok for q in self.inequalities)

    @property
    def violated(self) -> list[Inequality]:
        return [q for q in self.inequalities if not q.ok]

    def describe(self) -> str:
        return "\n".join(q.describe() for q in self.inequalities + self.derived)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "inequalities": [
                {"name": q.name, "formula": q.formula, "lhs": q.lhs, "rhs": q.rhs,
                 "sense": q.sense, "margin": q.margin, "ok": q.ok}
                for q in self.inequalities + self.derived
            ],
            "quantities": dict(self.quantities),
        }


class RateInfeasibleError(ValueError):
    """Rates violate the scheme's constraints; ``report`` lists which."""

    def __init__(self, report):
        self.report = report
        lines = [q.describe() for q in report.violated]
        super().__init__("infeasible rates:\n  " + "\n  ".join(lines))


def scheme_quantities(ch: WiretapChannel, aux: AuxiliarySystem) -> dict[str, float]:
    """All information quantities the scheme's constraints refer to."""
    j = assemble_joint(aux.pu, aux.px_given_u, ch, aux.pv_given_uy1)
    return {
        "I(U,Y1;V)": mutual_information(j, [U, Y1], [V]),
        "I(Y1;U)": mutual_information(j, [Y1], [U]),
        "I(Y1;V)": mutual_information(j, [Y1], [V]),
        "I(Y1,V;U)": mutual_information(j, [Y1, V], [U]),
        "I(Y2;U)": mutual_information(j, [Y2], [U]),
        "H(Y1|Y2,U)": conditional_entropy(j, [Y1], [Y2, U]),
        "I(V;U|Y1)": conditional_mutual_information(j, [V], [U], [Y1]),
    }


def rate_region_check(ch: WiretapChannel, aux: AuxiliarySystem, rates: RateAllocation) -> RateRegionReport:
    """Evaluate the seven scheme constraints and the two eliminated sum-rate bounds."""
    q = scheme_quantities(ch, aux)
    r = rates
    ineq = [
        Inequality("cover", "R~ >= I(U,Y1;V)", r.r_tilde, q["I(U,Y1;V)"], ">="),
        Inequality("last_block", "R* <= I(Y1;U)", r.r_star, q["I(Y1;U)"], "<="),
        Inequality("helper_bin", "R~ - R* <= I(Y1;V)", r.r_tilde - r.r_star, q["I(Y1;V)"], "<="),
        Inequality("main_decode", "R1 + R2 + R' + R* <= I(Y1,V;U)",
                   r.r1 + r.r2 + r.r_prime + r.r_star, q["I(Y1,V;U)"], "<="),
        Inequality("wiretap_resolve", "R2 + R' + R* <= I(Y2;U)",
                   r.r2 + r.r_prime + r.r_star, q["I(Y2;U)"], "<="),
        Inequality("equivocation", "R' + R* >= I(Y2;U) - H(Y1|Y2,U)",
                   r.r_prime + r.r_star, q["I(Y2;U)"] - q["H(Y1|Y2,U)"], ">="),
        Inequality("helper_rate", "R* >= I(V;U|Y1)", r.r_star, q["I(V;U|Y1)"], ">="),
    ]
    sum_a = q["I(Y1,V;U)"] - q["I(V;U|Y1)"]
    sum_b = q["I(Y1,V;U)"] - q["I(Y2;U)"] + q["H(Y1|Y2,U)"]
    derived = [
        Inequality("sum_randomized", "R1 + R2 + R' <= I(U;Y1)", r.r1 + r.r2 + r.r_prime, sum_a, "<="),
        Inequality("sum_secret", "R1 + R2 <= I(Y1,V;U) - I(Y2;U) + H(Y1|Y2,U)", r.r1 + r.r2, sum_b, "<="),
    ]
    return RateRegionReport(ineq, q, sum_a, sum_b, derived)


def corner_rates(ch: WiretapChannel, aux: AuxiliarySystem) -> RateAllocation:
    """Vertex of the constraint polytope with the largest R1 + R2, then the largest R2.

    Two linear programs over (R1, R2, R', R*, R~) subject to the seven
    constraints of :func:`rate_region_check`.
    """
    q = scheme_quantities(ch, aux)
    # rows: a @ [r1, r2, rp, rs, rt] <= b
    a = np.array([
        [0, 0, 0, 0, -1],
        [0, 0, 0, 1, 0],
        [0, 0, 0, -1, 1],
        [1, 1, 1, 1, 0],
        [0, 1, 1, 1, 0],
        [0, 0, -1, -1, 0],
        [0, 0, 0, -1, 0],
    ], dtype=float)
    b = np.array([
        -q["I(U,Y1;V)"], q["I(Y1;U)"], q["I(Y1;V)"], q["I(Y1,V;U)"], q["I(Y2;U)"],
        -(q["I(Y2;U)"] - q["H(Y1|Y2,U)"]), -q["I(V;U|Y1)"],
    ])
    bounds = [(0, None)] * 5
    first = linprog([-1, -1, 0, 0, 0], A_ub=a, b_ub=b, bounds=bounds, method="highs", options=LP_OPTIONS)
    if first.status != 0:
        raise RateInfeasibleError(rate_region_check(ch, aux, RateAllocation()))
    best = -first.fun
    a2 = np.vstack([a, [-1, -1, 0, 0, 0]])
    b2 = np.append(b, -best + 1e-12)
    second = linprog([0, -1, 0, 0, 0], A_ub=a2, b_ub=b2, bounds=bounds, method="highs", options=LP_OPTIONS)
    x = np.maximum(second.x if second.status == 0 else first.x, 0.0)
    return RateAllocation(*[float(v) for v in x[:4]], r_tilde=float(max(x[4], x[3])))


# --- point-to-point scheme ----------------------------------------------------


def dmc_quantities(ch_main: ConditionalPmf, px, pv_given_xy: ConditionalPmf) -> dict[str, float]:
    j = JointPmf(np.einsum("x,xy,xyv->xyv", np.asarray(px, dtype=float), ch_main.table, pv_given_xy.table))
    x_, y_, v_ = 0, 1, 2
    return {
        "I(V;X,Y)": mutual_information(j, [v_], [x_, y_]),
        "I(Y;X)": mutual_information(j, [y_], [x_]),
        "I(Y;V)": mutual_information(j, [y_], [v_]),
        "I(Y,V;X)": mutual_information(j, [y_, v_], [x_]),
    }


def dmc_rate_check(ch_main: ConditionalPmf, px, pv_given_xy: ConditionalPmf, rates: RateAllocation) -> RateRegionReport:
    """Constraints of the point-to-point feedback scheme (message rate ``r1``).

    ``r_star`` is the helper bin rate and ``r_tilde - r_star`` the in-bin rate.
    """
    q = dmc_quantities(ch_main, px, pv_given_xy)
    r = rates
    ineq = [
        Inequality("cover", "R* + R** >= I(V;X,Y)", r.r_tilde, q["I(V;X,Y)"], ">="),
        Inequality("last_block", "R* <= I(Y;X)", r.r_star, q["I(Y;X)"], "<="),
        Inequality("helper_bin", "R** <= I(Y;V)", r.r_tilde - r.r_star, q["I(Y;V)"], "<="),
        Inequality("main_decode", "R + R* <= I(Y,V;X)", r.r1 + r.r_star, q["I(Y,V;X)"], "<="),
    ]
    if r.r2 or r.r_prime:
        ineq.append(Inequality("no_secret_parts", "R2 + R' = 0", r.r2 + r.r_prime, 0.0, "<="))
    return RateRegionReport(ineq, q, float("nan"), float("nan"))
