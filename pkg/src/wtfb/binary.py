"""Bounds for the binary wiretap channel Y1 = X + Z1, Y2 = X + Z2 (mod 2).

Noises are independent with crossovers ``p1`` (legitimate) and ``p2``
(wiretapper).  The input is P(x=0) = alpha, and the feedback helper V is
binary with gamma_i = P(v=0 | x, y1) in the order

    gamma1: (x=0, y1=0)   gamma2: (x=0, y1=1)
    gamma3: (x=1, y1=0)   gamma4: (x=1, y1=1)

All functions work on scalars; ``expression_A``, ``expression_B`` and the
objectives broadcast over numpy arrays as well.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .channel import BinaryWiretapParams
from .info import binary_entropy, star
from .optimize import BoundResult, OptimizerConfig, OptimizerTrace, SimplexProblem, maximize

ALPHA_GRID = 11
GAMMA_GRID = 9
CB_OUT_GRID = 20001
GOLDEN_TOL = 1e-12

GAMMA_ORDER = "gamma_i = P(v=0|x,y1) for (x,y1) = (0,0),(0,1),(1,0),(1,1)"
SWEEP_COLUMNS = ["p2", "cb_s", "cb_in", "cb_in_new", "cb_out", "alpha_star",
                 "gamma1", "gamma2", "gamma3", "gamma4"]


@dataclass(frozen=True)
class BinaryAuxParams:
    """Input bias ``alpha`` = P(x=0) and helper parameters ``gamma`` (4 values)."""

    alpha: float
    gamma: tuple[float, float, float, float]

    def __post_init__(self):
        g = tuple(float(v) for v in self.gamma)
        if len(g) != 4:
            raise ValueError("gamma needs four entries")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "alpha", float(self.alpha))
        for v in (self.alpha, *g):
            if not 0.0 <= v <= 1.0 or math.isnan(v):
                raise ValueError(f"alpha and gamma must lie in [0, 1], got {v}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "gamma": list(self.gamma)}

    def relabeled(self) -> "BinaryAuxParams":
        """Swap the roles of the two input symbols."""
        g1, g2, g3, g4 = self.gamma
        return BinaryAuxParams(1.0 - self.alpha, (g4, g3, g2, g1))


def _xlog(c, num, den):
    """c * log2(num / den) with the 0 log(0/.) = 0 convention, elementwise."""
    c, num, den = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (c, num, den)))
    out = np.zeros(c.shape)
    ok = c > 0
    # difference of logs: the ratio overflows for subnormal denominators
    out[ok] = c[ok] * (np.log2(num[ok]) - np.log2(den[ok]))
    return out


def _h(u):
    return binary_entropy(np.clip(u, 0.0, 1.0))


def expression_A(p1, alpha, gamma):
    """I(X; Y1, V) written as the eight-term sum over (x, y1, v).

    ``gamma`` is a length-4 sequence (or array with the four gammas on the
    first axis).  Broadcasts over ``p1``, ``alpha`` and the gammas.
    """
    g1, g2, g3, g4 = (np.asarray(g, dtype=float) for g in gamma)
    a = np.asarray(alpha, dtype=float)
    p = np.asarray(p1, dtype=float)
    q, b = 1.0 - p, 1.0 - a
    terms = (
        _xlog(g1 * a * q, g1 * q, g1 * a * q + g3 * p * b),
        _xlog((1 - g1) * a * q, (1 - g1) * q, (1 - g1) * a * q + (1 - g3) * p * b),
        _xlog(g2 * p * a, g2 * p, g2 * p * a + g4 * q * b),
        _xlog((1 - g2) * p * a, (1 - g2) * p, (1 - g2) * p * a + (1 - g4) * q * b),
        _xlog(g3 * p * b, g3 * p, g3 * p * b + g1 * q * a),
        _xlog((1 - g3) * p * b, (1 - g3) * p, (1 - g3) * p * b + (1 - g1) * q * a),
        _xlog(g4 * q * b, g4 * q, g4 * q * b + g2 * p * a),
        _xlog((1 - g4) * q * b, (1 - g4) * q, (1 - g4) * q * b + (1 - g2) * p * a),
    )
    out = sum(terms)
    return float(out) if np.ndim(out) == 0 else out


def expression_B(p1, p2, alpha):
    """H(Y1|Y2) for input bias ``alpha`` as a four-term sum over (y1, y2)."""
    a = np.asarray(alpha, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    b = 1.0 - a
    pq = p1 * p2
    j00 = a * (1 - p1) * (1 - p2) + b * pq
    j01 = a * (1 - p1) * p2 + b * p1 * (1 - p2)
    j10 = a * p1 * (1 - p2) + b * (1 - p1) * p2
    j11 = a * pq + b * (1 - p1) * (1 - p2)
    y2_0 = a * (1 - p2) + b * p2
    y2_1 = a * p2 + b * (1 - p2)
    out = _xlog(j00, y2_0, j00) + _xlog(j01, y2_1, j01) + _xlog(j10, y2_0, j10) + _xlog(j11, y2_1, j11)
    return float(out) if np.ndim(out) == 0 else out


def _main_rate(p1, alpha):
    return _h(star(alpha, p1)) - _h(p1)


def objective_in_new(p: BinaryWiretapParams, alpha, gamma):
    """min{[A - h(alpha*p2) + h(p2)]+ + h(p1), h(alpha*p1) - h(p1)}."""
    a_term = expression_A(p.p1, alpha, gamma)
    first = np.maximum(a_term - _h(star(alpha, p.p2)) + _h(p.p2), 0.0) + _h(p.p1)
    out = np.minimum(first, _main_rate(p.p1, alpha))
    return float(out) if np.ndim(out) == 0 else out


def objective_in(p: BinaryWiretapParams, alpha):
    """Key-only objective before the alpha = 1/2 simplification."""
    lead = _main_rate(p.p1, alpha) - _h(star(alpha, p.p2)) + _h(p.p2)
    out = np.minimum(np.maximum(lead, 0.0) + _h(p.p1), _main_rate(p.p1, alpha))
    return float(out) if np.ndim(out) == 0 else out


def objective_out(p: BinaryWiretapParams, alpha):
    out = np.minimum(expression_B(p.p1, p.p2, alpha), _main_rate(p.p1, alpha))
    return float(out) if np.ndim(out) == 0 else out


def cb_s(p: BinaryWiretapParams) -> float:
    """Secrecy capacity without feedback, [h(p2) - h(p1)]+."""
    return max(binary_entropy(p.p2) - binary_entropy(p.p1), 0.0)


def cb_in(p: BinaryWiretapParams) -> float:
    """Key-from-feedback rate in closed form (uniform input)."""
    h1 = binary_entropy(p.p1)
    return min(max(binary_entropy(p.p2) - h1, 0.0) + h1, 1.0 - h1)


def _golden_max(f, lo, hi, tol=GOLDEN_TOL):
    """Golden-section search for a maximum of a unimodal f on [lo, hi]."""
    inv = (math.sqrt(5) - 1) / 2
    c, d = hi - inv * (hi - lo), lo + inv * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv * (hi - lo)
            fd = f(d)
    x = (lo + hi) / 2
    return x, f(x)


def _max_over_alpha(f, grid=CB_OUT_GRID):
    alphas = np.linspace(0.0, 1.0, grid)
    vals = f(alphas)
    i = int(np.argmax(vals))
    best_a, best_v = float(alphas[i]), float(vals[i])
    lo, hi = float(alphas[max(i - 1, 0)]), float(alphas[min(i + 1, grid - 1)])
    a, v = _golden_max(lambda t: float(f(t)), lo, hi)
    if v > best_v:
        best_a, best_v = a, v
    return best_a, best_v


def cb_in_alpha_max(p: BinaryWiretapParams) -> tuple[float, float]:
    """``(alpha, value)`` maximizing the key-only objective over alpha directly."""
    return _max_over_alpha(lambda a: objective_in(p, a))


def cb_out(p: BinaryWiretapParams, opt: OptimizerConfig | None = None) -> BoundResult:
    """Upper bound max over alpha of min{H(Y1|Y2), I(X;Y1)}.

    Dense alpha grid followed by golden-section refinement inside the
    bracketing cell.  ``opt`` is accepted for interface symmetry.
    """
    alpha, value = _max_over_alpha(lambda a: objective_out(p, a))
    return BoundResult(value, BinaryAuxParams(alpha, (1.0, 1.0, 1.0, 1.0)), "cb_out",
                       OptimizerTrace(iterations=1, restarts=1, best_per_restart=[value]))


def _coarse_grid() -> np.ndarray:
    alphas = np.linspace(0.0, 1.0, ALPHA_GRID)
    gammas = np.linspace(0.0, 1.0, GAMMA_GRID)
    combos = np.array(list(itertools.product(alphas, gammas, gammas, gammas, gammas)))
    return combos


def cb_in_new(p: BinaryWiretapParams, opt: OptimizerConfig | None = None) -> BoundResult:
    """Feedback rate with key and helper information, maximized over (alpha, gamma).

    A coarse 11 x 9^4 grid (endpoints 0 and 1 included) ranks starting
    points; the best distinct ones are refined with the shared simplex
    optimizer, where alpha and each gamma are rows (t, 1 - t).
    """
    opt = opt or OptimizerConfig()
    combos = _coarse_grid()
    vals = objective_in_new(p, combos[:, 0], combos[:, 1:].T)
    order = np.argsort(-vals, kind="stable")
    # the uniform-input, uninformative-helper point reproduces cb_in
    starts = [np.array([0.5, 1.0, 1.0, 1.0, 1.0])]
    seen = set()
    for i in order:
        key = round(float(vals[i]), 12)
        if key in seen:
            continue
        seen.add(key)
        starts.append(combos[i])
        if len(starts) > opt.restarts:
            break

    def fun(blocks):
        a = blocks[0][:, 0]
        g = blocks[1][:, :, 0].T
        return objective_in_new(p, a, g)

    problem = SimplexProblem(fun, [(2,), (4, 2)])
    states = [[np.array([r[0], 1 - r[0]]), np.stack([r[1:], 1 - r[1:]], axis=1)] for r in starts]
    cfg = replace(opt, grid_resolution=2, restarts=1)
    value, state, trace = maximize(problem, cfg, states)
    alpha = float(np.clip(state[0][0], 0, 1))
    gamma = tuple(float(v) for v in np.clip(state[1][:, 0], 0, 1))
    aux = BinaryAuxParams(alpha, gamma)
    value = objective_in_new(p, aux.alpha, aux.gamma)
    return BoundResult(value, aux, "cb_in_new", trace)


@dataclass(frozen=True)
class SweepRow:
    p2: float
    cb_s: float
    cb_in: float
    cb_in_new: float
    cb_out: float
    alpha_star: float
    gamma: tuple[float, float, float, float]

    def values(self) -> list[float]:
        return [self.p2, self.cb_s, self.cb_in, self.cb_in_new, self.cb_out,
                self.alpha_star, *self.gamma]


def sweep(p1: float, p2_grid, opt: OptimizerConfig | None = None) -> list[SweepRow]:
    """All four binary bounds for each p2 in ``p2_grid``.

    ``alpha_star`` and ``gamma`` are the maximizer of ``cb_in_new``.
    """
    rows = []
    for p2 in p2_grid:
        p = BinaryWiretapParams(p1, float(p2))
        new = cb_in_new(p, opt)
        rows.append(SweepRow(float(p2), cb_s(p), cb_in(p), new.value, cb_out(p, opt).value,
                             new.argmax.alpha, new.argmax.gamma))
    return rows


def format_number(v: float) -> str:
    return f"{v:.12g}"


def write_sweep_csv(rows: list[SweepRow], path, p1: float) -> None:
    with open(Path(path), "w", newline="") as fh:
        fh.write(f"# binary wiretap sweep, p1={format_number(p1)}; {GAMMA_ORDER}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([format_number(v) for v in r.values()])


def read_sweep_csv(path) -> list[SweepRow]:
    with open(Path(path), newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rd = csv.DictReader(lines)
    out = []
    for rec in rd:
        v = {k: float(x) for k, x in rec.items()}
        out.append(SweepRow(v["p2"], v["cb_s"], v["cb_in"], v["cb_in_new"], v["cb_out"],
                            v["alpha_star"], (v["gamma1"], v["gamma2"], v["gamma3"], v["gamma4"])))
    return out
