"""Multi-start coordinate ascent over products of probability simplexes.

Every bound in :mod:`wtfb.bounds` is a maximum over a few conditional
distributions.  The search is deterministic for a given seed: a stratified
lattice (or a seeded sample of it when the lattice is too large) ranks
starting points, the best ``restarts`` of them are refined by pairwise
mass-transfer moves with step halving, and a final randomized pattern
search walks along ridges where min{.,.} objectives have kinks.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .info import ConditionalPmf, Pmf

IMPROVE_TOL = 1e-14


class CapExceededError(ValueError):
    """Alphabet sizes exceed what the dense optimizer supports."""


@dataclass(frozen=True)
class OptimizerConfig:
    seed: int = 42
    restarts: int = 16
    grid_resolution: int = 9
    max_grid: int = 40000
    sampled_starts: int = 2048
    initial_step: float = 0.25
    min_step: float = 1e-10
    max_sweeps: int = 2000
    pattern_directions: int = 48

    def __post_init__(self):
        if self.restarts < 1 or self.grid_resolution < 2:
            raise ValueError("restarts >= 1 and grid_resolution >= 2 required")


@dataclass(frozen=True, eq=False)
class AuxiliarySystem:
    """Auxiliary variables P(u), P(x|u), P(v|u,y1) with cardinality caps."""

    pu: Pmf
    px_given_u: ConditionalPmf
    pv_given_uy1: ConditionalPmf

    def __post_init__(self):
        nu = self.pu.support_size
        if self.px_given_u.table.ndim != 2 or self.px_given_u.input_sizes[0] != nu:
            raise ValueError("P(x|u) must be indexed [u, x] with |U| rows")
        if self.pv_given_uy1.table.ndim != 3 or self.pv_given_uy1.input_sizes[0] != nu:
            raise ValueError("P(v|u,y1) must be indexed [u, y1, v]")
        nx = self.x_size
        if nu > nx + 1:
            raise CapExceededError(f"|U| = {nu} exceeds |X|+1 = {nx + 1}")
        if self.v_size > nx + 2:
            raise CapExceededError(f"|V| = {self.v_size} exceeds |X|+2 = {nx + 2}")

    @property
    def u_size(self) -> int:
        return self.pu.support_size

    @property
    def v_size(self) -> int:
        return self.pv_given_uy1.output_size

    @property
    def x_size(self) -> int:
        return self.px_given_u.output_size

    @property
    def y1_size(self) -> int:
        return self.pv_given_uy1.input_sizes[1]

    @classmethod
    def from_arrays(cls, pu, px_given_u, pv_given_uy1) -> "AuxiliarySystem":
        return cls(Pmf(pu), ConditionalPmf(px_given_u), ConditionalPmf(pv_given_uy1))

    def arrays(self):
        return self.pu.probs, self.px_given_u.table, self.pv_given_uy1.table

    def to_dict(self) -> dict:
        return {
            "pu": self.pu.probs.tolist(),
            "px_given_u": self.px_given_u.table.tolist(),
            "pv_given_uy1": self.pv_given_uy1.table.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AuxiliarySystem":
        return cls.from_arrays(d["pu"], d["px_given_u"], d["pv_given_uy1"])


@dataclass
class OptimizerTrace:
    iterations: int = 0
    restarts: int = 0
    evaluations: int = 0
    best_per_restart: list[float] = field(default_factory=list)


@dataclass
class BoundResult:
    value: float
    argmax: object
    bound_kind: str
    optimizer_trace: OptimizerTrace

    def to_dict(self) -> dict:
        arg = self.argmax.to_dict() if hasattr(self.argmax, "to_dict") else self.argmax
        t = self.optimizer_trace
        return {
            "bound_kind": self.bound_kind,
            "value": self.value,
            "argmax": arg,
            "trace": {
                "iterations": t.iterations,
                "restarts": t.restarts,
                "evaluations": t.evaluations,
                "best_per_restart": list(t.best_per_restart),
            },
        }


# --- generic engine ---------------------------------------------------------


def simplex_lattice(k: int, res: int) -> np.ndarray:
    """All points of the k-simplex with coordinates in {0, 1/(res-1), ..., 1}."""
    m = res - 1
    pts = [c for c in itertools.product(range(m + 1), repeat=k - 1) if sum(c) <= m]
    arr = np.array([list(c) + [m - sum(c)] for c in pts], dtype=float)
    return arr / m


def _row_pair_moves(row: np.ndarray, step: float) -> np.ndarray:
    k = row.size
    cands = []
    for i in range(k):
        if row[i] <= 0:
            continue
        t = min(step, row[i])
        for j in range(k):
            if j == i:
                continue
            new = row.copy()
            new[i] -= t
            new[j] += t
            if t < step:
                # clamp drained entry to an exact zero
                new[i] = 0.0
            cands.append(new)
    return np.array(cands) if cands else np.empty((0, k))


class SimplexProblem:
    """Maximize ``fun(blocks)`` where each block is an array of simplex rows.

    ``fun`` receives a list of arrays with a leading batch axis, shaped
    ``(B, *block_shape)``, and returns ``(B,)`` values.  Blocks listed in
    ``fixed`` keep their given value.
    """

    def __init__(self, fun: Callable, shapes: Sequence[tuple[int, ...]], fixed: dict | None = None):
        self.fun = fun
        self.shapes = [tuple(s) for s in shapes]
        self.fixed = dict(fixed or {})
        self.free = [i for i in range(len(self.shapes)) if i not in self.fixed]
        self.evaluations = 0

    def evaluate(self, batch: list[np.ndarray]) -> np.ndarray:
        self.evaluations += batch[0].shape[0] if batch else 1
        return np.asarray(self.fun(batch), dtype=float)

    def evaluate_states(self, states: list[list[np.ndarray]], chunk: int = 4096) -> np.ndarray:
        out = []
        for lo in range(0, len(states), chunk):
            part = states[lo:lo + chunk]
            batch = [np.stack([s[b] for s in part]) for b in range(len(self.shapes))]
            out.append(self.evaluate(batch))
        return np.concatenate(out) if out else np.empty(0)

    def complete(self, partial: dict[int, np.ndarray]) -> list[np.ndarray]:
        st = []
        for b, shape in enumerate(self.shapes):
            if b in self.fixed:
                st.append(np.array(self.fixed[b], dtype=float).reshape(shape))
            else:
                st.append(np.array(partial[b], dtype=float).reshape(shape))
        return st

    def rows(self, b: int) -> int:
        return int(np.prod(self.shapes[b][:-1])) if len(self.shapes[b]) > 1 else 1


def _grid_starts(problem: SimplexProblem, cfg: OptimizerConfig, rng: np.random.Generator):
    """Stratified lattice starts (full product if small, else seeded sample)."""
    free_rows = []
    for b in problem.free:
        k = problem.shapes[b][-1]
        for _ in range(problem.rows(b)):
            free_rows.append((b, k))
    lattices = [simplex_lattice(k, cfg.grid_resolution) for _, k in free_rows]
    sizes = [len(l) for l in lattices]
    total = math.prod(sizes) if sizes else 1
    if total <= cfg.max_grid:
        combos = itertools.product(*[range(s) for s in sizes])
    else:
        picks = np.stack([rng.integers(0, s, cfg.sampled_starts) for s in sizes], axis=1)
        combos = (tuple(p) for p in picks)
    states = []
    for combo in combos:
        partial: dict[int, list] = {b: [] for b in problem.free}
        for (b, _), lat, idx in zip(free_rows, lattices, combo):
            partial[b].append(lat[idx])
        states.append(problem.complete({b: np.array(v) for b, v in partial.items()}))
    if total > cfg.max_grid:
        # interior points too: lattice samples sit on faces too often
        for _ in range(cfg.sampled_starts // 4):
            partial = {
                b: rng.dirichlet(np.ones(problem.shapes[b][-1]), size=problem.rows(b))
                for b in problem.free
            }
            states.append(problem.complete(partial))
    return states


def _coordinate_ascent(problem, state, value, cfg, trace):
    """Pairwise mass transfers within single rows, all rows scored in one batch.

    Each sweep applies the per-row best moves together when that helps,
    otherwise the single best move; the step halves when nothing improves.
    """
    step = cfg.initial_step
    sweeps = 0
    nb = len(problem.shapes)
    while step >= cfg.min_step and sweeps < cfg.max_sweeps:
        sweeps += 1
        owners, batch_parts = [], [[] for _ in range(nb)]
        for b in problem.free:
            k = problem.shapes[b][-1]
            block = state[b].reshape(-1, k)
            for r in range(block.shape[0]):
                cands = _row_pair_moves(block[r], step)
                if len(cands) == 0:
                    continue
                for bb in range(nb):
                    base = np.broadcast_to(state[bb], (len(cands), *problem.shapes[bb])).copy()
                    if bb == b:
                        flat = base.reshape(len(cands), -1, k)
                        flat[:, r, :] = cands
                        base = flat.reshape(len(cands), *problem.shapes[b])
                    batch_parts[bb].append(base)
                owners.extend((b, r, i) for i in range(len(cands)))
        if not owners:
            break
        batch = [np.concatenate(p) for p in batch_parts]
        vals = problem.evaluate(batch)
        best_row: dict[tuple[int, int], int] = {}
        for idx, (b, r, _) in enumerate(owners):
            if vals[idx] > value + IMPROVE_TOL:
                cur = best_row.get((b, r))
                if cur is None or vals[idx] > vals[cur]:
                    best_row[(b, r)] = idx
        if not best_row:
            step /= 2
            continue
        top = int(np.argmax(vals))
        new_state, new_value = [batch[bb][top].copy() for bb in range(nb)], float(vals[top])
        if len(best_row) > 1:
            combo = [a.copy() for a in state]
            for (b, r), idx in best_row.items():
                k = problem.shapes[b][-1]
                flat = combo[b].reshape(-1, k)
                flat[r] = batch[b][idx].reshape(-1, k)[r]
                combo[b] = flat.reshape(problem.shapes[b])
            cval = float(problem.evaluate([c[None] for c in combo])[0])
            if cval > new_value:
                new_state, new_value = combo, cval
        state, value = new_state, new_value
    trace.iterations += sweeps
    return state, value


def _pattern_search(problem, state, value, cfg, rng, trace):
    """Random multi-row transfer moves; escapes ridges that pair moves cannot follow."""
    step = cfg.initial_step / 4
    iters = 0
    while step >= cfg.min_step * 100 and iters < 400:
        iters += 1
        nd = cfg.pattern_directions
        batch = []
        for b in range(len(problem.shapes)):
            base = np.broadcast_to(state[b], (nd, *problem.shapes[b])).copy()
            if b in problem.free:
                k = problem.shapes[b][-1]
                flat = base.reshape(nd, -1, k)
                delta = rng.normal(size=flat.shape)
                delta -= delta.mean(axis=-1, keepdims=True)
                delta *= step / np.maximum(np.abs(delta).max(axis=-1, keepdims=True), 1e-300)
                flat = np.clip(flat + delta, 0.0, None)
                flat /= flat.sum(axis=-1, keepdims=True)
                base = flat.reshape(nd, *problem.shapes[b])
            batch.append(base)
        vals = problem.evaluate(batch)
        i = int(np.argmax(vals))
        if vals[i] > value + IMPROVE_TOL:
            value = float(vals[i])
            state = [batch[b][i].copy() for b in range(len(problem.shapes))]
        else:
            step /= 2
    trace.iterations += iters
    return state, value


def maximize(problem: SimplexProblem, cfg: OptimizerConfig, starts: Sequence[list[np.ndarray]] = ()):
    """Run the multi-start search; returns ``(value, state, trace)``."""
    rng = np.random.default_rng(cfg.seed)
    trace = OptimizerTrace()
    seeded = [problem.complete({b: s[b] for b in problem.free}) for s in starts]
    grid = _grid_starts(problem, cfg, rng)
    candidates = seeded + grid
    values = problem.evaluate_states(candidates)
    # warm starts always run; remaining restarts go to the best lattice points
    order = list(range(len(seeded)))
    ranked = np.argsort(-values[len(seeded):], kind="stable") + len(seeded)
    seen = set()
    for idx in ranked:
        if len(order) >= len(seeded) + cfg.restarts:
            break
        key = round(float(values[idx]), 12)
        if key in seen:
            continue
        seen.add(key)
        order.append(int(idx))
    best_val, best_state = -np.inf, None
    for idx in order:
        state = [a.copy() for a in candidates[idx]]
        state, val = _coordinate_ascent(problem, state, float(values[idx]), cfg, trace)
        state, val = _pattern_search(problem, state, val, cfg, rng, trace)
        state, val = _coordinate_ascent(problem, state, val, cfg, trace)
        trace.best_per_restart.append(val)
        if val > best_val + IMPROVE_TOL:
            best_val, best_state = val, state
    trace.restarts = len(order)
    trace.evaluations = problem.evaluations
    return best_val, best_state, trace


def worker_count() -> int:
    """Worker cap from ``WTFB_THREADS`` (affects speed only)."""
    try:
        return max(1, int(os.environ.get("WTFB_THREADS", "1")))
    except ValueError:
        return 1
