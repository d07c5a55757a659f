"""Wiretap channel models: construction, structure checks and JSON files."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .info import ConditionalPmf, DimensionError, DistributionError

FACTOR_TOL = 1e-9
DEGRADE_TOL = 1e-6
DEGRADE_CHECK_MAX = 4


class Structure(str, enum.Enum):
    GENERAL = "general"
    PHYSICALLY_DEGRADED = "physically_degraded"
    NON_DEGRADED = "non_degraded"


class ChannelFormatError(ValueError):
    """A channel file cannot be parsed or violates a channel invariant."""


@dataclass(frozen=True)
class BinaryWiretapParams:
    """Crossovers of the binary model Y1 = X + Z1, Y2 = X + Z2 (mod 2)."""

    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not (0.0 <= v < 0.5):
                raise ValueError(f"{name} must lie in [0, 0.5), got {v}")


@dataclass(frozen=True, eq=False)
class WiretapChannel:
    """Transition law P(y1, y2 | x) plus a structure tag.

    The tag is checked on construction: ``non_degraded`` requires the law to
    factor as P(y1|x) P(y2|x), ``physically_degraded`` requires P(y2|x) to be
    a stochastic degradation of P(y1|x).
    """

    law: ConditionalPmf
    y1_size: int
    y2_size: int
    structure_tag: Structure = Structure.GENERAL

    def __post_init__(self):
        if not isinstance(self.law, ConditionalPmf):
            object.__setattr__(self, "law", ConditionalPmf(np.asarray(self.law)))
        if len(self.law.input_sizes) != 1:
            raise DimensionError("channel law takes a single input X")
        if self.law.output_size != self.y1_size * self.y2_size:
            raise DimensionError(
                f"law output size {self.law.output_size} != y1_size*y2_size "
                f"= {self.y1_size * self.y2_size}"
            )
        object.__setattr__(self, "structure_tag", Structure(self.structure_tag))
        if self.structure_tag is Structure.NON_DEGRADED:
            res = factorization_residual(self.law3d)
            if res > FACTOR_TOL:
                raise ValueError(f"law does not factor as P(y1|x)P(y2|x): residual {res:.3g}")
        elif self.structure_tag is Structure.PHYSICALLY_DEGRADED:
            res, _ = degradation_residual(self.main_law, self.wiretap_law)
            if res > DEGRADE_TOL:
                raise ValueError(f"no degrading matrix maps P(y1|x) to P(y2|x): residual {res:.3g}")

    @classmethod
    def from_law3d(cls, law3d, structure: Structure | str = Structure.GENERAL) -> "WiretapChannel":
        law3d = np.asarray(law3d, dtype=float)
        if law3d.ndim != 3:
            raise DimensionError("law must be indexed [x][y1][y2]")
        nx, n1, n2 = law3d.shape
        return cls(ConditionalPmf(law3d.reshape(nx, n1 * n2)), n1, n2, Structure(structure))

    @property
    def x_size(self) -> int:
        return self.law.input_sizes[0]

    @property
    def law3d(self) -> np.ndarray:
        return self.law.table.reshape(self.x_size, self.y1_size, self.y2_size)

    @property
    def main_law(self) -> np.ndarray:
        """P(y1|x) as an array [x, y1]."""
        return self.law3d.sum(axis=2)

    @property
    def wiretap_law(self) -> np.ndarray:
        """P(y2|x) as an array [x, y2]."""
        return self.law3d.sum(axis=1)

    def __eq__(self, other):
        return (
            isinstance(other, WiretapChannel)
            and self.structure_tag == other.structure_tag
            and np.array_equal(self.law3d, other.law3d)
        )

    def __repr__(self):
        return (
            f"WiretapChannel(x={self.x_size}, y1={self.y1_size}, y2={self.y2_size}, "
            f"structure={self.structure_tag.value})"
        )


def _bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def make_binary_channel(params: BinaryWiretapParams) -> WiretapChannel:
    """Binary wiretap channel with independent noises of crossover p1 and p2."""
    law = np.einsum("xa,xb->xab", _bsc(params.p1), _bsc(params.p2))
    return WiretapChannel.from_law3d(law, Structure.NON_DEGRADED)


def make_degraded_channel(main: ConditionalPmf, degrader: ConditionalPmf) -> WiretapChannel:
    """Physically degraded channel X -> Y1 -> Y2 with P(y2|y1) = ``degrader``."""
    if main.table.ndim != 2 or degrader.table.ndim != 2:
        raise DimensionError("main and degrader must be single-input maps")
    if degrader.input_sizes[0] != main.output_size:
        raise DimensionError(
            f"degrader takes {degrader.input_sizes[0]} inputs but main channel has "
            f"{main.output_size} outputs"
        )
    law = np.einsum("xa,ab->xab", main.table, degrader.table)
    return WiretapChannel.from_law3d(law, Structure.PHYSICALLY_DEGRADED)


def factorization_residual(law3d: np.ndarray) -> float:
    """max |P(y1,y2|x) - P(y1|x)P(y2|x)|."""
    prod = np.einsum("xa,xb->xab", law3d.sum(axis=2), law3d.sum(axis=1))
    return float(np.max(np.abs(law3d - prod)))


def degradation_residual(main: np.ndarray, wiretap: np.ndarray):
    """Smallest sup-norm error of P(y2|x) ~ P(y1|x) D over stochastic D.

    Solved as a linear program in (D, t): minimize t subject to
    ``|main @ D - wiretap| <= t`` elementwise and rows of D on the simplex.
    Returns ``(residual, D)``.
    """
    nx, n1 = main.shape
    n2 = wiretap.shape[1]
    nd = n1 * n2
    # variables: D (row-major n1 x n2), then t
    c = np.zeros(nd + 1)
    c[-1] = 1.0
    a_ub, b_ub = [], []
    for x in range(nx):
        for b in range(n2):
            row = np.zeros(nd + 1)
            for a in range(n1):
                row[a * n2 + b] = main[x, a]
            pos = row.copy()
            pos[-1] = -1.0
            a_ub.append(pos)
            b_ub.append(wiretap[x, b])
            neg = -row
            neg[-1] = -1.0
            a_ub.append(neg)
            b_ub.append(-wiretap[x, b])
    a_eq = np.zeros((n1, nd + 1))
    for a in range(n1):
        a_eq[a, a * n2:(a + 1) * n2] = 1.0
    res = linprog(
        c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), A_eq=a_eq, b_eq=np.ones(n1),
        bounds=[(0, 1)] * nd + [(0, None)], method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"degradation LP failed: {res.message}")
    d = res.x[:nd].reshape(n1, n2)
    # evaluate the residual directly rather than trusting the LP objective
    return float(np.max(np.abs(main @ d - wiretap))), d


@dataclass(frozen=True)
class StructureReport:
    factorizes: bool
    factorization_residual: float
    degraded: bool | None  # None: alphabet too large, unchecked
    degradation_residual: float | None
    degrader: np.ndarray | None
    inferred: Structure

    @property
    def degraded_label(self) -> str:
        return "unchecked" if self.degraded is None else str(self.degraded).lower()


def validate_structure(ch: WiretapChannel) -> StructureReport:
    fres = factorization_residual(ch.law3d)
    factorizes = fres <= FACTOR_TOL
    if max(ch.x_size, ch.y1_size, ch.y2_size) <= DEGRADE_CHECK_MAX:
        dres, dmat = degradation_residual(ch.main_law, ch.wiretap_law)
        degraded = dres <= DEGRADE_TOL
    else:
        dres, dmat, degraded = None, None, None
    # the tag was verified at construction, so it always wins
    if ch.structure_tag is not Structure.GENERAL:
        inferred = ch.structure_tag
    elif factorizes:
        inferred = Structure.NON_DEGRADED
    elif degraded:
        inferred = Structure.PHYSICALLY_DEGRADED
    else:
        inferred = Structure.GENERAL
    return StructureReport(factorizes, fres, degraded, dres, dmat, inferred)


# --- file format ------------------------------------------------------------


def channel_to_dict(ch: WiretapChannel) -> dict:
    return {
        "x_size": ch.x_size,
        "y1_size": ch.y1_size,
        "y2_size": ch.y2_size,
        "law": ch.law3d.tolist(),
        "structure": ch.structure_tag.value,
    }


def save_channel(ch: WiretapChannel, path) -> None:
    # json writes floats with repr(), i.e. shortest round-trip digits
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=2) + "\n")


def _field(doc: dict, name: str, path) -> object:
    if name not in doc:
        raise ChannelFormatError(f"{path}: missing field '{name}'")
    return doc[name]


def channel_from_dict(doc: dict, source="<dict>") -> WiretapChannel:
    if not isinstance(doc, dict):
        raise ChannelFormatError(f"{source}: top level must be a JSON object")
    sizes = {}
    for name in ("x_size", "y1_size", "y2_size"):
        v = _field(doc, name, source)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ChannelFormatError(f"{source}: field '{name}' must be a positive integer, got {v!r}")
        sizes[name] = v
    raw = _field(doc, "law", source)
    try:
        law = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChannelFormatError(f"{source}: field 'law' is not a numeric nested array ({exc})") from None
    want = (sizes["x_size"], sizes["y1_size"], sizes["y2_size"])
    if law.shape != want:
        raise ChannelFormatError(f"{source}: field 'law' has shape {law.shape}, expected {want}")
    structure = doc.get("structure")
    try:
        tag = Structure(structure) if structure is not None else Structure.GENERAL
    except ValueError:
        raise ChannelFormatError(
            f"{source}: field 'structure' must be one of {[s.value for s in Structure]}"
        ) from None
    for x in range(want[0]):
        sl = law[x]
        if np.any(sl < 0):
            a, b = (int(i) for i in np.argwhere(sl < 0)[0])
            raise ChannelFormatError(f"{source}: negative probability in law[{x}][{a}][{b}]")
        s = float(sl.sum())
        if abs(s - 1.0) > 1e-9:
            raise ChannelFormatError(f"{source}: slice law[{x}] sums to {s:.12g}, not 1")
    try:
        ch = WiretapChannel.from_law3d(law, tag)
    except (ValueError, DistributionError) as exc:
        raise ChannelFormatError(f"{source}: {exc}") from None
    if structure is None:
        inferred = validate_structure(ch).inferred
        if inferred is not Structure.GENERAL:
            ch = WiretapChannel.from_law3d(law, inferred)
    return ch


def load_channel(path) -> WiretapChannel:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return channel_from_dict(doc, path)


def exhaustive_degrader_search(main: np.ndarray, wiretap: np.ndarray, steps: int = 201) -> float:
    """Brute-force min sup-norm degradation error for 2-output Y1, 2-output Y2.

    Grid search over D = [[a, 1-a], [b, 1-b]]; used as an independent check on
    the linear program.
    """
    if main.shape[1] != 2 or wiretap.shape[1] != 2:
        raise DimensionError("exhaustive search supports binary Y1 and Y2 only")
    grid = np.linspace(0, 1, steps)
    best = np.inf
    for a, b in itertools.product(grid, grid):
        d = np.array([[a, 1 - a], [b, 1 - b]])
        best = min(best, float(np.max(np.abs(main @ d - wiretap))))
    return best
