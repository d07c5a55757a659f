"""Finite-alphabet probability tables and information measures.

Everything here is in bits.  Tables are dense numpy arrays that are frozen
(read-only) after validation, so values can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-9
MAX_DENSE = 10**7


class DistributionError(ValueError):
    """A probability table violates non-negativity or normalization."""


class AxisError(ValueError):
    """Axis groups overlap, are empty, or name axes that do not exist."""


class DimensionError(ValueError):
    """Table shapes do not compose."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_cap(shape: Sequence[int]) -> None:
    size = int(np.prod(shape, dtype=np.int64)) if len(shape) else 1
    if size > MAX_DENSE:
        raise DimensionError(f"dense table of {size} entries exceeds cap {MAX_DENSE}")


def _normalized(a: np.ndarray, axis, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise DistributionError(f"{what}: non-finite entry")
    if np.any(a < 0):
        idx = tuple(int(i) for i in np.argwhere(a < 0)[0])
        raise DistributionError(f"{what}: negative probability at index {idx}")
    s = a.sum(axis=axis, keepdims=True)
    bad = np.abs(s - 1.0) > NORM_TOL
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise DistributionError(
            f"{what}: slice {idx[:-1] if axis == -1 else ()} sums to "
            f"{float(s[idx]):.12g}, not 1 within {NORM_TOL:g}"
        )
    # slices already normalized up to rounding are kept bit-for-bit, which
    # makes construction idempotent (save/load round trips are exact)
    n = a.size // s.size
    fuzz = np.abs(s - 1.0) <= 4 * np.finfo(float).eps * max(n, 1)
    return np.where(fuzz, a, a / s)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Distribution of one finite random variable."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DimensionError("Pmf needs a non-empty 1-D vector")
        _check_cap(p.shape)
        object.__setattr__(self, "probs", _freeze(_normalized(p, None, "Pmf")))

    @property
    def support_size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, k: int) -> "Pmf":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point(cls, k: int, i: int) -> "Pmf":
        p = np.zeros(k)
        p[i] = 1.0
        return cls(p)

    def __eq__(self, other):
        return isinstance(other, Pmf) and np.array_equal(self.probs, other.probs)

    def __repr__(self):
        return f"Pmf({self.probs.tolist()})"


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense joint distribution; axis ``i`` is the ``i``-th random variable."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim == 0:
            raise DimensionError("JointPmf needs at least one axis")
        _check_cap(p.shape)
        object.__setattr__(self, "probs", _freeze(_normalized(p, None, "JointPmf")))

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def ndim(self) -> int:
        return self.probs.ndim

    def marginal(self, axes: Iterable[int]) -> np.ndarray:
        """Marginal table over ``axes`` (kept in the given order)."""
        axes = _axis_tuple(axes, self.ndim)
        drop = tuple(i for i in range(self.ndim) if i not in axes)
        m = self.probs.sum(axis=drop)
        kept = sorted(axes)
        return np.transpose(m, [kept.index(a) for a in axes])

    def marginal_pmf(self, axis: int) -> Pmf:
        return Pmf(self.marginal([axis]))

    def __eq__(self, other):
        return isinstance(other, JointPmf) and np.array_equal(self.probs, other.probs)


@dataclass(frozen=True, eq=False)
class ConditionalPmf:
    """Stochastic map; ``table[i1, ..., ik, o]`` is P(o | i1..ik)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim < 2:
            raise DimensionError("ConditionalPmf needs input axes and an output axis")
        _check_cap(t.shape)
        object.__setattr__(self, "table", _freeze(_normalized(t, -1, "ConditionalPmf")))

    @property
    def input_sizes(self) -> tuple[int, ...]:
        return self.table.shape[:-1]

    @property
    def output_size(self) -> int:
        return self.table.shape[-1]

    @classmethod
    def identity(cls, k: int) -> "ConditionalPmf":
        return cls(np.eye(k))

    @classmethod
    def constant(cls, input_sizes: Sequence[int], output: Pmf | int = 1) -> "ConditionalPmf":
        """Output independent of the inputs (``output`` may be a size for a point mass)."""
        if isinstance(output, int):
            output = Pmf.point(output, 0)
        return cls(np.broadcast_to(output.probs, (*input_sizes, output.support_size)))

    def __eq__(self, other):
        return isinstance(other, ConditionalPmf) and np.array_equal(self.table, other.table)


def _axis_tuple(axes, ndim: int) -> tuple[int, ...]:
    if isinstance(axes, (int, np.integer)):
        axes = (int(axes),)
    axes = tuple(int(a) for a in axes)
    if not axes:
        raise AxisError("empty axis group")
    if len(set(axes)) != len(axes):
        raise AxisError(f"repeated axis in {axes}")
    for a in axes:
        if not 0 <= a < ndim:
            raise AxisError(f"axis {a} out of range for {ndim}-axis table")
    return axes


# --- kernels on raw arrays --------------------------------------------------


def entropy_bits(p: np.ndarray, axis=None) -> np.ndarray:
    """Shannon entropy of (unnormalized-safe) probability arrays, 0 log 0 = 0.

    With ``axis`` given, entropies are taken over those axes and the rest are
    treated as batch dimensions.
    """
    p = np.asarray(p, dtype=float)
    pos = p > 0
    logs = np.zeros_like(p)
    np.log2(p, out=logs, where=pos)
    return -np.sum(p * logs, axis=axis)


def _h_raw(p: np.ndarray) -> float:
    return float(entropy_bits(p))


# --- public operations ------------------------------------------------------


def entropy(p: Pmf) -> float:
    """H(p) in bits."""
    return _h_raw(p.probs)


def binary_entropy(u):
    """h(u) = -u log u - (1-u) log(1-u); accepts scalars or arrays."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0) | (u_arr > 1)) or np.any(np.isnan(u_arr)):
        raise ValueError(f"binary_entropy domain is [0, 1], got {u}")
    out = entropy_bits(np.stack([u_arr, 1.0 - u_arr]), axis=0)
    return float(out) if np.ndim(out) == 0 else out


def star(u, v):
    """Binary convolution u(1-v) + (1-u)v."""
    ua, va = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    for name, a in (("u", ua), ("v", va)):
        if np.any((a < 0) | (a > 1)) or np.any(np.isnan(a)):
            raise ValueError(f"star: {name} must lie in [0, 1]")
    out = ua * (1 - va) + (1 - ua) * va
    return float(out) if np.ndim(out) == 0 else out


def joint_entropy(j: JointPmf, axes) -> float:
    return _h_raw(j.marginal(axes))


def mutual_information(j: JointPmf, group_a, group_b) -> float:
    """I(A;B) = H(A) + H(B) - H(A,B) for disjoint axis groups of ``j``."""
    a = _axis_tuple(group_a, j.ndim)
    b = _axis_tuple(group_b, j.ndim)
    if set(a) & set(b):
        raise AxisError(f"axis groups overlap: {a} and {b}")
    mi = joint_entropy(j, a) + joint_entropy(j, b) - joint_entropy(j, a + b)
    # rounding can push an exact zero slightly negative
    return max(mi, 0.0)


def conditional_entropy(j: JointPmf, target, given) -> float:
    """H(target | given); an empty ``given`` means the unconditional entropy."""
    t = _axis_tuple(target, j.ndim)
    g = tuple(given) if given is not None else ()
    if not g:
        return joint_entropy(j, t)
    g = _axis_tuple(g, j.ndim)
    if set(t) & set(g):
        raise AxisError(f"axis groups overlap: {t} and {g}")
    return max(joint_entropy(j, t + g) - joint_entropy(j, g), 0.0)


def conditional_mutual_information(j: JointPmf, group_a, group_b, given) -> float:
    """I(A;B|C) = H(A|C) - H(A|B,C)."""
    a = _axis_tuple(group_a, j.ndim)
    b = _axis_tuple(group_b, j.ndim)
    c = _axis_tuple(given, j.ndim)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise AxisError("axis groups overlap")
    val = conditional_entropy(j, a, c) - conditional_entropy(j, a, b + c)
    return max(val, 0.0)


# Axis order of the joint built by assemble_joint.
U, V, X, Y1, Y2 = range(5)


def assemble_joint(pu: Pmf, px_given_u: ConditionalPmf, channel, pv_given_uy1: ConditionalPmf) -> JointPmf:
    """Joint law P(u,v,x,y1,y2) = P(v|u,y1) P(y1,y2|x) P(u) P(x|u).

    ``channel`` is a :class:`~wtfb.channel.WiretapChannel` or a 3-D array
    ``law[x, y1, y2]``.  Axes of the result are ``(U, V, X, Y1, Y2)``.
    """
    law = np.asarray(getattr(channel, "law3d", channel), dtype=float)
    if law.ndim != 3:
        raise DimensionError("channel law must be indexed [x, y1, y2]")
    nu = pu.support_size
    if px_given_u.table.shape != (nu, law.shape[0]):
        raise DimensionError(
            f"P(x|u) has shape {px_given_u.table.shape}, expected {(nu, law.shape[0])}"
        )
    if pv_given_uy1.table.ndim != 3 or pv_given_uy1.table.shape[:2] != (nu, law.shape[1]):
        raise DimensionError(
            f"P(v|u,y1) has shape {pv_given_uy1.table.shape}, expected ({nu}, {law.shape[1]}, |V|)"
        )
    _check_cap((nu, pv_given_uy1.output_size, *law.shape))
    joint = np.einsum(
        "u,ux,xab,uav->uvxab", pu.probs, px_given_u.table, law, pv_given_uy1.table
    )
    return JointPmf(joint)
