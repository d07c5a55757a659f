"""Strong typicality: explicit tests and exact probabilities for random codewords.

A tuple of sequences is epsilon-typical for a reference joint pmf P when
every cell's empirical frequency is within epsilon of P (cells with P = 0
therefore allow up to epsilon*N occurrences).

For an i.i.d. random sequence R ~ prod P_R checked against a fixed context
sequence C, positions with different context symbols are independent.  The
probability of joint typicality is then a product over context symbols
("columns") of multinomial band probabilities, computed exactly here with a
backward dynamic program in log space.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, logsumexp

from ..info import DimensionError, JointPmf, Pmf

TYPICAL_TOL = 1e-12


def encode_tuple(seqs, sizes) -> np.ndarray:
    """Mixed-radix cell codes of aligned symbol sequences (first is most significant)."""
    code = np.zeros(np.shape(seqs[0]), dtype=np.int64)
    for s, k in zip(seqs, sizes):
        code = code * k + np.asarray(s, dtype=np.int64)
    return code


def type_counts(codes: np.ndarray, ncells: int) -> np.ndarray:
    """Cell counts for each row of ``codes`` (shape ``(..., N)``)."""
    codes = np.asarray(codes, dtype=np.int64)
    lead = codes.shape[:-1]
    flat = codes.reshape(-1, codes.shape[-1])
    offs = (np.arange(flat.shape[0], dtype=np.int64) * ncells)[:, None]
    counts = np.bincount((flat + offs).ravel(), minlength=flat.shape[0] * ncells)
    return counts.reshape(*lead, ncells)


def typical_codes(codes: np.ndarray, target: np.ndarray, epsilon: float) -> np.ndarray:
    """Typicality of each row of cell codes against the flat ``target`` pmf."""
    target = np.asarray(target, dtype=float).ravel()
    n = np.shape(codes)[-1]
    freq = type_counts(codes, target.size) / n
    return np.all(np.abs(freq - target) <= epsilon + TYPICAL_TOL, axis=-1)


def typical_set_test(seq, ref, epsilon: float) -> bool:
    """True iff ``seq`` is epsilon-typical for ``ref``.

    ``seq`` is a 1-D symbol vector when ``ref`` is a :class:`Pmf`, and an
    ``(N, k)`` array of symbol tuples (or a list of k aligned vectors) when
    ``ref`` is a k-axis :class:`JointPmf`.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    probs = ref.probs
    if isinstance(ref, Pmf):
        seqs = [np.asarray(seq)]
    elif isinstance(ref, JointPmf):
        arr = np.asarray(seq)
        if isinstance(seq, (list, tuple)) and len(seq) == ref.ndim and np.ndim(seq[0]) == 1:
            seqs = [np.asarray(s) for s in seq]
        elif arr.ndim == 2 and arr.shape[1] == ref.ndim:
            seqs = [arr[:, j] for j in range(ref.ndim)]
        else:
            raise DimensionError(f"sequence of tuples must have {ref.ndim} components")
    else:
        raise TypeError("ref must be a Pmf or JointPmf")
    sizes = probs.shape
    n = len(seqs[0])
    if n < 1:
        raise ValueError("sequence must be non-empty")
    for s, k in zip(seqs, sizes):
        if len(s) != n:
            raise DimensionError("component sequences differ in length")
        if np.any((s < 0) | (s >= k)) or not np.issubdtype(s.dtype, np.integer):
            raise DimensionError(f"symbols must be integers in [0, {k})")
    return bool(typical_codes(encode_tuple(seqs, sizes), probs, epsilon))


# --- exact probabilities for random codewords --------------------------------


def _bands(target_col: np.ndarray, n: int, epsilon: float, m: int):
    lo = np.ceil(n * (target_col - epsilon) - 1e-9).astype(np.int64)
    hi = np.floor(n * (target_col + epsilon) + 1e-9).astype(np.int64)
    # lo may exceed m: that column cannot reach its band
    return np.maximum(lo, 0), np.minimum(hi, m)


def _log_binom(c, r, p: float):
    """log Binomial(c; r, p) on broadcast integer arrays, -inf outside support."""
    c, r = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(r, dtype=float))
    ok = (c >= 0) & (c <= r)
    cs, rs = np.where(ok, c, 0.0), np.where(ok, r, 0.0)
    if p <= 0.0:
        out = np.where(cs == 0, 0.0, -np.inf)
    elif p >= 1.0:
        out = np.where(cs == rs, 0.0, -np.inf)
    else:
        out = (gammaln(rs + 1) - gammaln(cs + 1) - gammaln(rs - cs + 1)
               + cs * math.log(p) + (rs - cs) * math.log1p(-p))
    return np.where(ok, out, -np.inf)


def _column_tables(m: int, probs: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Suffix tables f[j][r] = log P(counts j..K-1 all in band | r positions left)."""
    k = probs.size
    r = np.arange(m + 1)
    tables = [None] * (k + 1)
    last = np.where((r >= lo[k - 1]) & (r <= hi[k - 1]), 0.0, -np.inf)
    tables[k - 1] = last
    rest = probs[::-1].cumsum()[::-1]  # mass of symbols j..K-1
    for j in range(k - 2, -1, -1):
        pj = 0.0 if rest[j] <= 0 else min(probs[j] / rest[j], 1.0)
        if hi[j] < lo[j]:
            tables[j] = np.full(m + 1, -np.inf)
            continue
        cs = np.arange(lo[j], hi[j] + 1)  # hi <= m keeps this small
        rem = r[:, None] - cs[None, :]
        nxt = np.where(rem >= 0, tables[j + 1][np.clip(rem, 0, m)], -np.inf)
        tables[j] = logsumexp(_log_binom(cs[None, :], r[:, None], pj) + nxt, axis=1)
    return tables


def log_prob_typical(context: np.ndarray, n_context: int, rand_probs, target, epsilon: float) -> float:
    """log P(an i.i.d. ``rand_probs`` sequence is typical with ``context``).

    ``target[c, j]`` is the reference probability of the cell (context c,
    random symbol j).  Returns ``-inf`` when no random sequence qualifies.
    """
    target = np.asarray(target, dtype=float)
    probs = np.asarray(rand_probs, dtype=float)
    n = len(context)
    counts = np.bincount(np.asarray(context, dtype=np.int64), minlength=n_context)
    total = 0.0
    for c in range(n_context):
        m = int(counts[c])
        lo, hi = _bands(target[c], n, epsilon, m)
        if m == 0:
            if np.any(lo > 0):
                return -np.inf
            continue
        f = _column_tables(m, probs, lo, hi)[0][m]
        if not np.isfinite(f):
            return -np.inf
        total += f
    return float(total)


def sample_typical(context: np.ndarray, n_context: int, rand_probs, target, epsilon: float, rng):
    """Draw an i.i.d. ``rand_probs`` sequence conditioned on typicality with ``context``.

    Returns ``None`` when the conditioning event is empty.
    """
    target = np.asarray(target, dtype=float)
    probs = np.asarray(rand_probs, dtype=float)
    context = np.asarray(context, dtype=np.int64)
    n = len(context)
    k = probs.size
    rest = probs[::-1].cumsum()[::-1]
    out = np.empty(n, dtype=np.int64)
    for c in range(n_context):
        pos = np.flatnonzero(context == c)
        m = pos.size
        lo, hi = _bands(target[c], n, epsilon, m)
        if m == 0:
            if np.any(lo > 0):
                return None
            continue
        tables = _column_tables(m, probs, lo, hi)
        if not np.isfinite(tables[0][m]):
            return None
        r = m
        counts = np.zeros(k, dtype=np.int64)
        for j in range(k - 1):
            pj = 0.0 if rest[j] <= 0 else min(probs[j] / rest[j], 1.0)
            cs = np.arange(lo[j], min(hi[j], r) + 1)
            w = _log_binom(cs, r, pj) + tables[j + 1][r - cs]
            w = np.exp(w - logsumexp(w))
            counts[j] = cs[rng.choice(cs.size, p=w / w.sum())]
            r -= counts[j]
        counts[k - 1] = r
        sym = np.repeat(np.arange(k), counts)
        out[pos] = rng.permutation(sym)
    return out


def log_no_hit(log_count: float, log_q: float) -> float:
    """log P(none of ``exp(log_count)`` independent trials succeeds), success prob ``exp(log_q)``."""
    if log_count == -np.inf or log_q == -np.inf:
        return 0.0
    q = math.exp(log_q)
    if q >= 1.0:
        return -np.inf
    # -log(1-q) without cancellation for tiny q
    l_neg = log_q if q < 1e-12 else math.log(-math.log1p(-q))
    return -math.exp(log_count + l_neg) if log_count + l_neg < 700 else -np.inf


def log_count_minus_one(bits: int) -> float:
    """log(2**bits - 1) (natural log); -inf for bits = 0."""
    if bits <= 0:
        return -np.inf
    if bits > 60:
        return bits * math.log(2.0)
    return math.log(2.0**bits - 1)
