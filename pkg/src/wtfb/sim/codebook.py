"""Seeded random streams for codebooks, plus the feedback key coloring."""

from __future__ import annotations

import hashlib

import numpy as np

KEY_SLACK_BITS = 1.0

# stream identifiers; fixed so that adding a stream never shifts another
STREAMS = {
    "message": 1, "codeword_u": 2, "codebook_u": 3, "codebook_v": 4, "encoder_x": 5,
    "channel": 6, "cover": 7, "decode": 8, "source": 9, "wiretap": 10,
}


class KeyRateError(ValueError):
    """Key length exceeds what the fed-back output can hide from the wiretapper."""


def rng_for(seed: int, trial: int, block: int, stream: str) -> np.random.Generator:
    """Independent generator for one (seed, trial, block, stream) cell.

    Trials never share state, so results do not depend on evaluation order.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), trial, block, STREAMS[stream]]))


def iid_sequences(rng: np.random.Generator, probs, count: int, n: int) -> np.ndarray:
    """``count`` i.i.d. sequences of length ``n`` drawn from ``probs`` (uint8 symbols)."""
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random((count, n)), side="right").astype(np.uint8)


def sample_rows(rng: np.random.Generator, table: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """One draw from ``table[row]`` for each entry of ``rows`` (a stochastic map)."""
    cdf = np.cumsum(np.asarray(table, dtype=float), axis=-1)
    cdf[..., -1] = 1.0
    u = rng.random(len(rows))
    return (u[:, None] >= cdf[rows]).sum(axis=1).astype(np.int64)


def generate_key_coloring(
    y1_block,
    h_y1_given_uy2: float,
    key_bits: int,
    seed: int,
    block: int = 0,
    slack: float = KEY_SLACK_BITS,
) -> int:
    """Color a fed-back output block with a key in {1, ..., 2**key_bits}.

    The coloring is a keyed hash of the sequence, fixed by ``(seed, block)``
    and known to both legitimate ends.  ``h_y1_given_uy2`` is H(Y1|U,Y2) per
    symbol: the wiretapper cannot resolve more than N*H(Y1|U,Y2) bits of
    the block, so longer keys are rejected.
    """
    y1 = np.ascontiguousarray(np.asarray(y1_block, dtype=np.uint8))
    if key_bits < 0:
        raise KeyRateError("key_bits must be non-negative")
    if key_bits == 0:
        return 1
    budget = y1.size * h_y1_given_uy2 - slack
    if key_bits > budget:
        raise KeyRateError(
            f"key of {key_bits} bits exceeds N*H(Y1|U,Y2) - slack = {budget:.3f} bits; "
            "the key must satisfy R2 <= H(Y1|U,Y2)"
        )
    tag = f"{int(seed)}:{int(block)}".encode()
    digest = hashlib.blake2b(y1.tobytes(), key=tag[:64], digest_size=64).digest()
    return int.from_bytes(digest, "little") % (1 << key_bits) + 1
