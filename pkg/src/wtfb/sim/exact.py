"""Exact wiretapper equivocation for tiny three-block runs.

The wiretapper knows every codebook along with the key coloring and the
covering rule, and observes its outputs of all three blocks.  Its posterior
over the messages (w1 of blocks 1 and 2, w2 of block 2) sums over the hidden
variables: randomization indices, and every legitimate output sequence of
blocks 1 and 2 with the helper bin it induces.  The sum runs forward
over the state (helper bin, key), which is all block 2 needs from block 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..info import entropy_bits
from .codebook import generate_key_coloring

MAX_Y1_SEQUENCES = 2**14
MAX_HYPOTHESES = 2**24


class ExactSizeError(ValueError):
    """Run too large for exhaustive posterior computation."""


@dataclass
class ExactEquivocation:
    rate: float  # mean posterior entropy per channel symbol (bits)
    per_trial_bits: list[float]
    message_bits: int
    secrecy_rate: float  # H(W) / (nN) for uniform messages


class _Trial:
    """Likelihood tables of one trial's codebooks."""

    def __init__(self, scheme, trial: int):
        self.s = scheme
        self.trial = trial
        s = scheme
        self.y1_all = np.array(list(itertools.product(range(s.n1), repeat=s.N)), dtype=np.int64).reshape(-1, s.N)
        # P(y1, y2 | u) per symbol
        self.t_uyz = np.einsum("ux,xab->uab", s.pxu, s.law)
        self.keys = np.array(
            [generate_key_coloring(y, s.h_key, s.b2, s.seed, block=2) for y in self.y1_all]
            if s.b2 > 0 else np.ones(len(self.y1_all), dtype=np.int64)
        )
        self._bins: dict = {}

    def likelihood(self, block: int, index: int, z: np.ndarray) -> np.ndarray:
        """P(y1 sequence, z | codeword) for every y1 sequence."""
        u = self.s.codebooks(self.trial, block)[0][index].astype(np.int64)
        t = self.t_uyz[u[None, :], self.y1_all, z[None, :]]
        return np.prod(t, axis=1)

    def bin_law(self, block: int, index: int) -> np.ndarray:
        """P(helper bin | codeword, y1 sequence), shape (#y1, 2**bs)."""
        key = (block, index)
        if key in self._bins:
            return self._bins[key]
        s = self.s
        nb = 1 << s.bs
        out = np.zeros((len(self.y1_all), nb))
        if not s.helper:
            out[:, 0] = 1.0
        else:
            u = s.codebooks(self.trial, block)[0][index].astype(np.int64)
            vcb = s.codebooks(self.trial, block)[1]
            for r, y1 in enumerate(self.y1_all):
                hits = np.flatnonzero(s._typical_rows(u * s.n1 + y1, s.nv, vcb, s.t_cover))
                if hits.size:
                    out[r, hits[0] >> s.bb] = 1.0
                else:
                    out[r, :] = 1.0 / nb  # uniform random index on failure
        self._bins[key] = out
        return out


def exact_small_equivocation(scheme, records) -> ExactEquivocation:
    """Posterior message entropy of the wiretapper, averaged over the simulated trials."""
    s = scheme
    if s.n != 3:
        raise ExactSizeError("exact posterior is implemented for n = 3 blocks")
    if s.engine != "explicit":
        raise ExactSizeError("exact posterior needs explicit codebooks")
    if s.n1**s.N > MAX_Y1_SEQUENCES:
        raise ExactSizeError(f"|Y1|^N = {s.n1**s.N} legitimate sequences exceeds {MAX_Y1_SEQUENCES}")
    msg_bits = 2 * s.b1 + s.b2
    nb, nk, npr = 1 << s.bs, 1 << s.b2, 1 << s.bp
    if (1 << msg_bits) * npr * nb * nk > MAX_HYPOTHESES:
        raise ExactSizeError("too many message hypotheses for exhaustive posterior")
    per_trial = []
    for t, rec in enumerate(records):
        per_trial.append(_posterior_entropy(_Trial(s, t), rec))
        for b in range(s.n + 1):
            s._cb_cache.pop((t, b), None)
    n_sym = s.n * s.N
    return ExactEquivocation(
        rate=float(np.mean(per_trial)) / n_sym,
        per_trial_bits=per_trial,
        message_bits=msg_bits,
        secrecy_rate=msg_bits / n_sym,
    )


def _posterior_entropy(tr: _Trial, rec) -> float:
    s = tr.s
    z1, z2, z3 = (rec.blocks[i].y2.astype(np.int64) for i in (1, 2, 3))
    nb, nk, npr = 1 << s.bs, 1 << s.b2, 1 << s.bp
    key_onehot = np.zeros((len(tr.y1_all), nk))
    key_onehot[np.arange(len(tr.y1_all)), tr.keys - 1] = 1.0
    # last block: P(z3 | bin of block 2)
    last = np.array([
        np.prod(tr.t_uyz[s.codebooks(tr.trial, 3)[0][s.u_index(0, 0, 0, b)].astype(np.int64), :, z3].sum(axis=1))
        for b in range(nb)
    ])
    # block 2 transfer for each (w1, masked w2, bin1): P(z2, bin2 | .) summed over w'
    block2: dict = {}

    def transfer2(w1, w2m, b1):
        key = (w1, w2m, b1)
        if key not in block2:
            acc = np.zeros(nb)
            for wp in range(npr):
                idx = s.u_index(w1, w2m, wp, b1)
                acc += tr.likelihood(2, idx, z2) @ tr.bin_law(2, idx)
            block2[key] = acc / npr
        return block2[key]

    joint = np.zeros((1 << s.b1, 1 << s.b1, nk))  # [w1 block 1, w1 block 2, w2 block 2]
    for w1a in range(1 << s.b1):
        # state after block 1: P(z1, bin1, key2 | w1a)
        alpha = np.zeros((nb, nk))
        for wp in range(npr):
            idx = s.u_index(w1a, 0, wp, 0)
            lik = tr.likelihood(1, idx, z1)
            alpha += (tr.bin_law(1, idx) * lik[:, None]).T @ key_onehot
        alpha /= npr
        for w1b in range(1 << s.b1):
            for w2 in range(nk):
                total = 0.0
                for b1 in range(nb):
                    for k in range(nk):
                        if alpha[b1, k] == 0.0:
                            continue
                        total += alpha[b1, k] * (transfer2(w1b, w2 ^ k, b1) @ last)
                joint[w1a, w1b, w2] = total
    z = joint.sum()
    if z <= 0:
        return 0.0
    return float(entropy_bits((joint / z).ravel()))
