"""Quantize-and-bin source coding with decoder side information.

The encoder covers the source block x with a codeword u from a codebook of
``2**(N(R + R*))`` i.i.d. P(u) sequences, split into ``2**(NR)`` bins, and
sends the bin index.  The decoder looks for the unique codeword of that bin
that is jointly typical with its side information y.  A run succeeds when
the reconstruction is jointly typical with the source.
"""

from __future__ import annotations

import math

import numpy as np

from ..info import ConditionalPmf, JointPmf
from .codebook import iid_sequences, rng_for
from .scheme import AUTO_EXPLICIT_BITS, EXPLICIT_MAX_BITS, ConfigError
from .typical import log_count_minus_one, log_no_hit, log_prob_typical, sample_typical, typical_codes


def wz_encode_decode_trial(
    source_law: JointPmf,
    quantizer: ConditionalPmf,
    rates: tuple[float, float],
    N: int,
    seed: int,
    *,
    epsilon: float = 0.03,
    decode_epsilon: float | None = None,
    trial: int = 0,
    engine: str = "auto",
) -> bool:
    """One block of the binned quantizer; True when (x, u_hat) is typical for P(x,u).

    ``source_law`` is P(x, y); ``quantizer`` is P(u|x); ``rates`` is
    ``(R, R*)``: bin-index rate and in-bin rate in bits per symbol.
    ``epsilon`` is the covering slack and ``decode_epsilon`` (default
    ``2 * epsilon``) the bin decoder's slack: codewords found by covering sit
    near the edge of the covering band, so the decoder needs a wider one.
    Failures (covering, ambiguous or wrong bin decoding) are outcomes, not
    errors.  The ensemble engine scores any decoder output other than the
    encoder's codeword as a failure.
    """
    pxy = np.asarray(source_law.probs, dtype=float)
    q = np.asarray(quantizer.table, dtype=float)
    if pxy.ndim != 2 or q.shape[0] != pxy.shape[0]:
        raise ConfigError("source law must be P(x,y) and the quantizer P(u|x) with matching |X|")
    r, r_star = (float(v) for v in rates)
    if r < 0 or r_star < 0 or N < 1 or not epsilon > 0:
        raise ConfigError("rates must be non-negative, N positive and epsilon positive")
    eps_dec = 2.0 * epsilon if decode_epsilon is None else float(decode_epsilon)
    nx, ny = pxy.shape
    nu = q.shape[1]
    p_xu = pxy.sum(axis=1)[:, None] * q  # [x, u]
    p_yu = pxy.T @ q  # [y, u]
    pu = p_xu.sum(axis=0)
    b_bin = int(math.floor(N * r + 1e-9))
    b_in = int(math.floor(N * r_star + 1e-9))
    bits = b_bin + b_in
    if engine not in ("auto", "explicit", "ensemble"):
        raise ConfigError("engine must be auto, explicit or ensemble")
    if engine == "explicit" and bits > EXPLICIT_MAX_BITS:
        raise ConfigError(f"explicit codebook needs at most {EXPLICIT_MAX_BITS} index bits (got {bits})")
    explicit = engine == "explicit" or (engine == "auto" and bits <= AUTO_EXPLICIT_BITS)

    src = rng_for(seed, trial, 0, "source")
    flat = iid_sequences(src, pxy.ravel(), 1, N)[0].astype(np.int64)
    x, y = flat // ny, flat % ny
    cover_rng = rng_for(seed, trial, 0, "cover")

    if explicit:
        cb = iid_sequences(rng_for(seed, trial, 0, "codebook_u"), pu, 1 << bits, N).astype(np.int64)
        hits = np.flatnonzero(typical_codes(x[None, :] * nu + cb, p_xu, epsilon))
        if hits.size == 0:
            return False
        sent = int(hits[0])
        lo = (sent >> b_in) << b_in
        cand = cb[lo: lo + (1 << b_in)]
        dec = np.flatnonzero(typical_codes(y[None, :] * nu + cand, p_yu, eps_dec))
        if dec.size != 1:
            return False
        u_hat = cand[dec[0]]
        return bool(typical_codes((x * nu + u_hat)[None, :], p_xu, epsilon)[0])

    lq = log_prob_typical(x, nx, pu, p_xu, epsilon)
    if cover_rng.random() < math.exp(log_no_hit(bits * math.log(2.0), lq)):
        return False
    u = sample_typical(x, nx, pu, p_xu, epsilon, cover_rng)
    dec_rng = rng_for(seed, trial, 0, "decode")
    if not typical_codes((y * nu + u)[None, :], p_yu, eps_dec)[0]:
        return False
    lq_y = log_prob_typical(y, ny, pu, p_yu, eps_dec)
    return bool(dec_rng.random() < math.exp(log_no_hit(log_count_minus_one(b_in), lq_y)))


def wz_success_rate(source_law, quantizer, rates, N, seed, trials=20, **kw) -> float:
    """Fraction of successful trials."""
    return float(np.mean([
        wz_encode_decode_trial(source_law, quantizer, rates, N, seed, trial=t, **kw) for t in range(trials)
    ]))
