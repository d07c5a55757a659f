"""Monte Carlo simulation of the block-Markov feedback schemes.

One trial sends ``n`` blocks of ``N`` symbols.  Block ``i < n`` carries
``(w1, w2 xor k_i, w', w*_{i-1})`` where ``k_i`` is a key hashed from the
fed-back output of block ``i-1`` and ``w*_{i-1}`` is the bin of the helper
sequence v that the transmitter picked to describe block ``i-1``.  Block
``n`` carries only ``w*_{n-1}``.  The receiver decodes backwards: block
``n`` yields ``w*_{n-1}``, which locates the helper bin of block ``n-1``;
the helper is decoded from y1, then u from (y1, v), which yields
``w*_{n-2}``, and so on.

Two search engines implement the typicality decoders:

``explicit``
    Codebooks are materialized from seeded generators and searched
    exhaustively.  Limited to small index widths.
``ensemble``
    Only the transmitted codewords are drawn.  For the competing codewords
    the engine uses the exact probability that an independent random
    codeword is typical with the observed context (see
    :mod:`wtfb.sim.typical`) and samples the search outcome.  This reproduces
    the random-coding ensemble at block lengths where no codebook fits in
    memory.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..channel import WiretapChannel
from ..info import ConditionalPmf, Pmf, assemble_joint, conditional_entropy, entropy_bits
from ..info import U as AX_U, Y1 as AX_Y1, Y2 as AX_Y2
from ..optimize import AuxiliarySystem, worker_count
from .codebook import KeyRateError, generate_key_coloring, iid_sequences, rng_for, sample_rows
from .rates import RateAllocation, RateInfeasibleError, dmc_rate_check, rate_region_check
from .typical import (
    log_count_minus_one,
    log_no_hit,
    log_prob_typical,
    sample_typical,
    typical_codes,
)

ENGINES = ("auto", "explicit", "ensemble")
EXPLICIT_MAX_BITS = 22
AUTO_EXPLICIT_BITS = 12
EXPLICIT_MAX_SYMBOLS = 2**26
HISTOGRAM_MAX_BITS = 16
MI_FOLD_BITS = 2
EXACT_MAX_N = 8
CHUNK_SYMBOLS = 2**22


class ConfigError(ValueError):
    """Simulation configuration is malformed or outside the engine's limits."""


@dataclass(frozen=True)
class SimConfig:
    n: int
    N: int
    rates: RateAllocation
    epsilon: float = 0.03
    seed: int = 42
    trials: int = 20
    engine: str = "auto"
    aux: AuxiliarySystem | None = None

    def __post_init__(self):
        if int(self.n) < 3:
            raise ConfigError("n must be at least 3 (first and last blocks are special)")
        if int(self.N) < 1:
            raise ConfigError("N must be positive")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if int(self.trials) < 1:
            raise ConfigError("trials must be positive")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = {
            "n": self.n, "N": self.N, "rates": self.rates.to_dict(), "epsilon": self.epsilon,
            "seed": self.seed, "trials": self.trials, "engine": self.engine,
        }
        if self.aux is not None:
            d["aux"] = self.aux.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {"n", "N", "rates", "epsilon", "seed", "trials", "engine", "aux"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown SimConfig fields {sorted(unknown)}")
        for k in ("n", "N", "rates"):
            if k not in d:
                raise ConfigError(f"SimConfig missing field '{k}'")
        try:
            aux = AuxiliarySystem.from_dict(d["aux"]) if d.get("aux") is not None else None
            return cls(
                n=int(d["n"]), N=int(d["N"]), rates=RateAllocation.from_dict(d["rates"]),
                epsilon=float(d.get("epsilon", 0.03)), seed=int(d.get("seed", 42)),
                trials=int(d.get("trials", 20)), engine=str(d.get("engine", "auto")), aux=aux,
            )
        except (TypeError, ValueError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid SimConfig: {exc}") from None


@dataclass
class SimReport:
    decode_error_rate: float
    measured_equivocation_rate: float | None
    key_histogram: list[int]
    encoder_failure_rate: float
    equivocation_method: str = "none"
    equivocation_bound: float | None = None
    key_message_mi: float = 0.0
    engine: str = "explicit"
    message_blocks: int = 0
    config: dict = field(default_factory=dict)
    rate_check: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# --- engine -----------------------------------------------------------------


def _rand_index(rng: np.random.Generator, bits: int) -> int:
    if bits <= 0:
        return 0
    raw = int.from_bytes(rng.bytes((bits + 7) // 8), "little")
    return raw & ((1 << bits) - 1)


@dataclass
class BlockRecord:
    u_index: int
    u: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    v_index: int = 0
    v: np.ndarray | None = None
    cover_failed: bool = False


@dataclass
class TrialRecord:
    w1: list[int]
    w2: list[int]
    wp: list[int]
    keys: list[int]
    blocks: list[BlockRecord]
    block_errors: list[bool] = field(default_factory=list)


class Scheme:
    """Codebook parameters and encode/decode steps shared by every trial.

    ``law3d`` is P(y1, y2 | x); ``aux`` the auxiliary system; the key length
    is checked against H(Y1|U,Y2) of the assembled joint.
    """

    def __init__(self, law3d: np.ndarray, aux: AuxiliarySystem, rates: RateAllocation, cfg: SimConfig):
        self.law = np.asarray(law3d, dtype=float)
        self.aux = aux
        self.cfg = cfg
        self.N = int(cfg.N)
        self.n = int(cfg.n)
        self.eps = float(cfg.epsilon)
        self.seed = int(cfg.seed)
        self.nx, self.n1, self.n2 = self.law.shape
        self.nu = aux.u_size
        self.nv = aux.v_size
        joint = assemble_joint(aux.pu, aux.px_given_u, self.law, aux.pv_given_uy1)
        p = joint.probs.sum(axis=(2, 4))  # [u, v, y1]
        self.pu = aux.pu.probs
        self.pv = p.sum(axis=(0, 2))
        self.pxu = aux.px_given_u.table
        self.main = self.law.sum(axis=2)  # [x, y1]
        with np.errstate(invalid="ignore", divide="ignore"):
            self.wiretap_given = np.where(self.main[..., None] > 0, self.law / self.main[..., None], 1.0 / self.n2)
        # typicality targets as [context, random symbol]
        self.t_cover = p.transpose(0, 2, 1).reshape(self.nu * self.n1, self.nv)  # ctx (u,y1), rand v
        self.t_helper = p.sum(axis=0).T  # ctx y1, rand v
        self.t_main = p.transpose(2, 1, 0).reshape(self.n1 * self.nv, self.nu)  # ctx (y1,v), rand u
        self.t_last = p.sum(axis=1).T  # ctx y1, rand u
        self.h_key = conditional_entropy(joint, [AX_Y1], [AX_Y2, AX_U])
        self.helper = self.nv > 1
        b = rates.bits(self.N)
        self.b1, self.b2, self.bp, self.bs, self.bt = b["r1"], b["r2"], b["r_prime"], b["r_star"], b["r_tilde"]
        if not self.helper:
            self.bt = self.bs
        self.bb = self.bt - self.bs
        self.bu = self.b1 + self.b2 + self.bp + self.bs
        self.engine = self._resolve_engine(cfg.engine)
        if self.b2 > 0:
            budget = self.N * self.h_key - 1.0
            if self.b2 > budget:
                raise KeyRateError(
                    f"key of {self.b2} bits exceeds N*H(Y1|U,Y2) - slack = {budget:.3f} bits; "
                    "the key must satisfy R2 <= H(Y1|U,Y2)"
                )
        self._cb_cache: dict = {}

    def _resolve_engine(self, requested: str) -> str:
        widest = max(self.bu, self.bt)
        fits = widest <= EXPLICIT_MAX_BITS and (2**widest) * self.N <= EXPLICIT_MAX_SYMBOLS
        if requested == "explicit":
            if not fits:
                raise ConfigError(
                    f"explicit codebooks need at most {EXPLICIT_MAX_BITS} index bits per block "
                    f"(got {widest}); use engine='ensemble'"
                )
            return "explicit"
        if requested == "ensemble":
            return "ensemble"
        return "explicit" if fits and widest <= AUTO_EXPLICIT_BITS else "ensemble"

    # index layout: ((w1 * 2^b2 + w2) * 2^bp + w') * 2^bs + w*
    def u_index(self, w1: int, w2: int, wp: int, ws: int) -> int:
        return ((((w1 << self.b2) | w2) << self.bp) | wp) << self.bs | ws

    def codebooks(self, trial: int, block: int):
        key = (trial, block)
        if key not in self._cb_cache:
            ucb = iid_sequences(rng_for(self.seed, trial, block, "codebook_u"), self.pu, 1 << self.bu, self.N)
            vcb = iid_sequences(rng_for(self.seed, trial, block, "codebook_v"), self.pv, 1 << self.bt, self.N)
            self._cb_cache[key] = (ucb, vcb)
        return self._cb_cache[key]

    def _typical_rows(self, ctx, n_rand: int, cands, target) -> np.ndarray:
        """Typicality of every candidate row with the context, in memory-bounded chunks."""
        step = max(1, CHUNK_SYMBOLS // max(self.N, 1))
        base = ctx[None, :].astype(np.int64) * n_rand
        return np.concatenate([
            typical_codes(base + cands[k: k + step].astype(np.int64), target, self.eps)
            for k in range(0, len(cands), step)
        ])

    # --- transmitter ---

    def _cover(self, trial, block, u, y1):
        """Helper index chosen for (u, y1) and whether covering failed."""
        if not self.helper:
            return 0, np.zeros(self.N, dtype=np.int64), False
        rng = rng_for(self.seed, trial, block, "cover")
        ctx = u.astype(np.int64) * self.n1 + y1
        if self.engine == "explicit":
            _, vcb = self.codebooks(trial, block)
            ok = self._typical_rows(ctx, self.nv, vcb, self.t_cover)
            hits = np.flatnonzero(ok)
            if hits.size:
                return int(hits[0]), vcb[hits[0]].astype(np.int64), False
            idx = _rand_index(rng, self.bt)
            return idx, vcb[idx].astype(np.int64), True
        lq = log_prob_typical(ctx, self.nu * self.n1, self.pv, self.t_cover, self.eps)
        p_none = math.exp(log_no_hit(self.bt * math.log(2.0), lq))
        if rng.random() < p_none:
            return _rand_index(rng, self.bt), iid_sequences(rng, self.pv, 1, self.N)[0].astype(np.int64), True
        v = sample_typical(ctx, self.nu * self.n1, self.pv, self.t_cover, self.eps, rng)
        return _rand_index(rng, self.bt), v, False

    def transmit(self, trial: int) -> TrialRecord:
        rng = rng_for(self.seed, trial, 0, "message")
        n = self.n
        w1 = [0] + [_rand_index(rng, self.b1) for _ in range(1, n)] + [0]
        w2 = [0, 0] + [_rand_index(rng, self.b2) for _ in range(2, n)] + [0]
        wp = [0] + [_rand_index(rng, self.bp) for _ in range(1, n)] + [0]
        keys = [1] * (n + 1)
        blocks: list[BlockRecord | None] = [None]
        ws_prev = 0
        for i in range(1, n + 1):
            if 2 <= i <= n - 1:
                keys[i] = generate_key_coloring(blocks[i - 1].y1, self.h_key, self.b2, self.seed, block=i)
            if i < n:
                idx = self.u_index(w1[i], w2[i] ^ (keys[i] - 1), wp[i], ws_prev)
            else:
                idx = self.u_index(0, 0, 0, ws_prev)
            if self.engine == "explicit":
                u = self.codebooks(trial, i)[0][idx].astype(np.int64)
            else:
                u = iid_sequences(rng_for(self.seed, trial, i, "codeword_u"), self.pu, 1, self.N)[0].astype(np.int64)
            x = sample_rows(rng_for(self.seed, trial, i, "encoder_x"), self.pxu, u)
            y1 = sample_rows(rng_for(self.seed, trial, i, "channel"), self.main, x)
            y2 = sample_rows(rng_for(self.seed, trial, i, "wiretap"), self.wiretap_given.reshape(-1, self.n2),
                             x * self.n1 + y1)
            rec = BlockRecord(idx, u, y1, y2)
            if i < n:
                rec.v_index, rec.v, rec.cover_failed = self._cover(trial, i, u, y1)
                ws_prev = rec.v_index >> self.bb
            blocks.append(rec)
        return TrialRecord(w1, w2, wp, keys, blocks)

    # --- receiver ---

    def _unique_explicit(self, ctx, n_rand, cands, target, true_pos):
        ok = self._typical_rows(ctx, n_rand, cands, target)
        hits = np.flatnonzero(ok)
        return hits.size == 1 and hits[0] == true_pos

    def _unique_ensemble(self, rng, ctx, n_ctx, rand_probs, target, true_seq, log_competitors):
        codes = ctx * len(rand_probs) + true_seq
        if not typical_codes(codes[None, :], target, self.eps)[0]:
            return False
        if log_competitors == -np.inf:
            return True
        lq = log_prob_typical(ctx, n_ctx, rand_probs, target, self.eps)
        return rng.random() < math.exp(log_no_hit(log_competitors, lq))

    def _decode_last(self, trial, rec: BlockRecord) -> bool:
        if self.bs == 0:
            return True
        n = self.n
        if self.engine == "explicit":
            ucb = self.codebooks(trial, n)[0]
            cand = ucb[: 1 << self.bs]  # w1 = w2 = w' = 0
            return self._unique_explicit(rec.y1, self.nu, cand, self.t_last, rec.u_index)
        rng = rng_for(self.seed, trial, n, "decode")
        return self._unique_ensemble(rng, rec.y1, self.n1, self.pu, self.t_last, rec.u, log_count_minus_one(self.bs))

    def _decode_block(self, trial, i, rec: BlockRecord) -> bool:
        """Two-stage decode of block i given the correct helper bin."""
        bin_ = rec.v_index >> self.bb
        if self.engine == "explicit":
            ucb, vcb = self.codebooks(trial, i)
            if self.helper:
                lo = bin_ << self.bb
                cand_v = vcb[lo: lo + (1 << self.bb)]
                ok = self._typical_rows(rec.y1, self.nv, cand_v, self.t_helper)
                hits = np.flatnonzero(ok)
                if hits.size != 1:
                    return False
                v_hat = cand_v[hits[0]].astype(np.int64)
                if lo + hits[0] != rec.v_index:
                    return False
            else:
                v_hat = np.zeros(self.N, dtype=np.int64)
            if i == 1:
                w1s = np.arange(1 << self.b1, dtype=np.int64)
                wps = np.arange(1 << self.bp, dtype=np.int64)
                idx = (((w1s[:, None] << self.b2) << self.bp) | wps[None, :]) << self.bs
                idx = idx.ravel()
            else:
                idx = np.arange(1 << self.bu, dtype=np.int64)
            ctx = rec.y1 * self.nv + v_hat
            ok = self._typical_rows(ctx, self.nu, ucb[idx], self.t_main)
            hits = idx[np.flatnonzero(ok)]
            return hits.size == 1 and hits[0] == rec.u_index
        rng = rng_for(self.seed, trial, i, "decode")
        if self.helper:
            if not self._unique_ensemble(rng, rec.y1, self.n1, self.pv, self.t_helper, rec.v,
                                         log_count_minus_one(self.bb)):
                return False
            v = rec.v
        else:
            v = np.zeros(self.N, dtype=np.int64)
        free = self.b1 + self.bp if i == 1 else self.bu
        ctx = rec.y1 * self.nv + v
        return self._unique_ensemble(rng, ctx, self.n1 * self.nv, self.pu, self.t_main, rec.u,
                                     log_count_minus_one(free))

    def decode(self, trial: int, tr: TrialRecord) -> list[bool]:
        """Per-block message errors for blocks 1..n-1 (backward decoding)."""
        n = self.n
        star_ok = self._decode_last(trial, tr.blocks[n])
        errors = [False] * n
        for i in range(n - 1, 0, -1):
            ok = star_ok and self._decode_block(trial, i, tr.blocks[i])
            errors[i] = not ok
            # a wrong u carries a wrong bin index into the previous block
            star_ok = ok or self.bs == 0
        return errors[1:]

    def bit_rates(self) -> RateAllocation:
        """Rates actually realized by the integer index widths."""
        n = self.N
        return RateAllocation(self.b1 / n, self.b2 / n, self.bp / n, self.bs / n, max(self.bt, self.bs) / n)

    def run_trial(self, trial: int) -> TrialRecord:
        try:
            tr = self.transmit(trial)
            tr.block_errors = self.decode(trial, tr)
        finally:
            for b in range(self.n + 1):
                self._cb_cache.pop((trial, b), None)
        return tr


def _map_trials(fn, trials: int):
    workers = min(worker_count(), trials)
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def plugin_mutual_information(a, b) -> float:
    """Plug-in I(A;B) in bits from paired samples of small integers."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0:
        return 0.0
    joint = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(joint, (a, b), 1.0)
    joint /= joint.sum()
    return max(float(entropy_bits(joint.sum(1)) + entropy_bits(joint.sum(0)) - entropy_bits(joint)), 0.0)


def _summarize(scheme: Scheme, records: list[TrialRecord]) -> dict:
    n = scheme.n
    errs = [e for r in records for e in r.block_errors]
    covers = [b.cover_failed for r in records for b in r.blocks[1:n]]
    hist_bits = min(scheme.b2, HISTOGRAM_MAX_BITS)
    hist = np.zeros(1 << hist_bits, dtype=np.int64)
    keys, msgs = [], []
    fold = (1 << min(scheme.b2, MI_FOLD_BITS)) - 1
    for r in records:
        for i in range(2, n):
            hist[(r.keys[i] - 1) & ((1 << hist_bits) - 1)] += 1
            keys.append((r.keys[i] - 1) & fold)
            msgs.append(r.w2[i] & fold)
    return {
        "decode_error_rate": float(np.mean(errs)) if errs else 0.0,
        "encoder_failure_rate": float(np.mean(covers)) if covers else 0.0,
        "key_histogram": hist.tolist(),
        "key_message_mi": plugin_mutual_information(keys, msgs) if scheme.b2 > 0 else 0.0,
    }


def default_aux(x_size: int, y1_size: int, px=None) -> AuxiliarySystem:
    """U = X with the given (default uniform) input and a constant helper V."""
    px = Pmf.uniform(x_size).probs if px is None else np.asarray(px, dtype=float)
    return AuxiliarySystem.from_arrays(px, np.eye(x_size), np.ones((x_size, y1_size, 1)))


def _aux_for(ch_law3d: np.ndarray, aux: AuxiliarySystem | None) -> AuxiliarySystem:
    if aux is None:
        return default_aux(ch_law3d.shape[0], ch_law3d.shape[1])
    if aux.x_size != ch_law3d.shape[0] or aux.y1_size != ch_law3d.shape[1]:
        raise ConfigError("auxiliary system does not match the channel alphabets")
    return aux


def equivocation_lower_bound(quantities: dict, rates: RateAllocation, n: int) -> float:
    """Plug-in value of the block-Markov equivocation lower bound (slack terms dropped)."""
    r = rates
    return ((n - 1) / n * (r.r1 + r.r_prime + r.r_star) + (n - 2) / n * r.r2
            - quantities["I(Y2;U)"] + (n - 2) / n * quantities["H(Y1|Y2,U)"])


def run_wiretap_feedback_sim(ch: WiretapChannel, cfg: SimConfig, *, check_rates: bool = True) -> SimReport:
    """Simulate the secrecy feedback scheme on ``ch`` and report error and secrecy statistics.

    Raises :class:`RateInfeasibleError` when the rates violate any scheme
    constraint (unless ``check_rates`` is False, which runs the scheme
    anyway) and :class:`KeyRateError` when the key is longer than the
    fed-back output can hide.
    """
    law = ch.law3d
    aux = _aux_for(law, cfg.aux)
    check = rate_region_check(ch, aux, cfg.rates)
    if check_rates and not check.ok:
        raise RateInfeasibleError(check)
    scheme = Scheme(law, aux, cfg.rates, cfg)
    records = _map_trials(scheme.run_trial, cfg.trials)
    summary = _summarize(scheme, records)
    bound = equivocation_lower_bound(check.quantities, scheme.bit_rates(), scheme.n)
    measured, method = bound, "plug-in-bound"
    if scheme.N <= EXACT_MAX_N and scheme.n == 3 and scheme.engine == "explicit":
        from .exact import ExactSizeError, exact_small_equivocation

        try:
            res = exact_small_equivocation(scheme, records)
            measured, method = res.rate, "exact-small"
        except ExactSizeError:
            pass
    return SimReport(
        measured_equivocation_rate=measured, equivocation_method=method, equivocation_bound=bound,
        engine=scheme.engine, message_blocks=cfg.trials * (scheme.n - 1), config=cfg.to_dict(),
        rate_check=check.to_dict(), **summary,
    )


def run_dmc_feedback_sim(channel: ConditionalPmf, cfg: SimConfig, *, check_rates: bool = True) -> SimReport:
    """Point-to-point feedback scheme on the channel P(y|x).

    The message rate is ``cfg.rates.r1``; ``r_star`` and ``r_tilde`` size the
    helper codebook.  ``cfg.aux`` (optional) must have P(x|u) = identity and
    carries P(x) and P(v|x,y); the default is uniform input with a constant
    helper.
    """
    w = np.asarray(channel.table, dtype=float)
    if w.ndim != 2:
        raise ConfigError("channel must be a single-input map P(y|x)")
    law = w[:, :, None]
    aux = _aux_for(law, cfg.aux)
    if aux.u_size != aux.x_size or not np.allclose(aux.px_given_u.table, np.eye(aux.x_size)):
        raise ConfigError("point-to-point scheme needs P(x|u) = identity")
    check = dmc_rate_check(channel, aux.pu.probs, aux.pv_given_uy1, cfg.rates)
    if check_rates and not check.ok:
        raise RateInfeasibleError(check)
    scheme = Scheme(law, aux, cfg.rates, cfg)
    records = _map_trials(scheme.run_trial, cfg.trials)
    summary = _summarize(scheme, records)
    return SimReport(
        measured_equivocation_rate=None, equivocation_method="none", engine=scheme.engine,
        message_blocks=cfg.trials * (scheme.n - 1), config=cfg.to_dict(), rate_check=check.to_dict(),
        **summary,
    )




# --- trends over block length ---------------------------------------------------

TREND_COLUMNS = ("N", "seed", "decode_error_rate", "encoder_failure_rate", "engine")


@dataclass(frozen=True)
class TrendRow:
    N: int
    seed: int
    decode_error_rate: float
    encoder_failure_rate: float
    engine: str


def error_trend(run, target, cfg: SimConfig, n_grid, seeds) -> list[TrendRow]:
    """Run ``run(target, cfg)`` for every block length and seed.

    ``run`` is :func:`run_dmc_feedback_sim` or :func:`run_wiretap_feedback_sim`.
    """
    rows = []
    for N in n_grid:
        for seed in seeds:
            rep = run(target, cfg.with_(N=int(N), seed=int(seed)))
            rows.append(TrendRow(int(N), int(seed), rep.decode_error_rate, rep.encoder_failure_rate, rep.engine))
    return rows


def median_by_n(rows: list[TrendRow]) -> dict[int, float]:
    """Median decode error rate over seeds for each block length."""
    out: dict[int, list[float]] = {}
    for r in rows:
        out.setdefault(r.N, []).append(r.decode_error_rate)
    return {n: float(np.median(v)) for n, v in sorted(out.items())}


def write_trend_csv(rows: list[TrendRow], path, header: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            fh.write(f"# {header}\n")
        w.writerow(TREND_COLUMNS)
        for r in rows:
            w.writerow([r.N, r.seed, f"{r.decode_error_rate:.12g}", f"{r.encoder_failure_rate:.12g}", r.engine])
