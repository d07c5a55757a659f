"""Secrecy-rate bounds for the general wiretap channel with noiseless feedback.

Each evaluator maximizes a closed-form information expression over the
auxiliary system (P(u), P(x|u), P(v|u,y1)) using :func:`optimize`.  All
values are in bits per channel use.

=====================  ======================================================
function               maximized objective
=====================  ======================================================
``cs_general``         [I(Y1;U) - I(Y2;U)]+                  (no feedback)
``r_s_ahlswede_cai``   min{[I(Y1;U)-I(Y2;U)]+ + H(Y1|Y2,U), I(Y1;U)}
``r_star_s``           min{[I(Y1,V;U)-I(Y2;U)]+ + H(Y1|Y2,U), I(Y1;U)}
``c_f_out``            min{H(Y1|Y2), I(Y1;U)}                (upper bound)
``r_double_star_...``  U = X version of ``r_star_s`` with H(Y1|X)
``c_f_star_out_...``   max over P(x) of min{H(Y1|Y2), I(X;Y1)}
``r_non_...``          U = X version of ``r_s_ahlswede_cai`` with H(Y1|X)
=====================  ======================================================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import Structure, WiretapChannel
from .info import (
    ConditionalPmf,
    DimensionError,
    JointPmf,
    Pmf,
    U,
    V,
    Y1,
    Y2,
    assemble_joint,
    conditional_entropy,
    conditional_mutual_information,
    entropy_bits,
    mutual_information,
)
from .optimize import (
    AuxiliarySystem,
    BoundResult,
    CapExceededError,
    OptimizerConfig,
    SimplexProblem,
    maximize,
)

MAX_ALPHABET = 4


class StructureError(ValueError):
    """The bound requires a channel structure the input does not have."""


# --- batched information terms ----------------------------------------------


def _h(p: np.ndarray, nlast: int) -> np.ndarray:
    return entropy_bits(p.reshape(*p.shape[: p.ndim - nlast], -1), axis=-1)


@dataclass
class AuxTerms:
    """Information quantities of the joint P(u, x, y1, y2, v) for a batch of systems."""

    i_y1_u: np.ndarray
    i_y2_u: np.ndarray
    i_y1v_u: np.ndarray
    h_y1_given_y2u: np.ndarray
    h_y1_given_y2: np.ndarray
    h_y1_given_u: np.ndarray
    h_u: np.ndarray


def aux_terms(pu, pxu, pv, law) -> AuxTerms:
    """Evaluate all bound ingredients; arrays carry a leading batch axis.

    Shapes: ``pu (B,U)``, ``pxu (B,U,X)``, ``pv (B,U,Y1,V)``, ``law (X,Y1,Y2)``.
    """
    p_uxab = pu[:, :, None, None, None] * pxu[:, :, :, None, None] * law[None, None]
    p_uab = p_uxab.sum(axis=2)
    p_ua = p_uab.sum(axis=3)
    p_ub = p_uab.sum(axis=2)
    p_a = p_ua.sum(axis=1)
    p_b = p_ub.sum(axis=1)
    p_ab = p_uab.sum(axis=1)
    h_u = _h(pu, 1)
    h_ua = _h(p_ua, 2)
    h_ub = _h(p_ub, 2)
    h_b = _h(p_b, 1)
    p_uav = p_ua[..., None] * pv
    p_av = p_uav.sum(axis=1)
    return AuxTerms(
        i_y1_u=np.maximum(_h(p_a, 1) + h_u - h_ua, 0.0),
        i_y2_u=np.maximum(h_b + h_u - h_ub, 0.0),
        i_y1v_u=np.maximum(h_u + _h(p_av, 2) - _h(p_uav, 3), 0.0),
        h_y1_given_y2u=np.maximum(_h(p_uab, 3) - h_ub, 0.0),
        h_y1_given_y2=np.maximum(_h(p_ab, 2) - h_b, 0.0),
        h_y1_given_u=np.maximum(h_ua - h_u, 0.0),
        h_u=h_u,
    )


def _pos(x):
    return np.maximum(x, 0.0)


def objective_cs(t: AuxTerms):
    return _pos(t.i_y1_u - t.i_y2_u)


def objective_rs(t: AuxTerms):
    return np.minimum(_pos(t.i_y1_u - t.i_y2_u) + t.h_y1_given_y2u, t.i_y1_u)


def objective_rstar(t: AuxTerms):
    return np.minimum(_pos(t.i_y1v_u - t.i_y2_u) + t.h_y1_given_y2u, t.i_y1_u)


def objective_cfout(t: AuxTerms):
    return np.minimum(t.h_y1_given_y2, t.i_y1_u)


def objective_rdstar(t: AuxTerms):
    # U = X here, so H(Y1|U) is the H(Y1|X) of the formula
    return np.minimum(_pos(t.i_y1v_u - t.i_y2_u) + t.h_y1_given_u, t.i_y1_u)


def objective_rnon(t: AuxTerms):
    return np.minimum(_pos(t.i_y1_u - t.i_y2_u) + t.h_y1_given_u, t.i_y1_u)


OBJECTIVES = {
    "cs": objective_cs,
    "rs": objective_rs,
    "rstar": objective_rstar,
    "cfout": objective_cfout,
    "rdstar": objective_rdstar,
    "cfstarout": objective_cfout,
    "rnon": objective_rnon,
}


class AuxObjective:
    """Objective usable both on a single system and on batches.

    Calling it with an :class:`AuxiliarySystem` evaluates through the
    generic joint-pmf route (:func:`assemble_joint` plus the info kernels),
    which is independent of the batched fast path in :meth:`batch`.
    """

    def __init__(self, kind: str, law3d: np.ndarray):
        self.kind = kind
        self.law = np.asarray(law3d, dtype=float)
        self._fn = OBJECTIVES[kind]

    def batch(self, pu, pxu, pv) -> np.ndarray:
        return self._fn(aux_terms(pu, pxu, pv, self.law))

    def __call__(self, aux: AuxiliarySystem) -> float:
        return evaluate_via_joint(self.kind, aux, self.law)


def evaluate_via_joint(kind: str, aux: AuxiliarySystem, law3d) -> float:
    """Reference evaluation of a bound objective from the assembled joint."""
    j = assemble_joint(aux.pu, aux.px_given_u, law3d, aux.pv_given_uy1)
    i1 = mutual_information(j, [Y1], [U])
    i2 = mutual_information(j, [Y2], [U])
    pos = lambda x: max(x, 0.0)
    if kind == "cs":
        return pos(i1 - i2)
    if kind == "rs":
        return min(pos(i1 - i2) + conditional_entropy(j, [Y1], [Y2, U]), i1)
    if kind == "rstar":
        i1v = mutual_information(j, [Y1, V], [U])
        return min(pos(i1v - i2) + conditional_entropy(j, [Y1], [Y2, U]), i1)
    if kind in ("cfout", "cfstarout"):
        return min(conditional_entropy(j, [Y1], [Y2]), i1)
    if kind == "rdstar":
        i1v = mutual_information(j, [Y1, V], [U])
        return min(pos(i1v - i2) + conditional_entropy(j, [Y1], [U]), i1)
    if kind == "rnon":
        return min(pos(i1 - i2) + conditional_entropy(j, [Y1], [U]), i1)
    raise KeyError(kind)


# --- optimize ---------------------------------------------------------------


def _check_caps(ch: WiretapChannel):
    if max(ch.x_size, ch.y1_size, ch.y2_size) > MAX_ALPHABET:
        raise CapExceededError(
            f"general-channel optimization supports alphabets up to {MAX_ALPHABET}; got "
            f"|X|={ch.x_size}, |Y1|={ch.y1_size}, |Y2|={ch.y2_size}"
        )


def optimize(
    objective: Callable,
    ch: WiretapChannel,
    config: OptimizerConfig | None = None,
    *,
    u_size: int | None = None,
    v_size: int = 1,
    fix_px_given_u=None,
    fix_pv_given_uy1=None,
    starts=(),
    bound_kind: str = "custom",
) -> BoundResult:
    """Maximize ``objective`` over auxiliary systems on channel ``ch``.

    ``objective`` maps an :class:`AuxiliarySystem` to a float.  If it also
    has a ``batch(pu, pxu, pv)`` method, that vectorized form drives the
    search; otherwise systems are evaluated one by one.

    ``u_size`` defaults to |X|+1 and ``v_size`` to 1.  ``fix_*`` pins a
    component (for instance P(x|u) = identity to force U = X).  ``starts``
    are extra warm starts given as AuxiliarySystems of the same shape.

    The returned ``value`` is the objective at ``argmax``; the search is
    deterministic given ``config.seed``.
    """
    config = config or OptimizerConfig()
    _check_caps(ch)
    nx, n1 = ch.x_size, ch.y1_size
    nu = nx + 1 if u_size is None else u_size
    if nu > nx + 1 or v_size > nx + 2:
        raise CapExceededError(f"cardinality caps |U| <= {nx + 1}, |V| <= {nx + 2} exceeded")
    shapes = [(nu,), (nu, nx), (nu, n1, v_size)]
    fixed = {}
    if fix_px_given_u is not None:
        fixed[1] = np.asarray(getattr(fix_px_given_u, "table", fix_px_given_u), dtype=float)
    if v_size == 1:
        fixed[2] = np.ones(shapes[2])
    elif fix_pv_given_uy1 is not None:
        fixed[2] = np.asarray(getattr(fix_pv_given_uy1, "table", fix_pv_given_uy1), dtype=float)

    batch = getattr(objective, "batch", None)
    if batch is not None:
        fun = lambda blocks: batch(*blocks)
    else:
        def fun(blocks):
            out = np.empty(blocks[0].shape[0])
            for i in range(out.size):
                aux = AuxiliarySystem.from_arrays(blocks[0][i], blocks[1][i], blocks[2][i])
                out[i] = objective(aux)
            return out

    problem = SimplexProblem(fun, shapes, fixed)
    start_states = [list(s.arrays()) if isinstance(s, AuxiliarySystem) else list(s) for s in starts]
    value, state, trace = maximize(problem, config, start_states)
    aux = AuxiliarySystem.from_arrays(*state)
    # report the objective at the (renormalized) argmax, not the search value
    value = float(fun([a[None] for a in aux.arrays()])[0])
    return BoundResult(value, aux, bound_kind, trace)


# --- structured starts ------------------------------------------------------


def _identity_u(nx: int, nu: int) -> np.ndarray:
    """P(x|u) with U = X on the first |X| symbols (extra U symbols copy x=0)."""
    m = np.zeros((nu, nx))
    for u in range(nu):
        m[u, min(u, nx - 1)] = 1.0
    return m


def _input_starts(ch: WiretapChannel, nu: int, v_size: int, res: int = 11):
    """U = X starts sweeping P(x) along each edge of the input simplex."""
    nx, n1 = ch.x_size, ch.y1_size
    pv = np.zeros((nu, n1, v_size))
    pv[..., 0] = 1.0
    starts = []
    for a in range(nx):
        for b in range(a + 1, nx):
            for t in np.linspace(0, 1, res):
                px = np.zeros(nx)
                px[a], px[b] = t, 1 - t
                pu = np.zeros(nu)
                pu[:nx] = px
                starts.append([pu, _identity_u(nx, nu), pv.copy()])
    pu = np.zeros(nu)
    pu[:nx] = 1.0 / nx
    starts.append([pu, _identity_u(nx, nu), pv.copy()])
    return starts


def _embed_v(aux: AuxiliarySystem, v_size: int) -> list[np.ndarray]:
    pu, pxu, pv = aux.arrays()
    out = np.zeros((*pv.shape[:2], v_size))
    out[..., : pv.shape[2]] = pv
    return [pu, pxu, out]


def _v_copy_starts(base: AuxiliarySystem, v_size: int):
    """Warm starts with V a copy of U or of Y1 (when the alphabet allows)."""
    pu, pxu, _ = base.arrays()
    nu, n1 = pu.size, base.y1_size
    starts = []
    if nu <= v_size:
        pv = np.zeros((nu, n1, v_size))
        for u in range(nu):
            pv[u, :, u] = 1.0
        starts.append([pu, pxu, pv])
    if n1 <= v_size:
        pv = np.zeros((nu, n1, v_size))
        for a in range(n1):
            pv[:, a, a] = 1.0
        starts.append([pu, pxu, pv])
    return starts


# --- bound evaluators -------------------------------------------------------


def cs_general(ch: WiretapChannel, config: OptimizerConfig | None = None) -> BoundResult:
    """Secrecy capacity of the wiretap channel without feedback."""
    nu = ch.x_size + 1
    obj = AuxObjective("cs", ch.law3d)
    return optimize(obj, ch, config, u_size=nu, starts=_input_starts(ch, nu, 1), bound_kind="cs")


def r_s_ahlswede_cai(
    ch: WiretapChannel, config: OptimizerConfig | None = None, *, cs: BoundResult | None = None
) -> BoundResult:
    """Secret-key feedback lower bound (key from the fed-back Y1).

    Warm-started from the ``cs_general`` optimum (pass ``cs`` to reuse one).
    """
    nu = ch.x_size + 1
    cs = cs or cs_general(ch, config)
    obj = AuxObjective("rs", ch.law3d)
    starts = [list(cs.argmax.arrays())] + _input_starts(ch, nu, 1)
    return optimize(obj, ch, config, u_size=nu, starts=starts, bound_kind="rs")


def r_star_s(
    ch: WiretapChannel,
    config: OptimizerConfig | None = None,
    *,
    v_size: int | None = None,
    rs: BoundResult | None = None,
) -> BoundResult:
    """Lower bound with feedback used for both a key and Wyner-Ziv help information.

    ``v_size`` defaults to the cap |X|+2; ``v_size=1`` forces V constant.
    The search is warm-started from the ``r_s_ahlswede_cai`` optimum with
    constant V, so the result never falls below that bound.
    """
    nv = ch.x_size + 2 if v_size is None else v_size
    nu = ch.x_size + 1
    rs = rs or r_s_ahlswede_cai(ch, config)
    obj = AuxObjective("rstar", ch.law3d)
    starts = [_embed_v(rs.argmax, nv)] + _v_copy_starts(rs.argmax, nv)
    for s in _input_starts(ch, nu, nv, res=5):
        starts.extend(_v_copy_starts(AuxiliarySystem.from_arrays(*s), nv))
    return optimize(obj, ch, config, u_size=nu, v_size=nv, starts=starts, bound_kind="rstar")


def c_f_out(ch: WiretapChannel, config: OptimizerConfig | None = None) -> BoundResult:
    """Upper bound max over P(u,x) of min{H(Y1|Y2), I(Y1;U)}."""
    nu = ch.x_size + 1
    obj = AuxObjective("cfout", ch.law3d)
    return optimize(obj, ch, config, u_size=nu, starts=_input_starts(ch, nu, 1), bound_kind="cfout")


def _require_non_degraded(ch: WiretapChannel):
    if ch.structure_tag is not Structure.NON_DEGRADED:
        raise StructureError(
            f"bound needs a non-degraded channel (Y1 -> X -> Y2); got {ch.structure_tag.value}"
        )


def _x_only(ch, kind, config, v_size=1, extra=()):
    nx = ch.x_size
    obj = AuxObjective(kind, ch.law3d)
    starts = _input_starts(ch, nx, v_size) + list(extra)
    return optimize(
        obj, ch, config, u_size=nx, v_size=v_size, fix_px_given_u=np.eye(nx),
        starts=starts, bound_kind=kind,
    )


def r_non_ahlswede_cai_nondegraded(ch: WiretapChannel, config: OptimizerConfig | None = None) -> BoundResult:
    _require_non_degraded(ch)
    return _x_only(ch, "rnon", config)


def r_double_star_nondegraded(ch: WiretapChannel, config: OptimizerConfig | None = None) -> BoundResult:
    """New lower bound for Y1 -> X -> Y2 channels; optimizes P(x) and P(v|x,y1)."""
    _require_non_degraded(ch)
    nv = ch.x_size + 2
    rnon = r_non_ahlswede_cai_nondegraded(ch, config)
    extra = [_embed_v(rnon.argmax, nv)] + _v_copy_starts(rnon.argmax, nv)
    for s in _input_starts(ch, ch.x_size, nv, res=5):
        extra.extend(_v_copy_starts(AuxiliarySystem.from_arrays(*s), nv))
    return _x_only(ch, "rdstar", config, v_size=nv, extra=extra)


def c_f_star_out_nondegraded(ch: WiretapChannel, config: OptimizerConfig | None = None) -> BoundResult:
    _require_non_degraded(ch)
    return _x_only(ch, "cfstarout", config)


def bound_chain(ch: WiretapChannel, config: OptimizerConfig | None = None) -> dict[str, BoundResult]:
    """cs, rs, rstar and cfout, sharing the warm-start chain cs -> rs -> rstar."""
    cs = cs_general(ch, config)
    rs = r_s_ahlswede_cai(ch, config, cs=cs)
    rstar = r_star_s(ch, config, rs=rs)
    return {"cs": cs, "rs": rs, "rstar": rstar, "cfout": c_f_out(ch, config)}


BOUNDS = {
    "cs": cs_general,
    "rs": r_s_ahlswede_cai,
    "rstar": r_star_s,
    "cfout": c_f_out,
    "rdstar": r_double_star_nondegraded,
    "cfstarout": c_f_star_out_nondegraded,
    "rnon": r_non_ahlswede_cai_nondegraded,
}


# --- identities -------------------------------------------------------------


def dmc_feedback_rate_identity(ch_main: ConditionalPmf, aux: ConditionalPmf, px: Pmf | None = None):
    """Return ``(I(Y,V;X) - I(V;X|Y), I(X;Y))`` for P(x) P(y|x) P(v|x,y).

    The two agree for every auxiliary map; the first is the rate left for
    messages after paying for the help information in the Wyner-Ziv
    feedback scheme.
    """
    w = ch_main.table
    if w.ndim != 2:
        raise DimensionError("main channel must be indexed [x, y]")
    nx, ny = w.shape
    if aux.table.ndim != 3 or aux.table.shape[:2] != (nx, ny):
        raise DimensionError(f"P(v|x,y) must be indexed [x, y, v] with shape ({nx}, {ny}, |V|)")
    px = px or Pmf.uniform(nx)
    if px.support_size != nx:
        raise DimensionError("input pmf size does not match the channel")
    j = JointPmf(np.einsum("x,xy,xyv->xyv", px.probs, w, aux.table))
    x_, y_, v_ = 0, 1, 2
    lhs = mutual_information(j, [y_, v_], [x_]) - conditional_mutual_information(j, [v_], [x_], [y_])
    return lhs, mutual_information(j, [x_], [y_])


def degraded_identity_residual(ch: WiretapChannel, px: Pmf) -> float:
    """|I(Y1;X) - I(Y2;X) + H(Y1|Y2,X) - H(Y1|Y2)|, zero on degraded channels."""
    law = ch.law3d
    j = JointPmf(px.probs[:, None, None] * law)
    x_, a, b = 0, 1, 2
    lhs = (
        mutual_information(j, [a], [x_])
        - mutual_information(j, [b], [x_])
        + conditional_entropy(j, [a], [b, x_])
    )
    return abs(lhs - conditional_entropy(j, [a], [b]))
