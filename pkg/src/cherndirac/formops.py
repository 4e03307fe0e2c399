"""Dolbeault-type operators on forms, by two independent routes.

Route A expresses d-bar, d, and their formal adjoints through the frame
connection and torsion:

    del eta  = sum_j eps^j ^ D_{eps_j} eta + eps^j(T) ^ (eps_j _| eta)
    del* eta = -sum_j eps_j _| D_{epsbar_j} eta
               - sum_{r<s} eps_r _| eps_s _| ((T_rsbar)^flat ^ eta)

(and conjugates).  Route B converts frame coefficients to the coordinate
coframe pointwise, applies the exterior derivative spectrally (exact), and
converts back; its metric adjoints come from the volume-weighted discrete
adjoint.  The two routes share no geometric data beyond the frame itself.
"""

from __future__ import annotations

import itertools

import numpy as np

from .sections import BundleSpec
from .operators import (
    OperatorContext, LinOp, TermOp, Term, SumOp, ComposeOp, ScaledOp,
    BlockPointwiseOp, weighted_adjoint, identity_matrix,
)
from .fibers import SparseFiberMatrix, form_wedge_matrices, bidegree_table
from .dirac import ThetaTwist, covariant_derivative_terms


# -- route A: frame/connection formulas -------------------------------------


def _compose_const(mat_dense: np.ndarray, terms: list[Term]) -> list[Term]:
    out = []
    for t in terms:
        prod = SparseFiberMatrix(mat_dense @ t.mat.dense())
        if prod.vals.size:
            out.append(Term(t.deriv, t.field, prod))
    return out


def del_route_a(ctx: OperatorContext, twist: ThetaTwist | None = None) -> TermOp:
    """Holomorphic exterior derivative through the frame connection."""
    n = ctx.n
    spec = ctx.forms
    W = form_wedge_matrices(n)
    geom = ctx.geom
    terms: list[Term] = []
    for j in range(n):
        dterms = covariant_derivative_terms(
            ctx, spec, [1.0 if m == j else None for m in range(n)], [None] * n, twist)
        terms.extend(_compose_const(W[("wedge_hol", j)], dterms))
    for r in range(n):
        for s in range(r + 1, n):
            for j in range(n):
                mat = W[("wedge_hol", r)] @ W[("wedge_hol", s)] @ W[("contract_hol", j)]
                sm = SparseFiberMatrix(mat)
                if sm.vals.size:
                    terms.append(Term(None, geom.T_hhb[r, s, j], sm))
    return TermOp(ctx, spec, spec, terms, "del_A")


def delbar_route_a(ctx: OperatorContext, twist: ThetaTwist | None = None) -> TermOp:
    n = ctx.n
    spec = ctx.forms
    W = form_wedge_matrices(n)
    geom = ctx.geom
    terms: list[Term] = []
    for j in range(n):
        dterms = covariant_derivative_terms(
            ctx, spec, [None] * n, [1.0 if m == j else None for m in range(n)], twist)
        terms.extend(_compose_const(W[("wedge_anti", j)], dterms))
    for r in range(n):
        for s in range(r + 1, n):
            for j in range(n):
                mat = W[("wedge_anti", r)] @ W[("wedge_anti", s)] @ W[("contract_anti", j)]
                sm = SparseFiberMatrix(mat)
                if sm.vals.size:
                    terms.append(Term(None, np.conj(geom.T_hhb[r, s, j]), sm))
    return TermOp(ctx, spec, spec, terms, "delbar_A")


def del_star_route_a(ctx: OperatorContext, twist: ThetaTwist | None = None) -> TermOp:
    """Formal adjoint of del, as a local frame formula (no global pairing).

    With a twist this is the W-bundle adjoint: it coincides with the
    volume-weighted adjoint of the reflected-twist forward operator.
    """
    n = ctx.n
    spec = ctx.forms
    W = form_wedge_matrices(n)
    geom = ctx.geom
    terms: list[Term] = []
    for j in range(n):
        dterms = covariant_derivative_terms(
            ctx, spec, [None] * n, [1.0 if m == j else None for m in range(n)],
            twist)
        terms.extend(_compose_const(-W[("contract_hol", j)], dterms))
    for r in range(n):
        for s in range(r + 1, n):
            for m in range(n):
                mat = W[("contract_hol", r)] @ W[("contract_hol", s)] @ W[("wedge_hol", m)]
                sm = SparseFiberMatrix(-mat)
                if sm.vals.size:
                    terms.append(Term(None, np.conj(geom.T_hhb[r, s, m]), sm))
    return TermOp(ctx, spec, spec, terms, "del*_A")


def delbar_star_route_a(ctx: OperatorContext, twist: ThetaTwist | None = None) -> TermOp:
    n = ctx.n
    spec = ctx.forms
    W = form_wedge_matrices(n)
    geom = ctx.geom
    terms: list[Term] = []
    for j in range(n):
        dterms = covariant_derivative_terms(
            ctx, spec, [1.0 if m == j else None for m in range(n)], [None] * n,
            twist)
        terms.extend(_compose_const(-W[("contract_anti", j)], dterms))
    for r in range(n):
        for s in range(r + 1, n):
            for m in range(n):
                mat = W[("contract_anti", r)] @ W[("contract_anti", s)] @ W[("wedge_anti", m)]
                sm = SparseFiberMatrix(-mat)
                if sm.vals.size:
                    terms.append(Term(None, geom.T_hhb[r, s, m], sm))
    return TermOp(ctx, spec, spec, terms, "delbar*_A")


# -- route B: coordinate-spectral exterior derivative ------------------------


def _subsets(n: int, k: int):
    return list(itertools.combinations(range(n), k))


def _wedge_minor_matrix(M: np.ndarray, rows: tuple, cols: tuple) -> np.ndarray:
    """det of the (rows x cols) minor of a pointwise matrix field."""
    if not rows:
        return np.ones(M.shape[:-2], dtype=complex)
    sub = M[..., list(rows), :][..., :, list(cols)]
    if len(rows) == 1:
        return sub[..., 0, 0]
    return np.linalg.det(sub)


def _coframe_transform_blocks(ctx: OperatorContext, Q: np.ndarray):
    """Per-bidegree pointwise blocks of a coframe change on form fibers.

    Q encodes old^j = sum_a Q[j,a] new^a on holomorphic 1-forms (conj(Q) on
    antiholomorphic ones); the block entry mapping coefficients indexed by
    (I,J)-old to (A,B)-new is det(Q[I,A]) * det(conj(Q)[J,B]).
    """
    n = ctx.n
    spec = ctx.forms
    idx = spec.key_index()
    blocks = []
    for p in range(n + 1):
        for q in range(n + 1):
            subs_p, subs_q = _subsets(n, p), _subsets(n, q)
            keys = [(sum(1 << i for i in I), sum(1 << j for j in J))
                    for I in subs_p for J in subs_q]
            cols = [idx[k] for k in keys]
            f = len(keys)
            mats = np.zeros(Q.shape[:-2] + (f, f), dtype=complex)
            pos = {}
            for a, I in enumerate(subs_p):
                for b, J in enumerate(subs_q):
                    pos[(I, J)] = a * len(subs_q) + b
            for (Iin, Jin), c in pos.items():
                for (Aout, Bout), r in pos.items():
                    mats[..., r, c] = (_wedge_minor_matrix(Q, Iin, Aout)
                                       * _wedge_minor_matrix(np.conj(Q), Jin, Bout))
            blocks.append((cols, cols, mats))
    return blocks


def frame_to_coordinate_op(ctx: OperatorContext) -> BlockPointwiseOp:
    """Frame-coefficient forms -> dz-basis coefficients (pointwise)."""
    P = ctx.geom.frames.P
    Q = np.linalg.inv(np.sqrt(2.0) * P)           # eps^j = sum Q[j,a] dz^a
    blocks = _coframe_transform_blocks(ctx, Q)
    return BlockPointwiseOp(ctx, ctx.forms, ctx.forms, blocks, "frame->dz")


def coordinate_to_frame_op(ctx: OperatorContext) -> BlockPointwiseOp:
    P = ctx.geom.frames.P
    Qinv = np.sqrt(2.0) * P                        # dz^a = sum Qinv[a,j] eps^j
    blocks = _coframe_transform_blocks(ctx, Qinv)
    return BlockPointwiseOp(ctx, ctx.forms, ctx.forms, blocks, "dz->frame")


def coordinate_d_terms(ctx: OperatorContext, which: str) -> list[Term]:
    """Exterior derivative in the dz-basis: wedge by dz^a against d/dz^a.

    which: 'del' keeps the dz-part, 'delbar' the dzbar-part, 'd' both.
    """
    n = ctx.n
    W = form_wedge_matrices(n)
    terms = []
    for alpha in range(n):
        if which in ("del", "d"):
            terms.append(Term(("z", alpha), None,
                              SparseFiberMatrix(W[("wedge_hol", alpha)])))
        if which in ("delbar", "d"):
            terms.append(Term(("zbar", alpha), None,
                              SparseFiberMatrix(W[("wedge_anti", alpha)])))
    return terms


def exterior_derivative_route_b(ctx: OperatorContext, which: str = "d",
                                twist: ThetaTwist | None = None) -> LinOp:
    """Spectral-coordinate d (or its del/delbar part), conjugated to the frame.

    With a twist, implements d_theta = d - theta ^ . (the Lichnerowicz-
    Novikov differential) before conjugating back.
    """
    spec = ctx.forms
    to_dz = frame_to_coordinate_op(ctx)
    to_frame = coordinate_to_frame_op(ctx)
    dz_op = TermOp(ctx, spec, spec, coordinate_d_terms(ctx, which), f"{which}_dz")
    mid: LinOp = dz_op
    if twist is not None:
        mid = SumOp([dz_op, ScaledOp(-1.0, theta_wedge_coordinate_op(ctx, twist, which))])
    return ComposeOp(to_frame, ComposeOp(mid, to_dz),
                     label=f"{which}_B" + (f"~{twist.label()}" if twist else ""))


def theta_wedge_coordinate_op(ctx: OperatorContext, twist: ThetaTwist,
                              which: str = "d") -> TermOp:
    """Wedge by (the relevant type part of) theta in the dz-basis."""
    n = ctx.n
    W = form_wedge_matrices(n)
    th = twist.coordinate_fields(ctx)   # components on dx^a
    terms = []
    for alpha in range(n):
        # theta = sum_a theta_a dx^a; dx^{2a} = (dz^a + dzbar^a)/2,
        # dx^{2a+1} = (dz^a - dzbar^a)/(2i)
        hol = 0.5 * th[..., 2 * alpha] - 0.5j * th[..., 2 * alpha + 1]
        anti = 0.5 * th[..., 2 * alpha] + 0.5j * th[..., 2 * alpha + 1]
        if which in ("del", "d"):
            terms.append(Term(None, hol, SparseFiberMatrix(W[("wedge_hol", alpha)])))
        if which in ("delbar", "d"):
            terms.append(Term(None, anti, SparseFiberMatrix(W[("wedge_anti", alpha)])))
    return TermOp(ctx, ctx.forms, ctx.forms, terms, "theta^")


def adjoint_route_b(ctx: OperatorContext, which: str,
                    twist: ThetaTwist | None = None) -> LinOp:
    """Volume-weighted adjoint of the route-B operator (del*, delbar*, d*)."""
    base = {"del*": "del", "delbar*": "delbar", "d*": "d"}[which]
    reflected = twist.reflected() if twist is not None else None
    return weighted_adjoint(exterior_derivative_route_b(ctx, base, reflected),
                            label=f"{which}_B")


# -- Bott-Chern / Aeppli Laplacians on forms ---------------------------------


def bott_chern_laplacian(ctx: OperatorContext) -> LinOp:
    dl = exterior_derivative_route_b(ctx, "del")
    db = exterior_derivative_route_b(ctx, "delbar")
    dls = weighted_adjoint(dl, "del*")
    dbs = weighted_adjoint(db, "delbar*")
    ddb = ComposeOp(dl, db)
    dbs_dl = ComposeOp(dbs, dl)
    return SumOp([
        ComposeOp(ddb, weighted_adjoint(ddb)),
        ComposeOp(weighted_adjoint(ddb), ddb),
        ComposeOp(dbs_dl, weighted_adjoint(dbs_dl)),
        ComposeOp(weighted_adjoint(dbs_dl), dbs_dl),
        ComposeOp(dbs, db),
        ComposeOp(dls, dl),
    ], label="Lap_BC")


def aeppli_laplacian(ctx: OperatorContext) -> LinOp:
    dl = exterior_derivative_route_b(ctx, "del")
    db = exterior_derivative_route_b(ctx, "delbar")
    dls = weighted_adjoint(dl, "del*")
    dbs = weighted_adjoint(db, "delbar*")
    ddb = ComposeOp(dl, db)
    db_dls = ComposeOp(db, dls)
    return SumOp([
        ComposeOp(db_dls, weighted_adjoint(db_dls)),
        ComposeOp(weighted_adjoint(db_dls), db_dls),
        ComposeOp(ddb, weighted_adjoint(ddb)),
        ComposeOp(weighted_adjoint(ddb), ddb),
        ComposeOp(db, dbs),
        ComposeOp(dl, dls),
    ], label="Lap_A")
