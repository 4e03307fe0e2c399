"""Covariant derivatives and the four partial Dirac-type operators.

The induced connection on both the form and V-spinor bundles acts in the
global frame trivialization as a directional derivative plus slot rotations
by the frame connection coefficients (the central charges of the two spin-c
lifts cancel on the tensor product, which is what makes the form-to-spinor
isometry commute with the connection).  The half-Dirac operators are

    D'  = sum_j c(epsbar_j) D_{eps_j} - 1/2 sum_{r<s} c(epsbar_r epsbar_s T_rs)
    D'' = sum_j c(eps_j) D_{epsbar_j} - 1/2 sum_{r<s} c(eps_r eps_s T_rsbar)

with c the left or right V-fiber multiplication, and torsion components taken
from the connection grids.  A closed 1-form twist theta adds -theta(X) to
each directional derivative (the twisted bundle carries nabla^{-theta}).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sections import BundleSpec
from .operators import (
    OperatorContext, LinOp, TermOp, Term, SumOp, ComposeOp, ScaledOp,
    identity_matrix,
)
from .fibers import (
    SparseFiberMatrix, clifford_generator_matrices, clifford_element_matrix,
    slot_derivation_matrices,
)
from .spectral import spectral_partial


@dataclass(frozen=True)
class ThetaTwist:
    """Closed real 1-form: constant periods plus an exact band-limited part."""
    constant: tuple[float, ...]                      # length 2n
    f_modes: tuple[tuple[tuple[int, ...], complex], ...] = ()

    def coordinate_fields(self, ctx: OperatorContext) -> np.ndarray:
        """theta_a(x), shape (*grid, 2n); d(theta) = 0 by construction."""
        d = ctx.real_dim
        if len(self.constant) != d:
            raise ValueError(f"twist needs {d} constant components")
        xs = ctx.geom.frames.structure.grid_coordinates(ctx.N)
        shape = xs[0].shape
        f = np.zeros(shape, dtype=complex)
        for mode, amp in self.f_modes:
            phase = np.zeros(shape)
            for a, m in enumerate(mode):
                if m:
                    phase = phase + m * xs[a]
            wave = np.exp(2j * np.pi * phase)
            f = f + amp * wave + np.conj(amp) * np.conj(wave)
        out = np.zeros(shape + (d,), dtype=complex)
        for a in range(d):
            out[..., a] = self.constant[a]
        if self.f_modes:
            for a in range(d):
                out[..., a] += spectral_partial(f, a)
        return out

    def reflected(self) -> "ThetaTwist":
        return ThetaTwist(tuple(-c for c in self.constant),
                          tuple((m, -a) for m, a in self.f_modes))

    def label(self) -> str:
        base = ",".join(f"{c:g}" for c in self.constant)
        return f"theta[{base}{';f' if self.f_modes else ''}]"


def _frame_coefficients(ctx: OperatorContext, which: str, index: int) -> np.ndarray:
    fr = ctx.geom.frames
    return fr.E_eps[index] if which == "eps" else fr.E_epsbar[index]


def theta_frame_component(ctx: OperatorContext, twist: ThetaTwist,
                          which: str, index: int) -> np.ndarray:
    """theta(eps_index) or theta(epsbar_index) as a grid field."""
    th = twist.coordinate_fields(ctx)
    E = _frame_coefficients(ctx, which, index)
    return np.einsum('...a,...a->...', E, th)


def covariant_derivative_terms(ctx: OperatorContext, spec: BundleSpec,
                               eps_comps: list, epsbar_comps: list,
                               twist: ThetaTwist | None = None) -> list[Term]:
    """Terms of D_X for X = sum_m eps_comps[m] eps_m + epsbar_comps[m] epsbar_m.

    Components may be grid fields or scalars; `None` entries are skipped.
    Works identically on the form and V-spinor bundles (shared fiber layout).
    """
    geom = ctx.geom
    n = ctx.n
    P = geom.frames.P
    KA, KB = slot_derivation_matrices(n)
    KA_s = [[SparseFiberMatrix(KA[j, k]) for k in range(n)] for j in range(n)]
    KB_s = [[SparseFiberMatrix(KB[j, k]) for k in range(n)] for j in range(n)]
    ident = identity_matrix(spec.fiber_dim)
    sqrt2 = np.sqrt(2.0)
    terms: list[Term] = []

    def _mul(comp, other):
        if comp is None:
            return None
        if np.isscalar(comp):
            return comp * other
        return comp * other

    for m in range(n):
        cm, cbm = eps_comps[m], epsbar_comps[m]
        if cm is not None:
            for alpha in range(n):
                terms.append(Term(("z", alpha), _mul(cm, sqrt2 * P[..., alpha, m]), ident))
        if cbm is not None:
            for alpha in range(n):
                terms.append(Term(("zbar", alpha),
                                  _mul(cbm, sqrt2 * np.conj(P[..., alpha, m])), ident))
        for j in range(n):
            for k in range(n):
                # first slot rotates by -a(X)^T, second by -conj(a(Xbar))^T
                if cm is not None:
                    terms.append(Term(None, _mul(cm, -geom.a_eps[m, k, j]), KA_s[j][k]))
                    terms.append(Term(None, _mul(cm, -np.conj(geom.a_epsbar[m, k, j])),
                                      KB_s[j][k]))
                if cbm is not None:
                    terms.append(Term(None, _mul(cbm, -geom.a_epsbar[m, k, j]), KA_s[j][k]))
                    terms.append(Term(None, _mul(cbm, -np.conj(geom.a_eps[m, k, j])),
                                      KB_s[j][k]))
    if twist is not None:
        th = twist.coordinate_fields(ctx)
        for m in range(n):
            for comp, which in ((eps_comps[m], "eps"), (epsbar_comps[m], "epsbar")):
                if comp is None:
                    continue
                E = _frame_coefficients(ctx, which, m)
                tx = np.einsum('...a,...a->...', E, th)
                terms.append(Term(None, _mul(comp, -tx), ident))
    return terms


def covariant_derivative_op(ctx: OperatorContext, spec: BundleSpec, which: str,
                            index: int, twist: ThetaTwist | None = None) -> TermOp:
    """D along a complex frame direction ('eps'/'epsbar', index)."""
    n = ctx.n
    eps_c = [None] * n
    epsbar_c = [None] * n
    if which == "eps":
        eps_c[index] = 1.0
    elif which == "epsbar":
        epsbar_c[index] = 1.0
    else:
        raise ValueError("which must be 'eps' or 'epsbar'")
    terms = covariant_derivative_terms(ctx, spec, eps_c, epsbar_c, twist)
    return TermOp(ctx, spec, spec, terms, f"D_{which}{index}")


def covariant_derivative_real_op(ctx: OperatorContext, spec: BundleSpec,
                                 a: int, twist: ThetaTwist | None = None) -> TermOp:
    """D along the real unitary frame direction e_{a+1}."""
    n = ctx.n
    s, odd = divmod(a, 2)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    eps_c = [None] * n
    epsbar_c = [None] * n
    if odd == 0:
        eps_c[s] = inv_sqrt2
        epsbar_c[s] = inv_sqrt2
    else:
        eps_c[s] = 1j * inv_sqrt2
        epsbar_c[s] = -1j * inv_sqrt2
    terms = covariant_derivative_terms(ctx, spec, eps_c, epsbar_c, twist)
    return TermOp(ctx, spec, spec, terms, f"D_e{a+1}")


def nabla_frame_vector(ctx: OperatorContext, a: int):
    """Frame components of nabla^C_{e_{a+1}} e_{a+1} (eps and epsbar parts)."""
    geom = ctx.geom
    n = ctx.n
    s, odd = divmod(a, 2)
    if odd == 0:
        eps_out = [0.5 * (geom.a_eps[s, k, s] + geom.a_epsbar[s, k, s])
                   for k in range(n)]
    else:
        eps_out = [-0.5 * (geom.a_eps[s, k, s] - geom.a_epsbar[s, k, s])
                   for k in range(n)]
    # nabla_e e is a real vector field, so the epsbar parts are conjugates
    epsbar_out = [np.conj(c) for c in eps_out]
    return eps_out, epsbar_out


def clifford_mat(ctx: OperatorContext, side: str, word: tuple) -> SparseFiberMatrix:
    return SparseFiberMatrix(clifford_element_matrix(ctx.n, side, word))


def assemble_partial_cd(ctx: OperatorContext, which: str,
                        twist: ThetaTwist | None = None) -> TermOp:
    """One of the four partial operators: 'DpL', 'DppL', 'DpR', 'DppR'.

    Dp = D' (holomorphic directions, epsbar multiplication); Dpp = D''.
    The trailing letter selects the left or right module structure.
    """
    if which not in ("DpL", "DppL", "DpR", "DppR"):
        raise ValueError(f"unknown partial operator {which}")
    side = which[-1]
    primed = which.startswith("Dp") and not which.startswith("Dpp")
    n = ctx.n
    geom = ctx.geom
    spec = ctx.vspinor if twist is None else BundleSpec(
        "vspinor", n, twist=twist.label())
    terms: list[Term] = []
    for j in range(n):
        if primed:
            cmat = clifford_mat(ctx, side, (("epsbar", j),))
            dterms = covariant_derivative_terms(
                ctx, spec, [1.0 if m == j else None for m in range(n)],
                [None] * n, twist)
        else:
            cmat = clifford_mat(ctx, side, (("eps", j),))
            dterms = covariant_derivative_terms(
                ctx, spec, [None] * n,
                [1.0 if m == j else None for m in range(n)], twist)
        dense = cmat.dense()
        for t in dterms:
            prod = SparseFiberMatrix(dense @ t.mat.dense())
            if prod.vals.size:
                terms.append(Term(t.deriv, t.field, prod))
    for r in range(n):
        for s in range(r + 1, n):
            for m in range(n):
                if primed:
                    mat = clifford_mat(ctx, side,
                                       (("epsbar", r), ("epsbar", s), ("eps", m)))
                    fld = -0.5 * geom.T_hhb[r, s, m]
                else:
                    mat = clifford_mat(ctx, side,
                                       (("eps", r), ("eps", s), ("epsbar", m)))
                    fld = -0.5 * np.conj(geom.T_hhb[r, s, m])
                if mat.vals.size:
                    terms.append(Term(None, fld, mat))
    label = which + (f"~{twist.label()}" if twist else "")
    return TermOp(ctx, spec, spec, terms, label)


def chern_dirac(ctx: OperatorContext, side: str,
                twist: ThetaTwist | None = None) -> LinOp:
    """Full Dirac operator D' + D'' for one module structure."""
    return SumOp([assemble_partial_cd(ctx, f"Dp{side}", twist),
                  assemble_partial_cd(ctx, f"Dpp{side}", twist)],
                 label=f"D({side})" + (f"~{twist.label()}" if twist else ""))


def bracket_frame_components(ctx: OperatorContext, w1: str, i1: int, w2: str, i2: int):
    """Frame components of the Lie bracket [X, Y] of two frame fields.

    Uses [X,Y] = nabla_X Y - nabla_Y X - T(X,Y), entirely from stored grids.
    """
    geom = ctx.geom
    n = ctx.n
    eps = [0.0] * n
    epsbar = [0.0] * n
    zero = np.zeros_like(geom.a_eps[0, 0, 0])

    def a_of(which, m):          # nabla_{which_m} eps_j -> coefficients on eps
        return geom.a_eps[m] if which == "eps" else geom.a_epsbar[m]

    eps_out = [np.array(zero) for _ in range(n)]
    epsbar_out = [np.array(zero) for _ in range(n)]
    # nabla_{X} Y
    if w2 == "eps":
        mat = a_of(w1, i1)
        for k in range(n):
            eps_out[k] = eps_out[k] + mat[k, i2]
    else:
        mat = np.conj(a_of("epsbar" if w1 == "eps" else "eps", i1))
        for k in range(n):
            epsbar_out[k] = epsbar_out[k] + mat[k, i2]
    # - nabla_{Y} X
    if w1 == "eps":
        mat = a_of(w2, i2)
        for k in range(n):
            eps_out[k] = eps_out[k] - mat[k, i1]
    else:
        mat = np.conj(a_of("epsbar" if w2 == "eps" else "eps", i2))
        for k in range(n):
            epsbar_out[k] = epsbar_out[k] - mat[k, i1]
    # - T(X, Y): only same-type pairs contribute
    if w1 == "eps" and w2 == "eps":
        for k in range(n):
            eps_out[k] = eps_out[k] - geom.T_hhb[i1, i2, k]
    elif w1 == "epsbar" and w2 == "epsbar":
        for k in range(n):
            epsbar_out[k] = epsbar_out[k] - np.conj(geom.T_hhb[i1, i2, k])
    return eps_out, epsbar_out


def curvature_op(ctx: OperatorContext, spec: BundleSpec, w1: str, i1: int,
                 w2: str, i2: int, twist: ThetaTwist | None = None) -> LinOp:
    """R_{XY} = D_X D_Y - D_Y D_X - D_{[X,Y]} via commutators of the applies."""
    DX = covariant_derivative_op(ctx, spec, w1, i1, twist)
    DY = covariant_derivative_op(ctx, spec, w2, i2, twist)
    be, bb = bracket_frame_components(ctx, w1, i1, w2, i2)
    Dbr = TermOp(ctx, spec, spec,
                 covariant_derivative_terms(ctx, spec, be, bb, twist),
                 f"D_[{w1}{i1},{w2}{i2}]")
    return SumOp([ComposeOp(DX, DY), ScaledOp(-1.0, ComposeOp(DY, DX)),
                  ScaledOp(-1.0, Dbr)], label=f"R({w1}{i1},{w2}{i2})")


def bott_chern_dirac(ctx: OperatorContext) -> LinOp:
    DpL = assemble_partial_cd(ctx, "DpL")
    DppR = assemble_partial_cd(ctx, "DppR")
    DpR = assemble_partial_cd(ctx, "DpR")
    DppL = assemble_partial_cd(ctx, "DppL")
    return SumOp([DpL, DppR, ComposeOp(DpR, DppL)], label="D_BC")


def aeppli_dirac(ctx: OperatorContext) -> LinOp:
    DpL = assemble_partial_cd(ctx, "DpL")
    DppR = assemble_partial_cd(ctx, "DppR")
    DpR = assemble_partial_cd(ctx, "DpR")
    DppL = assemble_partial_cd(ctx, "DppL")
    return SumOp([DppL, DpR, ComposeOp(DpL, DppR)], label="D_A")
