"""Matrix-free linear operators on band-limited sections.

Operators are composition trees over one workhorse node, `TermOp`, a sum of
terms (coefficient field) * (constant fiber matrix) * (spectral derivative).
Application pads the coefficient box onto the operator grid, works pointwise
in value space, and projects back to the box: the exact Galerkin compression
of the continuum formula, with aliasing confined to modes the box discards.

`adjoint_apply` is the exact discrete adjoint with respect to the *flat* grid
inner product; kernel dimensions computed through normal equations do not
depend on that choice.  Pairings against the Riemannian volume density are
separate (`OperatorContext.inner`), and `weighted_adjoint` conjugates by the
density when the honest metric adjoint is itself the object of interest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import ChernGeometry
from .sections import BundleSpec, SectionField
from .spectral import (
    pad_modes, extract_modes, fftn_spatial, ifftn_spatial,
    dz_symbol, dzbar_symbol, coord_symbol,
)
from .fibers import SparseFiberMatrix


class OperatorContext:
    """Geometry plus grid conventions shared by all operators."""

    def __init__(self, geom: ChernGeometry, band: int):
        self.geom = geom
        self.N = geom.N
        self.n = geom.n
        self.real_dim = geom.real_dim
        if self.N < 2 * band + 2:
            raise ValueError(f"grid {self.N} cannot resolve section band {band}")
        self.band = band
        self.rho = geom.frames.volume_density
        self.forms = BundleSpec("forms", self.n)
        self.vspinor = BundleSpec("vspinor", self.n)

    # -- section helpers ---------------------------------------------------

    def zeros(self, spec: BundleSpec, band: int | None = None) -> SectionField:
        return SectionField.zeros(spec, self.band if band is None else band, self.N)

    def random_section(self, spec: BundleSpec, rng: np.random.Generator,
                       mode_band: int | None = None,
                       bidegree: tuple[int, int] | None = None) -> SectionField:
        s = SectionField.random(spec, self.band, self.N, rng, mode_band)
        if bidegree is not None:
            s = s.component(*bidegree)
        nrm = self.norm(s)
        return s * (1.0 / nrm) if nrm > 0 else s

    def inner(self, s1: SectionField, s2: SectionField, weighted: bool = True) -> complex:
        """L2 pairing, conjugate-linear in the first argument."""
        u = s1.to_values()
        v = s2.to_values()
        dens = np.sum(np.conj(u) * v, axis=-1)
        if weighted:
            dens = dens * self.rho
        return complex(dens.mean())

    def norm(self, s: SectionField, weighted: bool = True) -> float:
        return float(np.sqrt(max(self.inner(s, s, weighted).real, 0.0)))


def relative_residual(ctx: OperatorContext, lhs: SectionField, rhs: SectionField) -> float:
    scale = max(ctx.norm(lhs), ctx.norm(rhs), 1e-300)
    return ctx.norm(lhs - rhs) / scale


# -- operator nodes ---------------------------------------------------------


class LinOp:
    """Matrix-free operator between section spaces on one context."""

    def __init__(self, ctx: OperatorContext, domain: BundleSpec, codomain: BundleSpec,
                 label: str = ""):
        self.ctx = ctx
        self.domain = domain
        self.codomain = codomain
        self.label = label

    def apply(self, s: SectionField) -> SectionField:
        raise NotImplementedError

    def adjoint_apply(self, s: SectionField) -> SectionField:
        raise NotImplementedError

    # composition sugar
    def __add__(self, other: "LinOp") -> "LinOp":
        return SumOp([self, other])

    def __sub__(self, other: "LinOp") -> "LinOp":
        return SumOp([self, ScaledOp(-1.0, other)])

    def __matmul__(self, other: "LinOp") -> "LinOp":
        return ComposeOp(self, other)

    def scaled(self, c: complex) -> "LinOp":
        return ScaledOp(c, self)

    def adjoint(self) -> "LinOp":
        return AdjointOp(self)

    def _check_domain(self, s: SectionField):
        if s.spec != self.domain:
            raise ValueError(f"{self.label or type(self).__name__}: bundle tag "
                             f"mismatch ({s.spec.kind}/{s.spec.bidegree} into "
                             f"{self.domain.kind}/{self.domain.bidegree})")
        if s.N != self.ctx.N:
            raise ValueError("section grid does not match operator context")


@dataclass(frozen=True)
class Term:
    deriv: tuple | None           # ("z", a) | ("zbar", a) | ("x", a) | None
    field: np.ndarray | None      # scalar grid field or None for 1
    mat: SparseFiberMatrix        # constant fiber matrix


def _symbol(ctx: OperatorContext, deriv: tuple) -> np.ndarray:
    kind, idx = deriv
    if kind == "z":
        return dz_symbol(ctx.N, ctx.real_dim, idx)
    if kind == "zbar":
        return dzbar_symbol(ctx.N, ctx.real_dim, idx)
    if kind == "x":
        return coord_symbol(ctx.N, ctx.real_dim, idx)
    raise ValueError(f"unknown derivative {deriv}")


class TermOp(LinOp):
    """Sum of (field) * (fiber matrix) * (derivative) applications."""

    def __init__(self, ctx, domain, codomain, terms: list[Term], label=""):
        super().__init__(ctx, domain, codomain, label)
        self.terms = terms

    def apply(self, s: SectionField) -> SectionField:
        self._check_domain(s)
        ctx = self.ctx
        d = ctx.real_dim
        hat = pad_modes(s.coeffs, s.band, ctx.N, d)
        values: dict = {}
        for t in self.terms:
            if t.deriv not in values:
                if t.deriv is None:
                    values[None] = ifftn_spatial(hat, d)
                else:
                    values[t.deriv] = ifftn_spatial(hat * _symbol(ctx, t.deriv)[..., None], d)
        out = np.zeros(hat.shape[:d] + (self.codomain.fiber_dim,), dtype=complex)
        for t in self.terms:
            src = values[t.deriv]
            for r, c, v in zip(t.mat.rows, t.mat.cols, t.mat.vals):
                contrib = v * src[..., c]
                if t.field is not None:
                    contrib = contrib * t.field
                out[..., r] += contrib
        return SectionField.from_values(out, self.codomain, s.band)

    def adjoint_apply(self, s: SectionField) -> SectionField:
        if s.spec != self.codomain:
            raise ValueError(f"{self.label}: adjoint input tag mismatch")
        ctx = self.ctx
        d = ctx.real_dim
        vals = ifftn_spatial(pad_modes(s.coeffs, s.band, ctx.N, d), d)
        accum: dict = {}
        for t in self.terms:
            tgt = accum.get(t.deriv)
            if tgt is None:
                tgt = np.zeros(vals.shape[:d] + (self.domain.fiber_dim,), dtype=complex)
                accum[t.deriv] = tgt
            for r, c, v in zip(t.mat.rows, t.mat.cols, t.mat.vals):
                contrib = np.conj(v) * vals[..., r]
                if t.field is not None:
                    contrib = contrib * np.conj(t.field)
                tgt[..., c] += contrib
        out_hat = None
        for deriv, w in accum.items():
            what = fftn_spatial(w, d)
            if deriv is not None:
                what = what * np.conj(_symbol(ctx, deriv))[..., None]
            out_hat = what if out_hat is None else out_hat + what
        coeffs = extract_modes(out_hat, s.band, d)
        return SectionField(self.domain, s.band, ctx.N, coeffs)


class SumOp(LinOp):
    def __init__(self, ops: list[LinOp], label=""):
        flat = []
        for op in ops:
            flat.extend(op.ops if isinstance(op, SumOp) else [op])
        first = flat[0]
        for op in flat[1:]:
            if op.domain != first.domain or op.codomain != first.codomain:
                raise ValueError("sum of operators with mismatched spaces")
        super().__init__(first.ctx, first.domain, first.codomain,
                         label or "+".join(o.label for o in flat))
        self.ops = flat

    def apply(self, s):
        out = self.ops[0].apply(s)
        for op in self.ops[1:]:
            out = out + op.apply(s)
        return out

    def adjoint_apply(self, s):
        out = self.ops[0].adjoint_apply(s)
        for op in self.ops[1:]:
            out = out + op.adjoint_apply(s)
        return out


class ScaledOp(LinOp):
    def __init__(self, c: complex, op: LinOp, label=""):
        super().__init__(op.ctx, op.domain, op.codomain, label or op.label)
        self.c = c
        self.op = op

    def apply(self, s):
        return self.op.apply(s) * self.c

    def adjoint_apply(self, s):
        return self.op.adjoint_apply(s) * np.conj(self.c)


class ComposeOp(LinOp):
    """A after B, re-projecting to the band between the factors."""

    def __init__(self, A: LinOp, B: LinOp, label=""):
        if A.domain != B.codomain:
            raise ValueError(f"cannot compose {A.label} after {B.label}: "
                             f"bundle tag mismatch")
        super().__init__(A.ctx, B.domain, A.codomain, label or f"{A.label}@{B.label}")
        self.A = A
        self.B = B

    def apply(self, s):
        return self.A.apply(self.B.apply(s))

    def adjoint_apply(self, s):
        return self.B.adjoint_apply(self.A.adjoint_apply(s))


class AdjointOp(LinOp):
    def __init__(self, op: LinOp):
        super().__init__(op.ctx, op.codomain, op.domain, f"adj({op.label})")
        self.op = op

    def apply(self, s):
        return self.op.adjoint_apply(s)

    def adjoint_apply(self, s):
        return self.op.apply(s)


class RetagOp(LinOp):
    """Identity on coefficients between bundles sharing the fiber indexing.

    This is the grid-level form-to-spinor isometry: the exact layer proves it
    maps basis to basis with unit coefficients, so on coefficient boxes it is
    literally a retag.
    """

    def __init__(self, ctx, domain, codomain, label="retag"):
        if domain.fiber_dim != codomain.fiber_dim:
            raise ValueError("retag between different fiber dimensions")
        super().__init__(ctx, domain, codomain, label)

    def apply(self, s):
        self._check_domain(s)
        return SectionField(self.codomain, s.band, s.N, s.coeffs.copy())

    def adjoint_apply(self, s):
        return SectionField(self.domain, s.band, s.N, s.coeffs.copy())


class BlockPointwiseOp(LinOp):
    """Pointwise fiber map given by per-bidegree blocks of grid matrices."""

    def __init__(self, ctx, domain, codomain,
                 blocks: list[tuple[list[int], list[int], np.ndarray]], label=""):
        # blocks: (input fiber indices, output fiber indices, (*grid, fo, fi))
        super().__init__(ctx, domain, codomain, label)
        self.blocks = blocks

    def apply(self, s):
        self._check_domain(s)
        d = self.ctx.real_dim
        vals = ifftn_spatial(pad_modes(s.coeffs, s.band, self.ctx.N, d), d)
        out = np.zeros(vals.shape[:d] + (self.codomain.fiber_dim,), dtype=complex)
        for cols_in, cols_out, mats in self.blocks:
            sub = vals[..., cols_in]
            out[..., cols_out] += np.einsum('...ab,...b->...a', mats, sub)
        return SectionField.from_values(out, self.codomain, s.band)

    def adjoint_apply(self, s):
        d = self.ctx.real_dim
        vals = ifftn_spatial(pad_modes(s.coeffs, s.band, self.ctx.N, d), d)
        out = np.zeros(vals.shape[:d] + (self.domain.fiber_dim,), dtype=complex)
        for cols_in, cols_out, mats in self.blocks:
            sub = vals[..., cols_out]
            out[..., cols_in] += np.einsum('...ab,...a->...b', np.conj(mats), sub)
        return SectionField.from_values(out, self.domain, s.band)


class BidegreeProjectorOp(LinOp):
    def __init__(self, ctx, spec: BundleSpec, p: int, q: int):
        super().__init__(ctx, spec, spec, f"proj({p},{q})")
        self.mask = np.array([1.0 if spec.bidegree_of_index(i) == (p, q) else 0.0
                              for i in range(spec.fiber_dim)])

    def apply(self, s):
        self._check_domain(s)
        return SectionField(s.spec, s.band, s.N, s.coeffs * self.mask)

    adjoint_apply = apply


def identity_matrix(dim: int) -> SparseFiberMatrix:
    return SparseFiberMatrix(np.eye(dim, dtype=complex))


def field_multiplication_op(ctx: OperatorContext, spec: BundleSpec,
                            field: np.ndarray, label="mul") -> TermOp:
    return TermOp(ctx, spec, spec,
                  [Term(None, field, identity_matrix(spec.fiber_dim))], label)


def weighted_adjoint(op: LinOp, label="") -> LinOp:
    """Adjoint with respect to the Riemannian volume pairing.

    rho^-1 (flat adjoint) rho; exact at value level since the density is
    pointwise-exact on the grid.
    """
    ctx = op.ctx
    rho = ctx.rho
    pre = field_multiplication_op(ctx, op.codomain, rho, "rho")
    post = field_multiplication_op(ctx, op.domain, 1.0 / rho, "rho^-1")
    return ComposeOp(post, ComposeOp(AdjointOp(op), pre),
                     label=label or f"adj_w({op.label})")


def fuse_zeroth_with_term_op(field: np.ndarray | None, mat: SparseFiberMatrix,
                             inner: TermOp, codomain: BundleSpec, label="") -> TermOp:
    """(field * mat) o inner, fused into a single TermOp."""
    dense = mat.dense()
    new_terms = []
    for t in inner.terms:
        prod = SparseFiberMatrix(dense @ t.mat.dense())
        if prod.vals.size == 0:
            continue
        if field is None:
            f = t.field
        elif t.field is None:
            f = field
        else:
            f = field * t.field
        new_terms.append(Term(t.deriv, f, prod))
    return TermOp(inner.ctx, inner.domain, codomain, new_terms, label)
