"""The V-fiber: tensor product of the anticanonical and canonical spinor fibers.

Basis elements are pairs of subsets (A, B); the first slot carries the
anticanonical module structure (bidegree p = |A|), the second the canonical
one (q = |B|).  The two Clifford multiplications act as

    w .L (phi x psi) = (w phi) x psi
    w .R (phi x psi) = (-1)^(p * parity(w)) phi x (w psi)

The right-hand sign extends the grade-1 rule multiplicatively, which is the
unique extension making .R an algebra action; odd elements on the two sides
then anticommute (graded commutation), which is precisely what reproduces the
dbar-side operators under the form-to-spinor isometry.

chi realizes each V-fiber element as an endomorphism of the canonical fiber
("evaluate the first slot, then tensor"), pulling the full matrix-algebra
product back onto V.
"""

from __future__ import annotations

from functools import lru_cache

from .exact import ExactScalar, ONE, exact_rank
from .clifford import Multivector, blade_grade, blade_mul, grade_project
from .forms import FormFiber, _grade
from .fock import SpinorFiber, canonical_model, anticanonical_model


class VFiber:
    """Element of the 4^n-dimensional V-fiber, sparse over subset pairs."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[tuple[int, int], ExactScalar] | None = None):
        self.n = n
        self.terms: dict[tuple[int, int], ExactScalar] = {}
        if terms:
            for (ma, mb), coeff in terms.items():
                if ma >> n or mb >> n:
                    raise ValueError("subset index out of range")
                if not coeff.is_zero():
                    self.terms[(ma, mb)] = coeff

    @staticmethod
    def basis(n: int, ma: int, mb: int) -> "VFiber":
        return VFiber(n, {(ma, mb): ONE})

    @staticmethod
    def vacuum(n: int) -> "VFiber":
        return VFiber(n, {(0, 0): ONE})

    def __add__(self, other: "VFiber") -> "VFiber":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            s = out.get(key)
            out[key] = coeff if s is None else s + coeff
        return VFiber(self.n, out)

    def __sub__(self, other: "VFiber") -> "VFiber":
        return self + (-other)

    def __neg__(self) -> "VFiber":
        return VFiber(self.n, {k: -c for k, c in self.terms.items()})

    def scale(self, s: ExactScalar) -> "VFiber":
        return VFiber(self.n, {k: s * c for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, VFiber):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def bidegree_of(self, key: tuple[int, int]) -> tuple[int, int]:
        return bin(key[0]).count("1"), bin(key[1]).count("1")

    def bidegrees(self) -> set[tuple[int, int]]:
        return {self.bidegree_of(k) for k in self.terms}

    def component(self, p: int, q: int) -> "VFiber":
        return VFiber(self.n, {k: c for k, c in self.terms.items()
                               if self.bidegree_of(k) == (p, q)})

    def hermitian_pairing(self, other: "VFiber") -> ExactScalar:
        out = ExactScalar()
        for key, coeff in self.terms.items():
            c2 = other.terms.get(key)
            if c2 is not None:
                out = out + coeff.conjugate() * c2
        return out


def tensor(phi: SpinorFiber, psi: SpinorFiber) -> VFiber:
    out = {}
    for ma, ca in phi.terms.items():
        for mb, cb in psi.terms.items():
            out[(ma, mb)] = ca * cb
    return VFiber(phi.n, out)


def v_mul(side: str, w: Multivector, xi: VFiber) -> VFiber:
    """Left or right Clifford multiplication on the V-fiber."""
    if w.n != xi.n:
        raise ValueError("dimension mismatch between multivector and V-fiber")
    n = xi.n
    if side == "L":
        model = anticanonical_model(n)
        out = VFiber(n)
        for (ma, mb), coeff in xi.terms.items():
            acted = model.act(w, SpinorFiber(n, {ma: coeff}))
            out = out + VFiber(n, {(m, mb): c for m, c in acted.terms.items()})
        return out
    if side == "R":
        model = canonical_model(n)
        out = VFiber(n)
        for parity in (0, 1):
            part = Multivector(n, {m: c for m, c in w.terms.items()
                                   if blade_grade(m) & 1 == parity})
            if part.is_zero():
                continue
            for (ma, mb), coeff in xi.terms.items():
                if parity and bin(ma).count("1") & 1:
                    coeff = -coeff
                acted = model.act(part, SpinorFiber(n, {mb: coeff}))
                out = out + VFiber(n, {(ma, m): c for m, c in acted.terms.items()})
        return out
    raise ValueError("side must be 'L' or 'R'")


def decomposable(nu: FormFiber, mu_bar: FormFiber,
                 phi_vac: SpinorFiber | None = None,
                 psi_vac: SpinorFiber | None = None) -> VFiber:
    """(nu . phi_vacuum) x (mu_bar . psi_vacuum), unnormalized Clifford actions."""
    n = nu.n
    phi_vac = phi_vac if phi_vac is not None else SpinorFiber.vacuum(n)
    psi_vac = psi_vac if psi_vac is not None else SpinorFiber.vacuum(n)
    phi = anticanonical_model(n).act_form(nu, phi_vac)
    psi = canonical_model(n).act_form(mu_bar, psi_vac)
    return tensor(phi, psi)


def sigma_iso(eta: FormFiber,
              phi_vac: SpinorFiber | None = None,
              psi_vac: SpinorFiber | None = None) -> VFiber:
    """Isometry from complex forms onto the V-fiber, 2^-(p+q)/2 per bidegree."""
    n = eta.n
    out = VFiber(n)
    for (mi, mj), coeff in eta.terms.items():
        p, q = _grade(mi), _grade(mj)
        nu = FormFiber(n, {(mi, 0): coeff})
        mu_bar = FormFiber(n, {(0, mj): ONE})
        piece = decomposable(nu, mu_bar, phi_vac, psi_vac)
        out = out + piece.scale(ExactScalar.sqrt2_power(-(p + q)))
    return out


@lru_cache(maxsize=None)
def _sigma_basis_map(n: int) -> dict[tuple[int, int], tuple[tuple[int, int], ExactScalar]]:
    """Maps a form basis key to (V basis key, coefficient) under sigma."""
    out = {}
    for mi in range(1 << n):
        for mj in range(1 << n):
            image = sigma_iso(FormFiber(n, {(mi, mj): ONE}))
            if len(image.terms) != 1:
                raise AssertionError("sigma is not basis-diagonal")
            (key, coeff), = image.terms.items()
            out[(mi, mj)] = (key, coeff)
    return out


def sigma_inv(xi: VFiber) -> FormFiber:
    """Exact inverse of sigma_iso (basis-diagonal with unit-modulus weights)."""
    fwd = _sigma_basis_map(xi.n)
    inv = {vkey: (fkey, coeff) for fkey, (vkey, coeff) in fwd.items()}
    out = {}
    for key, coeff in xi.terms.items():
        fkey, w = inv[key]
        out[fkey] = coeff * w.inverse()
    return FormFiber(xi.n, out)


def chi(xi: VFiber) -> list[list[ExactScalar]]:
    """Endomorphism of the canonical fiber: psi' -> phi(psi') psi."""
    dim = 1 << xi.n
    mat = [[ExactScalar() for _ in range(dim)] for _ in range(dim)]
    for (ma, mb), coeff in xi.terms.items():
        mat[mb][ma] = mat[mb][ma] + coeff
    return mat


def chi_inv(mat: list[list[ExactScalar]], n: int) -> VFiber:
    out = {}
    dim = 1 << n
    for b in range(dim):
        for a in range(dim):
            if not mat[b][a].is_zero():
                out[(a, b)] = mat[b][a]
    return VFiber(n, out)


def mat_mul(m1: list[list[ExactScalar]], m2: list[list[ExactScalar]]) -> list[list[ExactScalar]]:
    dim = len(m1)
    out = [[ExactScalar() for _ in range(dim)] for _ in range(dim)]
    for r in range(dim):
        row = m1[r]
        for k in range(dim):
            c = row[k]
            if c.is_zero():
                continue
            m2k = m2[k]
            outr = out[r]
            for cidx in range(dim):
                if not m2k[cidx].is_zero():
                    outr[cidx] = outr[cidx] + c * m2k[cidx]
    return out


def algebra_product(xi1: VFiber, xi2: VFiber) -> VFiber:
    """Product pulled back through chi from endomorphism composition."""
    return chi_inv(mat_mul(chi(xi1), chi(xi2)), xi1.n)


def chi_multivector(xi: VFiber) -> Multivector:
    """The Clifford-algebra element whose canonical action equals chi(xi).

    Coefficient extraction uses the trace orthogonality of blade actions:
    nonscalar blades act tracelessly in the Fock model, and each blade squares
    to +-1, so coeff_b = tr(c(b)^-1 M) / 2^n exactly.
    """
    n = xi.n
    model = canonical_model(n)
    mat = chi(xi)
    dim = 1 << n
    terms = {}
    for mask in range(1 << (2 * n)):
        k = blade_grade(mask)
        sq_sign = -1 if ((k * (k + 1)) // 2) & 1 else 1
        bmat = model.matrix(Multivector(n, {mask: ONE}))
        tr = ExactScalar()
        for r in range(dim):
            for s in range(dim):
                if not bmat[r][s].is_zero() and not mat[s][r].is_zero():
                    tr = tr + bmat[r][s] * mat[s][r]
        if sq_sign < 0:
            tr = -tr
        coeff = ExactScalar(tr.a / dim, tr.b / dim, tr.c / dim, tr.d / dim)
        if not coeff.is_zero():
            terms[mask] = coeff
    return Multivector(n, terms)


def fock_pairing(nu: FormFiber, mu_bar: FormFiber) -> ExactScalar:
    """Metric pairing of a (p,0)- against a (0,q)-form through the Fock model.

    Defined as h(conj(nu) . vacuum, mu_bar . vacuum) in the canonical fiber;
    on orthonormal basis forms it evaluates to 2^p * delta.  This is the
    normalization in which the closed-form product of decomposable V-fiber
    elements is exact.
    """
    model = canonical_model(nu.n)
    vac = SpinorFiber.vacuum(nu.n)
    left = model.act_form(nu.conjugate(), vac)
    right = model.act_form(mu_bar, vac)
    return left.hermitian_pairing(right)


def closed_form_product(nu1: FormFiber, mu1: FormFiber, nu2: FormFiber, mu2: FormFiber,
                        p2: int, q1: int) -> VFiber:
    """2^((p2+q1)/2) g(nu1, mu2) sigma(nu2 ^ mu1) for decomposable factors."""
    coeff = ExactScalar.sqrt2_power(p2 + q1) * fock_pairing(nu1, mu2)
    return sigma_iso(nu2.wedge(mu1)).scale(coeff)


def clpq_spans_full_algebra(n: int) -> bool:
    """chi maps the (p,q)-decomposition onto all of End(S) with full rank."""
    dim = 1 << n
    rows = []
    for ma in range(dim):
        for mb in range(dim):
            mat = chi(VFiber.basis(n, ma, mb))
            rows.append([mat[r][c] for r in range(dim) for c in range(dim)])
    return exact_rank(rows) == dim * dim


def prod1form_identity_canonical(lam: FormFiber, mu_bar: FormFiber,
                                 vacuum: SpinorFiber | None = None):
    """Both sides of the 1-form product identity on the canonical vacuum.

    lam . (mu_bar . vac) = (lam^{01} ^ mu_bar) . vac - 2 ((lam#)^{01} _| mu_bar) . vac
    """
    from .forms import sharp_antihol_part
    n = lam.n
    vac = vacuum if vacuum is not None else SpinorFiber.vacuum(n)
    model = canonical_model(n)
    lhs = model.act_form(lam, model.act_form(mu_bar, vac))
    lam01 = FormFiber(n, {(mi, mj): c for (mi, mj), c in lam.terms.items() if mi == 0})
    contracted = FormFiber(n)
    for j, coeff in sharp_antihol_part(lam).items():
        contracted = contracted + mu_bar.contract_antihol(j).scale(coeff)
    rhs = model.act_form(lam01.wedge(mu_bar), vac) - \
        model.act_form(contracted, vac).scale(ExactScalar(2))
    return lhs, rhs


def prod1form_identity_anticanonical(lam: FormFiber, nu: FormFiber,
                                     vacuum: SpinorFiber | None = None):
    """lam . (nu . vac) = (lam^{10} ^ nu) . vac - 2 ((lam#)^{10} _| nu) . vac."""
    from .forms import sharp_hol_part
    n = lam.n
    vac = vacuum if vacuum is not None else SpinorFiber.vacuum(n)
    model = anticanonical_model(n)
    lhs = model.act_form(lam, model.act_form(nu, vac))
    lam10 = FormFiber(n, {(mi, mj): c for (mi, mj), c in lam.terms.items() if mj == 0})
    contracted = FormFiber(n)
    for j, coeff in sharp_hol_part(lam).items():
        contracted = contracted + nu.contract_hol(j).scale(coeff)
    rhs = model.act_form(lam10.wedge(nu), vac) - \
        model.act_form(contracted, vac).scale(ExactScalar(2))
    return lhs, rhs
