"""Fock-model spinor fibers and the two spin-c Clifford module structures.

The fiber is Lambda(C^n), with basis vectors indexed by subsets of {1..n}.
Two inequivalent labelings of the creation/annihilation pair realize the
canonical and anticanonical modules:

 * canonical:      c(eps_j) = sqrt2 * wedge_j,   c(epsbar_j) = -sqrt2 * iota_j.
   The vacuum (empty subset) is annihilated by every antiholomorphic vector,
   so it spans the lowest fundamental-form eigenspace.
 * anticanonical:  c(epsbar_j) = sqrt2 * wedge_j, c(eps_j) = -sqrt2 * iota_j.
   The vacuum is annihilated by every holomorphic vector and spans the top
   eigenspace.

The +-sqrt2 normalization is forced by the -2*delta anticommutator together
with skew-adjointness of vector multiplication, and it is exactly what makes
the 2^(-k/2) factors of the form-to-spinor isometries cancel on basis states.
"""

from __future__ import annotations

from functools import lru_cache

from .exact import ExactScalar, ONE, I, SQRT2, INV_SQRT2, exact_nullity
from .clifford import Multivector, blade_indices, blade_grade
from .forms import FormFiber, _grade


class SpinorFiber:
    """Element of the 2^n-dimensional Fock fiber, sparse over subsets."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[int, ExactScalar] | None = None):
        self.n = n
        self.terms: dict[int, ExactScalar] = {}
        if terms:
            for mask, coeff in terms.items():
                if mask >> n:
                    raise ValueError("subset index out of range")
                if not coeff.is_zero():
                    self.terms[mask] = coeff

    @staticmethod
    def basis(n: int, mask: int) -> "SpinorFiber":
        return SpinorFiber(n, {mask: ONE})

    @staticmethod
    def vacuum(n: int) -> "SpinorFiber":
        return SpinorFiber(n, {0: ONE})

    def __add__(self, other: "SpinorFiber") -> "SpinorFiber":
        out = dict(self.terms)
        for mask, coeff in other.terms.items():
            s = out.get(mask)
            out[mask] = coeff if s is None else s + coeff
        return SpinorFiber(self.n, out)

    def __sub__(self, other: "SpinorFiber") -> "SpinorFiber":
        return self + (-other)

    def __neg__(self) -> "SpinorFiber":
        return SpinorFiber(self.n, {m: -c for m, c in self.terms.items()})

    def scale(self, s: ExactScalar) -> "SpinorFiber":
        return SpinorFiber(self.n, {m: s * c for m, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpinorFiber):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def hermitian_pairing(self, other: "SpinorFiber") -> ExactScalar:
        """h on the orthonormal subset basis, conjugate-linear in self."""
        out = ExactScalar()
        for mask, coeff in self.terms.items():
            c2 = other.terms.get(mask)
            if c2 is not None:
                out = out + coeff.conjugate() * c2
        return out

    def __repr__(self):
        if not self.terms:
            return f"SpinorFiber(n={self.n}, 0)"
        bits = ", ".join(f"{mask:0{self.n}b}:{c.to_complex():.3g}"
                         for mask, c in sorted(self.terms.items()))
        return f"SpinorFiber(n={self.n}, {bits})"


def _wedge(mask_j: int, psi_terms: dict[int, ExactScalar], scale: ExactScalar):
    out = {}
    for mask, coeff in psi_terms.items():
        if mask & mask_j:
            continue
        below = bin(mask & (mask_j - 1)).count("1")
        c = scale * coeff
        if below & 1:
            c = -c
        out[mask | mask_j] = c
    return out


def _contract(mask_j: int, psi_terms: dict[int, ExactScalar], scale: ExactScalar):
    out = {}
    for mask, coeff in psi_terms.items():
        if not mask & mask_j:
            continue
        below = bin(mask & (mask_j - 1)).count("1")
        c = scale * coeff
        if below & 1:
            c = -c
        out[mask & ~mask_j] = c
    return out


class FockModel:
    """Clifford action of Cl_{2n} on the Fock fiber, canonical or not."""

    def __init__(self, n: int, convention: str):
        if convention not in ("canonical", "anticanonical"):
            raise ValueError("convention must be 'canonical' or 'anticanonical'")
        self.n = n
        self.convention = convention
        self.dim = 1 << n

    # c(e_{2s-1}) = wedge_s - iota_s in both conventions;
    # c(e_{2s}) = +-i (wedge_s + iota_s), sign + for canonical.

    def act_generator(self, j: int, psi: SpinorFiber) -> SpinorFiber:
        if not 1 <= j <= 2 * self.n:
            raise ValueError(f"generator index {j} out of range")
        s = (j + 1) // 2
        bit = 1 << (s - 1)
        if j % 2 == 1:
            terms = _wedge(bit, psi.terms, ONE)
            for mask, coeff in _contract(bit, psi.terms, ONE).items():
                prev = terms.get(mask)
                terms[mask] = -coeff if prev is None else prev - coeff
        else:
            scale = I if self.convention == "canonical" else -I
            terms = _wedge(bit, psi.terms, scale)
            for mask, coeff in _contract(bit, psi.terms, scale).items():
                prev = terms.get(mask)
                terms[mask] = coeff if prev is None else prev + coeff
        return SpinorFiber(self.n, terms)

    def act(self, w: Multivector, psi: SpinorFiber) -> SpinorFiber:
        """Clifford action of a multivector, extended multiplicatively."""
        if w.n != self.n or psi.n != self.n:
            raise ValueError("dimension mismatch between multivector and spinor")
        out = SpinorFiber(self.n)
        for mask, coeff in w.terms.items():
            cur = psi.scale(coeff)
            for j in reversed(blade_indices(mask)):
                cur = self.act_generator(j, cur)
            out = out + cur
        return out

    def act_form(self, eta: FormFiber, psi: SpinorFiber) -> SpinorFiber:
        """Clifford action of a form through the index-raising map."""
        return self.act(eta.to_polyvector(), psi)

    def matrix(self, w: Multivector) -> list[list[ExactScalar]]:
        """Exact 2^n x 2^n matrix of the action (rows = output basis)."""
        cols = [self.act(w, SpinorFiber.basis(self.n, m)) for m in range(self.dim)]
        return [[cols[c].terms.get(r, ExactScalar()) for c in range(self.dim)]
                for r in range(self.dim)]

    def grade_of_mask(self, mask: int) -> int:
        """Fundamental-form grading index k of a basis subset."""
        k = bin(mask).count("1")
        return k if self.convention == "canonical" else self.n - k

    def omega_eigenvalue(self, mask: int) -> ExactScalar:
        return I * ExactScalar(2 * self.grade_of_mask(mask) - self.n)


@lru_cache(maxsize=None)
def canonical_model(n: int) -> FockModel:
    return FockModel(n, "canonical")


@lru_cache(maxsize=None)
def anticanonical_model(n: int) -> FockModel:
    return FockModel(n, "anticanonical")


def omega_eigendecomposition(n: int, convention: str = "canonical"):
    """Eigenstructure of the fundamental-form action on the Fock fiber.

    Returns a list of (k, eigenvalue, basis_masks) for k = 0..n; eigenvalue is
    the exact imaginary number (2k - n)i and the masks span the eigenspace.
    """
    model = canonical_model(n) if convention == "canonical" else anticanonical_model(n)
    spaces = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        spaces[model.grade_of_mask(mask)].append(mask)
    return [(k, I * ExactScalar(2 * k - n), masks) for k, masks in enumerate(spaces)]


def alpha_iso(mu_bar: FormFiber, k: int) -> SpinorFiber:
    """2^(-k/2) * (mu_bar . vacuum) in the canonical model; lands in grade k."""
    if mu_bar.bidegrees() - {(0, k)}:
        raise ValueError(f"alpha_iso expects a homogeneous (0,{k})-form")
    model = canonical_model(mu_bar.n)
    psi = model.act_form(mu_bar, SpinorFiber.vacuum(mu_bar.n))
    return psi.scale(ExactScalar.sqrt2_power(-k))


def beta_iso(nu: FormFiber, k: int) -> SpinorFiber:
    """2^(-k/2) * (nu . vacuum) in the anticanonical model; lands in grade n-k."""
    if nu.bidegrees() - {(k, 0)}:
        raise ValueError(f"beta_iso expects a homogeneous ({k},0)-form")
    model = anticanonical_model(nu.n)
    phi = model.act_form(nu, SpinorFiber.vacuum(nu.n))
    return phi.scale(ExactScalar.sqrt2_power(-k))


def exact_eigenspace_dims(matrix: list[list[ExactScalar]], eigenvalue: ExactScalar) -> int:
    """Nullity of (M - lambda I); brute-force oracle for eigenspace sizes."""
    dim = len(matrix)
    rows = [[matrix[r][c] - (eigenvalue if r == c else ExactScalar())
             for c in range(dim)] for r in range(dim)]
    return exact_nullity(rows)
