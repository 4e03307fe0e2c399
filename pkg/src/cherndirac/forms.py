"""Exact (p,q)-form fibers in a fixed unitary coframe.

A fiber element is stored on the basis eps^{i1}^...^eps^{ip} ^ ebar^{j1}^...
with both index blocks ascending and the holomorphic block first.  The basis
is orthonormal for the Hermitian pairing induced by the frame, which is what
keeps all the isometry statements exact.

Under the metric the coframe vectors raise to eps^j -> epsbar_j and
ebar^j -> eps_j, so `to_polyvector` lands in Lambda(R^{2n}) (equivalently
the Clifford algebra through the canonical vector-space identification).
"""

from __future__ import annotations

from .exact import ExactScalar, ONE, I, INV_SQRT2
from .clifford import Multivector, poly_wedge, complex_generators


def _mask_indices(mask: int) -> tuple[int, ...]:
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def _grade(mask: int) -> int:
    return bin(mask).count("1")


def _reorder_sign(a: int, b: int) -> int:
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


class FormFiber:
    """Pointwise complex differential form with exact coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[tuple[int, int], ExactScalar] | None = None):
        self.n = n
        self.terms: dict[tuple[int, int], ExactScalar] = {}
        if terms:
            for key, coeff in terms.items():
                mi, mj = key
                if mi >> n or mj >> n:
                    raise ValueError("form index out of range")
                if not coeff.is_zero():
                    self.terms[key] = coeff

    # -- constructors ----------------------------------------------------

    @staticmethod
    def one(n: int) -> "FormFiber":
        return FormFiber(n, {(0, 0): ONE})

    @staticmethod
    def basis(n: int, hol: tuple[int, ...] = (), antihol: tuple[int, ...] = ()) -> "FormFiber":
        mi = 0
        for i in hol:
            mi |= 1 << (i - 1)
        mj = 0
        for j in antihol:
            mj |= 1 << (j - 1)
        return FormFiber(n, {(mi, mj): ONE})

    @staticmethod
    def real_coframe(n: int, a: int) -> "FormFiber":
        """The real coframe covector e^a, 1 <= a <= 2n, in the complex basis."""
        s = (a + 1) // 2
        mi, mj = 1 << (s - 1), 1 << (s - 1)
        if a % 2 == 1:
            return FormFiber(n, {(mi, 0): INV_SQRT2, (0, mj): INV_SQRT2})
        return FormFiber(n, {(mi, 0): -(I * INV_SQRT2), (0, mj): I * INV_SQRT2})

    # -- linear structure --------------------------------------------------

    def __add__(self, other: "FormFiber") -> "FormFiber":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            s = out.get(key)
            out[key] = coeff if s is None else s + coeff
        return FormFiber(self.n, out)

    def __sub__(self, other: "FormFiber") -> "FormFiber":
        return self + (-other)

    def __neg__(self) -> "FormFiber":
        return FormFiber(self.n, {k: -c for k, c in self.terms.items()})

    def scale(self, s: ExactScalar) -> "FormFiber":
        return FormFiber(self.n, {k: s * c for k, c in self.terms.items()})

    def conjugate(self) -> "FormFiber":
        """Complex conjugation: swaps the two index blocks."""
        out = {}
        for (mi, mj), coeff in self.terms.items():
            p, q = _grade(mi), _grade(mj)
            sign = -1 if (p * q) & 1 else 1
            c = coeff.conjugate()
            out[(mj, mi)] = -c if sign < 0 else c
        return FormFiber(self.n, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormFiber):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(_grade(mi), _grade(mj)) for mi, mj in self.terms}

    def component(self, p: int, q: int) -> "FormFiber":
        return FormFiber(self.n, {(mi, mj): c for (mi, mj), c in self.terms.items()
                                  if _grade(mi) == p and _grade(mj) == q})

    # -- multiplicative structure -----------------------------------------

    def wedge(self, other: "FormFiber") -> "FormFiber":
        out: dict[tuple[int, int], ExactScalar] = {}
        for (i1, j1), c1 in self.terms.items():
            q1 = _grade(j1)
            for (i2, j2), c2 in other.terms.items():
                if i1 & i2 or j1 & j2:
                    continue
                # move the second holomorphic block across the first
                # antiholomorphic block, then interleave each block
                sign = _reorder_sign(i1, i2) * _reorder_sign(j1, j2)
                if (q1 * _grade(i2)) & 1:
                    sign = -sign
                coeff = c1 * c2
                if sign < 0:
                    coeff = -coeff
                key = (i1 | i2, j1 | j2)
                s = out.get(key)
                out[key] = coeff if s is None else s + coeff
        return FormFiber(self.n, out)

    def contract_hol(self, j: int) -> "FormFiber":
        """Contraction by the frame vector eps_j (pairs with eps^j)."""
        bit = 1 << (j - 1)
        out: dict[tuple[int, int], ExactScalar] = {}
        for (mi, mj), coeff in self.terms.items():
            if not mi & bit:
                continue
            below = _grade(mi & (bit - 1))
            c = -coeff if below & 1 else coeff
            key = (mi & ~bit, mj)
            s = out.get(key)
            out[key] = c if s is None else s + c
        return FormFiber(self.n, out)

    def contract_antihol(self, j: int) -> "FormFiber":
        """Contraction by the frame vector epsbar_j (pairs with ebar^j)."""
        bit = 1 << (j - 1)
        out: dict[tuple[int, int], ExactScalar] = {}
        for (mi, mj), coeff in self.terms.items():
            if not mj & bit:
                continue
            below = _grade(mi) + _grade(mj & (bit - 1))
            c = -coeff if below & 1 else coeff
            key = (mi, mj & ~bit)
            s = out.get(key)
            out[key] = c if s is None else s + c
        return FormFiber(self.n, out)

    # -- pairings and conversions -------------------------------------------

    def hermitian_pairing(self, other: "FormFiber") -> ExactScalar:
        """Orthonormal-basis pairing, conjugate-linear in self."""
        out = ExactScalar()
        for key, coeff in self.terms.items():
            c2 = other.terms.get(key)
            if c2 is not None:
                out = out + coeff.conjugate() * c2
        return out

    def to_polyvector(self) -> Multivector:
        """Raise indices and map into Lambda(R^{2n}) = Cl_{2n} basis blades."""
        gens = complex_generators(self.n)
        out = Multivector(self.n)
        for (mi, mj), coeff in self.terms.items():
            factor = Multivector.scalar(self.n, coeff)
            for i in _mask_indices(mi):
                factor = poly_wedge(factor, gens[i - 1][1])  # eps^i -> epsbar_i
            for j in _mask_indices(mj):
                factor = poly_wedge(factor, gens[j - 1][0])  # ebar^j -> eps_j
            out = out + factor
        return out


def sharp_antihol_part(lam: FormFiber) -> dict[int, ExactScalar]:
    """T^{01}-components of lambda-sharp: coefficient of epsbar_j is lambda(eps_j).

    lambda(eps_j) is the coefficient of eps^j in the (1,0)-part.
    """
    out = {}
    for (mi, mj), coeff in lam.terms.items():
        if mj == 0 and _grade(mi) == 1:
            out[mi.bit_length()] = coeff
    return out


def sharp_hol_part(lam: FormFiber) -> dict[int, ExactScalar]:
    """T^{10}-components of lambda-sharp: coefficient of eps_j is lambda(epsbar_j)."""
    out = {}
    for (mi, mj), coeff in lam.terms.items():
        if mi == 0 and _grade(mj) == 1:
            out[mj.bit_length()] = coeff
    return out
