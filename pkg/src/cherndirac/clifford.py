"""Complex Clifford algebra Cl_{2n} with the -2*delta sign convention.

Generators e_1, ..., e_2n satisfy e_j e_k + e_k e_j = -2 delta_jk, so in
particular e_j^2 = -1 (opposite to the Euclidean-positive convention used by
several geometric-algebra packages).  Blades are bitmasks: bit (j-1) set means
generator e_j is present; the empty mask is the unit.  Coefficients live in
Q(i)[sqrt2], so every identity in this module is exact.

The module also provides the vector-space identification with the exterior
algebra: v . w = v ^ w - v _| w for grade-1 v, where _| is the contraction by
the complex-bilinear metric g(e_j, e_k) = delta_jk.
"""

from __future__ import annotations

from .exact import ExactScalar, ONE, I, INV_SQRT2

Blade = int  # bitmask over generators 1..2n (bit j-1 <-> e_j)


def blade_grade(mask: Blade) -> int:
    return bin(mask).count("1")


def blade_indices(mask: Blade) -> tuple[int, ...]:
    """Ascending generator indices (1-based) of a blade."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def _reorder_sign(a: Blade, b: Blade) -> int:
    """Parity sign of interleaving blade a with blade b (canonical order)."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def blade_mul(a: Blade, b: Blade) -> tuple[Blade, int]:
    """Product of basis blades.  Returns (mask, sign) with e_j^2 = -1."""
    sign = _reorder_sign(a, b)
    common = a & b
    if blade_grade(common) & 1:
        sign = -sign
    return a ^ b, sign


def blade_wedge(a: Blade, b: Blade) -> tuple[Blade, int]:
    """Exterior product of basis blades; zero overlap encoded as sign 0."""
    if a & b:
        return 0, 0
    return a | b, _reorder_sign(a, b)


class Multivector:
    """Element of Cl_{2n} over Q(i)[sqrt2], sparse over blades."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[Blade, ExactScalar] | None = None):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.terms: dict[Blade, ExactScalar] = {}
        if terms:
            for mask, coeff in terms.items():
                if mask >> (2 * n):
                    raise ValueError(f"blade {mask:b} uses indices beyond 2n={2*n}")
                if not coeff.is_zero():
                    self.terms[mask] = coeff

    # -- constructors --------------------------------------------------

    @staticmethod
    def unit(n: int) -> "Multivector":
        return Multivector(n, {0: ONE})

    @staticmethod
    def generator(n: int, j: int) -> "Multivector":
        """e_j for 1 <= j <= 2n."""
        if not 1 <= j <= 2 * n:
            raise ValueError(f"generator index {j} out of range 1..{2*n}")
        return Multivector(n, {1 << (j - 1): ONE})

    @staticmethod
    def scalar(n: int, value: ExactScalar) -> "Multivector":
        return Multivector(n, {0: value})

    # -- linear structure ----------------------------------------------

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        out = dict(self.terms)
        for mask, coeff in other.terms.items():
            s = out.get(mask)
            out[mask] = coeff if s is None else s + coeff
        return Multivector(self.n, out)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __neg__(self) -> "Multivector":
        return Multivector(self.n, {m: -c for m, c in self.terms.items()})

    def scale(self, s: ExactScalar) -> "Multivector":
        return Multivector(self.n, {m: s * c for m, c in self.terms.items()})

    def conjugate_coefficients(self) -> "Multivector":
        return Multivector(self.n, {m: c.conjugate() for m, c in self.terms.items()})

    def clifford_conjugate(self) -> "Multivector":
        """Anti-automorphism with v -> -v on vectors (reversal o grade flip)."""
        out = {}
        for mask, coeff in self.terms.items():
            k = blade_grade(mask)
            # reversal gives (-1)^{k(k-1)/2}, grade involution (-1)^k
            sign = -1 if ((k * (k + 1)) // 2) & 1 else 1
            out[mask] = -coeff if sign < 0 else coeff
        return Multivector(self.n, out)

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def grades(self) -> set[int]:
        return {blade_grade(m) for m in self.terms}

    def is_homogeneous(self, k: int) -> bool:
        return all(blade_grade(m) == k for m in self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def coefficient(self, mask: Blade) -> ExactScalar:
        return self.terms.get(mask, ExactScalar())

    def _check(self, other: "Multivector"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: n={self.n} vs n={other.n}")

    def __repr__(self):
        if not self.terms:
            return f"Multivector(n={self.n}, 0)"
        bits = []
        for mask in sorted(self.terms):
            name = "1" if mask == 0 else "e" + "e".join(str(i) for i in blade_indices(mask))
            bits.append(f"{name}:{self.terms[mask].to_complex():.3g}")
        return f"Multivector(n={self.n}, {', '.join(bits)})"


def clifford_mul(a: Multivector, b: Multivector) -> Multivector:
    """Clifford product generated by e_j e_k + e_k e_j = -2 delta_jk."""
    a._check(b)
    out: dict[Blade, ExactScalar] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            mask, sign = blade_mul(ma, mb)
            coeff = ca * cb
            if sign < 0:
                coeff = -coeff
            s = out.get(mask)
            out[mask] = coeff if s is None else s + coeff
    return Multivector(a.n, out)


def poly_wedge(a: Multivector, b: Multivector) -> Multivector:
    """Exterior product, viewing multivectors as elements of Lambda(R^2n)."""
    a._check(b)
    out: dict[Blade, ExactScalar] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            mask, sign = blade_wedge(ma, mb)
            if sign == 0:
                continue
            coeff = ca * cb
            if sign < 0:
                coeff = -coeff
            s = out.get(mask)
            out[mask] = coeff if s is None else s + coeff
    return Multivector(a.n, out)


def metric_contract(v: Multivector, w: Multivector) -> Multivector:
    """Contraction v _| w for grade-1 v, with bilinear g(e_j, e_k) = delta."""
    if not v.is_homogeneous(1):
        raise ValueError("contraction requires a grade-1 first argument")
    v._check(w)
    out: dict[Blade, ExactScalar] = {}
    for mv, cv in v.terms.items():
        j = mv.bit_length()  # 1-based index of the single set bit
        for mw, cw in w.terms.items():
            if not (mw >> (j - 1)) & 1:
                continue
            below = blade_grade(mw & ((1 << (j - 1)) - 1))
            coeff = cv * cw
            if below & 1:
                coeff = -coeff
            mask = mw & ~(1 << (j - 1))
            s = out.get(mask)
            out[mask] = coeff if s is None else s + coeff
    return Multivector(v.n, out)


def ext_mul(v: Multivector, w: Multivector) -> Multivector:
    """v ^ w - v _| w; agrees with clifford_mul(v, w) for grade-1 v."""
    if not v.is_homogeneous(1):
        raise ValueError("ext_mul requires a grade-1 first argument")
    return poly_wedge(v, w) - metric_contract(v, w)


def grade_project(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= 2 * a.n:
        raise ValueError(f"grade {k} out of range 0..{2*a.n}")
    return Multivector(a.n, {m: c for m, c in a.terms.items() if blade_grade(m) == k})


def complex_generators(n: int) -> list[tuple[Multivector, Multivector]]:
    """Normalized complex frame (eps_s, epsbar_s) of the flat fiber.

    eps_s = (e_{2s-1} - i e_{2s}) / sqrt2,  epsbar_s = (e_{2s-1} + i e_{2s}) / sqrt2.
    """
    out = []
    for s in range(1, n + 1):
        lo = 1 << (2 * s - 2)
        hi = 1 << (2 * s - 1)
        eps = Multivector(n, {lo: INV_SQRT2, hi: -(I * INV_SQRT2)})
        epsbar = Multivector(n, {lo: INV_SQRT2, hi: I * INV_SQRT2})
        out.append((eps, epsbar))
    return out


def omega_element(n: int) -> Multivector:
    """Clifford image of the flat fundamental 2-form sum_s e^{2s-1} ^ e^{2s}."""
    terms = {}
    for s in range(1, n + 1):
        terms[(1 << (2 * s - 2)) | (1 << (2 * s - 1))] = ONE
    return Multivector(n, terms)
