"""Exact arithmetic over Q(i)[sqrt2].

Every pointwise algebraic identity in the fiber layer is checked with zero
residual, which requires a coefficient field closed under the 1/sqrt(2)
normalizations of the complex frames and the 2^(k/2) factors of the spinor
isometries.  A scalar is stored as four rationals (a, b, c, d) encoding

    value = (a + b*sqrt2) + i*(c + d*sqrt2).
"""

from __future__ import annotations

from fractions import Fraction


class ExactScalar:
    """Element of Q(i)[sqrt2] with exact field operations."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.c = Fraction(c)
        self.d = Fraction(d)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "ExactScalar":
        return ExactScalar()

    @staticmethod
    def one() -> "ExactScalar":
        return ExactScalar(1)

    @staticmethod
    def i() -> "ExactScalar":
        return ExactScalar(0, 0, 1, 0)

    @staticmethod
    def sqrt2() -> "ExactScalar":
        return ExactScalar(0, 1, 0, 0)

    @staticmethod
    def inv_sqrt2() -> "ExactScalar":
        # 1/sqrt2 = sqrt2/2
        return ExactScalar(0, Fraction(1, 2), 0, 0)

    @staticmethod
    def from_value(v) -> "ExactScalar":
        if isinstance(v, ExactScalar):
            return v
        if isinstance(v, complex):
            raise TypeError("floats are not exact; build ExactScalar from rationals")
        return ExactScalar(Fraction(v))

    @staticmethod
    def sqrt2_power(k: int) -> "ExactScalar":
        """Exact 2^(k/2) for any integer k (negative allowed)."""
        half, rem = divmod(k, 2)
        out = ExactScalar(Fraction(2) ** half)
        if rem:
            out = out * ExactScalar.sqrt2()
        return out

    # -- ring/field operations ----------------------------------------

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        return ExactScalar(self.a + other.a, self.b + other.b,
                           self.c + other.c, self.d + other.d)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return ExactScalar(self.a - other.a, self.b - other.b,
                           self.c - other.c, self.d - other.d)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        # (x1 + i y1)(x2 + i y2) with x, y in Q[sqrt2]; sqrt2*sqrt2 = 2.
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        # real part: x1*x2 - y1*y2
        ra = a1 * a2 + 2 * b1 * b2 - (c1 * c2 + 2 * d1 * d2)
        rb = a1 * b2 + b1 * a2 - (c1 * d2 + d1 * c2)
        # imaginary part: x1*y2 + y1*x2
        ia = a1 * c2 + 2 * b1 * d2 + c1 * a2 + 2 * d1 * b2
        ib = a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2
        return ExactScalar(ra, rb, ia, ib)

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.a, self.b, -self.c, -self.d)

    def inverse(self) -> "ExactScalar":
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero ExactScalar")
        # 1/(x + iy) = (x - iy) / (x^2 + y^2), then invert in Q[sqrt2]
        conj = self.conjugate()
        norm = self * conj  # purely real: c == d == 0
        p, q = norm.a, norm.b
        den = p * p - 2 * q * q  # nonzero for nonzero p + q*sqrt2
        inv_p = p / den
        inv_q = -q / den
        scale = ExactScalar(inv_p, inv_q, 0, 0)
        return conj * scale

    def __truediv__(self, other: "ExactScalar") -> "ExactScalar":
        return self * other.inverse()

    # -- predicates and conversions -----------------------------------

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def is_real(self) -> bool:
        return not (self.c or self.d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return (self.a == other.a and self.b == other.b
                and self.c == other.c and self.d == other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def to_complex(self) -> complex:
        s = 2 ** 0.5
        return complex(float(self.a) + float(self.b) * s,
                       float(self.c) + float(self.d) * s)

    def __repr__(self):
        return f"ExactScalar({self.a}, {self.b}, {self.c}, {self.d})"


ZERO = ExactScalar.zero()
ONE = ExactScalar.one()
I = ExactScalar.i()
SQRT2 = ExactScalar.sqrt2()
INV_SQRT2 = ExactScalar.inv_sqrt2()


def exact_rank(rows: list[list[ExactScalar]]) -> int:
    """Rank of a matrix over Q(i)[sqrt2] by fraction-free-ish elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    row = 0
    for col in range(ncols):
        pivot = None
        for r in range(row, nrows):
            if not m[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = m[row][col].inverse()
        m[row] = [inv * x for x in m[row]]
        for r in range(nrows):
            if r != row and not m[r][col].is_zero():
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == nrows:
            break
    return rank


def exact_nullity(rows: list[list[ExactScalar]]) -> int:
    ncols = len(rows[0]) if rows else 0
    return ncols - exact_rank(rows)
