"""Band-limited section fields over the torus.

A section is stored as a centered Fourier-coefficient box (modes -B..B per
real axis) with the flattened fiber index last.  Fiber conventions match the
exact layer: both the V-bundle and the full form bundle are indexed by subset
pairs (first block, second block), flattened as key = (mask1 << n) | mask2,
so the form-to-spinor isometry is literally the identity on coefficients.

Coefficients are kept in fft units of the owning grid (coeffs = extract of
numpy fftn of the value field), making pad/ifft and fft/extract exact mutual
inverses with no stray normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .spectral import pad_modes, extract_modes, fftn_spatial, ifftn_spatial


@dataclass(frozen=True)
class BundleSpec:
    kind: str                                # "forms" | "vspinor"
    n: int
    bidegree: tuple[int, int] | None = None  # restriction to one (p,q)
    twist: str | None = None                 # label only; operators carry data

    def __post_init__(self):
        if self.kind not in ("forms", "vspinor"):
            raise ValueError(f"unknown bundle kind {self.kind!r}")

    @property
    def keys(self) -> tuple[tuple[int, int], ...]:
        n = self.n
        all_keys = [(a, b) for a in range(1 << n) for b in range(1 << n)]
        if self.bidegree is None:
            return tuple(all_keys)
        p, q = self.bidegree
        return tuple((a, b) for a, b in all_keys
                     if bin(a).count("1") == p and bin(b).count("1") == q)

    @property
    def fiber_dim(self) -> int:
        return len(self.keys)

    def key_index(self) -> dict[tuple[int, int], int]:
        return {k: i for i, k in enumerate(self.keys)}

    def bidegree_of_index(self, i: int) -> tuple[int, int]:
        a, b = self.keys[i]
        return bin(a).count("1"), bin(b).count("1")

    def untwisted(self) -> "BundleSpec":
        return replace(self, twist=None)

    def with_bidegree(self, p: int, q: int) -> "BundleSpec":
        return replace(self, bidegree=(p, q))

    def full(self) -> "BundleSpec":
        return replace(self, bidegree=None)


class SectionField:
    """Fourier-box coefficients of a band-limited section."""

    __slots__ = ("spec", "band", "N", "coeffs")

    def __init__(self, spec: BundleSpec, band: int, N: int, coeffs: np.ndarray):
        self.spec = spec
        self.band = band
        self.N = N
        expected = tuple([2 * band + 1] * (2 * spec.n)) + (spec.fiber_dim,)
        if coeffs.shape != expected:
            raise ValueError(f"coefficient shape {coeffs.shape} != {expected}")
        self.coeffs = coeffs

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zeros(spec: BundleSpec, band: int, N: int) -> "SectionField":
        shape = tuple([2 * band + 1] * (2 * spec.n)) + (spec.fiber_dim,)
        return SectionField(spec, band, N, np.zeros(shape, dtype=complex))

    @staticmethod
    def random(spec: BundleSpec, band: int, N: int, rng: np.random.Generator,
               mode_band: int | None = None) -> "SectionField":
        """Random section; coefficients restricted to |m| <= mode_band."""
        out = SectionField.zeros(spec, band, N)
        b = band if mode_band is None else min(mode_band, band)
        d = 2 * spec.n
        box = tuple([2 * b + 1] * d) + (spec.fiber_dim,)
        small = rng.standard_normal(box) + 1j * rng.standard_normal(box)
        sel = tuple([slice(band - b, band + b + 1)] * d) + (slice(None),)
        out.coeffs[sel] = small * float(N) ** d / small.size
        return out

    # -- vector-space structure ------------------------------------------

    def copy(self) -> "SectionField":
        return SectionField(self.spec, self.band, self.N, self.coeffs.copy())

    def _check(self, other: "SectionField"):
        if (self.spec, self.band, self.N) != (other.spec, other.band, other.N):
            raise ValueError("section space mismatch")

    def __add__(self, other: "SectionField") -> "SectionField":
        self._check(other)
        return SectionField(self.spec, self.band, self.N, self.coeffs + other.coeffs)

    def __sub__(self, other: "SectionField") -> "SectionField":
        self._check(other)
        return SectionField(self.spec, self.band, self.N, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "SectionField":
        return SectionField(self.spec, self.band, self.N, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SectionField":
        return SectionField(self.spec, self.band, self.N, -self.coeffs)

    # -- transforms -------------------------------------------------------

    def to_values(self) -> np.ndarray:
        """Value field on the owning grid, shape (*grid, fiber)."""
        d = 2 * self.spec.n
        return ifftn_spatial(pad_modes(self.coeffs, self.band, self.N, d), d)

    @staticmethod
    def from_values(values: np.ndarray, spec: BundleSpec, band: int) -> "SectionField":
        d = 2 * spec.n
        N = values.shape[0]
        coeffs = extract_modes(fftn_spatial(values, d), band, d)
        return SectionField(spec, band, N, coeffs)

    def component(self, p: int, q: int) -> "SectionField":
        """Zero out every fiber entry except bidegree (p,q) (same spec)."""
        out = self.copy()
        for i in range(self.spec.fiber_dim):
            if self.spec.bidegree_of_index(i) != (p, q):
                out.coeffs[..., i] = 0.0
        return out

    def bidegree_weights(self) -> dict[tuple[int, int], float]:
        out: dict[tuple[int, int], float] = {}
        for i in range(self.spec.fiber_dim):
            key = self.spec.bidegree_of_index(i)
            out[key] = out.get(key, 0.0) + float(np.sum(np.abs(self.coeffs[..., i]) ** 2))
        return out


def restrict_fiber(section: SectionField, sub: BundleSpec) -> SectionField:
    """Project a full-fiber section onto a restricted fiber spec."""
    idx = section.spec.key_index()
    cols = [idx[k] for k in sub.keys]
    return SectionField(sub, section.band, section.N, section.coeffs[..., cols])


def embed_fiber(section: SectionField, full: BundleSpec) -> SectionField:
    idx = full.key_index()
    out = SectionField.zeros(full, section.band, section.N)
    for i, k in enumerate(section.spec.keys):
        out.coeffs[..., idx[k]] = section.coeffs[..., i]
    return out
