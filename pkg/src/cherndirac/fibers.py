"""Constant fiber matrices, produced from the exact layer once per n.

Everything the grid operators need pointwise is a complex matrix on the
subset-pair fiber: Clifford generator actions (left/right), wedge and
contraction by coframe elements, slot derivations for the induced connection,
and bidegree projectors.  Building them from the exact algebra keeps the
numerics convention-locked to the fiber layer.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .exact import ExactScalar, ONE
from .clifford import Multivector, clifford_mul, complex_generators
from .forms import FormFiber
from .fock import _wedge, _contract
from .vfiber import VFiber, v_mul


def _keys(n: int):
    return [(a, b) for a in range(1 << n) for b in range(1 << n)]


def _vf_to_column(x: VFiber, n: int) -> np.ndarray:
    col = np.zeros(4 ** n, dtype=complex)
    for (a, b), c in x.terms.items():
        col[(a << n) | b] = c.to_complex()
    return col


def _ff_to_column(x: FormFiber, n: int) -> np.ndarray:
    col = np.zeros(4 ** n, dtype=complex)
    for (a, b), c in x.terms.items():
        col[(a << n) | b] = c.to_complex()
    return col


def _sparse(mat: np.ndarray):
    rows, cols = np.nonzero(np.abs(mat) > 0)
    return rows, cols, mat[rows, cols]


class SparseFiberMatrix:
    """Tiny COO wrapper: out[..., r] += v * in[..., c], broadcast over grid."""

    __slots__ = ("shape", "rows", "cols", "vals")

    def __init__(self, mat: np.ndarray):
        self.shape = mat.shape
        self.rows, self.cols, self.vals = _sparse(mat)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        out[self.rows, self.cols] = self.vals
        return out

    def conj_transpose(self) -> "SparseFiberMatrix":
        out = SparseFiberMatrix.__new__(SparseFiberMatrix)
        out.shape = (self.shape[1], self.shape[0])
        out.rows, out.cols = self.cols.copy(), self.rows.copy()
        out.vals = np.conj(self.vals)
        return out


@lru_cache(maxsize=None)
def clifford_generator_matrices(n: int) -> dict:
    """Left/right V-fiber actions of eps_j, epsbar_j and real generators e_a."""
    gens = complex_generators(n)
    out = {}
    elements = {}
    for j in range(n):
        elements[("eps", j)] = gens[j][0]
        elements[("epsbar", j)] = gens[j][1]
    for a in range(2 * n):
        elements[("real", a)] = Multivector.generator(n, a + 1)
    dim = 4 ** n
    for side in ("L", "R"):
        for name, w in elements.items():
            mat = np.zeros((dim, dim), dtype=complex)
            for idx, (ma, mb) in enumerate(_keys(n)):
                img = v_mul(side, w, VFiber.basis(n, ma, mb))
                mat[:, idx] = _vf_to_column(img, n)
            out[(side, *name)] = mat
    return out


@lru_cache(maxsize=None)
def clifford_element_matrix(n: int, side: str, word: tuple) -> np.ndarray:
    """V-fiber action of a product of frame generators, e.g. ("epsbar",0),...

    The word multiplies left-to-right as Clifford elements before acting.
    """
    gens = complex_generators(n)
    w = Multivector.unit(n)
    for kind, j in word:
        g = gens[j][0] if kind == "eps" else gens[j][1]
        w = clifford_mul(w, g)
    dim = 4 ** n
    mat = np.zeros((dim, dim), dtype=complex)
    for idx, (ma, mb) in enumerate(_keys(n)):
        img = v_mul(side, w, VFiber.basis(n, ma, mb))
        mat[:, idx] = _vf_to_column(img, n)
    return mat


@lru_cache(maxsize=None)
def slot_derivation_matrices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """K_A[j,k] and K_B[j,k]: fermionic wedge_j o iota_k on each subset slot.

    These are the one-particle hopping operators whose field-weighted sums
    implement the induced connection rotation on both the form and V fibers.
    """
    dim = 4 ** n
    KA = np.zeros((n, n, dim, dim), dtype=complex)
    KB = np.zeros((n, n, dim, dim), dtype=complex)
    for j in range(n):
        for k in range(n):
            bj, bk = 1 << j, 1 << k
            for idx, (ma, mb) in enumerate(_keys(n)):
                # act on the first slot
                mid = _contract(bk, {ma: ONE}, ONE)
                if mid:
                    (m1, c1), = mid.items()
                    fin = _wedge(bj, {m1: c1}, ONE)
                    if fin:
                        (m2, c2), = fin.items()
                        KA[j, k, (m2 << n) | mb, idx] += c2.to_complex()
                # act on the second slot
                mid = _contract(bk, {mb: ONE}, ONE)
                if mid:
                    (m1, c1), = mid.items()
                    fin = _wedge(bj, {m1: c1}, ONE)
                    if fin:
                        (m2, c2), = fin.items()
                        KB[j, k, (ma << n) | m2, idx] += c2.to_complex()
    return KA, KB


@lru_cache(maxsize=None)
def form_wedge_matrices(n: int) -> dict:
    """Wedge by eps^j / ebar^j and contraction by eps_j / epsbar_j on forms."""
    dim = 4 ** n
    out = {}
    for j in range(n):
        w_hol = np.zeros((dim, dim), dtype=complex)
        w_anti = np.zeros((dim, dim), dtype=complex)
        c_hol = np.zeros((dim, dim), dtype=complex)
        c_anti = np.zeros((dim, dim), dtype=complex)
        eps_j = FormFiber.basis(n, hol=(j + 1,))
        ebar_j = FormFiber.basis(n, antihol=(j + 1,))
        for idx, (mi, mj) in enumerate(_keys(n)):
            base = FormFiber(n, {(mi, mj): ONE})
            w_hol[:, idx] = _ff_to_column(eps_j.wedge(base), n)
            w_anti[:, idx] = _ff_to_column(ebar_j.wedge(base), n)
            c_hol[:, idx] = _ff_to_column(base.contract_hol(j + 1), n)
            c_anti[:, idx] = _ff_to_column(base.contract_antihol(j + 1), n)
        out[("wedge_hol", j)] = w_hol
        out[("wedge_anti", j)] = w_anti
        out[("contract_hol", j)] = c_hol
        out[("contract_anti", j)] = c_anti
    return out


@lru_cache(maxsize=None)
def bidegree_table(n: int) -> np.ndarray:
    """(p, q) per flattened fiber index, shape (4^n, 2)."""
    out = np.zeros((4 ** n, 2), dtype=int)
    for idx, (a, b) in enumerate(_keys(n)):
        out[idx] = (bin(a).count("1"), bin(b).count("1"))
    return out
