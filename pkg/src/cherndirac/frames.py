"""Global unitary frame fields on metric tori via pointwise Gram-Schmidt.

The torus is parallelizable, so one smooth frame field covers the manifold:
Gram-Schmidt of the holomorphic coordinate frame (fixed index order) under
the Hermitian metric, then eps_j = sqrt2 * (column j), which normalizes
g(eps_j, epsbar_k) = delta.  The associated real unitary frame satisfies
g(e_a, e_b) = delta and J e_{2s-1} = e_{2s} by construction; the residuals
are asserted at build time.
"""

from __future__ import annotations

import numpy as np

from .torus import TorusHermitianStructure

UNITARITY_TOL = 1e-12


class FrameBuildError(ValueError):
    pass


class FrameFieldGrid:
    """Unitary frame data sampled on the N^{2n} grid (spatial axes first)."""

    def __init__(self, structure: TorusHermitianStructure, N: int):
        if N % 2 != 0:
            raise FrameBuildError("grid size N must be even")
        if N < 2 * structure.band_limit + 2:
            raise FrameBuildError(
                f"grid N={N} cannot resolve metric band {structure.band_limit} "
                f"(need N >= {2 * structure.band_limit + 2})")
        structure.check_positive_definite(N)
        self.structure = structure
        self.N = N
        self.n = structure.n
        self.real_dim = structure.real_dim
        self.H = structure.metric_grid(N)
        self.P = self._gram_schmidt(self.H)
        self._build_real_tensors()
        self._build_frame_coefficients()
        self.unitarity_residual = self._unitarity_residual()
        if self.unitarity_residual > UNITARITY_TOL:
            raise FrameBuildError(
                f"frame unitarity residual {self.unitarity_residual:.3e} "
                f"exceeds {UNITARITY_TOL}")

    @staticmethod
    def _gram_schmidt(H: np.ndarray) -> np.ndarray:
        n = H.shape[-1]
        P = np.zeros_like(H)
        for j in range(n):
            v = np.zeros(H.shape[:-1], dtype=complex)
            v[..., j] = 1.0
            for k in range(j):
                u = P[..., :, k]
                proj = np.einsum('...a,...ab,...b->...', v, H, u.conj())
                v = v - proj[..., None] * u
            norm = np.sqrt(np.real(np.einsum('...a,...ab,...b->...', v, H, v.conj())))
            P[..., :, j] = v / norm[..., None]
        return P

    def _build_real_tensors(self):
        n, shape = self.n, self.H.shape[:-2]
        g = np.zeros(shape + (2 * n, 2 * n))
        w = np.zeros(shape + (2 * n, 2 * n))
        reH, imH = np.real(self.H), np.imag(self.H)
        for a in range(n):
            for b in range(n):
                g[..., 2 * a, 2 * b] = reH[..., a, b]
                g[..., 2 * a, 2 * b + 1] = imH[..., a, b]
                g[..., 2 * a + 1, 2 * b] = -imH[..., a, b]
                g[..., 2 * a + 1, 2 * b + 1] = reH[..., a, b]
                w[..., 2 * a, 2 * b] = -imH[..., a, b]
                w[..., 2 * a, 2 * b + 1] = reH[..., a, b]
                w[..., 2 * a + 1, 2 * b] = -reH[..., a, b]
                w[..., 2 * a + 1, 2 * b + 1] = -imH[..., a, b]
        self.g_x = g
        self.omega_x = w
        self.volume_density = np.real(np.linalg.det(self.H))

    def _build_frame_coefficients(self):
        n, shape = self.n, self.H.shape[:-2]
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        E = np.zeros((n,) + shape + (2 * n,), dtype=complex)
        for j in range(n):
            for alpha in range(n):
                E[j][..., 2 * alpha] = self.P[..., alpha, j] * inv_sqrt2
                E[j][..., 2 * alpha + 1] = -1j * self.P[..., alpha, j] * inv_sqrt2
        self.E_eps = E
        self.E_epsbar = E.conj()
        R = np.zeros((2 * n,) + shape + (2 * n,))
        for s in range(n):
            R[2 * s] = np.sqrt(2.0) * np.real(E[s])
            R[2 * s + 1] = -np.sqrt(2.0) * np.imag(E[s])
        self.E_real = R

    def _unitarity_residual(self) -> float:
        n = self.n
        worst = 0.0
        for j in range(n):
            for k in range(n):
                val = np.einsum('...a,...ab,...b->...',
                                self.E_eps[j], self.g_x, self.E_epsbar[k])
                target = 1.0 if j == k else 0.0
                worst = max(worst, float(np.max(np.abs(val - target))))
                hol = np.einsum('...a,...ab,...b->...',
                                self.E_eps[j], self.g_x, self.E_eps[k])
                worst = max(worst, float(np.max(np.abs(hol))))
        return worst

    def j_matrix(self) -> np.ndarray:
        """Constant matrix of J acting on coordinate coefficient vectors."""
        n = self.n
        J = np.zeros((2 * n, 2 * n))
        for a in range(n):
            J[2 * a + 1, 2 * a] = 1.0
            J[2 * a, 2 * a + 1] = -1.0
        return J


def build_frames(structure: TorusHermitianStructure, N: int) -> FrameFieldGrid:
    return FrameFieldGrid(structure, N)
