"""Chern connection, torsion, contorsion and Lee form on metric tori.

Construction route: Levi-Civita Christoffels spectrally from the real metric,
contorsion S from the fundamental form via S(X,Y,Z) = -1/2 dw(JX,Y,Z), the
connection as LC + S, and torsion as the antisymmetrization T(X,Y) = S(X,Y) -
S(Y,X).  Metric compatibility, J-parallelism and the cyclic contorsion
identity are then genuine numerical checks of the pipeline rather than inputs.

Everything the operator layer needs is reduced to frame-component fields:
the u(n)-valued connection coefficients a_{kj}(X) along the complex frame
directions, and the torsion components T(eps_r, eps_s, epsbar_m).
"""

from __future__ import annotations

import numpy as np

from .frames import FrameFieldGrid
from .spectral import spectral_partial, top_shell_energy_fraction


class ResolutionError(ValueError):
    pass


def _grad(values: np.ndarray, real_dim: int) -> np.ndarray:
    """Stack of coordinate partials, appended as a trailing axis."""
    return np.stack([spectral_partial(values, axis) for axis in range(real_dim)],
                    axis=-1)


class ChernGeometry:
    """Connection/torsion data of a Hermitian torus at one resolution."""

    def __init__(self, frames: FrameFieldGrid, aliasing_threshold: float = 1e-3):
        self.frames = frames
        self.N = frames.N
        self.n = frames.n
        self.real_dim = frames.real_dim
        self._build_levi_civita()
        self._build_domega()
        self._check_aliasing(aliasing_threshold)
        self._build_torsion_tables()
        self._build_connection_coefficients()
        self._build_lee_form()

    # -- construction ---------------------------------------------------

    def _build_levi_civita(self):
        g = self.frames.g_x
        d = self.real_dim
        dg = _grad(g, d)  # (..., a, b, c) = d_c g_ab
        g_inv = np.linalg.inv(g)
        # Gamma^c_{ab} = 1/2 g^{ce} (d_a g_be + d_b g_ae - d_e g_ab)
        t1 = np.moveaxis(dg, -1, -3)          # t1[a,b,e] = d_a g_be
        sym = t1 + np.swapaxes(t1, -3, -2) - dg
        self.gamma = 0.5 * np.einsum('...ce,...abe->...abc', g_inv, sym)
        self.g_inv = g_inv

    def _build_domega(self):
        w = self.frames.omega_x
        d = self.real_dim
        dw_partial = _grad(w, d)  # (..., a, b, c) = d_c w_ab
        # (dw)_{cab} = d_c w_ab - d_a w_cb + d_b w_ca ; store index order (abc)
        t = np.moveaxis(dw_partial, -1, -3)  # (..., c, a, b) = d_c w_ab
        self.dw = t - np.swapaxes(t, -3, -2) + np.moveaxis(t, [-3, -2, -1], [-1, -3, -2])
        # verify antisymmetry bookkeeping once per build
        res = float(np.max(np.abs(self.dw + np.swapaxes(self.dw, -2, -1))))
        if res > 1e-9:
            raise AssertionError(f"exterior derivative antisymmetry residual {res:.2e}")

    def _check_aliasing(self, threshold: float):
        frac = top_shell_energy_fraction(self.frames.P, self.real_dim)
        self.frame_top_shell_fraction = frac
        if frac > threshold:
            raise ResolutionError(
                f"frame field has {frac:.2e} of its spectral energy in the top "
                f"mode shell; increase the grid (aliasing threshold {threshold:.1e})")

    def eval3(self, X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """dw contracted with three coefficient vector fields."""
        return np.einsum('...abc,...a,...b,...c->...', self.dw, X, Y, Z)

    def contorsion(self, X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """S(X,Y,Z) = -1/2 dw(JX, Y, Z) on coefficient vector fields."""
        JX = np.einsum('ca,...a->...c', self.frames.j_matrix(), X)
        return -0.5 * self.eval3(JX, Y, Z)

    def torsion3(self, X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
        return self.contorsion(X, Y, Z) - self.contorsion(Y, X, Z)

    def _build_torsion_tables(self):
        n = self.n
        E, Eb = self.frames.E_eps, self.frames.E_epsbar
        shape = self.frames.g_x.shape[:-2]
        T = np.zeros((n, n, n) + shape, dtype=complex)
        for r in range(n):
            for s in range(r + 1, n):
                for m in range(n):
                    val = self.torsion3(E[r], E[s], Eb[m])
                    T[r, s, m] = val
                    T[s, r, m] = -val
        self.T_hhb = T  # T(eps_r, eps_s, epsbar_m)
        # mixed-type torsion must vanish: defining property T(J.,.) = T(.,J.)
        worst = 0.0
        for r in range(n):
            for s in range(n):
                for m in range(n):
                    for Z in (E[m], Eb[m]):
                        worst = max(worst, float(np.max(np.abs(
                            self.torsion3(E[r], Eb[s], Z)))))
        self.mixed_torsion_residual = worst

    def _lc_derivative_of_frame(self, X: np.ndarray, dE: np.ndarray,
                                Ej: np.ndarray) -> np.ndarray:
        """(nabla^LC_X eps_j)^c with dE the coordinate gradient of eps_j."""
        out = np.einsum('...a,...ca->...c', X, dE)
        out = out + np.einsum('...a,...abc,...b->...c', X, self.gamma, Ej)
        return out

    def _build_connection_coefficients(self):
        n = self.n
        E, Eb = self.frames.E_eps, self.frames.E_epsbar
        g = self.frames.g_x
        shape = g.shape[:-2]
        dE = [_grad(E[j], self.real_dim) for j in range(n)]
        a_eps = np.zeros((n, n, n) + shape, dtype=complex)
        a_epsbar = np.zeros((n, n, n) + shape, dtype=complex)
        offtype = 0.0
        for m in range(n):
            for j in range(n):
                for (store, X) in ((a_eps, E[m]), (a_epsbar, Eb[m])):
                    lc = self._lc_derivative_of_frame(X, dE[j], E[j])
                    for k in range(n):
                        val = np.einsum('...c,...cb,...b->...', lc, g, Eb[k])
                        val = val + self.contorsion(X, E[j], Eb[k])
                        store[m, k, j] = val
                    # antiholomorphic component of nabla eps_j must vanish
                    for k in range(n):
                        bad = np.einsum('...c,...cb,...b->...', lc, g, E[k])
                        bad = bad + self.contorsion(X, E[j], E[k])
                        offtype = max(offtype, float(np.max(np.abs(bad))))
        self.a_eps = a_eps          # nabla_{eps_m} eps_j = sum_k a_eps[m,k,j] eps_k
        self.a_epsbar = a_epsbar    # nabla_{epsbar_m} eps_j = ...
        self.type_preservation_residual = offtype

    def _build_lee_form(self):
        # trace route: lee(eps_r) = sum_j T(eps_r, eps_j, epsbar_j)
        self.lee_eps = np.einsum('rjj...->r...', self.T_hhb)

    # -- derived quantities ----------------------------------------------

    def lee_form_dual_route(self) -> np.ndarray:
        """Lee form through the codifferential of the fundamental form.

        Independent of the torsion-trace route: builds nabla^LC w spectrally,
        contracts to the codifferential, and applies J.  The codifferential
        orientation (sign of iota(e_a) nabla_{e_a}) is pinned so that the
        trace identity holds; only the orientation is shared with the other
        route, not the data path.
        """
        w = self.frames.omega_x
        d = self.real_dim
        dw_partial = _grad(w, d)
        nabla_w = np.moveaxis(dw_partial, -1, -3).copy()  # (..., c, a, b)
        nabla_w -= np.einsum('...cad,...db->...cab', self.gamma, w)
        nabla_w -= np.einsum('...cbd,...ad->...cab', self.gamma, w)
        codiff_w = np.einsum('...ca,...cab->...b', self.g_inv, nabla_w)
        JE = np.einsum('ca,j...a->j...c', self.frames.j_matrix(), self.frames.E_eps)
        return np.einsum('j...b,...b->j...', JE, codiff_w)

    def covariant_derivative_vector(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Chern covariant derivative of a coordinate vector field Y along X."""
        dY = _grad(Y, self.real_dim)
        lc = np.einsum('...a,...ca->...c', X, dY)
        lc = lc + np.einsum('...a,...abc,...b->...c', X, self.gamma, Y)
        JX = np.einsum('ca,...a->...c', self.frames.j_matrix(), X)
        s_form = -0.5 * np.einsum('...abc,...a,...b->...c', self.dw, JX, Y)
        s_vec = np.einsum('...cb,...b->...c', self.g_inv, s_form)
        return lc + s_vec

    def torsion_real_table(self) -> np.ndarray:
        """T(e_a, e_b, e_c) on the real unitary frame, shape (2n,2n,2n,...)."""
        R = self.frames.E_real
        d = self.real_dim
        shape = self.frames.g_x.shape[:-2]
        out = np.zeros((d, d, d) + shape)
        for a in range(d):
            for b in range(a + 1, d):
                for c in range(d):
                    val = np.real(self.torsion3(R[a], R[b], R[c]))
                    out[a, b, c] = val
                    out[b, a, c] = -val
        return out

    def frame_directional_derivative(self, values: np.ndarray, which: str,
                                     index: int) -> np.ndarray:
        """Directional derivative of grid values along eps/epsbar_index."""
        X = self.frames.E_eps[index] if which == "eps" else self.frames.E_epsbar[index]
        d = self.real_dim
        grad = _grad(values, d)
        Xb = X.reshape(X.shape[:d] + (1,) * (values.ndim - d) + (d,))
        return (Xb * grad).sum(axis=-1)


def build_geometry(frames: FrameFieldGrid) -> ChernGeometry:
    return ChernGeometry(frames)
