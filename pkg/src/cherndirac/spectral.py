"""FFT helpers shared by the grid layer: all fields live on N^{2n} grids.

Conventions fixed here once: spatial axes come first, integer modes follow
numpy's fft layout, and d/dz^a acts with symbol pi*i*(m_{2a} - i m_{2a+1}).
Coefficient "boxes" hold the modes -B..B per axis with axis index i <-> mode
i - B; padding/extraction against the fft layout is exact.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def integer_modes(N: int) -> np.ndarray:
    return np.fft.fftfreq(N, d=1.0 / N).astype(int)


def fftn_spatial(values: np.ndarray, real_dim: int) -> np.ndarray:
    return np.fft.fftn(values, axes=tuple(range(real_dim)))


def ifftn_spatial(coeffs: np.ndarray, real_dim: int) -> np.ndarray:
    return np.fft.ifftn(coeffs, axes=tuple(range(real_dim)))


def _axis_modes(N: int, real_dim: int, axis: int) -> np.ndarray:
    shape = [1] * real_dim
    shape[axis] = N
    return integer_modes(N).reshape(shape)


def spectral_partial(values: np.ndarray, axis: int) -> np.ndarray:
    """d/dx^axis of grid values (exact on band-limited data)."""
    N = values.shape[axis]
    hat = np.fft.fft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = N
    hat *= (2j * np.pi) * integer_modes(N).reshape(shape)
    return np.fft.ifft(hat, axis=axis)


def top_shell_energy_fraction(values: np.ndarray, real_dim: int) -> float:
    """Fraction of spectral energy on the highest-frequency shell."""
    hat = fftn_spatial(values, real_dim)
    N = hat.shape[0]
    top = N // 2
    mask = np.zeros(hat.shape[:real_dim], dtype=bool)
    idx = np.abs(integer_modes(N)) == top
    for axis in range(real_dim):
        sl = [slice(None)] * real_dim
        sl[axis] = idx
        m = np.zeros(hat.shape[:real_dim], dtype=bool)
        m[tuple(sl)] = True
        mask |= m
    power = np.abs(hat) ** 2
    extra = tuple(range(real_dim, hat.ndim))
    if extra:
        power = power.sum(axis=extra)
    total = float(power.sum())
    return float(power[mask].sum()) / total if total > 0 else 0.0


def _box_blocks(band: int, N: int, real_dim: int):
    """Pairs of (box slice, grid slice) per axis covering modes -B..B."""
    per_axis = [[(slice(band, 2 * band + 1), slice(0, band + 1)),
                 (slice(0, band), slice(N - band, N))] for _ in range(real_dim)]
    return itertools.product(*per_axis)


def pad_modes(box: np.ndarray, band: int, N: int, real_dim: int) -> np.ndarray:
    """Place a (2B+1)^{2n} coefficient box into N-grid fft layout (zero pad)."""
    if N < 2 * band + 2:
        raise ValueError(f"grid {N} cannot resolve band {band}")
    trailing = box.shape[real_dim:]
    out = np.zeros(tuple([N] * real_dim) + trailing, dtype=complex)
    pad_tr = (slice(None),) * len(trailing)
    for combo in _box_blocks(band, N, real_dim):
        sbox = tuple(c[0] for c in combo) + pad_tr
        sgrid = tuple(c[1] for c in combo) + pad_tr
        out[sgrid] = box[sbox]
    return out


def extract_modes(grid_coeffs: np.ndarray, band: int, real_dim: int) -> np.ndarray:
    """Inverse of pad_modes: pull the centered coefficient box out."""
    N = grid_coeffs.shape[0]
    trailing = grid_coeffs.shape[real_dim:]
    out = np.zeros(tuple([2 * band + 1] * real_dim) + trailing, dtype=complex)
    pad_tr = (slice(None),) * len(trailing)
    for combo in _box_blocks(band, N, real_dim):
        sbox = tuple(c[0] for c in combo) + pad_tr
        sgrid = tuple(c[1] for c in combo) + pad_tr
        out[sbox] = grid_coeffs[sgrid]
    return out


@lru_cache(maxsize=None)
def dz_symbol(N: int, real_dim: int, alpha: int) -> np.ndarray:
    """Symbol of d/dz^alpha on the N-grid (fft layout), full spatial shape."""
    m_re = _axis_modes(N, real_dim, 2 * alpha)
    m_im = _axis_modes(N, real_dim, 2 * alpha + 1)
    return np.broadcast_to((1j * np.pi) * (m_re - 1j * m_im),
                           tuple([N] * real_dim)).copy()


@lru_cache(maxsize=None)
def dzbar_symbol(N: int, real_dim: int, alpha: int) -> np.ndarray:
    m_re = _axis_modes(N, real_dim, 2 * alpha)
    m_im = _axis_modes(N, real_dim, 2 * alpha + 1)
    return np.broadcast_to((1j * np.pi) * (m_re + 1j * m_im),
                           tuple([N] * real_dim)).copy()


@lru_cache(maxsize=None)
def coord_symbol(N: int, real_dim: int, axis: int) -> np.ndarray:
    return np.broadcast_to((2j * np.pi) * _axis_modes(N, real_dim, axis),
                           tuple([N] * real_dim)).copy()
