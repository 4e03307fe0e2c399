"""Complex tori C^n / (Z + iZ)^n with band-limited Hermitian metrics.

Real coordinates x in [0,1)^{2n} with z^a = x^{2a} + i x^{2a+1} (0-based).
The metric is the Hermitian matrix field H_{ab}(x) = 2 g(d/dz^a, d/dzbar^b),
stored as a finite Fourier sum; the flat metric is the identity.  Every term
in the description file is automatically mirrored so H stays Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ManifoldFileError(ValueError):
    """Raised on malformed manifold description files."""


@dataclass(frozen=True)
class MetricTerm:
    j: int                     # 0-based row
    k: int                     # 0-based column
    mode: tuple[int, ...]      # length 2n, integer frequencies
    amplitude: complex


@dataclass
class TorusHermitianStructure:
    n: int
    band_limit: int
    terms: list[MetricTerm] = field(default_factory=list)

    @staticmethod
    def flat(n: int) -> "TorusHermitianStructure":
        return TorusHermitianStructure(n=n, band_limit=0, terms=[])

    @property
    def real_dim(self) -> int:
        return 2 * self.n

    def is_flat(self) -> bool:
        return not self.terms

    def grid_coordinates(self, N: int) -> list[np.ndarray]:
        axes = [np.arange(N) / N for _ in range(self.real_dim)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def metric_grid(self, N: int) -> np.ndarray:
        """H(x) sampled on the N^{2n} grid, shape (*spatial, n, n)."""
        xs = self.grid_coordinates(N)
        shape = tuple([N] * self.real_dim)
        H = np.zeros(shape + (self.n, self.n), dtype=complex)
        for a in range(self.n):
            H[..., a, a] = 1.0
        for t in self.terms:
            phase = np.zeros(shape)
            for a, m in enumerate(t.mode):
                if m:
                    phase = phase + m * xs[a]
            wave = np.exp(2j * np.pi * phase)
            H[..., t.j, t.k] += t.amplitude * wave
            H[..., t.k, t.j] += np.conj(t.amplitude) * np.conj(wave)
        return H

    def check_positive_definite(self, N: int) -> None:
        H = self.metric_grid(N)
        eig = np.linalg.eigvalsh(H.reshape(-1, self.n, self.n))
        worst = eig[:, 0].argmin()
        if eig[worst, 0] <= 0:
            idx = np.unravel_index(worst, tuple([N] * self.real_dim))
            point = tuple(round(i / N, 6) for i in idx)
            raise ValueError(
                f"metric is not positive definite at grid point x={point} "
                f"(min eigenvalue {eig[worst, 0]:.3e})")


def _fail(path: str, lineno: int, msg: str) -> ManifoldFileError:
    return ManifoldFileError(f"{path}:{lineno}: {msg}")


def parse_manifold_file(path: str) -> TorusHermitianStructure:
    """Strict parser for the plain-text manifold description format.

    Recognized keys: `n`, `band_limit`, and repeated `term` lines of the form
    `term = j k m_1 ... m_2n amp_re amp_im` with 1-based entry indices.
    Unknown keys or malformed values raise with the offending line number.
    """
    n = None
    band = None
    terms: list[MetricTerm] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _fail(path, lineno, "expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "n":
                try:
                    n = int(value)
                except ValueError:
                    raise _fail(path, lineno, f"n must be an integer, got {value!r}")
                if n < 1:
                    raise _fail(path, lineno, "n must be >= 1")
            elif key == "band_limit":
                try:
                    band = int(value)
                except ValueError:
                    raise _fail(path, lineno, f"band_limit must be an integer, got {value!r}")
                if band < 0:
                    raise _fail(path, lineno, "band_limit must be >= 0")
            elif key == "term":
                if n is None or band is None:
                    raise _fail(path, lineno, "term before n/band_limit declaration")
                parts = value.split()
                expected = 2 + 2 * n + 2
                if len(parts) != expected:
                    raise _fail(path, lineno,
                                f"term needs {expected} fields "
                                f"(j k {2*n} mode ints amp_re amp_im), got {len(parts)}")
                try:
                    j, k = int(parts[0]), int(parts[1])
                    mode = tuple(int(p) for p in parts[2:2 + 2 * n])
                    amp = complex(float(parts[-2]), float(parts[-1]))
                except ValueError as exc:
                    raise _fail(path, lineno, f"malformed term field: {exc}")
                if not (1 <= j <= n and 1 <= k <= n):
                    raise _fail(path, lineno, f"entry indices must be in 1..{n}")
                if any(abs(m) > band for m in mode):
                    raise _fail(path, lineno, f"mode exceeds band_limit {band}")
                terms.append(MetricTerm(j - 1, k - 1, mode, amp))
            else:
                raise _fail(path, lineno, f"unknown key {key!r}")
    if n is None:
        raise ManifoldFileError(f"{path}: missing required key 'n'")
    if band is None:
        raise ManifoldFileError(f"{path}: missing required key 'band_limit'")
    return TorusHermitianStructure(n=n, band_limit=band, terms=terms)


def write_manifold_file(path: str, structure: TorusHermitianStructure,
                        comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"n = {structure.n}\n")
        fh.write(f"band_limit = {structure.band_limit}\n")
        for t in structure.terms:
            mode = " ".join(str(m) for m in t.mode)
            fh.write(f"term = {t.j + 1} {t.k + 1} {mode} "
                     f"{t.amplitude.real!r} {t.amplitude.imag!r}\n")
