"""Chern-Dirac operator laboratory on Hermitian tori.

Exact Clifford/spinor fiber algebra, spectral Hermitian geometry on complex
tori, matrix-free Dirac-type operators, and a certification suite for the
structural identities relating them to Dolbeault-type cohomology.
"""

__version__ = "0.1.0"
