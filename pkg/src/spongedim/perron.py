"""Perron-Frobenius data of small nonnegative matrices by power iteration."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NoConvergence

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 1_000_000


@dataclass
class PerronData:
    eigenvalue: float
    right: np.ndarray
    left: np.ndarray
    iterations: int


def _power_iterate(M: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    # Iterating on M + I keeps the Rayleigh quotient convergent for periodic M.
    n = M.shape[0]
    B = M + np.eye(n)
    x = np.ones(n) / np.sqrt(n)
    for it in range(1, max_iter + 1):
        y = B @ x
        lam = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0, x, it
        y = y / norm
        # the Rayleigh quotient settles quadratically faster than the vector
        if np.abs(y - x).max() < tol:
            return float(y @ B @ y) - 1.0, y, it
        x = y
    raise NoConvergence(f"power iteration did not settle within {max_iter} steps")


def perron(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PerronData:
    """Perron root with right and left eigenvectors of a nonnegative matrix.

    Vectors are normalised to unit sum. Meant for irreducible input; on a
    reducible matrix the returned root is still the spectral radius.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if (A < 0).any():
        raise ValueError("matrix has negative entries")
    lam, r, it_r = _power_iterate(A, tol, max_iter)
    _, l, it_l = _power_iterate(A.T, tol, max_iter)
    r = np.abs(r) / np.abs(r).sum()
    l = np.abs(l) / np.abs(l).sum()
    return PerronData(lam, r, l, it_r + it_l)


def strong_components(A) -> list[list[int]]:
    A = np.asarray(A)
    _, comp = connected_components(A != 0, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        groups.setdefault(int(c), []).append(v)
    return list(groups.values())


def is_irreducible(A) -> bool:
    A = np.asarray(A)
    if A.shape[0] == 0:
        return False
    comps = strong_components(A)
    # a single vertex without a loop is not irreducible
    return len(comps) == 1 and (A.shape[0] > 1 or A[0, 0] != 0)


def spectral_radius(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest Perron root over the irreducible blocks of ``A``."""
    A = np.asarray(A, dtype=float)
    best = 0.0
    for comp in strong_components(A):
        sub = A[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        best = max(best, perron(sub, tol, max_iter).eigenvalue)
    return best


def exact_perron(A_int, approx: PerronData) -> tuple[Fraction, list[Fraction], list[Fraction]] | None:
    """Try to promote a floating Perron triple to exact rationals.

    Succeeds only when a rational guess satisfies the eigen-equations exactly
    in rational arithmetic, so a returned value is always correct.
    """
    A = [[int(v) for v in row] for row in np.asarray(A_int)]
    n = len(A)
    lam = Fraction(approx.eigenvalue).limit_denominator(1000)

    def rationalise(v):
        v = np.asarray(v) / np.max(v)
        return [Fraction(float(x)).limit_denominator(10**6) for x in v]

    r, l = rationalise(approx.right), rationalise(approx.left)
    for a in range(n):
        if sum(A[a][b] * r[b] for b in range(n)) != lam * r[a]:
            return None
        if sum(l[b] * A[b][a] for b in range(n)) != lam * l[a]:
            return None
    sr, sl = sum(r), sum(l)
    return lam, [x / sr for x in r], [x / sl for x in l]
