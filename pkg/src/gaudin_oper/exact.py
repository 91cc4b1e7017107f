"""Exact rational linear algebra on numpy object arrays of ``Fraction``.

Only the handful of routines the representation and Hamiltonian code need:
row reduction, nullspaces, greedy independent subsets and square solves.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "F",
    "frac_array",
    "zeros",
    "eye",
    "rref",
    "rank",
    "nullspace",
    "independent_rows",
    "solve",
    "is_zero",
    "to_complex",
]


def F(x) -> Fraction:
    """Coerce ``x`` to ``Fraction``; strings like ``"3/4"`` are accepted."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing to convert float {x!r} to an exact rational")
    return Fraction(x)


def frac_array(data) -> np.ndarray:
    arr = np.array(data, dtype=object)
    flat = arr.reshape(-1)
    for k, x in enumerate(flat):
        flat[k] = F(x)
    return arr


def zeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    return arr


def eye(n: int) -> np.ndarray:
    arr = zeros((n, n))
    for k in range(n):
        arr[k, k] = Fraction(1)
    return arr


def is_zero(m: np.ndarray) -> bool:
    return all(x == 0 for x in np.asarray(m).reshape(-1))


def to_complex(m: np.ndarray) -> np.ndarray:
    return np.array(np.asarray(m).tolist(), dtype=complex)


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.array(m, dtype=object, copy=True)
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        p = a[r, c]
        a[r] = [x / p for x in a[r]]
        for i in range(nrows):
            if i != r and a[i, c] != 0:
                fac = a[i, c]
                a[i] = a[i] - fac * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray) -> int:
    if np.asarray(m).size == 0:
        return 0
    return len(rref(m)[1])


def nullspace(m: np.ndarray, ncols: int | None = None) -> list[np.ndarray]:
    """Basis of ``{x : m x = 0}`` as a list of exact column vectors.

    ``ncols`` is needed when ``m`` has zero rows.
    """
    m = np.asarray(m, dtype=object)
    if m.size == 0:
        n = ncols if ncols is not None else (m.shape[1] if m.ndim == 2 else 0)
        basis = []
        for k in range(n):
            v = zeros(n)
            v[k] = Fraction(1)
            basis.append(v)
        return basis
    red, pivots = rref(m)
    n = m.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = zeros(n)
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -red[row, fc]
        basis.append(v)
    return basis


def independent_rows(rows: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a greedily chosen maximal independent subset, in input order."""
    chosen: list[int] = []
    echelon: list[tuple[int, np.ndarray]] = []  # (pivot col, normalized row)
    for idx, row in enumerate(rows):
        v = np.array(list(row), dtype=object)
        for pc, er in echelon:
            if v[pc] != 0:
                v = v - v[pc] * er
        nz = next((c for c, x in enumerate(v) if x != 0), None)
        if nz is None:
            continue
        v = np.array([x / v[nz] for x in v], dtype=object)
        echelon.append((nz, v))
        chosen.append(idx)
    return chosen


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` exactly.

    ``a`` may be tall as long as it has full column rank and the system is
    consistent; ``b`` may be a vector or a matrix of right-hand sides.
    """
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    n = a.shape[1]
    aug = np.concatenate([a, b], axis=1)
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or any(p >= n for p in pivots):
        raise np.linalg.LinAlgError("system is singular or inconsistent")
    x = red[:n, n:]
    return x.reshape(-1) if vec else x


def dot(rows: Iterable, cols: Iterable) -> Fraction:
    return sum((x * y for x, y in zip(rows, cols)), Fraction(0))
