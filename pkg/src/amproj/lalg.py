"""Dense real linear algebra with a shared-factorization replaced-column engine.

One pivoted LU factorization of A answers every "determinant of A with some
columns replaced" query: if x(k, .) solves A x = b_k, then the determinant of
A with columns i_1..i_s replaced by b_1..b_s equals

    det(A) * det[ x(k_a, i_b) ]_{a,b=1..s}

so after the O(n^3) factorization each replaced determinant costs only an
s x s minor of the solution table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS

__all__ = [
    "SingularMatrix",
    "DimensionMismatch",
    "DuplicateColumn",
    "SizeLimitExceeded",
    "LUDecomposition",
    "SolutionTable",
    "as_square_matrix",
    "lu_factor",
    "determinant",
    "solve_columns",
    "replaced_determinant",
    "brute_force_determinant",
    "adjugate",
]

BRUTE_FORCE_LIMIT = 10


class SingularMatrix(ValueError):
    """A pivot fell below the singularity threshold."""


class DimensionMismatch(ValueError):
    """Shapes of the inputs are inconsistent."""


class DuplicateColumn(ValueError):
    """The same column position was requested twice."""


class SizeLimitExceeded(ValueError):
    """Input is larger than the brute-force oracle supports."""


def as_square_matrix(a) -> np.ndarray:
    """Validate and return a as a float square matrix (copy not guaranteed)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


@dataclass(frozen=True)
class LUDecomposition:
    """Packed L/U factors of a row permutation of A.

    Row i of `lu` corresponds to row `piv[i]` of the original matrix; the
    strict lower triangle holds the elimination multipliers (unit diagonal
    implied) and the upper triangle holds U.
    """

    n: int
    lu: np.ndarray
    piv: np.ndarray
    parity: int
    smallest_pivot: float
    singular: bool


@dataclass(frozen=True)
class SolutionTable:
    """Solutions x(k, i) of A x(k, .) = b_k for right-hand sides k = 0..s-1."""

    s: int
    n: int
    values: np.ndarray  # shape (s, n)

    def __post_init__(self):
        if self.values.shape != (self.s, self.n):
            raise DimensionMismatch(
                f"solution table shape {self.values.shape} != ({self.s}, {self.n})")


def lu_factor(a, *, allow_singular: bool = False) -> LUDecomposition:
    """Factor a square matrix with partial (row) pivoting.

    Raises SingularMatrix when a pivot magnitude drops below
    singular_pivot_factor * max|A|, unless allow_singular is set, in which
    case the factorization completes with the singular flag raised (an
    exactly zero pivot simply skips its elimination step, leaving det = 0).
    """
    a = as_square_matrix(a)
    n = a.shape[0]
    lu = a.copy()
    piv = np.arange(n)
    parity = 1
    threshold = DEFAULTS.singular_pivot_factor * float(np.abs(a).max())
    smallest = np.inf
    singular = False
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            parity = -parity
        pivot = lu[k, k]
        mag = abs(pivot)
        smallest = min(smallest, mag)
        if mag < threshold or mag == 0.0:
            singular = True
            if not allow_singular:
                raise SingularMatrix(
                    f"pivot {mag:.3e} at column {k} below threshold {threshold:.3e}")
            if pivot == 0.0:
                continue
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LUDecomposition(n=n, lu=lu, piv=piv, parity=parity,
                           smallest_pivot=float(smallest), singular=singular)


def determinant(lu: LUDecomposition) -> float:
    """Parity times the product of U's diagonal; 0 for a flagged factorization."""
    if lu.singular:
        return 0.0
    return float(lu.parity * np.prod(np.diag(lu.lu)))


def solve_columns(lu: LUDecomposition, b) -> SolutionTable:
    """Solve A x(k, .) = b_k for every right-hand side by substitution.

    b is an (s, n) array (or a single n-vector); the factorization must not
    be flagged singular.
    """
    if lu.singular:
        raise SingularMatrix("cannot solve against a singular factorization")
    rhs = np.atleast_2d(np.asarray(b, dtype=float))
    if rhs.shape[1] != lu.n:
        raise DimensionMismatch(f"right-hand sides have length {rhs.shape[1]}, need {lu.n}")
    n = lu.n
    x = rhs[:, lu.piv].T.copy()  # (n, s), rows permuted like the factors
    for i in range(1, n):
        x[i] -= lu.lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            x[i] -= lu.lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu.lu[i, i]
    return SolutionTable(s=rhs.shape[0], n=n, values=x.T.copy())


def _minor_det(sub: np.ndarray) -> float:
    s = sub.shape[0]
    if s == 1:
        return float(sub[0, 0])
    if s == 2:
        return float(sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0])
    return determinant(lu_factor(sub, allow_singular=True))

def replaced_determinant(det_a: float, x: SolutionTable, rhs_rows, col_positions) -> float:
    """det(A) with columns col_positions replaced by right-hand sides rhs_rows.

    Evaluated as det(A) times the s x s minor x[rhs_rows, col_positions] of
    the solution table; positions are 0-based.  Column positions must be
    distinct (canonically increasing; a swapped order is the correspondingly
    reordered replacement).
    """
    rows = list(rhs_rows)
    cols = list(col_positions)
    if len(rows) != len(cols):
        raise DimensionMismatch(f"{len(rows)} right-hand sides but {len(cols)} column positions")
    if len(set(cols)) != len(cols):
        raise DuplicateColumn(f"repeated column position in {cols}")
    if any(not 0 <= r < x.s for r in rows) or any(not 0 <= c < x.n for c in cols):
        raise IndexError("row or column position out of range")
    if not rows:
        return det_a
    return det_a * _minor_det(x.values[np.ix_(rows, cols)])


def brute_force_determinant(a) -> float:
    """Laplace (cofactor) expansion, for test oracles only.

    Expands row by row, sharing minors across column subsets; still
    exponential (O(2^n n)) and limited to n <= 10.
    """
    a = as_square_matrix(a)
    n = a.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitExceeded(f"brute-force determinant limited to n <= {BRUTE_FORCE_LIMIT}")
    rows = a.tolist()
    level = {0: 1.0}  # column-subset mask -> minor of the first popcount(mask) rows
    for r in range(n):
        nxt: dict[int, float] = {}
        row = rows[r]
        for mask, minor in level.items():
            pos = 0  # insertion position of the new column within the subset
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    pos += 1
                    continue
                term = row[j] * minor
                if (r + pos) % 2:
                    term = -term
                key = mask | bit
                nxt[key] = nxt.get(key, 0.0) + term
        level = nxt
    return level[(1 << n) - 1]


def adjugate(a) -> np.ndarray:
    """det(A) * A^{-1}, finite even for singular A.

    Regular path: n solves against unit vectors scaled by det(A).  Singular
    path: per-entry cofactors (test-scale cost, only hit on flagged inputs).
    """
    a = as_square_matrix(a)
    n = a.shape[0]
    if n == 1:
        return np.array([[1.0]])
    lu = lu_factor(a, allow_singular=True)
    if not lu.singular:
        det = determinant(lu)
        inv = solve_columns(lu, np.eye(n)).values  # row k = A^{-1} e_k, i.e. (A^{-1})^T
        return det * inv.T
    adj = np.empty((n, n))
    for i in range(n):
        sub_rows = [r for r in range(n) if r != i]
        for j in range(n):
            sub = a[np.ix_(sub_rows, [c for c in range(n) if c != j])]
            cof = determinant(lu_factor(sub, allow_singular=True))
            adj[j, i] = -cof if (i + j) % 2 else cof
    return adj
