# src/core/lattice.py
"""Sublattices of Z^r in row-style Hermite normal form, plus the GF(2)
elimination used for mod-2 constraints."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from .errors import InternalInconsistency, UsageError

IntMat = List[List[int]]


@dataclass(frozen=True)
class Lattice:
    ambient: int
    basis: Tuple[Tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pivots(self) -> List[int]:
        return [next(j for j, v in enumerate(row) if v) for row in self.basis]

    def to_json(self) -> Dict[str, Any]:
        return {"ambient": self.ambient, "basis": [list(row) for row in self.basis]}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Lattice":
        try:
            ambient = int(data["ambient"])
            rows = [[int(v) for v in row] for row in data["basis"]]
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError(f"Malformed lattice JSON: {e}")
        return hnf(rows, ambient)

    def __contains__(self, x) -> bool:
        return member(self, x)


# ------------------------
# Hermite normal form
# ------------------------
def _hnf_rows(M: IntMat, ncols: int) -> Tuple[IntMat, int]:
    """Row-reduce in place; returns (rows, number of pivot rows)."""
    A = [list(row) for row in M]
    r = 0
    for c in range(ncols):
        nonzero = [i for i in range(r, len(A)) if A[i][c]]
        if not nonzero:
            continue
        if nonzero[0] != r:
            A[r], A[nonzero[0]] = A[nonzero[0]], A[r]
        for i in range(r + 1, len(A)):
            b = A[i][c]
            if not b:
                continue
            a = A[r][c]
            x, y, g = (int(v) for v in igcdex(a, b))
            top = [x * u + y * v for u, v in zip(A[r], A[i])]
            bottom = [(a // g) * v - (b // g) * u for u, v in zip(A[r], A[i])]
            A[r], A[i] = top, bottom
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
        pivot = A[r][c]
        for i in range(r):
            q = A[i][c] // pivot
            if q:
                A[i] = [u - q * v for u, v in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return A, r


def hnf(M: Sequence[Sequence[int]], ambient: int = None) -> Lattice:
    """Canonical basis of the row span; zero rows dropped."""
    rows = [[int(v) for v in row] for row in M]
    if ambient is None:
        if not rows:
            raise UsageError("hnf of an empty matrix needs the ambient rank")
        ambient = len(rows[0])
    if any(len(row) != ambient for row in rows):
        raise UsageError(f"Rows do not all have length {ambient}")
    A, r = _hnf_rows(rows, ambient)
    return Lattice(ambient, tuple(tuple(row) for row in A[:r]))


def standard_lattice(r: int) -> Lattice:
    return Lattice(r, tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r)))


def zero_lattice(r: int) -> Lattice:
    return Lattice(r, ())


def left_kernel(A: Sequence[Sequence[int]], rows: int) -> Lattice:
    """{u in Z^rows : u A = 0} via the HNF of [A | I]."""
    cols = len(A[0]) if rows and A[0] else 0
    augmented = [list(A[i]) + [1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    reduced, _ = _hnf_rows(augmented, cols)
    kernel = [row[cols:] for row in reduced if not any(row[:cols])]
    return hnf(kernel, rows) if kernel else zero_lattice(rows)


def int_kernel(v: Sequence[int]) -> Lattice:
    """{x : x . v = 0}"""
    if not any(v):
        raise UsageError("int_kernel needs a nonzero vector")
    return left_kernel([[int(a)] for a in v], len(v))


def intersect(L1: Lattice, L2: Lattice) -> Lattice:
    if L1.ambient != L2.ambient:
        raise UsageError(f"Ambient ranks differ: {L1.ambient} vs {L2.ambient}")
    if not L1.rank or not L2.rank:
        return zero_lattice(L1.ambient)
    stacked = [list(row) for row in L1.basis] + [[-v for v in row] for row in L2.basis]
    K = left_kernel(stacked, len(stacked))
    points = []
    for u in K.basis:
        coeffs = u[:L1.rank]
        points.append([sum(c * row[j] for c, row in zip(coeffs, L1.basis)) for j in range(L1.ambient)])
    return hnf(points, L1.ambient) if points else zero_lattice(L1.ambient)


def member(L: Lattice, x: Sequence[int]) -> bool:
    """Exact membership by back-substitution against the HNF rows."""
    if len(x) != L.ambient:
        raise UsageError(f"Vector of length {len(x)} in a lattice of ambient rank {L.ambient}")
    residual = [int(v) for v in x]
    for row, p in zip(L.basis, L.pivots()):
        if any(residual[j] for j in range(p)):
            return False
        q, rem = divmod(residual[p], row[p])
        if rem:
            return False
        if q:
            residual = [a - q * b for a, b in zip(residual, row)]
    return not any(residual)


def contains(L: Lattice, M: Lattice) -> bool:
    """M is a sublattice of L."""
    return all(member(L, row) for row in M.basis)


def index(sub: Lattice, L: Lattice) -> int:
    """[L : sub] for a full-rank sublattice of L (same rational span)."""
    if not contains(L, sub) or sub.rank != L.rank:
        raise InternalInconsistency("index needs a sublattice of the same rank")
    num, den = 1, 1
    for row, p in zip(sub.basis, sub.pivots()):
        num *= row[p]
    for row, p in zip(L.basis, L.pivots()):
        den *= row[p]
    if num % den:
        raise InternalInconsistency(f"Pivot products {num}/{den} are not an integer index")
    return num // den


def span(generators: Sequence[Sequence[int]], ambient: int) -> Lattice:
    return hnf(generators, ambient) if generators else zero_lattice(ambient)


# ------------------------
# GF(2)
# ------------------------
def gf2_rref(H: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form over GF(2) and its pivot columns."""
    A = (np.asarray(H, dtype=np.int64) & 1).astype(np.uint8)
    if A.ndim != 2:
        raise UsageError("GF(2) elimination needs a 2-D array")
    m, n = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        rows = np.where(A[r:, c] == 1)[0]
        if rows.size == 0:
            continue
        p = r + int(rows[0])
        if p != r:
            A[[r, p], :] = A[[p, r], :]
        ones = np.where(A[:, c] == 1)[0]
        ones = ones[ones != r]
        if ones.size:
            A[ones, :] ^= A[r, :]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def gf2_rank(H: np.ndarray) -> int:
    H = np.asarray(H)
    if H.size == 0:
        return 0
    return len(gf2_rref(H)[1])


def gf2_nullspace(H: np.ndarray, n: int) -> np.ndarray:
    """Basis (rows) of {x in GF(2)^n : H x = 0}."""
    H = np.asarray(H)
    if H.size == 0:
        return np.eye(n, dtype=np.uint8)
    R, pivots = gf2_rref(H.reshape(-1, n))
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for row, p in zip(R, pivots):
            basis[t, p] = row[f]
    return basis


def mod2_sublattice(L: Lattice, C: np.ndarray) -> Lattice:
    """{x in L : C (x mod 2) = 0} from the F2 kernel in L-coordinates, lifted, plus 2L."""
    C = np.asarray(C, dtype=np.int64).reshape(-1, L.ambient) & 1
    if not L.rank or not C.any():
        return L
    B2 = np.array([[int(v) & 1 for v in row] for row in L.basis], dtype=np.int64)
    M = (B2 @ C.T) & 1                       # k x c; u M = 0 over GF(2)
    kernel = gf2_nullspace(M.T, L.rank)
    generators = [[2 * v for v in row] for row in L.basis]
    for u in kernel:
        point = [0] * L.ambient
        for coeff, row in zip(u, L.basis):
            if coeff:
                point = [a + b for a, b in zip(point, row)]
        generators.append(point)
    return hnf(generators, L.ambient)
