# src/core/models.py
"""Explicit matrix models of the real irreps of catalog groups.

The models are an oracle: fixed dimensions come from traces of averaging
projectors and determinants on fixed subspaces from det(rho(n) P + I - P),
with no character formulas involved beyond matching a model to its irrep.
"""
from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .characters import RealIrrep, catalog_characters
from .cyclotomic import CycNum, as_integer
from .errors import InternalInconsistency
from .groups import FiniteGroup, GroupSpec, SubgroupClass, WeylGroup, conjugacy_classes

log = logging.getLogger(__name__)

Matrix = List[List[CycNum]]
ModelFn = Callable[[object], Matrix]

_ZERO = CycNum.rational(0)
_ONE = CycNum.rational(1)
_MINUS_I = CycNum.zeta(4, 3)


# ------------------------
# Matrix helpers
# ------------------------
def identity(d: int) -> Matrix:
    return [[_ONE if i == j else _ZERO for j in range(d)] for i in range(d)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    d, m, cols = len(A), len(B), len(B[0])
    out = []
    for i in range(d):
        row = []
        for j in range(cols):
            total = _ZERO
            for k in range(m):
                if not A[i][k].is_zero() and not B[k][j].is_zero():
                    total = total + A[i][k] * B[k][j]
            row.append(total)
        out.append(row)
    return out


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A: Matrix, q) -> Matrix:
    return [[a * q for a in row] for row in A]


def trace(A: Matrix) -> CycNum:
    total = _ZERO
    for i in range(len(A)):
        total = total + A[i][i]
    return total


def kron(A: Matrix, B: Matrix) -> Matrix:
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def det(A: Matrix) -> CycNum:
    """Division-free Laplace expansion, memoised on the set of used columns."""
    d = len(A)
    partial: Dict[int, CycNum] = {0: _ONE}
    for row in range(d):
        nxt: Dict[int, CycNum] = {}
        for mask, value in partial.items():
            for col in range(d):
                if mask >> col & 1 or A[row][col].is_zero():
                    continue
                term = value * A[row][col]
                if bin(mask >> (col + 1)).count("1") % 2:
                    term = -term
                key = mask | (1 << col)
                nxt[key] = nxt[key] + term if key in nxt else term
        partial = nxt
    return partial.get((1 << d) - 1, _ZERO)


def realify(M: Matrix) -> Matrix:
    """[[Re, -Im], [Im, Re]] for a complex matrix M."""
    conj = [[v.conj() for v in row] for row in M]
    re = mat_scale(mat_add(M, conj), Fraction(1, 2))
    im = [[((a - b) * _MINUS_I) / 2 for a, b in zip(ra, rb)] for ra, rb in zip(M, conj)]
    top = [r + [-v for v in i] for r, i in zip(re, im)]
    bottom = [i + r for r, i in zip(re, im)]
    return top + bottom


# ------------------------
# Catalog models
# ------------------------
def _rotation(n: int, x: int) -> Matrix:
    z, zi = CycNum.zeta(n, x), CycNum.zeta(n, -x)
    c = (z + zi) / 2
    s = ((z - zi) * _MINUS_I) / 2
    return [[c, -s], [s, c]]


_FLIP = [[_ONE, _ZERO], [_ZERO, -_ONE]]


def _one_dim(fn) -> ModelFn:
    return lambda a: [[fn(a)]]


def _std_matrix(p: Sequence[int]) -> Matrix:
    """Permutation action on sum-zero vectors, basis e_k - e_(n-1)."""
    n = len(p)
    M = [[_ZERO] * (n - 1) for _ in range(n - 1)]
    for k in range(n - 1):
        if p[k] != n - 1:
            M[p[k]][k] = M[p[k]][k] + 1
        if p[n - 1] != n - 1:
            M[p[n - 1]][k] = M[p[n - 1]][k] - 1
    return M


_PAIRINGS = (frozenset({frozenset({0, 1}), frozenset({2, 3})}),
             frozenset({frozenset({0, 2}), frozenset({1, 3})}),
             frozenset({frozenset({0, 3}), frozenset({1, 2})}))


def _pairing_action(p: Sequence[int]) -> Tuple[int, ...]:
    out = []
    for pairing in _PAIRINGS:
        image = frozenset(frozenset(p[x] for x in pair) for pair in pairing)
        out.append(_PAIRINGS.index(image))
    return tuple(out)


def complex_models(spec: GroupSpec) -> Optional[List[ModelFn]]:
    """One model per catalog character, in the same order as catalog_characters."""
    catalog = catalog_characters(spec)
    if catalog is None:
        return None
    if spec.kind == "product":
        parts = [complex_models(f) for f in spec.factors]
        combos = [[]]
        for part in parts:
            combos = [c + [m] for c in combos for m in part]

        def product_model(models):
            def fn(a):
                out = [[_ONE]]
                for m, x in zip(models, a):
                    out = kron(out, m(x))
                return out
            return fn
        return [product_model(c) for c in combos]

    n = spec.param
    models: List[ModelFn] = []
    t = 0
    for name, fn in catalog:
        if spec.name == "Cn" or name in ("1", "sigma", "tau", "sigma_tau", "omega") or name.startswith("sigma_"):
            models.append(_one_dim(fn))
        elif spec.name == "Dih":
            t += 1
            models.append(lambda a, t=t: mat_mul(_rotation(n, t * a[0]), _FLIP) if a[1] else _rotation(n, t * a[0]))
        elif spec.name == "Dic":
            t += 1
            models.append(_dicyclic_model(n, t))
        elif name == "std":
            models.append(_std_matrix)
        elif name == "std_sigma":
            models.append(lambda p: mat_scale(_std_matrix(p), _perm_parity(p)))
        elif name == "rho":
            models.append(lambda p: _std_matrix(_pairing_action(p)))
        else:
            models.append(_one_dim(fn))
    return models


def _perm_parity(p: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inversions % 2 else 1


def _dicyclic_model(n: int, t: int) -> ModelFn:
    m = 2 * n
    if t % 2 == 0:
        # real form: a -> rotation, b -> reflection
        return lambda a: mat_mul(_rotation(m, t * a[0]), _FLIP) if a[1] else _rotation(m, t * a[0])
    B = [[_ZERO, CycNum.rational(-1)], [_ONE, _ZERO]]

    def fn(a):
        k, s = a
        A = [[CycNum.zeta(m, t * k), _ZERO], [_ZERO, CycNum.zeta(m, -t * k)]]
        return mat_mul(A, B) if s else A
    return fn


# ------------------------
# Oracle
# ------------------------
class MatrixOracle:
    """Matrix images for every element, one model per real irrep where a catalog model exists."""

    def __init__(self, G: FiniteGroup, irreps: Sequence[RealIrrep]):
        self.group = G
        self.irreps = list(irreps)
        self.images: Dict[int, List[Matrix]] = {}
        self._projectors: Dict[Tuple[int, Tuple[int, ...]], Matrix] = {}
        self._build()

    def _build(self) -> None:
        G = self.group
        if G.spec is None:
            return
        fns = complex_models(G.spec)
        if fns is None:
            log.info(f"No matrix models for {G.name}")
            return
        classes = conjugacy_classes(G)
        candidates = []
        for fn in fns:
            images = [fn(lab) for lab in G.labels]
            candidates.append(images)
            candidates.append([realify(M) for M in images])
        for S in self.irreps:
            for images in candidates:
                traces = [trace(images[c.representative]) for c in classes]
                if len(images[0]) == S.degree and all(a == b for a, b in zip(traces, S.character)):
                    self._check_homomorphism(S, images)
                    self.images[S.index] = images
                    break
            else:
                log.warning(f"{G.name}: no matrix model matches irrep {S.name}")

    def _check_homomorphism(self, S: RealIrrep, images: List[Matrix]) -> None:
        G = self.group
        n = G.order
        if n <= 16:
            pairs = [(a, b) for a in range(n) for b in range(n)]
        else:
            rng = random.Random(0)
            pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(64)]
        for a, b in pairs:
            if mat_mul(images[a], images[b]) != images[G.table[a][b]]:
                raise InternalInconsistency(f"Matrix model of {S.name} is not a homomorphism at {(a, b)}")

    def has_model(self, index: int) -> bool:
        return index in self.images

    def projector(self, index: int, H: Sequence[int]) -> Matrix:
        key = (index, tuple(H))
        if key not in self._projectors:
            images = self.images[index]
            total = [[_ZERO] * len(images[0]) for _ in images[0]]
            for h in H:
                total = mat_add(total, images[h])
            self._projectors[key] = mat_scale(total, Fraction(1, len(H)))
        return self._projectors[key]

    def fixed_dim(self, index: int, H: Sequence[int]) -> int:
        value = as_integer(trace(self.projector(index, H)), "oracle fixed dimension")
        if value < 0:
            raise InternalInconsistency(f"Negative oracle fixed dimension for irrep {index}")
        return value

    def det(self, index: int, H: Sequence[int], n: int) -> int:
        """Determinant of rho(n) on the H-fixed subspace; n must normalise H."""
        P = self.projector(index, H)
        d = len(P)
        complement = [[a - b for a, b in zip(ri, rp)] for ri, rp in zip(identity(d), P)]
        M = mat_add(mat_mul(self.images[index][n], P), complement)
        value = as_integer(det(M), "oracle determinant")
        if value not in (1, -1):
            raise InternalInconsistency(f"Oracle determinant {value} is not a sign")
        return value

    def signs(self, index: int, K: SubgroupClass, W: WeylGroup, generators: Sequence[int]) -> List[int]:
        return [self.det(index, K.representative, W.section[w]) for w in generators]

    def is_plus(self, alpha: Sequence[int], K: SubgroupClass, W: WeylGroup,
                generators: Sequence[int]) -> Optional[bool]:
        """alpha in N_H^+ by matrices alone; None when a needed irrep has no model."""
        needed = [i for i, a in enumerate(alpha, start=1) if a]
        if any(not self.has_model(i) for i in needed):
            return None
        H = K.representative
        if sum(a * self.fixed_dim(i, H) for i, a in enumerate(alpha, start=1) if a):
            return False
        for w in generators:
            n = W.section[w]
            sign = 1
            for i, a in enumerate(alpha, start=1):
                if a % 2:
                    sign *= self.det(i, H, n)
            if sign != 1:
                return False
        return True
