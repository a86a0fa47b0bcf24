# src/core/dixon.py
"""Dixon-Schneider character tables over a prime field, lifted to Q(zeta_e).

Rows are left eigenvectors w of the class matrices N_r, with
N_r[t][s] = #{x in C_r : x^-1 z_t in C_s}; w N_r = omega(C_r) w for the
central character omega of each irreducible.
"""
from __future__ import annotations

import logging
import random
from fractions import Fraction
from math import isqrt
from typing import List, Sequence

from sympy import GF, Poly, Symbol, nextprime, primitive_root, sqrt_mod
from sympy.polys.matrices import DomainMatrix

from .config import DIXON_ATTEMPTS, DIXON_PRIME_BOUND
from .cyclotomic import CycNum
from .errors import CapExceeded, InternalInconsistency
from .groups import FiniteGroup, class_of, conjugacy_classes

log = logging.getLogger(__name__)

_X = Symbol("x")


def dixon_prime(order: int, exponent: int) -> int:
    """Smallest prime p with p % exponent == 1 and p > 2*sqrt(order)."""
    p = 2 * isqrt(order)
    while True:
        p = int(nextprime(p))
        if p > DIXON_PRIME_BOUND:
            raise CapExceeded(
                f"No prime = 1 mod {exponent} above 2*sqrt({order}) below {DIXON_PRIME_BOUND}")
        if p % exponent == 1 and p * p > 4 * order:
            return p


def class_matrices(G: FiniteGroup) -> List[List[List[int]]]:
    classes = conjugacy_classes(G)
    owner = class_of(G)
    k = len(classes)
    mats = []
    for cr in classes:
        m = [[0] * k for _ in range(k)]
        for t, ct in enumerate(classes):
            z = ct.representative
            for x in cr.members:
                m[t][owner[G.table[G.inverse[x]][z]]] += 1
        mats.append(m)
    return mats


def eigenspace_decomposition(A: DomainMatrix) -> List[DomainMatrix]:
    """Left eigenspaces of A for the eigenvalues lying in the ground field."""
    At = A.transpose()
    Fp = A.domain
    charpoly = Poly(At.charpoly(), _X, domain=Fp)
    spaces = []
    for z in sorted(int(r) % Fp.mod for r in charpoly.ground_roots()):
        B = At - DomainMatrix.diag([Fp(z)] * At.shape[0], Fp)
        basis, _ = B.nullspace().rref()
        spaces.append(basis)
    return spaces


def refine_spaces(spaces: List[DomainMatrix], N: DomainMatrix) -> List[DomainMatrix]:
    refined = []
    for S in spaces:
        if S.shape[0] <= 1:
            refined.append(S)
            continue
        _, pivots = S.rref()
        restricted = S * N.extract(range(N.shape[0]), list(pivots))
        for sub in eigenspace_decomposition(restricted):
            refined.append(sub * S)
    return refined


def _common_eigenvectors(mats: List[DomainMatrix], Fp, attempt: int) -> List[DomainMatrix]:
    k = mats[0].shape[0]
    rng = random.Random(attempt)
    mixed = mats[0] * Fp(0)
    for N in mats:
        mixed = mixed + N * Fp(rng.randrange(1, Fp.mod))
    spaces = eigenspace_decomposition(mixed)
    for N in mats:
        if len(spaces) == k:
            break
        spaces = refine_spaces(spaces, N)
    return spaces


def _normalize(G: FiniteGroup, row: Sequence[int], p: int) -> List[int]:
    """Scale an eigenvector to chi(g_t) mod p."""
    classes = conjugacy_classes(G)
    owner = class_of(G)
    inv_class = [owner[G.inverse[c.representative]] for c in classes]
    scale = pow(row[0], -1, p)
    ratios = [(w * scale * pow(c.size, -1, p)) % p for w, c in zip(row, classes)]
    dot = sum(c.size * ratios[t] * ratios[inv_class[t]] for t, c in enumerate(classes)) % p
    deg_sq = (G.order * pow(dot, -1, p)) % p
    root = sqrt_mod(deg_sq, p)
    if root is None:
        raise InternalInconsistency(f"Degree square {deg_sq} has no root mod {p}")
    degree = min(int(root), p - int(root))
    if degree * degree > G.order or G.order % degree:
        raise InternalInconsistency(f"Dixon degree {degree} does not divide |G|={G.order}")
    return [(r * degree) % p for r in ratios]


def _lift(G: FiniteGroup, values: Sequence[int], p: int, zeta_p: int) -> List[CycNum]:
    """chi(g) = sum_j m_j zeta_e^j with m_j the multiplicity of the eigenvalue zeta_e^j."""
    e = G.exponent
    e_inv = pow(e, -1, p)
    degree = values[0]
    lifted = []
    for c in conjugacy_classes(G):
        coeffs = []
        for j in range(e):
            total = 0
            for l in range(e):
                total += values[c.power_map[l]] * pow(zeta_p, (-j * l) % e, p)
            m = (total * e_inv) % p
            if m > degree:
                raise InternalInconsistency(
                    f"Eigenvalue multiplicity {m} exceeds degree {degree} on class {c.index}")
            coeffs.append(Fraction(m))
        if sum(coeffs) != degree:
            raise InternalInconsistency(f"Multiplicities on class {c.index} do not sum to the degree")
        lifted.append(CycNum(e, coeffs))
    return lifted


def dixon_table(G: FiniteGroup) -> List[List[CycNum]]:
    """Irreducible characters of G as rows over the conjugacy classes, trivial row first."""
    classes = conjugacy_classes(G)
    k = len(classes)
    if k == 1:
        return [[CycNum.rational(1, G.exponent)]]
    p = dixon_prime(G.order, G.exponent)
    Fp = GF(p)
    mats = [DomainMatrix.from_list(m, Fp) for m in class_matrices(G)]
    log.info(f"Dixon: {G.name} with {k} classes over GF({p})")

    for attempt in range(DIXON_ATTEMPTS):
        spaces = _common_eigenvectors(mats, Fp, attempt)
        if len(spaces) == k and all(S.shape[0] == 1 for S in spaces):
            break
        log.warning(f"Dixon: eigenspace split incomplete on attempt {attempt}, retrying")
    else:
        raise InternalInconsistency(f"Dixon eigenspace separation failed for {G.name}")

    zeta_p = pow(int(primitive_root(p)), (p - 1) // G.exponent, p)
    rows = []
    for S in spaces:
        vec = [int(v) % p for v in S.to_list()[0]]
        rows.append(_lift(G, _normalize(G, vec, p), p, zeta_p))

    trivial = [i for i, row in enumerate(rows) if all(v == 1 for v in row)]
    if len(trivial) != 1:
        raise InternalInconsistency(f"Dixon table of {G.name} has {len(trivial)} trivial rows")
    rows.insert(0, rows.pop(trivial[0]))
    return rows
