# src/core/orient.py
"""Fixed-point dimensions, Weyl-group characters on fixed points and their
determinant (orientation) characters."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from math import log2
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .characters import RealIrrep
from .cyclotomic import CycNum, as_integer, as_rational
from .errors import InternalInconsistency, UsageError
from .groups import (
    FiniteGroup,
    SubgroupClass,
    WeylGroup,
    class_of,
    generated_subgroup,
    generating_sequence,
    weyl_group,
)
from .lattice import Lattice, gf2_rank, mod2_sublattice, standard_lattice

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DimensionVector:
    class_id: int
    d: Tuple[int, ...]


@dataclass(frozen=True)
class VirtualRep:
    coeffs: Tuple[int, ...]

    def dimension(self, irreps: Sequence[RealIrrep]) -> int:
        return sum(a * s.degree for a, s in zip(self.coeffs, irreps))

    def __add__(self, other: "VirtualRep") -> "VirtualRep":
        return VirtualRep(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, k: int) -> "VirtualRep":
        return VirtualRep(tuple(k * a for a in self.coeffs))


@dataclass(eq=False)
class OrientationData:
    class_id: int
    weyl: WeylGroup
    generators: List[int]                 # W element indices
    signs: Dict[str, List[int]]           # irrep name -> +-1 per generator
    bits: np.ndarray                      # generators x irreps, 1 where the sign is -1
    e2_rank: int
    e2_quotient_rank: int

    def to_json(self) -> Dict[str, Any]:
        return {
            "class_id": self.class_id,
            "weyl_order": self.weyl.group.order,
            "e2_rank": self.e2_rank,
            "e2_quotient_rank": self.e2_quotient_rank,
            "signs": self.signs,
        }


def _character_at(G: FiniteGroup, S: RealIrrep, x: int) -> CycNum:
    return S.character[class_of(G)[x]]


def fixed_dim(G: FiniteGroup, S: RealIrrep, K: SubgroupClass) -> int:
    total = CycNum.rational(0)
    for h in K.representative:
        total = total + _character_at(G, S, h)
    value = as_integer(total / K.order, f"dim {S.name}^{K.label}")
    if not 0 <= value <= S.degree:
        raise InternalInconsistency(f"dim {S.name}^{K.label} = {value} outside [0, {S.degree}]")
    return value


def dimension_vector(G: FiniteGroup, irreps: Sequence[RealIrrep], K: SubgroupClass) -> DimensionVector:
    d = tuple(fixed_dim(G, S, K) for S in irreps)
    if d[0] != 1:
        raise InternalInconsistency(f"Trivial representation has {d[0]}-dimensional {K.label}-fixed points")
    return DimensionVector(K.id, d)


def weyl_fixed_character(G: FiniteGroup, S: RealIrrep, K: SubgroupClass, W: WeylGroup) -> List[CycNum]:
    """psi(wH) = (1/|H|) sum_h chi(n_w h), indexed by W element."""
    H = K.representative
    psi = []
    for w, n in enumerate(W.section):
        total = CycNum.rational(0)
        for h in H:
            total = total + _character_at(G, S, G.table[n][h])
        value = total / len(H)
        if len(H) > 1:
            other = G.table[H[-1]][n]
            check = CycNum.rational(0)
            for h in H:
                check = check + _character_at(G, S, G.table[other][h])
            if check / len(H) != value:
                raise InternalInconsistency(f"Weyl character of {S.name} depends on the coset representative")
        psi.append(value)
    if psi[0] != fixed_dim(G, S, K):
        raise InternalInconsistency(f"psi(1) differs from dim {S.name}^{K.label}")
    return psi


def _minus_one_multiplicity(W: FiniteGroup, psi: Sequence[CycNum], w: int) -> int:
    m = W.orders[w]
    total = CycNum.rational(0)
    x = 0
    for k in range(m):
        total = total + (psi[x] if k % 2 == 0 else -psi[x])
        x = W.table[x][w]
    mu = as_rational(total / m)
    if mu.denominator != 1 or mu < 0:
        raise InternalInconsistency(f"Eigenvalue -1 multiplicity {mu} is not a nonnegative integer")
    return mu.numerator


def _top_exterior(W: FiniteGroup, psi: Sequence[CycNum], w: int) -> int:
    """Lambda^deg psi (w) by the Newton recursion."""
    degree = as_integer(psi[0], "Weyl character degree")
    powers = [0]
    for _ in range(degree):
        powers.append(W.table[powers[-1]][w])
    lam = [CycNum.rational(1)]
    for k in range(1, degree + 1):
        total = CycNum.rational(0)
        for j in range(1, k + 1):
            term = psi[powers[j]] * lam[k - j]
            total = total + (term if j % 2 else -term)
        lam.append(total / k)
    return as_integer(lam[degree], "top exterior power")


def det_character(W: WeylGroup, psi: Sequence[CycNum]) -> List[int]:
    """Sign of det on the fixed-point representation, for every W element."""
    Wg = W.group
    values = []
    for w in range(Wg.order):
        if Wg.orders[w] % 2:
            value = 1
        else:
            value = -1 if _minus_one_multiplicity(Wg, psi, w) % 2 else 1
        if _top_exterior(Wg, psi, w) != value:
            raise InternalInconsistency(f"Determinant formulas disagree at W element {w}")
        values.append(value)
    n = Wg.order
    if n <= 64:
        pairs = [(a, b) for a in range(n) for b in range(n)]
    else:
        rng = random.Random(0)
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(4096)]
    for a, b in pairs:
        if values[Wg.table[a][b]] != values[a] * values[b]:
            raise InternalInconsistency("Determinant character is not multiplicative")
    return values


def e2_quotient_rank(W: FiniteGroup) -> int:
    """Rank of W / <squares, commutators>."""
    gens = {W.table[x][x] for x in range(W.order)}
    for a in range(W.order):
        for b in range(W.order):
            gens.add(W.table[W.table[a][b]][W.table[W.inverse[a]][W.inverse[b]]])
    N = generated_subgroup(W, sorted(gens))
    k = log2(W.order // len(N))
    if W.order % len(N) or k != int(k):
        raise InternalInconsistency(f"|W / E| = {W.order / len(N)} is not a power of two")
    return int(k)


def orientation_data(G: FiniteGroup, irreps: Sequence[RealIrrep], K: SubgroupClass) -> OrientationData:
    W = weyl_group(G, K)
    generators = generating_sequence(W.group)
    signs: Dict[str, List[int]] = {}
    bits = np.zeros((len(generators), len(irreps)), dtype=np.uint8)
    for i, S in enumerate(irreps):
        delta = det_character(W, weyl_fixed_character(G, S, K, W))
        row = [delta[w] for w in generators]
        signs[S.name] = row
        bits[:, i] = [1 if v < 0 else 0 for v in row]
    if bits[:, 0].any():
        raise InternalInconsistency("Trivial representation has a nontrivial orientation character")
    if W.group.order % 2 and bits.any():
        raise InternalInconsistency(f"Odd Weyl group of {K.label} has a nontrivial sign")
    e2 = gf2_rank(bits)
    e2_quotient = e2_quotient_rank(W.group)
    if e2 > e2_quotient:
        raise InternalInconsistency(f"Sign rank {e2} exceeds E2 rank {e2_quotient} at {K.label}")
    log.debug(f"{G.name}/{K.label}: |W|={W.group.order}, e2_rank={e2}")
    return OrientationData(K.id, W, generators, signs, bits, e2, e2_quotient)


def _coeffs(alpha: Any, r: int) -> np.ndarray:
    coeffs = alpha.coeffs if isinstance(alpha, VirtualRep) else tuple(alpha)
    if len(coeffs) != r:
        raise UsageError(f"Virtual representation needs {r} coordinates, got {len(coeffs)}")
    return np.array([int(a) & 1 for a in coeffs], dtype=np.uint8)


def orientation_signs(alpha: Any, od: OrientationData) -> List[int]:
    """Value of prod_i o_H(S_i)^(a_i) on each W generator."""
    parity = (od.bits.astype(np.int64) @ _coeffs(alpha, od.bits.shape[1])) % 2
    return [-1 if p else 1 for p in parity.tolist()]


def is_oriented(alpha: Any, od: OrientationData) -> bool:
    return all(s == 1 for s in orientation_signs(alpha, od))


def orientable_sublattice(irreps: Sequence[RealIrrep], od_trivial: OrientationData) -> Lattice:
    """RO+(G): the kernel of alpha -> prod det(S_i)^(a_i) on G, from the H = e signs."""
    if od_trivial.weyl.subgroup.order != 1:
        raise UsageError("orientable_sublattice needs the orientation data of the trivial subgroup")
    return mod2_sublattice(standard_lattice(len(irreps)), od_trivial.bits)


def reduced_regular(G: FiniteGroup, irreps: Sequence[RealIrrep]) -> VirtualRep:
    """R[G] - 1 in RO(G) coordinates."""
    coeffs = []
    for S in irreps:
        complex_degree = S.degree if S.fs_type == "real" else S.degree // 2
        coeffs.append(complex_degree // 2 if S.fs_type == "quaternionic" else complex_degree)
    coeffs[0] -= 1
    if sum(m * S.degree for m, S in zip(coeffs, irreps)) != G.order - 1:
        raise InternalInconsistency(f"Regular representation of {G.name} does not have dimension {G.order}")
    return VirtualRep(tuple(coeffs))

