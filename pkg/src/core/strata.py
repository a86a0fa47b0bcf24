# src/core/strata.py
"""Null lattices N_H and N_H^+ per subgroup class, the rank formula,
intersection strata, Mackey-coefficient ranks and claim verification."""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import cache
from .config import MAX_BOX_POINTS, MAX_STRATA
from .context import GroupContext, parse_alpha
from .errors import CapExceeded, InternalInconsistency, StemrankError, UsageError
from .groups import FiniteGroup, SubgroupClass, group_digest, generating_sequence, weyl_group
from .lattice import Lattice, contains, gf2_rank, index, int_kernel, intersect, member, mod2_sublattice, span
from .orient import (
    DimensionVector,
    OrientationData,
    VirtualRep,
    dimension_vector,
    is_oriented,
    orientation_data,
    orientation_signs,
)

log = logging.getLogger(__name__)


# ------------------------
# Per-class analysis
# ------------------------
@dataclass(eq=False)
class SubgroupAnalysis:
    subgroup: SubgroupClass
    dimension: DimensionVector
    orientation: OrientationData
    N: Lattice
    N_plus: Lattice
    plus_index: int

    @property
    def class_id(self) -> int:
        return self.subgroup.id

    @property
    def label(self) -> str:
        return self.subgroup.label

    def to_json(self) -> Dict[str, Any]:
        od = self.orientation
        W = od.weyl.group
        return {
            "id": self.class_id,
            "label": self.label,
            "order": self.subgroup.order,
            "weyl_order": W.order,
            "weyl_generators": [W.element_names[w] for w in od.generators],
            "d": list(self.dimension.d),
            "signs": od.signs,
            "e2_rank": od.e2_rank,
            "e2_quotient_rank": od.e2_quotient_rank,
            "N": self.N.to_json(),
            "N_plus": self.N_plus.to_json(),
            "plus_index": self.plus_index,
        }


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _assemble(r: int, K: SubgroupClass, d: DimensionVector, od: OrientationData) -> SubgroupAnalysis:
    N = int_kernel(d.d)
    if N.rank != r - 1:
        raise InternalInconsistency(f"N_{K.label} has rank {N.rank}, expected {r - 1}")
    N_plus = mod2_sublattice(N, od.bits)
    plus_index = index(N_plus, N) if N.rank else 1
    if N.rank and od.bits.size:
        B2 = np.array(N.basis, dtype=np.int64) & 1
        expected = 2 ** gf2_rank((B2 @ od.bits.T.astype(np.int64)) & 1)
    else:
        expected = 1
    if plus_index != expected:
        raise InternalInconsistency(f"[N_{K.label} : N_{K.label}^+] = {plus_index}, sign rank predicts {expected}")
    if od.weyl.group.order % 2 and N_plus != N:
        raise InternalInconsistency(f"Odd Weyl group of {K.label} but N^+ != N")
    return SubgroupAnalysis(K, d, od, N, N_plus, plus_index)


def analysis_to_json(ctx: GroupContext, analysis: Sequence[SubgroupAnalysis]) -> Dict[str, Any]:
    return {
        "group": ctx.group.name,
        "group_hash": group_digest(ctx.group),
        "irreps": [{"name": S.name, "degree": S.degree, "type": S.fs_type} for S in ctx.irreps],
        "classes": [a.to_json() for a in analysis],
    }


def analysis_from_json(ctx: GroupContext, data: Dict[str, Any]) -> List[SubgroupAnalysis]:
    """Rebuild and re-check an analysis; the expensive determinant work is trusted, the lattices are not."""
    if data.get("group_hash") != group_digest(ctx.group):
        raise UsageError(f"Analysis was computed for another group than {ctx.group.name}")
    if [s.get("name") for s in data.get("irreps", [])] != ctx.names:
        raise UsageError("Analysis irreps do not match the character table")
    entries = data.get("classes", [])
    if len(entries) != len(ctx.subgroups):
        raise UsageError(f"Analysis has {len(entries)} classes, group has {len(ctx.subgroups)}")
    out = []
    for entry, K in zip(entries, ctx.subgroups):
        if entry.get("label") != K.label or entry.get("id") != K.id:
            raise UsageError(f"Analysis class {entry.get('label')} does not match {K.label}")
        W = weyl_group(ctx.group, K)
        gens = generating_sequence(W.group)
        signs = {name: [int(v) for v in entry["signs"][name]] for name in ctx.names}
        bits = np.zeros((len(gens), ctx.r), dtype=np.uint8)
        for i, name in enumerate(ctx.names):
            if len(signs[name]) != len(gens) or any(v not in (1, -1) for v in signs[name]):
                raise UsageError(f"Malformed signs for {name} at {K.label}")
            bits[:, i] = [1 if v < 0 else 0 for v in signs[name]]
        od = OrientationData(K.id, W, gens, signs, bits, gf2_rank(bits), int(entry["e2_quotient_rank"]))
        if od.e2_rank != entry.get("e2_rank"):
            raise InternalInconsistency(f"Stored e2_rank at {K.label} does not match its signs")
        d = DimensionVector(K.id, tuple(int(v) for v in entry["d"]))
        if d.d[0] != 1:
            raise InternalInconsistency(f"Stored dimension vector at {K.label} has d_1 = {d.d[0]}")
        a = _assemble(ctx.r, K, d, od)
        if (a.N.to_json() != entry["N"] or a.N_plus.to_json() != entry["N_plus"]
                or a.plus_index != entry["plus_index"]):
            raise InternalInconsistency(f"Stored lattices at {K.label} do not match a recomputation")
        out.append(a)
    return out


def analyze(ctx: GroupContext) -> List[SubgroupAnalysis]:
    if ctx.analysis is not None:
        return ctx.analysis
    result = None
    stored = ctx.cached.get("analysis") if ctx.use_cache else None
    if stored:
        try:
            result = analysis_from_json(ctx, stored)
        except (StemrankError, KeyError, TypeError, ValueError) as e:
            log.warning(f"Cached analysis for {ctx.group.name} rejected, recomputing: {e}")
    if result is None:
        result = []
        for K in ctx.subgroups:
            d = dimension_vector(ctx.group, ctx.irreps, K)
            od = orientation_data(ctx.group, ctx.irreps, K)
            result.append(_assemble(ctx.r, K, d, od))
        log.info(f"{ctx.group.name}: analysed {len(result)} subgroup classes")
        if ctx.use_cache:
            cache.store_entry(ctx.spec, {"analysis": analysis_to_json(ctx, result)})
    ctx.analysis = result
    return result


# ------------------------
# Ranks
# ------------------------
@dataclass(frozen=True)
class RankResult:
    alpha: Tuple[int, ...]
    rank: int
    witnesses: Tuple[int, ...]
    labels: Tuple[str, ...]

    @property
    def finite(self) -> bool:
        return self.rank == 0

    def to_json(self) -> Dict[str, Any]:
        return {
            "alpha": list(self.alpha),
            "rank": self.rank,
            "witnesses": list(self.witnesses),
            "labels": list(self.labels),
            "finite": self.finite,
        }


def _coords(ctx: GroupContext, alpha: Any) -> Tuple[int, ...]:
    if isinstance(alpha, VirtualRep):
        alpha = alpha.coeffs
    return parse_alpha(alpha, ctx.names)


def rank_at(ctx: GroupContext, alpha: Any) -> RankResult:
    coeffs = _coords(ctx, alpha)
    witnesses = []
    for a in analyze(ctx):
        by_predicate = _dot(coeffs, a.dimension.d) == 0 and is_oriented(coeffs, a.orientation)
        by_membership = member(a.N_plus, coeffs)
        if by_predicate != by_membership:
            raise InternalInconsistency(
                f"{ctx.group.name} at {list(coeffs)}: predicate says {by_predicate}, "
                f"N_{a.label}^+ membership says {by_membership}"
            )
        if by_predicate:
            witnesses.append(a)
    return RankResult(
        alpha=coeffs,
        rank=len(witnesses),
        witnesses=tuple(a.class_id for a in witnesses),
        labels=tuple(a.label for a in witnesses),
    )


def is_finite(ctx: GroupContext, alpha: Any) -> bool:
    return rank_at(ctx, alpha).rank == 0


def box_points(r: int, lo: int, hi: int) -> np.ndarray:
    """Every integer vector of length r with coordinates in [lo, hi], lexicographic."""
    if hi < lo:
        return np.zeros((0, r), dtype=np.int64)
    count = (hi - lo + 1) ** r
    if count > MAX_BOX_POINTS:
        raise CapExceeded(f"Box of {count} points exceeds {MAX_BOX_POINTS}")
    axes = [np.arange(lo, hi + 1, dtype=np.int64)] * r
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return grid.reshape(-1, r)


def witness_matrix(ctx: GroupContext, points: np.ndarray) -> np.ndarray:
    """points x classes, True where the point lies in N_H^+."""
    analysis = analyze(ctx)
    P = np.asarray(points, dtype=np.int64).reshape(-1, ctx.r)
    parity = P & 1
    out = np.zeros((P.shape[0], len(analysis)), dtype=bool)
    for c, a in enumerate(analysis):
        ok = (P @ np.array(a.dimension.d, dtype=np.int64)) == 0
        bits = a.orientation.bits.astype(np.int64)
        if bits.size:
            ok &= ~((parity @ bits.T) % 2).astype(bool).any(axis=1)
        out[:, c] = ok
    return out


def rank_histogram(ctx: GroupContext, lo: int, hi: int) -> Dict[int, int]:
    """rank -> number of points of the box [lo, hi]^r with that rank."""
    points = box_points(ctx.r, lo, hi)
    if not len(points):
        return {}
    ranks = witness_matrix(ctx, points).sum(axis=1)
    values, counts = np.unique(ranks, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


# ------------------------
# Strata
# ------------------------
@dataclass(frozen=True)
class Stratum:
    lattice: Lattice
    classes: Tuple[int, ...]

    @property
    def generic_rank(self) -> int:
        return len(self.classes)


@dataclass(eq=False)
class StratumReport:
    group: str
    analysis: List[SubgroupAnalysis]
    strata: List[Stratum]

    def to_json(self) -> Dict[str, Any]:
        labels = {a.class_id: a.label for a in self.analysis}
        return {
            "group": self.group,
            "classes": [a.to_json() for a in self.analysis],
            "strata": [
                {
                    "basis": [list(row) for row in s.lattice.basis],
                    "classes": list(s.classes),
                    "labels": [labels[c] for c in s.classes],
                    "generic_rank": s.generic_rank,
                }
                for s in self.strata
            ],
        }


def strata_report(ctx: GroupContext) -> StratumReport:
    analysis = analyze(ctx)
    base = [a.N_plus for a in analysis]
    found = set()
    lattices: List[Lattice] = []
    for L in base:
        if L not in found:
            found.add(L)
            lattices.append(L)
    pos = 0
    while pos < len(lattices):
        L = lattices[pos]
        for B in base:
            M = intersect(L, B)
            if M not in found:
                found.add(M)
                lattices.append(M)
                if len(lattices) > MAX_STRATA:
                    raise CapExceeded(f"More than {MAX_STRATA} distinct strata for {ctx.group.name}")
        pos += 1

    strata = []
    for L in lattices:
        classes = tuple(a.class_id for a in analysis if contains(a.N_plus, L))
        meet = base[classes[0]]
        for c in classes[1:]:
            meet = intersect(meet, base[c])
        if meet != L:
            raise InternalInconsistency(f"Stratum {L.basis} is not the meet of its containing classes")
        strata.append(Stratum(L, classes))
    strata.sort(key=lambda s: (-s.generic_rank, s.lattice.basis))
    log.info(f"{ctx.group.name}: {len(strata)} strata")
    return StratumReport(ctx.group.name, analysis, strata)


# ------------------------
# Mackey coefficients
# ------------------------
@dataclass(eq=False)
class MackeyCoefficients:
    # class id -> ((sign of the character on each W generator, multiplicity), ...)
    entries: Dict[int, Tuple[Tuple[Tuple[int, ...], int], ...]]
    name: str = "custom"


def burnside_coefficients(ctx: GroupContext) -> MackeyCoefficients:
    entries = {}
    for a in analyze(ctx):
        entries[a.class_id] = (((1,) * len(a.orientation.generators), 1),)
    return MackeyCoefficients(entries, "burnside")


def zero_coefficients(ctx: GroupContext) -> MackeyCoefficients:
    return MackeyCoefficients({}, "zero")


def extend_signs(W: FiniteGroup, generators: Sequence[int], signs: Sequence[int]) -> List[int]:
    """Extend generator signs to a character of W; UsageError when no homomorphism exists."""
    values = {0: 1}
    queue = [0]
    while queue:
        x = queue.pop(0)
        for g, s in zip(generators, signs):
            y = W.table[x][g]
            v = values[x] * s
            if y not in values:
                values[y] = v
                queue.append(y)
            elif values[y] != v:
                raise UsageError(f"Signs {list(signs)} do not define a character of {W.name}")
    if len(values) != W.order:
        raise InternalInconsistency(f"Generators do not generate {W.name}")
    return [values[w] for w in range(W.order)]


def parse_mackey(ctx: GroupContext, data: Any) -> MackeyCoefficients:
    if data == "burnside" or (isinstance(data, dict) and data.get("burnside")):
        return burnside_coefficients(ctx)
    if data == "zero":
        return zero_coefficients(ctx)
    if not isinstance(data, dict) or not isinstance(data.get("classes"), dict):
        raise UsageError('Mackey coefficients must be "burnside", "zero" or {"classes": {label: [...]}}')
    analysis = analyze(ctx)
    entries: Dict[int, Tuple[Tuple[Tuple[int, ...], int], ...]] = {}
    for label, items in data["classes"].items():
        a = analysis[ctx.subgroup(label).id]
        gens = a.orientation.generators
        parsed = []
        for item in items:
            signs = item.get("signs", "trivial")
            if signs == "trivial":
                signs = [1] * len(gens)
            if not isinstance(signs, list) or len(signs) != len(gens) or any(s not in (1, -1) for s in signs):
                raise UsageError(
                    f"Character at {a.label} needs {len(gens)} signs (+1/-1) on "
                    f"{[a.orientation.weyl.group.element_names[w] for w in gens]}"
                )
            extend_signs(a.orientation.weyl.group, gens, signs)
            m = item.get("multiplicity", 1)
            if not isinstance(m, int) or isinstance(m, bool) or m < 0:
                raise UsageError(f"Multiplicity at {a.label} must be a nonnegative integer, got {m!r}")
            parsed.append((tuple(signs), m))
        entries[a.class_id] = tuple(parsed)
    return MackeyCoefficients(entries)


def load_mackey(ctx: GroupContext, path: str) -> MackeyCoefficients:
    if path in ("burnside", "zero"):
        return parse_mackey(ctx, path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise UsageError(f"Cannot read Mackey coefficients from {path}: {e}")
    return parse_mackey(ctx, data)


def mackey_rank(ctx: GroupContext, alpha: Any, M: MackeyCoefficients) -> int:
    coeffs = _coords(ctx, alpha)
    total = 0
    for a in analyze(ctx):
        if _dot(coeffs, a.dimension.d):
            continue
        sign = tuple(orientation_signs(coeffs, a.orientation))
        total += sum(m for signs, m in M.entries.get(a.class_id, ()) if signs == sign)
    return total


# ------------------------
# Claim verification
# ------------------------
@dataclass(frozen=True)
class Claim:
    label: str
    classes: Tuple[str, ...]
    kind: str                                  # "N+" or "N"
    generators: Tuple[Tuple[int, ...], ...]
    texts: Tuple[str, ...]


@dataclass(frozen=True)
class GeneratorCheck:
    text: str
    vector: Tuple[int, ...]
    computed: bool
    oracle: Optional[bool]                     # None: no matrix model for a needed irrep


@dataclass(eq=False)
class ClaimResult:
    claim: Claim
    computed: Lattice
    claimed: Lattice
    generators: List[GeneratorCheck]
    status: str
    index: Optional[int] = None

    @property
    def confirmed(self) -> bool:
        return self.status == "confirmed"

    def to_json(self) -> Dict[str, Any]:
        return {
            "label": self.claim.label,
            "classes": list(self.claim.classes),
            "kind": self.claim.kind,
            "status": self.status,
            "index": self.index,
            "computed": [list(row) for row in self.computed.basis],
            "claimed": [list(row) for row in self.claimed.basis],
            "generators": [
                {"text": g.text, "vector": list(g.vector), "member": g.computed, "oracle": g.oracle}
                for g in self.generators
            ],
        }


@dataclass(eq=False)
class VerificationReport:
    group: str
    results: List[ClaimResult]
    oracle_checks: int = 0
    oracle_missing: int = 0
    oracle_disagreements: List[str] = field(default_factory=list)

    @property
    def claim_disagreements(self) -> List[ClaimResult]:
        return [res for res in self.results if not res.confirmed]

    @property
    def exit_code(self) -> int:
        if self.oracle_disagreements:
            return 1
        return 4 if self.claim_disagreements else 0

    def to_json(self) -> Dict[str, Any]:
        return {
            "group": self.group,
            "claims": len(self.results),
            "confirmed": sum(1 for res in self.results if res.confirmed),
            "oracle_checks": self.oracle_checks,
            "oracle_missing": self.oracle_missing,
            "oracle_disagreements": self.oracle_disagreements,
            "claim_disagreements": [res.claim.label for res in self.claim_disagreements],
            "results": [res.to_json() for res in self.results],
        }


def _expand(entry: Dict[str, Any], symbols: Optional[Sequence[str]]) -> List[Dict[str, Any]]:
    """Substitute {a}, {a1}, {a2} over all orderings of `symbols`."""
    text = json.dumps(entry)
    if "{a}" not in text and "{a1}" not in text:
        return [entry]
    if not symbols:
        raise UsageError(f"Claim {entry.get('label')} uses placeholders but the file declares no symbols")
    out = []
    for perm in itertools.permutations(symbols):
        filled = text
        for slot, value in zip(("{a}", "{a1}", "{a2}"), perm):
            filled = filled.replace(slot, value)
        out.append(json.loads(filled))
    return out


def _generator(value: Any, names: Sequence[str]) -> Tuple[Tuple[int, ...], str]:
    vec = parse_alpha(value, names)
    return vec, value if isinstance(value, str) else json.dumps(value)


def load_claims(source: Any, names: Sequence[str]) -> List[Claim]:
    """Claims from a JSON file path, a JSON document, or a bare list of claim objects."""
    if isinstance(source, str):
        try:
            with open(source, "r", encoding="utf-8") as f:
                source = json.load(f)
        except (OSError, ValueError) as e:
            raise UsageError(f"Cannot read claims: {e}")
    symbols = source.get("symbols") if isinstance(source, dict) else None
    entries = source.get("claims", []) if isinstance(source, dict) else source
    claims: List[Claim] = []
    seen = set()
    for raw in entries:
        for entry in _expand(raw, symbols):
            try:
                kind = entry.get("kind", "N+")
                if kind not in ("N+", "N"):
                    raise UsageError(f"Claim kind must be 'N+' or 'N', got {kind!r}")
                parsed = [_generator(g, names) for g in entry.get("generators", [])]
                claim = Claim(
                    label=str(entry["label"]),
                    classes=tuple(str(c) for c in entry["classes"]),
                    kind=kind,
                    generators=tuple(vec for vec, _ in parsed),
                    texts=tuple(text for _, text in parsed),
                )
            except (KeyError, TypeError) as e:
                raise UsageError(f"Malformed claim {raw!r}: {e}")
            if not claim.classes:
                raise UsageError(f"Claim {claim.label} names no subgroup classes")
            key = (frozenset(claim.classes), claim.kind, frozenset(claim.generators))
            if key in seen:
                continue
            seen.add(key)
            claims.append(claim)
    return claims


def _oracle_member(ctx: GroupContext, v: Sequence[int], analyses: Sequence[SubgroupAnalysis],
                   kind: str) -> Optional[bool]:
    oracle = ctx.oracle()
    verdicts = []
    for a in analyses:
        K = a.subgroup
        if kind == "N":
            needed = [i for i, c in enumerate(v, start=1) if c]
            if any(not oracle.has_model(i) for i in needed):
                verdicts.append(None)
                continue
            verdicts.append(sum(c * oracle.fixed_dim(i, K.representative) for i, c in enumerate(v, start=1) if c) == 0)
        else:
            verdicts.append(oracle.is_plus(v, K, a.orientation.weyl, a.orientation.generators))
    if any(x is False for x in verdicts):
        return False
    if any(x is None for x in verdicts):
        return None
    return True


def _oracle_sweep(ctx: GroupContext, analysis: Sequence[SubgroupAnalysis], report: VerificationReport) -> None:
    """Dimension vectors and orientation signs against the matrix models, triple by triple."""
    oracle = ctx.oracle()
    for a in analysis:
        K, od = a.subgroup, a.orientation
        for S in ctx.irreps:
            if not oracle.has_model(S.index):
                report.oracle_missing += 1
                continue
            report.oracle_checks += 1
            dim = oracle.fixed_dim(S.index, K.representative)
            if dim != a.dimension.d[S.index - 1]:
                report.oracle_disagreements.append(
                    f"dim {S.name}^{K.label}: characters {a.dimension.d[S.index - 1]}, matrices {dim}")
            signs = oracle.signs(S.index, K, od.weyl, od.generators)
            if signs != od.signs[S.name]:
                report.oracle_disagreements.append(
                    f"orientation of {S.name} at {K.label}: characters {od.signs[S.name]}, matrices {signs}")


def _compare(computed: Lattice, claimed: Lattice) -> Tuple[str, Optional[int]]:
    if claimed == computed:
        return "confirmed", 1
    if contains(computed, claimed):
        if claimed.rank == computed.rank:
            return "claimed-sublattice", index(claimed, computed)
        return "claimed-rank-deficient", None
    if contains(claimed, computed):
        if claimed.rank == computed.rank:
            return "claimed-superlattice", index(computed, claimed)
        return "claimed-rank-excess", None
    return "incomparable", None


def verify_paper_tables(ctx: GroupContext, claims: Sequence[Claim]) -> VerificationReport:
    analysis = analyze(ctx)
    report = VerificationReport(ctx.group.name, [])
    _oracle_sweep(ctx, analysis, report)
    for claim in claims:
        chosen = [analysis[ctx.subgroup(label).id] for label in claim.classes]
        lattices = [a.N_plus if claim.kind == "N+" else a.N for a in chosen]
        computed = lattices[0]
        for L in lattices[1:]:
            computed = intersect(computed, L)
        for v in claim.generators:
            if len(v) != ctx.r:
                raise UsageError(f"Claim {claim.label}: generator {list(v)} needs {ctx.r} coordinates")
        claimed = span(claim.generators, ctx.r)

        checks = []
        for v, text in zip(claim.generators, claim.texts):
            inside = member(computed, v)
            verdict = _oracle_member(ctx, v, chosen, claim.kind)
            if verdict is None:
                report.oracle_missing += 1
            else:
                report.oracle_checks += 1
                if verdict != inside:
                    report.oracle_disagreements.append(
                        f"{claim.label}: {text} membership, characters {inside}, matrices {verdict}")
            checks.append(GeneratorCheck(text, v, inside, verdict))
        for row in computed.basis:
            verdict = _oracle_member(ctx, row, chosen, claim.kind)
            if verdict is False:
                report.oracle_disagreements.append(
                    f"{claim.label}: computed basis vector {list(row)} rejected by matrices")

        status, idx = _compare(computed, claimed)
        if status != "confirmed":
            log.info(f"{ctx.group.name} claim {claim.label}: {status}")
        report.results.append(ClaimResult(claim, computed, claimed, checks, status, idx))
    return report
