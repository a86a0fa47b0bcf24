# src/core/characters.py
"""Complex character tables, Frobenius-Schur indicators and the simple real
representations that form the basis of RO(G)."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .cyclotomic import CycNum, as_integer
from .dixon import dixon_table
from .errors import InternalInconsistency, UsageError
from .groups import (
    ElementClass,
    FiniteGroup,
    GroupSpec,
    build_group,
    conjugacy_classes,
    group_digest,
    parse_group_spec,
)

log = logging.getLogger(__name__)

FS_TYPES = {1: "real", 0: "complex-pair", -1: "quaternionic"}


@dataclass(eq=False)
class CharacterTable:
    group: FiniteGroup
    classes: Tuple[ElementClass, ...]
    chars: List[List[CycNum]]
    degrees: List[int]
    source: str                       # "catalog" | "dixon" | "imported"
    names: Optional[List[str]] = None  # name of the real irrep each character realifies into


@dataclass(frozen=True)
class RealIrrep:
    index: int                        # 1-based; S_1 is trivial
    name: str
    character: Tuple[CycNum, ...]
    degree: int
    fs_type: str
    constituents: Tuple[int, ...]


# ------------------------
# Catalog closed forms
# ------------------------
CatalogChar = Tuple[str, Callable[[Any], CycNum]]


def _z(n: int, k: int) -> CycNum:
    return CycNum.zeta(n, k)


def _cos2(n: int, t: int, k: int) -> CycNum:
    """zeta_n^(tk) + zeta_n^(-tk)"""
    return _z(n, t * k) + _z(n, -t * k)


def _sign(x: int) -> CycNum:
    return CycNum.rational(-1 if x % 2 else 1)


def _cyclic_chars(n: int) -> List[CatalogChar]:
    chars = []
    for t in range(n):
        if t == 0:
            name = "1"
        elif 2 * t == n:
            name = "sigma"
        else:
            name = f"phi_{min(t, n - t)}"
        chars.append((name, lambda k, t=t: _z(n, t * k)))
    return chars


def _dihedral_chars(n: int) -> List[CatalogChar]:
    chars: List[CatalogChar] = [
        ("1", lambda a: CycNum.rational(1)),
        ("sigma", lambda a: _sign(a[1])),
    ]
    if n % 2 == 0:
        chars.append(("tau", lambda a: _sign(a[0])))
        chars.append(("sigma_tau", lambda a: _sign(a[0] + a[1])))
    for t in range(1, (n + 1) // 2):
        chars.append((f"phi_{t}", lambda a, t=t: CycNum.rational(0) if a[1] else _cos2(n, t, a[0])))
    return chars


def _dicyclic_chars(n: int) -> List[CatalogChar]:
    m = 2 * n
    quaternion = n == 2
    chars: List[CatalogChar] = [("1", lambda a: CycNum.rational(1))]
    if n % 2 == 0:
        # a -> alpha, b -> beta with alpha, beta = +-1
        named = [
            ("sigma_i" if quaternion else "tau", -1, 1),
            ("sigma_j" if quaternion else "sigma", 1, -1),
            ("sigma_k" if quaternion else "sigma_tau", -1, -1),
        ]
        for name, alpha, beta in named:
            chars.append((name, lambda a, al=alpha, be=beta: CycNum.rational(al ** a[0] * be ** a[1])))
    else:
        chars.append(("sigma", lambda a: _sign(a[1])))
        for e in (1, 3):
            # a -> -1, b -> +-i
            chars.append(("omega", lambda a, e=e: _sign(a[0]) * _z(4, e * a[1])))
    for t in range(1, n):
        name = ("h" if quaternion else f"h_{t}") if t % 2 else f"phi_{t}"
        chars.append((name, lambda a, t=t: CycNum.rational(0) if a[1] else _cos2(m, t, a[0])))
    return chars


def _klein_chars() -> List[CatalogChar]:
    # kernel of sigma_a is <a>, with i = (0, 1), j = (1, 0), k = (1, 1)
    return [
        ("1", lambda a: CycNum.rational(1)),
        ("sigma_i", lambda a: _sign(a[0])),
        ("sigma_j", lambda a: _sign(a[1])),
        ("sigma_k", lambda a: _sign(a[0] + a[1])),
    ]


def _perm_sign(p: Sequence[int]) -> int:
    seen, sign = set(), 1
    for start in range(len(p)):
        if start in seen:
            continue
        length, x = 0, start
        while x not in seen:
            seen.add(x)
            x = p[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def _pairings_fixed(p: Sequence[int]) -> int:
    fixed = 0
    for pairing in _PAIRINGS:
        image = {frozenset(p[x] for x in pair) for pair in pairing}
        if image == {frozenset(pair) for pair in pairing}:
            fixed += 1
    return fixed


def _symmetric_chars(n: int) -> Optional[List[CatalogChar]]:
    if n > 4:
        return None
    chars: List[CatalogChar] = [("1", lambda p: CycNum.rational(1))]
    if n >= 2:
        chars.append(("sigma", lambda p: CycNum.rational(_perm_sign(p))))
    if n >= 3:
        def std(p):
            return CycNum.rational(sum(1 for x in range(n) if p[x] == x) - 1)
        chars.append(("std", std))
    if n == 4:
        chars.append(("std_sigma", lambda p: std(p) * _perm_sign(p)))
        chars.append(("rho", lambda p: CycNum.rational(_pairings_fixed(p) - 1)))
    return chars


def catalog_characters(spec: GroupSpec) -> Optional[List[CatalogChar]]:
    """(real-irrep name, value on a label) for each irreducible, or None if no closed form."""
    if spec.kind == "product":
        parts = [catalog_characters(f) for f in spec.factors]
        if any(p is None for p in parts):
            return None
        combined: List[CatalogChar] = []
        for combo in _product_combos(parts):
            names = [name for name, _ in combo]
            fns = [fn for _, fn in combo]
            nontrivial = [nm for nm in names if nm != "1"]
            name = "*".join(nontrivial) if nontrivial else "1"

            def value(a, fns=fns):
                out = CycNum.rational(1)
                for fn, x in zip(fns, a):
                    out = out * fn(x)
                return out
            combined.append((name, value))
        return combined
    if spec.kind != "catalog":
        return None
    if spec.name == "Cn":
        return _cyclic_chars(spec.param)
    if spec.name == "Dih":
        return _dihedral_chars(spec.param)
    if spec.name == "Dic":
        return _dicyclic_chars(spec.param)
    if spec.name == "Klein4":
        return _klein_chars()
    return _symmetric_chars(spec.param)


def _product_combos(parts):
    combos = [[]]
    for part in parts:
        combos = [c + [ch] for c in combos for ch in part]
    return combos


def catalog_table(G: FiniteGroup) -> Optional[CharacterTable]:
    if G.spec is None:
        return None
    catalog = catalog_characters(G.spec)
    if catalog is None:
        return None
    classes = conjugacy_classes(G)
    chars, names = [], []
    for name, fn in catalog:
        chars.append([fn(G.labels[c.representative]).embed(G.exponent) for c in classes])
        names.append(name)
    return _assemble(G, chars, "catalog", names)


def _assemble(G: FiniteGroup, chars: List[List[CycNum]], source: str,
              names: Optional[List[str]] = None) -> CharacterTable:
    classes = conjugacy_classes(G)
    degrees = [as_integer(row[0], "character degree") for row in chars]
    T = CharacterTable(G, classes, chars, degrees, source, names)
    verify_table(T)
    return T


# ------------------------
# Verification
# ------------------------
def inner_product(T: CharacterTable, a: Sequence[CycNum], b: Sequence[CycNum]) -> CycNum:
    total = CycNum.rational(0, T.group.exponent)
    for c, x, y in zip(T.classes, a, b):
        total = total + (x * y.conj()).scale(c.size)
    return total / T.group.order


def verify_table(T: CharacterTable) -> None:
    """Exact orthogonality, degree and shape checks."""
    G = T.group
    k = len(T.classes)
    if len(T.chars) != k or any(len(row) != k for row in T.chars):
        raise InternalInconsistency(f"Table of {G.name} is not square over {k} classes")
    if sum(d * d for d in T.degrees) != G.order:
        raise InternalInconsistency(f"Sum of squared degrees of {G.name} is not {G.order}")
    conj = [[v.conj() for v in row] for row in T.chars]
    for i in range(k):
        for j in range(i, k):
            total = CycNum.rational(0, G.exponent)
            for t, c in enumerate(T.classes):
                total = total + (T.chars[i][t] * conj[j][t]).scale(c.size)
            if total != (G.order if i == j else 0):
                raise InternalInconsistency(f"Row orthogonality fails for characters {i}, {j} of {G.name}")
    for s in range(k):
        for t in range(s, k):
            total = CycNum.rational(0, G.exponent)
            for i in range(k):
                total = total + T.chars[i][s] * conj[i][t]
            expected = Fraction(G.order, T.classes[s].size) if s == t else 0
            if total != expected:
                raise InternalInconsistency(f"Column orthogonality fails for classes {s}, {t} of {G.name}")


def tables_agree(A: CharacterTable, B: CharacterTable) -> bool:
    """Equal up to a permutation of rows; columns share the class ordering of the group."""
    if len(A.chars) != len(B.chars):
        return False
    return Counter(tuple(row) for row in A.chars) == Counter(tuple(row) for row in B.chars)


def character_table(G: FiniteGroup, source: str = "auto") -> CharacterTable:
    if source in ("auto", "catalog"):
        T = catalog_table(G)
        if T is not None:
            return T
        if source == "catalog":
            raise UsageError(f"No catalog character table for {G.name}")
    if source not in ("auto", "dixon"):
        raise UsageError(f"Unknown character table source '{source}'")
    return _assemble(G, dixon_table(G), "dixon")


# ------------------------
# Indicators and real irreps
# ------------------------
def fs_indicator(T: CharacterTable, i: int) -> int:
    if not 0 <= i < len(T.chars):
        raise UsageError(f"Character index {i} out of range")
    row = T.chars[i]
    total = CycNum.rational(0, T.group.exponent)
    for c in T.classes:
        total = total + row[c.power_map[2]].scale(c.size)
    value = as_integer(total / T.group.order, f"Frobenius-Schur indicator of character {i}")
    if value not in FS_TYPES:
        raise InternalInconsistency(f"Frobenius-Schur indicator {value} outside {{-1, 0, 1}}")
    return value


def _ordering_key(T: CharacterTable, character: Sequence[CycNum], degree: int):
    # classes of highest element order first, larger real value first
    columns = sorted(range(len(T.classes)), key=lambda t: (-T.classes[t].element_order, t))
    trivial = all(v == 1 for v in character)
    floats = tuple(-round(character[t].evaluate().real, 9) for t in columns)
    exact = tuple(character[t].sort_key() for t in columns)
    return (not trivial, degree, floats, exact)


def real_irreps(T: CharacterTable) -> List[RealIrrep]:
    k = len(T.chars)
    used = set()
    raw = []
    for i in range(k):
        if i in used:
            continue
        fs = fs_indicator(T, i)
        row = T.chars[i]
        if fs == 1:
            character, degree, constituents = list(row), T.degrees[i], (i,)
        elif fs == -1:
            character, degree, constituents = [v * 2 for v in row], 2 * T.degrees[i], (i,)
        else:
            conj = [v.conj() for v in row]
            partner = next((j for j in range(k) if j != i and T.chars[j] == conj), None)
            if partner is None:
                raise InternalInconsistency(f"Character {i} has indicator 0 but no conjugate row")
            used.add(partner)
            character = [a + b for a, b in zip(row, conj)]
            degree, constituents = 2 * T.degrees[i], (i, partner)
        used.add(i)
        if any(v != v.conj() for v in character):
            raise InternalInconsistency(f"Real character from {constituents} is not conjugation-fixed")
        raw.append((character, degree, FS_TYPES[fs], constituents))

    raw.sort(key=lambda item: _ordering_key(T, item[0], item[1]))
    irreps, seen_names = [], Counter()
    for idx, (character, degree, fs_type, constituents) in enumerate(raw, start=1):
        if T.names:
            name = T.names[constituents[0]]
        else:
            name = "1" if idx == 1 else f"S{idx}"
        seen_names[name] += 1
        if seen_names[name] > 1:
            name = f"{name}_{seen_names[name]}"
        irreps.append(RealIrrep(idx, name, tuple(character), degree, fs_type, constituents))
    if irreps[0].name != "1" or any(v != 1 for v in irreps[0].character):
        raise InternalInconsistency("First real irrep is not the trivial representation")
    log.info(f"{T.group.name}: {len(irreps)} real irreps {[s.name for s in irreps]}")
    return irreps


def irrep_by_name(irreps: Sequence[RealIrrep], key: str) -> RealIrrep:
    for s in irreps:
        if s.name == key:
            return s
    try:
        idx = int(key)
    except ValueError:
        idx = 0
    if 1 <= idx <= len(irreps):
        return irreps[idx - 1]
    raise UsageError(f"Unknown irrep '{key}'; known: {[s.name for s in irreps]}")


# ------------------------
# JSON import/export
# ------------------------
def table_to_json(T: CharacterTable) -> Dict[str, Any]:
    G = T.group
    return {
        "group": G.name,
        "group_spec": G.spec.to_json() if G.spec else None,
        "group_hash": group_digest(G),
        "source": T.source,
        "classes": [
            {"size": c.size, "representative": G.element_names[c.representative], "order": c.element_order}
            for c in T.classes
        ],
        "chars": [[v.to_json() for v in row] for row in T.chars],
        "names": T.names,
    }


def table_from_json(data: Dict[str, Any], G: Optional[FiniteGroup] = None) -> CharacterTable:
    """Rebuild and re-verify a table; the group comes from `G` or from the embedded spec."""
    if not isinstance(data, dict) or "chars" not in data or "classes" not in data:
        raise UsageError("Character table JSON needs 'classes' and 'chars'")
    if G is None:
        if not data.get("group_spec"):
            raise UsageError("Character table JSON carries no group_spec; pass the group explicitly")
        G = build_group(parse_group_spec(data["group_spec"]))
    if data.get("group_hash") and data["group_hash"] != group_digest(G):
        raise UsageError(f"Table group_hash {data['group_hash']} does not match {G.name}")
    classes = conjugacy_classes(G)
    sizes = [int(c.get("size", -1)) for c in data["classes"]]
    if sizes != [c.size for c in classes]:
        raise UsageError(f"Class sizes {sizes} do not match {G.name}")
    chars = [[_value_from_json(v, G) for v in row] for row in data["chars"]]
    names = data.get("names")
    if names is not None and len(names) != len(chars):
        raise UsageError("names must have one entry per character")
    return _assemble(G, chars, "imported", names)


def _value_from_json(v: Any, G: FiniteGroup) -> CycNum:
    value = CycNum.from_json(v)
    if G.exponent % value.n:
        raise UsageError(f"Character value of conductor {value.n} does not divide exponent {G.exponent}")
    return value.embed(G.exponent)
