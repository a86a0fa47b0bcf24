# src/core/groups.py
"""Finite groups as explicit multiplication tables.

Elements are indexed 0..|G|-1 with 0 the identity. Catalog groups keep their
structural labels (used by the closed-form character tables and the matrix
models); permutation groups are labelled by the permutation tuples.
"""
from __future__ import annotations

import hashlib
import itertools
import logging
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import MAX_ORDER
from .errors import CapExceeded, InternalInconsistency, UsageError

log = logging.getLogger(__name__)

CATALOG_FAMILIES = ("Cn", "Dih", "Dic", "Klein4", "Sym")


# ------------------------
# Group specs
# ------------------------
@dataclass(frozen=True)
class GroupSpec:
    kind: str                                   # "catalog" | "perm" | "product"
    name: str = ""                              # catalog family
    param: int = 0
    generators: Tuple[Tuple[int, ...], ...] = ()
    factors: Tuple["GroupSpec", ...] = ()

    def to_json(self) -> Dict[str, Any]:
        if self.kind == "catalog":
            return {"catalog": self.catalog_name()}
        if self.kind == "perm":
            return {"perm_generators": [list(g) for g in self.generators]}
        return {"product": [f.to_json() for f in self.factors]}

    def catalog_name(self) -> str:
        return self.name if self.name == "Klein4" else f"{self.name}({self.param})"

    def display_name(self) -> str:
        if self.kind == "perm":
            return "G"
        if self.kind == "product":
            return "x".join(f.display_name() for f in self.factors)
        if self.name == "Cn":
            return f"C{self.param}"
        if self.name == "Dih":
            return f"D{2 * self.param}"
        if self.name == "Dic":
            return "Q8" if self.param == 2 else f"Dic{self.param}"
        if self.name == "Klein4":
            return "K4"
        return f"S{self.param}"

    def expected_order(self) -> Optional[int]:
        if self.kind == "perm":
            return None
        if self.kind == "product":
            total = 1
            for f in self.factors:
                o = f.expected_order()
                if o is None:
                    return None
                total *= o
            return total
        return {
            "Cn": self.param,
            "Dih": 2 * self.param,
            "Dic": 4 * self.param,
            "Klein4": 4,
            "Sym": factorial(self.param) if self.param <= 20 else MAX_ORDER + 1,
        }[self.name]


_ALIASES = [
    (re.compile(r"^Cn\((\d+)\)$"), lambda m: ("Cn", int(m.group(1)))),
    (re.compile(r"^C(\d+)$"), lambda m: ("Cn", int(m.group(1)))),
    (re.compile(r"^Dih\((\d+)\)$"), lambda m: ("Dih", int(m.group(1)))),
    (re.compile(r"^D(\d+)$"), lambda m: ("Dih", _half_dihedral(int(m.group(1))))),
    (re.compile(r"^Dic\((\d+)\)$"), lambda m: ("Dic", int(m.group(1)))),
    (re.compile(r"^Dic(\d+)$"), lambda m: ("Dic", int(m.group(1)))),
    (re.compile(r"^Q8$"), lambda m: ("Dic", 2)),
    (re.compile(r"^(Klein4|K4|V4)$"), lambda m: ("Klein4", 0)),
    (re.compile(r"^Sym\((\d+)\)$"), lambda m: ("Sym", int(m.group(1)))),
    (re.compile(r"^S(\d+)$"), lambda m: ("Sym", int(m.group(1)))),
]


def _half_dihedral(order: int) -> int:
    if order % 2:
        raise UsageError(f"Dihedral group D{order} must have even order (D2n = Dih(n))")
    return order // 2


def parse_group_spec(obj: Any) -> GroupSpec:
    """Accepts a catalog string ("Q8", "Cn(9)", "C2xC2"), or the JSON forms
    {"catalog": ...}, {"perm_generators": [...]}, {"product": [spec, spec]}."""
    if isinstance(obj, GroupSpec):
        return obj
    if isinstance(obj, str):
        text = obj.strip()
        parts = [p for p in re.split(r"x(?![^(]*\))", text) if p] if "x" in text else [text]
        if len(parts) > 1:
            return GroupSpec(kind="product", factors=tuple(parse_group_spec(p) for p in parts))
        for pattern, build in _ALIASES:
            match = pattern.match(text)
            if match:
                family, param = build(match)
                if family != "Klein4" and param < 1:
                    raise UsageError(f"Catalog parameter must be positive in '{text}'")
                return GroupSpec(kind="catalog", name=family, param=param)
        raise UsageError(f"Unknown catalog group '{text}'")
    if isinstance(obj, dict):
        if "catalog" in obj:
            return parse_group_spec(str(obj["catalog"]))
        if "perm_generators" in obj:
            gens = obj["perm_generators"]
            if not isinstance(gens, list) or not gens:
                raise UsageError("perm_generators must be a non-empty list")
            try:
                gens_t = tuple(tuple(int(x) for x in g) for g in gens)
            except (TypeError, ValueError) as e:
                raise UsageError(f"Malformed permutation generator: {e}")
            size = len(gens_t[0])
            for g in gens_t:
                if len(g) != size or sorted(g) != list(range(size)):
                    raise UsageError(f"Generator {list(g)} is not a permutation of 0..{size - 1}")
            return GroupSpec(kind="perm", generators=gens_t)
        if "product" in obj:
            factors = obj["product"]
            if not isinstance(factors, list) or len(factors) < 2:
                raise UsageError("product needs a list of at least two specs")
            return GroupSpec(kind="product", factors=tuple(parse_group_spec(f) for f in factors))
    raise UsageError(f"Cannot parse group spec {obj!r}")


# ------------------------
# Finite groups
# ------------------------
@dataclass(eq=False)
class FiniteGroup:
    name: str
    labels: List[Any]
    table: List[List[int]]
    inverse: List[int]
    orders: List[int]
    exponent: int
    element_names: List[str]
    spec: Optional[GroupSpec] = None
    index_of: Dict[Any, int] = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inverse[x], -k
        result = 0
        for _ in range(k % self.orders[x]):
            result = self.table[result][x]
        return result

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.table[self.table[g][x]][self.inverse[g]]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def group_from_labels(
    name: str,
    labels: Sequence[Any],
    mult: Callable[[Any, Any], Any],
    namer: Callable[[Any], str],
    spec: Optional[GroupSpec] = None,
    identity: Any = None,
) -> FiniteGroup:
    """Index a finite set of labels closed under `mult`; identity gets index 0."""
    ordered = sorted(labels)
    if identity is not None and ordered[0] != identity:
        ordered.remove(identity)
        ordered.insert(0, identity)
    n = len(ordered)
    if n > MAX_ORDER:
        raise CapExceeded(f"Group order {n} exceeds STEMRANK_MAX_ORDER={MAX_ORDER}")
    index_of = {lab: i for i, lab in enumerate(ordered)}
    try:
        table = [[index_of[mult(a, b)] for b in ordered] for a in ordered]
    except KeyError as e:
        raise InternalInconsistency(f"Label set of {name} is not closed under multiplication: {e}")

    for i in range(n):
        if table[0][i] != i or table[i][0] != i:
            raise InternalInconsistency(f"Element 0 of {name} is not the identity")
    inverse = []
    for i in range(n):
        row = table[i]
        try:
            j = row.index(0)
        except ValueError:
            raise InternalInconsistency(f"Element {i} of {name} has no inverse")
        if table[j][i] != 0:
            raise InternalInconsistency(f"Element {i} of {name} has no two-sided inverse")
        inverse.append(j)
    rng = random.Random(0)
    for _ in range(min(256, n ** 3)):
        a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise InternalInconsistency(f"Multiplication of {name} is not associative at {(a, b, c)}")

    orders = []
    for i in range(n):
        k, x = 1, i
        while x != 0:
            x = table[x][i]
            k += 1
        orders.append(k)
    exponent = 1
    for o in set(orders):
        exponent = _lcm(exponent, o)
    return FiniteGroup(
        name=name,
        labels=list(ordered),
        table=table,
        inverse=inverse,
        orders=orders,
        exponent=exponent,
        element_names=[namer(lab) for lab in ordered],
        spec=spec,
        index_of=index_of,
    )


# --- catalog families: (labels, mult, namer, identity) ---

def _power_name(base: str, k: int) -> str:
    if k == 0:
        return ""
    return base if k == 1 else f"{base}^{k}"


def _family(spec: GroupSpec):
    n = spec.param
    if spec.name == "Cn":
        return (list(range(n)), lambda a, b: (a + b) % n,
                lambda a: _power_name("g", a) or "e", 0)
    if spec.name == "Dih":
        def mult(a, b):
            (k1, s1), (k2, s2) = a, b
            return ((k1 + (k2 if s1 == 0 else -k2)) % n, s1 ^ s2)

        def namer(a):
            text = _power_name("r", a[0]) + ("s" if a[1] else "")
            return text or "e"
        labels = [(k, s) for k in range(n) for s in (0, 1)]
        return labels, mult, namer, (0, 0)
    if spec.name == "Dic":
        m = 2 * n

        def mult(a, b):
            (k1, s1), (k2, s2) = a, b
            if s1 == 0:
                return ((k1 + k2) % m, s2)
            k = k1 - k2
            return ((k + n) % m, 0) if s2 else (k % m, 1)

        # i = b, j = a, k = ij = a^3 b
        quaternion_names = {(0, 0): "e", (2, 0): "-1", (0, 1): "i", (2, 1): "-i",
                            (1, 0): "j", (3, 0): "-j", (3, 1): "k", (1, 1): "-k"}

        def namer(a):
            if n == 2:
                return quaternion_names[a]
            text = _power_name("a", a[0]) + ("b" if a[1] else "")
            return text or "e"
        labels = [(k, s) for k in range(m) for s in (0, 1)]
        return labels, mult, namer, (0, 0)
    if spec.name == "Klein4":
        names = {(0, 0): "e", (0, 1): "i", (1, 0): "j", (1, 1): "k"}
        labels = list(names)
        return labels, lambda a, b: (a[0] ^ b[0], a[1] ^ b[1]), names.__getitem__, (0, 0)
    if spec.name == "Sym":
        labels = list(itertools.permutations(range(n)))
        return labels, _compose, _cycle_name, tuple(range(n))
    raise UsageError(f"Unknown catalog family '{spec.name}'")


def _compose(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
    """(p q)(x) = p(q(x))"""
    return tuple(p[x] for x in q)


def _cycle_name(p: Tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            seen.add(start)
            continue
        cycle, x = [], start
        while x not in seen:
            seen.add(x)
            cycle.append(str(x))
            x = p[x]
        cycles.append("(" + " ".join(cycle) + ")")
    return "".join(cycles) or "e"


def _spec_family(spec: GroupSpec):
    """(labels, mult, namer, identity) for any spec, recursively for products."""
    if spec.kind == "catalog":
        return _family(spec)
    if spec.kind == "product":
        parts = [_spec_family(f) for f in spec.factors]
        labels = [tuple(t) for t in itertools.product(*(p[0] for p in parts))]

        def mult(a, b):
            return tuple(p[1](x, y) for p, x, y in zip(parts, a, b))

        def namer(a):
            return "(" + ",".join(p[2](x) for p, x in zip(parts, a)) + ")"
        identity = tuple(p[3] for p in parts)
        return labels, mult, namer, identity
    # permutation generators: closure by breadth-first search
    size = len(spec.generators[0])
    identity = tuple(range(size))
    seen = {identity}
    queue = [identity]
    while queue:
        x = queue.pop()
        for g in spec.generators:
            y = _compose(g, x)
            if y not in seen:
                seen.add(y)
                if len(seen) > MAX_ORDER:
                    raise CapExceeded(f"Permutation group exceeds STEMRANK_MAX_ORDER={MAX_ORDER}")
                queue.append(y)
    return sorted(seen), _compose, _cycle_name, identity


def build_group(spec: Any) -> FiniteGroup:
    spec = parse_group_spec(spec)
    expected = spec.expected_order()
    if expected is not None and expected > MAX_ORDER:
        raise CapExceeded(f"{spec.display_name()} has order {expected} > STEMRANK_MAX_ORDER={MAX_ORDER}")
    labels, mult, namer, identity = _spec_family(spec)
    G = group_from_labels(spec.display_name(), labels, mult, namer, spec=spec, identity=identity)
    log.info(f"Built {G.name}: order {G.order}, exponent {G.exponent}")
    return G


def group_digest(G: FiniteGroup) -> str:
    table = np.array(G.table, dtype=np.int32)
    h = hashlib.sha256(G.name.encode("utf-8"))
    h.update(table.tobytes())
    return h.hexdigest()[:16]


# ------------------------
# Conjugacy classes of elements
# ------------------------
@dataclass(frozen=True)
class ElementClass:
    index: int
    representative: int
    members: Tuple[int, ...]
    element_order: int
    power_map: Tuple[int, ...]      # power_map[k] = class of rep^k, 0 <= k <= exponent

    @property
    def size(self) -> int:
        return len(self.members)


@lru_cache(maxsize=64)
def conjugacy_classes(G: FiniteGroup) -> Tuple[ElementClass, ...]:
    n = G.order
    owner = [-1] * n
    orbits: List[List[int]] = []
    for x in sorted(range(n), key=lambda i: (G.orders[i], i)):
        if owner[x] >= 0:
            continue
        orbit = sorted({G.conjugate(g, x) for g in range(n)})
        for y in orbit:
            owner[y] = len(orbits)
        orbits.append(orbit)
    classes = []
    for idx, orbit in enumerate(orbits):
        rep = orbit[0]
        pmap, x = [], 0
        for _ in range(G.exponent + 1):
            pmap.append(owner[x])
            x = G.table[x][rep]
        classes.append(ElementClass(idx, rep, tuple(orbit), G.orders[rep], tuple(pmap)))
    if sum(c.size for c in classes) != n:
        raise InternalInconsistency(f"Conjugacy classes of {G.name} do not partition the group")
    return tuple(classes)


@lru_cache(maxsize=64)
def class_of(G: FiniteGroup) -> Tuple[int, ...]:
    owner = [0] * G.order
    for c in conjugacy_classes(G):
        for x in c.members:
            owner[x] = c.index
    return tuple(owner)


# ------------------------
# Subgroups
# ------------------------
def generated_subgroup(G: FiniteGroup, gens: Sequence[int]) -> Tuple[int, ...]:
    elements = {0}
    queue = [0]
    while queue:
        x = queue.pop()
        for s in gens:
            y = G.table[x][s]
            if y not in elements:
                elements.add(y)
                queue.append(y)
    return tuple(sorted(elements))


def generating_sequence(G: FiniteGroup) -> List[int]:
    """Greedy irredundant generators: scan elements in index order."""
    gens: List[int] = []
    current = {0}
    for x in range(G.order):
        if len(current) == G.order:
            break
        if x not in current:
            gens.append(x)
            current = set(generated_subgroup(G, gens))
    return gens


@dataclass(frozen=True)
class SubgroupClass:
    id: int
    label: str
    representative: Tuple[int, ...]
    conjugates: Tuple[Tuple[int, ...], ...]
    normalizer: Tuple[int, ...]
    cyclic: bool

    @property
    def order(self) -> int:
        return len(self.representative)


def _conjugate_set(G: FiniteGroup, g: int, subset: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sorted(G.conjugate(g, h) for h in subset))


@lru_cache(maxsize=32)
def subgroup_classes(G: FiniteGroup) -> Tuple[SubgroupClass, ...]:
    if G.order > MAX_ORDER:
        raise CapExceeded(f"Subgroup enumeration refused: order {G.order} > {MAX_ORDER}")
    cyclic: Dict[Tuple[int, ...], int] = {}
    for x in range(G.order):
        cyclic.setdefault(generated_subgroup(G, [x]), x)
    known: Dict[Tuple[int, ...], List[int]] = {sub: [x] for sub, x in cyclic.items()}
    cyclic_gens = sorted(cyclic.values())
    frontier = sorted(known, key=lambda s: (len(s), s))
    while frontier:
        fresh = []
        for sub in frontier:
            members = set(sub)
            for c in cyclic_gens:
                if c in members:
                    continue
                gens = known[sub] + [c]
                joined = generated_subgroup(G, gens)
                if joined not in known:
                    known[joined] = gens
                    fresh.append(joined)
        frontier = sorted(fresh, key=lambda s: (len(s), s))
    log.info(f"{G.name}: {len(known)} subgroups found")

    assigned = set()
    raw = []
    for sub in sorted(known, key=lambda s: (len(s), s)):
        if sub in assigned:
            continue
        conjugates = sorted({_conjugate_set(G, g, sub) for g in range(G.order)})
        assigned.update(conjugates)
        normalizer = tuple(g for g in range(G.order) if _conjugate_set(G, g, sub) == sub)
        if len(conjugates) * len(normalizer) != G.order:
            raise InternalInconsistency(f"Orbit-stabilizer fails for subgroup {sub} of {G.name}")
        is_cyclic = any(G.orders[h] == len(sub) for h in sub)
        raw.append((sub, tuple(conjugates), normalizer, is_cyclic))
    labels = _subgroup_labels(G, raw)
    return tuple(
        SubgroupClass(i, labels[i], sub, conj, norm, cyc)
        for i, (sub, conj, norm, cyc) in enumerate(raw)
    )


def _subgroup_labels(G: FiniteGroup, raw) -> List[str]:
    base = []
    for sub, _, _, is_cyclic in raw:
        if len(sub) == 1:
            base.append("e")
        elif len(sub) == G.order:
            base.append(G.name)
        else:
            base.append(f"{'C' if is_cyclic else 'H'}{len(sub)}")
    labels = list(base)
    for name in set(base):
        idxs = [i for i, b in enumerate(base) if b == name]
        if len(idxs) < 2:
            continue
        if all(raw[i][3] for i in idxs):
            for i in idxs:
                sub = raw[i][0]
                gen = min((h for h in sub if G.orders[h] == len(sub)),
                          key=lambda h: (len(G.element_names[h]), h))
                labels[i] = f"<{G.element_names[gen]}>"
        if len(set(labels[i] for i in idxs)) < len(idxs):
            for pos, i in enumerate(idxs):
                labels[i] = f"{name}{chr(ord('a') + pos % 26)}{pos // 26 or ''}"
    return labels


def find_subgroup_class(classes: Sequence[SubgroupClass], key: Any) -> SubgroupClass:
    """Look a class up by label or by numeric id."""
    for c in classes:
        if c.label == str(key):
            return c
    try:
        idx = int(key)
    except (TypeError, ValueError):
        idx = -1
    if 0 <= idx < len(classes):
        return classes[idx]
    raise UsageError(f"Unknown subgroup class '{key}'; known: {[c.label for c in classes]}")


# ------------------------
# Weyl groups
# ------------------------
@dataclass(eq=False)
class WeylGroup:
    group: FiniteGroup
    projection: Dict[int, int]
    section: List[int]
    subgroup: SubgroupClass


def weyl_group(G: FiniteGroup, K: SubgroupClass) -> WeylGroup:
    H = K.representative
    coset_rep: Dict[int, int] = {}
    for n in K.normalizer:
        coset = [G.table[n][h] for h in H]
        coset_rep[n] = min(coset)
    section = sorted(set(coset_rep.values()))
    position = {rep: i for i, rep in enumerate(section)}
    projection = {n: position[r] for n, r in coset_rep.items()}

    W = group_from_labels(
        f"W({K.label})",
        list(range(len(section))),
        lambda a, b: projection[G.table[section[a]][section[b]]],
        lambda a: f"[{G.element_names[section[a]]}]",
        identity=0,
    )
    if W.order * K.order != len(K.normalizer):
        raise InternalInconsistency(f"|W| * |H| != |N(H)| for {K.label} in {G.name}")
    kernel = {n for n, w in projection.items() if w == 0}
    if kernel != set(H):
        raise InternalInconsistency(f"Weyl projection kernel differs from {K.label}")
    N = K.normalizer
    rng = random.Random(1)
    pairs = itertools.product(N, N) if len(N) <= 128 else (
        (rng.choice(N), rng.choice(N)) for _ in range(4096))
    for a, b in pairs:
        if projection[G.table[a][b]] != W.table[projection[a]][projection[b]]:
            raise InternalInconsistency(f"Weyl projection for {K.label} is not a homomorphism")
    return WeylGroup(group=W, projection=projection, section=section, subgroup=K)
