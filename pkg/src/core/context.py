# src/core/context.py
"""Per-group bundle shared by every command: group, character table, real
irreps, subgroup classes, and the lazily built analysis and oracle."""
from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import cache
from . import config
from .characters import CharacterTable, RealIrrep, character_table, real_irreps, table_from_json, table_to_json
from .errors import InternalInconsistency, StemrankError, UsageError
from .groups import FiniteGroup, GroupSpec, SubgroupClass, build_group, find_subgroup_class, parse_group_spec, subgroup_classes
from .models import MatrixOracle
from .orient import VirtualRep

log = logging.getLogger(__name__)


@dataclass(eq=False)
class GroupContext:
    spec: GroupSpec
    group: FiniteGroup
    table: CharacterTable
    irreps: List[RealIrrep]
    subgroups: Tuple[SubgroupClass, ...]
    use_cache: bool = False
    cached: Dict[str, Any] = field(default_factory=dict, repr=False)
    analysis: Optional[list] = field(default=None, repr=False)
    _oracle: Optional[MatrixOracle] = field(default=None, repr=False)

    @property
    def r(self) -> int:
        return len(self.irreps)

    @property
    def names(self) -> List[str]:
        return [s.name for s in self.irreps]

    def oracle(self) -> MatrixOracle:
        if self._oracle is None:
            self._oracle = MatrixOracle(self.group, self.irreps)
        return self._oracle

    def subgroup(self, key: Any) -> SubgroupClass:
        return find_subgroup_class(self.subgroups, key)

    def alpha(self, value: Any) -> VirtualRep:
        return VirtualRep(parse_alpha(value, self.names))

    def format_vector(self, coeffs: Sequence[int]) -> str:
        return format_vector(coeffs, self.names)


# ------------------------
# Virtual representation syntax
# ------------------------
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*'*)|(\S))")


def _tokens(text: str) -> List[Tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, name, sym = m.groups()
        if num is not None:
            out.append(("int", num))
        elif name is not None:
            out.append(("name", name))
        elif sym is not None:
            out.append(("sym", sym))
        pos = m.end()
    return out


class _ExpressionParser:
    """Linear combinations like `2(1 - sigma_i) + h - 4sigma_j`; a bare integer is a multiple of 1."""

    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.tokens = _tokens(text)
        self.pos = 0
        self.index = {name: i for i, name in enumerate(names)}
        self.r = len(names)

    def _peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self) -> Tuple[str, str]:
        tok = self._peek()
        if tok is None:
            raise UsageError(f"Unexpected end of expression '{self.text}'")
        self.pos += 1
        return tok

    def parse(self) -> List[int]:
        vec = self._expr()
        if self._peek() is not None:
            raise UsageError(f"Unexpected '{self._peek()[1]}' in '{self.text}'")
        return vec

    def _expr(self) -> List[int]:
        total = [0] * self.r
        sign = 1
        tok = self._peek()
        if tok and tok == ("sym", "-"):
            sign = -1
            self._take()
        elif tok and tok == ("sym", "+"):
            self._take()
        while True:
            term = self._term()
            total = [a + sign * b for a, b in zip(total, term)]
            tok = self._peek()
            if tok in (("sym", "+"), ("sym", "-")):
                sign = 1 if tok[1] == "+" else -1
                self._take()
                continue
            return total

    def _term(self) -> List[int]:
        coeff = 1
        kind, value = self._take()
        if kind == "int":
            coeff = int(value)
            nxt = self._peek()
            if nxt == ("sym", "*"):
                self._take()
                nxt = self._peek()
            if nxt is None or nxt[0] == "int" or nxt in (("sym", "+"), ("sym", "-"), ("sym", ")")):
                return self._unit("1", coeff)
            kind, value = self._take()
        if kind == "name":
            return self._unit(value, coeff)
        if (kind, value) == ("sym", "("):
            inner = self._expr()
            if self._take() != ("sym", ")"):
                raise UsageError(f"Missing ')' in '{self.text}'")
            return [coeff * v for v in inner]
        raise UsageError(f"Unexpected '{value}' in '{self.text}'")

    def _unit(self, name: str, coeff: int) -> List[int]:
        if name not in self.index:
            raise UsageError(f"Unknown irrep '{name}' in '{self.text}'; known: {list(self.index)}")
        vec = [0] * self.r
        vec[self.index[name]] = coeff
        return vec


def parse_expression(text: str, names: Sequence[str]) -> Tuple[int, ...]:
    return tuple(_ExpressionParser(text, names).parse())


def parse_alpha(value: Any, names: Sequence[str]) -> Tuple[int, ...]:
    """Positional `a1,a2,...`, named `sigma=1,phi_1=-2`, an expression, a list, or a name->coeff dict."""
    r = len(names)
    if isinstance(value, dict):
        coeffs = [0] * r
        for name, c in value.items():
            if name not in names:
                raise UsageError(f"Unknown irrep '{name}'; known: {list(names)}")
            coeffs[list(names).index(name)] += int(c)
        return tuple(coeffs)
    if isinstance(value, (list, tuple)):
        if len(value) != r:
            raise UsageError(f"Expected {r} coordinates ({', '.join(names)}), got {len(value)}")
        return tuple(int(v) for v in value)
    text = str(value).strip()
    if "=" in text:
        coeffs = [0] * r
        for part in text.split(","):
            if not part.strip():
                continue
            name, _, c = part.partition("=")
            name = name.strip()
            if name not in names:
                raise UsageError(f"Unknown irrep '{name}'; known: {list(names)}")
            try:
                coeffs[list(names).index(name)] += int(c)
            except ValueError:
                raise UsageError(f"Coefficient '{c}' for {name} is not an integer")
        return tuple(coeffs)
    if re.fullmatch(r"\s*-?\d+(\s*,\s*-?\d+)*\s*", text) and ("," in text or r == 1):
        coords = [int(v) for v in text.split(",")]
        if len(coords) != r:
            raise UsageError(f"Expected {r} coordinates ({', '.join(names)}), got {len(coords)}")
        return tuple(coords)
    return parse_expression(text, names)


def format_vector(coeffs: Sequence[int], names: Sequence[str]) -> str:
    terms = []
    for c, name in zip(coeffs, names):
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if name == "1":
            body = str(mag)
        else:
            body = name if mag == 1 else f"{mag}{name}"
        terms.append((sign, body))
    if not terms:
        return "0"
    text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


# ------------------------
# Loading
# ------------------------
def resolve_spec(arg: Any) -> GroupSpec:
    """A catalog string, a JSON string, or a path to a JSON spec file."""
    if isinstance(arg, (GroupSpec, dict)):
        return parse_group_spec(arg)
    text = str(arg).strip()
    if text.endswith(".json") or os.path.sep in text:
        if not os.path.exists(text):
            raise UsageError(f"Group spec file '{text}' not found")
        try:
            with open(text, "r", encoding="utf-8") as f:
                return parse_group_spec(json.load(f))
        except ValueError as e:
            raise UsageError(f"Group spec file '{text}' is not valid JSON: {e}")
    if text.startswith("{"):
        try:
            return parse_group_spec(json.loads(text))
        except ValueError as e:
            raise UsageError(f"Group spec is not valid JSON: {e}")
    return parse_group_spec(text)


def load_context(spec_arg: Any, use_cache: Optional[bool] = None, table_source: str = "auto") -> GroupContext:
    spec = resolve_spec(spec_arg)
    use_cache = config.CACHE_ENABLED if use_cache is None else use_cache
    G = build_group(spec)
    entry = cache.load_entry(spec) if use_cache and table_source == "auto" else None
    table = None
    if entry and entry.get("table"):
        try:
            table = table_from_json(entry["table"], G)
            table.source = entry["table"].get("source", table.source)
        except StemrankError as e:
            log.warning(f"Cached table for {G.name} failed re-validation, recomputing: {e}")
            entry = None
    if table is None:
        table = character_table(G, table_source)
        if use_cache and table_source == "auto":
            cache.store_entry(spec, {"table": table_to_json(table)})
    irreps = real_irreps(table)
    subgroups = subgroup_classes(G)
    if subgroups[0].order != 1 or subgroups[-1].order != G.order:
        raise InternalInconsistency("Subgroup classes must start at e and end at G")
    return GroupContext(spec, G, table, irreps, subgroups, use_cache=use_cache, cached=entry or {})
