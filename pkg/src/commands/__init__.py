# src/commands/__init__.py

# --- Imports ---
import json
import logging
import os
import time
import uuid
from typing import Any, Dict, List, Optional

# Core layer
from core import cache as C
from core import config
from core import render as R
from core import strata as S
from core.characters import character_table, table_from_json, table_to_json, tables_agree
from core.context import load_context, resolve_spec
from core.errors import InternalInconsistency, StemrankError, UsageError
from core.groups import CATALOG_FAMILIES, build_group

log = logging.getLogger(__name__)

CLAIMS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "core", "fixtures", "claims")

CATALOG_HELP = {
    "Cn": "Cn(n) or Cn: cyclic of order n",
    "Dih": "Dih(n) or D2n: dihedral of order 2n",
    "Dic": "Dic(n) or Dicn: dicyclic of order 4n (Dic(2) = Q8)",
    "Klein4": "Klein4, K4 or V4",
    "Sym": "Sym(n) or Sn: symmetric group (closed-form table for n <= 4)",
}


def _ok(rid: str, t0: float, name: str, output: str, exit_code: int = 0, **extra) -> Dict[str, Any]:
    elapsed = int((time.time() - t0) * 1000)
    log.info(f"[{rid}] {name} finished in {elapsed}ms (exit {exit_code})")
    return {"ok": True, "exit_code": exit_code, "output": output, **extra}


def _fail(rid: str, t0: float, name: str, e: StemrankError) -> Dict[str, Any]:
    elapsed = int((time.time() - t0) * 1000)
    log.error(f"[{rid}] {name} failed after {elapsed}ms: {e}")
    return {"ok": False, "exit_code": e.exit_code, "error": str(e)}


def _cache_flag(no_cache: bool) -> Optional[bool]:
    return False if no_cache else None


def bundled_claims(group_name: str) -> Optional[str]:
    path = os.path.join(CLAIMS_DIR, f"{group_name}.json")
    return path if os.path.exists(path) else None


# --- Command Registration ---
def register_commands(registry: Any):

    @registry.command()
    def groups_list() -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        lines = ["Catalog families:"]
        lines += [f"  {CATALOG_HELP[f]}" for f in CATALOG_FAMILIES]
        lines.append('  products: "C2xC2", or {"product": [spec, spec]}')
        lines.append('  permutations: {"perm_generators": [[1,0,2], [1,2,0]]}')
        fixtures = sorted(f[:-5] for f in os.listdir(CLAIMS_DIR) if f.endswith(".json")) if os.path.isdir(CLAIMS_DIR) else []
        lines.append(f"Bundled claims: {', '.join(fixtures) or 'none'}")
        return _ok(rid, t0, "groups list", "\n".join(lines))

    @registry.command()
    def analyze(group: str, fmt: str = "text", no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] analyze {group} ({fmt})")
        try:
            if fmt not in R.FORMATS:
                raise UsageError(f"Unknown format '{fmt}'; use one of {R.FORMATS}")
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            analysis = S.analyze(ctx)
            return _ok(rid, t0, "analyze", R.render_analysis(ctx, analysis, fmt))
        except StemrankError as e:
            return _fail(rid, t0, "analyze", e)

    @registry.command()
    def rank(group: str, alpha: str, as_json: bool = False, no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] rank {group} at {alpha}")
        try:
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            result = S.rank_at(ctx, alpha)
            if as_json:
                payload = {"group": ctx.group.name, **result.to_json()}
                return _ok(rid, t0, "rank", R.dump_json(payload))
            return _ok(rid, t0, "rank", R.render_rank(result))
        except StemrankError as e:
            return _fail(rid, t0, "rank", e)

    @registry.command()
    def strata(group: str, fmt: str = "text", no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] strata {group}")
        try:
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            report = S.strata_report(ctx)
            return _ok(rid, t0, "strata", R.render_strata(ctx, report, fmt))
        except StemrankError as e:
            return _fail(rid, t0, "strata", e)

    @registry.command("slice")
    def slice_plane(group: str, axes: str, fix: Optional[List[str]] = None, window: str = "-10..10",
              out: str = "tsv", no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] slice {group} axes={axes} range={window} out={out}")
        try:
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            spec = R.parse_slice_spec(ctx, axes, fix, window)
            return _ok(rid, t0, "slice", R.render_slice(ctx, spec, out))
        except StemrankError as e:
            return _fail(rid, t0, "slice", e)

    @registry.command()
    def mackey_rank(group: str, alpha: str, coeff: str = "burnside", no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] mackey-rank {group} at {alpha} with {coeff}")
        try:
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            M = S.load_mackey(ctx, coeff)
            value = S.mackey_rank(ctx, alpha, M)
            return _ok(rid, t0, "mackey-rank", f"rank = {value}")
        except StemrankError as e:
            return _fail(rid, t0, "mackey-rank", e)

    @registry.command()
    def verify(group: str, claims: Optional[str] = None, fmt: str = "text", no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] verify {group}")
        try:
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            path = claims or bundled_claims(ctx.group.name)
            if not path:
                raise UsageError(f"No bundled claims for {ctx.group.name}; pass --claims file.json")
            report = S.verify_paper_tables(ctx, S.load_claims(path, ctx.names))
            if report.oracle_disagreements:
                log.error(f"[{rid}] {len(report.oracle_disagreements)} character/matrix disagreements")
            if report.claim_disagreements:
                log.warning(f"[{rid}] {len(report.claim_disagreements)} claims differ from the computed lattices")
            return _ok(rid, t0, "verify", R.render_verification(ctx, report, fmt), exit_code=report.exit_code)
        except StemrankError as e:
            return _fail(rid, t0, "verify", e)

    @registry.command()
    def profile(group: str, window: str = "-2..2", no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] profile {group} over {window}")
        try:
            ctx = load_context(group, use_cache=_cache_flag(no_cache))
            lo, hi = R.parse_range(window)
            histogram = S.rank_histogram(ctx, lo, hi)
            return _ok(rid, t0, "profile", R.render_histogram(histogram, lo, hi))
        except StemrankError as e:
            return _fail(rid, t0, "profile", e)

    @registry.command()
    def export_table(group: str) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        try:
            G = build_group(resolve_spec(group))
            return _ok(rid, t0, "export-table", R.dump_json(table_to_json(character_table(G))))
        except StemrankError as e:
            return _fail(rid, t0, "export-table", e)

    @registry.command()
    def import_table(path: str, no_cache: bool = False) -> Dict[str, Any]:
        rid, t0 = uuid.uuid4().hex[:8], time.time()
        log.info(f"[{rid}] import-table {path}")
        try:
            try:
                with open(path, "r", encoding="utf-8") as f:
                    data = json.load(f)
            except (OSError, ValueError) as e:
                raise UsageError(f"Cannot read table {path}: {e}")
            if not isinstance(data, dict) or "group_spec" not in data:
                raise UsageError("Table JSON must be an object with a group_spec")
            spec = resolve_spec(data["group_spec"])
            G = build_group(spec)
            imported = table_from_json(data, G)
            if not tables_agree(imported, character_table(G)):
                raise InternalInconsistency(f"Imported table is orthogonal but is not the character table of {G.name}")
            imported.source = "imported"
            stored = not no_cache and config.CACHE_ENABLED
            if stored:
                C.store_entry(spec, {"table": table_to_json(imported)})
            msg = (f"Imported table for {G.name}: {len(imported.chars)} characters, orthogonality verified"
                   f"{', cached' if stored else ''}")
            return _ok(rid, t0, "import-table", msg)
        except StemrankError as e:
            return _fail(rid, t0, "import-table", e)
