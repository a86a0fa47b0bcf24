# src/core/render.py
"""Emitters: analysis as text/JSON/TeX, strata, rank histograms,
verification reports and 2-D slices as TSV or SVG."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .context import GroupContext, format_vector
from .errors import UsageError
from .lattice import Lattice
from .strata import (
    RankResult,
    StratumReport,
    SubgroupAnalysis,
    VerificationReport,
    analysis_to_json,
    box_points,
    witness_matrix,
)

FORMATS = ("text", "json", "tex")


def _span(L: Lattice, names: Sequence[str]) -> str:
    if not L.rank:
        return "{0}"
    return "Z{" + ", ".join(format_vector(row, names) for row in L.basis) + "}"


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


# ------------------------
# analyze
# ------------------------
def render_analysis(ctx: GroupContext, analysis: Sequence[SubgroupAnalysis], fmt: str = "text") -> str:
    if fmt == "json":
        return dump_json(analysis_to_json(ctx, analysis))
    if fmt == "tex":
        return _analysis_tex(ctx, analysis)
    if fmt != "text":
        raise UsageError(f"Unknown format '{fmt}'; use one of {FORMATS}")
    names = ctx.names
    lines = [
        f"Group {ctx.group.name} (order {ctx.group.order}), {ctx.r} real irreps, "
        f"{len(analysis)} subgroup classes, table source {ctx.table.source}",
        "Irreps:",
    ]
    for S in ctx.irreps:
        lines.append(f"  S{S.index:<3} {S.name:<12} dim {S.degree:<3} {S.fs_type}")
    lines.append("Subgroup classes:")
    for a in analysis:
        od = a.orientation
        lines.append(
            f"  [{a.class_id}] {a.label:<8} |H|={a.subgroup.order:<4} |W|={od.weyl.group.order:<4} "
            f"d=({','.join(str(v) for v in a.dimension.d)})  e2={od.e2_rank}/{od.e2_quotient_rank}  "
            f"[N:N+]={a.plus_index}"
        )
        lines.append(f"      N  = {_span(a.N, names)}")
        lines.append(f"      N+ = {_span(a.N_plus, names)}")
    return "\n".join(lines)


def _tex_name(name: str) -> str:
    if name == "1":
        return "1"
    base, _, sub = name.partition("_")
    greek = {"sigma": r"\sigma", "phi": r"\phi", "tau": r"\tau", "rho": r"\rho", "omega": r"\omega"}
    head = greek.get(base, rf"\mathrm{{{base}}}")
    return f"{head}_{{{sub}}}" if sub else head


def _tex_span(L: Lattice, names: Sequence[str]) -> str:
    if not L.rank:
        return r"\{0\}"
    tex_names = [_tex_name(n) for n in names]
    return r"\mathbb{Z}\{" + ", ".join(format_vector(row, tex_names) for row in L.basis) + r"\}"


def _analysis_tex(ctx: GroupContext, analysis: Sequence[SubgroupAnalysis]) -> str:
    lines = [
        r"\begin{tabular}{llll}",
        r"$(H)$ & $|W_G(H)|$ & $N_H^+$ & $[N_H : N_H^+]$ \\",
        r"\hline",
    ]
    for a in analysis:
        lines.append(
            f"${a.label}$ & {a.orientation.weyl.group.order} & ${_tex_span(a.N_plus, ctx.names)}$ & {a.plus_index} \\\\"
        )
    lines.append(r"\end{tabular}")
    return "\n".join(lines)


# ------------------------
# rank / profile / strata / verify
# ------------------------
def render_rank(result: RankResult) -> str:
    if result.rank:
        head = f"r = {result.rank}; witnesses: [{', '.join(result.labels)}]"
    else:
        head = "r = 0"
    return f"{head}\nfinite: {'yes' if result.finite else 'no'}"


def render_histogram(histogram: Dict[int, int], lo: int, hi: int) -> str:
    lines = [f"# box [{lo}, {hi}]", "rank\tcount"]
    lines += [f"{rank}\t{count}" for rank, count in sorted(histogram.items())]
    return "\n".join(lines)


def render_strata(ctx: GroupContext, report: StratumReport, fmt: str = "text") -> str:
    if fmt == "json":
        return dump_json(report.to_json())
    labels = {a.class_id: a.label for a in report.analysis}
    lines = [f"Strata of {report.group}: {len(report.strata)}"]
    for s in report.strata:
        lines.append(
            f"  rank {s.generic_rank}  {_span(s.lattice, ctx.names)}  "
            f"[{', '.join(labels[c] for c in s.classes)}]"
        )
    return "\n".join(lines)


def render_verification(ctx: GroupContext, report: VerificationReport, fmt: str = "text") -> str:
    if fmt == "json":
        return dump_json(report.to_json())
    lines = []
    for res in report.results:
        if res.confirmed:
            lines.append(f"[ok]   {res.claim.label}")
            continue
        extra = f" (index {res.index})" if res.index else ""
        lines.append(f"[DIFF] {res.claim.label}: {res.status}{extra}")
        lines.append(f"         claimed  {_span(res.claimed, ctx.names)}")
        lines.append(f"         computed {_span(res.computed, ctx.names)}")
        for g in res.generators:
            if not g.computed:
                lines.append(f"         {g.text} is not in the computed lattice (matrices: {g.oracle})")
    for msg in report.oracle_disagreements:
        lines.append(f"[ORACLE] {msg}")
    lines.append(
        f"claims: {len(report.results)}, confirmed: {len(report.results) - len(report.claim_disagreements)}, "
        f"disagreements with printed lists: {len(report.claim_disagreements)}, "
        f"oracle checks: {report.oracle_checks} (no model: {report.oracle_missing}), "
        f"oracle disagreements: {len(report.oracle_disagreements)}"
    )
    return "\n".join(lines)


# ------------------------
# Slices
# ------------------------
@dataclass(frozen=True)
class SliceSpec:
    axis_i: int                               # 0-based irrep positions
    axis_j: int
    fixed: Tuple[Tuple[int, int], ...] = ()
    lo: int = -10
    hi: int = 10


def _axis(ctx: GroupContext, token: str) -> int:
    token = token.strip()
    if token in ctx.names:
        return ctx.names.index(token)
    try:
        idx = int(token)
    except ValueError:
        raise UsageError(f"Unknown axis '{token}'; use a 1-based index or one of {ctx.names}")
    if not 1 <= idx <= ctx.r:
        raise UsageError(f"Axis {idx} out of range 1..{ctx.r}")
    return idx - 1


def parse_range(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError(text)
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"Range must look like lo..hi, got '{text}'")


def parse_slice_spec(ctx: GroupContext, axes: str, fixes: Optional[Sequence[str]] = None,
                     window: str = "-10..10") -> SliceSpec:
    parts = axes.split(",")
    if len(parts) != 2:
        raise UsageError(f"--axes needs two axes, got '{axes}'")
    i, j = (_axis(ctx, p) for p in parts)
    if i == j:
        raise UsageError("Slice axes must differ")
    fixed = {}
    for item in fixes or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--fix expects k=v, got '{item}'")
        k = _axis(ctx, key)
        if k in (i, j):
            raise UsageError(f"Cannot fix slice axis {ctx.names[k]}")
        try:
            fixed[k] = int(value)
        except ValueError:
            raise UsageError(f"--fix value for {key} is not an integer: '{value}'")
    lo, hi = parse_range(window)
    return SliceSpec(i, j, tuple(sorted(fixed.items())), lo, hi)


def slice_rows(ctx: GroupContext, spec: SliceSpec) -> List[Tuple[int, int, int, Tuple[int, ...]]]:
    """(a_i, a_j, rank, witness ids) over the square, a_i outer, a_j inner."""
    if spec.hi < spec.lo:
        return []
    grid = box_points(2, spec.lo, spec.hi)
    points = np.zeros((len(grid), ctx.r), dtype=np.int64)
    for k, v in spec.fixed:
        points[:, k] = v
    points[:, spec.axis_i] = grid[:, 0]
    points[:, spec.axis_j] = grid[:, 1]
    hits = witness_matrix(ctx, points)
    rows = []
    for (x, y), row in zip(grid.tolist(), hits):
        ids = tuple(int(c) for c in np.flatnonzero(row))
        rows.append((x, y, len(ids), ids))
    return rows


def render_tsv(rows: Sequence[Tuple[int, int, int, Tuple[int, ...]]]) -> str:
    lines = ["i\tj\trank\twitnesses"]
    for x, y, rank, ids in rows:
        lines.append(f"{x}\t{y}\t{rank}\t{';'.join(str(c) for c in ids)}")
    return "\n".join(lines) + "\n"


_PALETTE = ("#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")
_CELL = 16
_MARGIN = 48


def render_svg(ctx: GroupContext, spec: SliceSpec,
               rows: Sequence[Tuple[int, int, int, Tuple[int, ...]]]) -> str:
    n = max(spec.hi - spec.lo + 1, 0)
    side = 2 * _MARGIN + max(n - 1, 0) * _CELL
    legend_keys = sorted({ids for _, _, rank, ids in rows if rank}, key=lambda ids: (len(ids), ids))
    colors = {ids: _PALETTE[k % len(_PALETTE)] for k, ids in enumerate(legend_keys)}
    labels = {K.id: K.label for K in ctx.subgroups}
    height = side + 18 * len(legend_keys) + 8

    def px(v: int) -> int:
        return _MARGIN + (v - spec.lo) * _CELL

    def py(v: int) -> int:
        return side - _MARGIN - (v - spec.lo) * _CELL

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{height}" '
        f'viewBox="0 0 {side} {height}" font-family="sans-serif" font-size="11">',
        f'<title>{ctx.group.name}: nonzero rank in the ({ctx.names[spec.axis_i]}, {ctx.names[spec.axis_j]}) plane</title>',
    ]
    if n:
        if spec.lo <= 0 <= spec.hi:
            out.append(f'<line x1="{px(spec.lo)}" y1="{py(0)}" x2="{px(spec.hi)}" y2="{py(0)}" stroke="#999"/>')
            out.append(f'<line x1="{px(0)}" y1="{py(spec.lo)}" x2="{px(0)}" y2="{py(spec.hi)}" stroke="#999"/>')
        out.append(f'<text x="{side - _MARGIN + 6}" y="{side - _MARGIN // 2}">{ctx.names[spec.axis_i]}</text>')
        out.append(f'<text x="{_MARGIN // 2}" y="{_MARGIN - 8}">{ctx.names[spec.axis_j]}</text>')
        for x, y, rank, ids in rows:
            if not rank:
                continue
            out.append(
                f'<circle cx="{px(x)}" cy="{py(y)}" r="{3 + rank}" fill="{colors[ids]}">'
                f'<title>({x}, {y}) rank {rank}</title></circle>'
            )
    for k, ids in enumerate(legend_keys):
        y = side + 14 + 18 * k
        out.append(f'<circle cx="{_MARGIN}" cy="{y - 4}" r="5" fill="{colors[ids]}"/>')
        out.append(f'<text x="{_MARGIN + 12}" y="{y}">{", ".join(labels[c] for c in ids)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_slice(ctx: GroupContext, spec: SliceSpec, out: str = "tsv") -> str:
    rows = slice_rows(ctx, spec)
    if out == "tsv":
        return render_tsv(rows)
    if out == "svg":
        return render_svg(ctx, spec, rows)
    raise UsageError(f"Unknown slice output '{out}'; use tsv or svg")
