# tests/test_render.py
import sys
import os
import json
import pytest

# Add 'src' to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from core import render as R
from core.context import format_vector, load_context, parse_alpha
from core.errors import UsageError
from core.strata import analyze, rank_at, strata_report


@pytest.fixture(scope="module")
def c2():
    return load_context("C2", use_cache=False)


@pytest.fixture(scope="module")
def c3():
    return load_context("C3", use_cache=False)


def _nonzero(tsv):
    lines = tsv.splitlines()
    assert lines[0] == "i\tj\trank\twitnesses"
    out = set()
    for line in lines[1:]:
        x, y, rank, _ = line.split("\t")
        if int(rank):
            out.add((int(x), int(y)))
    return out, len(lines) - 1


# --- Slices ---
def test_c2_slice(c2):
    """Tests the nonzero points of the C2 plane: the sigma axis and the line (2m, -2m)."""
    spec = R.parse_slice_spec(c2, "1,sigma", None, "-10..10")
    points, count = _nonzero(R.render_slice(c2, spec, "tsv"))
    expected = {(0, k) for k in range(-10, 11)} | {(2 * m, -2 * m) for m in range(-5, 6)}
    assert points == expected
    assert count == 21 * 21


def test_c3_slice(c3):
    """Tests the nonzero points of the C3 plane: the phi axis and the line (2m, -m)."""
    spec = R.parse_slice_spec(c3, "1,2", [], "-10..10")
    points, _ = _nonzero(R.render_slice(c3, spec, "tsv"))
    expected = {(0, k) for k in range(-10, 11)} | {(2 * m, -m) for m in range(-5, 6)}
    assert points == expected


def test_slice_rows_order_and_witnesses(c2):
    """Tests that the first axis is outer and that witnesses are class ids."""
    rows = R.slice_rows(c2, R.SliceSpec(0, 1, (), -1, 1))
    assert [(x, y) for x, y, _, _ in rows][:4] == [(-1, -1), (-1, 0), (-1, 1), (0, -1)]
    by_point = {(x, y): ids for x, y, _, ids in rows}
    assert by_point[(0, 0)] == (0, 1)
    assert by_point[(0, 1)] == (1,)
    assert by_point[(1, -1)] == ()
    tsv = R.render_tsv(rows)
    assert "0\t0\t2\t0;1\n" in tsv
    assert tsv.endswith("\n")


def test_empty_range_gives_header_only(c2):
    """Tests an empty box."""
    spec = R.parse_slice_spec(c2, "1,sigma", None, "3..2")
    assert R.render_slice(c2, spec, "tsv") == "i\tj\trank\twitnesses\n"


def test_svg_is_deterministic(c2):
    """Tests that two SVG renders are byte-identical and carry a legend."""
    spec = R.parse_slice_spec(c2, "1,sigma", None, "-4..4")
    first = R.render_slice(c2, spec, "svg")
    second = R.render_slice(c2, spec, "svg")
    assert first == second
    assert first.startswith("<svg")
    assert first.rstrip().endswith("</svg>")
    assert first.count("<circle") == len({(0, k) for k in range(-4, 5)} | {(2 * m, -2 * m) for m in range(-2, 3)}) + 3
    assert ">e, C2<" in first


@pytest.mark.parametrize("axes, fixes, window", [
    ("1", None, "-1..1"),
    ("1,1", None, "-1..1"),
    ("1,tau", None, "-1..1"),
    ("1,3", None, "-1..1"),
    ("1,sigma", None, "-1:1"),
    ("1,sigma", ["sigma=2"], "-1..1"),
])
def test_bad_slice_specs(c2, axes, fixes, window):
    """Tests slice argument validation."""
    with pytest.raises(UsageError):
        R.parse_slice_spec(c2, axes, fixes, window)


def test_fixed_coordinates():
    """Tests a slice of K4 with the remaining coordinates pinned."""
    ctx = load_context("K4", use_cache=False)
    spec = R.parse_slice_spec(ctx, "sigma_i,sigma_j", ["1=0", "sigma_k=0"], "-2..2")
    assert spec.fixed == ((0, 0), (3, 0))
    rows = {(x, y): rank for x, y, rank, _ in R.slice_rows(ctx, spec)}
    assert rows[(0, 1)] == rank_at(ctx, (0, 0, 1, 0)).rank == 3


@pytest.mark.parametrize("group, axes, fixes, window", [
    ("C3", "1,2", [], "-3..3"),
    ("K4", "sigma_i,sigma_j", ["1=1", "sigma_k=-1"], "-3..3"),
    ("D6", "1,3", ["2=2"], "-4..4"),
    ("Q8", "sigma_i,5", ["1=-2", "sigma_j=1", "sigma_k=0"], "-2..2"),
])
def test_slice_tsv_matches_rank_at(group, axes, fixes, window):
    """Tests every TSV row against rank_at at the full vector it stands for."""
    ctx = load_context(group, use_cache=False)
    spec = R.parse_slice_spec(ctx, axes, fixes, window)
    lines = R.render_slice(ctx, spec, "tsv").splitlines()
    assert len(lines) == 1 + (spec.hi - spec.lo + 1) ** 2
    for line in lines[1:]:
        x, y, rank, ids = line.split("\t")
        alpha = [0] * ctx.r
        for k, v in spec.fixed:
            alpha[k] = v
        alpha[spec.axis_i], alpha[spec.axis_j] = int(x), int(y)
        expected = rank_at(ctx, alpha)
        assert int(rank) == expected.rank
        assert tuple(int(c) for c in ids.split(";") if c) == expected.witnesses


# --- Reports ---
def test_render_rank(c2):
    """Tests the plain-text rank line."""
    assert R.render_rank(rank_at(c2, "sigma")) == "r = 1; witnesses: [C2]\nfinite: no"
    assert R.render_rank(rank_at(c2, "1 - sigma")) == "r = 0\nfinite: yes"


def test_render_analysis_formats(c2):
    """Tests the text, JSON and TeX analysis views."""
    analysis = analyze(c2)
    text = R.render_analysis(c2, analysis, "text")
    assert "N+ = Z{2 - 2sigma}" in text
    data = json.loads(R.render_analysis(c2, analysis, "json"))
    assert [c["label"] for c in data["classes"]] == ["e", "C2"]
    assert data["classes"][0]["plus_index"] == 2
    tex = R.render_analysis(c2, analysis, "tex")
    assert r"\sigma" in tex and tex.startswith(r"\begin{tabular}")
    with pytest.raises(UsageError):
        R.render_analysis(c2, analysis, "xml")


def test_render_strata_and_histogram(c2):
    """Tests the strata listing and the histogram table."""
    text = R.render_strata(c2, strata_report(c2), "text")
    assert text.splitlines()[0] == "Strata of C2: 3"
    assert "rank 2  {0}  [e, C2]" in text
    assert R.render_histogram({0: 6, 1: 2, 2: 1}, -1, 1) == "# box [-1, 1]\nrank\tcount\n0\t6\n1\t2\n2\t1"


# --- Virtual representation syntax ---
@pytest.mark.parametrize("value, expected", [
    ("0,1", (0, 1)),
    ("1,-1", (1, -1)),
    ("sigma=1", (0, 1)),
    ("1=2, sigma=-2", (2, -2)),
    ("2(1 - sigma)", (2, -2)),
    ("-sigma + 3", (3, -1)),
    ("2*sigma - 1", (-1, 2)),
    ({"sigma": 4}, (0, 4)),
    ([5, 6], (5, 6)),
])
def test_parse_alpha(value, expected):
    """Tests the accepted forms of a virtual representation."""
    assert parse_alpha(value, ["1", "sigma"]) == expected


@pytest.mark.parametrize("value", ["1,2,3", "tau=1", "sigma=x", "2(1 - sigma", "sigma sigma", [1]])
def test_parse_alpha_errors(value):
    """Tests that malformed virtual representations raise UsageError."""
    with pytest.raises(UsageError):
        parse_alpha(value, ["1", "sigma"])


def test_format_vector():
    """Tests the human-readable form of a vector."""
    names = ["1", "sigma_i", "sigma_j", "h"]
    assert format_vector((2, -2, 0, 0), names) == "2 - 2sigma_i"
    assert format_vector((0, 1, -1, 0), names) == "sigma_i - sigma_j"
    assert format_vector((-4, 0, 0, 1), names) == "-4 + h"
    assert format_vector((0, 0, 0, 0), names) == "0"
