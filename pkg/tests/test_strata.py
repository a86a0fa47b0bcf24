# tests/test_strata.py
import sys
import os
import json
import random
import pytest
import numpy as np

# Add 'src' to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

import core.strata as strata
from core.context import load_context
from core.errors import CapExceeded, UsageError
from core.lattice import hnf, index, intersect
from core.strata import (
    analysis_from_json,
    analysis_to_json,
    analyze,
    box_points,
    burnside_coefficients,
    extend_signs,
    is_finite,
    mackey_rank,
    parse_mackey,
    rank_at,
    rank_histogram,
    strata_report,
    witness_matrix,
    zero_coefficients,
)

_CONTEXTS = {}


def ctx_for(text):
    """One analysed context per group for the whole module."""
    if text not in _CONTEXTS:
        _CONTEXTS[text] = load_context(text, use_cache=False)
    return _CONTEXTS[text]


def _lattice(ctx, label, plus=True):
    a = analyze(ctx)[ctx.subgroup(label).id]
    return a.N_plus if plus else a.N


def _span(ctx, *exprs):
    return hnf([ctx.alpha(e).coeffs for e in exprs], ctx.r)


# --- Null lattices ---
def test_c2_lattices():
    """Tests N and N+ for both subgroup classes of C2."""
    ctx = ctx_for("C2")
    assert _lattice(ctx, "e", plus=False) == _span(ctx, "1 - sigma")
    assert _lattice(ctx, "e") == _span(ctx, "2(1 - sigma)")
    assert _lattice(ctx, "C2", plus=False) == _span(ctx, "sigma")
    assert _lattice(ctx, "C2") == _span(ctx, "sigma")
    assert [a.plus_index for a in analyze(ctx)] == [2, 1]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_odd_cyclic_lattices(p):
    """Tests that N+ = N for C_p and that the two lattices meet in the phi differences."""
    ctx = ctx_for(f"C{p}")
    for a in analyze(ctx):
        assert a.N_plus == a.N
        assert a.plus_index == 1
    meet = intersect(_lattice(ctx, "e"), _lattice(ctx, f"C{p}"))
    q = (p - 1) // 2
    expected = [f"phi_1 - phi_{t}" for t in range(2, q + 1)]
    assert meet == (_span(ctx, *expected) if expected else hnf([], ctx.r))


def test_c9_lattices():
    """Tests the C9 lattices and their pairwise intersections."""
    ctx = ctx_for("C9")
    assert _lattice(ctx, "e") == _span(ctx, "2 - phi_1", "2 - phi_2", "2 - phi_3", "2 - phi_4")
    assert _lattice(ctx, "C3") == _span(ctx, "2 - phi_3", "phi_1", "phi_2", "phi_4")
    assert _lattice(ctx, "C9") == _span(ctx, "phi_1", "phi_2", "phi_3", "phi_4")
    assert intersect(_lattice(ctx, "e"), _lattice(ctx, "C3")) == _span(ctx, "2 - phi_3", "phi_1 - phi_2", "phi_1 - phi_4")
    assert intersect(_lattice(ctx, "e"), _lattice(ctx, "C9")) == _span(ctx, "phi_1 - phi_2", "phi_1 - phi_3", "phi_1 - phi_4")
    assert intersect(_lattice(ctx, "C3"), _lattice(ctx, "C9")) == _span(ctx, "phi_1", "phi_2", "phi_4")


def test_k4_plus_lattice_at_e():
    """Tests N_e+ of K4: the three sigma coefficients share one parity."""
    ctx = ctx_for("K4")
    N, Np = _lattice(ctx, "e", plus=False), _lattice(ctx, "e")
    assert index(Np, N) == 4
    assert (3, -1, -1, -1) in Np
    assert (0, 1, -1, 0) not in Np
    assert (2, -2, 0, 0) in Np
    for label in ("<i>", "<j>", "<k>"):
        a = analyze(ctx)[ctx.subgroup(label).id]
        assert a.plus_index == 2


def test_q8_sigma_difference_not_oriented_at_e():
    """Tests that sigma_i - sigma_j lies in N_e but not in N_e+ for Q8."""
    ctx = ctx_for("Q8")
    v = ctx.alpha("sigma_i - sigma_j").coeffs
    assert v in _lattice(ctx, "e", plus=False)
    assert v not in _lattice(ctx, "e")


def test_analysis_json_round_trip_rechecks_lattices():
    """Tests that a stored analysis is rebuilt and that tampering is caught."""
    ctx = ctx_for("D6")
    data = json.loads(json.dumps(analysis_to_json(ctx, analyze(ctx))))
    again = analysis_from_json(ctx, data)
    assert [a.N_plus for a in again] == [a.N_plus for a in analyze(ctx)]

    data["classes"][0]["N_plus"] = data["classes"][0]["N"]
    with pytest.raises(strata.InternalInconsistency):
        analysis_from_json(ctx, data)
    data["group_hash"] = "0" * 16
    with pytest.raises(UsageError):
        analysis_from_json(ctx, data)


# --- Ranks ---
@pytest.mark.parametrize("text, r0", [
    ("C2", 2), ("C3", 2), ("K4", 5), ("D6", 4), ("D10", 4), ("Q8", 6), ("C9", 3),
])
def test_rank_at_zero_counts_subgroup_classes(text, r0):
    """Tests r_0 = number of conjugacy classes of subgroups."""
    ctx = ctx_for(text)
    result = rank_at(ctx, [0] * ctx.r)
    assert result.rank == r0
    assert not result.finite


@pytest.mark.parametrize("text, alpha, rank, labels", [
    ("Q8", "h", 5, ("C2", "<i>", "<j>", "<k>", "Q8")),
    ("K4", "sigma_j", 3, ("<i>", "<k>", "K4")),
    ("K4", "2(1 - sigma_i - sigma_j - sigma_k)", 3, ("<i>", "<j>", "<k>")),
    ("C2", "sigma", 1, ("C2",)),
    ("C2", "2 - 2sigma", 1, ("e",)),
    ("C2", "1 - sigma", 0, ()),
    ("D6", "1 - sigma", 0, ()),
    ("D6", "sigma - phi_1", 1, ("D6",)),
])
def test_rank_spot_values(text, alpha, rank, labels):
    """Tests ranks and witnesses at chosen virtual representations."""
    result = rank_at(ctx_for(text), alpha)
    assert result.rank == rank
    assert result.labels == labels
    assert is_finite(ctx_for(text), alpha) == (rank == 0)


def test_c2_box():
    """Tests every point of [-8, 8]^2 for C2."""
    ctx = ctx_for("C2")
    for a in range(-8, 9):
        for b in range(-8, 9):
            expected = int(a == 0) + int(a + b == 0 and b % 2 == 0)
            assert rank_at(ctx, (a, b)).rank == expected, (a, b)


@pytest.mark.parametrize("p, bound", [(3, 3), (5, 3), (7, 4)])
def test_odd_cyclic_box(p, bound):
    """Tests C_p on a box: rank counts a_1 = 0 and a_1 + 2 sum a_t = 0."""
    ctx = ctx_for(f"C{p}")
    points = box_points(ctx.r, -bound, bound)
    assert len(points) == (2 * bound + 1) ** ctx.r
    ranks = witness_matrix(ctx, points).sum(axis=1)
    for point, rank in zip(points.tolist(), ranks.tolist()):
        expected = int(point[0] == 0) + int(point[0] + 2 * sum(point[1:]) == 0)
        assert rank == expected


@pytest.mark.parametrize("text", ["K4", "D6", "Q8", "C9"])
def test_rank_is_symmetric_under_negation(text):
    """Tests r_alpha = r_-alpha on seeded random points."""
    ctx = ctx_for(text)
    rng = random.Random(11)
    for _ in range(40):
        alpha = [rng.randint(-6, 6) for _ in range(ctx.r)]
        assert rank_at(ctx, alpha).rank == rank_at(ctx, [-v for v in alpha]).rank


@pytest.mark.parametrize("text", ["K4", "D6", "D10", "Q8"])
def test_vectorised_witnesses_match_rank_at(text):
    """Tests witness_matrix against rank_at on seeded random points."""
    ctx = ctx_for(text)
    rng = random.Random(3)
    points = np.array([[rng.randint(-4, 4) for _ in range(ctx.r)] for _ in range(60)])
    # force some hits on the lattices themselves
    for a in analyze(ctx):
        for row in a.N_plus.basis:
            points = np.vstack([points, np.array(row) * rng.randint(-2, 2)])
    hits = witness_matrix(ctx, points)
    for point, row in zip(points.tolist(), hits):
        assert rank_at(ctx, point).witnesses == tuple(int(c) for c in np.flatnonzero(row))


def test_box_points():
    """Tests box enumeration order and the empty box."""
    pts = box_points(2, -1, 1)
    assert pts.shape == (9, 2)
    assert pts[0].tolist() == [-1, -1]
    assert pts[1].tolist() == [-1, 0]
    assert box_points(3, 1, 0).shape == (0, 3)


def test_box_cap(monkeypatch):
    """Tests that oversized boxes raise CapExceeded."""
    monkeypatch.setattr(strata, "MAX_BOX_POINTS", 10)
    with pytest.raises(CapExceeded):
        box_points(3, -1, 1)


def test_rank_histogram():
    """Tests the rank histogram of C2 on [-1, 1]^2."""
    assert rank_histogram(ctx_for("C2"), -1, 1) == {0: 6, 1: 2, 2: 1}
    assert rank_histogram(ctx_for("C2"), 1, 0) == {}


def test_rank_rejects_bad_alpha():
    """Tests that malformed virtual representations are usage errors."""
    ctx = ctx_for("C2")
    with pytest.raises(UsageError):
        rank_at(ctx, (1, 2, 3))
    with pytest.raises(UsageError):
        rank_at(ctx, "tau")


# --- Strata ---
def test_c2_strata():
    """Tests the three strata of C2 and their generic ranks."""
    ctx = ctx_for("C2")
    report = strata_report(ctx)
    got = [(s.lattice, s.generic_rank) for s in report.strata]
    assert got == [
        (hnf([], 2), 2),
        (_span(ctx, "sigma"), 1),
        (_span(ctx, "2 - 2sigma"), 1),
    ]


@pytest.mark.parametrize("text", ["C3", "C5", "K4", "D6", "Q8", "C9"])
def test_strata_are_meets(text):
    """Tests that every stratum is the meet of the classes containing it and is listed once."""
    ctx = ctx_for(text)
    report = strata_report(ctx)
    lattices = [s.lattice for s in report.strata]
    assert len(set(lattices)) == len(lattices)
    analysis = analyze(ctx)
    for s in report.strata:
        for c in s.classes:
            assert all(row in analysis[c].N_plus for row in s.lattice.basis)
        for row in s.lattice.basis:
            assert rank_at(ctx, row).rank >= s.generic_rank
    assert report.strata[0].generic_rank == len(analysis)


def test_strata_cap(monkeypatch):
    """Tests that the strata worklist respects MAX_STRATA."""
    monkeypatch.setattr(strata, "MAX_STRATA", 2)
    with pytest.raises(CapExceeded):
        strata_report(load_context("K4", use_cache=False))


# --- Mackey coefficients ---
@pytest.mark.parametrize("text", ["C2", "K4", "D6", "Q8"])
def test_burnside_coefficients_give_the_rank(text):
    """Tests that the Burnside Mackey functor reproduces r_alpha."""
    ctx = ctx_for(text)
    M = burnside_coefficients(ctx)
    rng = random.Random(5)
    samples = [[0] * ctx.r] + [[rng.randint(-3, 3) for _ in range(ctx.r)] for _ in range(25)]
    for a in analyze(ctx):
        samples += [list(row) for row in a.N_plus.basis] + [list(row) for row in a.N.basis]
    for alpha in samples:
        assert mackey_rank(ctx, alpha, M) == rank_at(ctx, alpha).rank
        assert mackey_rank(ctx, alpha, zero_coefficients(ctx)) == 0


def test_sign_coefficients_pick_up_non_oriented_points():
    """Tests a sign character at e for C2: it sees 1 - sigma, which the Burnside functor misses."""
    ctx = ctx_for("C2")
    M = parse_mackey(ctx, {"classes": {"e": [{"signs": [-1], "multiplicity": 1}]}})
    assert mackey_rank(ctx, "1 - sigma", M) == 1
    assert mackey_rank(ctx, "2 - 2sigma", M) == 0
    both = parse_mackey(ctx, {"classes": {"e": [{"signs": "trivial", "multiplicity": 2}, {"signs": [-1]}],
                                          "C2": [{"signs": "trivial"}]}})
    assert mackey_rank(ctx, 0, both) == 3
    assert mackey_rank(ctx, "1 - sigma", both) == 1


def test_parse_mackey_rejects_bad_input():
    """Tests malformed Mackey coefficient documents."""
    ctx = ctx_for("C2")
    with pytest.raises(UsageError):
        parse_mackey(ctx, {"classes": {"e": [{"signs": [1, 1]}]}})
    with pytest.raises(UsageError):
        parse_mackey(ctx, {"classes": {"e": [{"signs": [-1], "multiplicity": -1}]}})
    with pytest.raises(UsageError):
        parse_mackey(ctx, {"classes": {"H9": []}})
    with pytest.raises(UsageError):
        parse_mackey(ctx, [1, 2])


def test_extend_signs():
    """Tests that generator signs extend to a character only when one exists."""
    ctx = ctx_for("C3")
    od = analyze(ctx)[0].orientation
    assert extend_signs(od.weyl.group, od.generators, [1]) == [1, 1, 1]
    with pytest.raises(UsageError):
        extend_signs(od.weyl.group, od.generators, [-1])
    k4 = analyze(ctx_for("K4"))[0].orientation
    assert sorted(extend_signs(k4.weyl.group, k4.generators, [-1, -1])) == [-1, -1, 1, 1]


# --- Burnside coefficients over whole boxes ---
MACKEY_CATALOG = ["C2", "C3", "C4", "C5", "C6", "C7", "K4", "D6", "D8", "D10", "Q8", "Dic3", "S4", "C2xC4"]
FULL_BOX = 9 ** 4


def _box_or_sample(ctx, lo, hi, size, seed):
    """The whole box when it is small enough, otherwise a seeded sample of it plus the lattice bases."""
    if (hi - lo + 1) ** ctx.r <= min(FULL_BOX, strata.MAX_BOX_POINTS):
        return box_points(ctx.r, lo, hi)
    rng = random.Random(seed)
    points = [[rng.randint(lo, hi) for _ in range(ctx.r)] for _ in range(size)]
    for a in analyze(ctx):
        points += [list(row) for row in a.N_plus.basis]
    return np.array(points, dtype=np.int64)


@pytest.mark.parametrize("text", MACKEY_CATALOG)
def test_burnside_rank_matches_rank_on_box(text):
    """Tests the Burnside Mackey rank against the witness count on [-4, 4]^r."""
    ctx = ctx_for(text)
    M = burnside_coefficients(ctx)
    Z = zero_coefficients(ctx)
    points = _box_or_sample(ctx, -4, 4, 500, seed=29)
    ranks = witness_matrix(ctx, points).sum(axis=1)
    for point, rank in zip(points.tolist(), ranks.tolist()):
        assert mackey_rank(ctx, point, M) == rank, point
        assert mackey_rank(ctx, point, Z) == 0


# --- Pointwise rank laws ---
@pytest.mark.parametrize("text", ["C2", "C4", "C9", "K4", "D6", "D8", "Q8", "S4"])
def test_rank_of_doubles_counts_vanishing_dimensions(text):
    """Tests r_{2 alpha} = #{H : alpha . d_H = 0}."""
    ctx = ctx_for(text)
    analysis = analyze(ctx)
    rng = random.Random(31)
    samples = [[0] * ctx.r] + [[rng.randint(-3, 3) for _ in range(ctx.r)] for _ in range(80)]
    for a in analysis:
        samples += [list(row) for row in a.N.basis]
    for alpha in samples:
        vanishing = sum(1 for a in analysis if sum(x * d for x, d in zip(alpha, a.dimension.d)) == 0)
        assert rank_at(ctx, [2 * x for x in alpha]).rank == vanishing, alpha


@pytest.mark.parametrize("text", ["C2", "C3", "C6", "K4", "D6", "D10", "Q8", "Dic3", "S4"])
def test_vanishing_at_g_gives_positive_rank(text):
    """Tests r_alpha >= 1 with G as a witness whenever alpha . d_G = 0."""
    ctx = ctx_for(text)
    top = analyze(ctx)[-1]
    assert top.subgroup.order == ctx.group.order
    d = top.dimension.d
    assert d[0] == 1
    rng = random.Random(37)
    for _ in range(100):
        alpha = [rng.randint(-5, 5) for _ in range(ctx.r)]
        alpha[0] -= sum(x * v for x, v in zip(alpha, d))
        result = rank_at(ctx, alpha)
        assert result.rank >= 1
        assert top.class_id in result.witnesses
