# tests/test_groups.py
import sys
import os
import pytest

# Add 'src' to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from core.errors import CapExceeded, UsageError
from core.groups import (
    build_group,
    conjugacy_classes,
    find_subgroup_class,
    generated_subgroup,
    generating_sequence,
    group_digest,
    parse_group_spec,
    subgroup_classes,
    weyl_group,
)


# --- Specs ---
@pytest.mark.parametrize("text, family, param", [
    ("C2", "Cn", 2),
    ("Cn(9)", "Cn", 9),
    ("D6", "Dih", 3),
    ("Dih(5)", "Dih", 5),
    ("Q8", "Dic", 2),
    ("Dic3", "Dic", 3),
    ("K4", "Klein4", 0),
    ("V4", "Klein4", 0),
    ("S4", "Sym", 4),
    ("Sym(3)", "Sym", 3),
])
def test_parse_catalog_names(text, family, param):
    """Tests the catalog aliases."""
    spec = parse_group_spec(text)
    assert spec.kind == "catalog"
    assert (spec.name, spec.param) == (family, param)


def test_parse_json_forms():
    """Tests the JSON spec forms and products."""
    assert parse_group_spec({"catalog": "Q8"}) == parse_group_spec("Q8")
    product = parse_group_spec("C2xC2")
    assert product.kind == "product"
    assert [f.display_name() for f in product.factors] == ["C2", "C2"]
    assert parse_group_spec({"product": ["C2", "C3"]}).display_name() == "C2xC3"
    perm = parse_group_spec({"perm_generators": [[1, 0, 2], [1, 2, 0]]})
    assert perm.kind == "perm"
    assert perm.to_json() == {"perm_generators": [[1, 0, 2], [1, 2, 0]]}


@pytest.mark.parametrize("bad", ["D5", "X7", "C0", {"perm_generators": [[0, 0]]}, {"product": ["C2"]}, 42])
def test_parse_rejects_bad_specs(bad):
    """Tests that malformed specs raise UsageError."""
    with pytest.raises(UsageError):
        parse_group_spec(bad)


# --- Groups ---
@pytest.mark.parametrize("text, order, exponent, classes", [
    ("C2", 2, 2, 2),
    ("C9", 9, 9, 9),
    ("K4", 4, 2, 4),
    ("D6", 6, 6, 3),
    ("D10", 10, 10, 4),
    ("Q8", 8, 4, 5),
    ("S4", 24, 12, 5),
    ("C2xC2", 4, 2, 4),
])
def test_build_group(text, order, exponent, classes):
    """Tests orders, exponents and class counts of catalog groups."""
    G = build_group(text)
    assert G.order == order
    assert G.exponent == exponent
    assert len(conjugacy_classes(G)) == classes
    assert sum(c.size for c in conjugacy_classes(G)) == order
    assert G.orders[0] == 1


def test_permutation_group():
    """Tests a group given by permutation generators."""
    G = build_group({"perm_generators": [[1, 0, 2], [1, 2, 0]]})
    assert G.order == 6
    assert len(conjugacy_classes(G)) == 3


def test_order_cap():
    """Tests that groups above the order cap are refused."""
    with pytest.raises(CapExceeded):
        build_group("S7")


def test_digest_is_stable():
    """Tests that two builds of one spec share a digest."""
    assert group_digest(build_group("Q8")) == group_digest(build_group("Q8"))
    assert group_digest(build_group("Q8")) != group_digest(build_group("D8"))


def test_generating_sequence():
    """Tests that the greedy generators generate the group."""
    for text in ("C9", "K4", "Q8", "S4"):
        G = build_group(text)
        gens = generating_sequence(G)
        assert len(generated_subgroup(G, gens)) == G.order
    assert len(generating_sequence(build_group("K4"))) == 2
    assert len(generating_sequence(build_group("C9"))) == 1


# --- Subgroup classes ---
@pytest.mark.parametrize("text, labels", [
    ("C2", ["e", "C2"]),
    ("C9", ["e", "C3", "C9"]),
    ("K4", ["e", "<i>", "<j>", "<k>", "K4"]),
    ("Q8", ["e", "C2", "<i>", "<j>", "<k>", "Q8"]),
    ("D6", ["e", "C2", "C3", "D6"]),
    ("D10", ["e", "C2", "C5", "D10"]),
])
def test_subgroup_class_labels(text, labels):
    """Tests the subgroup classes and their labels, e first and G last."""
    classes = subgroup_classes(build_group(text))
    assert [c.label for c in classes] == labels
    assert [c.id for c in classes] == list(range(len(labels)))


def test_sym4_subgroup_classes():
    """Tests the number of conjugacy classes of subgroups of S4."""
    classes = subgroup_classes(build_group("S4"))
    assert len(classes) == 11
    assert classes[0].order == 1 and classes[-1].order == 24


def test_find_subgroup_class():
    """Tests lookup by label and by id."""
    classes = subgroup_classes(build_group("Q8"))
    assert find_subgroup_class(classes, "<j>").order == 4
    assert find_subgroup_class(classes, 1).label == "C2"
    with pytest.raises(UsageError):
        find_subgroup_class(classes, "H7")


@pytest.mark.parametrize("text, weyl_orders", [
    ("Q8", [8, 4, 2, 2, 2, 1]),
    ("K4", [4, 2, 2, 2, 1]),
    ("D6", [6, 1, 2, 1]),
    ("C9", [9, 3, 1]),
])
def test_weyl_group_orders(text, weyl_orders):
    """Tests |W_G(H)| = |N_G(H)| / |H| for every class."""
    G = build_group(text)
    assert [weyl_group(G, K).group.order for K in subgroup_classes(G)] == weyl_orders


# --- Power maps ---
@pytest.mark.parametrize("text", ["C6", "C12", "D8", "Q8", "Dic3", "S4", "C2xC4"])
def test_power_maps_compose(text):
    """Tests p_k o p_m = p_km on every class."""
    G = build_group(text)
    classes = conjugacy_classes(G)
    e = G.exponent
    for c in classes:
        assert len(c.power_map) == e + 1
        assert c.power_map[1] == c.index
        assert classes[c.power_map[0]].representative == 0
        for k in range(e + 1):
            for m in range(e + 1):
                assert classes[c.power_map[m]].power_map[k] == c.power_map[(k * m) % e], (c.index, k, m)


# --- Exhaustive subgroup search ---
def _all_subgroups(G):
    """Close the trivial subgroup under adding one element at a time."""
    known = {(0,)}
    frontier = [(0,)]
    while frontier:
        fresh = []
        for sub in frontier:
            for g in range(G.order):
                if g in sub:
                    continue
                bigger = generated_subgroup(G, list(sub) + [g])
                if bigger not in known:
                    known.add(bigger)
                    fresh.append(bigger)
        frontier = fresh
    return known


def _class_count(G, subgroups):
    canonical = {min(tuple(sorted({G.conjugate(g, x) for x in sub})) for g in range(G.order)) for sub in subgroups}
    return len(canonical)


@pytest.mark.parametrize("text, expected", [
    ("Q8", 6),
    ("D8", 8),
    ("Dic3", 6),
    ("C2xC2xC2", 16),
    ("S4", 11),
    ({"perm_generators": [[1, 2, 0, 3], [1, 0, 3, 2]]}, 5),
    ("Dih(6)", None),
    ("C2xC6", None),
    ("C12", None),
])
def test_subgroup_classes_match_exhaustive_search(text, expected):
    """Tests the subgroup class count against a brute-force closure for |G| <= 24."""
    G = build_group(text)
    assert G.order <= 24
    count = _class_count(G, _all_subgroups(G))
    if expected is not None:
        assert count == expected
    classes = subgroup_classes(G)
    assert len(classes) == count
    assert sum(len(K.conjugates) for K in classes) == len(_all_subgroups(G))
