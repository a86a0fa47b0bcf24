# tests/test_models.py
import sys
import os
import pytest

# Add 'src' to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from core.characters import character_table, real_irreps
from core.cyclotomic import CycNum
from core.groups import build_group, subgroup_classes, weyl_group, generating_sequence
from core.models import MatrixOracle, det, realify, trace
from core.orient import dimension_vector, orientation_data


def _setup(text):
    G = build_group(text)
    irreps = real_irreps(character_table(G))
    return G, irreps, MatrixOracle(G, irreps)


def test_det_and_realify():
    """Tests the exact determinant and the real form of a complex matrix."""
    one, zero = CycNum.rational(1), CycNum.rational(0)
    i = CycNum.zeta(4)
    assert det([[one, one], [one, one]]) == 0
    assert det([[CycNum.rational(2), one], [one, one]]) == 1
    R = realify([[i]])
    assert R == [[zero, -one], [one, zero]]
    assert det(R) == 1
    assert trace(realify([[i, zero], [zero, -i]])) == 0


@pytest.mark.parametrize("text", ["C2", "C9", "K4", "D6", "D10", "Q8", "S3", "S4"])
def test_every_catalog_irrep_has_a_model(text):
    """Tests that each real irrep of a catalog group gets a matrix model."""
    G, irreps, oracle = _setup(text)
    assert all(oracle.has_model(S.index) for S in irreps)


@pytest.mark.parametrize("text", ["C9", "K4", "D6", "D10", "Q8", "S4"])
def test_oracle_fixed_dims_match_characters(text):
    """Tests matrix fixed-point dimensions against the character formula."""
    G, irreps, oracle = _setup(text)
    for K in subgroup_classes(G):
        d = dimension_vector(G, irreps, K).d
        assert [oracle.fixed_dim(S.index, K.representative) for S in irreps] == list(d)


@pytest.mark.parametrize("text", ["C2", "K4", "D6", "D10", "Q8", "S3"])
def test_oracle_signs_match_characters(text):
    """Tests determinant signs on fixed points against the character computation."""
    G, irreps, oracle = _setup(text)
    for K in subgroup_classes(G):
        od = orientation_data(G, irreps, K)
        for S in irreps:
            assert oracle.signs(S.index, K, od.weyl, od.generators) == od.signs[S.name]


def test_quaternion_h_model():
    """Tests the realified quaternion model: no C2-fixed vectors, 4-dimensional at e."""
    G, irreps, oracle = _setup("Q8")
    classes = subgroup_classes(G)
    assert oracle.fixed_dim(5, classes[0].representative) == 4
    assert oracle.fixed_dim(5, classes[1].representative) == 0
    W = weyl_group(G, classes[0])
    gens = generating_sequence(W.group)
    assert oracle.is_plus((0, 0, 0, 0, 1), classes[1], weyl_group(G, classes[1]),
                          generating_sequence(weyl_group(G, classes[1]).group))
    # sigma_i - sigma_j has the wrong orientation at e
    assert oracle.is_plus((0, 1, -1, 0, 0), classes[0], W, gens) is False


def test_no_models_for_permutation_groups():
    """Tests that the oracle stays empty without a catalog spec."""
    G = build_group({"perm_generators": [[1, 0, 2], [1, 2, 0]]})
    irreps = real_irreps(character_table(G))
    oracle = MatrixOracle(G, irreps)
    assert not oracle.has_model(1)
    K = subgroup_classes(G)[0]
    W = weyl_group(G, K)
    assert oracle.is_plus((1, -1, 0), K, W, generating_sequence(W.group)) is None
