import pytest

from logkfl.abelian import FgAbGroup, Z
from logkfl.coefficients import SymbolicModule, parse_module, twist
from logkfl.errors import BadTower
from logkfl.groupcoh import FiniteAbelianGroup, profinite_colimit_bruteforce, standard_complex
from logkfl.kummer import (
    KummerCover,
    LogPointModel,
    _nerve_face_matrix,
    cech_cohomology,
    cech_cohomology_rational,
    cech_cohomology_tower_map,
    cech_colimit,
    cech_complex,
    kummer_group,
)

C = FgAbGroup.cyclic


def test_kummer_group_examples():
    assert kummer_group(LogPointModel(2, 3), 6) == FiniteAbelianGroup([2, 2])
    assert kummer_group(LogPointModel(1, 2), 8).order == 1
    assert kummer_group(LogPointModel(1, 0), 5) == FiniteAbelianGroup([5])


def test_split_and_section():
    model = LogPointModel(1, 2)
    assert model.split(12) == (3, 2)
    cover = KummerCover(model, 12)
    for x in range(3):
        y = cover.section(x)
        assert y % 3 == x and y % 4 == 0
    with pytest.raises(ValueError):
        LogPointModel(1, 4)


@pytest.mark.parametrize("r", [0, 1, 2])
@pytest.mark.parametrize("p", [0, 2, 3, 5])
def test_cech_equals_standard(r, p):
    model = LogPointModel(r, p)
    for n in range(1, 7):
        m, _ = model.split(n)
        degree = 3 if m ** r <= 16 else 2
        for M in (Z, C(2), C(4), C(6)):
            Cc = cech_complex(model, n, M, degree)
            S = standard_complex(kummer_group(model, n), M, degree)
            assert Cc.groups == S.groups
            for d in range(degree):
                assert Cc.differential(d) == S.differential(d)


def test_lift_independence_is_checked():
    cover = KummerCover(LogPointModel(2, 2), 12)
    for d in range(3):
        assert _nerve_face_matrix(cover, d, 0) == _nerve_face_matrix(cover, d, 1)
        assert _nerve_face_matrix(cover, d, 0) == _nerve_face_matrix(cover, d, 2)


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_integral_cech_cohomology(r, p):
    model = LogPointModel(r, p)
    for n in range(1, 7):
        assert cech_cohomology(model, n, Z, 1).is_trivial()
        for i in (2, 3):
            if r == 2 and i == 3 and model.split(n)[0] >= 5:
                continue  # covered by the acceptance suite with a raised bound
            H = cech_cohomology(model, n, Z, i)
            assert H.is_finite()
            assert all(d % p for d in H.invariant_factors)
            assert cech_cohomology_rational(model, n, i).is_zero()
        assert cech_cohomology_rational(model, n, 0) == parse_module("Q")


def test_nerve_and_product_routes_agree():
    for r, p, n in ((1, 2, 6), (2, 5, 4), (2, 2, 6), (2, 3, 2)):
        model = LogPointModel(r, p)
        for M in (Z, C(2), C(6)):
            for i in (1, 2):
                a = cech_cohomology(model, n, M, i, method="nerve")
                b = cech_cohomology(model, n, M, i, method="product")
                assert a == b


def test_tower_map_examples():
    model = LogPointModel(1, 3)
    f = cech_cohomology_tower_map(model, 2, 6, Z, 2)
    assert f.source == C(2) and f.target == C(2) and f.is_isomorphism()
    g = cech_cohomology_tower_map(LogPointModel(2, 0), 3, 3, C(3), 1)
    assert g.is_isomorphism() and g.matrix == g.matrix.identity(g.source.ngens)
    with pytest.raises(BadTower):
        cech_cohomology_tower_map(model, 2, 4, Z, 2)


def test_tower_map_is_multiplication_by_p_power():
    # on H^1 = Hom((Z/3), Z/3) restriction along x -> 2x is multiplication by 2
    f = cech_cohomology_tower_map(LogPointModel(1, 2), 3, 6, C(3), 1)
    assert f.source == C(3) and f.is_isomorphism()
    assert f.matrix[0, 0] % 3 == 2


def test_colimit_examples():
    assert cech_colimit(LogPointModel(1, 3), C(4), 1) == parse_module("Z/4(-1)")
    assert cech_colimit(LogPointModel(2, 3), C(2), 2) == parse_module("Z/2(-2)")
    assert cech_colimit(LogPointModel(1, 3), C(27), 2).is_zero()
    assert cech_colimit(LogPointModel(1, 3), C(9), 1).is_zero()


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_colimit_matches_bruteforce(r, p):
    model = LogPointModel(r, p)
    for M in (C(2), C(3), C(6)):
        for i in (1, 2):
            brute = SymbolicModule.from_group(profinite_colimit_bruteforce(r, M, p, i))
            assert cech_colimit(model, M, i) == twist(brute, -i)
