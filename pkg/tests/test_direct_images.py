from math import comb

import pytest

from logkfl.abelian import FgAbGroup
from logkfl.coefficients import PRIMARY, ZERO_MODULE, SymbolicModule, p_primary_sym, parse_module
from logkfl.direct_images import (
    BaseDescription,
    BasePoint,
    DirectImageExpr,
    SheafSpec,
    higher_direct_image,
    lattice_image_via_finite,
    lattice_level_via_finite,
    stalk_on_strict_site,
    torsion_of_image,
    vanishing_degree,
)
from logkfl.errors import UnsupportedBase

C = FgAbGroup.cyclic


def bases():
    yield BaseDescription.log_trait(3, 9)
    yield BaseDescription.log_trait(2)
    yield BaseDescription.dedekind([(2, 4), (3, 3), (5, 5)])
    yield BaseDescription.dedekind([(0, None), (7, 49)])
    yield BaseDescription("dedekind", [BasePoint("a", 2, 2, 2), BasePoint("b", 3, 3, 0)], strict=False)


def sheaves():
    yield SheafSpec.finite(2, C(4))
    yield SheafSpec.finite(3, FgAbGroup.from_orders([3, 9]))
    yield SheafSpec.finite(5, C(5))
    yield SheafSpec.lattice(1)
    yield SheafSpec.lattice(2)
    yield SheafSpec.rational(3)


def test_examples():
    trait = BaseDescription.log_trait(3, 9)
    x = trait.points[0]
    E = higher_direct_image(trait, SheafSpec.finite(2, C(8)), 1)
    assert E == DirectImageExpr([("x", parse_module("Z/8(-1)"))])
    assert stalk_on_strict_site(E, x) == parse_module("Z/8(-1)")
    L = higher_direct_image(trait, SheafSpec.lattice(1), 2)
    assert stalk_on_strict_site(L, x) == parse_module("(Q/Z)^(3')(-1)")
    assert higher_direct_image(trait, SheafSpec.rational(2), 1).is_zero()
    assert higher_direct_image(trait, SheafSpec.finite(2, C(8)), 2).is_zero()


def test_stalk_at_unmarked_point():
    E = higher_direct_image(BaseDescription.log_trait(3), SheafSpec.finite(2, C(2)), 1)
    assert stalk_on_strict_site(E, BasePoint("y", 5)) == ZERO_MODULE
    assert stalk_on_strict_site(E, "y") == ZERO_MODULE


def test_vanishing_degree_examples():
    trait = BaseDescription.log_trait(5)
    assert vanishing_degree(trait, SheafSpec.finite(2, C(4))) == 2
    assert vanishing_degree(trait, SheafSpec.lattice(1)) == 3
    assert vanishing_degree(trait, SheafSpec.rational(1)) == 1


@pytest.mark.parametrize("base", list(bases()), ids=lambda b: b.kind + str(len(b.points)))
def test_vanishing_beyond_degree(base):
    for F in sheaves():
        d = vanishing_degree(base, F)
        for i in range(max(d, 1), d + 4):
            assert higher_direct_image(base, F, i).is_zero()
        R = base.max_log_rank()
        if d > 1 and any(x.p != F.l and x.log_rank == R for x in base.points):
            assert not higher_direct_image(base, F, d - 1).is_zero()


@pytest.mark.parametrize("base", list(bases()), ids=lambda b: b.kind + str(len(b.points)))
def test_extension_by_zero_and_twists(base):
    for F in sheaves():
        for i in range(1, 5):
            E = higher_direct_image(base, F, i)
            for label, M in E.terms:
                x = base.point(label)
                weight = -i if F.cls == SheafSpec.FINITE_L else -(i - 1)
                assert all(a.twist == weight for a, _ in M.atoms)
                if F.cls == SheafSpec.FINITE_L:
                    assert x.p != F.l
                    assert M == SymbolicModule.from_group(F.group, -i) * comb(x.log_rank, i)
                else:
                    # no l-primary part at the residue characteristic
                    assert x.p == 0 or p_primary_sym(M, x.p).is_zero()


@pytest.mark.parametrize("base", list(bases()), ids=lambda b: b.kind + str(len(b.points)))
def test_lattice_and_rational_rules(base):
    for rank in (0, 1, 3):
        assert higher_direct_image(base, SheafSpec.lattice(rank), 1).is_zero()
    for dim in (0, 1, 4):
        for i in (1, 2, 3):
            assert higher_direct_image(base, SheafSpec.rational(dim), i).is_zero()


@pytest.mark.parametrize("base", list(bases()), ids=lambda b: b.kind + str(len(b.points)))
def test_lattice_matches_finite_levels(base):
    for rank in (1, 2):
        for i in (2, 3):
            E = higher_direct_image(base, SheafSpec.lattice(rank), i)
            for l in (2, 3, 5, 7):
                for k in (1, 2, 3):
                    level = lattice_level_via_finite(base, rank, i, l, k)
                    assert torsion_of_image(E, l ** k) == level
                expected = E.map_modules(lambda M: p_primary_sym(M, l))
                assert lattice_image_via_finite(base, rank, i, [l]) == expected


def test_prime_sum_is_not_truncated():
    trait = BaseDescription.log_trait(2)
    M = higher_direct_image(trait, SheafSpec.lattice(1), 2).stalk("x")
    for l in (3, 5, 7, 11, 101):
        assert p_primary_sym(M, l) == parse_module("Q_%d/Z_%d(-1)" % (l, l))
    assert p_primary_sym(M, 2).is_zero()
    colim = lattice_image_via_finite(trait, 1, 2, [3, 5])
    assert [a.kind for a, _ in colim.stalk("x").atoms] == [PRIMARY, PRIMARY]


def test_higher_log_rank_uses_binomials():
    base = BaseDescription("dedekind", [BasePoint("a", 2, 2, 3)], strict=False)
    for i in range(1, 5):
        E = higher_direct_image(base, SheafSpec.finite(3, C(3)), i)
        assert E.stalk("a") == parse_module("Z/3(%d)" % -i) * comb(3, i)
    assert vanishing_degree(base, SheafSpec.finite(3, C(3))) == 4
    assert vanishing_degree(base, SheafSpec.lattice(1)) == 5


def test_base_validation():
    with pytest.raises(UnsupportedBase):
        higher_direct_image(BaseDescription("curve", [BasePoint("x", 2)]), SheafSpec.lattice(1), 2)
    with pytest.raises(ValueError):
        BaseDescription("log_trait", [BasePoint("x", 2), BasePoint("y", 3)])
    with pytest.raises(ValueError):
        BaseDescription("dedekind", [BasePoint("x", 2, 4, 2)])
    with pytest.raises(ValueError):
        BasePoint("x", 3, 9 * 2)
    with pytest.raises(ValueError):
        BasePoint("x", 4)
    with pytest.raises(ValueError):
        higher_direct_image(BaseDescription.log_trait(2), SheafSpec.lattice(1), 0)
    with pytest.raises(ValueError):
        SheafSpec.finite(2, C(6))


def test_serialization_round_trip():
    for base in bases():
        assert BaseDescription.from_dict(base.to_dict(), strict=False).to_dict() == base.to_dict()
