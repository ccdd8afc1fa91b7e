import itertools
from math import comb

import pytest

from logkfl.abelian import FgAbGroup, Z
from logkfl.coefficients import SymbolicModule, parse_module
from logkfl.errors import NotStabilized, NotSurjective, SizeBound
from logkfl.groupcoh import (
    FiniteAbelianGroup,
    GroupMap,
    bar_differential,
    cohomology_bruteforce,
    cohomology_cyclic_closed,
    cohomology_rational,
    inflation,
    product_cyclic_cohomology,
    profinite_closed_form,
    profinite_colimit_bruteforce,
    profinite_colimit_report,
    standard_complex,
)

C = FgAbGroup.cyclic


def explicit_bar(G, r):
    """Bar differential from the face formulas, one cochain at a time."""
    els = G.elements()
    add = lambda x, y: tuple((a + b) % m for a, b, m in zip(x, y, G.factors))
    src = {t: k for k, t in enumerate(itertools.product(els, repeat=r))}
    rows = []
    for h in itertools.product(els, repeat=r + 1):
        row = [0] * len(src)
        row[src[h[1:]]] += 1
        for i in range(1, r + 1):
            row[src[h[:i - 1] + (add(h[i - 1], h[i]),) + h[i + 1:]]] += (-1) ** i
        row[src[h[:r]]] += (-1) ** (r + 1)
        rows.append(row)
    return rows


def rank_mod_p(rows, p):
    rows = [[v % p for v in r] for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col]
                rows[i] = [(a - c * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


@pytest.mark.parametrize("factors", [[2], [3], [4], [2, 2], [6]])
def test_bar_differential_matches_face_formula(factors):
    G = FiniteAbelianGroup(factors)
    for r in range(3 if G.order <= 4 else 2):
        assert bar_differential(G, r).tolist() == explicit_bar(G, r)


@pytest.mark.parametrize("factors,p", [([2], 2), ([3], 3), ([2, 2], 2), ([4], 2), ([6], 3), ([3], 2)])
def test_mod_p_dimensions_match_independent_oracle(factors, p):
    G = FiniteAbelianGroup(factors)
    ranks = [rank_mod_p(explicit_bar(G, r), p) for r in range(3)]
    for i in range(3):
        dim = G.order ** i - ranks[i] - (ranks[i - 1] if i else 0)
        H = cohomology_bruteforce(G, C(p), i)
        assert H.order() == p ** dim


def test_standard_complex_examples():
    T = standard_complex(FiniteAbelianGroup([]), C(6), 3)
    assert [T.homology_at(i) for i in range(3)] == [C(6), FgAbGroup(), FgAbGroup()]
    S = standard_complex(FiniteAbelianGroup([2]), C(2), 3)
    assert [g.order() for g in S.groups] == [2 ** 2 ** 0, 2 ** 2, 2 ** 4, 2 ** 8]
    S.check()


def test_bruteforce_examples():
    Z2 = FiniteAbelianGroup([2])
    assert cohomology_bruteforce(Z2, C(2), 1) == C(2)
    assert cohomology_bruteforce(Z2, Z, 2) == C(2)
    assert cohomology_bruteforce(FiniteAbelianGroup([2, 2]), C(2), 1) == FgAbGroup.from_orders([2, 2])


def test_closed_form_examples():
    assert cohomology_cyclic_closed(4, C(6), 2) == C(2)
    assert all(cohomology_cyclic_closed(m, Z, i).is_trivial() for m in (2, 3, 5) for i in (1, 3, 5))
    assert cohomology_cyclic_closed(2, C(4), 3) == C(2)
    assert cohomology_rational(FiniteAbelianGroup([6]), 0) == parse_module("Q")
    assert cohomology_rational(FiniteAbelianGroup([6]), 1).is_zero()
    assert cohomology_rational(FiniteAbelianGroup([2, 2]), 3).is_zero()


def hom_count(G, M):
    """|Hom(G, M)| for finite M by enumerating generator images."""
    els = list(itertools.product(*[range(d) for d in M.orders]))
    n = 1
    for m in G.factors:
        n *= sum(1 for x in els if all((m * a) % d == 0 for a, d in zip(x, M.orders)))
    return n


@pytest.mark.parametrize("factors", [[2], [4], [2, 2], [6], [2, 4], [3, 3]])
@pytest.mark.parametrize("M", [C(2), C(4), C(6), FgAbGroup.from_orders([2, 2])])
def test_first_cohomology_is_hom(factors, M):
    G = FiniteAbelianGroup(factors)
    assert cohomology_bruteforce(G, M, 1).order() == hom_count(G, M)


@pytest.mark.parametrize("factors", [[2], [3], [2, 2], [4], [2, 3]])
def test_second_integral_cohomology_is_dual(factors):
    G = FiniteAbelianGroup(factors)
    assert cohomology_bruteforce(G, Z, 2) == G.as_group()


def test_killed_by_group_order():
    for factors in ([2], [3], [2, 2], [4]):
        G = FiniteAbelianGroup(factors)
        for M in (Z, C(6), FgAbGroup.from_orders([0, 4])):
            for i in (1, 2, 3):
                H = cohomology_bruteforce(G, M, i)
                assert all(G.order % d == 0 for d in H.invariant_factors) and H.rank == 0


def test_inflation_examples():
    G4, G2 = FiniteAbelianGroup([4]), FiniteAbelianGroup([2])
    f = GroupMap.reduction(G4, G2)
    assert inflation(f, C(2), 1).is_isomorphism()
    f2 = inflation(f, C(2), 2)
    assert f2.is_zero() and f2.source == C(2) and f2.target == C(2)
    ident = GroupMap.reduction(G2, G2)
    for i in (1, 2, 3):
        g = inflation(ident, C(2), i)
        assert g.is_isomorphism() and g.matrix == g.matrix.identity(g.source.ngens)
    with pytest.raises(NotSurjective):
        inflation(GroupMap(G4, G2, [(0,)]), C(2), 1)


def test_colimit_examples():
    assert profinite_colimit_bruteforce(1, C(2), 5, 2, [2, 4, 8]).is_trivial()
    assert profinite_colimit_bruteforce(1, C(3), 2, 1, [3, 9]) == C(3)
    assert profinite_colimit_bruteforce(2, C(2), 3, 2, [2, 4]) == C(2)
    assert profinite_colimit_bruteforce(1, C(2), 5, 2, [2, 4, 8], method="bar").is_trivial()
    assert profinite_colimit_bruteforce(1, C(3), 2, 1, [3, 9], method="bar") == C(3)


def test_colimit_not_stabilized():
    with pytest.raises(NotStabilized):
        profinite_colimit_bruteforce(1, C(4), 3, 1, [2, 4, 8])
    with pytest.raises(NotStabilized):
        profinite_colimit_bruteforce(1, C(3), 2, 1, [3])
    # every level vanishes here, yet the colimit is Z/2
    with pytest.raises(NotStabilized):
        profinite_colimit_bruteforce(1, C(2), 5, 1, [3, 9])


def test_colimit_report_records_levels():
    rep = profinite_colimit_report(1, C(6), 5, 1, [6, 36, 216])
    assert rep.step == 0 and rep.value == C(6)
    assert rep.groups == [C(6), C(6), C(6)]
    rep2 = profinite_colimit_report(1, C(6), 5, 2, [6, 36, 216])
    assert rep2.value.is_trivial() and rep2.groups[0] == C(6)


def test_closed_form_examples_and_i0():
    assert profinite_closed_form(2, C(5), 3, 2) == parse_module("Z/5")
    assert profinite_closed_form(1, C(9), 3, 1).is_zero()
    assert profinite_closed_form(1, parse_module("Q/Z"), 3, 1) == parse_module("(Q/Z)^(3')")
    assert profinite_closed_form(2, C(6), 2, 0) == SymbolicModule.from_group(C(6))


@pytest.mark.parametrize("r,m", [(1, 2), (1, 4), (1, 6), (2, 2), (2, 3)])
def test_product_model_matches_bar(r, m):
    G = FiniteAbelianGroup([m] * r)
    for M in (Z, C(2), C(6)):
        for i in range(3 if r == 2 else 4):
            assert product_cyclic_cohomology(r, m, M, i) == cohomology_bruteforce(G, M, i)


def test_kunneth_orders():
    for n in (2, 3):
        G = FiniteAbelianGroup([n, n])
        for i in range(4):
            assert cohomology_bruteforce(G, C(n), i).order() == n ** (i + 1)


def test_bar_and_product_colimits_agree():
    for M, p, i, ladder in ((C(2), 3, 1, [2, 4]), (C(2), 3, 2, [2, 4]), (C(3), 2, 1, [3, 9])):
        a = profinite_colimit_bruteforce(1, M, p, i, ladder, method="product")
        b = profinite_colimit_bruteforce(1, M, p, i, ladder, method="bar")
        assert a == b


def test_size_bound(monkeypatch):
    G = FiniteAbelianGroup([6, 6])
    with pytest.raises(SizeBound):
        standard_complex(G, Z, 4)
    monkeypatch.setenv("LOGKFL_SIZE_BOUND", "100")
    with pytest.raises(SizeBound):
        standard_complex(FiniteAbelianGroup([4]), Z, 4)
    assert standard_complex(FiniteAbelianGroup([4]), Z, 4, bound=1000).dims[-1] == 256


def test_closed_form_binomials():
    for r in range(4):
        for i in range(1, r + 2):
            assert profinite_closed_form(r, C(15), 3, i) == SymbolicModule.from_group(C(5)) * comb(r, i)
