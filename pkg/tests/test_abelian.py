import itertools
import random
from math import comb, gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logkfl.abelian import (
    ZERO,
    ChainComplex,
    FgAbGroup,
    Homomorphism,
    Z,
    direct_sum,
    exterior_power,
    group_from_presentation,
    hom,
    n_torsion,
    tensor,
    torsion_decompose,
)
from logkfl.errors import NonFreeGroup, NotAComplex
from logkfl.matrix import IntMatrix

orders = st.lists(st.sampled_from([0, 2, 3, 4, 5, 6, 8, 9, 12]), max_size=4)
groups = orders.map(FgAbGroup.from_orders)


def cyclic_pairs_order(G, H, op):
    """Order of tensor or hom from the gcd rule on cyclic summands (None if infinite)."""
    n = 1
    for a in G.orders:
        for b in H.orders:
            if a == 0 and b == 0:
                return None
            if a == 0:
                n *= b
            elif b == 0:
                n *= a if op == "tensor" else 1
            else:
                n *= gcd(a, b)
    return n


def test_presentation_examples():
    assert group_from_presentation(IntMatrix.from_rows([[2, 0], [0, 3]])) == FgAbGroup(0, [6])
    assert group_from_presentation(IntMatrix(0, 2), 2) == FgAbGroup.free(2)
    assert group_from_presentation(IntMatrix.identity(2)).is_trivial()


def test_operation_examples():
    assert tensor(FgAbGroup.cyclic(6), FgAbGroup.cyclic(4)) == FgAbGroup.cyclic(2)
    assert hom(FgAbGroup.cyclic(6), FgAbGroup.cyclic(4)) == FgAbGroup.cyclic(2)
    G = FgAbGroup.from_orders([0, 4, 6])
    assert tensor(Z, G) == G
    assert exterior_power(FgAbGroup.free(3), 2) == FgAbGroup.free(3)
    assert exterior_power(FgAbGroup.free(2), 3).is_trivial()
    with pytest.raises(NonFreeGroup):
        exterior_power(FgAbGroup.cyclic(4), 2)
    assert n_torsion(FgAbGroup.cyclic(12), 4) == FgAbGroup.cyclic(4)
    assert n_torsion(FgAbGroup.free(2), 5).is_trivial()
    rank, parts = torsion_decompose(FgAbGroup.from_orders([0, 12]))
    assert rank == 1 and parts == {2: [FgAbGroup.cyclic(4)], 3: [FgAbGroup.cyclic(3)]}


def test_normal_form_and_serialization():
    G = FgAbGroup.from_orders([4, 6, 0, 1])
    assert (G.rank, G.invariant_factors) == (1, (2, 12))
    assert FgAbGroup.from_dict(G.to_dict()) == G
    assert str(G) == "Z + Z/2 + Z/12" and str(ZERO) == "0"
    with pytest.raises(ValueError):
        FgAbGroup(0, [4, 6])


@given(groups, groups, groups)
@settings(max_examples=60, deadline=None)
def test_bilinearity(G, G2, H):
    assert tensor(direct_sum(G, G2), H) == direct_sum(tensor(G, H), tensor(G2, H))
    assert hom(direct_sum(G, G2), H) == direct_sum(hom(G, H), hom(G2, H))


@given(groups, groups)
@settings(max_examples=60, deadline=None)
def test_tensor_and_hom_orders(G, H):
    assert tensor(G, H).order() == cyclic_pairs_order(G, H, "tensor")
    assert hom(G, H).order() == cyclic_pairs_order(G, H, "hom")


@given(orders, st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_canonical_under_change_of_basis(ords, seed):
    rng = random.Random(seed)
    k = len(ords)
    R = IntMatrix.diagonal(ords) if k else IntMatrix(0, 0)
    # random unimodular matrices by elementary operations
    P, Q = IntMatrix.identity(k).tolist(), IntMatrix.identity(k).tolist()
    for M in (P, Q):
        for _ in range(3 * k):
            i, j = rng.sample(range(k), 2) if k > 1 else (0, 0)
            if i != j:
                c = rng.randint(-3, 3)
                for t in range(k):
                    M[i][t] += c * M[j][t]
    if k:
        R = IntMatrix.from_rows(P) @ R @ IntMatrix.from_rows(Q)
    assert group_from_presentation(R, k) == FgAbGroup.from_orders(ords)


def elements(G):
    return itertools.product(*[range(d) for d in G.orders])


def small_finite_groups():
    return [FgAbGroup.from_orders(o) for o in ([2], [4], [2, 2], [6], [2, 4], [3, 3])]


def test_kernel_image_by_enumeration():
    rng = random.Random(1)
    for G in small_finite_groups():
        for H in small_finite_groups():
            for _ in range(4):
                cols = []
                for d in G.orders:
                    # a generator of order d must go to an element killed by d
                    cands = [x for x in elements(H) if all((d * a) % e == 0 for a, e in zip(x, H.orders))]
                    cols.append(rng.choice(cands))
                f = Homomorphism(G, H, [[c[k] for c in cols] for k in range(H.ngens)])
                imgs = set()
                ker = 0
                for x in elements(G):
                    y = tuple(sum(f.matrix[k, j] * x[j] for j in range(G.ngens)) % H.orders[k]
                              for k in range(H.ngens))
                    imgs.add(y)
                    ker += not any(y)
                assert f.kernel().order() == ker
                assert f.image().order() == len(imgs)
                assert f.cokernel().order() == H.order() // len(imgs)


def test_homology_examples():
    two = Homomorphism(Z, Z, [[2]])
    C = ChainComplex([Z, Z, ZERO], [two, Homomorphism.zero(Z, ZERO)])
    assert C.homology_at(1) == FgAbGroup.cyclic(2)
    assert C.homology_at(0).is_trivial()
    C0 = ChainComplex([ZERO, ZERO], [Homomorphism.zero(ZERO, ZERO)])
    assert all(C0.homology_at(i).is_trivial() for i in range(2))
    C1 = ChainComplex([Z, Z], [Homomorphism.zero(Z, Z)])
    assert C1.homology_at(0) == Z
    with pytest.raises(NotAComplex):
        ChainComplex([Z, Z, Z], [Homomorphism(Z, Z, [[1]]), Homomorphism(Z, Z, [[1]])])


@given(groups)
@settings(max_examples=30, deadline=None)
def test_concentrated_complex(G):
    C = ChainComplex([ZERO, G, ZERO], [Homomorphism.zero(ZERO, G), Homomorphism.zero(G, ZERO)])
    assert C.homology_at(1) == G


def test_exterior_ranks():
    for n in range(6):
        for i in range(n + 2):
            assert exterior_power(FgAbGroup.free(n), i) == FgAbGroup.free(comb(n, i))


def test_ill_defined_map_rejected():
    with pytest.raises(ValueError):
        Homomorphism(FgAbGroup.cyclic(2), FgAbGroup.cyclic(3), [[1]])
    with pytest.raises(ValueError):
        Homomorphism(FgAbGroup.cyclic(2), Z, [[1]])
