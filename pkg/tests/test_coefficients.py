import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logkfl.abelian import FgAbGroup, Z
from logkfl.coefficients import (
    FINITE,
    PRIMARY,
    PRIME_TO_P,
    QMODZ,
    RATIONAL,
    SymbolicModule,
    ZERO_MODULE,
    ZhatModule,
    frobenius_kernel_cokernel,
    n_torsion_sym,
    p_primary_sym,
    parse_module,
    prime_to_p_sym,
    tensor_sym,
    twist,
)
from logkfl.errors import NonInvertibleTwist, UnsupportedModule, UnsupportedTensor


def test_twist_examples():
    M = SymbolicModule.from_group(FgAbGroup.cyclic(5))
    assert twist(M, -1) == parse_module("Z/5(-1)")
    assert twist(M, 0) == M
    assert twist(parse_module("Q_3/Z_3(-1)"), -1) == parse_module("Q_3/Z_3(-2)")


def test_tensor_examples():
    assert tensor_sym(parse_module("Q_3/Z_3"), FgAbGroup.cyclic(18)) == parse_module("Z/9")
    assert tensor_sym(parse_module("Q"), FgAbGroup.cyclic(5)).is_zero()
    assert tensor_sym(parse_module("(Q/Z)^(2')(-1)"), FgAbGroup.free(2)) == parse_module("(Q/Z)^(2')(-1)^2")
    with pytest.raises(UnsupportedTensor):
        tensor_sym(parse_module("Q/Z"), parse_module("Q"))


def test_torsion_examples():
    assert n_torsion_sym(parse_module("Q/Z"), 6) == parse_module("Z/6")
    assert prime_to_p_sym(parse_module("Q/Z"), 3) == SymbolicModule.atom(PRIME_TO_P, 3)
    assert p_primary_sym(parse_module("Z/12(-1)"), 2) == parse_module("Z/4(-1)")
    assert n_torsion_sym(parse_module("(Q/Z)^(3')"), 12) == parse_module("Z/4")
    assert prime_to_p_sym(parse_module("(Q/Z)^(3')"), 3) == parse_module("(Q/Z)^(3')")


modules = st.lists(st.sampled_from(["Z", "Q", "Z/2", "Z/3(-1)", "Z/12", "Q/Z", "Q_5/Z_5(-2)", "(Q/Z)^(3')(-1)"]),
                   max_size=4).map(lambda xs: parse_module(" + ".join(xs)) if xs else ZERO_MODULE)


@given(modules)
@settings(max_examples=60, deadline=None)
def test_tensor_units(M):
    assert tensor_sym(M, Z) == M
    assert tensor_sym(M, FgAbGroup()).is_zero()


@given(modules, st.sampled_from([(2, 3), (4, 9), (5, 8), (3, 7), (1, 6)]))
@settings(max_examples=60, deadline=None)
def test_torsion_crt(M, ab):
    a, b = ab
    assert n_torsion_sym(M, a * b) == n_torsion_sym(M, a) + n_torsion_sym(M, b)


@given(modules)
@settings(max_examples=40, deadline=None)
def test_string_round_trip(M):
    assert parse_module(str(M)) == M
    assert SymbolicModule.from_list(M.to_list()) == M


def test_multiple_of_qmodz_parses():
    assert parse_module("(Q/Z)^2") == SymbolicModule.atom(QMODZ, mult=2)
    assert parse_module("(Q/Z)^(2')^3") == parse_module("((Q/Z)^(2'))^3")


def test_canonical_merges():
    assert parse_module("(Q/Z)^(3') + Q_3/Z_3") == SymbolicModule.atom(QMODZ)
    assert parse_module("Z/2 + Z/3") == parse_module("Z/6")
    assert parse_module("Z/2(-1) + Z/3") != parse_module("Z/6")
    assert parse_module("Q_2/Z_2 + Q_2/Z_2") == SymbolicModule.atom(PRIMARY, 2, mult=2)


def enumerate_frobenius(n, w, q):
    """Kernel and cokernel orders of ``x -> q^w x - x`` on Z/n by enumeration."""
    c = pow(q, w, n) if n > 1 else 0
    images = {(c * x - x) % n for x in range(n)}
    kernel = sum(1 for x in range(n) if (c * x - x) % n == 0)
    return kernel, n // len(images)


def test_frobenius_against_enumeration():
    from math import gcd
    for n in range(2, 51):
        for w in range(-2, 3):
            for q in (2, 3, 4, 5, 7, 9):
                M = ZhatModule(FgAbGroup.cyclic(n), None, w, q)
                if w < 0 and gcd(n, q) != 1:
                    with pytest.raises(NonInvertibleTwist):
                        frobenius_kernel_cokernel(M)
                    continue
                h0, h1 = frobenius_kernel_cokernel(M)
                assert (h0.order(), h1.order()) == enumerate_frobenius(n, w, q)
                assert h0 == FgAbGroup.cyclic(h0.order()) and h0.order() == h1.order()


def test_frobenius_examples():
    assert frobenius_kernel_cokernel(ZhatModule(FgAbGroup.cyclic(9), None, -1, 7)) == (
        FgAbGroup.cyclic(3), FgAbGroup.cyclic(3))
    h0, h1 = frobenius_kernel_cokernel(ZhatModule(FgAbGroup.cyclic(9), None, -1, 2))
    assert h0.is_trivial() and h1.is_trivial()


def test_explicit_frobenius_matrix():
    G = FgAbGroup.from_orders([3, 3])
    M = ZhatModule(G, [[0, 1], [1, 0]], 0, 4)
    h0, h1 = frobenius_kernel_cokernel(M)
    fixed = sum(1 for x, y in itertools.product(range(3), repeat=2) if (y, x) == (x, y))
    assert h0.order() == fixed == h1.order()


def test_module_validation():
    with pytest.raises(UnsupportedModule):
        ZhatModule(Z, None, -1, 5)
    with pytest.raises(ValueError):
        ZhatModule(FgAbGroup.cyclic(3), None, 0, 6)
    with pytest.raises(ValueError):
        parse_module("Z/")
    with pytest.raises(ValueError):
        parse_module("(Q/Z)'")
    assert parse_module("(Q/Z)'", 5) == SymbolicModule.atom(PRIME_TO_P, 5)
    assert SymbolicModule.atom(RATIONAL).order() is None
    assert SymbolicModule.atom(FINITE, 4, mult=2).order() == 16
