"""Invariant suites run by ``logkfl verify``.

Each suite is a short, seeded sweep returning ``(name, ok, detail)`` records.
They are fast smoke checks; the test suite covers the same ground in depth.
"""

import random
from itertools import combinations
from math import comb, gcd

from .abelian import FgAbGroup, Homomorphism, Z, exterior_power, hom, tensor
from .calculators import (
    COMPUTED,
    PAPER,
    check_les_exactness,
    dvr_calculator,
    zhat_cohomology,
)
from .coefficients import SymbolicModule, ZhatModule, frobenius_kernel_cokernel
from .direct_images import (
    BaseDescription,
    SheafSpec,
    higher_direct_image,
    lattice_level_via_finite,
    torsion_of_image,
)
from .groupcoh import (
    FiniteAbelianGroup,
    GroupMap,
    cohomology_bruteforce,
    cohomology_cyclic_closed,
    inflation,
    product_cyclic_cohomology,
    profinite_closed_form,
    profinite_colimit_bruteforce,
)
from .kummer import LogPointModel, cech_cohomology, cech_complex
from .matrix import IntMatrix, determinant, snf


def _minor_gcd(a, k):
    rows, cols = len(a), len(a[0]) if a else 0
    g = 0
    for rs in combinations(range(rows), k):
        for cs in combinations(range(cols), k):
            g = gcd(g, determinant(IntMatrix.from_rows([[a[r][c] for c in cs] for r in rs])))
    return g


def suite_abelian(seed=0, count=40):
    rng = random.Random(seed)
    out = []
    bad = 0
    for _ in range(count):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        a = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        A = IntMatrix.from_rows(a)
        res = snf(A)
        d = [x for x in res.diag if x]
        ok = (res.U @ A @ res.V == res.D and abs(determinant(res.U)) == 1
              and abs(determinant(res.V)) == 1 and all(d[k + 1] % d[k] == 0 for k in range(len(d) - 1)))
        prod = 1
        for k in range(1, min(r, c) + 1):
            prod *= res.diag[k - 1]
            ok = ok and prod == _minor_gcd(a, k)
        bad += not ok
    out.append(("snf soundness", bad == 0, "%d/%d failures" % (bad, count)))
    G, H = FgAbGroup.from_orders([4, 6, 0]), FgAbGroup.from_orders([2, 0])
    out.append(("tensor order", tensor(G, H) == FgAbGroup.from_orders([2, 2, 2, 4, 6, 0]),
                str(tensor(G, H))))
    out.append(("hom", hom(FgAbGroup.from_orders([4, 6]), FgAbGroup.cyclic(8))
                == FgAbGroup.from_orders([2, 4]), ""))
    out.append(("exterior rank", all(exterior_power(FgAbGroup.free(4), i).rank == comb(4, i)
                                     for i in range(5)), ""))
    f = Homomorphism(Z, Z, IntMatrix.from_rows([[6]]))
    out.append(("kernel/cokernel", f.kernel().is_trivial() and f.cokernel() == FgAbGroup.cyclic(6), ""))
    return out


def suite_coefficients(seed=0, count=20):
    rng = random.Random(seed)
    bad = 0
    for _ in range(count):
        n = rng.choice([2, 3, 4, 5, 8, 9])
        q = rng.choice([2, 3, 4, 5, 7, 8, 9, 11])
        w = rng.randint(-2, 2)
        if gcd(n, q) != 1 and w:
            continue
        h0, h1 = frobenius_kernel_cokernel(ZhatModule(FgAbGroup.cyclic(n), None, w, q))
        fixed = sum(1 for x in range(n) if x * pow(q, w, n) % n == x)
        bad += not (h0.order() == h1.order() == fixed)
    return [("zhat |H0| = |H1| = #fixed", bad == 0, "%d failures" % bad)]


def suite_groupcoh():
    out = []
    coeffs = [Z, FgAbGroup.cyclic(2), FgAbGroup.cyclic(6), FgAbGroup.from_orders([2, 0])]
    bad = [(m, str(M), i) for m in (2, 3, 4) for M in coeffs for i in range(4)
           if cohomology_bruteforce(FiniteAbelianGroup([m]), M, i) != cohomology_cyclic_closed(m, M, i)]
    out.append(("cyclic oracle", not bad, str(bad)))
    orders = [cohomology_bruteforce(FiniteAbelianGroup([2, 2]), FgAbGroup.cyclic(2), i).order() for i in range(3)]
    out.append(("kunneth orders", orders == [2, 4, 8], str(orders)))
    G4, G2 = FiniteAbelianGroup([4]), FiniteAbelianGroup([2])
    f = GroupMap.reduction(G4, G2)
    M = FgAbGroup.cyclic(2)
    out.append(("inflation", inflation(f, M, 1).is_isomorphism() and inflation(f, M, 2).is_zero(), ""))
    bad = []
    for r in (1, 2):
        for p in (2, 3):
            for i in (1, 2):
                got = SymbolicModule.from_group(profinite_colimit_bruteforce(r, FgAbGroup.cyclic(6), p, i))
                if got != profinite_closed_form(r, FgAbGroup.cyclic(6), p, i):
                    bad.append((r, p, i))
    out.append(("colimit closed form", not bad, str(bad)))
    return out


def suite_kummer():
    out = []
    bad = []
    for r in (1, 2):
        for p in (2, 3):
            for n in range(1, 5):
                try:
                    cech_complex(LogPointModel(r, p), n, Z, 2)
                except AssertionError as e:
                    bad.append((r, p, n, str(e)))
    out.append(("cech = standard", not bad, str(bad)))
    mdl = LogPointModel(2, 2)
    h = [cech_cohomology(mdl, 6, Z, i) for i in (1, 2)]
    out.append(("cech H^1, H^2 over Z", h[0].is_trivial() and h[1] == FgAbGroup.from_orders([3, 3]),
                ", ".join(map(str, h))))
    same = all(cech_cohomology(mdl, 3, Z, i, method="nerve") == product_cyclic_cohomology(2, 3, Z, i)
               for i in (1, 2))
    out.append(("nerve and product routes agree", same, ""))
    return out


def suite_direct_images():
    bases = [BaseDescription.log_trait(2, 2), BaseDescription.dedekind([(2, 4), (3, 3), (5, 5)])]
    ok = True
    for base in bases:
        for i in (2, 3):
            for l in (2, 3, 5):
                for k in (1, 2):
                    ok = ok and (torsion_of_image(higher_direct_image(base, SheafSpec.lattice(2), i), l ** k)
                                 == lattice_level_via_finite(base, 2, i, l, k))
        ok = ok and higher_direct_image(base, SheafSpec.lattice(3), 1).is_zero()
        ok = ok and all(higher_direct_image(base, SheafSpec.rational(2), i).is_zero() for i in (1, 2, 3))
    return [("lattice coherence and vanishing", ok, "")]


def suite_calculators():
    out = []
    cases = [(q, F) for q in (2, 3, 4, 5, 7, 9)
             for F in (SheafSpec.finite(3, 3), SheafSpec.finite(3, 9), SheafSpec.finite(2, 4),
                       SheafSpec.lattice(1), SheafSpec.rational(1))]
    exact = coherent = deg0 = True
    for q, F in cases:
        comp = dvr_calculator(q, F, mode=COMPUTED)
        paper = dvr_calculator(q, F, mode=PAPER)
        exact = exact and check_les_exactness(comp.les)
        if not comp.diagnostics:
            coherent = coherent and comp.entries == paper.entries
        deg0 = deg0 and comp[0] == zhat_cohomology(F.sections(), q)[0]
    out.append(("les exactness", exact, ""))
    out.append(("mode coherence", coherent, ""))
    out.append(("degree 0 is invariants", deg0, ""))
    return out


SUITES = {
    "abelian-core": suite_abelian,
    "coefficients": suite_coefficients,
    "group-cohomology": suite_groupcoh,
    "kummer-cech": suite_kummer,
    "direct-images": suite_direct_images,
    "calculators": suite_calculators,
}


def run_all(names=None):
    """``{suite: [(name, ok, detail)]}`` for the requested suites (default: all)."""
    names = list(SUITES) if names is None else list(names)
    return {name: SUITES[name]() for name in names}
