"""Compiled versus pure-Python elimination kernel.

Times ``unit_eliminate`` on the coboundary matrices the package actually
builds (bar complexes of small abelian groups) and on random sparse integer
matrices, in integer mode and modulo a prime power.  Both backends must give
the same pivot count and residual; the script exits nonzero otherwise.

    python benchmarks/bench_kernels.py [--repeat N] [--quick]
"""

import argparse
import sys
import time

import numpy as np
import scipy.sparse as sp

from logkfl import kernels
from logkfl.groupcoh import FiniteAbelianGroup, bar_differential


def bar_workloads(quick):
    cases = [([6], 3), ([2, 2], 3), ([4], 4), ([3, 3], 2)]
    if not quick:
        cases += [([2, 2, 2], 3), ([4, 4], 2), ([12], 3), ([5, 5], 2)]
    for factors, r in cases:
        G = FiniteAbelianGroup(factors)
        A = bar_differential(G, r)
        name = "bar d%d (Z/%s)" % (r, ",Z/".join(map(str, factors)))
        yield name, A.sparse_rows(), A.cols


def random_workloads(quick, seed=0):
    rng = np.random.default_rng(seed)
    sizes = [(400, 300, 0.02), (1500, 1000, 0.004)]
    if not quick:
        sizes.append((3000, 2000, 0.002))
    for rows, cols, density in sizes:
        M = sp.random(rows, cols, density=density, random_state=rng, format="csr",
                      data_rvs=lambda n: rng.choice([-2, -1, 1, 1, 2, 3], size=n))
        M = M.astype(np.int64)
        M.eliminate_zeros()
        M.sort_indices()
        yield "random %dx%d" % (rows, cols), (M.indptr, M.indices, M.data), cols


def time_backend(backend, triple, ncols, modulus, prime, repeat):
    indptr, indices, data = triple
    if modulus:
        data = np.mod(np.asarray(data, dtype=np.int64), modulus)
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kernels.unit_eliminate(indptr, indices, data, ncols, modulus, prime, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def overflows(triple, ncols, modulus, prime):
    """True when the compiled kernel gives up in 64-bit arithmetic."""
    indptr, indices, data = triple
    if modulus:
        data = np.mod(np.asarray(data, dtype=np.int64), modulus)
    try:
        kernels._compiled.unit_eliminate(indptr, indices, data, ncols, modulus, prime)
    except OverflowError:
        return True
    return False


def normalize(out):
    k, ri, rx, rd = out
    return k, list(map(int, ri)), list(map(int, rx)), list(map(int, rd))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)

    if kernels._compiled is None:
        print("compiled extension not available; build with pip install -e . --no-build-isolation")
        return 1

    workloads = list(bar_workloads(args.quick)) + list(random_workloads(args.quick))
    modes = [("Z", 0, 0), ("Z/8", 8, 2), ("Z/9", 9, 3)]
    print("%-26s %-4s %7s %8s %11s %11s %8s" % ("matrix", "ring", "rows", "nnz", "python [s]",
                                               "compiled [s]", "speedup"))
    ok = True
    for name, triple, ncols in workloads:
        nrows, nnz = len(triple[0]) - 1, len(triple[2])
        for ring, modulus, prime in modes:
            tp, op = time_backend("python", triple, ncols, modulus, prime, args.repeat)
            tc, oc = time_backend("compiled", triple, ncols, modulus, prime, args.repeat)
            same = normalize(op) == normalize(oc)
            ok &= same
            note = "" if same else "  MISMATCH"
            if overflows(triple, ncols, modulus, prime):
                note += "  (int64 overflow, retried in Python)"
            print("%-26s %-4s %7d %8d %11.4f %11.4f %7.1fx%s" % (
                name, ring, nrows, nnz, tp, tc, tp / tc if tc else float("inf"), note))
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
