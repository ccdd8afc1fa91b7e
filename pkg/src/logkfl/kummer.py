"""Kummer covers of a strictly henselian log point.

The point is modelled by its chart rank ``r`` and residue characteristic
``p``.  For ``n = m p^t`` the cover ``X_n`` has Kummer group
``Gamma_n = (Z/n)^r``; only the prime-to-p quotient ``(Z/m)^r`` has points, the
p-part being infinitesimal.  The ``(d+1)``-fold fibre product of ``X_n`` over
``X`` is ``X_n x H_n^d`` and its components are indexed by ``d``-tuples in
``(Z/m)^r``.

:func:`cech_complex` builds the Cech complex from this nerve directly: a
component is lifted to a point ``(y_0 = 0, y_1, ..., y_d)`` of ``Gamma_n^{d+1}``,
the i-th face forgets ``y_i``, and the component of the result is read off
from consecutive differences modulo ``m``.  The complex is then compared
with the standard complex of ``(Z/m)^r``.
"""

from math import comb

import numpy as np
import scipy.sparse as sp

from .abelian import ScalarComplex, Z
from .coefficients import RATIONAL, SymbolicModule, prime_to_p_sym, twist
from .errors import BadTower
from .groupcoh import (
    FiniteAbelianGroup,
    GroupMap,
    check_size,
    inflation,
    product_cyclic_cohomology,
    standard_complex,
)
from .matrix import IntMatrix


class LogPointModel:
    __slots__ = ("rank", "residue_char")

    def __init__(self, rank, residue_char=0):
        if rank < 0:
            raise ValueError("chart rank must be nonnegative")
        if residue_char < 0 or (residue_char and not _is_prime(residue_char)):
            raise ValueError("residue characteristic must be 0 or a prime")
        self.rank = int(rank)
        self.residue_char = int(residue_char)

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["rank"]), int(d.get("residue_char", 0)))

    def to_dict(self):
        return {"rank": self.rank, "residue_char": self.residue_char}

    def split(self, n):
        """``(m, t)`` with ``n = m p^t`` and ``m`` prime to ``p``."""
        if n < 1:
            raise ValueError("n must be positive")
        p = self.residue_char
        t = 0
        if p:
            while n % p == 0:
                n //= p
                t += 1
        return n, t

    def __repr__(self):
        return "LogPointModel(rank=%d, residue_char=%d)" % (self.rank, self.residue_char)


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class KummerCover:
    __slots__ = ("base", "n", "m", "t")

    def __init__(self, base, n):
        self.base = base
        self.n = n
        self.m, self.t = base.split(n)

    @property
    def p_part(self):
        return self.n // self.m

    def section(self, x):
        """Lift of ``x`` in ``Z/m`` to ``Z/n`` that is zero modulo ``p^t``."""
        m, q = self.m, self.p_part
        if q == 1:
            return x % m
        # CRT: y = x mod m, y = 0 mod q
        return (x * q * pow(q, -1, m)) % self.n if m > 1 else 0


def kummer_group(model, n):
    m, _ = model.split(n)
    return FiniteAbelianGroup([m] * model.rank)


def _nerve_face_matrix(cover, d, shift):
    """``sum_i (-1)^i face_i^*`` from level ``d`` (``d`` group arguments) to ``d+1``.

    ``shift`` is added (times ``m``) to every lifted difference, which selects a
    different lift of the same components.
    """
    r = cover.base.rank
    m, n = cover.m, cover.n
    G = FiniteAbelianGroup([m] * r)
    N = G.order
    nt, ns = N ** (d + 1), N ** d
    if d == 0:
        return IntMatrix.from_csr(sp.csr_matrix((nt, ns), dtype=np.int64))
    digits = G.digits()
    t = np.arange(nt, dtype=np.int64)
    h = np.empty((d + 1, nt), dtype=np.int64)
    rest = t.copy()
    for k in range(d, -1, -1):
        h[k] = rest % N
        rest //= N
    # lift to Gamma_n and integrate: y_0 = 0, y_j = y_{j-1} + lift(h_j)
    lift = np.vectorize(cover.section, otypes=[np.int64])
    lifted = (lift(digits) + shift * m) % n if r else digits
    y = np.zeros((d + 2, nt, r), dtype=np.int64)
    for j in range(d + 1):
        y[j + 1] = (y[j] + lifted[h[j]]) % n
    rows, cols, vals = [], [], []
    for i in range(d + 2):
        keep = [j for j in range(d + 2) if j != i]
        src = np.zeros(nt, dtype=np.int64)
        for a, b in zip(keep, keep[1:]):
            diff = (y[b] - y[a]) % n % m
            idx = np.zeros(nt, dtype=np.int64)
            for k in range(r):
                idx = idx * m + diff[:, k]
            src = src * N + idx
        rows.append(t)
        cols.append(src)
        vals.append(np.full(nt, -1 if i % 2 else 1, dtype=np.int64))
    mat = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(nt, ns)).tocsr()
    mat.sum_duplicates()
    return IntMatrix.from_csr(mat)


def cech_complex(model, n, M, degree_max, bound=None):
    """Cech complex of ``X_n/X`` with coefficients ``M``, built from the nerve.

    Raises ``AssertionError`` if it differs from the standard complex of
    ``H_m(X) = (Z/m)^r`` in any term or differential, or if the result depends
    on the chosen lift.
    """
    cover = KummerCover(model, n)
    G = kummer_group(model, n)
    check_size(G, M, degree_max, bound)
    diffs = []
    for d in range(degree_max):
        D = _nerve_face_matrix(cover, d, 0)
        if cover.p_part > 1 and model.rank:
            assert D == _nerve_face_matrix(cover, d, 1), "Cech differential depends on the lift"
        diffs.append(D)
    C = ScalarComplex(diffs, [G.order ** d for d in range(degree_max + 1)], M, check=False)
    S = standard_complex(G, M, degree_max, bound)
    assert C.groups == S.groups, "Cech terms differ from the standard complex"
    for d in range(degree_max):
        assert C.integer_differential(d) == S.integer_differential(d), \
            "Cech differential %d differs from the standard complex" % d
    return C


NERVE_HOMOLOGY_LIMIT = 1 << 15


def cech_cohomology(model, n, M, i, bound=None, method="auto"):
    """``H^i(X_n/X, M)``.

    The Cech complex is always built and checked against the standard complex.
    With ``method="nerve"`` its homology is computed directly; with ``"product"``
    it is read from the small product-of-periodic-resolutions complex of
    ``(Z/m)^r``, which has the same cohomology.  ``"auto"`` uses the nerve
    unless the top cochain group exceeds ``NERVE_HOMOLOGY_LIMIT``.
    """
    if method not in ("auto", "nerve", "product"):
        raise ValueError("unknown method %r" % method)
    C = cech_complex(model, n, M, i + 1, bound)
    if method == "auto":
        method = "nerve" if C.dims[i + 1] <= NERVE_HOMOLOGY_LIMIT else "product"
    if method == "nerve":
        return C.homology_at(i)
    m, _ = model.split(n)
    return product_cyclic_cohomology(model.rank, m, M, i)


def cech_cohomology_rational(model, n, i, bound=None, method="auto"):
    """``H^i(X_n/X, Q)``, which is ``H^i(X_n/X, Z) (x) Q`` since ``Q`` is flat."""
    H = cech_cohomology(model, n, Z, i, bound, method)
    return SymbolicModule.atom(RATIONAL, mult=H.rank)


def cech_cohomology_tower_map(model, m, n, M, i, bound=None):
    """``H^i(X_m/X, M) -> H^i(X_n/X, M)`` for ``m`` the prime-to-p part of ``n``.

    On Kummer groups the refinement ``X_n -> X_m`` restricts characters from
    ``Gamma_n`` to ``Gamma_m = p^t Gamma_n``, which on ``(Z/m)^r`` is
    multiplication by ``p^t``; the returned map is induced by it.
    """
    mm, t = model.split(n)
    if mm != m:
        raise BadTower("%d is not the prime-to-%d part of %d" % (m, model.residue_char, n))
    G = kummer_group(model, n)
    r = model.rank
    q = (model.residue_char ** t) if t else 1
    f = GroupMap(G, G, [tuple(q if a == b else 0 for b in range(r)) for a in range(r)])
    return inflation(f, M, i, bound)


def cech_colimit(model, M, i):
    """``colim_n H^i(X_n/X, M) = M'(-i)^{binom(r, i)}`` for torsion ``M`` and ``i >= 1``."""
    if i < 1:
        raise ValueError("the colimit formula is stated for i >= 1")
    if not isinstance(M, SymbolicModule):
        M = SymbolicModule.from_group(M)
    if not M.is_torsion():
        raise ValueError("the colimit formula needs a torsion module")
    return twist(prime_to_p_sym(M, model.residue_char), -i) * comb(model.rank, i)
