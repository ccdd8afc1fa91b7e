"""Cohomology of finite abelian groups with trivial coefficients.

The engine is the inhomogeneous standard complex ``C^r = Map(G^r, M)`` with
``d = sum_i (-1)^i d_i``, where ``d_0`` drops the first argument, ``d_i``
(``0 < i < r+1``) adds arguments ``i`` and ``i+1`` and the last face drops the
final argument.  Cochains on ``G^r`` are indexed in lexicographic order of
``r``-tuples of group elements, elements in lexicographic order of their
residue vectors.

For colimits over ``(Z/m)^r`` a much smaller complex is used as well: the
tensor product of the 2-periodic resolutions of the cyclic factors.  Its
inflation maps are diagonal (see :func:`product_cyclic_inflation`).
"""

import itertools
import os
from math import comb, gcd, prod

import numpy as np
import scipy.sparse as sp

from .abelian import FgAbGroup, Homomorphism, ScalarComplex, induced_map, n_torsion
from .coefficients import RATIONAL, SymbolicModule, prime_to_p_sym, ZERO_MODULE
from .errors import NotStabilized, NotSurjective, SizeBound
from .matrix import IntMatrix, factorize

DEFAULT_SIZE_BOUND = 1 << 20


def size_bound(value=None):
    """The complex-size bound in force: explicit value, ``LOGKFL_SIZE_BOUND``, or the default."""
    if value is not None:
        return int(value)
    env = os.environ.get("LOGKFL_SIZE_BOUND")
    return int(env) if env else DEFAULT_SIZE_BOUND


class FiniteAbelianGroup:
    """``Z/m_1 + ... + Z/m_s`` with elements as residue tuples."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        factors = tuple(int(m) for m in factors)
        if any(m < 1 for m in factors):
            raise ValueError("moduli must be positive")
        self.factors = factors

    @property
    def order(self):
        return prod(self.factors)

    def elements(self):
        return list(itertools.product(*[range(m) for m in self.factors]))

    def index(self, x):
        i = 0
        for v, m in zip(x, self.factors):
            i = i * m + (v % m)
        return i

    def digits(self):
        """``(order, s)`` array: residues of every element in enumeration order."""
        n = self.order
        out = np.zeros((n, len(self.factors)), dtype=np.int64)
        idx = np.arange(n, dtype=np.int64)
        for k in range(len(self.factors) - 1, -1, -1):
            m = self.factors[k]
            out[:, k] = idx % m
            idx //= m
        return out

    def add_table(self):
        d = self.digits()
        n = self.order
        s = (d[:, None, :] + d[None, :, :]) % np.array(self.factors, dtype=np.int64)
        table = np.zeros((n, n), dtype=np.int64)
        for k, m in enumerate(self.factors):
            table = table * m + s[:, :, k]
        return table

    def as_group(self):
        return FgAbGroup.from_orders(self.factors)

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return "FiniteAbelianGroup(%r)" % (self.factors,)

    def __str__(self):
        return " x ".join("Z/%d" % m for m in self.factors) or "1"


def _as_finite_group(G):
    if isinstance(G, FiniteAbelianGroup):
        return G
    if isinstance(G, int):
        return FiniteAbelianGroup([G])
    return FiniteAbelianGroup(G)


def bar_differential(G, r):
    """Integer matrix of ``d^r: Map(G^r, Z) -> Map(G^{r+1}, Z)`` (shape ``N^{r+1} x N^r``)."""
    G = _as_finite_group(G)
    N = G.order
    nt = N ** (r + 1)
    ns = N ** r
    if r == 0:
        # d^0 f (h) = f() - f() = 0
        return IntMatrix.from_csr(sp.csr_matrix((nt, ns), dtype=np.int64))
    t = np.arange(nt, dtype=np.int64)
    # digits h_1..h_{r+1}, h_1 most significant
    h = np.empty((r + 1, nt), dtype=np.int64)
    rest = t.copy()
    for k in range(r, -1, -1):
        h[k] = rest % N
        rest //= N
    table = G.add_table()
    rows, cols, vals = [], [], []
    # face 0: f(h_2, ..., h_{r+1})
    rows.append(t)
    cols.append(t % ns)
    vals.append(np.ones(nt, dtype=np.int64))
    for i in range(1, r + 1):
        src = np.zeros(nt, dtype=np.int64)
        for k in range(r + 1):
            if k == i - 1:
                digit = table[h[i - 1], h[i]]
            elif k == i:
                continue
            else:
                digit = h[k]
            src = src * N + digit
        rows.append(t)
        cols.append(src)
        vals.append(np.full(nt, -1 if i % 2 else 1, dtype=np.int64))
    # last face: f(h_1, ..., h_r)
    rows.append(t)
    cols.append(t // N)
    vals.append(np.full(nt, -1 if (r + 1) % 2 else 1, dtype=np.int64))
    m = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nt, ns)).tocsr()
    m.sum_duplicates()
    return IntMatrix.from_csr(m)


def check_size(G, M, degree_max, bound=None):
    G = _as_finite_group(G)
    entries = G.order ** degree_max * max(M.ngens, 1)
    limit = size_bound(bound)
    if entries > limit:
        raise SizeBound("complex of size %d exceeds the bound %d (|G|=%d, degree %d, %d generators)"
                        % (entries, limit, G.order, degree_max, M.ngens))


def standard_complex(G, M, degree_max, bound=None):
    """``Map(G^r, M)`` for ``0 <= r <= degree_max`` as a :class:`ScalarComplex`."""
    G = _as_finite_group(G)
    if degree_max < 0:
        raise ValueError("degree_max must be nonnegative")
    check_size(G, M, degree_max, bound)
    N = G.order
    diffs = [bar_differential(G, r) for r in range(degree_max)]
    return ScalarComplex(diffs, [N ** r for r in range(degree_max + 1)], M, check=False)


def cohomology_bruteforce(G, M, i, bound=None):
    if i < 0:
        raise ValueError("negative degree")
    return standard_complex(G, M, i + 1, bound).homology_at(i)


def cohomology_cyclic_closed(m, M, i):
    """``H^i(Z/m, M)`` for trivial ``M``: ``M``, then ``M[m]`` and ``M/mM`` alternating."""
    if m < 1:
        raise ValueError("m must be positive")
    if i < 0:
        raise ValueError("negative degree")
    if i == 0:
        return M
    if i % 2:
        return n_torsion(M, m)
    return FgAbGroup.from_orders([gcd(d, m) for d in M.invariant_factors] + [m] * M.rank)


def cohomology_rational(G, i):
    """``H^i(G, Q)`` of a finite group: ``Q`` in degree 0, zero above."""
    if i < 0:
        raise ValueError("negative degree")
    return SymbolicModule.atom(RATIONAL) if i == 0 else ZERO_MODULE


# inflation along surjections

class GroupMap:
    """Homomorphism between finite abelian groups given on the standard generators.

    ``images[j]`` is the residue tuple of the image of the j-th generator.
    """

    def __init__(self, source, target, images):
        self.source = _as_finite_group(source)
        self.target = _as_finite_group(target)
        self.images = [tuple(int(v) % m for v, m in zip(img, self.target.factors)) for img in images]
        if len(self.images) != len(self.source.factors):
            raise ValueError("one image per source generator is required")
        for img, m in zip(self.images, self.source.factors):
            if any((m * v) % t for v, t in zip(img, self.target.factors)):
                raise ValueError("image %r is not killed by %d" % (img, m))

    @classmethod
    def reduction(cls, source, target):
        """The coordinatewise reduction ``prod Z/m'_j -> prod Z/m_j``."""
        source, target = _as_finite_group(source), _as_finite_group(target)
        k = len(source.factors)
        return cls(source, target, [tuple(int(a == b) for b in range(k)) for a in range(k)])

    def element_map(self):
        """Index of the image of every source element."""
        d = self.source.digits()
        T = self.target.factors
        idx = np.zeros(self.source.order, dtype=np.int64)
        for k, m in enumerate(T):
            coord = np.zeros(self.source.order, dtype=np.int64)
            for j, img in enumerate(self.images):
                coord += d[:, j] * img[k]
            idx = idx * m + coord % m
        return idx

    def is_surjective(self):
        return len(set(self.element_map().tolist())) == self.target.order


def cochain_pullback(f, r):
    """``Map(G^r, Z) -> Map(G'^r, Z)``, precomposition with ``f^r``."""
    phi = f.element_map()
    Ns, Nt = f.source.order, f.target.order
    n = Ns ** r
    t = np.arange(n, dtype=np.int64)
    src = np.zeros(n, dtype=np.int64)
    rest = t.copy()
    scale = 1
    for _ in range(r):
        src += phi[rest % Ns] * scale
        rest //= Ns
        scale *= Nt
    m = sp.csr_matrix((np.ones(n, dtype=np.int64), (t, src)), shape=(n, Nt ** r))
    return IntMatrix.from_csr(m)


def inflation(f, M, i, bound=None):
    """``H^i(G, M) -> H^i(G', M)`` induced by a surjection ``f: G' -> G``."""
    if not isinstance(f, GroupMap):
        raise TypeError("expected a GroupMap")
    if not f.is_surjective():
        raise NotSurjective("%s -> %s is not surjective" % (f.source, f.target))
    small = standard_complex(f.target, M, i + 1, bound)
    big = standard_complex(f.source, M, i + 1, bound)
    P = cochain_pullback(f, i).kron_identity(M.ngens, left=True)
    comp = Homomorphism(small.group(i), big.group(i), P, check=False)
    return induced_map(comp, small.homology_data(i), big.homology_data(i))


# product of periodic resolutions

def _multidegrees(r, i):
    """Compositions of ``i`` into ``r`` nonnegative parts, lexicographic."""
    if r == 0:
        return [()] if i == 0 else []
    return sorted(k for k in itertools.product(range(i + 1), repeat=r) if sum(k) == i)


def product_cyclic_complex(r, m, M, degree_max):
    """Cochains of ``(Z/m)^r`` with values in ``M`` from the product resolution.

    Basis in degree ``i``: multidegrees ``k`` with ``|k| = i``.  The differential
    sends ``x_k`` to ``sum_j (-1)^{k_1+...+k_{j-1}} c(k_j) x_{k+e_j}`` with
    ``c = 0`` on even and ``c = m`` on odd entries.
    """
    bases = [_multidegrees(r, i) for i in range(degree_max + 1)]
    pos = [{k: n for n, k in enumerate(b)} for b in bases]
    diffs = []
    for i in range(degree_max):
        D = IntMatrix(len(bases[i + 1]), len(bases[i]))
        for col, k in enumerate(bases[i]):
            sign = 1
            for j in range(r):
                if k[j] % 2:
                    kk = k[:j] + (k[j] + 1,) + k[j + 1:]
                    D._dense[pos[i + 1][kk]][col] += sign * m
                sign = -sign if k[j] % 2 else sign
        diffs.append(D)
    return ScalarComplex(diffs, [len(b) for b in bases], M)


def product_cyclic_inflation(r, m, m2, M, i):
    """Cochain map in degree ``i`` from the ``(Z/m)^r`` model to the ``(Z/m2)^r`` model.

    With ``k = m2/m`` the cyclic comparison map is ``k^s`` in degrees ``2s`` and
    ``2s+1``; on multidegrees the factors multiply.
    """
    if m2 % m:
        raise ValueError("%d does not divide %d" % (m, m2))
    k = m2 // m
    basis = _multidegrees(r, i)
    diag = [prod(k ** (kj // 2) for kj in deg) for deg in basis]
    return IntMatrix.diagonal(diag).kron_identity(M.ngens, left=True)


def product_cyclic_cohomology(r, m, M, i):
    return product_cyclic_complex(r, m, M, i + 1).homology_at(i)


def _prime_to_exponent(M, p):
    e = M.exponent()
    if p:
        while e % p == 0:
            e //= p
    return e


def default_ladder(M, p, length=3):
    n = _prime_to_exponent(M, p)
    if n == 1:
        n = next(q for q in itertools.count(2) if factorize(q) == {q: 1} and q != p)
    return [n ** j for j in range(1, length + 1)]


class ColimitReport:
    """Outcome of a ladder computation: the stable value and the evidence."""

    def __init__(self, value, step, groups, images):
        self.value = value
        self.step = step
        self.groups = groups
        self.images = images

    def to_dict(self):
        return {"value": self.value.to_dict(), "stable_step": self.step,
                "levels": [g.to_dict() for g in self.groups],
                "images": [g.to_dict() for g in self.images]}


def profinite_colimit_report(r, M, p, i, ladder=None, method="product"):
    """Colimit of ``H^i((Z/m_j)^r, M)`` along inflation, with the stabilization evidence.

    Stabilization is accepted at the first step ``j`` where ``n`` (the exponent
    of the prime-to-p part of ``M``) divides both ``m_j`` and ``m_{j+1}/m_j``:
    from there on the comparison maps are zero on every multidegree with an
    entry at least 2 and the identity on the exterior part, so the image of
    ``H^i((Z/m_j)^r)`` is the whole colimit.  If a later rung exists, its map
    must be injective on that image; this is checked, not assumed.
    """
    if not M.is_finite():
        raise ValueError("the brute-force colimit needs a finite coefficient group")
    ladder = list(ladder) if ladder is not None else default_ladder(M, p)
    if not ladder:
        raise NotStabilized("empty ladder")
    for a, b in zip(ladder, ladder[1:]):
        if b % a:
            raise ValueError("ladder %r is not a divisibility chain" % (ladder,))
    if p and any(m % p == 0 for m in ladder):
        raise ValueError("ladder moduli must be prime to p = %d" % p)
    n = _prime_to_exponent(M, p)

    if method == "product":
        complexes = [product_cyclic_complex(r, m, M, i + 1) for m in ladder]
        data = [C.homology_data(i) for C in complexes]

        def step_map(j):
            cmap = product_cyclic_inflation(r, ladder[j], ladder[j + 1], M, i)
            src, tgt = complexes[j].group(i), complexes[j + 1].group(i)
            return induced_map(Homomorphism(src, tgt, cmap, check=False), data[j], data[j + 1])
    elif method == "bar":
        groups = [FiniteAbelianGroup([m] * r) for m in ladder]

        def step_map(j):
            return inflation(GroupMap.reduction(groups[j + 1], groups[j]), M, i)
        data = None
    else:
        raise ValueError("unknown method %r" % method)

    maps = [step_map(j) for j in range(len(ladder) - 1)]
    levels = [f.source for f in maps] + ([maps[-1].target] if maps else [])
    images = [f.image() for f in maps]
    for j, f in enumerate(maps):
        m, m2 = ladder[j], ladder[j + 1]
        if m % n or (m2 // m) % n:
            continue
        value = images[j]
        if j + 1 < len(maps):
            if (maps[j + 1] @ f).image() != value:
                raise NotStabilized("rung %d does not embed the stable image" % (j + 2))
        return ColimitReport(value, j, levels, images)
    raise NotStabilized("ladder %r never reaches a rung m with %d | m and %d | (next rung)/m"
                        % (ladder, n, n))


def profinite_colimit_bruteforce(r, M, p, i, ladder=None, method="product"):
    return profinite_colimit_report(r, M, p, i, ladder, method).value


def profinite_closed_form(r, M, p, i):
    """``H^i((Zhat')^r, M)``: ``M`` for ``i = 0``, else ``M'^{binom(r, i)}``."""
    if i < 0 or r < 0:
        raise ValueError("degree and rank must be nonnegative")
    if isinstance(M, FgAbGroup):
        M = SymbolicModule.from_group(M)
    if not M.is_torsion():
        raise ValueError("closed form needs a torsion module")
    if i == 0:
        return M
    return prime_to_p_sym(M, p) * comb(r, i)
