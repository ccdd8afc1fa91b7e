"""Finitely generated abelian groups, homomorphisms and chain complexes.

A group ``Z^r + Z/d_1 + ... + Z/d_k`` (with ``d_1 | ... | d_k``, all ``d_j >= 2``)
has canonical generators ordered torsion first, in invariant-factor order,
then the free ones.  A homomorphism is an integer matrix whose columns are
the images of the source generators; rows belonging to a ``Z/d`` generator of
the target are kept reduced into ``[0, d)`` so that equal maps have equal
matrices.
"""

from math import comb, gcd

import numpy as np

from .errors import NonFreeGroup, NotAComplex
from .matrix import (
    IntMatrix,
    LatticeCoordinates,
    _normalize_diagonal,
    column_lattice_basis,
    elementary_divisors,
    factorize,
    hstack,
    kernel_basis,
    local_elementary_valuations,
    snf,
)


class FgAbGroup:
    __slots__ = ("rank", "invariant_factors")

    def __init__(self, rank=0, invariant_factors=()):
        factors = tuple(int(d) for d in invariant_factors)
        if rank < 0:
            raise ValueError("rank must be nonnegative")
        for d in factors:
            if d < 2:
                raise ValueError("invariant factors must be at least 2, got %d" % d)
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError("invariant factors %r do not form a divisibility chain" % (factors,))
        self.rank = int(rank)
        self.invariant_factors = factors

    @classmethod
    def from_orders(cls, orders):
        """Normal form of the direct sum of cyclic groups ``Z/o`` (``o = 0`` means Z)."""
        orders = [abs(int(o)) for o in orders]
        rank = orders.count(0)
        factors = [d for d in _normalize_diagonal([o for o in orders if o > 1]) if d > 1]
        return cls(rank, factors)

    @classmethod
    def cyclic(cls, n):
        return cls.from_orders([n])

    @classmethod
    def free(cls, rank):
        return cls(rank, ())

    @classmethod
    def from_dict(cls, d):
        return cls.from_orders(list(d.get("torsion", [])) + [0] * int(d.get("rank", 0)))

    def to_dict(self):
        return {"rank": self.rank, "torsion": list(self.invariant_factors)}

    @property
    def ngens(self):
        return len(self.invariant_factors) + self.rank

    @property
    def orders(self):
        """Order of each canonical generator, 0 for free generators."""
        return list(self.invariant_factors) + [0] * self.rank

    def is_trivial(self):
        return self.rank == 0 and not self.invariant_factors

    def is_finite(self):
        return self.rank == 0

    def is_free(self):
        return not self.invariant_factors

    def order(self):
        """Cardinality, or None for infinite groups."""
        if self.rank:
            return None
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def exponent(self):
        """Exponent of the torsion subgroup (1 if torsion free)."""
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def torsion_part(self):
        return FgAbGroup(0, self.invariant_factors)

    def relation_matrix(self):
        """Columns ``d_j e_j`` spanning the relation lattice."""
        n = self.ngens
        k = len(self.invariant_factors)
        m = IntMatrix(n, k)
        for j, d in enumerate(self.invariant_factors):
            m._dense[j][j] = d
        return m

    def __eq__(self, other):
        if not isinstance(other, FgAbGroup):
            return NotImplemented
        return self.rank == other.rank and self.invariant_factors == other.invariant_factors

    def __hash__(self):
        return hash((self.rank, self.invariant_factors))

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append("Z^%d" % self.rank)
        parts.extend("Z/%d" % d for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return "FgAbGroup(%s)" % self


ZERO = FgAbGroup()
Z = FgAbGroup(1)


def group_from_presentation(relations, k=None):
    """Cokernel of the relation rows acting on ``k`` generators."""
    k = relations.cols if k is None else k
    if relations.cols != k:
        raise ValueError("relations must have %d columns" % k)
    if relations.rows == 0:
        return FgAbGroup(k)
    if relations.rows * relations.cols > 40_000:
        diag = elementary_divisors(relations)
    else:
        diag = [d for d in snf(relations, transforms=False).diag if d]
    return FgAbGroup.from_orders([d for d in diag] + [0] * (k - len(diag)))


def direct_sum(*groups):
    orders = []
    for g in groups:
        orders.extend(g.orders)
    return FgAbGroup.from_orders(orders)


def tensor(G, H):
    orders = [0] * (G.rank * H.rank)
    orders += list(G.invariant_factors) * H.rank
    orders += list(H.invariant_factors) * G.rank
    orders += [gcd(a, b) for a in G.invariant_factors for b in H.invariant_factors]
    return FgAbGroup.from_orders(orders)


def hom(G, H):
    # Hom(Z/a, Z) = 0, Hom(Z, H) = H, Hom(Z/a, Z/b) = Z/gcd(a, b)
    orders = [0] * (G.rank * H.rank)
    orders += list(H.invariant_factors) * G.rank
    orders += [gcd(a, b) for a in G.invariant_factors for b in H.invariant_factors]
    return FgAbGroup.from_orders(orders)


def exterior_power(G, i):
    if not G.is_free():
        raise NonFreeGroup("exterior powers are only taken of free groups, got %s" % G)
    if i < 0:
        raise ValueError("negative exterior degree")
    return FgAbGroup(comb(G.rank, i))


def n_torsion(G, n):
    if n < 1:
        raise ValueError("n must be positive")
    return FgAbGroup.from_orders([gcd(d, n) for d in G.invariant_factors])


def torsion_decompose(G):
    """``(rank, {p: [Z/p^e, ...]})`` with the cyclic primary summands per prime."""
    parts = {}
    for d in G.invariant_factors:
        for p, e in factorize(d).items():
            parts.setdefault(p, []).append(p ** e)
    return G.rank, {p: [FgAbGroup.cyclic(q) for q in sorted(qs)] for p, qs in sorted(parts.items())}


def p_primary_part(G, p):
    return FgAbGroup.from_orders([p ** _valuation(d, p) for d in G.invariant_factors])


def prime_to_part(G, p):
    """Torsion subgroup with the p-primary part removed (p = 0 keeps all torsion)."""
    if p == 0:
        return G.torsion_part()
    return FgAbGroup.from_orders([d // p ** _valuation(d, p) for d in G.invariant_factors])


def _valuation(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# homomorphisms

def _reduce_csr(csr, moduli):
    csr = csr.tocsr().copy()
    mods = np.asarray(moduli, dtype=np.int64)
    if mods.any():
        rows = np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))
        m = mods[rows]
        mask = m > 0
        csr.data[mask] = np.mod(csr.data[mask], m[mask])
        csr.eliminate_zeros()
    return csr


def _reduce_matrix(matrix, target):
    if not target.invariant_factors:
        return matrix
    moduli = target.orders
    if matrix.is_sparse:
        return IntMatrix.from_csr(_reduce_csr(matrix.csr(), moduli))
    return matrix.reduce_rows(moduli)


class Homomorphism:
    """A homomorphism ``source -> target`` given on canonical generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, check=True):
        if not isinstance(matrix, IntMatrix):
            matrix = IntMatrix.from_rows(matrix, source.ngens) if matrix else IntMatrix(target.ngens, source.ngens)
        if (matrix.rows, matrix.cols) != (target.ngens, source.ngens):
            raise ValueError("matrix shape %dx%d does not match %s -> %s"
                             % (matrix.rows, matrix.cols, source, target))
        self.source = source
        self.target = target
        self.matrix = _reduce_matrix(matrix, target)
        if check and not self.matrix.is_sparse:
            self._check_well_defined()

    def _check_well_defined(self):
        t_orders = self.target.orders
        rows = self.matrix._rows()
        for j, d in enumerate(self.source.orders):
            if d == 0:
                continue
            for k, e in enumerate(t_orders):
                a = rows[k][j]
                if (e == 0 and a) or (e and (d * a) % e):
                    raise ValueError("generator %d of order %d cannot map to %r" % (j, d, self.matrix.column(j)))

    @classmethod
    def identity(cls, G):
        return cls(G, G, IntMatrix.identity(G.ngens), check=False)

    @classmethod
    def zero(cls, G, H):
        return cls(G, H, IntMatrix.zeros(H.ngens, G.ngens), check=False)

    @classmethod
    def multiplication(cls, G, k):
        return cls(G, G, IntMatrix.diagonal([k] * G.ngens), check=False)

    def __matmul__(self, other):
        """``self o other``."""
        if other.target != self.source:
            raise ValueError("cannot compose %s -> %s after %s -> %s"
                             % (self.source, self.target, other.source, other.target))
        return Homomorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.source, self.target))

    def __repr__(self):
        return "Homomorphism(%s -> %s, %r)" % (self.source, self.target, self.matrix)

    def is_zero(self):
        return self.matrix.is_zero()

    def _cycle_lattice(self):
        # x with A x in the target relation lattice
        A = self.matrix
        R = self.target.relation_matrix()
        K = kernel_basis(hstack([A, R]) if R.cols else A)
        n = self.source.ngens
        return IntMatrix(n, K.cols, [K.row(i) for i in range(n)] if n else None)

    def kernel_data(self):
        return subquotient(self._cycle_lattice(), self.source.relation_matrix())

    def kernel(self):
        return self.kernel_data().group

    def image_data(self):
        R = self.target.relation_matrix()
        return subquotient(hstack([self.matrix, R]), R)

    def image(self):
        return self.image_data().group

    def cokernel_data(self):
        n = self.target.ngens
        return subquotient(IntMatrix.identity(n), hstack([self.matrix, self.target.relation_matrix()]))

    def cokernel(self):
        return self.cokernel_data().group

    def is_injective(self):
        return self.kernel().is_trivial()

    def is_surjective(self):
        return self.cokernel().is_trivial()

    def is_isomorphism(self):
        return self.is_injective() and self.is_surjective()

    def to_dict(self):
        return {"source": self.source.to_dict(), "target": self.target.to_dict(),
                "matrix": self.matrix.tolist()}


class Subquotient:
    """``S / R`` for lattices ``R <= S <= Z^n``, with coordinates on its normal form.

    ``reps`` holds one ambient representative per canonical generator (as
    columns) and :meth:`project` sends an element of ``S`` to canonical
    coordinates.
    """

    def __init__(self, sub, rel):
        n = sub.rows
        K = column_lattice_basis(sub) if sub.cols else IntMatrix(n, 0)
        self.basis = K
        z = K.cols
        self._coords = LatticeCoordinates(K) if z else None
        cols = []
        for j in range(rel.cols):
            v = rel.column(j)
            if any(v):
                cols.append(self._coords.solve(v))
        C = IntMatrix(z, len(cols), [[c[i] for c in cols] for i in range(z)] if z else None)
        res = snf(C)
        diag = list(res.diag) + [0] * (z - len(res.diag))
        self._U = res.U
        gens = [j for j in range(z) if diag[j] != 1]
        self._gens = gens
        self._mods = [diag[j] for j in gens]
        self.group = FgAbGroup.from_orders(self._mods)
        # canonical order: torsion (ascending chain) then free, which is the SNF order
        assert [m for m in self._mods if m] == list(self.group.invariant_factors)
        KU = K @ res.Uinv if z else K
        self.reps = IntMatrix(n, len(gens), [[KU[i, j] for j in gens] for i in range(n)] if n else None)

    def project(self, x):
        if not self._gens:
            return []
        c = self._coords.solve(list(x))
        U = self._U._rows()
        out = []
        for j, m in zip(self._gens, self._mods):
            y = sum(u * v for u, v in zip(U[j], c))
            out.append(y % m if m else y)
        return out


def subquotient(sub, rel):
    return Subquotient(sub, rel)


# chain complexes

class ChainComplex:
    """Cochain complex ``C^0 -> C^1 -> ... -> C^N`` of finitely generated groups."""

    def __init__(self, groups, differentials, check=True):
        groups = list(groups)
        differentials = list(differentials)
        if len(differentials) != max(len(groups) - 1, 0):
            raise ValueError("need one differential between consecutive groups")
        for i, d in enumerate(differentials):
            if d.source != groups[i] or d.target != groups[i + 1]:
                raise ValueError("differential %d has wrong source or target" % i)
        self.groups = groups
        self._diffs = differentials
        if check:
            for i in range(1, len(differentials)):
                self._check_square(i)

    @property
    def length(self):
        return len(self.groups)

    def group(self, i):
        return self.groups[i] if 0 <= i < len(self.groups) else ZERO

    def differential(self, i):
        """``d^i: C^i -> C^{i+1}`` (zero map at the ends)."""
        if 0 <= i < len(self.groups) - 1:
            return self._diffs[i]
        return Homomorphism.zero(self.group(i), self.group(i + 1))

    def _check_square(self, i):
        if i < 1:
            return
        comp = self.differential(i) @ self.differential(i - 1)
        if not comp.is_zero():
            raise NotAComplex("d^%d o d^%d is not zero" % (i, i - 1))

    def check(self):
        for i in range(1, len(self.groups) - 1):
            self._check_square(i)
        return True

    def homology_data(self, i):
        """Cycles over boundaries at ``C^i`` with representatives and projection."""
        if not 0 <= i < len(self.groups):
            return subquotient(IntMatrix(0, 0), IntMatrix(0, 0))
        if i >= 1:
            self._check_square(i)
        G = self.groups[i]
        d = self.differential(i)
        cycles = d._cycle_lattice() if d.target.ngens else IntMatrix.identity(G.ngens)
        prev = self.differential(i - 1).matrix if i >= 1 else IntMatrix(G.ngens, 0)
        return subquotient(cycles, hstack([prev, G.relation_matrix()]))

    def homology_at(self, i):
        return self.homology_data(i).group

    def to_dict(self):
        return {"groups": [g.to_dict() for g in self.groups],
                "differentials": [self.differential(i).matrix.tolist() for i in range(len(self.groups) - 1)]}


def homology_at(C, i):
    return C.homology_at(i)


def induced_map(f_i, source_data, target_data):
    """Map on homology induced by the cochain map component ``f_i``."""
    H, H2 = source_data.group, target_data.group
    cols = []
    for j in range(source_data.reps.cols):
        x = source_data.reps.column(j)
        y = f_i.matrix @ IntMatrix(len(x), 1, x) if x else IntMatrix(f_i.matrix.rows, 1)
        cols.append(target_data.project(y.column(0)))
    m = IntMatrix(H2.ngens, H.ngens, [[c[k] for c in cols] for k in range(H2.ngens)] if H2.ngens else None)
    return Homomorphism(H, H2, m)


class ScalarComplex(ChainComplex):
    """``K (x) M`` for a complex ``K`` of free groups ``Z^{N_i}`` and a coefficient group ``M``.

    ``C^i = M^{N_i}`` in normal form; the generator blocks follow the canonical
    generators of ``M``, so the differential is block diagonal with copies of
    ``D_i`` reduced modulo the block's order.  Homology is computed by the
    universal coefficient split, one prime power at a time, through the sparse
    elimination kernel; differentials are only materialised on request.
    """

    def __init__(self, int_diffs, dims, coeff, check=True):
        self.dims = list(dims)
        self.coeff = coeff
        self._int = list(int_diffs)
        if len(self._int) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential between consecutive groups")
        for i, D in enumerate(self._int):
            if (D.rows, D.cols) != (self.dims[i + 1], self.dims[i]):
                raise ValueError("integer differential %d has the wrong shape" % i)
        self.groups = [self._power(n) for n in self.dims]
        self._diffs = [None] * len(self._int)
        self._cache = {}
        if check:
            for i in range(1, len(self._int)):
                self._check_square(i)

    def _power(self, n):
        M = self.coeff
        return FgAbGroup(M.rank * n, [d for d in M.invariant_factors for _ in range(n)])

    def integer_differential(self, i):
        if 0 <= i < len(self._int):
            return self._int[i]
        return IntMatrix.zeros(self.dims[i + 1] if 0 <= i + 1 < len(self.dims) else 0,
                               self.dims[i] if 0 <= i < len(self.dims) else 0)

    def differential(self, i):
        if not 0 <= i < len(self._int):
            return Homomorphism.zero(self.group(i), self.group(i + 1))
        if self._diffs[i] is None:
            D = self._int[i]
            blocks = D.kron_identity(self.coeff.ngens, left=True)
            self._diffs[i] = Homomorphism(self.groups[i], self.groups[i + 1], blocks, check=False)
        return self._diffs[i]

    def _check_square(self, i):
        if not 1 <= i < len(self._int):
            return
        a, b = self._int[i], self._int[i - 1]
        if not (a @ b).is_zero():
            raise NotAComplex("d^%d o d^%d is not zero" % (i, i - 1))

    def _integer_divisors(self, i):
        key = ("Z", i)
        if key not in self._cache:
            D = self.integer_differential(i)
            self._cache[key] = elementary_divisors(D) if D.rows and D.cols else []
        return self._cache[key]

    def _local(self, i, l, a):
        key = (l, a, i)
        if key not in self._cache:
            D = self.integer_differential(i)
            self._cache[key] = local_elementary_valuations(D, l, a) if D.rows and D.cols else []
        return self._cache[key]

    def homology_at(self, i):
        if not 0 <= i < len(self.dims):
            return ZERO
        if i >= 1:
            self._check_square(i)
        N = self.dims[i]
        orders = []
        M = self.coeff
        if M.rank:
            prev = self._integer_divisors(i - 1)
            here = self._integer_divisors(i)
            free = N - len(prev) - len(here)
            orders += [0] * (free * M.rank)
            orders += [e for e in prev if e > 1] * M.rank
        for c in M.invariant_factors:
            for l, a in factorize(c).items():
                prev = self._local(i - 1, l, a)
                here = self._local(i, l, a)
                orders += [l ** a] * (N - len(prev) - len(here))
                orders += [l ** v for v in prev + here if v > 0]
        return FgAbGroup.from_orders(orders)
