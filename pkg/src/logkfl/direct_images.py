"""Higher direct images from the Kummer log flat site to the flat site.

Sheaves come in three classes (finite l-groups, lattices, rational vector
spaces) and images are formal sums of skyscrapers ``i_{x*}(module)`` at the
marked points of a base.  Generic points carry nothing.
"""

from math import comb

from .abelian import FgAbGroup
from .coefficients import (
    FINITE,
    PRIMARY,
    PRIME_TO_P,
    QMODZ,
    RATIONAL,
    CoeffAtom,
    SymbolicModule,
    ZERO_MODULE,
    is_prime,
    n_torsion_sym,
)
from .errors import UnsupportedBase
from .matrix import factorize

LOG_TRAIT = "log_trait"
DEDEKIND = "dedekind"
SUPPORTED_KINDS = (LOG_TRAIT, DEDEKIND)


class BasePoint:
    __slots__ = ("label", "p", "q", "log_rank")

    def __init__(self, label, p, q=None, log_rank=1):
        if p < 0 or (p and not is_prime(p)):
            raise ValueError("residue characteristic must be 0 or a prime")
        if q is not None:
            f = factorize(q)
            if q < 2 or len(f) != 1 or next(iter(f)) != p:
                raise ValueError("residue field size %r is not a power of %d" % (q, p))
        if log_rank < 0:
            raise ValueError("log rank must be nonnegative")
        self.label = str(label)
        self.p = int(p)
        self.q = None if q is None else int(q)
        self.log_rank = int(log_rank)

    @classmethod
    def from_dict(cls, d):
        return cls(d.get("label", "x"), int(d["p"]), d.get("q"), int(d.get("log_rank", 1)))

    def to_dict(self):
        return {"label": self.label, "p": self.p, "q": self.q, "log_rank": self.log_rank}

    def __eq__(self, other):
        return isinstance(other, BasePoint) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.label)

    def __repr__(self):
        return "BasePoint(%r, p=%d, q=%r, log_rank=%d)" % (self.label, self.p, self.q, self.log_rank)


class BaseDescription:
    """A log trait (one marked point) or a Dedekind base with marked set ``S``.

    With ``strict`` the log rank of every marked point must be 1, as it is for
    the log structures these bases carry.
    """

    def __init__(self, kind, points, generic_char=0, strict=True):
        points = list(points)
        labels = [x.label for x in points]
        if len(set(labels)) != len(labels):
            raise ValueError("point labels must be distinct")
        if kind == LOG_TRAIT and len(points) != 1:
            raise ValueError("a log trait has exactly one marked point")
        if strict and kind in SUPPORTED_KINDS and any(x.log_rank != 1 for x in points):
            raise ValueError("marked points of %s bases have log rank 1" % kind)
        self.kind = kind
        self.points = points
        self.generic_char = int(generic_char)

    @classmethod
    def log_trait(cls, p, q=None, generic_char=0, label="x"):
        return cls(LOG_TRAIT, [BasePoint(label, p, q, 1)], generic_char)

    @classmethod
    def dedekind(cls, points, generic_char=0):
        pts = []
        for k, x in enumerate(points):
            if isinstance(x, BasePoint):
                pts.append(x)
            else:
                p, q = x
                pts.append(BasePoint("x%d" % (k + 1), p, q, 1))
        return cls(DEDEKIND, pts, generic_char)

    @classmethod
    def from_dict(cls, d, strict=True):
        return cls(d["kind"], [BasePoint.from_dict(x) for x in d.get("points", [])],
                   int(d.get("generic_char", 0)), strict)

    def to_dict(self):
        return {"kind": self.kind, "generic_char": self.generic_char,
                "points": [x.to_dict() for x in self.points]}

    def point(self, label):
        for x in self.points:
            if x.label == label:
                return x
        raise KeyError(label)

    def max_log_rank(self):
        return max((x.log_rank for x in self.points), default=0)


class SheafSpec:
    """One of ``FiniteLGroup(l, M)``, ``Lattice(rank)``, ``RationalSpace(dim)``.

    ``frobenius`` (finite l-groups only) is an explicit automorphism matrix of
    ``M``; otherwise the sheaf is constant.
    """

    FINITE_L = "FiniteLGroup"
    LATTICE = "Lattice"
    RATIONAL = "RationalSpace"

    __slots__ = ("cls", "l", "group", "rank", "dim", "frobenius")

    def __init__(self, cls, l=None, group=None, rank=None, dim=None, frobenius=None):
        self.cls = cls
        self.l = l
        self.group = group
        self.rank = rank
        self.dim = dim
        self.frobenius = frobenius
        if cls == self.FINITE_L:
            if not is_prime(l):
                raise ValueError("l must be prime")
            if not group.is_finite() or any(set(factorize(d)) != {l} for d in group.invariant_factors):
                raise ValueError("%s is not a finite %d-group" % (group, l))
        elif cls == self.LATTICE:
            if rank is None or rank < 0:
                raise ValueError("lattice rank must be nonnegative")
        elif cls == self.RATIONAL:
            if dim is None or dim < 0:
                raise ValueError("dimension must be nonnegative")
        else:
            raise ValueError("unknown sheaf class %r" % cls)
        if frobenius is not None and cls != self.FINITE_L:
            raise ValueError("an explicit Frobenius is only supported for finite groups")

    @classmethod
    def finite(cls, l, group, frobenius=None):
        if isinstance(group, int):
            group = FgAbGroup.cyclic(group)
        return cls(cls.FINITE_L, l=l, group=group, frobenius=frobenius)

    @classmethod
    def lattice(cls, rank):
        return cls(cls.LATTICE, rank=rank)

    @classmethod
    def rational(cls, dim):
        return cls(cls.RATIONAL, dim=dim)

    def sections(self):
        """The underlying module of the constant sheaf."""
        if self.cls == self.FINITE_L:
            return SymbolicModule.from_group(self.group)
        if self.cls == self.LATTICE:
            return SymbolicModule.from_group(FgAbGroup(self.rank))
        return SymbolicModule.atom(RATIONAL, mult=self.dim)

    def to_dict(self):
        d = {"class": self.cls}
        if self.cls == self.FINITE_L:
            d.update(l=self.l, group=self.group.to_dict())
            if self.frobenius is not None:
                d["frobenius"] = self.frobenius
        elif self.cls == self.LATTICE:
            d["rank"] = self.rank
        else:
            d["dim"] = self.dim
        return d

    def __repr__(self):
        if self.cls == self.FINITE_L:
            return "FiniteLGroup(%d, %s)" % (self.l, self.group)
        if self.cls == self.LATTICE:
            return "Lattice(%d)" % self.rank
        return "RationalSpace(%d)" % self.dim


class DirectImageExpr:
    """Formal sum of skyscraper terms ``i_{x*}(module)`` keyed by point label."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        merged = {}
        for label, mod in terms:
            merged[label] = merged.get(label, ZERO_MODULE) + mod
        self.terms = tuple(sorted((k, v) for k, v in merged.items() if not v.is_zero()))

    def is_zero(self):
        return not self.terms

    def stalk(self, label):
        for k, v in self.terms:
            if k == label:
                return v
        return ZERO_MODULE

    def __add__(self, other):
        return DirectImageExpr(self.terms + other.terms)

    def __eq__(self, other):
        return isinstance(other, DirectImageExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def map_modules(self, fn):
        return DirectImageExpr((k, fn(v)) for k, v in self.terms)

    def to_list(self):
        return [{"point": k, "module": v.to_list()} for k, v in self.terms]

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join("i_%s*(%s)" % (k, v) for k, v in self.terms)

    def __repr__(self):
        return "DirectImageExpr(%s)" % self


def _check_base(base):
    if base.kind not in SUPPORTED_KINDS:
        raise UnsupportedBase("unsupported base kind %r" % base.kind)


def higher_direct_image(base, F, i):
    """``R^i eps_fl* F`` as a skyscraper sum over the marked points."""
    _check_base(base)
    if i < 1:
        raise ValueError("higher direct images start in degree 1")
    terms = []
    if F.cls == SheafSpec.RATIONAL:
        return DirectImageExpr()
    if F.cls == SheafSpec.FINITE_L:
        for x in base.points:
            if x.p == F.l:
                continue  # extension by zero away from residue characteristic l
            mult = comb(x.log_rank, i)
            if mult:
                terms.append((x.label, SymbolicModule.from_group(F.group, -i) * mult))
        return DirectImageExpr(terms)
    if i == 1:
        return DirectImageExpr()
    for x in base.points:
        mult = F.rank * comb(x.log_rank, i - 1)
        if not mult:
            continue
        # the sum over l != p_x of Q_l/Z_l is the prime-to-p part of Q/Z
        atom = CoeffAtom(PRIME_TO_P, x.p, -(i - 1)) if x.p else CoeffAtom(QMODZ, None, -(i - 1))
        terms.append((x.label, SymbolicModule([(atom, mult)])))
    return DirectImageExpr(terms)


def stalk_on_strict_site(expr, x):
    label = x.label if isinstance(x, BasePoint) else x
    return expr.stalk(label)


def vanishing_degree(base, F):
    """Smallest ``d`` with ``R^i eps_fl* F = 0`` for every ``i >= d``."""
    R = base.max_log_rank()
    if F.cls == SheafSpec.RATIONAL:
        return 1
    if F.cls == SheafSpec.FINITE_L:
        return R + 1
    return R + 2 if R >= 1 else 1


def torsion_of_image(expr, n):
    """Termwise ``n``-torsion of a direct image expression."""
    return expr.map_modules(lambda M: n_torsion_sym(M, n))


def lattice_level_via_finite(base, rank, i, l, k):
    """The ``l^k``-level of the finite-coefficient side of the lattice comparison.

    ``R^{i-1}`` of ``(Z/l^k)^rank``: the ``l^k``-torsion of ``R^{i-1}`` of
    ``Z^rank (x) Q_l/Z_l``, whose union over ``k`` and sum over ``l`` give the
    lattice image in degree ``i``.
    """
    group = FgAbGroup.from_orders([l ** k] * rank)
    if group.is_trivial():
        return DirectImageExpr()
    return higher_direct_image(base, SheafSpec.finite(l, group), i - 1)


def _colimit_of_levels(mods, l):
    """``colim_k`` of ``l^k``-torsion modules ``mods[k-1]`` along the inclusions."""
    top = mods[-1]
    for k, M in enumerate(mods[:-1], 1):
        if n_torsion_sym(top, l ** k) != M:
            raise ValueError("levels do not form the l-power torsion tower of one module")
    pairs = []
    for a, m in top.atoms:
        if a.kind != FINITE or a.param != l ** len(mods):
            raise ValueError("level %d is not free over Z/%d" % (len(mods), l ** len(mods)))
        pairs.append((CoeffAtom(PRIMARY, l, a.twist), m))
    return SymbolicModule(pairs)


def lattice_image_via_finite(base, rank, i, primes, levels=3):
    """``sum_l colim_k R^{i-1}`` of ``(Z/l^k)^rank`` over the given primes.

    On the primes listed this is the ``l``-primary part of the lattice image
    in degree ``i``.
    """
    terms = []
    for l in primes:
        exprs = [lattice_level_via_finite(base, rank, i, l, k) for k in range(1, levels + 1)]
        for x in base.points:
            mods = [E.stalk(x.label) for E in exprs]
            if all(M.is_zero() for M in mods):
                continue
            terms.append((x.label, _colimit_of_levels(mods, l)))
    return DirectImageExpr(terms)
