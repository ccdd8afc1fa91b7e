"""Symbolic coefficient modules with Tate twists.

Atoms are ``Z``, ``Z/n``, ``Q``, ``Q/Z``, ``Q_l/Z_l`` and the prime-to-p part
``(Q/Z)^(p')`` of ``Q/Z``, each carrying an integer twist ``w``.  A twist is
only bookkeeping here; it acquires arithmetic meaning in
:func:`frobenius_kernel_cokernel`, where a Frobenius generator acts on
``M(w)`` through an extra factor ``q^w``.
"""

import re
from math import gcd

from .abelian import FgAbGroup, Homomorphism
from .errors import NonInvertibleTwist, UnsupportedModule, UnsupportedTensor
from .matrix import IntMatrix, factorize

FREE_Z = "FreeZ"
FINITE = "FiniteCyclic"
RATIONAL = "RationalQ"
QMODZ = "QmodZ"
PRIMARY = "PrimaryDivisible"
PRIME_TO_P = "PrimeToP"

_KIND_ORDER = {FREE_Z: 0, RATIONAL: 1, FINITE: 2, QMODZ: 3, PRIME_TO_P: 4, PRIMARY: 5}
DIVISIBLE = (RATIONAL, QMODZ, PRIMARY, PRIME_TO_P)


def is_prime(n):
    return n >= 2 and factorize(n) == {n: 1}


def valuation(n, p):
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_to(n, p):
    """Largest divisor of ``n`` prime to ``p`` (all of ``n`` when p = 0)."""
    if p == 0:
        return n
    return n // p ** valuation(n, p)


class CoeffAtom:
    __slots__ = ("kind", "param", "twist")

    def __init__(self, kind, param=None, twist=0):
        if kind not in _KIND_ORDER:
            raise ValueError("unknown atom kind %r" % kind)
        if kind == FINITE:
            if param is None or param < 2:
                raise ValueError("Z/n needs n >= 2")
        elif kind in (PRIMARY, PRIME_TO_P):
            if param is None or not is_prime(param):
                raise ValueError("%s needs a prime parameter, got %r" % (kind, param))
        else:
            param = None
        self.kind = kind
        self.param = param
        self.twist = int(twist)

    def key(self):
        return (_KIND_ORDER[self.kind], self.param or 0, self.twist)

    def __eq__(self, other):
        return isinstance(other, CoeffAtom) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    @property
    def divisible(self):
        return self.kind in DIVISIBLE

    @property
    def torsion(self):
        return self.kind not in (FREE_Z, RATIONAL)

    def with_twist(self, w):
        return CoeffAtom(self.kind, self.param, w)

    def base_str(self):
        return {
            FREE_Z: "Z",
            RATIONAL: "Q",
            QMODZ: "Q/Z",
            FINITE: "Z/%s" % self.param,
            PRIMARY: "Q_%s/Z_%s" % (self.param, self.param),
            PRIME_TO_P: "(Q/Z)^(%s')" % self.param,
        }[self.kind]

    def __str__(self):
        s = self.base_str()
        return s + ("(%d)" % self.twist if self.twist else "")

    def __repr__(self):
        return "CoeffAtom(%s)" % self


def _canonical(pairs):
    """Merge a list of ``(atom, mult)`` into canonical form."""
    counts = {}
    finite = {}
    for atom, mult in pairs:
        if mult < 0:
            raise ValueError("negative multiplicity")
        if mult == 0:
            continue
        if atom.kind == FINITE:
            finite.setdefault(atom.twist, []).extend([atom.param] * mult)
        else:
            counts[atom] = counts.get(atom, 0) + mult
    for w, orders in finite.items():
        for d in FgAbGroup.from_orders(orders).invariant_factors:
            a = CoeffAtom(FINITE, d, w)
            counts[a] = counts.get(a, 0) + 1
    # (Q/Z)^(p') + Q_p/Z_p = Q/Z at equal twist
    for atom in [a for a in counts if a.kind == PRIME_TO_P]:
        partner = CoeffAtom(PRIMARY, atom.param, atom.twist)
        k = min(counts.get(atom, 0), counts.get(partner, 0))
        if k:
            whole = CoeffAtom(QMODZ, None, atom.twist)
            counts[atom] -= k
            counts[partner] -= k
            counts[whole] = counts.get(whole, 0) + k
    return tuple(sorted((a, m) for a, m in counts.items() if m))


class SymbolicModule:
    """Formal direct sum of twisted atoms with multiplicities."""

    __slots__ = ("atoms",)

    def __init__(self, pairs=()):
        self.atoms = _canonical([(a, int(m)) for a, m in pairs])

    @classmethod
    def atom(cls, kind, param=None, twist=0, mult=1):
        return cls([(CoeffAtom(kind, param, twist), mult)])

    @classmethod
    def from_group(cls, G, twist=0):
        pairs = [(CoeffAtom(FINITE, d, twist), 1) for d in G.invariant_factors]
        if G.rank:
            pairs.append((CoeffAtom(FREE_Z, None, twist), G.rank))
        return cls(pairs)

    @classmethod
    def from_list(cls, items):
        pairs = []
        for it in items:
            pairs.append((CoeffAtom(it["kind"], it.get("param"), it.get("twist", 0)), it.get("mult", 1)))
        return cls(pairs)

    def to_list(self):
        return [{"kind": a.kind, "param": a.param, "twist": a.twist, "mult": m} for a, m in self.atoms]

    def is_zero(self):
        return not self.atoms

    def is_torsion(self):
        return all(a.torsion for a, _ in self.atoms)

    def is_finite(self):
        return all(a.kind == FINITE for a, _ in self.atoms)

    def has_divisible(self):
        return any(a.divisible for a, _ in self.atoms)

    def twists(self):
        return sorted({a.twist for a, _ in self.atoms})

    def order(self):
        """Cardinality if finite, else None."""
        if not self.is_finite():
            return None
        n = 1
        for a, m in self.atoms:
            n *= a.param ** m
        return n

    def as_group(self):
        """The underlying finitely generated group, forgetting twists."""
        orders = []
        for a, m in self.atoms:
            if a.kind == FINITE:
                orders += [a.param] * m
            elif a.kind == FREE_Z:
                orders += [0] * m
            else:
                raise UnsupportedModule("%s is not finitely generated" % a)
        return FgAbGroup.from_orders(orders)

    def __add__(self, other):
        return SymbolicModule(self.atoms + other.atoms)

    def __mul__(self, k):
        return SymbolicModule([(a, m * k) for a, m in self.atoms])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymbolicModule):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __str__(self):
        if not self.atoms:
            return "0"
        parts = []
        for a, m in self.atoms:
            parts.append(str(a) if m == 1 else "%s^%d" % (_wrap(a), m))
        return " + ".join(parts)

    def __repr__(self):
        return "SymbolicModule(%s)" % self


def _wrap(atom):
    s = str(atom)
    return s if atom.kind in (FREE_Z, RATIONAL) and not atom.twist else "(%s)" % s


ZERO_MODULE = SymbolicModule()


def direct_sum_sym(*mods):
    out = ZERO_MODULE
    for m in mods:
        out = out + m
    return out


def twist(M, w):
    return SymbolicModule([(a.with_twist(a.twist + w), m) for a, m in M.atoms])


def _as_module(G):
    return G if isinstance(G, SymbolicModule) else SymbolicModule.from_group(G)


def _tensor_atoms(a, b):
    """``a (x) b`` where ``b`` is ``Z`` or ``Z/n``; returns a list of atoms."""
    w = a.twist + b.twist
    if b.kind == FREE_Z:
        return [a.with_twist(w)]
    n = b.param
    if a.kind == FREE_Z:
        return [CoeffAtom(FINITE, n, w)]
    if a.kind == FINITE:
        d = gcd(a.param, n)
    elif a.kind == RATIONAL:
        d = 1
    elif a.kind == QMODZ:
        d = n
    elif a.kind == PRIMARY:
        d = a.param ** valuation(n, a.param)
    else:
        d = prime_to(n, a.param)
    return [CoeffAtom(FINITE, d, w)] if d > 1 else []


def tensor_sym(M, G):
    """``M (x) G`` with at most one factor containing divisible atoms."""
    M, G = _as_module(M), _as_module(G)
    if M.has_divisible() and G.has_divisible():
        raise UnsupportedTensor("tensor of two modules with divisible atoms: %s and %s" % (M, G))
    if G.has_divisible():
        M, G = G, M
    pairs = []
    for a, m in M.atoms:
        for b, k in G.atoms:
            pairs.extend((c, m * k) for c in _tensor_atoms(a, b))
    return SymbolicModule(pairs)


def n_torsion_sym(M, n):
    if n < 1:
        raise ValueError("n must be positive")
    pairs = []
    for a, m in M.atoms:
        if a.kind == FINITE:
            d = gcd(a.param, n)
        elif a.kind in (FREE_Z, RATIONAL):
            d = 1
        elif a.kind == QMODZ:
            d = n
        elif a.kind == PRIMARY:
            d = a.param ** valuation(n, a.param)
        else:
            d = prime_to(n, a.param)
        if d > 1:
            pairs.append((CoeffAtom(FINITE, d, a.twist), m))
    return SymbolicModule(pairs)


def prime_to_p_sym(M, p):
    """Prime-to-p part of the torsion of ``M`` (``p = 0`` keeps all torsion)."""
    pairs = []
    for a, m in M.atoms:
        if a.kind in (FREE_Z, RATIONAL):
            continue
        if p == 0:
            pairs.append((a, m))
        elif a.kind == FINITE:
            d = prime_to(a.param, p)
            if d > 1:
                pairs.append((CoeffAtom(FINITE, d, a.twist), m))
        elif a.kind == QMODZ:
            pairs.append((CoeffAtom(PRIME_TO_P, p, a.twist), m))
        elif a.kind == PRIMARY:
            if a.param != p:
                pairs.append((a, m))
        elif a.param == p:
            pairs.append((a, m))
        else:
            raise UnsupportedModule("prime-to-%d part of %s has no atom" % (p, a))
    return SymbolicModule(pairs)


def p_primary_sym(M, p):
    if p == 0:
        return ZERO_MODULE
    pairs = []
    for a, m in M.atoms:
        if a.kind == FINITE:
            d = p ** valuation(a.param, p)
            if d > 1:
                pairs.append((CoeffAtom(FINITE, d, a.twist), m))
        elif a.kind == QMODZ or (a.kind == PRIME_TO_P and a.param != p):
            pairs.append((CoeffAtom(PRIMARY, p, a.twist), m))
        elif a.kind == PRIMARY and a.param == p:
            pairs.append((a, m))
    return SymbolicModule(pairs)


# modules over the absolute Galois group of a finite field

class ZhatModule:
    """A finitely generated group with a Frobenius automorphism, a twist and a field size ``q``."""

    __slots__ = ("group", "frobenius", "twist", "q")

    def __init__(self, group, frobenius=None, twist=0, q=2):
        if q < 2 or len(factorize(q)) != 1:
            raise ValueError("q must be a prime power, got %r" % q)
        if frobenius is None:
            frobenius = Homomorphism.identity(group)
        elif not isinstance(frobenius, Homomorphism):
            frobenius = Homomorphism(group, group, frobenius)
        if frobenius.source != group or frobenius.target != group:
            raise ValueError("Frobenius must be an endomorphism of the group")
        if group.rank:
            if group.invariant_factors or twist or frobenius != Homomorphism.identity(group):
                raise UnsupportedModule("only trivially acted, untwisted lattices are supported")
        elif not frobenius.is_isomorphism():
            raise ValueError("Frobenius must be invertible")
        self.group = group
        self.frobenius = frobenius
        self.twist = int(twist)
        self.q = q

    @property
    def char(self):
        return next(iter(factorize(self.q)))

    def twist_factor(self):
        """``q^w`` modulo the exponent of the group."""
        n = self.group.exponent()
        w = self.twist
        if w >= 0:
            return pow(self.q, w, n) if n > 1 else 0
        if gcd(self.q, n) != 1:
            raise NonInvertibleTwist("q = %d is not invertible modulo %d" % (self.q, n))
        return pow(pow(self.q, -1, n), -w, n)

    def endomorphism(self):
        """``e = q^w * frobenius - 1``."""
        G = self.group
        c = self.twist_factor()
        F = self.frobenius.matrix
        e = F.scale(c) - IntMatrix.identity(G.ngens)
        return Homomorphism(G, G, e)


def frobenius_kernel_cokernel(M):
    """``(H^0, H^1)`` of the procyclic group acting through ``q^w * frobenius``."""
    if M.group.rank:
        return M.group, FgAbGroup()
    e = M.endomorphism()
    return e.kernel(), e.cokernel()


# parsing

_ATOM_RE = re.compile(
    r"""^\s*(?P<base>\(Q/Z\)\^\((?P<pp>\d+)'\)|\(Q/Z\)'|Q_(?P<l>\d+)/Z_(?P=l)|Q/Z|Z/(?P<n>\d+)|Z|Q|0)
        \s*(?:\((?P<tw>[+-]?\d+)\))?\s*(?:\^\s*(?P<mult>\d+))?\s*$""",
    re.X,
)


def parse_module(text, p=None):
    """Parse strings such as ``"Z/3(-1) + (Q/Z)^(2')(-1)^2 + Q_5/Z_5"``.

    ``(Q/Z)'`` without an explicit prime needs ``p``.  A parenthesised atom
    may carry the multiplicity outside, as in ``(Z/3(-1))^2``.
    """
    pairs = []
    for raw in _split_sum(text):
        term = raw.strip()
        outer = re.match(r"^\((?P<inner>.*)\)\s*\^\s*(?P<mult>\d+)$", term)
        mult_outer = 1
        if outer and not term.startswith(("(Q/Z)^(", "(Q/Z)'")):
            term, mult_outer = outer.group("inner"), int(outer.group("mult"))
        m = _ATOM_RE.match(term)
        if not m:
            raise ValueError("cannot parse module term %r" % raw)
        base = m.group("base")
        w = int(m.group("tw") or 0)
        mult = int(m.group("mult") or 1) * mult_outer
        if base == "0":
            continue
        if base == "Z":
            atom = CoeffAtom(FREE_Z, None, w)
        elif base == "Q":
            atom = CoeffAtom(RATIONAL, None, w)
        elif base == "Q/Z":
            atom = CoeffAtom(QMODZ, None, w)
        elif m.group("n"):
            n = int(m.group("n"))
            if n == 1:
                continue
            atom = CoeffAtom(FINITE, n, w)
        elif m.group("l"):
            atom = CoeffAtom(PRIMARY, int(m.group("l")), w)
        else:
            prime = int(m.group("pp")) if m.group("pp") else p
            if prime is None:
                raise ValueError("(Q/Z)' needs a residue characteristic")
            atom = CoeffAtom(PRIME_TO_P, prime, w) if prime else CoeffAtom(QMODZ, None, w)
        pairs.append((atom, mult))
    return SymbolicModule(pairs)


def _split_sum(text):
    depth = 0
    cur = []
    out = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [t for t in out if t.strip()]
