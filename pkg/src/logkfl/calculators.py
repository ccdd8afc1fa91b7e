"""Cohomology over finite fields, two-row Leray sequences, and the trait and
Dedekind calculators.

Tables come in two modes.  ``computed`` evaluates every Galois cohomology
group with the Frobenius formulas of :mod:`logkfl.coefficients`.  ``paper``
takes the twisted upper-row terms to vanish, as the vanishing claims for
these bases assert; wherever this disagrees with the computation a
diagnostic record is attached (in both modes), so the two readings are
never conflated.
"""

from .abelian import FgAbGroup, Homomorphism
from .coefficients import (
    FREE_Z,
    PRIMARY,
    PRIME_TO_P,
    QMODZ,
    RATIONAL,
    SymbolicModule,
    ZERO_MODULE,
    ZhatModule,
    frobenius_kernel_cokernel,
    prime_to,
    valuation,
)
from .direct_images import (
    BaseDescription,
    BasePoint,
    SheafSpec,
    higher_direct_image,
    stalk_on_strict_site,
    vanishing_degree,
)
from .errors import MalformedRows, NonFiniteResidueField, UnsupportedBase, UnsupportedModule
from .matrix import factorize

COMPUTED = "computed"
PAPER = "paper"
MODES = (COMPUTED, PAPER)
TABLE_DEGREES = 5


class GradedModule:
    """Modules in degrees ``0..N``; beyond ``N`` the tail is ``zero`` or ``unknown``."""

    __slots__ = ("entries", "tail")

    def __init__(self, entries, tail="zero"):
        if tail not in ("zero", "unknown"):
            raise ValueError("tail must be 'zero' or 'unknown'")
        self.entries = list(entries)
        self.tail = tail

    def __getitem__(self, i):
        if i < 0:
            return ZERO_MODULE
        if i < len(self.entries):
            return self.entries[i]
        if self.tail == "zero":
            return ZERO_MODULE
        raise IndexError("degree %d lies in an unknown tail" % i)

    def __len__(self):
        return len(self.entries)

    def __add__(self, other):
        n = max(len(self), len(other))
        tail = "zero" if self.tail == other.tail == "zero" else "unknown"
        return GradedModule([self[i] + other[i] for i in range(n)], tail)

    def __eq__(self, other):
        if not isinstance(other, GradedModule):
            return NotImplemented
        n = max(len(self), len(other))
        return self.tail == other.tail and all(self[i] == other[i] for i in range(n))

    def is_zero(self):
        return self.tail == "zero" and all(m.is_zero() for m in self.entries)

    def truncated(self, n):
        return [self[i] for i in range(n)]

    def to_list(self):
        return [m.to_list() for m in self.entries]

    def __str__(self):
        body = ", ".join(str(m) for m in self.entries)
        return "(%s%s)" % (body, ", 0, ..." if self.tail == "zero" else ", ?")

    def __repr__(self):
        return "GradedModule%s" % self


ZERO_ROW = GradedModule([])


# Galois cohomology of Zhat

def _atom_cohomology(atom, q):
    p = next(iter(factorize(q)))
    w = atom.twist
    k = atom.kind
    if k == FREE_Z:
        if w:
            raise UnsupportedModule("twisted lattice Z(%d) has no Frobenius-stable integral form" % w)
        return [SymbolicModule.atom(FREE_Z), ZERO_MODULE, SymbolicModule.atom(QMODZ)]
    if k == RATIONAL:
        # q^w - 1 is invertible on Q for w != 0
        return [SymbolicModule.atom(RATIONAL) if not w else ZERO_MODULE, ZERO_MODULE]
    if k == QMODZ:
        if w:
            raise UnsupportedModule("Q/Z(%d) includes the p-part, where the twist is undefined" % w)
        return [SymbolicModule.atom(QMODZ), SymbolicModule.atom(QMODZ)]
    if k == PRIMARY:
        l = atom.param
        if not w:
            return [SymbolicModule.atom(PRIMARY, l), SymbolicModule.atom(PRIMARY, l)]
        if l == p:
            raise UnsupportedModule("Q_%d/Z_%d(%d) over a field of characteristic %d" % (l, l, w, p))
        h0 = l ** valuation(q ** abs(w) - 1, l)
        return [SymbolicModule.from_group(FgAbGroup.cyclic(h0)), ZERO_MODULE]
    if k == PRIME_TO_P:
        if not w:
            return [SymbolicModule.atom(PRIME_TO_P, atom.param), SymbolicModule.atom(PRIME_TO_P, atom.param)]
        if atom.param != p:
            raise UnsupportedModule("(Q/Z)^(%d') over a field of characteristic %d" % (atom.param, p))
        h0 = prime_to(q ** abs(w) - 1, p)
        return [SymbolicModule.from_group(FgAbGroup.cyclic(h0)), ZERO_MODULE]
    # finite cyclic
    h0, h1 = frobenius_kernel_cokernel(ZhatModule(FgAbGroup.cyclic(atom.param), None, w, q))
    return [SymbolicModule.from_group(h0), SymbolicModule.from_group(h1)]


def zhat_cohomology(M, q=None):
    """``H^u(Zhat, M)`` for ``u = 0, 1, 2``; zero above.

    ``M`` is a :class:`ZhatModule` (its own ``q``), or a :class:`SymbolicModule`
    with trivial action up to the twists on its atoms (needs ``q``).
    """
    if isinstance(M, ZhatModule):
        if M.group.rank:
            return GradedModule([SymbolicModule.from_group(M.group), ZERO_MODULE,
                                 SymbolicModule.atom(QMODZ, mult=M.group.rank)])
        h0, h1 = frobenius_kernel_cokernel(M)
        return GradedModule([SymbolicModule.from_group(h0), SymbolicModule.from_group(h1)])
    if isinstance(M, FgAbGroup):
        M = SymbolicModule.from_group(M)
    if q is None:
        raise ValueError("a residue field size q is required")
    rows = [ZERO_MODULE, ZERO_MODULE, ZERO_MODULE]
    for atom, mult in M.atoms:
        for u, h in enumerate(_atom_cohomology(atom, q)):
            rows[u] = rows[u] + h * mult
    while rows and rows[-1].is_zero():
        rows.pop()
    return GradedModule(rows)


# extension problems and tables

class ExtensionProblem:
    """``0 -> sub -> H^i -> quot -> 0`` with both ends nonzero."""

    __slots__ = ("degree", "sub", "quot")

    def __init__(self, degree, sub, quot):
        if sub.is_zero() or quot.is_zero():
            raise ValueError("an extension problem needs two nonzero ends")
        self.degree = degree
        self.sub = sub
        self.quot = quot

    left = property(lambda self: self.sub)
    right = property(lambda self: self.quot)

    def order(self):
        a, b = self.sub.order(), self.quot.order()
        return None if a is None or b is None else a * b

    def __eq__(self, other):
        return (isinstance(other, ExtensionProblem) and self.degree == other.degree
                and self.sub == other.sub and self.quot == other.quot)

    def __hash__(self):
        return hash((self.degree, self.sub, self.quot))

    def to_dict(self):
        return {"extension": {"sub": self.sub.to_list(), "quot": self.quot.to_list()}}

    def __str__(self):
        return "ext(%s by %s)" % (self.quot, self.sub)

    def __repr__(self):
        return "ExtensionProblem(degree=%d, sub=%s, quot=%s)" % (self.degree, self.sub, self.quot)


class Unresolved:
    """A term the calculator does not determine (opaque input or unknown connecting maps)."""

    __slots__ = ("degree",)

    def __init__(self, degree):
        self.degree = degree

    def order(self):
        return None

    def to_dict(self):
        return {"unresolved": self.degree}

    def __str__(self):
        return "?"

    def __eq__(self, other):
        return isinstance(other, Unresolved) and other.degree == self.degree

    def __hash__(self):
        return hash(("unresolved", self.degree))


def _entry_dict(e):
    if isinstance(e, SymbolicModule):
        return {"module": e.to_list()}
    return e.to_dict()


class Diagnostic:
    """A degree where the computed value disagrees with the claimed value."""

    __slots__ = ("degree", "computed", "claimed", "note")

    def __init__(self, degree, computed, claimed, note=""):
        self.degree = degree
        self.computed = computed
        self.claimed = claimed
        self.note = note

    def to_dict(self):
        return {"degree": self.degree, "computed": self.computed.to_list(),
                "claimed": self.claimed.to_list(), "note": self.note}

    def __repr__(self):
        return "Diagnostic(%d: computed %s, claimed %s)" % (self.degree, self.computed, self.claimed)


class LESTerm:
    __slots__ = ("label", "value")

    def __init__(self, label, value):
        self.label = label
        self.value = value

    def is_zero(self):
        return isinstance(self.value, SymbolicModule) and self.value.is_zero()

    def order(self):
        return self.value.order()

    def to_dict(self):
        d = {"label": self.label}
        d.update(_entry_dict(self.value))
        return d


class CohomologyTable:
    def __init__(self, entries, mode, diagnostics=(), lower=None, upper=None, q0=None, les=None,
                 tail="zero"):
        self.entries = list(entries)
        self.mode = mode
        self.diagnostics = list(diagnostics)
        self.lower = lower
        self.upper = upper
        self.q0 = q0
        self.les = les or []
        self.tail = tail

    def __getitem__(self, i):
        if i < len(self.entries):
            return self.entries[i]
        if self.tail == "zero":
            return ZERO_MODULE
        raise IndexError(i)

    def modules(self):
        """Entries as modules, or None where an extension problem remains."""
        return [e if isinstance(e, SymbolicModule) else None for e in self.entries]

    def has_extension_problems(self):
        return any(isinstance(e, ExtensionProblem) for e in self.entries)

    def to_dict(self):
        return {
            "mode": self.mode,
            "degrees": [_entry_dict(e) for e in self.entries],
            "tail": self.tail,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "lower": self.lower.to_list() if self.lower is not None else None,
            "upper": self.upper.to_list() if self.upper is not None else None,
            "q0": self.q0,
            "les": [t.to_dict() for t in self.les],
        }

    def __str__(self):
        return "(%s, 0, ...)" % ", ".join(str(e) for e in self.entries)


def leray_two_row(lower, upper, q0, connecting_zero=(), degrees=TABLE_DEGREES,
                  labels=("H^%d_fl", "H^%d_kfl", "H^%d(R^%d)")):
    """Long exact sequence of a two-row spectral sequence with rows ``0`` and ``q0``.

    Returns ``(les, entries)``.  ``les`` is the sequence
    ``0 -> lower^q0 -> H^q0 -> upper^0 -> lower^{q0+1} -> H^{q0+1} -> ...`` as a
    list of :class:`LESTerm`; ``entries`` gives ``H^i`` for ``0 <= i < degrees``.
    The connecting map ``upper^j -> lower^{j+q0+1}`` is treated as zero when one
    end vanishes or ``j`` is listed in ``connecting_zero``.
    """
    if q0 not in (1, 2):
        raise MalformedRows("the upper row must sit in degree 1 or 2, got %r" % (q0,))
    if not isinstance(lower, GradedModule) or not isinstance(upper, GradedModule):
        raise MalformedRows("rows must be graded modules")
    if upper.tail != "zero":
        raise MalformedRows("the upper row must vanish in high degrees")
    lo_fl, lo_kfl, lo_up = labels

    def delta_zero(j):
        if j < 0:
            return True
        src = upper[j]
        try:
            tgt = lower[j + q0 + 1]
        except IndexError:
            return j in connecting_zero or src.is_zero()
        return src.is_zero() or tgt.is_zero() or j in connecting_zero

    entries = []
    for i in range(degrees):
        if i < q0:
            entries.append(lower[i])
            continue
        j = i - q0
        if not (delta_zero(j - 1) and delta_zero(j)):
            entries.append(Unresolved(i))
            continue
        sub, quot = lower[i], upper[j]
        if sub.is_zero():
            entries.append(quot)
        elif quot.is_zero():
            entries.append(sub)
        else:
            entries.append(ExtensionProblem(i, sub, quot))
    les = [LESTerm("0", ZERO_MODULE)]
    last = max(degrees, len(upper) + q0 + 1)
    for i in range(q0, last):
        j = i - q0
        les.append(LESTerm(lo_fl % i, _safe(lower, i)))
        les.append(LESTerm(lo_kfl % i, entries[i] if i < len(entries) else Unresolved(i)))
        les.append(LESTerm(lo_up % (j, q0), upper[j]))
    return les, entries


def _safe(row, i):
    try:
        return row[i]
    except IndexError:
        return Unresolved(i)


def les_fragments(les):
    """Split a sequence at its zero terms into fragments with zero ends."""
    frags = []
    cur = []
    for t in les:
        if t.is_zero():
            if cur:
                frags.append(cur)
            cur = []
        else:
            cur.append(t)
    if cur:
        frags.append(cur)
    return frags


def les_order_check(les):
    """``[(labels, num, den)]`` for every finite zero-ended fragment of ``les``.

    ``num`` and ``den`` are the products of orders in even and odd positions;
    exactness forces them to agree.  A trailing fragment is skipped unless the
    sequence ends in a zero term.
    """
    frags = les_fragments(les)
    if les and not les[-1].is_zero() and frags:
        frags = frags[:-1]
    out = []
    for frag in frags:
        orders = [t.order() for t in frag]
        if any(o is None for o in orders):
            continue
        num, den = 1, 1
        for k, o in enumerate(orders):
            if k % 2:
                den *= o
            else:
                num *= o
        out.append(([t.label for t in frag], num, den))
    return out


def check_les_exactness(les):
    return all(num == den for _, num, den in les_order_check(les))


# the calculators

def _point_rows(F, x):
    """Lower-row independent data at one point: ``(q0, computed upper row)``."""
    base = BaseDescription("log_trait", [x])
    if F.cls == SheafSpec.RATIONAL:
        return 1, ZERO_ROW
    if F.cls == SheafSpec.FINITE_L:
        q0 = 1
        stalk = stalk_on_strict_site(higher_direct_image(base, F, q0), x)
        if stalk.is_zero():
            return q0, ZERO_ROW
        if stalk != SymbolicModule.from_group(F.group, -1):
            raise AssertionError("unexpected stalk %s" % stalk)
        return q0, zhat_cohomology(ZhatModule(F.group, _frobenius(F), -1, x.q))
    q0 = 2
    stalk = stalk_on_strict_site(higher_direct_image(base, F, q0), x)
    return q0, zhat_cohomology(stalk, x.q)


def _frobenius(F):
    if F.frobenius is None:
        return None
    return Homomorphism(F.group, F.group, F.frobenius)


def _lower_row(F, q):
    if F.cls == SheafSpec.FINITE_L:
        return zhat_cohomology(ZhatModule(F.group, _frobenius(F), 0, q))
    return zhat_cohomology(F.sections(), q)


def _diagnostics(upper, q0, note):
    out = []
    for u in range(len(upper)):
        if not upper[u].is_zero():
            out.append(Diagnostic(u + q0, upper[u], ZERO_MODULE,
                                  "H^%d of the twisted stalk; %s" % (u, note)))
    return out


def dvr_calculator(q, F, p=None, mode=COMPUTED, degrees=TABLE_DEGREES):
    """Kummer log flat cohomology of a henselian log trait with residue field ``F_q``."""
    if mode not in MODES:
        raise ValueError("mode must be one of %r" % (MODES,))
    f = factorize(q)
    if q < 2 or len(f) != 1:
        raise ValueError("q must be a prime power")
    char = next(iter(f))
    if p is not None and p != char:
        raise ValueError("q = %d is not a power of p = %d" % (q, p))
    x = BasePoint("x", char, q, 1)
    base = BaseDescription.log_trait(char, q)
    lower = _lower_row(F, q)
    q0, computed_upper = _point_rows(F, x)
    if vanishing_degree(base, F) > q0 + 1:
        raise MalformedRows("more than one higher row survives")
    diags = _diagnostics(computed_upper, q0, "claimed value 0")
    upper = computed_upper if mode == COMPUTED else ZERO_ROW
    les, entries = leray_two_row(lower, upper, q0, degrees=degrees)
    return CohomologyTable(entries, mode, diags, lower, upper, q0, les)


class DedekindReport:
    """Relation between Kummer log flat and etale cohomology over a Dedekind base."""

    def __init__(self, mode, points, upper, q0, relations, sequence, diagnostics, summary):
        self.mode = mode
        self.points = points
        self.upper = upper
        self.q0 = q0
        self.relations = relations
        self.sequence = sequence
        self.diagnostics = diagnostics
        self.summary = summary

    def all_isomorphisms(self):
        return all(r["relation"] == "iso" for r in self.relations)

    def to_dict(self):
        return {
            "mode": self.mode,
            "q0": self.q0,
            "points": [{"point": x.to_dict(), "terms": row.to_list(), "included": inc}
                       for x, row, inc in self.points],
            "upper": self.upper.to_list(),
            "relations": self.relations,
            "sequence": [t.to_dict() for t in self.sequence],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "summary": self.summary,
        }


def _etale_symbols(etale_row, n):
    if etale_row is None:
        return ["H^%d_et" % i for i in range(n)]
    out = list(etale_row.entries if isinstance(etale_row, GradedModule) else etale_row)
    out = [str(s) for s in out]
    while len(out) < n:
        out.append("H^%d_et" % len(out))
    return out


def dedekind_calculator(points, F, etale_row=None, mode=COMPUTED, degrees=TABLE_DEGREES):
    """Compare ``H^i_kfl(X, F)`` with the opaque etale row over a Dedekind base.

    ``points`` are :class:`BasePoint` objects or ``(p, q)`` pairs for the marked
    set ``S``; each needs a finite residue field.
    """
    if mode not in MODES:
        raise ValueError("mode must be one of %r" % (MODES,))
    base = points if isinstance(points, BaseDescription) else BaseDescription.dedekind(points)
    for x in base.points:
        if x.q is None:
            raise NonFiniteResidueField("point %s has no finite residue field" % x.label)
        if x.log_rank != 1:
            raise UnsupportedBase("point %s has log rank %d" % (x.label, x.log_rank))
    if F.cls == SheafSpec.FINITE_L and F.frobenius is not None:
        raise UnsupportedModule("a Dedekind base needs a constant sheaf")

    per_point = []
    computed_upper = ZERO_ROW
    q0 = 2 if F.cls == SheafSpec.LATTICE else 1
    for x in base.points:
        included = not (F.cls == SheafSpec.FINITE_L and x.p == F.l)
        row = _point_rows(F, x)[1] if included else ZERO_ROW
        per_point.append((x, row, included))
        computed_upper = computed_upper + row
    diags = _diagnostics(computed_upper, q0, "claimed value 0")
    upper = computed_upper if mode == COMPUTED else ZERO_ROW

    n = max(degrees, len(upper) + q0 + 2)
    et = _etale_symbols(etale_row, n)
    relations = []
    for i in range(n):
        j = i - q0
        touched = (not upper[j].is_zero()) or (not upper[j - 1].is_zero())
        relations.append({"degree": i, "relation": "les" if touched else "iso"})
    sequence = []
    width = 2 if F.cls == SheafSpec.FINITE_L else len(upper)
    if width:
        sequence.append(LESTerm("0", ZERO_MODULE))
        for i in range(q0, width + q0):
            sequence += [LESTerm(et[i], Unresolved(i)), LESTerm("H^%d_kfl" % i, Unresolved(i)),
                         LESTerm("+_x H^%d(G_x, R^%d)" % (i - q0, q0), upper[i - q0])]
        last = width + q0
        sequence += [LESTerm(et[last], Unresolved(last)), LESTerm("H^%d_kfl" % last, Unresolved(last)),
                     LESTerm("0", ZERO_MODULE)]
    if upper.is_zero():
        summary = "H^i_kfl = H^i_et for all i"
    else:
        first = min(r["degree"] for r in relations if r["relation"] == "les")
        last = max(r["degree"] for r in relations if r["relation"] == "les")
        summary = "H^i_kfl = H^i_et for i < %d and i > %d; exact sequence in between" % (first, last)
    return DedekindReport(mode, per_point, upper, q0, relations, sequence, diags, summary)
