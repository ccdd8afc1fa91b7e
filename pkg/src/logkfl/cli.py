"""Command-line front end.

Every verb takes its inputs as flags or as a JSON document (``--input FILE``,
``-`` for stdin) whose keys are the flag names.  ``--format machine`` prints
canonical JSON; ``human`` prints aligned text.  Exit status: 0 on success,
2 on invalid input, 3 when a size bound is hit or a colimit does not
stabilize.
"""

import argparse
import json
import sys

from .abelian import FgAbGroup, group_from_presentation
from .calculators import (
    COMPUTED,
    MODES,
    dedekind_calculator,
    dvr_calculator,
    zhat_cohomology,
)
from .coefficients import FINITE, FREE_Z, SymbolicModule, ZhatModule, parse_module
from .direct_images import BaseDescription, BasePoint, SheafSpec, higher_direct_image, vanishing_degree
from .errors import LogKflError, NotStabilized, SizeBound
from .groupcoh import (
    FiniteAbelianGroup,
    cohomology_bruteforce,
    cohomology_cyclic_closed,
    profinite_closed_form,
    profinite_colimit_report,
)
from .invariants import SUITES, run_all
from .kummer import LogPointModel, cech_cohomology, cech_cohomology_rational, cech_colimit
from .matrix import IntMatrix, factorize, snf

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_LIMIT = 3


class InputError(ValueError):
    pass


# parsing helpers

def _json_value(v):
    if isinstance(v, str):
        try:
            return json.loads(v)
        except json.JSONDecodeError as e:
            raise InputError("invalid JSON %r: %s" % (v, e)) from None
    return v


def parse_matrix(v):
    rows = _json_value(v)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("a matrix is a list of rows")
    if len({len(r) for r in rows}) > 1:
        raise InputError("matrix rows have different lengths")
    if not all(isinstance(x, int) and not isinstance(x, bool) for r in rows for x in r):
        raise InputError("matrix entries must be integers")
    return IntMatrix.from_rows(rows, len(rows[0]) if rows else 0)


def parse_group(v):
    """``"Z^2 + Z/4"``, ``"Z/2 x Z/2"``, ``"0"``, or ``{"rank": r, "torsion": [...]}``."""
    if isinstance(v, dict):
        return FgAbGroup.from_dict(v)
    if isinstance(v, list):
        return FgAbGroup.from_orders(v)
    text = str(v).replace(" x ", " + ").replace("*", "+")
    M = parse_module(text)
    if any(a.kind not in (FINITE, FREE_Z) or a.twist for a, _ in M.atoms):
        raise InputError("%r is not a finitely generated abelian group" % v)
    return M.as_group()


def parse_finite_group(v):
    G = parse_group(v)
    if not G.is_finite():
        raise InputError("%s is not finite" % G)
    return FiniteAbelianGroup(list(G.invariant_factors))


def parse_sheaf(v):
    """``lattice:R``, ``rational:D``, ``finite:L:GROUP`` or a finite l-group such as ``Z/9``."""
    if isinstance(v, dict):
        cls = v.get("class")
        if cls == SheafSpec.LATTICE:
            return SheafSpec.lattice(int(v["rank"]))
        if cls == SheafSpec.RATIONAL:
            return SheafSpec.rational(int(v["dim"]))
        G = parse_group(v["group"])
        return SheafSpec.finite(int(v["l"]), G, v.get("frobenius"))
    text = str(v).strip()
    head, _, rest = text.partition(":")
    if head == "lattice":
        return SheafSpec.lattice(int(rest))
    if head == "rational":
        return SheafSpec.rational(int(rest))
    if head == "finite":
        l, _, g = rest.partition(":")
        return SheafSpec.finite(int(l), parse_group(g))
    G = parse_group(text)
    primes = set()
    for d in G.invariant_factors:
        primes |= set(factorize(d))
    if G.rank or len(primes) != 1:
        raise InputError("%s is not a finite l-group; use lattice:R or rational:D" % G)
    return SheafSpec.finite(primes.pop(), G)


def parse_points(v):
    pts = _json_value(v)
    out = []
    for k, x in enumerate(pts):
        if isinstance(x, dict):
            out.append(BasePoint.from_dict(x))
        else:
            p, q = x
            out.append(BasePoint("x%d" % (k + 1), int(p), None if q is None else int(q)))
    return out


def parse_int_list(v):
    vals = _json_value(v)
    if not isinstance(vals, list) or not all(isinstance(x, int) for x in vals):
        raise InputError("expected a list of integers")
    return vals


# output helpers

def group_record(G):
    d = G.to_dict()
    d["name"] = str(G)
    return d


def module_record(M):
    return {"module": M.to_list(), "name": str(M)}


def _table_lines(rows):
    width = max((len(a) for a, _ in rows), default=0)
    return ["%s  %s" % (a.ljust(width), b) for a, b in rows]


# verbs

def cmd_snf(a):
    A = parse_matrix(a.matrix)
    res = snf(A)
    data = {"D": res.D.tolist(), "U": res.U.tolist(), "V": res.V.tolist(),
            "diagonal": res.diag, "rank": res.rank}
    human = ["D = diag(%s)" % ", ".join(map(str, [d for d in res.diag if d] or [0])),
             "U = %s" % res.U.tolist(), "V = %s" % res.V.tolist()]
    return data, human


def cmd_group(a):
    if a.relations is not None:
        rel = _json_value(a.relations)
        if rel:
            G = group_from_presentation(parse_matrix(rel), a.gens)
        else:
            G = FgAbGroup.free(a.gens or 0)
    elif a.group is not None:
        G = parse_group(_maybe_json(a.group))
    else:
        raise InputError("give --group or --relations")
    data = group_record(G)
    data["order"] = G.order()
    return data, [str(G)]


def _maybe_json(v):
    if isinstance(v, str) and v.strip()[:1] in "[{":
        return _json_value(v)
    return v


def cmd_cohomology(a):
    G = parse_finite_group(_maybe_json(a.group))
    M = parse_group(_maybe_json(a.coeff))
    H = cohomology_bruteforce(G, M, a.degree, a.size_bound)
    return {"degree": a.degree, "group": group_record(H)}, ["H^%d(%s, %s) = %s" % (a.degree, G, M, H)]


def cmd_cyclic_closed(a):
    M = parse_group(_maybe_json(a.coeff))
    H = cohomology_cyclic_closed(a.m, M, a.degree)
    return {"degree": a.degree, "group": group_record(H)}, ["H^%d(Z/%d, %s) = %s" % (a.degree, a.m, M, H)]


def cmd_profinite(a):
    M = parse_group(_maybe_json(a.coeff))
    ladder = parse_int_list(a.ladder) if a.ladder is not None else None
    rep = profinite_colimit_report(a.rank, M, a.p, a.degree, ladder, a.method)
    closed = profinite_closed_form(a.rank, M, a.p, a.degree)
    value = SymbolicModule.from_group(rep.value)
    data = rep.to_dict()
    data.update(closed_form=module_record(closed), agrees=value == closed)
    human = _table_lines([("colimit", str(rep.value)), ("closed form", str(closed)),
                          ("stable at rung", str(rep.step)), ("agrees", str(value == closed))])
    return data, human


def cmd_cech(a):
    model = LogPointModel(a.rank, a.p)
    m, t = model.split(a.n)
    if str(a.coeff).strip() == "Q":
        V = cech_cohomology_rational(model, a.n, a.degree, a.size_bound, a.method)
        data = {"degree": a.degree, "module": module_record(V), "kummer_group": [m] * a.rank,
                "model": model.to_dict(), "n": a.n}
        return data, ["H^%d(X_%d/X, Q) = %s" % (a.degree, a.n, V)]
    M = parse_group(_maybe_json(a.coeff))
    H = cech_cohomology(model, a.n, M, a.degree, a.size_bound, a.method)
    data = {"degree": a.degree, "group": group_record(H), "kummer_group": [m] * a.rank,
            "model": model.to_dict(), "n": a.n}
    return data, ["H^%d(X_%d/X, %s) = %s" % (a.degree, a.n, M, H)]


def cmd_cech_colimit(a):
    model = LogPointModel(a.rank, a.p)
    M = parse_module(str(a.coeff), a.p)
    V = cech_colimit(model, M, a.degree)
    return module_record(V), ["colim_n H^%d(X_n/X, %s) = %s" % (a.degree, M, V)]


def _base(a):
    if a.base is not None:
        return BaseDescription.from_dict(_json_value(a.base))
    if a.points is not None:
        return BaseDescription.dedekind(parse_points(a.points))
    if a.p is None:
        raise InputError("give --base, --points or --p")
    return BaseDescription.log_trait(a.p, a.q)


def cmd_direct_image(a):
    base = _base(a)
    F = parse_sheaf(_maybe_json(a.sheaf))
    E = higher_direct_image(base, F, a.degree)
    data = {"degree": a.degree, "image": E.to_list(), "name": str(E),
            "vanishing_degree": vanishing_degree(base, F)}
    return data, ["R^%d eps_* %r = %s" % (a.degree, F, E),
                  "vanishes from degree %d" % vanishing_degree(base, F)]


def cmd_zhat(a):
    if a.frobenius is not None:
        G = parse_group(_maybe_json(a.module))
        M = ZhatModule(G, parse_matrix(a.frobenius), a.twist, a.q)
        H = zhat_cohomology(M)
    else:
        primes = factorize(a.q) if a.q and a.q > 1 else {}
        if len(primes) != 1:
            raise InputError("q must be a prime power")
        H = zhat_cohomology(parse_module(str(a.module), next(iter(primes))), a.q)
    rows = [("H^%d" % u, str(H[u])) for u in range(len(H))] + [("H^>=%d" % len(H), "0")]
    return {"degrees": H.to_list(), "tail": H.tail}, _table_lines(rows)


def _table_output(t):
    rows = [("H^%d_kfl" % i, str(e)) for i, e in enumerate(t.entries)]
    human = ["mode: %s" % t.mode] + _table_lines(rows)
    human.append("upper row (degree %d): %s" % (t.q0, t.upper))
    for d in t.diagnostics:
        human.append("diagnostic: degree %d computed %s, claimed %s (%s)"
                     % (d.degree, d.computed, d.claimed, d.note))
    return t.to_dict(), human


def cmd_calc_dvr(a):
    F = parse_sheaf(_maybe_json(a.sheaf))
    return _table_output(dvr_calculator(a.q, F, a.p, a.mode))


def cmd_calc_dedekind(a):
    F = parse_sheaf(_maybe_json(a.sheaf))
    etale = None
    if a.etale is not None:
        etale = [str(x) for x in _json_value(a.etale)]
    rep = dedekind_calculator(parse_points(a.points), F, etale, a.mode)
    human = ["mode: %s" % rep.mode, rep.summary]
    human += _table_lines([("H^%d" % r["degree"], r["relation"]) for r in rep.relations])
    if rep.sequence:
        human.append(" -> ".join("%s" % (t.label if t.label.startswith("H") or t.label == "0"
                                         else "%s = %s" % (t.label, t.value)) for t in rep.sequence))
    for d in rep.diagnostics:
        human.append("diagnostic: degree %d computed %s, claimed %s" % (d.degree, d.computed, d.claimed))
    return rep.to_dict(), human


def cmd_verify(a):
    names = [a.suite] if a.suite else None
    results = run_all(names)
    data = {k: [{"check": n, "ok": ok, "detail": d} for n, ok, d in v] for k, v in results.items()}
    human = []
    for k, v in results.items():
        for n, ok, d in v:
            human.append("%s  %-14s %s%s" % ("PASS" if ok else "FAIL", k, n, (" (%s)" % d) if d and not ok else ""))
    data["ok"] = all(ok for v in results.values() for _, ok, _ in v)
    return data, human


VERBS = {
    "snf": cmd_snf,
    "group": cmd_group,
    "cohomology": cmd_cohomology,
    "cyclic-closed": cmd_cyclic_closed,
    "profinite": cmd_profinite,
    "cech": cmd_cech,
    "cech-colimit": cmd_cech_colimit,
    "direct-image": cmd_direct_image,
    "zhat": cmd_zhat,
    "calc-dvr": cmd_calc_dvr,
    "calc-dedekind": cmd_calc_dedekind,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--size-bound", type=int, default=None,
                        help="largest cochain space allowed (default: LOGKFL_SIZE_BOUND or 2^20)")
    common.add_argument("--input", default=None, help="JSON document with the verb's arguments (- for stdin)")

    parser = _Parser(prog="logkfl", description="Kummer log flat cohomology calculators")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form of an integer matrix")
    p.add_argument("--matrix")

    p = sub.add_parser("group", parents=[common], help="normal form of an abelian group")
    p.add_argument("--group")
    p.add_argument("--relations", help="relation rows as JSON")
    p.add_argument("--gens", type=int, default=None)

    p = sub.add_parser("cohomology", parents=[common], help="cohomology of a finite abelian group (bar complex)")
    p.add_argument("--group")
    p.add_argument("--coeff", default="Z")
    p.add_argument("--degree", type=int, default=0)

    p = sub.add_parser("cyclic-closed", parents=[common], help="closed-form cohomology of Z/m")
    p.add_argument("--m", type=int)
    p.add_argument("--coeff", default="Z")
    p.add_argument("--degree", type=int, default=0)

    p = sub.add_parser("profinite", parents=[common], help="colimit over (Z/m)^r and its closed form")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--coeff")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--ladder", default=None)
    p.add_argument("--method", choices=("product", "bar"), default="product")

    p = sub.add_parser("cech", parents=[common], help="Cech cohomology of a Kummer cover")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--n", type=int)
    p.add_argument("--coeff", default="Z")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--method", choices=("auto", "nerve", "product"), default="auto")

    p = sub.add_parser("cech-colimit", parents=[common], help="colimit of Cech cohomology over the tower")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--coeff")
    p.add_argument("--degree", type=int, default=1)

    p = sub.add_parser("direct-image", parents=[common], help="higher direct image as skyscraper terms")
    p.add_argument("--base", default=None, help="base description as JSON")
    p.add_argument("--points", default=None, help="Dedekind marked points [[p, q], ...]")
    p.add_argument("--p", type=int, default=None, help="log trait residue characteristic")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--sheaf")
    p.add_argument("--degree", type=int, default=1)

    p = sub.add_parser("zhat", parents=[common], help="cohomology of Zhat over F_q")
    p.add_argument("--module")
    p.add_argument("--q", type=int)
    p.add_argument("--frobenius", default=None, help="Frobenius matrix (module is then a group)")
    p.add_argument("--twist", type=int, default=0)

    p = sub.add_parser("calc-dvr", parents=[common], help="cohomology table of a henselian log trait")
    p.add_argument("--q", type=int)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--sheaf")
    p.add_argument("--mode", choices=MODES, default=COMPUTED)

    p = sub.add_parser("calc-dedekind", parents=[common], help="kfl versus etale cohomology of a Dedekind base")
    p.add_argument("--points")
    p.add_argument("--sheaf")
    p.add_argument("--etale", default=None, help="JSON list of symbols for the etale row")
    p.add_argument("--mode", choices=MODES, default=COMPUTED)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--suite", choices=sorted(SUITES), default=None)
    return parser


def _apply_input(args, stdin):
    if args.input is None:
        return
    text = stdin.read() if args.input == "-" else open(args.input).read()
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise InputError("the input document must be a JSON object")
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in ("verb", "input"):
            raise InputError("unknown field %r for %s" % (key, args.verb))
        setattr(args, attr, value)


def _render(data, human, fmt):
    if fmt == "machine":
        return json.dumps(data, sort_keys=True, separators=(",", ":"))
    return "\n".join(human)


def run(argv, stdout=None, stderr=None, stdin=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    try:
        args = build_parser().parse_args(argv)
        if args.verb is None:
            raise InputError("missing verb; choose from %s" % ", ".join(VERBS))
        _apply_input(args, stdin)
        data, human = VERBS[args.verb](args)
    except (SizeBound, NotStabilized) as e:
        print("logkfl: %s: %s" % (type(e).__name__, e), file=stderr)
        return EXIT_LIMIT
    except (InputError, LogKflError, ValueError, KeyError, TypeError, OSError) as e:
        print("logkfl: error: %s" % e, file=stderr)
        return EXIT_INVALID
    print(_render(data, human, args.format), file=stdout)
    if args.verb == "verify" and not data["ok"]:
        return 1
    return EXIT_OK


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
