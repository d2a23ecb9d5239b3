"""Command-line front end: `qdt validate|cuts|mutate|from-dimer|dt|wallcross|factorize|dilog`."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import fixtures
from .dimer import dimer_to_qp, euler_characteristic, load_dimer, matching_to_cut, perfect_matchings
from .errors import BudgetExceeded, ParseError, QDTError
from .ffcount import DEFAULT_BUDGET
from .mutation import mutate_qp
from .qp import (QP, find_cuts, is_cut, is_strict_sink, is_strict_source, load_qp, qp_to_dict, report)
from .qtorus import (CentralCharge, Region, _ray_order, dilog_coefficient, dt_series, hn_factorize,
                     wallcross_check)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class Config:
    budget: int = DEFAULT_BUDGET
    primes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.primes is not None and len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be distinct")

    def count_kw(self) -> dict:
        kw = {"budget": self.budget}
        if self.primes:
            kw["method"] = "interpolate"
            kw["sample_primes"] = self.primes
        return kw


def _load(spec: str) -> QP:
    if not os.path.exists(spec) and spec in fixtures.NAMES:
        return fixtures.load(spec)
    return load_qp(spec)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _cut(qp: QP, arg: str | None) -> frozenset[str]:
    if arg is not None:
        cut = frozenset(x for x in arg.split(",") if x)
    elif qp.cut is not None:
        cut = qp.cut
    else:
        cuts = find_cuts(qp)
        if not cuts:
            raise QDTError("the potential has no cut")
        cut = cuts[0]
    if not is_cut(qp, cut):
        raise QDTError(f"{sorted(cut)} is not a cut")
    return cut


def _region(qp: QP, args) -> Region:
    n = len(qp.quiver.vertices)
    if args.box and args.degree is not None:
        raise ParseError("give either --box or --degree")
    if args.box:
        b = _ints(args.box)
        if len(b) != n:
            raise ParseError(f"--box needs {n} entries")
        return Region.box(b)
    if args.degree is not None:
        return Region.total_degree(n, args.degree)
    raise ParseError("a truncation is required: --box v1,v2,... or --degree N")


def _emit(obj, args, text: str | None = None):
    out = json.dumps(obj, indent=2, sort_keys=False) if (args.json or text is None) else text
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def cmd_validate(args, cfg) -> int:
    qp = _load(args.file)
    rep = report(qp)
    _emit(rep, args, "valid" if rep["valid"] else "invalid:\n  " + "\n  ".join(rep["problems"]))
    return EXIT_OK if rep["valid"] else EXIT_FAIL


def cmd_cuts(args, cfg) -> int:
    qp = _load(args.file)
    rows = []
    for c in find_cuts(qp, restrict_to_W_arrows=not args.all_arrows):
        rows.append({
            "cut": sorted(c),
            "strict_sources": [k for k in qp.quiver.vertices if is_strict_source(qp.quiver, c, k)],
            "strict_sinks": [k for k in qp.quiver.vertices if is_strict_sink(qp.quiver, c, k)],
        })
    text = "\n".join(f"{{{', '.join(r['cut'])}}}  sources {r['strict_sources']}  sinks {r['strict_sinks']}" for r in rows)
    _emit({"cuts": rows}, args, text or "no cuts")
    return EXIT_OK


def cmd_mutate(args, cfg) -> int:
    qp = _load(args.file)
    cut = _cut(qp, args.cut)
    new, new_cut = mutate_qp(qp, cut, args.vertex)
    _emit(qp_to_dict(new.with_cut(new_cut)), args, None)
    return EXIT_OK


def cmd_from_dimer(args, cfg) -> int:
    g = load_dimer(args.file)
    qp = dimer_to_qp(g)
    d = qp_to_dict(qp)
    if args.matchings:
        ms = perfect_matchings(g)
        d = {"qp": d, "euler_characteristic": euler_characteristic(g),
             "perfect_matchings": [sorted(matching_to_cut(g, m)) for m in ms]}
    _emit(d, args, None)
    return EXIT_OK


def cmd_dt(args, cfg) -> int:
    qp = _load(args.file)
    cut = _cut(qp, args.cut)
    region = _region(qp, args)
    s = dt_series(qp, cut, region, **cfg.count_kw())
    rows = s.to_report()
    _emit({"cut": sorted(cut), "series": rows}, args,
          "\n".join(f"{r['v']}: {r['coeff']}" for r in rows))
    return EXIT_OK


def cmd_wallcross(args, cfg) -> int:
    qp = _load(args.file)
    cut = _cut(qp, args.cut)
    region = _region(qp, args)
    rep = wallcross_check(qp, cut, args.vertex, region, timing=args.timing, **cfg.count_kw())
    text = ("PASS" if rep["pass"] else "FAIL") + (
        f": {rep['checked_equalities']} equalities, {rep['checked_support']} support zeros,"
        f" {rep['checked_mutated_support']} mutated-side support zeros")
    if rep["first_counterexample"]:
        text += f"\nfirst counterexample: {json.dumps(rep['first_counterexample'])}"
    _emit(rep, args, text)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def cmd_factorize(args, cfg) -> int:
    qp = _load(args.file)
    cut = _cut(qp, args.cut)
    region = _region(qp, args)
    Z = CentralCharge.parse(args.charge)
    if len(Z.values) != len(qp.quiver.vertices):
        raise ParseError(f"--charge needs {len(qp.quiver.vertices)} values")
    A = dt_series(qp, cut, region, **cfg.count_kw())
    factors = hn_factorize(A, Z)
    rays = [r for r in _ray_order(factors) if len(factors[r].coeffs) > 1]
    out = [{"ray": list(r), "series": factors[r].to_report()} for r in rays]
    text = "\n".join(f"ray {r['ray']}: " + ", ".join(f"{x['v']}: {x['coeff']}" for x in r["series"] if any(x["v"]))
                     for r in out)
    _emit({"rays": out}, args, text)
    return EXIT_OK


def cmd_dilog(args, cfg) -> int:
    rows = [{"n": n, "coeff": dilog_coefficient(n).to_string()} for n in range(args.n + 1)]
    _emit(rows, args, "\n".join(f"{r['n']}: {r['coeff']}" for r in rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdt", description="Refined DT invariants of quivers with potential.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration operation budget")
    common.add_argument("--primes", default=None, help="sample primes for interpolation, e.g. 2,3,5,7")
    common.add_argument("--output", default=None, help="write to a file instead of stdout")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_, file=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if file:
            sp.add_argument("file", help="QP JSON file or bundled fixture name")
        sp.set_defaults(fn=fn)
        return sp

    def trunc(sp):
        sp.add_argument("--box", default=None, help="componentwise bound v1,v2,...")
        sp.add_argument("--degree", type=int, default=None, help="total-degree bound")
        sp.add_argument("--cut", default=None, help="cut arrows id,id,...")

    add("validate", cmd_validate, "check a QP file")
    sp = add("cuts", cmd_cuts, "list cuts with strict sources and sinks")
    sp.add_argument("--all-arrows", action="store_true", help="also allow arrows absent from the potential")
    sp = add("mutate", cmd_mutate, "mutate at a strict source")
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--cut", default=None)
    sp = add("from-dimer", cmd_from_dimer, "quiver with potential of a dimer")
    sp.add_argument("--matchings", action="store_true", help="also list perfect matchings as cuts")
    trunc(add("dt", cmd_dt, "refined DT series"))
    sp = add("wallcross", cmd_wallcross, "check the mutation wall-crossing identity")
    trunc(sp)
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")
    sp = add("factorize", cmd_factorize, "HN factorization along a central charge")
    trunc(sp)
    sp.add_argument("--charge", required=True, help="per-vertex values like '-1+1i,1+1i'")
    sp = add("dilog", cmd_dilog, "quantum dilogarithm coefficients", file=False)
    sp.add_argument("--n", type=int, default=4)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(budget=args.budget, primes=_ints(args.primes) if args.primes else None)
        return args.fn(args, cfg)
    except BudgetExceeded as e:
        print(json.dumps({"error": "BudgetExceeded", "message": str(e),
                          "hint": "use a smaller --box/--degree or raise --budget"}), file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, FileNotFoundError, ValueError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_USAGE
    except QDTError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
