"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 audit failure,
3 MMS enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import audit, baselines, bobw, faithful, model, serialize, shares
from .errors import BudgetExceeded, FairShareError, InvariantViolation

EXIT_OK, EXIT_USAGE, EXIT_AUDIT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _fail("usage", message)
        raise SystemExit(EXIT_USAGE)


def _fail(kind: str, message: str, **extra) -> None:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)


def _load(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(obj, out: str | None) -> None:
    text = serialize.dumps(obj) + "\n"
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _reports_ok(reports) -> int:
    failed = [r for r in reports if not r.passed]
    for r in failed:
        _fail("audit", f"{r.to_json()['name']} failed", witness=getattr(r, "witness", None))
    return EXIT_AUDIT if failed else EXIT_OK


# --- subcommands ------------------------------------------------------------

def cmd_shares(args) -> int:
    inst = serialize.instance_from_json(_load(args.input))
    for i in inst.agents:
        line = f"agent {i}: PS={shares.proportional_share(inst, i)} TPS={shares.tps(inst, i)}"
        if args.mms:
            line += f" MMS={shares.mms(inst, i, args.budget)}"
        print(line)
    return EXIT_OK


def cmd_mms(args) -> int:
    inst = serialize.instance_from_json(_load(args.input))
    agents = [args.agent] if args.agent is not None else list(inst.agents)
    for i in agents:
        print(f"agent {i}: MMS={shares.mms(inst, i, args.budget)}")
    return EXIT_OK


def cmd_bobw(args) -> int:
    inst = serialize.instance_from_json(_load(args.input))
    res = bobw.bobw_allocate(inst)
    _emit(bobw.result_to_json(res), args.output)
    return _reports_ok(res.audits)


def cmd_faithful(args) -> int:
    fa = serialize.fractional_from_json(_load(args.input))
    if args.inst:
        inst = serialize.instance_from_json(_load(args.inst))
    else:
        # without valuations the eating order falls back to item index
        inst = model.new_instance([[0] * fa.m for _ in range(fa.n)])
    lot, cert = faithful.faithful_implement(fa, inst)
    _emit({
        **serialize.lottery_to_json(lot),
        "certificate": {
            "min_value": [serialize.q(v) for v in cert.min_value],
            "max_value": [serialize.q(v) for v in cert.max_value],
            "bound": [serialize.q(v) for v in cert.bound],
            "strictly_fractional": len(fa.strictly_fractional()),
        },
    }, args.output)
    return EXIT_OK


def cmd_baseline(args) -> int:
    inst = serialize.instance_from_json(_load(args.input))
    if args.mech == "uniform":
        lot = baselines.uniform_prop1(inst)
        reports = [audit.check_ex_ante_proportional(lot, inst), audit.check_ex_post_prop1(lot, inst)]
        _emit({**serialize.lottery_to_json(lot), "audits": [r.to_json() for r in reports]}, args.output)
        return _reports_ok(reports)
    alloc = baselines.envy_cycle_elimination(inst)
    half = audit.check_half_fair(alloc, inst)
    ef1 = audit.check_ef1(alloc, inst)
    _emit({"bundles": serialize.allocation_to_json(alloc),
           "half_fair": half.to_json(), "audits": [ef1.to_json()]}, args.output)
    return _reports_ok([half, ef1])


def cmd_check(args) -> int:
    inst = serialize.instance_from_json(_load(args.inst))
    lot = serialize.lottery_from_json(_load(args.input))
    for a in lot.allocations():
        model.check_allocation_fits(a, inst.n, inst.m)
    reports = audit.audit_lottery(lot, inst, support_bound=args.support_bound)
    if len(lot) == 1:
        (alloc,) = lot.allocations()
        reports += [audit.check_ef1(alloc, inst), audit.check_efx(alloc, inst),
                    audit.check_half_fair(alloc, inst)]
    if args.frac:
        reports.append(audit.check_implements(lot, serialize.fractional_from_json(_load(args.frac))))
    _emit({"audits": [r.to_json() for r in reports]}, None)
    return _reports_ok(reports)


def cmd_gen(args) -> int:
    if args.family == "notmms":
        inst = model.gen_not_mms(args.n, Fraction(args.eps))
    elif args.family == "units":
        inst = model.gen_identical_units(args.n)
    else:
        if args.m is None:
            raise UsageError("--family random needs --m")
        inst = model.gen_random(args.n, args.m, args.max_value, args.seed)
    _emit(serialize.instance_to_json(inst), args.output)
    return EXIT_OK


# --- suite ------------------------------------------------------------------

def _random_fractional(rng: random.Random, n: int, m: int) -> model.FractionalAllocation:
    x = [[Fraction(0)] * m for _ in range(n)]
    for j in range(m):
        d = rng.randint(1, 12)
        left = d
        for i in range(n):
            k = rng.randint(0, left)
            x[i][j] = Fraction(k, d)
            left -= k
    return model.FractionalAllocation.of(x)


def run_seed(seed: int) -> dict[str, bool]:
    """One round of the property battery; maps check name to pass/fail."""
    rng = random.Random(seed)
    n, m = rng.randint(2, 4), rng.randint(2, 10)
    inst = model.gen_random(n, m, 20, seed)
    out: dict[str, bool] = {}

    def attempt(name, fn):
        try:
            out[name] = bool(fn())
        except InvariantViolation:
            out[name] = False

    attempt("share_chain", lambda: audit.check_share_chain(inst).passed)

    def run_bobw():
        res = bobw.bobw_allocate(inst)
        return res.passed and len(res.lottery) <= n

    attempt("bobw", run_bobw)

    def run_uniform():
        lot = baselines.uniform_prop1(inst)
        ante = audit.check_ex_ante_proportional(lot, inst)
        return all(v == 0 for v in ante.margins) and audit.check_ex_post_prop1(lot, inst).passed

    attempt("uniform_prop1", run_uniform)

    def run_envy():
        alloc = baselines.envy_cycle_elimination(inst)
        return audit.check_ef1(alloc, inst).passed and audit.check_half_fair(alloc, inst).passed

    attempt("envy_cycle", run_envy)

    def run_faithful():
        fa = _random_fractional(rng, min(n, 4), min(m, 6))
        sub = model.new_instance([row[:fa.m] for row in inst.values[:fa.n]])
        lot, cert = faithful.faithful_implement(fa, sub)
        return (audit.check_implements(lot, fa).passed and cert.holds()
                and len(lot) <= len(fa.strictly_fractional()) + 1)

    attempt("faithful", run_faithful)
    return out


def cmd_suite(args) -> int:
    seeds = range(args.start, args.start + args.seeds)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(run_seed, seeds))
    names = list(results[0]) if results else []
    rows = [(name, len(results), sum(1 for r in results if not r[name])) for name in names]
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["check", "runs", "failures"])
        w.writerows(rows)
    else:
        print(f"{'check':<16}{'runs':>6}{'failures':>10}")
        for name, runs, bad in rows:
            print(f"{name:<16}{runs:>6}{bad:>10}")
    return EXIT_AUDIT if any(bad for _, _, bad in rows) else EXIT_OK


# --- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fairshare", description="Exact fair division of indivisible items.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("shares", help="per-agent PS and TPS (and MMS with --mms)")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--mms", action="store_true")
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_shares)

    s = sub.add_parser("mms", help="maximin shares by exhaustive search")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--agent", type=int)
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_mms)

    s = sub.add_parser("bobw", help="best-of-both-worlds lottery with certificate")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_bobw)

    s = sub.add_parser("faithful", help="implement a fractional allocation as a lottery")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--inst", help="instance JSON; sets the eating order and spread bound")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_faithful)

    s = sub.add_parser("baseline", help="uniform Prop1 lottery or envy-cycle elimination")
    s.add_argument("--mech", choices=["uniform", "envycycle"], required=True)
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("check", help="audit a lottery or allocation against an instance")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--inst", required=True)
    s.add_argument("--frac", help="fractional allocation the lottery should implement")
    s.add_argument("--support-bound", type=int)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("gen", help="write an instance JSON")
    s.add_argument("--family", choices=["notmms", "units", "random"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--max-value", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", default="1/100")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("suite", help="property battery over random seeds")
    s.add_argument("--seeds", type=int, required=True)
    s.add_argument("--start", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        _fail("budget", str(exc), needed=exc.needed, budget=exc.budget)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        _fail("invariant", str(exc))
        return EXIT_AUDIT
    except (UsageError, FairShareError, ValueError, TypeError) as exc:
        _fail("input", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
