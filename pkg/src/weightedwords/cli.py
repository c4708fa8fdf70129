"""Command-line entry point.

    weightedwords verify [--suite S | --identity I] [--N N] [--nmax n] [--report PATH]
    weightedwords enumerate FAMILY --n N [--stats]
    weightedwords table THEOREM --n N [--m M] [--k K]
    weightedwords list
    weightedwords eval EXPR [--N N] [--let n=5]

Exit status: 0 when everything checked passes, 1 on a failed check, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import colored, partitions, tables
from .dsl.evaluator import Evaluator
from .errors import ConfigError, DSLSyntaxError, NoWitnessForm, WeightedWordsError
from .identities import registry
from .report import summary_table, to_jsonl
from .suite import FORMATS, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weightedwords", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check registry identities")
    sel = v.add_mutually_exclusive_group()
    sel.add_argument("--suite", help="run entries tagged with this suite")
    sel.add_argument("--identity", help="run one identity (or every entry of a group)")
    v.add_argument("--N", dest="order", type=int, help="truncation order, overriding each entry")
    v.add_argument("--nmax", type=int, help="upper end of every n range")
    v.add_argument("--report", metavar="PATH", help="write the report here instead of stdout")
    v.add_argument("--format", choices=FORMATS, default="text")
    v.add_argument("--jobs", type=int, default=1, help="worker processes")
    v.add_argument("--file", metavar="PATH", help="identity file to use instead of the built-ins")
    v.add_argument("--systems", metavar="PATH", help="extra transition systems")
    v.add_argument("--timings", action="store_true", help="include wall time in jsonl records")

    e = sub.add_parser("enumerate", help="list the partitions of n in a family")
    e.add_argument("family", help="family name (see 'list')")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--stats", action="store_true", help="append part statistics")
    e.add_argument("--format", choices=("text", "json"), default="text")

    t = sub.add_parser("table", help="side-by-side witness lists for a theorem")
    t.add_argument("theorem")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--m", type=int)
    t.add_argument("--k", type=int)
    t.add_argument("--format", choices=("text", "json"), default="text")

    ls = sub.add_parser("list", help="show identities, families, systems and tables")
    ls.add_argument("--file", metavar="PATH", help="identity file to list instead of the built-ins")

    ev = sub.add_parser("eval", help="evaluate one relation-language expression")
    ev.add_argument("expr")
    ev.add_argument("--N", dest="order", type=int, default=20)
    ev.add_argument("--let", action="append", default=[], metavar="NAME=INT", help="bind an index")
    return p


def _entries(path: Optional[str]):
    return registry.load(path) if path else registry.builtin()


def cmd_verify(args, out) -> int:
    config = SuiteConfig(order=args.order, n_max=args.nmax, identity=args.identity, suite=args.suite,
                         format=args.format, jobs=args.jobs, timings=args.timings)
    systems = colored.load(args.systems) if args.systems else None
    reports, status = run_suite(config, _entries(args.file), systems)
    body = to_jsonl(reports, args.timings) if config.format == "jsonl" else summary_table(reports)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(body)
        out.write(f"{sum(r.passed for r in reports)}/{len(reports)} identities pass; report in {args.report}\n")
    else:
        out.write(body)
    return status


def cmd_enumerate(args, out) -> int:
    if args.n < 0:
        raise ConfigError("--n must be non-negative")
    name = args.family
    if name not in partitions.FAMILIES and name not in partitions.TWO_COLOR:
        known = sorted(partitions.FAMILIES) + sorted(partitions.TWO_COLOR)
        raise ConfigError(f"unknown family {name!r}; known: {', '.join(known)}")
    items = tables.witnesses(name, args.n)
    if args.format == "json":
        recs = []
        for it in items:
            rec = {"partition": tables.label(it)}
            if args.stats:
                rec["stats"] = _stats(it).__dict__
            recs.append(rec)
        out.write(json.dumps({"family": name, "n": args.n, "count": len(items), "partitions": recs},
                             ensure_ascii=False, sort_keys=True) + "\n")
        return EXIT_OK
    for it in items:
        line = tables.label(it)
        if args.stats:
            s = _stats(it)
            line += (f"  len={s.length} odd={s.odd} mod3={','.join(map(str, s.mod3))}"
                     f" mod6={','.join(map(str, s.mod6))}")
        out.write(line + "\n")
    out.write(f"{len(items)} partitions of {args.n} in {name}\n")
    return EXIT_OK


def _stats(item) -> partitions.PartitionStats:
    return partitions.stats(tables._parts(item))


def cmd_table(args, out) -> int:
    table = tables.emit_table(args.theorem, args.n, args.m, args.k)
    out.write(table.to_json() if args.format == "json" else table.text())
    return EXIT_OK if table.balanced else EXIT_FAIL


def cmd_list(args, out) -> int:
    entries = _entries(args.file)
    width = max((len(e.name) for e in entries), default=0)
    out.write("identities:\n")
    for e in entries:
        tags = " ".join(e.suites)
        out.write(f"  {e.name:<{width}}  [{tags}]{'  ' + e.about if e.about else ''}\n")
    out.write("families:\n")
    for name, fam in sorted(partitions.FAMILIES.items()):
        out.write(f"  {name}{'  ' + fam.about if fam.about else ''}\n")
    for name, (r, mod) in sorted(partitions.TWO_COLOR.items()):
        out.write(f"  {name}  red parts free, green parts {r} mod {mod}\n")
    out.write("transition systems:\n")
    for name in sorted(colored.BUILTIN):
        out.write(f"  {name}  colors {' '.join(colored.BUILTIN[name].colors)}\n")
    out.write("tables:\n")
    for name, form in sorted(tables.FORMS.items()):
        out.write(f"  {name}  {form.about}\n")
    return EXIT_OK


def cmd_eval(args, out) -> int:
    env = {}
    for item in args.let:
        name, sep, value = item.partition("=")
        try:
            env[name.strip()] = int(value)
        except ValueError:
            sep = ""
        if not sep or not name.strip():
            raise ConfigError(f"--let expects NAME=INT, got {item!r}")
    out.write(f"{Evaluator(args.order)(args.expr, env)}\n")
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "enumerate": cmd_enumerate, "table": cmd_table,
            "list": cmd_list, "eval": cmd_eval}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except DSLSyntaxError as exc:
        sys.stderr.write(f"syntax error: {exc}\n")
        return EXIT_USAGE
    except (ConfigError, NoWitnessForm, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except WeightedWordsError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
