"""Command-line driver: one subcommand per verification, JSON report on stdout."""
from __future__ import annotations

import argparse
import json
import sys

from . import verify as V
from .lfun import SatakeError
from .quadspace import SpaceError, parse_descriptor

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SATAKE_COMMANDS = {"verify-theorem1", "verify-basic-function", "lfunction-eval"}
NO_TRIALS = {"lfunction-eval", "basic-coeffs"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gspin-gj", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in list(V.COMMANDS) + ["suite"]:
        sp = sub.add_parser(name)
        sp.add_argument("--space", default=None if name == "suite" else "n=1,E=F,p=3",
                        help="descriptor such as n=2,E=unram:u=2,p=5 (suite: ';'-separated list)")
        sp.add_argument("--degree", "-M", type=int, default=4, dest="degree")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="write the JSON report here as well")
        if name not in NO_TRIALS:
            sp.add_argument("--trials", type=int, default=None)
        if name in SATAKE_COMMANDS:
            sp.add_argument("--satake", default=None, help="e.g. '2,-1/3;E=5' or '2;E=3,7' for split E")
        if name == "verify-theorem1":
            sp.add_argument("--mode", choices=["direct", "recursive", "both"], default="both")
        if name == "suite":
            sp.add_argument("--primes", default="3,5", help="primes for the default space list")
    return ap


def run(args: argparse.Namespace) -> dict:
    if args.degree < 0:
        raise ValueError("--degree must be >= 0")
    if args.command == "suite":
        if args.space:
            spaces = [s.strip() for s in args.space.split(";") if s.strip()]
        else:
            spaces = [d for p in args.primes.split(",") for d in V.theorem_spaces(int(p))]
        for d in spaces:
            parse_descriptor(d)
        return V.run_suite(spaces, M=args.degree, seed=args.seed, trials=args.trials)
    S = parse_descriptor(args.space)
    kw = {"M": args.degree, "seed": args.seed}
    if args.command not in NO_TRIALS:
        kw["trials"] = args.trials if args.trials is not None else V.DEFAULT_TRIALS[args.command]
        if kw["trials"] < 1:
            raise ValueError("--trials must be positive")
    if args.command in SATAKE_COMMANDS and args.satake:
        kw["satake"] = args.satake
    if args.command == "verify-theorem1":
        kw["mode"] = args.mode
    return V.COMMANDS[args.command](S, **kw)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        rep = run(args)
    except (SpaceError, SatakeError, ValueError) as exc:
        print(f"{ap.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(rep, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return EXIT_PASS if rep["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
