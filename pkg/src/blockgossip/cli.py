"""Command-line interface: generate-graph, build-covering, run, compare, sweep."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness


def _add_common_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="override output directory")
    parser.add_argument("--seed", type=int, help="override base seed")
    parser.add_argument("--trials", type=int, help="override trial count")
    parser.add_argument("--iters", type=int, help="override iteration count")
    parser.add_argument("--workers", type=int, help="override worker count")
    parser.add_argument("--collapse", action="store_true", help="record node values for trial 0")


def _load_raw(args: argparse.Namespace) -> dict:
    raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.out is not None:
        raw["output_dir"] = args.out
    if args.seed is not None:
        raw["base_seed"] = args.seed
    if args.trials is not None:
        raw["trials"] = args.trials
    if args.iters is not None:
        raw["iterations"] = args.iters
    if args.workers is not None:
        raw["workers"] = args.workers
    if args.collapse:
        raw["record_collapse"] = True
    return raw


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockgossip", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gg = sub.add_parser("generate-graph", help="write a graph edge-list file")
    gg.add_argument("kind", choices=["er", "lattice", "complete", "path"])
    gg.add_argument("--n", type=int, help="node count (er, complete, path)")
    gg.add_argument("--p", type=float, help="edge probability (er)")
    gg.add_argument("--rows", type=int, help="lattice rows")
    gg.add_argument("--cols", type=int, help="lattice cols")
    gg.add_argument("--seed", type=int, default=0)
    gg.add_argument("--out", required=True)

    bc = sub.add_parser("build-covering", help="build a covering and print its constants")
    bc.add_argument("kind", choices=["ies", "clique", "path", "random"])
    bc.add_argument("--graph", required=True, help="graph edge-list file")
    bc.add_argument("--length", type=int, default=10, help="walk length (path)")
    bc.add_argument("--size", type=int, default=10, help="block size (random)")
    bc.add_argument("--count", type=int, help="block count before patching (path, random)")
    bc.add_argument("--seed", type=int, default=0)
    bc.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run one experiment from a config file")
    _add_common_overrides(run)

    cmp_ = sub.add_parser("compare", help="run several protocols on one graph")
    _add_common_overrides(cmp_)

    sweep = sub.add_parser("sweep", help="run one protocol across a p grid")
    _add_common_overrides(sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate-graph":
            params = {}
            if args.kind == "er":
                if args.n is None or args.p is None:
                    raise ValueError("er needs --n and --p")
                params = {"n": args.n, "p": args.p, "seed": args.seed}
            elif args.kind == "lattice":
                if args.rows is None or args.cols is None:
                    raise ValueError("lattice needs --rows and --cols")
                params = {"rows": args.rows, "cols": args.cols}
            else:
                if args.n is None:
                    raise ValueError(f"{args.kind} needs --n")
                params = {"n": args.n}
            harness.cmd_generate_graph(args.kind, args.out, **params)
        elif args.command == "build-covering":
            params = {"length": args.length, "size": args.size, "seed": args.seed}
            if args.count is not None:
                params["count"] = args.count
            harness.cmd_build_covering(args.graph, args.kind, args.out, **params)
        elif args.command == "run":
            harness.cmd_run(harness.ExperimentConfig.from_dict(_load_raw(args)))
        elif args.command == "compare":
            harness.cmd_compare(_load_raw(args))
        elif args.command == "sweep":
            harness.cmd_sweep(_load_raw(args))
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
