"""``qwmvc`` command line: generate, solve, bench, report, verify.

Exit codes: 0 success, 1 usage or parse error, 2 resource failure
(capacity, exhausted budget, unwritable output).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import (
    EnsembleConfig,
    aggregate,
    curves_csv,
    family_summary_lines,
    heatmap_csv,
    load_config,
    read_records_csv,
    run_bench,
)
from .ctqw import FreezeParams, freeze_evolution_check, t_opt, trotter_exactness, unitarity_defect
from .errors import CapacityError, GenerationError, GraphParseError, ParameterError
from .exact import DEFAULT_BUDGET, bnb_mvc, brute_force_mvc
from .graph import EnsembleSpec, format_edgelist, read_edgelist
from .heuristics import FastVcParams, SaParams, solve

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2
SOLVE_SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwmvc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a random graph as an edge list")
    gen.add_argument("--family", choices=("ER", "BA", "REG", "WS"), required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--param", type=float, required=True,
                     help="ER: p, BA: m, REG: k, WS: ring degree")
    gen.add_argument("--beta", type=float, default=0.1, help="WS rewiring probability")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, help="output file (default: stdout)")

    sol = sub.add_parser("solve", help="solve one graph file")
    sol.add_argument("graph", type=Path)
    sol.add_argument("--solver", choices=("quantum", "2approx", "fastvc", "sa", "exact",
                                          "brute"), default="quantum")
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--time-mode", choices=("topt", "fixed001"), default="topt")
    sol.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sol.add_argument("--trace", action="store_true")
    sol.add_argument("--json", action="store_true")

    ben = sub.add_parser("bench", help="run an ensemble sweep")
    ben.add_argument("--config", type=Path, help="JSON config (default: desk preset)")
    ben.add_argument("--out", type=Path, default=Path("out"))
    ben.add_argument("--time-mode", choices=("topt", "fixed001"))
    ben.add_argument("--budget", type=int)

    rep = sub.add_parser("report", help="summarise a records.csv")
    rep.add_argument("records", type=Path)

    ver = sub.add_parser("verify", help="numerical checks of the walk on one graph")
    ver.add_argument("graph", type=Path)
    ver.add_argument("--frozen", type=int, nargs="*", default=[0])
    ver.add_argument("--omega", type=float, nargs="*", default=[1e2, 1e3, 1e4, 1e6])
    ver.add_argument("--time", type=float, help="default: t_opt(n)")
    ver.add_argument("--json", action="store_true")
    return parser


def _read_graph(path):
    try:
        return read_edgelist(path)
    except OSError as exc:
        raise GraphParseError(f"{path}: {exc.strerror}") from None


def cmd_generate(args) -> int:
    g = EnsembleSpec(args.family, args.n, args.param, args.seed, args.beta).generate()
    text = (f"# {args.family} n={args.n} param={args.param:g} seed={args.seed}\n"
            + format_edgelist(g))
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    g = _read_graph(args.graph)
    report = {"schema": SOLVE_SCHEMA_VERSION, "solver": args.solver, "n": g.n,
              "edges": g.num_edges, "proven_optimal": None, "trace": None}
    code = EXIT_OK
    if args.solver in ("exact", "brute"):
        res = bnb_mvc(g, budget=args.budget) if args.solver == "exact" else brute_force_mvc(g)
        cover = sorted(res.cover)
        report.update(size=res.size, cover=cover, valid=True, wall_time=res.wall_time,
                      iterations=res.nodes_explored, proven_optimal=res.proven_optimal)
        if not res.proven_optimal:
            code = EXIT_RESOURCE
    else:
        res = solve(g, args.solver, seed=args.seed, time_mode=args.time_mode,
                    sa_params=SaParams(seed=args.seed), fastvc_params=FastVcParams(seed=args.seed))
        report.update(size=res.size, cover=res.sorted_cover(), valid=res.valid,
                      wall_time=res.wall_time, iterations=res.iterations)
        if args.trace and res.trace:
            report["trace"] = [s.as_dict() for s in res.trace]
    if args.json:
        print(json.dumps(report, sort_keys=True))
        return code
    cover = ",".join(str(v) for v in report["cover"])
    line = (f"size={report['size']} cover=[{cover}] valid={str(report['valid']).lower()} "
            f"wall_time={report['wall_time']:.4f}s")
    if report["proven_optimal"] is not None:
        line += f" proven_optimal={str(report['proven_optimal']).lower()}"
    print(line)
    for i, step in enumerate(report["trace"] or (), start=1):
        print(f"  iter {i}: vertex={step['vertex']} score={step['score']:.6f} "
              f"t={step['time']:.6f} remaining_edges={step['remaining_edges']}")
    return code


def cmd_bench(args) -> int:
    config = load_config(args.config) if args.config else EnsembleConfig()
    overrides = {}
    if args.time_mode:
        overrides["time_mode"] = args.time_mode
    if args.budget:
        overrides["exact_budget"] = args.budget
    if overrides:
        config = EnsembleConfig.from_dict({**config.to_dict(), **overrides})
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        probe = args.out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"qwmvc: cannot write to {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_RESOURCE
    run, _, elapsed = run_bench(config, args.out)
    for line in family_summary_lines(run.records):
        print(line)
    print(f"{len(run.records)} records from {run.instances} instances "
          f"in {elapsed:.1f}s -> {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        records = read_records_csv(args.records)
    except OSError as exc:
        raise GraphParseError(f"{args.records}: {exc.strerror}") from None
    print("# mean ratio by family")
    sys.stdout.write(heatmap_csv(aggregate(records, ("family",))))
    print("# ratio by family and n")
    sys.stdout.write(curves_csv(aggregate(records, ("family", "n"))))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    t = args.time if args.time is not None else t_opt(max(g.n, 1))
    reports = [freeze_evolution_check(g, FreezeParams(om, frozenset(args.frozen)), t)
               for om in args.omega]
    out = {"n": g.n, "time": t,
           "trotter_max_diff": trotter_exactness(g, t),
           "unitarity_defect": unitarity_defect(g, t),
           "freezing": [r.as_dict() for r in reports]}
    if args.json:
        print(json.dumps(out, sort_keys=True))
        return EXIT_OK
    print(f"n={g.n} t={t:.6f}")
    print(f"trotter_max_diff={out['trotter_max_diff']:.3e}")
    print(f"unitarity_defect={out['unitarity_defect']:.3e}")
    for r in reports:
        print(f"omega={r.omega:.0e} leakage={r.leakage:.3e} "
              f"max_amplitude_deviation={r.max_amplitude_deviation:.3e}")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "bench": cmd_bench,
            "report": cmd_report, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except GraphParseError as exc:
        print(f"qwmvc: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"qwmvc: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, GenerationError) as exc:
        print(f"qwmvc: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
