"""Command-line front end: ``cellia <command> [options]``.

Commands
--------
graph     export the interference graph and its cluster partition
run       solve a scheme on seeded channels, certify it and measure rates
certify   re-certify a stored (or freshly solved) solution
bound     converse bound for one graph
table     per-triangle configuration table with f_M values
sweep     achieved DoF and converse bound over several radii
oracle    exhaustive integer optimum on a small graph

Every report goes to stdout as JSON with sorted keys (or CSV with
``--format csv`` where a table makes sense).  ``--output-dir`` (default:
``$CELLIA_OUTPUT_DIR``) additionally stores the full documents as files.

Exit codes: 0 success, 2 certification failure, 3 invalid configuration,
4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .channel import generate
from .converse import bound_report, config_table, two_fifths_bound_holds, integer_oracle
from .exceptions import DegenerateChannelError
from .lattice import build_graph, graph_to_json
from .schemes import SCHEMES, BeamformerSolution, solve
from .verifier import DEFAULT_POWERS, certify_alignment, measure_rates

EXIT_OK = 0
EXIT_CERT_FAIL = 2
EXIT_CONFIG = 3
EXIT_DEGENERATE = 4

ENV_OUTPUT_DIR = "CELLIA_OUTPUT_DIR"

log = logging.getLogger("cellia")


class ConfigError(Exception):
    """Invalid command-line or config-file input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _scheme_args(p):
    p.add_argument("--r", type=int, required=True, help="region half-width")
    p.add_argument("--m", type=int, default=2, help="transmit antennas")
    p.add_argument("--n", type=int, default=2, help="receive antennas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9, help="relative alignment tolerance")


def _common_args(p, default):
    p.add_argument("--config", default=default, help="JSON file with a 'command' key and option values")
    p.add_argument("--output-dir", default=default, help=f"also write files here (default ${ENV_OUTPUT_DIR})")
    p.add_argument("--format", choices=("json", "csv"), default=default)
    p.add_argument("-v", "--verbose", action="store_true", default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cellia", description="Cellular interference alignment toolkit.")
    _common_args(parser, None)
    parser.set_defaults(config=None, output_dir=None, format="json", verbose=False)
    # shared options are accepted after the command as well; SUPPRESS keeps
    # the subcommand from clobbering values given before it
    common = _Parser(add_help=False)
    _common_args(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    add = sub.add_parser

    def sub_add(name, **kw):
        return add(name, parents=[common], **kw)

    sub.add_parser = sub_add

    p = sub.add_parser("graph", help="export the interference graph")
    p.add_argument("--r", type=int, required=True)

    p = sub.add_parser("run", help="solve, certify and measure rates")
    _scheme_args(p)
    p.add_argument("--powers", type=_float_list, default=list(DEFAULT_POWERS))

    p = sub.add_parser("certify", help="certify a solution")
    _scheme_args(p)
    p.add_argument("--solution", help="solution JSON written by 'run' (solved afresh if omitted)")
    p.add_argument("--no-cancellation", action="store_true", help="treat every neighbour as interference")

    p = sub.add_parser("bound", help="converse bound")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=Fraction, default=None, help="dual multiplier (default 1/(2M))")
    p.add_argument("--oracle", action="store_true", help="also run the exhaustive oracle")

    p = sub.add_parser("table", help="configuration table")
    p.add_argument("--m", type=int, default=2)

    p = sub.add_parser("sweep", help="DoF and bound over radii")
    p.add_argument("--r-list", type=_int_list, default=[1, 2, 3, 4, 5, 6])
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("oracle", help="exhaustive integer optimum")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    parser.commands = sub.choices
    return parser


# --------------------------------------------------------------------- commands


def _check_r(r):
    if r < 1:
        raise ConfigError(f"r must be >= 1, got {r}")


def _check_scheme(args):
    _check_r(args.r)
    if (args.m, args.n) not in SCHEMES:
        raise ConfigError(f"no scheme for (M, N) = ({args.m}, {args.n}); supported: {sorted(SCHEMES)}")
    if args.tol <= 0:
        raise ConfigError("tol must be positive")


def _check_m(m):
    if m < 1:
        raise ConfigError(f"M must be >= 1, got {m}")


def cmd_graph(args):
    _check_r(args.r)
    doc = graph_to_json(build_graph(args.r))
    return EXIT_OK, doc, {f"graph_r{args.r}.json": _dumps(doc)}, None


def _solve(args, both_directions=False):
    graph = build_graph(args.r)
    channels = generate(graph, args.m, args.n, seed=args.seed, both_directions=both_directions)
    return graph, channels, solve(graph, channels, seed=args.seed)


def cmd_run(args):
    _check_scheme(args)
    powers = args.powers
    if len(powers) < 2 or min(powers) == max(powers) or min(powers) <= 0:
        raise ConfigError("powers need at least two distinct positive values")
    graph, channels, solution = _solve(args)
    cert = certify_alignment(graph, channels, solution, tol=args.tol)
    rates = measure_rates(graph, channels, solution, powers)
    stem = f"run_r{args.r}_m{args.m}_n{args.n}_s{args.seed}"
    summary = {
        "command": "run",
        "r": args.r,
        "M": args.m,
        "N": args.n,
        "seed": args.seed,
        "scheme": solution.scheme,
        "cells": len(graph.vertices),
        "average_dof": str(solution.average_dof),
        "demoted": [v.pair() for v in solution.demoted],
        "certificate": cert.to_json(),
        "powers": list(rates.powers),
        "average_rate": rates.average_rate,
        "average_dof_slope": rates.average_dof_slope,
    }
    sol_doc = solution.to_json()
    sol_doc["certificate"] = cert.to_json()
    files = {
        f"{stem}.json": _dumps(summary),
        f"{stem}_solution.json": _dumps(sol_doc),
        f"{stem}_rates.csv": rates.to_csv(),
    }
    return (EXIT_OK if cert.passed else EXIT_CERT_FAIL), summary, files, rates.to_csv()


def cmd_certify(args):
    _check_scheme(args)
    cancellation = not args.no_cancellation
    if args.solution:
        try:
            doc = json.loads(Path(args.solution).read_text())
            solution = BeamformerSolution.from_json(doc)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot read solution {args.solution!r}: {exc}") from exc
        graph = build_graph(args.r)
        channels = generate(graph, args.m, args.n, seed=args.seed, both_directions=not cancellation)
        if set(solution.dof) != set(graph.vertices):
            raise ConfigError("solution cells do not match the graph of the given r")
    else:
        graph, channels, solution = _solve(args, both_directions=not cancellation)
    cert = certify_alignment(graph, channels, solution, tol=args.tol, cancellation=cancellation)
    doc = {"command": "certify", "cancellation": cancellation, "certificate": cert.to_json()}
    return (EXIT_OK if cert.passed else EXIT_CERT_FAIL), doc, {}, None


def cmd_bound(args):
    _check_r(args.r)
    _check_m(args.m)
    if args.lam is not None and args.lam < 0:
        raise ConfigError("lambda must be >= 0")
    doc = bound_report(build_graph(args.r), args.m, lam=args.lam, oracle=args.oracle)
    return EXIT_OK, doc, {f"bound_r{args.r}_m{args.m}.json": _dumps(doc)}, None


def cmd_table(args):
    _check_m(args.m)
    rows = config_table(args.m)
    doc = {
        "M": args.m,
        "rows": [{**row, "f": str(row["f"])} for row in rows],
        "max_f": str(max(row["f"] for row in rows)),
        "two_fifths_M": str(Fraction(2 * args.m, 5)),
        "two_fifths_bound_holds": two_fifths_bound_holds(args.m),
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "k", "s", "g", "f_M", "max"])
    for row in rows:
        w.writerow([*row["config"], row["s"], row["g"], row["f"], int(row["max"])])
    return EXIT_OK, doc, {f"table_m{args.m}.json": _dumps(doc)}, buf.getvalue()


def cmd_sweep(args):
    if (args.m, args.n) not in SCHEMES:
        raise ConfigError(f"no scheme for (M, N) = ({args.m}, {args.n}); supported: {sorted(SCHEMES)}")
    if not args.r_list:
        raise ConfigError("empty r list")
    rows = []
    for r in args.r_list:
        _check_r(r)
        graph = build_graph(r)
        channels = generate(graph, args.m, args.n, seed=args.seed)
        solution = solve(graph, channels, seed=args.seed)
        cert = certify_alignment(graph, channels, solution)
        # the converse covers square M x M networks only
        bound = bound_report(graph, args.m)["dual_bound"] if args.m == args.n else None
        rows.append(
            {
                "r": r,
                "|V|": len(graph.vertices),
                "achieved_dof": str(solution.average_dof),
                "certified": cert.passed,
                "dual_bound": bound,
            }
        )
    doc = {"command": "sweep", "M": args.m, "N": args.n, "seed": args.seed, "series": rows}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "V", "achieved_dof", "achieved_dof_float", "dual_bound", "dual_bound_float", "certified"])
    for row in rows:
        b = row["dual_bound"]
        w.writerow(
            [
                row["r"],
                row["|V|"],
                row["achieved_dof"],
                repr(float(Fraction(row["achieved_dof"]))),
                b or "",
                repr(float(Fraction(b))) if b else "",
                int(row["certified"]),
            ]
        )
    code = EXIT_OK if all(row["certified"] for row in rows) else EXIT_CERT_FAIL
    return code, doc, {f"sweep_m{args.m}_n{args.n}.json": _dumps(doc), f"sweep_m{args.m}_n{args.n}.csv": buf.getvalue()}, buf.getvalue()


def cmd_oracle(args):
    _check_r(args.r)
    _check_m(args.m)
    graph = build_graph(args.r)
    try:
        value, dof_map = integer_oracle(graph, args.m)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    doc = {
        "command": "oracle",
        "r": args.r,
        "M": args.m,
        "oracle_value": str(value),
        "dof_map": [{"cell": v.pair(), "dof": d} for v, d in dof_map.items()],
    }
    return EXIT_OK, doc, {}, None


COMMANDS = {
    "graph": cmd_graph,
    "run": cmd_run,
    "certify": cmd_certify,
    "bound": cmd_bound,
    "table": cmd_table,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


# ------------------------------------------------------------------------ main


def _load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def _parse(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    config_path = pre.parse_known_args(argv)[0].config
    if config_path:
        cfg = _load_config(config_path)
        given = [a for a in argv if a in COMMANDS]
        command = given[0] if given else cfg.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"config names no valid command: {command!r}")
        # config values become defaults; explicit flags still win
        sub = parser.commands[command]
        known = {a.dest for a in sub._actions}
        opts = {k.replace("-", "_"): v for k, v in cfg.items() if k != "command"}
        if "lambda" in opts:
            opts["lam"] = opts.pop("lambda")
        unknown = set(opts) - known
        if unknown:
            raise ConfigError(f"unknown config keys for '{command}': {sorted(unknown)}")
        if opts.get("lam") is not None:
            opts["lam"] = Fraction(str(opts["lam"]))
        for key, conv in (("r_list", _int_list), ("powers", _float_list)):
            if isinstance(opts.get(key), str):
                opts[key] = conv(opts[key])
        for action in sub._actions:
            if action.dest in opts:
                action.required = False
        sub.set_defaults(**opts)
        if not given:
            argv = list(argv) + [command]
    args = parser.parse_args(argv)
    if args.command is None:
        raise ConfigError("no command given")
    return args


def _emit_failure(code, kind, message, where=None):
    block = {"error": {"type": kind, "message": message, "exit_code": code}}
    if where is not None:
        block["error"]["where"] = repr(where)
    sys.stdout.write(_dumps(block))
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse(argv)
    except ConfigError as exc:
        return _emit_failure(EXIT_CONFIG, "invalid_config", str(exc))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)

    try:
        code, doc, files, table = COMMANDS[args.command](args)
    except ConfigError as exc:
        return _emit_failure(EXIT_CONFIG, "invalid_config", str(exc))
    except DegenerateChannelError as exc:
        return _emit_failure(EXIT_DEGENERATE, "numerical_degeneracy", str(exc), exc.where)

    out_dir = args.output_dir or os.environ.get(ENV_OUTPUT_DIR)
    if out_dir:
        try:
            path = Path(out_dir)
            path.mkdir(parents=True, exist_ok=True)
            for name, text in files.items():
                (path / name).write_text(text)
        except OSError as exc:
            return _emit_failure(EXIT_CONFIG, "invalid_config", f"cannot write to {out_dir!r}: {exc}")

    if args.format == "csv" and table is not None:
        sys.stdout.write(table)
    else:
        sys.stdout.write(_dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
