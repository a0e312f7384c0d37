"""Command-line entry point.

Subcommands::

    check-exponents  check one exponent tuple against a condition system
    enumerate        list passing tuples on a rational grid as CSV
    experiment       run a JSON-configured experiment and write its report
    solve            export one wave or Schrodinger trajectory

Exit codes: 0 success, 1 a check or asserted property failed, 2 usage or
configuration error.  ``DIVFREE_STRICHARTZ_THREADS`` sets the FFT worker count.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from . import __version__
from .errors import ConfigError, ExponentCheckFailed, StrichartzError
from .evolution import (WaveData, export_trajectory, schrodinger_solve,
                        wave_solve)
from .experiments import ExperimentConfig, run, time_profiles
from .exponents import (SELECTORS, THEOREMS, ExponentTuple, check,
                        enumerate_exponents, reduced_tuple, tuples_to_csv)
from .fields import GENERATOR_KINDS, DivFreeGenerator, random_field, save_manifest
from .spectral_core import Grid
from .evolution import SpaceTimeField

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "DIVFREE_STRICHARTZ_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="divfree-strichartz", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check-exponents", help="check an exponent tuple")
    c.add_argument("--theorem", required=True, choices=THEOREMS)
    c.add_argument("--n", required=True, type=int)
    for name in ("q", "r", "qt", "rt", "s", "k", "gamma"):
        c.add_argument(f"--{name}", default=None, help="rational such as 5/8, or inf")
    c.add_argument("--reduce", action="store_true",
                   help="also print the scalar tuple produced by the alpha selection")
    # let values such as -1/2 follow their flag without an '='
    c._negative_number_matcher = re.compile(r"^-(\d+(/\d+)?|\d*\.\d+)$")

    e = sub.add_parser("enumerate", help="enumerate passing tuples as CSV")
    e.add_argument("--theorem", required=True, choices=THEOREMS)
    e.add_argument("--n", required=True, type=int)
    e.add_argument("--max-denominator", type=int, default=8)
    e.add_argument("--output", default=None, help="CSV path (default: stdout)")

    x = sub.add_parser("experiment", help="run a JSON experiment config")
    x.add_argument("config")
    x.add_argument("--output", default=None, help="output directory (overrides the config)")

    s = sub.add_parser("solve", help="export a single trajectory")
    s.add_argument("--equation", choices=("wave", "schrodinger"), default="wave")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--N", type=int, default=32)
    s.add_argument("--period", type=float, default=2 * np.pi)
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--M", type=int, default=16)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cutoff", type=int, default=4)
    s.add_argument("--generator", choices=GENERATOR_KINDS, default="projected_random")
    s.add_argument("--forcing", choices=("random", "zero"), default="random")
    s.add_argument("--format", choices=("bin", "csv"), default="bin")
    s.add_argument("--output", required=True)
    return p


def cmd_check(args) -> int:
    values = {k: getattr(args, k) for k in ("q", "r", "qt", "rt", "s", "k", "gamma")}
    try:
        t = ExponentTuple.build(args.theorem, args.n, **values)
        result = check(t)
    except StrichartzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{t}: {'pass' if result.passed else 'fail'}")
    for v in result.violations:
        print(f"  violated {v.name}: slack {v.slack}")
    if result.passed and args.reduce and t.theorem in SELECTORS:
        choice = SELECTORS[t.theorem](t)
        print(f"  alpha={choice.alpha} -> {reduced_tuple(t, choice)}")
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_enumerate(args) -> int:
    if args.max_denominator < 1:
        print("error: --max-denominator must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        tuples = enumerate_exponents(args.theorem, args.n, args.max_denominator)
    except StrichartzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = tuples_to_csv(tuples)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    start = time.perf_counter()
    try:
        cfg = ExperimentConfig.load(args.config)
        report = run(cfg)
    except ExponentCheckFailed as exc:
        print(f"error: exponent tuple rejected: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, StrichartzError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.output or cfg.output or Path("results") / cfg.experiment)
    jpath, cpath = report.write(out)
    manifest = {
        "tool": "divfree-strichartz",
        "tool_version": __version__,
        "config": str(args.config),
        "config_digest": report.digest,
        "wall_time_s": round(time.perf_counter() - start, 3),
        "outputs": [jpath.name, cpath.name],
        "checks": report.checks,
        "passed": report.passed,
    }
    save_manifest(out / f"{cfg.experiment}_manifest.json", manifest)
    for name, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    for N, m in sorted(report.level_max.items()):
        print(f"  N={N}: max ratio {m}")
    print(f"report: {jpath}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_solve(args) -> int:
    try:
        grid = Grid(args.dim, args.N, args.period)
        times = np.linspace(0.0, args.T, args.M + 1)
        forcing = None
        if args.forcing == "random":
            F = DivFreeGenerator(args.generator, args.seed, cutoff=args.cutoff).generate(grid)
            forcing = SpaceTimeField.from_separable(times, time_profiles(args.seed, 1, times / args.T), [F])
        u0 = random_field(grid, (args.seed, 101), grid.dim, args.cutoff)
        if args.equation == "wave":
            u1 = random_field(grid, (args.seed, 102), grid.dim, args.cutoff)
            u, ut = wave_solve(WaveData(u0, u1), forcing, times if forcing is None else None)
            paths = [export_trajectory(u, args.output, "u", args.format),
                     export_trajectory(ut, args.output, "ut", args.format)]
        else:
            u = schrodinger_solve(u0, forcing, times if forcing is None else None)
            paths = [export_trajectory(u, args.output, "u", args.format)]
    except (StrichartzError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for p in paths:
        print(p)
    return EXIT_OK


COMMANDS = {
    "check-exponents": cmd_check,
    "enumerate": cmd_enumerate,
    "experiment": cmd_experiment,
    "solve": cmd_solve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = os.environ.get(THREADS_ENV)
    try:
        n = int(workers) if workers else 1
    except ValueError:
        print(f"error: {THREADS_ENV} must be an integer", file=sys.stderr)
        return EXIT_USAGE
    with sfft.set_workers(max(n, 1)):
        return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
