"""Command line interface: ``circmap run``, ``circmap sweep``, ``circmap list-examples``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .geometry import GeometryError
from .gnk import SolverError
from .koebe import KoebeError, SolverConfig
from .library import EXAMPLES, exact_map
from .runner import RegionFileError, RunConfig, format_table, run, sweep

def _even(text: str) -> int:
    n = int(text)
    if n < 4 or n % 2:
        raise argparse.ArgumentTypeError(f"n must be an even integer >= 4, got {n}")
    return n


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="circmap",
        description="Conformal maps of multiply connected regions onto circular regions.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="solve one region and write artifacts")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", help="built-in example id (see list-examples)")
    src.add_argument("--spec", type=Path, help="region file (JSON)")
    r.add_argument("--n", type=_even, default=None, help="nodes per boundary curve (default 128)")
    r.add_argument("--eps", type=_positive, default=0.5e-13, help="Koebe stopping tolerance")
    r.add_argument("--max-iter", type=int, default=100, help="Koebe iteration cap")
    r.add_argument("--out", type=Path, default=Path("circmap-out"), help="output directory")
    r.add_argument("--grid-lines", type=int, default=10,
                   help="lines per family in the plot grids (0 disables the grids)")
    r.add_argument("--grid-resolution", type=int, default=200,
                   help="samples per grid line before clipping")
    r.add_argument("--diagnostics", action="store_true", help="also write diagnostics.json")

    s = sub.add_parser("sweep", help="error table over several n for an exact example")
    s.add_argument("--example", required=True, choices=[k for k in EXAMPLES if exact_map(k)])
    s.add_argument("--n", type=_even, nargs="+", default=[16, 32, 64, 128])
    s.add_argument("--eps", type=_positive, default=0.5e-13)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--out", type=Path, default=None, help="also write the table as CSV here")

    sub.add_parser("list-examples", help="show the built-in regions")
    return p


def _cmd_run(args) -> int:
    cfg = RunConfig(
        source=args.example or str(args.spec),
        n=args.n,
        eps=args.eps,
        max_iter=args.max_iter,
        out=args.out,
        grid_lines=args.grid_lines,
        grid_resolution=args.grid_resolution,
        diagnostics=args.diagnostics,
    )
    res = run(cfg)
    sol = res.solution
    status = "converged" if sol.converged else "NOT converged"
    print(f"{sol.region.name or 'region'}: m={sol.region.m} n={sol.n} {status} "
          f"after {sol.iterations} iterations (last successive error {sol.errors[-1]:.3e})")
    for i, (c, r) in enumerate(zip(sol.centers, sol.radii), start=1):
        print(f"  C{i}: center {c.real:+.15f} {c.imag:+.15f}i  radius {r:.15f}")
    if res.errors is not None:
        e = res.errors
        print(f"  E_omega={e.e_omega:.2e}  E_z={e.e_z:.2e}  E_r={e.e_r:.2e}")
    print(f"artifacts written to {args.out}")
    return 0 if sol.converged else 3


def _cmd_sweep(args) -> int:
    rows = sweep(args.example, args.n, SolverConfig(eps=args.eps, max_iter=args.max_iter))
    print(format_table(rows))
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["n", "E_omega", "E_z", "E_r"])
            for r in rows:
                wr.writerow([r.n, repr(r.e_omega), repr(r.e_z), repr(r.e_r)])
    return 0


def _cmd_list() -> int:
    width = max(map(len, EXAMPLES))
    for name, (_, desc) in EXAMPLES.items():
        mark = " [exact]" if exact_map(name) else ""
        print(f"{name:<{width}}  {desc}{mark}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    level = logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    for h in logging.getLogger().handlers:
        if type(h) is logging.StreamHandler:
            h.setLevel(level)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_list()
    except (RegionFileError, GeometryError, KeyError, ValueError) as exc:
        print(f"circmap: error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, KoebeError, RuntimeError) as exc:
        print(f"circmap: solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
