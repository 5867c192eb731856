"""Command-line entry point: validate, sweep, torus, delta.

Exit status: 0 success, 1 validation failure, 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional, Sequence

from .errors import BadTau, CertificationError, FlatteichError, ParseError, ValidationFailure
from .exact import fmt

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

DEFAULT_N = (4, 8, 16, 32, 64, 128, 256, 512)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    fixture: str = "genus2_slit"
    n_list: tuple = DEFAULT_N
    grid: int = 8
    torus_control: bool = False
    out: str = "results"
    tolerance_slope: float = 0.1
    workers: int = 1
    timing: bool = True

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_list)
        object.__setattr__(self, "n_list", ns)
        if not ns:
            raise UsageError("n_list is empty")
        if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError(f"n_list must be increasing positive integers, got {list(ns)}")
        if self.grid < 1:
            raise UsageError(f"grid must be positive, got {self.grid}")
        if not self.tolerance_slope > 0:
            raise UsageError(f"tolerance_slope must be positive, got {self.tolerance_slope}")
        if self.workers < 1:
            raise UsageError(f"workers must be positive, got {self.workers}")


def load_config(path: str) -> ExperimentConfig:
    from .fixtures import parse_text
    doc = parse_text(Path(path).read_text(), path)
    sec = doc.get("sweep", doc)
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(sec) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**sec)


def parse_n_list(text: str) -> tuple:
    items = [t for t in text.replace(" ", "").split(",") if t]
    try:
        return tuple(int(t) for t in items)
    except ValueError:
        raise UsageError(f"--n-list must be comma-separated integers, got {text!r}") from None


def parse_tau(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if t.endswith("i"):
        head = t[:-1]
        if head == "" or head[-1] in "+-":
            t = head + "1i"
    try:
        z = complex(t.replace("i", "j"))
    except ValueError:
        raise BadTau(f"cannot parse {text!r} as a complex number (e.g. 2i, 1+10i)") from None
    if not z.imag > 0:
        raise BadTau(f"tau must lie in the upper half-plane, got {text}")
    return z


# -- subcommands -----------------------------------------------------------

def cmd_validate(args) -> int:
    from .fixtures import validate_fixture
    rep = validate_fixture(args.fixture)
    for c in rep.checks:
        line = f"{'PASS' if c.ok else 'FAIL'}  {c.name}"
        if c.detail and not c.ok:
            line += f"  ({c.detail})"
        print(line)
    if rep.fixture is not None:
        d = rep.fixture.diagnostics
        print(f"genus {d.genus}; cone angles (units of pi) {list(d.cone_angles)}; area {fmt(d.area)}")
        print(f"curves {sorted(rep.fixture.curves)}; annuli {sorted(rep.fixture.annuli)}")
    print("valid" if rep.ok else "INVALID")
    return EXIT_OK if rep.ok else EXIT_VALIDATION


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    over = {}
    if args.fixture is not None:
        over["fixture"] = args.fixture
    if args.n_list is not None:
        over["n_list"] = parse_n_list(args.n_list)
    if args.grid is not None:
        over["grid"] = args.grid
    if args.torus_control:
        over["torus_control"] = True
    if args.out is not None:
        over["out"] = args.out
    if args.tolerance_slope is not None:
        over["tolerance_slope"] = args.tolerance_slope
    if args.workers is not None:
        over["workers"] = args.workers
    if args.no_timing:
        over["timing"] = False
    return replace(cfg, **over)


def write_sweep(cfg: ExperimentConfig, result, torus=None) -> List[Path]:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    p = out / "sweep.csv"
    with p.open("w") as f:
        f.write("n,K_n,delta_lo,ext_lo_gamma1,ext_lo_gamma2,leg_hi_1,leg_hi_2,ms\n")
        for r in result.rows:
            ms = fmt(r.ms) if cfg.timing else "0"
            f.write(",".join([str(r.n), fmt(r.K_n), fmt(r.delta_lo), fmt(r.ext_lo_gamma1), fmt(r.ext_lo_gamma2),
                              fmt(r.leg_hi_1), fmt(r.leg_hi_2), ms]) + "\n")
    written.append(p)
    p = out / "plot_data.csv"
    with p.open("w") as f:
        f.write("n,log_n,delta_lo\n")
        for r in result.rows:
            f.write(f"{r.n},{fmt(math.log(r.n))},{fmt(r.delta_lo)}\n")
    written.append(p)
    p = out / "constants.csv"
    keys = ["c0", "c2", "c3", "c4", "c5"]
    with p.open("w") as f:
        f.write("n," + ",".join(keys) + "\n")
        for r in result.rows:
            f.write(f"{r.n}," + ",".join(fmt(r.constants[k]) if k in r.constants else "" for k in keys) + "\n")
        fit = result.fit
        f.write(f"# fit slope={_opt(fit.slope)} intercept={_opt(fit.intercept)} r2={_opt(fit.r2)}\n")
    written.append(p)
    if torus is not None:
        rows, tfit = torus
        p = out / "torus_control.csv"
        with p.open("w") as f:
            f.write("n,delta_lo,delta_star,four_point\n")
            for r in rows:
                f.write(f"{r.n},{fmt(r.delta_lo)},{fmt(r.delta_star)},{fmt(r.four_point)}\n")
        written.append(p)
    return written


def _opt(x) -> str:
    return "undefined" if x is None else fmt(x)


def cmd_sweep(args) -> int:
    from .fixtures import load_fixture
    from .lab import sweep, torus_sweep
    cfg = _config_from_args(args)
    fx = load_fixture(cfg.fixture)
    result = sweep(cfg.n_list, fx, cfg.grid, cfg.workers)
    torus = torus_sweep(cfg.n_list) if cfg.torus_control else None
    paths = write_sweep(cfg, result, torus)
    print("n,K_n,delta_lo")
    for r in result.rows:
        print(f"{r.n},{fmt(r.K_n)},{fmt(r.delta_lo)}")
    fit = result.fit
    status = EXIT_OK
    if fit.slope is None:
        print("slope undefined (fewer than two distinct n)")
    else:
        lo, hi = 0.5 - cfg.tolerance_slope, 0.5 + cfg.tolerance_slope
        ok = lo <= fit.slope <= hi
        print(f"slope {fmt(fit.slope)} intercept {fmt(fit.intercept)} r2 {fmt(fit.r2)} "
              f"window [{fmt(lo)}, {fmt(hi)}] {'PASS' if ok else 'FAIL'}")
        status = EXIT_OK if ok else EXIT_VALIDATION
    if torus is not None:
        rows, tfit = torus
        print(f"torus control: max delta {fmt(max(r.delta_lo for r in rows))} slope {_opt(tfit.slope)}")
    for p in paths:
        print(f"wrote {p}")
    return status


def cmd_torus(args) -> int:
    from .torus import torus_distance, torus_kerckhoff
    t1, t2 = parse_tau(args.tau1), parse_tau(args.tau2)
    if args.height < 1:
        raise UsageError(f"height must be positive, got {args.height}")
    d = torus_distance(t1, t2)
    k = torus_kerckhoff(t1, t2, args.height)
    print(f"distance {fmt(d)}")
    print(f"kerckhoff {fmt(k)}")
    print(f"gap {fmt(d - k)}")
    return EXIT_OK


def cmd_delta(args) -> int:
    from .lab import four_point_delta
    if args.matrix:
        import numpy as np
        D = np.loadtxt(args.matrix, delimiter=",", ndmin=2)
        print(f"four_point_delta {fmt(four_point_delta(D))}")
        return EXIT_OK
    if args.torus_n is not None:
        from .torus import distance_matrix, torus_triangle, triangle_sample_points
        tri = torus_triangle(args.torus_n)
        D = distance_matrix(triangle_sample_points(args.torus_n))
        print(f"thin_delta {fmt(tri.delta_thin)}")
        print(f"four_point_delta {fmt(four_point_delta(D))}")
        return EXIT_OK
    if args.n is None:
        raise UsageError("delta needs one of --matrix, --torus-n or --n")
    from .fixtures import load_fixture
    from .lab import run_triangle
    ex = run_triangle(load_fixture(args.fixture or "genus2_slit"), args.n, args.grid)
    print(f"n {ex.n}")
    print(f"K_n {fmt(ex.instance.params.K)}")
    print(f"delta_lo {fmt(ex.delta_lo)}")
    for b in ex.sandwich:
        print(f"pair {b.provenance}: kerckhoff_lo {fmt(b.lo)} stretch_hi {fmt(b.hi)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flatteich", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a fixture file")
    v.add_argument("fixture_pos", nargs="?", help="fixture path or built-in name")
    v.add_argument("--fixture", dest="fixture_opt")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sweep", help="run the thin-triangle sweep")
    s.add_argument("--config", help="TOML config with a [sweep] table")
    s.add_argument("--fixture")
    s.add_argument("--n-list", help="comma-separated increasing n, e.g. 4,8,16")
    s.add_argument("--grid", type=int, help="plumbing sample grid size (default 8)")
    s.add_argument("--torus-control", action="store_true")
    s.add_argument("--out", help="output directory (default results)")
    s.add_argument("--tolerance-slope", type=float, help="accepted |slope - 1/2| (default 0.1)")
    s.add_argument("--workers", type=int, help="worker processes (default 1)")
    s.add_argument("--no-timing", action="store_true", help="write ms = 0 for byte-reproducible output")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("torus", help="torus distance versus its Kerckhoff enumeration")
    t.add_argument("tau1")
    t.add_argument("tau2")
    t.add_argument("height", type=int, nargs="?", default=50)
    t.set_defaults(func=cmd_torus)

    d = sub.add_parser("delta", help="four-point delta of a matrix, or thinness of one triangle")
    d.add_argument("--matrix", help="CSV distance matrix")
    d.add_argument("--torus-n", type=int)
    d.add_argument("--n", type=int, help="twist count for the fixture triangle")
    d.add_argument("--fixture")
    d.add_argument("--grid", type=int, default=8)
    d.set_defaults(func=cmd_delta)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command == "validate":
        args.fixture = args.fixture_opt or args.fixture_pos
        if not args.fixture:
            print("error: validate needs a fixture", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, BadTau, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationFailure as exc:
        print("validation failed:", file=sys.stderr)
        for p in exc.problems:
            print(f"  {p}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CertificationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except FlatteichError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
