"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 runtime invariant failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import SECTIONS, ConfigError, apply_overrides, config_from_dict, parse_value, read_raw, set_path
from .dynamics import InvariantError
from .observables import SinkConsistencyError, compare_runs
from .pipeline import simulate_config

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3
MAX_SWEEP_PARAMS = 3


class RunFailure(RuntimeError):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def execute(raw: dict, out: Path, text: str | None = None, source: str = "<config>",
            dump_hamiltonian: bool = False):
    """Validate, simulate and write ``timeseries.csv`` and ``report.csv`` into ``out``."""
    try:
        cfg = config_from_dict(raw, text, source)
    except ConfigError as exc:
        raise RunFailure(str(exc), EXIT_CONFIG) from None
    try:
        result = simulate_config(cfg)
    except (InvariantError, SinkConsistencyError) as exc:
        raise RunFailure(f"{source}: runtime invariant failure: {exc}", EXIT_RUNTIME) from None
    out.mkdir(parents=True, exist_ok=True)
    result.timeseries.to_csv(out / "timeseries.csv")
    result.report.to_csv(out / "report.csv")
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    if dump_hamiltonian:
        result.hamiltonian.to_csv(out / "hamiltonian.csv")
    return result


def cmd_run(args) -> int:
    try:
        raw, text, source = read_raw(args.config)
        raw = apply_overrides(raw, args.set)
        result = execute(raw, Path(args.out), text, source, args.dump_hamiltonian)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RunFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    print(f"p_sink_final = {result.report.p_sink_final:.12g}")
    return EXIT_OK


@dataclass(frozen=True)
class SweepSpec:
    """Cross product over up to three ``section.key`` parameters."""

    params: tuple[tuple[str, tuple], ...]

    @classmethod
    def parse(cls, items) -> "SweepSpec":
        params = []
        for item in items:
            path, sep, values = item.partition("=")
            path = path.strip()
            if not sep:
                raise ConfigError(f"sweep parameter {item!r} is not of the form section.key=v1,v2,...", "--param")
            parts = path.split(".")
            if len(parts) != 2 or parts[0] not in SECTIONS:
                raise ConfigError(f"cannot resolve parameter path {path!r}; use section.key", "--param")
            values = values.strip()
            if values.startswith("["):
                vals = parse_value(values)
                if not isinstance(vals, list):
                    raise ConfigError(f"cannot parse value list {values!r}", "--param")
            else:
                vals = [parse_value(v.strip()) for v in values.split(",") if v.strip()]
            if not vals:
                raise ConfigError(f"sweep parameter {path!r} has no values", "--param")
            params.append((path, tuple(vals)))
        if not params:
            raise ConfigError("a sweep needs at least one --param", "--param")
        if len(params) > MAX_SWEEP_PARAMS:
            raise ConfigError(f"at most {MAX_SWEEP_PARAMS} sweep parameters are supported", "--param")
        if len({p for p, _ in params}) != len(params):
            raise ConfigError("sweep parameters must be distinct", "--param")
        return cls(tuple(params))

    def points(self) -> list[tuple[str, dict]]:
        """``(identifier, {path: value})`` for every grid point."""
        keys = [p.split(".")[1] for p, _ in self.params]
        short = len(set(keys)) == len(keys)
        out = []
        for combo in itertools.product(*(v for _, v in self.params)):
            assignment = {p: v for (p, _), v in zip(self.params, combo)}
            label = "_".join(f"{(p.split('.')[1] if short else p)}={_slug(v)}" for p, v in assignment.items())
            out.append((label, assignment))
        return out


def _slug(value) -> str:
    text = json.dumps(value, separators=(",", ":"))
    return re.sub(r"[^A-Za-z0-9.+-]+", "-", text).strip("-") or "x"


def _sweep_point(job):
    label, raw, out, source = job
    try:
        result = execute(raw, Path(out), None, f"{source} [{label}]")
    except RunFailure as exc:
        return label, exc.code, str(exc), None
    return label, EXIT_OK, "", result.timeseries


def cmd_sweep(args) -> int:
    try:
        raw, _, source = read_raw(args.config)
        raw = apply_overrides(raw, args.set)
        sweep = SweepSpec.parse(args.param)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    jobs = []
    for label, assignment in sweep.points():
        point = json.loads(json.dumps(raw))
        for path, value in assignment.items():
            set_path(point, path, value)
        jobs.append((label, point, str(out / label), source))

    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]

    for label, code, message, _ in results:
        if code != EXIT_OK:
            print(f"error: sweep point {label} failed: {message}", file=sys.stderr)
            return code
    labels = [r[0] for r in results]
    try:
        table = compare_runs([r[3] for r in results], labels)
    except ValueError as exc:
        print(f"error: cannot merge sweep: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    table.to_csv(out / "comparison.csv")
    for label, value in table.finals.items():
        print(f"{label}: p_sink_final = {value:.12g}")
    print("ordering (lowest first): " + " < ".join(table.ordering))
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import verify

    checks = verify.run_all(bath_modes=args.bath_modes)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudochain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True,
                       help="JSON config path or a shipped recipe name (fig3, fig4)")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config value, e.g. --set system.n_chains=2")

    p_run = sub.add_parser("run", help="run one simulation")
    common(p_run)
    p_run.add_argument("--dump-hamiltonian", action="store_true",
                       help="also write hamiltonian.csv (row, col, re, im)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid and merge sink curves")
    common(p_sweep)
    p_sweep.add_argument("--param", action="append", default=[], metavar="PATH=V1,V2,...",
                         help="swept parameter (repeat up to 3 times)")
    p_sweep.add_argument("--jobs", type=int, default=1, help="grid points run in parallel")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the built-in oracle checks")
    p_verify.add_argument("--bath-modes", type=int, default=2000,
                          help="largest mode count of the discretized-bath ladder")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
