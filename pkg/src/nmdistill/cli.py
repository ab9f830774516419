"""Command-line front end.

Every subcommand reads an optional flat JSON config (``--config``) whose keys
match the long flag names with dashes turned into underscores; flags given on
the command line override the file.  Outputs go to ``--out`` together with a
``<subcommand>_manifest.json`` recording the resolved inputs, versions and
wall time.

Exit codes: 0 success, 1 failed verification, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, NMDistillError
from .experiments import (
    APPENDIX_B_PRESETS,
    DEFAULT_SCAN_EPSILONS,
    OBJECTIVES,
    OptimizeConfig,
    SweepConfig,
    appendix_b,
    eig_scan,
    grid_sweep,
    max_diff,
    optimize_unitary,
    sweep_rows,
    worker_count,
)
from .output import APPENDIXB_HEADER, EIGSCAN_HEADER, SWEEP_HEADER, write_csv, write_json
from .verify import CHECKS, run_checks

log = logging.getLogger("nmdistill")

_SWEEP = {f.name: f.default for f in dataclasses.fields(SweepConfig)}
_OPT = {f.name: f.default for f in dataclasses.fields(OptimizeConfig)}

DEFAULTS = {
    "sweep": {**_SWEEP, "epsilon": list(_SWEEP["epsilon"])},
    "maxdiff": {**_SWEEP, "epsilon": 0.4},
    "eigscan": {"epsilon": list(DEFAULT_SCAN_EPSILONS), "modes": ["single", "tensor", "distilled"], "copies": [2, 3, 4]},
    "appendixb": {"preset": "all", "cases": None},
    "optimize": dict(_OPT),
    "verify": {"checks": None},
}


def _flag(parser, name, cmd, help, **kw):
    default = DEFAULTS[cmd][name]
    shown = "all" if default is None else default
    if isinstance(shown, list) and len(shown) > 8:
        shown = f"[{shown[0]}, ..., {shown[-1]}] ({len(shown)} values)"
    parser.add_argument(
        "--" + name.replace("_", "-"), dest=name, default=argparse.SUPPRESS, help=f"{help} (default: {shown})", **kw
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmdistill", description="Non-Markovianity distillation experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat JSON config; keys mirror the flag names")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the invariant checks")
    _flag(p, "checks", "verify", f"subset of checks among {list(CHECKS)}", nargs="+")

    for cmd, helptext in (("sweep", "theta/phi grid sweep -> sweep.csv"), ("maxdiff", "maximum of delta_d_n - delta_d")):
        p = sub.add_parser(cmd, parents=[common], help=helptext)
        if cmd == "sweep":
            _flag(p, "epsilon", cmd, "epsilon values", type=float, nargs="+")
        else:
            _flag(p, "epsilon", cmd, "epsilon", type=float)
        _flag(p, "copies", cmd, "number of copies", type=int)
        _flag(p, "unitary", cmd, "paper16 | pattern | identity | path to JSON")
        _flag(p, "theta_points", cmd, "theta grid size over [0, pi]", type=int)
        _flag(p, "phi_points", cmd, "phi grid size over [0, 2 pi]", type=int)

    p = sub.add_parser("eigscan", parents=[common], help="least Choi eigenvalue scan -> eigscan.csv")
    _flag(p, "epsilon", "eigscan", "epsilon values in [0, 0.5)", type=float, nargs="+")
    _flag(p, "modes", "eigscan", "single | tensor | distilled", nargs="+")
    _flag(p, "copies", "eigscan", "copy numbers", type=int, nargs="+")

    p = sub.add_parser("appendixb", parents=[common], help="coarse-graining without dynamics -> appendixb.csv")
    _flag(p, "preset", "appendixb", f"one of {sorted(APPENDIX_B_PRESETS)} or all")
    _flag(p, "cases", "appendixb", "explicit case r1 r2 theta phi (repeatable)", type=float, nargs=4, action="append")

    p = sub.add_parser("optimize", parents=[common], help="X-form unitary search -> optimize.json")
    _flag(p, "copies", "optimize", "3 or 4", type=int)
    _flag(p, "epsilon", "optimize", "epsilon", type=float)
    _flag(p, "objective", "optimize", f"one of {OBJECTIVES}")
    _flag(p, "restarts", "optimize", "number of restarts", type=int)
    _flag(p, "seed", "optimize", "SplitMix64 seed", type=int)
    _flag(p, "max_iter", "optimize", "iterations per restart", type=int)
    _flag(p, "initial_step", "optimize", "initial angle step", type=float)
    _flag(p, "shrink", "optimize", "step shrink factor", type=float)
    _flag(p, "theta_points", "optimize", "coarse theta grid size", type=int)
    _flag(p, "phi_points", "optimize", "coarse phi grid size", type=int)
    return parser


def resolve_config(cmd: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[cmd])
    if args.config is not None:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(doc) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {unknown}")
        cfg.update(doc)
    for key in DEFAULTS[cmd]:
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def _build(cls, cfg: dict):
    try:
        return cls(**cfg)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_verify(cfg, out: Path):
    names = cfg["checks"]
    if names:
        unknown = sorted(set(names) - set(CHECKS))
        if unknown:
            raise ConfigError(f"unknown checks {unknown}")
    results = run_checks(names)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    path = write_json(out / "verify.json", [dataclasses.asdict(r) for r in results])
    return (1 if failed else 0), [path]


def _cmd_sweep(cfg, out: Path):
    sweep = _build(SweepConfig, {**cfg, "epsilon": tuple(cfg["epsilon"])})
    path = write_csv(out / "sweep.csv", SWEEP_HEADER, sweep_rows(grid_sweep(sweep)))
    return 0, [path]


def _cmd_maxdiff(cfg, out: Path):
    sweep = _build(SweepConfig, cfg)
    report = max_diff(sweep)
    print(f"max(delta_d_n - delta_d) = {report.value:.6f} at epsilon = {report.epsilon}")
    for t, p in report.points:
        print(f"  theta = {t / np.pi:.4f} pi, phi = {p / np.pi:.4f} pi")
    return 0, [write_json(out / "maxdiff.json", report.as_dict())]


def _cmd_eigscan(cfg, out: Path):
    bad = sorted(set(cfg["modes"]) - {"single", "tensor", "distilled"})
    if bad:
        raise ConfigError(f"unknown modes {bad}")
    rows = eig_scan(cfg["epsilon"], tuple(cfg["modes"]), tuple(cfg["copies"]))
    path = write_csv(out / "eigscan.csv", EIGSCAN_HEADER, ((r.epsilon, r.copies, r.mode, r.zeta) for r in rows))
    return 0, [path]


def _cmd_appendixb(cfg, out: Path):
    if cfg["cases"]:
        cases = [tuple(c) for c in cfg["cases"]]
    elif cfg["preset"] == "all":
        cases = [c for v in APPENDIX_B_PRESETS.values() for c in v]
    elif cfg["preset"] in APPENDIX_B_PRESETS:
        cases = list(APPENDIX_B_PRESETS[cfg["preset"]])
    else:
        raise ConfigError(f"unknown preset {cfg['preset']!r}")
    if any(len(c) != 4 for c in cases):
        raise ConfigError("each case needs r1 r2 theta phi")
    rows = appendix_b(cases)
    for r in rows:
        print(f"r1={r.r1:g} r2={r.r2:g} theta={r.theta:.4f} phi={r.phi:.4f}  D before={r.d_before:.12g}  D after={r.d_after:.12g}")
    path = write_csv(out / "appendixb.csv", APPENDIXB_HEADER, (dataclasses.astuple(r) for r in rows))
    return 0, [path]


def _cmd_optimize(cfg, out: Path):
    result = optimize_unitary(_build(OptimizeConfig, cfg))
    print(f"best objective {result.objective:.6f} over {result.restarts_used} restarts")
    return 0, [write_json(out / "optimize.json", result.as_dict())]


COMMANDS = {
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "maxdiff": _cmd_maxdiff,
    "eigscan": _cmd_eigscan,
    "appendixb": _cmd_appendixb,
    "optimize": _cmd_optimize,
}


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = resolve_config(args.command, args)
        threads = worker_count()
        args.out.mkdir(parents=True, exist_ok=True)
        code, outputs = COMMANDS[args.command](cfg, args.out)
    except (ConfigError, NMDistillError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    manifest = {
        "subcommand": args.command,
        "config": {k: _jsonable(v) for k, v in cfg.items()},
        "defaults": {k: _jsonable(v) for k, v in DEFAULTS[args.command].items()},
        "outputs": [str(p) for p in outputs],
        "versions": {"nmdistill": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "threads": threads,
        "exit_code": code,
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    write_json(args.out / f"{args.command}_manifest.json", manifest)
    return code


def main() -> None:
    sys.exit(run())
