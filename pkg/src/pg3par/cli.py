"""Command-line front end.

Every subcommand writes a JSON report (stable key order, no timestamps) and
exits 0 on PASS, 1 on a verification failure, 2 on bad input.  Wall-clock
data goes to a separate ``<report>.meta.json`` so reports stay byte-identical
between runs with the same seed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import clifford as cl
from . import lines as ln
from . import quaternions as qt
from . import spreads as sp
from . import suite
from .parallelism import GroupCopyParams, OrbitParallelism, equivalence_reduction_check, verify_parallelism

COMMANDS = ("verify-spread", "verify-parallelism", "clifford-check", "theorem-suite", "coords", "reduce")


class ConfigError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pg3par", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file whose keys mirror the long options")
    parser.add_argument("--profile", help="complex:C, or a JSON profile file")
    parser.add_argument("--s", type=float, help="vertical scale of the group copy")
    parser.add_argument("--t", type=float, help="vertical shift of the group copy")
    parser.add_argument("--oriented", dest="oriented", action="store_true", default=None)
    parser.add_argument("--no-oriented", dest="oriented", action="store_false")
    parser.add_argument("--side", choices=[s.value for s in cl.CliffordSide], help="use a Clifford parallelism")
    parser.add_argument("--n", type=int, help="sample count")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--scale", type=float, help="theorem-suite sample scale (default 1)")
    parser.add_argument("--hit-threshold", type=float, help="resolver hit threshold")
    parser.add_argument("--line", action="append", help="coords: six comma-separated Pluecker numbers")
    parser.add_argument("--lines", help="coords: JSON file with a list of {\"pluecker\": [...]}")
    parser.add_argument("--out", help="report path (default: stdout)")
    parser.add_argument("--csv", help="per-sample CSV dump path")
    return parser


DEFAULTS = {
    "profile": "complex:1.0",
    "s": 1.0,
    "t": 0.0,
    "oriented": True,
    "side": None,
    "n": None,
    "seed": 0,
    "scale": 1.0,
    "hit_threshold": None,
    "line": None,
    "lines": None,
    "out": None,
    "csv": None,
}


def load_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file, then explicit flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        unknown = set(data) - set(cfg) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k.replace("-", "_"): v for k, v in data.items() if k != "command"})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["n"] is not None and int(cfg["n"]) < 0:
        raise ConfigError("--n must be non-negative")
    if float(cfg["s"]) == 0:
        raise ConfigError("--s must be nonzero")
    for key in ("lines",):
        if cfg[key] and not Path(cfg[key]).is_file():
            raise ConfigError(f"{key} file {cfg[key]} does not exist")
    return cfg


def load_profile(spec) -> sp.RotationalSpreadProfile:
    try:
        if isinstance(spec, dict):
            return sp.profile_from_json(spec)
        if Path(spec).is_file():
            return sp.profile_from_json(json.loads(Path(spec).read_text()))
        return sp.parse_profile(spec)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad profile: {exc}") from exc


def _parallelism(cfg):
    if cfg["side"]:
        return cl.clifford_parallelism(cl.CliffordSide(cfg["side"]), bool(cfg["oriented"]))
    kw = {}
    if cfg["hit_threshold"] is not None:
        kw["hit_threshold"] = float(cfg["hit_threshold"])
    return OrbitParallelism(
        load_profile(cfg["profile"]), GroupCopyParams(float(cfg["s"]), float(cfg["t"])), bool(cfg["oriented"]), **kw
    )


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_verify_spread(cfg):
    s = sp.RotationalSpread(load_profile(cfg["profile"]), bool(cfg["oriented"]))
    n = 10_000 if cfg["n"] is None else int(cfg["n"])
    rep = sp.verify_spread(s, n, seed=int(cfg["seed"]))
    if cfg["csv"]:
        from .sampling import map_chunks

        pts = np.concatenate(map_chunks(lambda rng, a, c: sp.sample_points(rng, c), n, int(cfg["seed"])) or [np.empty((0, 3))])
        counts = [c.count for c in sp.coverage_counts(s, pts)] if n else []
        _write_csv(cfg["csv"], ["x", "y", "z", "count"], [[*p, k] for p, k in zip(pts.tolist(), counts)])
    out = {"command": "verify-spread", "profile": s.profile.to_json(), "oriented": s.oriented, "seed": int(cfg["seed"])}
    out.update(rep.to_json())
    return out, rep.passed


def cmd_verify_parallelism(cfg):
    P = _parallelism(cfg)
    n = 2_000 if cfg["n"] is None else int(cfg["n"])
    rep = verify_parallelism(P, n, seed=int(cfg["seed"]))
    if cfg["csv"]:
        _write_csv(cfg["csv"], ["nx", "ny", "nz"], rep.indices.tolist())
    out = {"command": "verify-parallelism", "parallelism": P.describe(), "seed": int(cfg["seed"])}
    out.update(rep.to_json())
    return out, rep.passed


def cmd_clifford_check(cfg):
    seed = int(cfg["seed"])
    checks = {}
    for num in (1, 2, 3, 4):
        passed, details = suite.CRITERIA[num - 1][2](seed, float(cfg["scale"]))
        checks[suite.CRITERIA[num - 1][1]] = {"pass": bool(passed), "details": suite._plain(details)}
    ok = all(v["pass"] for v in checks.values())
    return {"command": "clifford-check", "seed": seed, "checks": checks, "pass": ok}, ok


def cmd_theorem_suite(cfg):
    results = suite.run_suite(int(cfg["seed"]), float(cfg["scale"]), echo=lambda s: print(s, file=sys.stderr))
    ok = all(r.ok for r in results)
    report = {
        "command": "theorem-suite",
        "seed": int(cfg["seed"]),
        "scale": float(cfg["scale"]),
        "criteria": [r.to_json() for r in results],
        "pass": ok,
    }
    timing = {str(r.number): {"seconds": r.seconds, "limit": r.limit} for r in results}
    return report, ok, timing


def _input_lines(cfg):
    out = []
    for text in cfg["line"] or []:
        try:
            vals = [float(v) for v in text.split(",")]
            out.append(ln.line_from_json({"pluecker": vals}))
        except ValueError as exc:
            raise ConfigError(f"bad --line {text!r}: {exc}") from exc
    if cfg["lines"]:
        try:
            out += [ln.line_from_json(obj) for obj in json.loads(Path(cfg["lines"]).read_text())]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"bad lines file: {exc}") from exc
    if not out:
        raise ConfigError("coords needs --line or --lines")
    return np.array(out)


def cmd_coords(cfg):
    L = _input_lines(cfg)
    c = ln.klein_split(L)
    rows = []
    for k in range(len(L)):
        rows.append(
            {
                "line": ln.line_to_json(L[k]),
                "coords": ln.coords_to_json(ln.SphereCoords(c.x[k], c.y[k])),
                "left_class": cl.class_of(L[k], cl.CliffordSide.LEFT).to_json(),
                "right_class": cl.class_of(L[k], cl.CliffordSide.RIGHT).to_json(),
            }
        )
    if cfg["csv"]:
        _write_csv(cfg["csv"], ["x1", "x2", "x3", "y1", "y2", "y3"], np.hstack([c.x, c.y]).tolist())
    return {"command": "coords", "lines": rows, "pass": True}, True


def cmd_reduce(cfg):
    prof = load_profile(cfg["profile"])
    if not isinstance(prof, sp.ComplexProfile):
        raise ConfigError("reduce needs a complex profile")
    params = GroupCopyParams(float(cfg["s"]), float(cfg["t"]))
    if params.s <= 0:
        raise ConfigError("reduce needs s > 0")
    n = 1_000 if cfg["n"] is None else int(cfg["n"])
    out = equivalence_reduction_check(prof, params, n, seed=int(cfg["seed"]), oriented=bool(cfg["oriented"]))
    report = {"command": "reduce", "profile": prof.to_json(), "s": params.s, "t": params.t}
    report.update(out)
    return report, out["pass"]


HANDLERS = {
    "verify-spread": cmd_verify_spread,
    "verify-parallelism": cmd_verify_parallelism,
    "clifford-check": cmd_clifford_check,
    "theorem-suite": cmd_theorem_suite,
    "coords": cmd_coords,
    "reduce": cmd_reduce,
}


def dumps(report) -> str:
    return json.dumps(suite._plain(report), sort_keys=True, indent=2) + "\n"


def run(cfg: dict, command: str) -> int:
    start = time.perf_counter()
    result = HANDLERS[command](cfg)
    report, ok = result[0], result[1]
    timing = result[2] if len(result) > 2 else {}
    text = dumps(report)
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
        meta = {"seconds": time.perf_counter() - start, "finished": time.strftime("%Y-%m-%dT%H:%M:%S"), **timing}
        Path(str(cfg["out"]) + ".meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
        if not ok:
            witnesses = {k: v for k, v in report.items() if "witness" in k or k in ("criteria", "checks")}
            Path(str(cfg["out"]) + ".witness.json").write_text(dumps(witnesses))
    else:
        sys.stdout.write(text)
    print("PASS" if ok else "FAIL", file=sys.stderr)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return run(cfg, args.command)
    except ConfigError as exc:
        print(f"pg3par: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
