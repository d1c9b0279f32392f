"""Command-line front end: ``twistcurve <command> --config run.yaml``.

Configs are YAML documents::

    map: {kind: linear, degree: 4}
    observable: {kind: cosine, scale: 1.0, frequency: 1}
    twist: {theta: 0.5, k0: 1}
    tolerances: {eval_tol: 1.0e-10}
    seeds: {rng_seed: 0}
    eval: {samples: 4096}

Every command writes ``<out>/<command>.json``; ``eval`` and ``residual-scan``
also write a CSV of samples. Exit status is 0 on success, 1 when the analysis
answers "no" (e.g. condition (A) fails) and 2 on error.
"""

from __future__ import annotations

import argparse
import copy
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .alpha import TwistConfig, eval_alpha, residual, residual_bound
from .bounds import condition_a_report, find_witness, hardy_threshold
from .errors import TwistcurveError, ValidationError
from .maps import CircleMapSpec, make_map, map_constants
from .observables import make_constant, make_cosine, scale
from .regularity import box_dimension, holder_exponent_at
from .symbolic import dimension_via_pressure, pressure

COMMANDS = ("eval", "residual-scan", "holder", "boxdim", "condition-a",
            "witness", "pressure", "dim", "hardy")

DEFAULTS = {
    "map": {"kind": "linear", "degree": 4, "amplitude": 0.0},
    "observable": {"kind": "cosine", "scale": 1.0, "frequency": 1},
    "twist": {"theta": 0.5, "k0": 1},
    "tolerances": {"eval_tol": 1e-10, "newton_tol": 1e-14},
    "seeds": {"rng_seed": 0},
    "report": {"timing": True},
    "eval": {"samples": 4096},
    "residual-scan": {"points": 10000},
    "holder": {"points": 64, "j_min": 8, "j_max": 20, "offsets": 17},
    "boxdim": {"samples": 2**20, "j_min": 4, "j_max": 10, "tol": 1e-8},
    "condition-a": {"c": None},
    "witness": {"c": None, "h_cap": 1e-2, "starts": 10000, "length": 1000},
    "pressure": {"s": 1.0, "depth": 8},
    "dim": {"depth": 8},
    "hardy": {"b": None},
}

PRESETS = {
    "weierstrass": {"map": {"kind": "linear", "degree": 4}, "twist": {"theta": 0.5}},
    "weierstrass-theta03": {"map": {"kind": "linear", "degree": 4}, "twist": {"theta": 0.3}},
    "perturbed": {"map": {"kind": "sine-perturbed", "degree": 8, "amplitude": 0.1},
                  "twist": {"theta": 0.5}},
    "hardy32": {"map": {"kind": "linear", "degree": 32}, "twist": {"theta": 0.5}},
    "lacunary2048": {"map": {"kind": "linear", "degree": 2048}, "twist": {"theta": 0.5}},
    "constant": {"map": {"kind": "linear", "degree": 3},
                 "observable": {"kind": "constant", "scale": 1.0}, "twist": {"theta": 0.7}},
}


class ConfigError(TwistcurveError, ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class RunConfig:
    map: CircleMapSpec
    observable: dict
    twist: TwistConfig
    tolerances: dict
    seeds: dict
    report: dict
    params: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def build(self):
        fmap = make_map(self.map)
        kind = self.observable["kind"]
        if kind == "cosine":
            obs = scale(make_cosine(), self.observable["scale"])
        else:
            obs = make_constant(self.observable["scale"])
        return fmap, obs


def _merge(base, over, path, errors):
    for key, val in over.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            errors.append(f"{where}: unknown key")
        elif isinstance(base[key], dict):
            if not isinstance(val, dict):
                errors.append(f"{where}: expected a section")
            else:
                _merge(base[key], val, where, errors)
        else:
            base[key] = val


def _normalise(doc):
    """Accept shorthands: top-level ``theta``, ``observable: cosine``."""
    doc = dict(doc)
    if "theta" in doc:
        doc.setdefault("twist", {})
        doc["twist"] = dict(doc["twist"], theta=doc.pop("theta"))
    if isinstance(doc.get("observable"), str):
        doc["observable"] = {"kind": doc["observable"]}
    for key in ("map", "observable", "twist"):
        if key in doc and isinstance(doc[key], dict) and "d" in doc[key]:
            doc[key] = dict(doc[key])
            doc[key]["degree"] = doc[key].pop("d")
    return doc


def parse_config(text: str, overrides=(), preset: str | None = None) -> RunConfig:
    """Parse and validate a YAML config; raises ``ConfigError`` listing every problem."""
    try:
        doc = yaml.safe_load(text) if text and text.strip() else {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ConfigError([f"parse error: {where}{getattr(exc, 'problem', exc)}"]) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(["parse error: top level must be a mapping"])
    errors = []
    merged = copy.deepcopy(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError([f"preset: unknown preset {preset!r}"])
        _merge(merged, PRESETS[preset], "", errors)
    _merge(merged, _normalise(doc), "", errors)
    for item in overrides:
        key, sep, val = item.partition("=")
        if not sep:
            errors.append(f"--set {item}: expected key=value")
            continue
        parts = key.split(".")
        node = {}
        cur = node
        for p in parts[:-1]:
            cur[p] = {}
            cur = cur[p]
        cur[parts[-1]] = yaml.safe_load(val)
        _merge(merged, _normalise(node), "", errors)
    if errors:
        raise ConfigError(errors)

    m = merged["map"]
    try:
        spec = CircleMapSpec(str(m["kind"]), m["degree"], float(m["amplitude"] or 0.0))
        spec.validate()
    except (ValidationError, TypeError, ValueError) as exc:
        errors.append(f"map: {exc}")
        spec = None
    o = merged["observable"]
    if o["kind"] not in ("cosine", "constant"):
        errors.append(f"observable.kind: must be cosine or constant, got {o['kind']!r}")
    if o["kind"] == "cosine" and not (isinstance(o["scale"], (int, float)) and o["scale"] > 0):
        errors.append("observable.scale: must be positive")
    tw = merged["twist"]
    try:
        twist = TwistConfig(float(tw["theta"]), int(o["frequency"]), int(tw["k0"]))
    except ValidationError as exc:
        errors.append(f"twist: {exc}")
        twist = None
    except (TypeError, ValueError) as exc:
        errors.append(f"twist: {exc}")
        twist = None
    for key in ("eval_tol", "newton_tol"):
        val = merged["tolerances"][key]
        if not (isinstance(val, (int, float)) and val > 0):
            errors.append(f"tolerances.{key}: must be positive")
    if errors:
        raise ConfigError(errors)
    params = {cmd: merged[cmd] for cmd in COMMANDS}
    return RunConfig(spec, o, twist, merged["tolerances"], merged["seeds"],
                     merged["report"], params, merged)


# --- reports -------------------------------------------------------------------

def _plain(obj):
    if is_dataclass(obj):
        return _plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _write_json(obj, out):
    if obj is None:
        out.write("null")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format(obj, ".17g") if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, list):
        out.write("[")
        for i, v in enumerate(obj):
            if i:
                out.write(", ")
            _write_json(v, out)
        out.write("]")
    elif isinstance(obj, dict):
        out.write("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.write(", ")
            out.write(json.dumps(key) + ": ")
            _write_json(obj[key], out)
        out.write("}")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    buf = io.StringIO()
    _write_json(_plain(report), buf)
    buf.write("\n")
    return buf.getvalue()


def _write_csv(path: Path, header, columns):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


# --- commands ------------------------------------------------------------------

def _cmd_eval(cfg, fmap, obs, out):
    n = int(cfg.params["eval"]["samples"])
    if n < 1:
        raise ValidationError("eval.samples must be >= 1")
    xs = np.arange(n) / n
    res = eval_alpha(xs, cfg.tolerances["eval_tol"], fmap, obs, cfg.twist)
    radius = np.full(n, res.tail_radius)
    _write_csv(out / "eval.csv", ("x", "alpha", "tail_radius"), (xs, res.value, radius))
    return {"samples": n, "truncation": res.truncation, "tail_radius": res.tail_radius,
            "min": float(res.value.min()), "max": float(res.value.max()),
            "csv": "eval.csv"}, 0


def _cmd_residual_scan(cfg, fmap, obs, out):
    n = int(cfg.params["residual-scan"]["points"])
    rng = np.random.default_rng(cfg.seeds["rng_seed"])
    xs = np.sort(rng.random(n))
    tol = cfg.tolerances["eval_tol"]
    consts = map_constants(fmap)
    res = residual(xs, tol, fmap, obs, cfg.twist, consts)
    bound = residual_bound(tol, consts, cfg.twist)
    _write_csv(out / "residual-scan.csv", ("x", "residual"), (xs, res))
    worst = float(np.max(np.abs(res)))
    ok = worst <= bound
    return {"points": n, "max_abs_residual": worst, "bound": bound, "within_bound": ok,
            "csv": "residual-scan.csv"}, 0 if ok else 1


def _cmd_holder(cfg, fmap, obs, out):
    p = cfg.params["holder"]
    rng = np.random.default_rng(cfg.seeds["rng_seed"])
    xs = rng.random(int(p["points"]))
    ests = [holder_exponent_at(float(x), int(p["j_min"]), int(p["j_max"]), int(p["offsets"]),
                               fmap, obs, cfg.twist) for x in xs]
    exps = np.array([e.exponent for e in ests])
    return {"median_exponent": float(np.median(exps)), "theta": cfg.twist.theta,
            "estimates": [{"x": e.x, "exponent": e.exponent, "stderr": e.stderr,
                           "dropped_scales": e.dropped} for e in ests]}, 0


def _cmd_boxdim(cfg, fmap, obs, out):
    p = cfg.params["boxdim"]
    est = box_dimension(int(p["samples"]), int(p["j_min"]), int(p["j_max"]),
                        fmap, obs, cfg.twist, tol=float(p["tol"]))
    return {"dim": est.dim, "r2": est.r2, "scales": est.scales, "counts": est.counts,
            "predicted": 2.0 - cfg.twist.theta}, 0


def _cmd_condition_a(cfg, fmap, obs, out):
    rep = condition_a_report(fmap, obs, cfg.twist, cfg.params["condition-a"]["c"])
    return rep, 0 if rep.passes_A else 1


def _cmd_witness(cfg, fmap, obs, out):
    p = cfg.params["witness"]
    rep = condition_a_report(fmap, obs, cfg.twist, p["c"])
    if not rep.window_ok:
        return {"condition_a": rep, "witness": None,
                "reason": "delta1 > delta2 or C0 <= 0: no admissible window"}, 1
    wit = find_witness(fmap, obs, cfg.twist, rep, float(p["h_cap"]), cfg.seeds["rng_seed"],
                       starts=int(p["starts"]), length=int(p["length"]))
    return {"condition_a": rep, "witness": wit}, 0 if (wit.passed and rep.passes_A) else 1


def _cmd_pressure(cfg, fmap, obs, out):
    p = cfg.params["pressure"]
    return pressure(fmap, float(p["s"]), int(p["depth"])), 0


def _cmd_dim(cfg, fmap, obs, out):
    return dimension_via_pressure(fmap, cfg.twist, int(cfg.params["dim"]["depth"])), 0


def _cmd_hardy(cfg, fmap, obs, out):
    b = cfg.params["hardy"]["b"]
    b = fmap.degree if b is None else int(b)
    threshold, ok = hardy_threshold(cfg.twist.theta, b)
    return {"theta": cfg.twist.theta, "b": b, "threshold": threshold, "passes": ok}, 0 if ok else 1


HANDLERS = {
    "eval": _cmd_eval, "residual-scan": _cmd_residual_scan, "holder": _cmd_holder,
    "boxdim": _cmd_boxdim, "condition-a": _cmd_condition_a, "witness": _cmd_witness,
    "pressure": _cmd_pressure, "dim": _cmd_dim, "hardy": _cmd_hardy,
}


def run(cfg: RunConfig, command: str, out_dir="."):
    """Execute ``command``; returns ``(report dict, exit status)`` and writes files."""
    if command not in HANDLERS:
        raise ValidationError(f"unknown command {command!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    fmap, obs = cfg.build()
    result, status = HANDLERS[command](cfg, fmap, obs, out)
    wall_ms = (time.perf_counter() - t0) * 1e3 if cfg.report.get("timing", True) else 0.0
    report = {"command": command, "config": cfg.raw, "result": result,
              "wall_ms": wall_ms, "version": __version__}
    text = dumps_report(report)
    (out / f"{command}.json").write_text(text)
    return json.loads(text), status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="twistcurve", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="start from a built-in config")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. twist.theta=0.3")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, help="override seeds.rng_seed")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text() if args.config else ""
        overrides = list(args.set)
        if args.seed is not None:
            overrides.append(f"seeds.rng_seed={args.seed}")
        cfg = parse_config(text, overrides, args.preset)
        report, status = run(cfg, args.command, args.out)
    except (TwistcurveError, OSError) as exc:
        print(f"twistcurve {args.command}: error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: wrote {Path(args.out) / (args.command + '.json')} (exit {status})")
    return status


if __name__ == "__main__":
    sys.exit(main())
