"""Config-file driven experiment runner.

    monofourier run CONFIG.json [--seed N]
    monofourier schema

Exit codes: 0 success, 1 usage or schema error, 2 capacity error,
3 infeasible lower-bound construction.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import tempfile
from pathlib import Path

import jsonschema

from . import __version__, kernels
from .errors import CapacityError, InfeasibleError, MonofourierError
from .estimator import EstimatorConfig
from .harness import (CSV_FIELDS, NoiseModel, constant_baseline_risk, format_csv, mc_risk,
                      replicate_seed, spectral_sweep)
from .influence import conditional_mean_influences, influence_from_spectrum, influence_profile
from .core import wht_forward
from .lower_bound import MiddleLayerFamily, default_support_size, lower_bound_demo, verify_family
from . import zoo

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_INFEASIBLE = 0, 1, 2, 3

KINDS = ["risk-curve", "spectral-check", "lower-bound", "influence-profile", "baseline-compare"]

_FUNCTION = {
    "type": "object",
    "required": ["tag", "dim"],
    "properties": {
        "tag": {"enum": ["dictator", "additive_junta", "tribes", "majority", "middle_layer", "table"]},
        "dim": {"type": "integer", "minimum": 1, "maximum": 64},
        "i": {"type": "integer", "minimum": 1},
        "coords": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "width": {"type": "integer", "minimum": 1},
        "blocks": {"type": "integer", "minimum": 1},
        "support": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "beta": {"type": "number", "minimum": 0, "maximum": 1},
        "omega": {"type": "string", "pattern": "^0x[0-9a-fA-F]+$"},
        "values": {"type": "array", "items": {"type": "number"}},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "monofourier experiment config",
    "type": "object",
    "required": ["experiment", "output"],
    "properties": {
        "experiment": {"enum": KINDS},
        "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "output": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "function": _FUNCTION,
        "n_grid": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
        "noise": {
            "type": "object",
            "properties": {"kind": {"enum": ["gaussian", "uniform", "none"]},
                           "scale": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
        "estimator": {
            "type": "object",
            "properties": {
                "gamma": {"type": "number"},
                "c0": {"type": "number", "minimum": 0},
                "d0_override": {"type": ["integer", "null"], "minimum": 1},
                "max_spectral_set": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "replicates": {"type": "integer", "minimum": 1},
        "workers": {"type": "integer", "minimum": 1},
        "d0_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "delta_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                       "minItems": 1},
        "lower_bound": {
            "type": "object",
            "required": ["K", "sigma", "n"],
            "properties": {
                "s": {"type": "integer", "minimum": 1, "maximum": 20},
                "K": {"type": "number", "exclusiveMinimum": 0},
                "B": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "A1": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "sigma": {"type": "number", "exclusiveMinimum": 0},
                "n": {"type": "integer", "minimum": 2},
                "target_cap": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"experiment": {"enum": ["risk-curve", "baseline-compare"]}}},
         "then": {"required": ["function", "n_grid"]}},
        {"if": {"properties": {"experiment": {"const": "spectral-check"}}},
         "then": {"required": ["function", "d0_list", "delta_list"]}},
        {"if": {"properties": {"experiment": {"const": "influence-profile"}}},
         "then": {"required": ["function"]}},
        {"if": {"properties": {"experiment": {"const": "lower-bound"}}},
         "then": {"required": ["lower_bound"]}},
    ],
}


class SchemaError(MonofourierError):
    pass


def normalize(config: dict) -> dict:
    """Validate and fill defaults; the result re-validates to itself."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"config field '{where}': {exc.message}") from None
    cfg = copy.deepcopy(config)
    cfg.setdefault("id", "experiment")
    cfg.setdefault("seed", 0)
    kind = cfg["experiment"]
    if kind in ("risk-curve", "baseline-compare"):
        cfg["noise"] = NoiseModel.from_json(cfg.get("noise", {})).to_json()
        cfg["estimator"] = EstimatorConfig.from_json(cfg.get("estimator", {})).to_json()
        cfg.setdefault("replicates", 100)
        cfg.setdefault("workers", 1)
    if "function" in cfg:
        cfg["function"] = zoo.from_json(cfg["function"]).to_json()
    if kind == "lower-bound":
        lb = cfg["lower_bound"]
        lb.setdefault("s", default_support_size(lb["n"]))
        lb.setdefault("B", None)
        lb.setdefault("A1", None)
        lb.setdefault("target_cap", 1024)
    return cfg


def _risk_rows(cfg: dict, provenance: dict, baseline: bool) -> list[dict]:
    f = zoo.from_json(cfg["function"])
    noise = NoiseModel.from_json(cfg["noise"])
    est = EstimatorConfig.from_json(cfg["estimator"])
    reps, seed, workers = cfg["replicates"], cfg["seed"], cfg["workers"]
    provenance["replicate_seeds"] = [replicate_seed(seed, r) for r in range(reps)]
    rows, summaries = [], []
    for n in cfg["n_grid"]:
        reports = []
        rep = mc_risk(f, n, noise, est, reps, seed, workers)
        reports.append(("fourier", rep))
        if baseline:
            reports.append(("constant", constant_baseline_risk(f, n, noise, reps, seed, workers)))
        for name, r in reports:
            exp_id = cfg["id"] if not baseline else f"{cfg['id']}/{name}"
            rows.append(r.csv_row(exp_id))
            summaries.append({"estimator": name, "n": n, "mean_risk": r.mean_risk,
                              "std_error": r.std_error, "values": r.values})
    provenance["result"] = summaries
    return rows


def _spectral_rows(cfg: dict, provenance: dict):
    f = zoo.from_json(cfg["function"])
    rows = []
    for rep in spectral_sweep(f, cfg["d0_list"], cfg["delta_list"]):
        rows.append({"experiment_id": cfg["id"], "function_tag": f.describe(), "d": f.dim,
                     "K": rep.K, "d0": rep.d0, "delta": rep.delta, "J_size": len(rep.J),
                     "J_bound": rep.K / rep.delta, "tail_weight": rep.tail_weight,
                     "bound": rep.bound, "bound_satisfied": rep.holds and rep.J_size_ok})
    provenance["result"] = {"all_satisfied": all(r["bound_satisfied"] for r in rows)}
    fields = ["experiment_id", "function_tag", "d", "K", "d0", "delta", "J_size", "J_bound",
              "tail_weight", "bound", "bound_satisfied"]
    return rows, fields


def _influence_rows(cfg: dict, provenance: dict):
    f = zoo.from_json(cfg["function"])
    t = f.to_table()
    prof = influence_profile(t)
    cond = conditional_mean_influences(t)
    spec_l2, spec_total = influence_from_spectrum(wht_forward(t))
    rows = [{"experiment_id": cfg["id"], "function_tag": f.describe(), "coordinate": i + 1,
             "l1": float(prof.l1[i]), "l2": float(prof.l2[i]),
             "l1_conditional_means": float(cond[i]), "l2_spectral": float(spec_l2[i])}
            for i in range(t.dim)]
    provenance["result"] = {"total_l1": prof.total_l1, "total_l2": prof.total_l2,
                            "total_l2_spectral": spec_total, "variance": t.variance()}
    fields = ["experiment_id", "function_tag", "coordinate", "l1", "l2",
              "l1_conditional_means", "l2_spectral"]
    return rows, fields


def _lower_bound_rows(cfg: dict, provenance: dict):
    lb = cfg["lower_bound"]
    report = lower_bound_demo(lb["s"], lb["K"], lb["sigma"], lb["n"], seed=cfg["seed"],
                              B=lb["B"], A1=lb["A1"], target_cap=lb["target_cap"])
    provenance["result"] = report
    family = MiddleLayerFamily.from_json(report["family"])
    checks = verify_family(family, lb["K"], lb["B"]).checks
    rows = [{"experiment_id": cfg["id"], "omega_index": c.omega_index, "monotone": c.monotone,
             "min_value": c.min_value, "max_value": c.max_value, "total_l1": c.total_l1,
             "total_l2": c.total_l2, "l2_identity_gap": c.l2_identity_gap} for c in checks]
    fields = ["experiment_id", "omega_index", "monotone", "min_value", "max_value",
              "total_l1", "total_l2", "l2_identity_gap"]
    return rows, fields


def execute(cfg: dict) -> tuple[str, dict]:
    """Run a normalized config; return (CSV text, provenance dict)."""
    provenance = {
        "config": cfg,
        "library": {"name": "monofourier", "version": __version__},
        "backend": kernels.BACKEND,
    }
    kind = cfg["experiment"]
    if kind == "risk-curve":
        rows, fields = _risk_rows(cfg, provenance, baseline=False), CSV_FIELDS
    elif kind == "baseline-compare":
        rows, fields = _risk_rows(cfg, provenance, baseline=True), CSV_FIELDS
    elif kind == "spectral-check":
        rows, fields = _spectral_rows(cfg, provenance)
    elif kind == "influence-profile":
        rows, fields = _influence_rows(cfg, provenance)
    else:
        rows, fields = _lower_bound_rows(cfg, provenance)
    return format_csv(rows, fields), provenance


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def load_config(path: str) -> dict:
    with open(path) as fh:
        obj = json.load(fh)
    # a provenance file reruns the experiment it records
    if isinstance(obj, dict) and "config" in obj and "library" in obj:
        obj = obj["config"]
    return obj


def run(config_path: str, seed: int | None = None) -> int:
    try:
        raw = load_config(config_path)
        if seed is not None and isinstance(raw, dict):
            raw = {**raw, "seed": seed}
        cfg = normalize(raw)
        csv_text, provenance = execute(cfg)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InfeasibleError as exc:
        print(f"infeasible construction: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MonofourierError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    _write_atomic(out / "results.csv", csv_text)
    _write_atomic(out / "provenance.json", json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'results.csv'} and {out / 'provenance.json'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="monofourier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config (or rerun a provenance file)")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    sub.add_parser("schema", help="print the config JSON schema")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "schema":
        print(json.dumps(CONFIG_SCHEMA, indent=2))
        return EXIT_OK
    return run(args.config, args.seed)


if __name__ == "__main__":
    sys.exit(main())
