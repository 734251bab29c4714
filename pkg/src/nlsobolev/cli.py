"""Batch front-end: run experiments from a flat key = value config file.

Subcommands map onto the library operations:

  validate-kernel   structural checks and calibration of the kernel
  eval              one functional evaluation (pair or polar scheme)
  sweep             delta sweep with reference energy and ratios
  pathology         band kernel against the unit step (exact zeros)
  step-divergence   grid-refinement growth table on the unit step
  kappa             pattern-search estimate of the limit constant
  cross-check       pair vs. polar agreement on one configuration

Every run writes <prefix>.csv and <prefix>.meta.json and prints a
one-line summary.  Exit codes: 0 success, 1 validation failure,
2 parameter/contract/config error.

Config lines are `key = value` with dotted sections, e.g.::

    kernel.shape = indicator
    kernel.normalize = true
    function.kind = affine
    function.gradient = 1.0
    domain.lo = 0
    domain.hi = 1
    p = 2.0
    delta_list = 0.4, 0.2, 0.1, 0.05
    grid_n = 4096

Unknown keys are rejected.  Identical config and seed reproduce the CSV
byte-for-byte (the meta file carries wall time and may differ).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import (ContractError, DomainError, KernelValidationError,
                     ParameterError, ResolutionError)
from . import experiments, functions, gamma_limit, kernels
from .evaluator import FunctionalParams, lambda_pair, lambda_polar
from .experiments import INF_TOKEN

_SUBCOMMANDS = ("validate-kernel", "eval", "sweep", "pathology",
                "step-divergence", "kappa", "cross-check")

_KNOWN_KEYS = {
    "p", "d", "delta", "delta_list", "grid_n", "n_list", "scheme",
    "diagonal_policy", "seed",
    "kernel.shape", "kernel.c", "kernel.normalize", "kernel.threshold",
    "kernel.lo", "kernel.hi", "kernel.a", "kernel.b", "kernel.exponent",
    "kernel.cutoff", "kernel.knots", "kernel.values",
    "function.kind", "function.gradient", "function.offset",
    "function.frequency", "function.amplitude", "function.jumps",
    "function.levels", "function.grid_file", "function.grid_format",
    "function.grid_spacing", "function.grid_origin",
    "domain.lo", "domain.hi", "domain.flavor", "domain.padding",
    "polar.h_min", "polar.h_max", "polar.h_steps", "polar.angle_steps",
    "polar.allow_bounded",
    "kappa.iterations", "kappa.restarts", "kappa.epsilon", "kappa.step_init",
    "kappa.step_shrink", "kappa.patience",
    "cross.budget",
}


class ConfigError(ValueError):
    pass


def parse_config(path: str) -> dict:
    cfg = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {text!r}")
        key, _, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def _get_float(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number: {cfg[key]!r}") from exc


def _get_int(cfg, key, default=None):
    v = _get_float(cfg, key, default)
    if v != int(v):
        raise ConfigError(f"key {key!r}: expected an integer")
    return int(v)


def _get_bool(cfg, key, default=False):
    if key not in cfg:
        return default
    v = cfg[key].lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ConfigError(f"key {key!r}: expected true/false")


def _get_list(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return [float(tok) for tok in cfg[key].replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number list") from exc


def build_kernel(cfg: dict, d: int, p: float) -> kernels.Kernel:
    shape = cfg.get("kernel.shape")
    if shape is None:
        raise ConfigError("missing required key 'kernel.shape'")
    c = _get_float(cfg, "kernel.c", 1.0)
    if shape == "indicator":
        k = kernels.indicator_kernel(c, _get_float(cfg, "kernel.threshold", 1.0))
    elif shape == "band":
        k = kernels.band_kernel(_get_float(cfg, "kernel.lo", 1.0),
                                _get_float(cfg, "kernel.hi", 2.0), c)
    elif shape == "envelope":
        k = kernels.envelope_kernel(_get_float(cfg, "kernel.a", 1.0),
                                    _get_float(cfg, "kernel.b", 1.0), p, c)
    elif shape == "power-cutoff":
        k = kernels.power_cutoff_kernel(_get_float(cfg, "kernel.exponent", p + 1.0),
                                        _get_float(cfg, "kernel.cutoff", 1.0), c)
    elif shape == "tabulated":
        k = kernels.tabulated_kernel(_get_list(cfg, "kernel.knots"),
                                     _get_list(cfg, "kernel.values"), c)
    else:
        raise ConfigError(f"unknown kernel.shape {shape!r}")
    if _get_bool(cfg, "kernel.normalize", False):
        k = kernels.normalize(k, d, p)
    return k


def _build_domain(cfg: dict, d: int) -> functions.Domain:
    lo = _get_list(cfg, "domain.lo", [0.0] * d)
    hi = _get_list(cfg, "domain.hi", [1.0] * d)
    flavor = cfg.get("domain.flavor", "bounded")
    if flavor == "whole-space":
        return functions.whole_space(lo, hi, _get_float(cfg, "domain.padding", 1.0))
    if flavor != "bounded":
        raise ConfigError(f"unknown domain.flavor {flavor!r}")
    return functions.bounded_box(lo, hi)


def build_function(cfg: dict, d: int) -> functions.TestFunction:
    kind = cfg.get("function.kind")
    if kind is None:
        raise ConfigError("missing required key 'function.kind'")
    if kind == "cube-profile":
        if "domain.lo" in cfg or "domain.hi" in cfg:
            return functions.cube_profile(d, _build_domain(cfg, d))
        return functions.cube_profile(d)
    if kind == "grid":
        path = cfg.get("function.grid_file")
        if path is None:
            raise ConfigError("grid functions need 'function.grid_file'")
        fmt = cfg.get("function.grid_format", "csv")
        if fmt == "csv":
            values = np.loadtxt(path, delimiter=",")
        elif fmt == "float64":
            values = np.fromfile(path, dtype=np.float64)
        else:
            raise ConfigError(f"unknown function.grid_format {fmt!r}")
        spacing = _get_float(cfg, "function.grid_spacing")
        origin = _get_list(cfg, "function.grid_origin", [0.0] * values.ndim)
        flavor = cfg.get("domain.flavor", "bounded")
        padding = _get_float(cfg, "domain.padding", 0.0)
        return functions.grid_function(values, origin, spacing, flavor, padding)
    dom = _build_domain(cfg, d)
    if kind == "affine":
        return functions.affine_function(_get_list(cfg, "function.gradient", [1.0] * d),
                                         _get_float(cfg, "function.offset", 0.0), dom)
    if kind == "sine":
        return functions.sine_function(_get_float(cfg, "function.frequency", 1.0),
                                       _get_float(cfg, "function.amplitude", 1.0), dom)
    if kind == "step":
        return functions.step_function(_get_list(cfg, "function.jumps", [0.0, 1.0]),
                                       _get_list(cfg, "function.levels", [0.0, 1.0, 0.0]),
                                       dom)
    raise ConfigError(f"unknown function.kind {kind!r}")


def _polar_settings(cfg: dict) -> dict:
    out = {}
    if "polar.h_min" in cfg:
        out["polar_h_min"] = _get_float(cfg, "polar.h_min")
    if "polar.h_max" in cfg:
        out["polar_h_max"] = _get_float(cfg, "polar.h_max")
    if "polar.h_steps" in cfg:
        out["polar_h_steps"] = _get_int(cfg, "polar.h_steps")
    if "polar.angle_steps" in cfg:
        out["polar_angle_steps"] = _get_int(cfg, "polar.angle_steps")
    return out


def _write_single_csv(path, header, rows):
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([tok if isinstance(tok, str) else
                        (experiments.CSV_DIGITS % tok if math.isfinite(tok) else INF_TOKEN)
                        for tok in row])


def _meta(cfg, args, extra=None):
    meta = {"config": dict(cfg), "subcommand": args.subcommand,
            "threads": args.threads, "seed": args.seed}
    if extra:
        meta.update(extra)
    return meta


# ----------------------------------------------------------------------
# subcommand runners (return exit status)
# ----------------------------------------------------------------------

def _run_validate_kernel(cfg, args) -> int:
    p = _get_float(cfg, "p", 2.0)
    d = _get_int(cfg, "d", 1)
    k = build_kernel(cfg, d, p)
    report = kernels.validate(k, p, d)
    rows = [
        ["growth", str(report.cond_growth_ok).lower(), report.growth_ratio],
        ["bounded", str(report.cond_bounded_ok).lower(), report.sup_value],
        ["monotone", str(report.cond_monotone_ok).lower(), math.nan],
        ["normalized", str(report.cond_normalized_ok).lower(), report.normalization_value],
    ]
    _write_single_csv(args.out + ".csv", ["check", "ok", "detail"], rows)
    experiments.write_meta(_meta(cfg, args, {"kernel": k.describe()}),
                           args.out + ".meta.json")
    if report.all_ok:
        print(f"validate-kernel PASS normalization_value="
              f"{report.normalization_value:.12g}")
        return 0
    print(f"validate-kernel FAIL ({', '.join(report.failures())})")
    return 1


def _run_eval(cfg, args) -> int:
    p = _get_float(cfg, "p", 2.0)
    d = _get_int(cfg, "d", 1)
    k = build_kernel(cfg, d, p)
    f = build_function(cfg, d)
    delta = _get_float(cfg, "delta")
    params = FunctionalParams(p=p, delta=delta, grid_n=_get_int(cfg, "grid_n", 1024),
                              diagonal_policy=cfg.get("diagonal_policy",
                                                      "exclude-and-bound"),
                              threads=args.threads, **_polar_settings(cfg))
    scheme = cfg.get("scheme", "pair")
    if scheme == "pair":
        res = lambda_pair(f, k, params)
    elif scheme == "polar":
        res = lambda_polar(f, k, params,
                           allow_bounded=_get_bool(cfg, "polar.allow_bounded"))
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    energy = functions.sobolev_energy(f, p)
    ratio = res.value / energy if (math.isfinite(energy) and energy > 0) else math.inf
    _write_single_csv(args.out + ".csv",
                      ["delta", "value", "tail_bound", "energy", "ratio"],
                      [[delta, res.value, res.tail_bound, energy, ratio]])
    experiments.write_meta(_meta(cfg, args, {"kernel": k.describe(),
                                             "function": f.describe(),
                                             "scheme": scheme}),
                           args.out + ".meta.json")
    print(f"eval value={res.value:.17g} tail_bound={res.tail_bound:.3g}")
    return 0


def _run_sweep(cfg, args) -> int:
    p = _get_float(cfg, "p", 2.0)
    d = _get_int(cfg, "d", 1)
    k = build_kernel(cfg, d, p)
    f = build_function(cfg, d)
    deltas = _get_list(cfg, "delta_list")
    report = experiments.delta_sweep(
        f, k, p, deltas, grid_n=_get_int(cfg, "grid_n", 1024),
        scheme=cfg.get("scheme", "pair"),
        diagonal_policy=cfg.get("diagonal_policy", "exclude-and-bound"),
        threads=args.threads,
        allow_bounded_polar=_get_bool(cfg, "polar.allow_bounded"),
        polar_settings=_polar_settings(cfg))
    experiments.write_sweep_csv(report, args.out + ".csv")
    experiments.write_meta(_meta(cfg, args, report.metadata), args.out + ".meta.json")
    bound = report.empirical_bound_ratio
    last = report.rows[-1]
    print(f"sweep rows={len(report.rows)} last_delta={last.delta:g} "
          f"last_value={last.value:.12g} "
          f"bound_ratio={bound if bound is None else format(bound, '.6g')}")
    return 0


def _run_pathology(cfg, args) -> int:
    if "delta_list" in cfg:
        deltas = _get_list(cfg, "delta_list")
    else:
        deltas = [_get_float(cfg, "delta", 0.25)]
    report = experiments.band_pathology(deltas, grid_n=_get_int(cfg, "grid_n", 1024),
                                        threads=args.threads)
    experiments.write_sweep_csv(report, args.out + ".csv")
    experiments.write_meta(_meta(cfg, args, report.metadata), args.out + ".meta.json")
    smallest = report.rows[-1]
    print(f"pathology delta={smallest.delta:g} value={smallest.value:.17g}")
    return 0


def _run_step_divergence(cfg, args) -> int:
    p = _get_float(cfg, "p", 2.0)
    delta = _get_float(cfg, "delta", 0.1)
    ns = [int(n) for n in _get_list(cfg, "n_list", [1024, 2048, 4096, 8192])]
    report = experiments.step_divergence(p, delta, ns, threads=args.threads)
    experiments.write_growth_csv(report, args.out + ".csv")
    experiments.write_meta(_meta(cfg, args, report.metadata), args.out + ".meta.json")
    print(f"step-divergence final_ratio={report.final_ratio:.6g} "
          f"diverging={str(report.divergence_flag).lower()}")
    return 0


def _run_kappa(cfg, args) -> int:
    p = _get_float(cfg, "p", 2.0)
    d = _get_int(cfg, "d", 1)
    k = build_kernel(cfg, d, p)
    prob = gamma_limit.KappaProblem(
        kernel=k, delta=_get_float(cfg, "delta", 0.05),
        grid_n=_get_int(cfg, "grid_n", 2048), p=p, d=d,
        epsilon=(_get_float(cfg, "kappa.epsilon") if "kappa.epsilon" in cfg else None),
        iterations=_get_int(cfg, "kappa.iterations", 2000),
        restarts=_get_int(cfg, "kappa.restarts", 5),
        step_init=(_get_float(cfg, "kappa.step_init")
                   if "kappa.step_init" in cfg else None),
        step_shrink=_get_float(cfg, "kappa.step_shrink", 0.5),
        patience=_get_int(cfg, "kappa.patience", 50),
        seed=args.seed, threads=args.threads)
    report = gamma_limit.kappa_estimate(prob)
    gamma_limit.write_trace_csv(report, args.out + ".csv")
    experiments.write_meta(_meta(cfg, args, report.summary()), args.out + ".meta.json")
    print(f"kappa kappa_hat={report.kappa_hat:.12g} baseline={report.baseline:.12g} "
          f"proximity={report.final_proximity:.6g}")
    return 0


def _run_cross_check(cfg, args) -> int:
    p = _get_float(cfg, "p", 2.0)
    d = _get_int(cfg, "d", 1)
    k = build_kernel(cfg, d, p)
    f = build_function(cfg, d)
    deltas = _get_list(cfg, "delta_list") if "delta_list" in cfg \
        else [_get_float(cfg, "delta")]
    budget = _get_float(cfg, "cross.budget", 0.02)
    rows = []
    worst = 0.0
    ok = True
    for delta in deltas:
        params = FunctionalParams(p=p, delta=delta,
                                  grid_n=_get_int(cfg, "grid_n", 1024),
                                  threads=args.threads, **_polar_settings(cfg))
        pr = lambda_pair(f, k, params)
        po = lambda_polar(f, k, params,
                          allow_bounded=_get_bool(cfg, "polar.allow_bounded"))
        ref = max(pr.value, po.value, np.finfo(float).eps)
        gap = abs(pr.value - po.value)
        allowed = pr.tail_bound + po.tail_bound + budget * ref
        rows.append([delta, pr.value, po.value, pr.tail_bound + po.tail_bound,
                     gap / ref])
        worst = max(worst, gap / ref)
        ok = ok and gap <= allowed
    _write_single_csv(args.out + ".csv",
                      ["delta", "pair_value", "polar_value", "combined_tail",
                       "rel_gap"], rows)
    experiments.write_meta(_meta(cfg, args, {"kernel": k.describe(),
                                             "function": f.describe(),
                                             "budget": budget}),
                           args.out + ".meta.json")
    print(f"cross-check {'PASS' if ok else 'FAIL'} worst_rel_gap={worst:.6g}")
    return 0 if ok else 1


_RUNNERS = {
    "validate-kernel": _run_validate_kernel,
    "eval": _run_eval,
    "sweep": _run_sweep,
    "pathology": _run_pathology,
    "step-divergence": _run_step_divergence,
    "kappa": _run_kappa,
    "cross-check": _run_cross_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nlsobolev",
        description="Non-local p-energy functionals: evaluation, sweeps, "
                    "pathologies, and limit-constant estimation.")
    parser.add_argument("subcommand", choices=_SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="flat key = value config file")
    parser.add_argument("--out", default="run", help="output path prefix")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    start = time.perf_counter()
    try:
        cfg = parse_config(args.config)
        if "seed" in cfg and args.seed == 0:
            args.seed = _get_int(cfg, "seed")
        status = _RUNNERS[args.subcommand](cfg, args)
    except (ConfigError, ParameterError, ResolutionError, ContractError,
            DomainError, KernelValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _append_wall_time(args.out + ".meta.json", time.perf_counter() - start)
    return status


def _append_wall_time(path, seconds):
    try:
        with open(path) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return
    meta["wall_time_s"] = seconds
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    sys.exit(main())
