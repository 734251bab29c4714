"""Variational probes of the small-delta limit constant kappa.

The limiting functional of Lambda_delta in the variational sense is
kappa * int |grad u|^p for a constant kappa in (0, 1] depending only on
p and the kernel.  kappa is the infimal limiting value of
Lambda_delta(v_delta, Q) over families converging in L^p(Q) to the
unit-gradient diagonal profile U on the unit cube Q.

A finite computation cannot take delta to 0, so ``kappa_estimate``
fixes a small delta and minimizes the discretized functional over
lattice perturbations of U inside an L^p proximity ball.  The returned
kappa_hat is an upper bound for the discretized infimum at that
(delta, grid) and is never presented as kappa itself.

The objective is nonsmooth (indicator-style kernels make it piecewise
constant in v), so the search is a projected pattern search: random
coordinate proposals with a shrinking step, clipped to the proximity
ball, with random restarts.  Single-coordinate moves admit O(n)
incremental objective updates, which is what makes thousands of
iterations affordable on top of an O(n^2) functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ResolutionError
from .evaluator import pair_sum_on_samples, sample_midpoints
from .experiments import SweepReport, delta_sweep
from .functions import TestFunction, cube_profile, sobolev_energy
from .kernels import Kernel, _shape_values

__all__ = [
    "KappaProblem",
    "KappaReport",
    "kappa_estimate",
    "write_trace_csv",
    "recovery_upper_bound",
    "PerturbationFamily",
    "ProbeRow",
    "ProbeReport",
    "lower_bound_probe",
]


@dataclass(frozen=True)
class KappaProblem:
    kernel: Kernel
    delta: float
    grid_n: int
    p: float = 2.0
    d: int = 1
    epsilon: float | None = None      # L^p proximity budget; default 0.1 * ||U||_p
    iterations: int = 2000            # single-coordinate proposals per restart
    restarts: int = 5                 # restart 0 starts exactly at U
    step_init: float | None = None    # default: delta
    step_shrink: float = 0.5
    patience: int = 50                # consecutive rejections before shrinking
    seed: int = 0
    threads: int = 1
    profile: TestFunction | None = None   # override: e.g. an affine on a dilated box

    def __post_init__(self):
        if self.delta <= 0 or self.p < 1:
            raise ParameterError("need delta > 0 and p >= 1")
        if self.d not in (1, 2):
            raise ParameterError("d must be 1 or 2")
        if self.iterations < 0 or self.restarts < 1:
            raise ParameterError("need iterations >= 0 and restarts >= 1")
        if self.epsilon is not None and self.epsilon < 0:
            raise ParameterError("epsilon must be nonnegative")
        if self.epsilon == 0.0 and (self.iterations > 0 or self.restarts > 1):
            raise ParameterError("epsilon = 0 leaves no room for perturbations")


@dataclass
class KappaReport:
    kappa_hat: float
    baseline: float           # functional value at U on the same grid
    epsilon: float
    final_proximity: float
    seed: int
    trace: list = field(default_factory=list)   # (iteration, best objective, best proximity)
    best_values: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "kappa_hat": self.kappa_hat,
            "baseline": self.baseline,
            "epsilon": self.epsilon,
            "final_proximity": self.final_proximity,
            "seed": self.seed,
            "iterations_recorded": len(self.trace),
            **self.metadata,
        }


def _default_profile(prob: KappaProblem) -> TestFunction:
    if prob.profile is not None:
        return prob.profile
    return cube_profile(prob.d)


class _PairObjective:
    """Lattice functional with O(n) single-coordinate updates.

    The full value agrees bit-for-bit with pair_sum_on_samples on the
    same array (both group terms by lag); the incremental path tracks a
    running total that is re-anchored by a full evaluation at the end.
    """

    def __init__(self, k: Kernel, p: float, delta: float, spacings, shape, threads: int):
        self.k, self.p, self.delta = k, p, delta
        self.spacings = spacings
        self.threads = threads
        self.factor = k.scale_c * delta ** p
        n = shape[0]
        if len(shape) == 1:
            m = np.arange(n, dtype=float)
            w = np.zeros(n)
            w[1:] = 2.0 * (m[1:] * spacings[0]) ** (-(p + 1.0)) * spacings[0] ** 2
            self.w = w
            self.idx = np.arange(n)
        else:
            hx, hy = spacings
            mx = np.arange(n, dtype=float)[:, None]
            my = np.arange(shape[1], dtype=float)[None, :]
            r = np.hypot(mx * hx, my * hy)
            r[0, 0] = 1.0
            w = 2.0 * r ** (-(p + 2.0)) * (hx * hy) ** 2
            w[0, 0] = 0.0
            self.w = w
            self.idx = np.arange(n)

    def full(self, v: np.ndarray) -> float:
        return pair_sum_on_samples(v, self.spacings, self.k, self.p, self.delta,
                                   self.threads)

    def move_delta(self, v: np.ndarray, where, old: float, new: float) -> float:
        """Objective change when v[where] goes old -> new."""
        if v.ndim == 1:
            i = where
            wrow = self.w[np.abs(self.idx - i)]
        else:
            i, j = where
            wrow = self.w[np.abs(self.idx - i)[:, None], np.abs(self.idx - j)[None, :]]
        d_new = np.abs(v - new) / self.delta
        d_old = np.abs(v - old) / self.delta
        diff = _shape_values(self.k, d_new) - _shape_values(self.k, d_old)
        return self.factor * float(np.sum(wrow * diff))


def kappa_estimate(prob: KappaProblem) -> KappaReport:
    """Projected pattern search for the discretized infimum near U.

    Deterministic for a fixed seed: reruns reproduce the trace
    bit-for-bit.  kappa_hat is the full re-evaluation of the best point
    found, and U itself is always a feasible starting point, so
    kappa_hat <= baseline up to round-off.
    """
    profile = _default_profile(prob)
    u_ref, spac = sample_midpoints(profile, prob.grid_n)
    h_max = max(spac)
    if h_max > prob.delta / 8.0:
        needed = math.ceil(8.0 * max(
            b - a for a, b in zip(profile.domain.window_lo, profile.domain.window_hi)
        ) / prob.delta)
        raise ResolutionError(
            f"grid too coarse for delta={prob.delta}: need grid_n >= {needed}")
    cell_vol = float(np.prod(spac))
    norm_u = float((np.sum(np.abs(u_ref) ** prob.p) * cell_vol) ** (1.0 / prob.p))
    eps = prob.epsilon if prob.epsilon is not None else 0.1 * norm_u
    if eps < 0:
        raise ParameterError("epsilon must be nonnegative")
    eps_pow = eps ** prob.p
    step0 = prob.step_init if prob.step_init is not None else prob.delta

    obj = _PairObjective(prob.kernel, prob.p, prob.delta, spac, u_ref.shape,
                         prob.threads)
    rng = np.random.default_rng(prob.seed)
    baseline = obj.full(u_ref)

    best_v = u_ref.copy()
    best_obj = baseline
    best_prox = 0.0
    trace = [(0, best_obj, best_prox)]
    flat_n = u_ref.size
    it_global = 0

    for restart in range(prob.restarts):
        if restart == 0:
            v = u_ref.copy()
            s = baseline
            prox_pow = 0.0
        else:
            pert = rng.standard_normal(u_ref.shape)
            pnorm = float((np.sum(np.abs(pert) ** prob.p) * cell_vol) ** (1.0 / prob.p))
            if pnorm > 0:
                pert *= 0.5 * eps / pnorm
            v = u_ref + pert
            s = obj.full(v)
            prox_pow = float(np.sum(np.abs(v - u_ref) ** prob.p) * cell_vol)
        step = step0
        fails = 0

        for _ in range(prob.iterations):
            it_global += 1
            flat = int(rng.integers(flat_n))
            where = flat if v.ndim == 1 else divmod(flat, v.shape[1])
            old = v[where] if v.ndim == 1 else v[where[0], where[1]]
            ref = u_ref[where] if v.ndim == 1 else u_ref[where[0], where[1]]
            sign = 1.0 if rng.random() < 0.5 else -1.0
            accepted = False
            for sgn in (sign, -sign):
                cand = old + sgn * step
                # clip the move so the proximity ball stays satisfied
                without = prox_pow - cell_vol * abs(old - ref) ** prob.p
                room = max(0.0, eps_pow - max(without, 0.0))
                radius = (room / cell_vol) ** (1.0 / prob.p) * (1.0 - 1e-12)
                cand = min(max(cand, ref - radius), ref + radius)
                if cand == old:
                    continue
                gain = obj.move_delta(v, where, old, cand)
                if s + gain < s:
                    if v.ndim == 1:
                        v[where] = cand
                    else:
                        v[where[0], where[1]] = cand
                    s += gain
                    prox_pow = max(without, 0.0) + cell_vol * abs(cand - ref) ** prob.p
                    accepted = True
                    break
            if accepted:
                fails = 0
                if s < best_obj:
                    best_obj = s
                    best_v = v.copy()
                    best_prox = (max(prox_pow, 0.0)) ** (1.0 / prob.p)
            else:
                fails += 1
                if fails >= prob.patience:
                    step = max(step * prob.step_shrink, step0 * 1e-4)
                    fails = 0
            trace.append((it_global, best_obj, best_prox))

    kappa_hat = obj.full(best_v)
    final_prox = float((np.sum(np.abs(best_v - u_ref) ** prob.p) * cell_vol)
                       ** (1.0 / prob.p))
    meta = {
        "kernel": prob.kernel.describe(),
        "profile": profile.describe(),
        "p": prob.p,
        "d": prob.d,
        "delta": prob.delta,
        "grid_n": prob.grid_n,
        "iterations": prob.iterations,
        "restarts": prob.restarts,
        "note": ("upper bound for the discretized infimum at this (delta, grid); "
                 "not kappa itself"),
    }
    return KappaReport(kappa_hat=kappa_hat, baseline=baseline, epsilon=eps,
                       final_proximity=final_prox, seed=prob.seed, trace=trace,
                       best_values=best_v, metadata=meta)


def write_trace_csv(report: KappaReport, path):
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "objective", "proximity"])
        for it, objv, prox in report.trace:
            w.writerow([str(it), "%.17g" % objv, "%.17g" % prox])


# ----------------------------------------------------------------------
# recovery families and lower-bound probes
# ----------------------------------------------------------------------

def recovery_upper_bound(f: TestFunction, k: Kernel, p: float, delta_list,
                         grid_n: int = 1024, threads: int = 1) -> SweepReport:
    """Evaluate the trivial recovery family g_delta = f along a sweep.

    The pointwise limit of the values is the full energy of f, which
    dominates kappa times that energy: a concrete witness that the
    limiting constant cannot exceed 1.
    """
    report = delta_sweep(f, k, p, delta_list, grid_n=grid_n, threads=threads)
    small = report.rows[-min(3, len(report.rows)):]
    report.metadata["experiment"] = "recovery_upper_bound"
    report.metadata["limsup_proxy"] = max(r.value for r in small)
    return report


@dataclass(frozen=True)
class PerturbationFamily:
    """A family delta -> g_delta converging to a base function in L^p.

    ``make`` builds g_delta; ``budget`` is the proximity schedule: the
    discrete L^p distance to the base must stay within budget(delta).
    """
    name: str
    make: object        # callable delta -> TestFunction
    budget: object      # callable delta -> float


@dataclass(frozen=True)
class ProbeRow:
    family: str
    delta: float
    value: float
    proximity: float
    budget: float


@dataclass
class ProbeReport:
    rows: list[ProbeRow]
    per_family: dict
    metadata: dict = field(default_factory=dict)


def lower_bound_probe(g: TestFunction, families, k: Kernel, p: float, delta_list,
                      grid_n: int = 1024, kappa_hat: float | None = None,
                      tolerance: float = 0.05, threads: int = 1) -> ProbeReport:
    """Evaluate perturbation families against the kappa_hat lower bound.

    For each family the minimum value over the sweep is compared with
    kappa_hat * energy(g) - tolerance.  A violation is reported as
    evidence that kappa_hat (an upper bound for the discretized
    infimum) is loose at this resolution, never as a failure of the
    variational inequality itself.
    """
    from .evaluator import FunctionalParams, lambda_pair

    ds = [float(d) for d in delta_list]
    if any(d <= 0 for d in ds):
        raise ParameterError("deltas must be positive")
    g_samples, spac = sample_midpoints(g, grid_n)
    cell_vol = float(np.prod(spac))
    energy = sobolev_energy(g, p)
    rows = []
    per_family = {}
    for fam in families:
        fam_rows = []
        for d in ds:
            gd = fam.make(d)
            gd_samples, spac2 = sample_midpoints(gd, grid_n)
            if gd_samples.shape != g_samples.shape:
                raise ParameterError(f"family {fam.name!r} changed the grid shape")
            prox = float((np.sum(np.abs(gd_samples - g_samples) ** p) * cell_vol)
                         ** (1.0 / p))
            budget = float(fam.budget(d))
            if prox > budget * (1.0 + 1e-9):
                raise ParameterError(
                    f"family {fam.name!r} violates its proximity schedule at "
                    f"delta={d}: {prox:.3g} > {budget:.3g}")
            params = FunctionalParams(p=p, delta=d, grid_n=grid_n, threads=threads)
            value = lambda_pair(gd, k, params).value
            row = ProbeRow(fam.name, d, value, prox, budget)
            rows.append(row)
            fam_rows.append(row)
        min_value = min(r.value for r in fam_rows)
        entry = {"min_value": min_value}
        if kappa_hat is not None and math.isfinite(energy):
            bound = kappa_hat * energy - tolerance
            entry["lower_bound"] = bound
            entry["consistent"] = bool(min_value >= bound)
        per_family[fam.name] = entry
    meta = {"experiment": "lower_bound_probe", "kernel": k.describe(),
            "function": g.describe(), "p": p, "grid_n": grid_n,
            "kappa_hat": kappa_hat, "tolerance": tolerance}
    return ProbeReport(rows, per_family, meta)
