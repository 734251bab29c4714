"""Desk-scale convergence experiments for the non-local functional.

Three studies:

  delta_sweep      value vs. the smoothing scale, against the reference
                   energy int |grad u|^p; for admissible kernels the
                   ratio tends to 1 as delta shrinks, and stays below a
                   uniform constant for Lipschitz u.
  band_pathology   the band kernel against a unit step: every attained
                   difference quotient misses the band, so the value is
                   exactly zero for delta < 1/2 although the step is not
                   a Sobolev function.  Monotone kernels cannot do this.
  step_divergence  grid refinement at fixed delta on a unit step: the
                   near-jump pair sum scales like h^(1-p), so values
                   blow up with rate 2^(p-1) per doubling when p > 1 and
                   stay bounded when p = 1.

The resolution rule h <= delta_min / 8 keeps the kernel's transition
scale visible to the grid; sweeps refuse coarser grids.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ResolutionError
from .evaluator import FunctionalParams, lambda_pair, lambda_polar
from .functions import TestFunction, sobolev_energy, unit_step
from .kernels import Kernel, band_kernel, indicator_kernel, normalize

__all__ = [
    "SweepRow",
    "SweepReport",
    "GrowthRow",
    "GrowthReport",
    "delta_sweep",
    "band_pathology",
    "step_divergence",
    "write_sweep_csv",
    "write_growth_csv",
    "write_meta",
]

CSV_DIGITS = "%.17g"
INF_TOKEN = "inf-flag"


@dataclass(frozen=True)
class SweepRow:
    delta: float
    value: float
    tail_bound: float
    energy: float
    ratio: float | None       # value / energy, only when energy is finite and positive


@dataclass
class SweepReport:
    rows: list[SweepRow]
    metadata: dict = field(default_factory=dict)

    @property
    def empirical_bound_ratio(self) -> float | None:
        ratios = [r.ratio for r in self.rows if r.ratio is not None]
        return max(ratios) if ratios else None

    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    def ratios(self) -> list[float | None]:
        return [r.ratio for r in self.rows]


@dataclass(frozen=True)
class GrowthRow:
    n: int
    value: float
    ratio: float | None       # value relative to the previous (coarser) grid


@dataclass
class GrowthReport:
    rows: list[GrowthRow]
    metadata: dict = field(default_factory=dict)

    @property
    def final_ratio(self) -> float | None:
        return self.rows[-1].ratio if len(self.rows) > 1 else None

    @property
    def divergence_flag(self) -> bool:
        """Doubling growth beyond the midpoint discriminator 2^((p-1)/2)."""
        p = self.metadata.get("p", 2.0)
        fr = self.final_ratio
        return fr is not None and fr > 2.0 ** ((p - 1.0) / 2.0)


def _check_deltas(delta_list) -> list[float]:
    ds = [float(d) for d in delta_list]
    if not ds:
        raise ParameterError("empty delta list")
    if any(d <= 0 for d in ds):
        raise ParameterError("deltas must be positive")
    if any(d1 <= d2 for d1, d2 in zip(ds, ds[1:])):
        raise ParameterError("delta list must be strictly decreasing")
    return ds


def _max_spacing(f: TestFunction, grid_n: int) -> float:
    dom = f.domain
    return max((b - a) / grid_n for a, b in zip(dom.window_lo, dom.window_hi))


def _require_resolution(f: TestFunction, grid_n: int, delta_min: float):
    h = _max_spacing(f, grid_n)
    if h > delta_min / 8.0:
        width = max(b - a for a, b in zip(f.domain.window_lo, f.domain.window_hi))
        needed = math.ceil(8.0 * width / delta_min)
        raise ResolutionError(
            f"grid too coarse: h={h:.3g} > delta_min/8={delta_min / 8:.3g}; "
            f"need grid_n >= {needed}")


def delta_sweep(f: TestFunction, k: Kernel, p: float, delta_list, grid_n: int = 1024,
                scheme: str = "pair", diagonal_policy: str = "exclude-and-bound",
                threads: int = 1, allow_bounded_polar: bool = False,
                polar_settings: dict | None = None) -> SweepReport:
    """One row per delta: value, certificate, reference energy, ratio.

    Ratios are recorded descriptively whatever their size; acceptance
    thresholds live in the test suite, not here.
    """
    ds = _check_deltas(delta_list)
    _require_resolution(f, grid_n, min(ds))
    if scheme not in ("pair", "polar"):
        raise ParameterError(f"unknown scheme {scheme!r}")
    energy = sobolev_energy(f, p)
    rows = []
    for d in ds:
        kw = dict(p=p, delta=d, grid_n=grid_n, diagonal_policy=diagonal_policy,
                  threads=threads)
        if polar_settings:
            kw.update(polar_settings)
        params = FunctionalParams(**kw)
        if scheme == "pair":
            res = lambda_pair(f, k, params)
        else:
            res = lambda_polar(f, k, params, allow_bounded=allow_bounded_polar)
        ratio = res.value / energy if (math.isfinite(energy) and energy > 0) else None
        rows.append(SweepRow(d, res.value, res.tail_bound, energy, ratio))
    meta = {
        "experiment": "delta_sweep",
        "kernel": k.describe(),
        "function": f.describe(),
        "p": p,
        "grid_n": grid_n,
        "scheme": scheme,
        "certified": p > 1,
    }
    if p == 1:
        meta["note"] = "p = 1 exploration mode: values are not calibrated"
    return SweepReport(rows, meta)


def band_pathology(delta_list=(0.75, 0.49, 0.25, 0.1), grid_n: int = 1024,
                   threads: int = 1) -> SweepReport:
    """Unit step against the normalized band kernel on (-1, 2).

    The attained difference quotients are exactly 0 and 1/delta; for
    delta < 1/2 the band (1, 2) contains neither, so every summand is
    individually zero and the reported value is exact binary zero.  For
    delta in (1/2, 1) the value is strictly positive.
    """
    ds = sorted({float(d) for d in delta_list}, reverse=True)
    f = unit_step(-1.0, 2.0)
    k = normalize(band_kernel(1.0, 2.0), d=1, p=2.0)
    _require_resolution(f, grid_n, min(ds))
    rows = []
    for d in ds:
        params = FunctionalParams(p=2.0, delta=d, grid_n=grid_n,
                                  diagonal_policy="exclude-cell", threads=threads)
        res = lambda_pair(f, k, params)
        rows.append(SweepRow(d, res.value, res.tail_bound, math.inf, None))
    meta = {
        "experiment": "band_pathology",
        "kernel": k.describe(),
        "function": f.describe(),
        "p": 2.0,
        "grid_n": grid_n,
        "scheme": "pair",
        "note": "step function: energy infinite, ratio undefined",
    }
    return SweepReport(rows, meta)


def step_divergence(p: float, delta: float, n_list, threads: int = 1) -> GrowthReport:
    """Grid-refinement growth table for the unit step at fixed delta.

    Uses the indicator kernel, normalized when p > 1; at p = 1 the raw
    scale c = 1 is kept (successive ratios are scale-free anyway).
    """
    if not (0 < delta < 1):
        raise ParameterError("delta must lie in (0, 1)")
    ns = [int(n) for n in n_list]
    if any(n1 >= n2 for n1, n2 in zip(ns, ns[1:])) or not ns:
        raise ParameterError("n list must be strictly increasing and non-empty")
    f = unit_step(-1.0, 2.0)
    _require_resolution(f, min(ns), delta)
    k = normalize(indicator_kernel(), d=1, p=p) if p > 1 else indicator_kernel()
    rows = []
    prev = None
    for n in ns:
        params = FunctionalParams(p=p, delta=delta, grid_n=n,
                                  diagonal_policy="exclude-cell", threads=threads)
        value = lambda_pair(f, k, params).value
        rows.append(GrowthRow(n, value, None if prev is None else value / prev))
        prev = value
    meta = {
        "experiment": "step_divergence",
        "kernel": k.describe(),
        "function": f.describe(),
        "p": p,
        "delta": delta,
        "certified": p > 1,
    }
    if p == 1:
        meta["note"] = "p = 1 exploration mode: values are not calibrated"
    return GrowthReport(rows, meta)


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None or not math.isfinite(x):
        return INF_TOKEN
    return CSV_DIGITS % x


def write_sweep_csv(report: SweepReport, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta", "value", "tail_bound", "energy", "ratio"])
        for r in report.rows:
            w.writerow([_fmt(r.delta), _fmt(r.value), _fmt(r.tail_bound),
                        _fmt(r.energy), _fmt(r.ratio)])


def write_growth_csv(report: GrowthReport, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "value", "ratio"])
        for r in report.rows:
            w.writerow([str(r.n), _fmt(r.value), _fmt(r.ratio)])


def write_meta(metadata: dict, path):
    from . import __version__
    meta = dict(metadata)
    meta["versions"] = {
        "nlsobolev": __version__,
        "numpy": np.__version__,
    }
    try:
        import scipy
        meta["versions"]["scipy"] = scipy.__version__
    except ImportError:
        pass
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")
