"""Grid-then-simplex minimization, photon-number sweeps and scaling fits.

The objectives have narrow valleys and singular ridges, so every search
starts with a tensor grid over the free parameters and then polishes the
best few cells with bounded Nelder-Mead.  Objectives signal infeasible or
blind points by returning ``inf`` or raising a :class:`GaussIntError`.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import AllInfeasible, GaussIntError, InsufficientPoints


def default_workers() -> int:
    """Concurrency cap from ``GI_THREADS``, else the number of CPUs."""
    env = os.environ.get("GI_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"GI_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SearchBox:
    """Closed intervals for the free parameters plus fixed values for the rest.

    Names in ``log`` are searched uniformly in ``log10``.  A name in
    ``stretch`` maps to ``(center, scale)`` and is searched uniformly in
    ``asinh((value - center) / scale)``, which resolves features of width
    ``~scale`` at ``center`` without losing the rest of the interval.
    """

    bounds: Mapping[str, tuple[float, float]]
    frozen: Mapping[str, float] = field(default_factory=dict)
    log: frozenset = frozenset()
    stretch: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        bounds = {k: (float(lo), float(hi)) for k, (lo, hi) in self.bounds.items() if k not in self.frozen}
        for k, (lo, hi) in bounds.items():
            if not lo <= hi:
                raise ValueError(f"empty interval for {k}: [{lo}, {hi}]")
        log = frozenset(self.log) & bounds.keys()
        for k in log:
            if bounds[k][0] <= 0:
                raise ValueError(f"log-scaled {k} needs a positive lower bound")
        stretch = {k: (float(c), float(w)) for k, (c, w) in self.stretch.items() if k in bounds}
        if log & stretch.keys():
            raise ValueError("a dimension cannot be both log-scaled and stretched")
        if any(w <= 0 for _, w in stretch.values()):
            raise ValueError("stretch scales must be positive")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "frozen", {k: float(v) for k, v in self.frozen.items()})
        object.__setattr__(self, "log", log)
        object.__setattr__(self, "stretch", stretch)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.bounds)

    def freeze(self, **values: float) -> "SearchBox":
        return SearchBox(self.bounds, {**self.frozen, **values}, self.log, self.stretch)

    def _fwd(self, k, v):
        if k in self.log:
            return float(np.log10(v))
        if k in self.stretch:
            c, w = self.stretch[k]
            return float(np.arcsinh((v - c) / w))
        return float(v)

    def _inv(self, k, x):
        if k in self.log:
            return 10.0 ** x
        if k in self.stretch:
            c, w = self.stretch[k]
            return c + w * np.sinh(x)
        return float(x)

    def internal_bounds(self) -> list[tuple[float, float]]:
        return [(self._fwd(k, lo), self._fwd(k, hi)) for k, (lo, hi) in self.bounds.items()]

    def to_internal(self, params: Mapping[str, float]) -> np.ndarray:
        return np.array([self._fwd(k, params[k]) for k in self.names], dtype=float)

    def to_params(self, x: Sequence[float]) -> dict[str, float]:
        out = dict(self.frozen)
        for (k, (lo, hi)), v in zip(self.bounds.items(), x):
            out[k] = float(min(max(self._inv(k, v), lo), hi))
        return out

    def contains(self, params: Mapping[str, float]) -> bool:
        return all(lo <= params[k] <= hi for k, (lo, hi) in self.bounds.items())


@dataclass(frozen=True)
class OptimizerSettings:
    grid_points: int = 17
    n_starts: int = 3
    xatol: float = 1e-9
    maxfev: int = 2000
    seed: int = 0
    workers: int = 1

    def as_dict(self) -> dict:
        return {"grid_points": self.grid_points, "n_starts": self.n_starts, "xatol": self.xatol,
                "maxfev": self.maxfev, "seed": self.seed}


@dataclass(frozen=True)
class OptimizeResult:
    params: dict
    value: float
    grid_value: float
    n_evals: int


def _safe(objective: Callable[[dict], float]) -> Callable[[dict], float]:
    def wrapped(params):
        try:
            v = float(objective(params))
        except (GaussIntError, ArithmeticError):
            return math.inf
        return v if math.isfinite(v) else math.inf
    return wrapped


def _grid(box: SearchBox, n: int) -> list[np.ndarray]:
    axes = [np.linspace(lo, hi, n) if hi > lo else np.array([lo]) for lo, hi in box.internal_bounds()]
    return [np.array(p) for p in itertools.product(*axes)]


def _map(fn, items, workers):
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def minimize(objective: Callable[[dict], float], box: SearchBox,
             settings: OptimizerSettings | None = None,
             starts: Iterable[Mapping[str, float]] = ()) -> OptimizeResult:
    """Minimize ``objective(params)`` over ``box``.

    A tensor grid with ``settings.grid_points`` per free dimension is scanned
    first.  Nelder-Mead then runs from the best ``n_starts`` grid points and
    from every entry of ``starts`` (e.g. a previous optimum); it stops when
    the simplex is smaller than ``xatol`` or after ``maxfev`` evaluations.
    """
    settings = settings or OptimizerSettings()
    f = _safe(objective)
    if not box.names:
        params = box.to_params([])
        value = f(params)
        if value == math.inf:
            raise AllInfeasible(f"objective infinite at {params}")
        return OptimizeResult(params, value, value, 1)

    points = _grid(box, settings.grid_points)
    values = _map(lambda x: f(box.to_params(x)), points, settings.workers)
    order = np.argsort(values, kind="stable")
    best_grid = values[order[0]]
    if best_grid == math.inf:
        raise AllInfeasible(f"all {len(points)} grid points infeasible")
    n_evals = len(points)

    lo, hi = np.array(box.internal_bounds()).T
    span = hi - lo
    step = np.where(span > 0, span / max(settings.grid_points - 1, 1), 0.0)
    x0s = [points[i] for i in order[:settings.n_starts] if values[i] < math.inf]
    x0s += [np.clip(box.to_internal(s), lo, hi) for s in starts]

    best_x, best_v = points[order[0]], best_grid
    for x0 in x0s:
        simplex = [x0]
        for i in range(len(x0)):
            v = x0.copy()
            v[i] += step[i] if x0[i] + step[i] <= hi[i] else -step[i]
            simplex.append(v)
        res = _scipy_minimize(lambda x: f(box.to_params(x)), x0, method="Nelder-Mead",
                              bounds=list(zip(lo, hi)),
                              options={"xatol": settings.xatol, "fatol": math.inf,
                                       "maxfev": settings.maxfev, "initial_simplex": np.array(simplex)})
        n_evals += res.nfev
        if res.fun < best_v:
            best_x, best_v = res.x, float(res.fun)
    return OptimizeResult(box.to_params(best_x), best_v, best_grid, n_evals)


# --- sweeps -------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    n_tot: float
    value: float
    params: dict
    error: str | None = None

    def as_dict(self) -> dict:
        return {"n_tot": self.n_tot, "value": self.value, "params": dict(self.params), "error": self.error}


@dataclass(frozen=True)
class SweepResult:
    points: tuple
    meta: dict

    @property
    def n_tot(self) -> np.ndarray:
        return np.array([p.n_tot for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    def param(self, name: str) -> np.ndarray:
        return np.array([p.params.get(name, np.nan) for p in self.points])

    def as_dict(self) -> dict:
        return {"meta": self.meta, "points": [p.as_dict() for p in self.points]}

    @classmethod
    def from_dict(cls, data: dict) -> "SweepResult":
        pts = tuple(SweepPoint(p["n_tot"], p["value"], dict(p["params"]), p.get("error"))
                    for p in data["points"])
        return cls(pts, dict(data["meta"]))


def sweep(family: Callable[[float], Callable[[dict], float]], n_grid: Sequence[float],
          box: Union[SearchBox, Callable[[float], SearchBox]],
          settings: OptimizerSettings | None = None, warm_start: bool = True,
          maximize: bool = False, meta: Mapping | None = None) -> SweepResult:
    """Optimize ``family(n)`` at every ``n`` in ``n_grid``.

    With ``maximize`` the stored value is the maximum of the objective.
    Failures are recorded per point as ``value = nan`` with a message.
    """
    settings = settings or OptimizerSettings()
    n_grid = [float(n) for n in n_grid]
    if any(n <= 0 for n in n_grid) or n_grid != sorted(n_grid):
        raise ValueError("n_grid must be sorted and positive")
    points, prev = [], None
    for n in n_grid:
        b = box(n) if callable(box) else box
        obj = family(n)
        fn = (lambda p, obj=obj: -obj(p)) if maximize else obj
        starts = [prev] if warm_start and prev is not None and b.contains(prev) else []
        try:
            res = minimize(fn, b, settings, starts)
        except GaussIntError as exc:
            points.append(SweepPoint(n, math.nan, {}, f"{type(exc).__name__}: {exc}"))
            continue
        prev = res.params
        points.append(SweepPoint(n, -res.value if maximize else res.value, res.params))
    info = {"settings": settings.as_dict(), "warm_start": warm_start, "maximize": maximize}
    info.update(meta or {})
    return SweepResult(tuple(points), info)


def scaling_exponent(result: SweepResult, window: tuple[float, float] | None = None) -> float:
    """``eps`` of the least-squares fit ``S ~ N^{-eps}`` over the points in ``window``."""
    n, v = result.n_tot, result.values
    keep = np.isfinite(v) & (v > 0)
    if window is not None:
        keep &= (n >= window[0]) & (n <= window[1])
    if keep.sum() < 5:
        raise InsufficientPoints(f"{int(keep.sum())} usable points in window {window}, need 5")
    slope = np.polyfit(np.log(n[keep]), np.log(v[keep]), 1)[0]
    return float(-slope)


def ratio_to_heisenberg(result: SweepResult) -> np.ndarray:
    """``R = S N``, the sensitivity in units of ``1/N``."""
    return result.values * result.n_tot
