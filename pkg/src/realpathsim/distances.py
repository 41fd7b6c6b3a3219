"""Catalog of path distance functions.

Two families:

* index distances on abstract path labels -- the step window distance
  (0 inside a window of half-width D, weight 1/2 exactly at D, infinite
  beyond) and its smooth cousin exp(|i-j|/D);
* geometric distances on Galilean polylines -- max separation, time-
  integrated L1/L2 separation, and a velocity-sensitive variant, each
  with optional mass weighting.

All distances return extended non-negative reals (np.inf allowed).  The
step distance is deliberately NOT a metric: it violates the triangle
inequality (0 + log2 + log2 < inf across a window boundary); the
geometric variants induced by norms are.

The step value at exactly |i-j| = D is log 2, so that the smearing weight
exp(-d) equals 1/2.  ``literal_log_half=True`` switches to log(1/2)
(negative distance, weight 2) for comparison runs only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

from .errors import EndpointMismatch, IncompatibleGrids
from .paths import SpacetimePath

INDEX_VARIANTS = ("step", "exp_index")
GALILEAN_VARIANTS = (
    "max_sep",
    "mass_max_sep",
    "l1_time_integral",
    "l1_time_average",
    "mass_l1",
    "l2",
    "velocity_l1",
)

LOG2 = math.log(2.0)

_ENDPOINT_ATOL = 1e-9


def step_distance(i: int, j: int, D: int, literal_log_half: bool = False) -> float:
    """Window step distance on indices: 0 below D, log 2 at D, inf beyond."""
    gap = abs(i - j)
    if gap < D:
        return 0.0
    if gap > D:
        return math.inf
    return -LOG2 if literal_log_half else LOG2


def exp_index_distance(i: int, j: int, D: int) -> float:
    """Smooth index distance exp(|i-j|/D)."""
    return math.exp(abs(i - j) / D)


def weight(d: float) -> float:
    """Smearing weight exp(-d); +inf maps to exactly 0."""
    if d == math.inf:
        return 0.0
    return math.exp(-d)


@dataclass(frozen=True)
class DistanceSpec:
    """Named, parameterized distance function on path pairs.

    ``D`` is required for the index variants; ``mass`` overrides the path
    mass for the mass-weighted geometric variants (defaults to the mass
    stored on the first path).
    """

    name: str
    D: int | None = None
    mass: float | None = None

    def __post_init__(self):
        if self.name not in INDEX_VARIANTS + GALILEAN_VARIANTS:
            raise ValueError(f"unknown distance name {self.name!r}")
        if self.name in INDEX_VARIANTS:
            if self.D is None or int(self.D) < 1:
                raise ValueError(f"{self.name} distance needs a positive integer D")
            object.__setattr__(self, "D", int(self.D))

    @property
    def is_index_based(self) -> bool:
        return self.name in INDEX_VARIANTS

    def index_distance(self, i: int, j: int, literal_log_half: bool = False) -> float:
        if self.name == "step":
            return step_distance(i, j, self.D, literal_log_half)
        if self.name == "exp_index":
            return exp_index_distance(i, j, self.D)
        raise ValueError(f"{self.name} is not an index distance")

    def to_json(self) -> str:
        out = {"name": self.name}
        if self.D is not None:
            out["D"] = self.D
        if self.mass is not None:
            out["mass"] = self.mass
        return json.dumps(out)

    @classmethod
    def from_json(cls, text: str) -> "DistanceSpec":
        data = json.loads(text)
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "DistanceSpec":
        name = data.get("name")
        if name not in INDEX_VARIANTS + GALILEAN_VARIANTS:
            raise ValueError(f"unknown distance name {name!r}")
        return cls(
            name=name,
            D=data.get("D"),
            mass=data.get("mass"),
        )


def _common_grid(P: SpacetimePath, Q: SpacetimePath) -> np.ndarray:
    """Union time grid of two paths that share a span, else raise."""
    t0p, t1p = P.time_span()
    t0q, t1q = Q.time_span()
    if min(t1p, t1q) <= max(t0p, t0q):
        raise IncompatibleGrids(
            f"time ranges [{t0p},{t1p}] and [{t0q},{t1q}] do not overlap"
        )
    if abs(t0p - t0q) > _ENDPOINT_ATOL or abs(t1p - t1q) > _ENDPOINT_ATOL:
        raise EndpointMismatch("paths span different time intervals")
    grid = np.union1d(P.times, Q.times)
    return grid


def _check_endpoints(P: SpacetimePath, Q: SpacetimePath):
    if P.positions.shape[1] != Q.positions.shape[1]:
        raise EndpointMismatch("paths live in different spatial dimensions")
    if (
        np.max(np.abs(P.events[0] - Q.events[0])) > _ENDPOINT_ATOL
        or np.max(np.abs(P.events[-1] - Q.events[-1])) > _ENDPOINT_ATOL
    ):
        raise EndpointMismatch("paths do not share endpoints A, B")


def galilean_distance(P: SpacetimePath, Q: SpacetimePath, spec: DistanceSpec) -> float:
    """Geometric distance between two Galilean polylines.

    Paths are resampled onto their union time grid by linear interpolation
    (they are piecewise linear already, so this loses nothing).  Integrals
    use the trapezoid rule on that grid; derivatives are forward
    differences per segment.
    """
    if spec.is_index_based:
        raise ValueError("index distances do not apply to spacetime paths")
    grid = _common_grid(P, Q)   # IncompatibleGrids before endpoint checks
    _check_endpoints(P, Q)
    xp = P.position_at(grid)
    xq = Q.position_at(grid)
    gap = np.linalg.norm(xp - xq, axis=1)
    m = spec.mass if spec.mass is not None else P.mass

    name = spec.name
    if name == "max_sep":
        return float(np.max(gap))
    if name == "mass_max_sep":
        return float(m * np.max(gap))
    if name == "l1_time_integral":
        return float(_trapezoid(gap, grid))
    if name == "l1_time_average":
        T = grid[-1] - grid[0]
        return float(_trapezoid(gap, grid) / T)
    if name == "mass_l1":
        return float(m * _trapezoid(gap, grid))
    if name == "l2":
        return float(math.sqrt(_trapezoid(gap**2, grid)))
    if name == "velocity_l1":
        dt = np.diff(grid)
        vp = np.diff(xp, axis=0) / dt[:, None]
        vq = np.diff(xq, axis=0) / dt[:, None]
        dv = np.linalg.norm(vp - vq, axis=1)
        return float(np.sum(dv * dt))
    raise ValueError(f"unhandled variant {name!r}")


def index_distance_matrix(
    spec: DistanceSpec, n: int, literal_log_half: bool = False
) -> np.ndarray:
    """Dense (n, n) matrix of an index distance over labels 1..n."""
    gaps = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    if spec.name == "step":
        at = -LOG2 if literal_log_half else LOG2
        d = np.where(gaps < spec.D, 0.0, np.where(gaps > spec.D, np.inf, at))
        return d
    if spec.name == "exp_index":
        return np.exp(gaps / spec.D)
    raise ValueError(f"{spec.name} is not an index distance")


def grid_distance_matrix(
    positions: np.ndarray,
    times: np.ndarray,
    spec: DistanceSpec,
    mass: float = 1.0,
    chunk: int = 256,
) -> np.ndarray:
    """Pairwise geometric distances for scalar paths on one shared grid.

    ``positions`` is (n_paths, n_times) of 1-d coordinates; rows are
    resampled paths.  Matches galilean_distance on every pair but runs
    vectorized, which is what the lattice experiments need.
    """
    if spec.is_index_based:
        raise ValueError("index distances do not apply to gridded paths")
    X = np.asarray(positions, dtype=float)
    t = np.asarray(times, dtype=float)
    n = X.shape[0]
    m = spec.mass if spec.mass is not None else mass

    # trapezoid weights for the shared grid
    w = np.zeros_like(t)
    dt = np.diff(t)
    w[:-1] += dt / 2.0
    w[1:] += dt / 2.0
    T = t[-1] - t[0]

    out = np.empty((n, n), dtype=float)
    name = spec.name

    if name == "l2":
        q = X**2 @ w
        G = (X * w) @ X.T
        d2 = np.maximum(q[:, None] + q[None, :] - 2.0 * G, 0.0)
        return np.sqrt(d2)

    if name == "velocity_l1":
        V = np.diff(X, axis=1) / dt
        base, seg_w = V, dt
        reduce = "l1"
    elif name in ("l1_time_integral", "l1_time_average", "mass_l1"):
        base, seg_w = X, w
        reduce = "l1"
    elif name in ("max_sep", "mass_max_sep"):
        base, seg_w = X, None
        reduce = "max"
    else:
        raise ValueError(f"unhandled variant {name!r}")

    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        diff = np.abs(base[lo:hi, None, :] - base[None, :, :])
        if reduce == "max":
            out[lo:hi] = diff.max(axis=2)
        else:
            out[lo:hi] = diff @ seg_w

    if name == "l1_time_average":
        out /= T
    if name in ("mass_max_sep", "mass_l1"):
        out *= m
    return out
