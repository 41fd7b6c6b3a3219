"""The path probability engine.

For an ensemble of N paths with unit amplitudes A_j and a distance d on
path pairs, each path gets the unnormalized probability

    w(P_i) * | sum_j A_j exp(-d(P_i, P_j)) |^2  /  sum_j exp(-d(P_i, P_j)),

i.e. the squared distance-smeared amplitude divided by the smearing
volume, optionally suppressed by a non-negative weight w.  The smearing
sum runs over the whole ensemble including Q = P itself.  Normalizing
over the ensemble gives the conditioned per-path distribution; summing
per endpoint group and normalizing across groups gives the unconditioned
final-state probabilities.

Two evaluation routes produce identical values:

* a dense O(N^2) route for arbitrary distance matrices or callables;
* a banded O(N·D)-memory-free route for the step distance, using prefix
  sums over the closed and open windows (the weight at exactly D is 1/2,
  so the smeared value is the mean of the two window sums).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distances import DistanceSpec, index_distance_matrix
from .errors import AllZeroProbability, EmptyEnsemble
from .paths import PathEnsemble

_SUM_ATOL = 1e-9

WEIGHT_NAMES = ("uniform", "causal_only", "curvature_cutoff", "corridor")


@dataclass(frozen=True)
class WeightFunction:
    """Named non-negative per-path weight (prefactor of the postulate).

    ``uniform`` is the plain postulate.  ``causal_only`` (Minkowski
    ensembles) and ``curvature_cutoff`` / ``corridor`` (lattice ensembles)
    are resolved into per-path weight vectors by their model modules.
    """

    name: str = "uniform"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in WEIGHT_NAMES:
            raise ValueError(f"unknown weight function {self.name!r}")

    @classmethod
    def from_dict(cls, data: dict | None) -> "WeightFunction":
        if not data:
            return cls()
        params = {k: v for k, v in data.items() if k != "name"}
        return cls(name=data.get("name", "uniform"), params=params)


@dataclass(frozen=True)
class PathDistribution:
    """Normalized per-path probabilities plus the diagnostics behind them.

    probs[i] = norm_constant * weights[i] * |smeared[i]|^2 / denom[i]
    """

    probs: np.ndarray
    norm_constant: float
    smeared: np.ndarray
    denom: np.ndarray

    def __post_init__(self):
        if np.any(self.probs < 0):
            raise ValueError("negative probability")
        total = float(np.sum(self.probs))
        if abs(total - 1.0) > _SUM_ATOL:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @property
    def n_paths(self) -> int:
        return int(self.probs.size)


def _resolve_weights(weights, n: int) -> np.ndarray | None:
    if weights is None:
        return None
    if isinstance(weights, WeightFunction):
        if weights.name == "uniform":
            return None
        raise ValueError(
            f"weight function {weights.name!r} must be resolved to a per-path "
            "vector by its model module before reaching the engine"
        )
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},), got {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    return w


def _distance_rows(distance, n: int, lo: int, hi: int) -> np.ndarray:
    """Rows [lo, hi) of the distance matrix, whatever form d came in."""
    if isinstance(distance, np.ndarray):
        return distance[lo:hi]
    rows = np.empty((hi - lo, n), dtype=float)
    for r, i in enumerate(range(lo, hi)):
        for j in range(n):
            rows[r, j] = distance(i + 1, j + 1)
    return rows


def smeared_components(
    ensemble: PathEnsemble,
    distance,
    literal_log_half: bool = False,
    chunk: int = 512,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-path smeared amplitude and smearing volume (denominator).

    ``distance`` may be a DistanceSpec (step gets the banded route), a
    dense (N, N) matrix with np.inf allowed, or a callable d(i, j) on
    1-based indices.
    """
    amps = ensemble.amplitudes
    n = amps.size

    if isinstance(distance, DistanceSpec) and distance.name == "step":
        return _step_smeared(amps, distance.D, literal_log_half)
    if isinstance(distance, DistanceSpec):
        distance = index_distance_matrix(distance, n, literal_log_half)

    smeared = np.empty(n, dtype=np.complex128)
    denom = np.empty(n, dtype=float)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        E = np.exp(-_distance_rows(distance, n, lo, hi))
        smeared[lo:hi] = E @ amps
        denom[lo:hi] = E.sum(axis=1)
    return smeared, denom


def _window_sums(values: np.ndarray, radius: int) -> np.ndarray:
    """sums[i] = sum of values[j] over |j-i| <= radius (0-based, clipped)."""
    n = values.size
    prefix = np.concatenate([[0], np.cumsum(values)])
    idx = np.arange(n)
    lo = np.maximum(idx - radius, 0)
    hi = np.minimum(idx + radius, n - 1)
    return prefix[hi + 1] - prefix[lo]


def _step_smeared(
    amps: np.ndarray, D: int, literal_log_half: bool
) -> tuple[np.ndarray, np.ndarray]:
    ones = np.ones(amps.size)
    s_closed = _window_sums(amps, D)       # |j-i| <= D
    s_open = _window_sums(amps, D - 1)     # |j-i| <  D
    n_closed = _window_sums(ones, D)
    n_open = _window_sums(ones, D - 1)
    if literal_log_half:
        # weight 2 at exactly D: open + 2*(closed - open)
        return 2.0 * s_closed - s_open, 2.0 * n_closed - n_open
    return 0.5 * (s_closed + s_open), 0.5 * (n_closed + n_open)


def unnormalized_probabilities(
    ensemble: PathEnsemble,
    distance,
    weights=None,
    literal_log_half: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(unnormalized probs, smeared, denom) without the constant C."""
    smeared, denom = smeared_components(ensemble, distance, literal_log_half)
    w = _resolve_weights(weights, ensemble.n_paths)
    with np.errstate(invalid="ignore", divide="ignore"):
        unnorm = np.where(denom > 0, np.abs(smeared) ** 2 / denom, 0.0)
    if w is not None:
        unnorm = w * unnorm
    return unnorm, smeared, denom


def path_probabilities(
    ensemble: PathEnsemble,
    distance,
    weights=None,
    literal_log_half: bool = False,
) -> PathDistribution:
    """Conditioned per-path distribution for one ensemble (endpoints fixed).

    Raises AllZeroProbability when every weighted smeared amplitude
    vanishes, since the postulate then defines no distribution.
    """
    if ensemble.n_paths == 0:
        raise EmptyEnsemble("empty ensemble")
    unnorm, smeared, denom = unnormalized_probabilities(
        ensemble, distance, weights, literal_log_half
    )
    total = float(np.sum(unnorm))
    if total <= 0.0:
        raise AllZeroProbability("all paths have zero probability weight")
    C = 1.0 / total
    return PathDistribution(
        probs=unnorm * C, norm_constant=C, smeared=smeared, denom=denom
    )


def union_ensemble(ensembles: Sequence[PathEnsemble]) -> PathEnsemble:
    """Concatenate endpoint groups into one indexed ensemble."""
    amps = np.concatenate([e.amplitudes for e in ensembles])
    return PathEnsemble(amps, endpoint_tag="|".join(e.endpoint_tag for e in ensembles))


def final_state_probabilities(
    ensembles: Sequence[PathEnsemble],
    distance,
    weights=None,
    literal_log_half: bool = False,
) -> tuple[dict[str, float], PathDistribution]:
    """Unconditioned endpoint probabilities Prob(B_j | A).

    The ensembles are concatenated (the distance must be defined across
    the union index space; paths to different endpoints are typically
    infinitely distant), per-path unnormalized probabilities are summed
    within each endpoint group, and the group totals are normalized over
    the discrete final-state basis.  Returns the per-endpoint map and the
    per-path distribution over the union.
    """
    if not ensembles:
        raise EmptyEnsemble("no endpoint groups")
    union = union_ensemble(ensembles)
    unnorm, smeared, denom = unnormalized_probabilities(
        union, distance, weights, literal_log_half
    )
    total = float(np.sum(unnorm))
    if total <= 0.0:
        raise AllZeroProbability("all endpoint groups have zero weight")
    C = 1.0 / total
    dist = PathDistribution(
        probs=unnorm * C, norm_constant=C, smeared=smeared, denom=denom
    )
    by_endpoint: dict[str, float] = {}
    offset = 0
    for e in ensembles:
        block = slice(offset, offset + e.n_paths)
        by_endpoint[e.endpoint_tag] = by_endpoint.get(e.endpoint_tag, 0.0) + float(
            np.sum(dist.probs[block])
        )
        offset += e.n_paths
    return by_endpoint, dist


def block_distance_matrix(
    sizes: Sequence[int],
    within: Sequence,
    across: float = math.inf,
    literal_log_half: bool = False,
) -> np.ndarray:
    """Union distance matrix from per-group distances plus a cross value.

    ``within[g]`` is the distance for group g (DistanceSpec, matrix, or
    callable); pairs in different groups get the constant ``across``
    (default: infinitely distant, the disjoint-endpoint-families case).
    """
    n = int(sum(sizes))
    out = np.full((n, n), float(across))
    offset = 0
    for size, dist in zip(sizes, within):
        block = slice(offset, offset + size)
        if isinstance(dist, DistanceSpec):
            out[block, block] = index_distance_matrix(dist, size, literal_log_half)
        elif isinstance(dist, np.ndarray):
            out[block, block] = dist
        else:
            sub = np.empty((size, size))
            for i in range(size):
                for j in range(size):
                    sub[i, j] = dist(i + 1, j + 1)
            out[block, block] = sub
        offset += size
    return out
