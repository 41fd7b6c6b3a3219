"""Exhaustive 1+1D lattice free-particle path integral.

Sites are integers -X..X, time steps are unit (dt = 1), and a path moves
at most ``hop`` sites per step.  Every admissible site sequence from the
start site (t=0) to the end site (t=T) is enumerated depth-first, with
amplitude exp(-i S) for the discrete free action S = sum m (dx)^2 / 2.
A transfer-matrix pass computes the total amplitude independently of the
enumeration, which is the correctness oracle for both.

Enumerated ensembles feed the probability engine with any geometric
distance; weight functions carve experiments out of the ensemble:
``curvature_cutoff`` suppresses rapidly-varying paths (second difference
above a threshold), ``corridor`` keeps only paths that stay on one side
of a two-arm interferometer (all interior sites >= margin or all
<= -margin).  A phase plate in the upper arm supplies the constructive /
destructive settings interference visibility is measured between.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceSpec, grid_distance_matrix
from .engine import (
    PathDistribution,
    WeightFunction,
    path_probabilities,
    unnormalized_probabilities,
)
from .errors import NoPaths, SpecViolation, TooManyPaths
from .paths import PathEnsemble, SpacetimePath

ENUMERATION_BOUND = 10**7


@dataclass(frozen=True)
class LatticeSpec:
    """T unit time steps on sites -extent..extent, start to end, hop bound."""

    steps: int
    extent: int
    start: int
    end: int
    mass: float = 1.0
    hop: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise SpecViolation("need at least one time step")
        if self.extent < 0 or self.hop < 1:
            raise SpecViolation("extent must be >= 0 and hop >= 1")
        if abs(self.start) > self.extent or abs(self.end) > self.extent:
            raise SpecViolation("start and end must lie within the extent")
        if abs(self.end - self.start) > self.hop * self.steps:
            raise NoPaths(
                f"|end-start|={abs(self.end - self.start)} unreachable in "
                f"{self.steps} steps of hop {self.hop}"
            )
        if (2 * self.hop + 1) ** max(self.steps - 1, 0) > ENUMERATION_BOUND:
            raise TooManyPaths(
                f"(2h+1)^(T-1) exceeds the enumeration bound {ENUMERATION_BOUND}"
            )


def enumerate_paths(spec: LatticeSpec) -> np.ndarray:
    """All site sequences as an (n_paths, T+1) int array, DFS order.

    Pruned on reachability (|end - x| <= hop * steps_left) so only
    completable prefixes are walked.
    """
    T, X, h = spec.steps, spec.extent, spec.hop
    out: list[tuple[int, ...]] = []
    prefix = [spec.start]

    def walk(x: int, k: int):
        if k == T:
            out.append(tuple(prefix))
            return
        remaining = T - k - 1
        for step in range(-h, h + 1):
            nxt = x + step
            if abs(nxt) > X:
                continue
            if abs(spec.end - nxt) > h * remaining:
                continue
            prefix.append(nxt)
            walk(nxt, k + 1)
            prefix.pop()

    walk(spec.start, 0)
    if not out:
        raise NoPaths("no admissible path (extent too tight)")
    return np.asarray(out, dtype=int)


def path_actions(sites: np.ndarray, mass: float) -> np.ndarray:
    """Discrete free action per path row, dt = 1."""
    return 0.5 * mass * np.sum(np.diff(sites, axis=1) ** 2, axis=1)


def lattice_ensemble(
    spec: LatticeSpec, sites: np.ndarray | None = None, extra_phase: np.ndarray | None = None
) -> tuple[PathEnsemble, np.ndarray]:
    """(ensemble, sites) with amplitudes exp(-i S) (optionally shifted)."""
    if sites is None:
        sites = enumerate_paths(spec)
    phases = path_actions(sites, spec.mass)
    if extra_phase is not None:
        phases = phases + extra_phase
    return PathEnsemble(np.exp(-1j * phases)), sites


def site_path(spec: LatticeSpec, sites_row: np.ndarray) -> SpacetimePath:
    """One enumerated row as a SpacetimePath (unit time grid)."""
    t = np.arange(sites_row.size, dtype=float)
    return SpacetimePath(np.column_stack([sites_row.astype(float), t]), mass=spec.mass)


def transfer_amplitude(spec: LatticeSpec) -> complex:
    """Total amplitude sum_paths exp(-i S) by stepwise matrix application.

    Dynamic programming over site occupation; needs no enumeration bound.
    m = 0 returns the path count as a real number.
    """
    X, h, m = spec.extent, spec.hop, spec.mass
    n_sites = 2 * X + 1
    if abs(spec.start) > X or abs(spec.end) > X:
        raise NoPaths("endpoint outside the lattice")
    if abs(spec.end - spec.start) > spec.hop * spec.steps:
        raise NoPaths("endpoints unreachable")
    offsets = np.arange(-h, h + 1)
    kernel = np.exp(-0.5j * m * offsets.astype(float) ** 2)
    psi = np.zeros(n_sites, dtype=np.complex128)
    psi[spec.start + X] = 1.0
    for _ in range(spec.steps):
        nxt = np.zeros_like(psi)
        for off, amp in zip(offsets, kernel):
            lo_src = max(0, -off)
            hi_src = min(n_sites, n_sites - off)
            if lo_src < hi_src:
                nxt[lo_src + off : hi_src + off] += amp * psi[lo_src:hi_src]
        psi = nxt
    return complex(psi[spec.end + X])


# -- weight functions on site paths -------------------------------------------

def curvature_cutoff_weights(sites: np.ndarray, threshold: float = 1.0) -> np.ndarray:
    """0/1 weights zeroing paths with any |dx_{k+1} - dx_k| > threshold."""
    second = np.abs(np.diff(sites, n=2, axis=1))
    if second.shape[1] == 0:
        return np.ones(sites.shape[0])
    return (second.max(axis=1) <= threshold).astype(float)


def corridor_weights(sites: np.ndarray, margin: int = 1) -> np.ndarray:
    """0/1 weights keeping two-arm paths only.

    A path is realizable when every interior site is >= margin (upper
    arm) or every interior site is <= -margin (lower arm); endpoints are
    shared and exempt.
    """
    interior = sites[:, 1:-1]
    if interior.shape[1] == 0:
        return np.ones(sites.shape[0])
    upper = (interior >= margin).all(axis=1)
    lower = (interior <= -margin).all(axis=1)
    return (upper | lower).astype(float)


def upper_arm_mask(sites: np.ndarray, margin: int = 1) -> np.ndarray:
    """Paths tagged by a phase plate in the upper arm at the middle step."""
    mid = sites.shape[1] // 2
    return sites[:, mid] >= margin


def resolve_weight(
    wf: WeightFunction | None, sites: np.ndarray
) -> np.ndarray | None:
    """Per-path weight vector for a named lattice weight function."""
    if wf is None or (isinstance(wf, WeightFunction) and wf.name == "uniform"):
        return None
    if not isinstance(wf, WeightFunction):
        return np.asarray(wf, dtype=float)
    if wf.name == "curvature_cutoff":
        return curvature_cutoff_weights(sites, float(wf.params.get("threshold", 1.0)))
    if wf.name == "corridor":
        return corridor_weights(sites, int(wf.params.get("margin", 1)))
    raise SpecViolation(f"weight {wf.name!r} does not apply to lattice paths")


def run_lattice_experiment(
    spec: LatticeSpec,
    distance: DistanceSpec,
    weight: WeightFunction | np.ndarray | None = None,
    distance_scale: float = 1.0,
    arm_phase: float = 0.0,
    phase_margin: int = 1,
) -> tuple[PathDistribution, np.ndarray]:
    """Path probabilities over the enumerated ensemble.

    ``distance_scale`` multiplies every pairwise distance (0 is the
    quantum limit); ``arm_phase`` is the upper-arm phase plate setting.
    Returns (distribution, sites).
    """
    sites = enumerate_paths(spec)
    extra = None
    if arm_phase != 0.0:
        extra = arm_phase * upper_arm_mask(sites, phase_margin).astype(float)
    ensemble, _ = lattice_ensemble(spec, sites, extra)
    dmat = grid_distance_matrix(
        sites.astype(float), np.arange(spec.steps + 1, dtype=float), distance,
        mass=spec.mass,
    )
    if distance_scale != 1.0:
        dmat = dmat * distance_scale
    w = resolve_weight(weight, sites)
    return path_probabilities(ensemble, dmat, weights=w), sites


def two_arm_visibility(
    spec: LatticeSpec,
    distance: DistanceSpec,
    distance_scale: float = 1.0,
    margin: int = 1,
) -> float:
    """Interference visibility |P+ - P-| / (P+ + P-) of the two-arm setup.

    P+/- are the unnormalized realizable-path masses at phase plate 0
    (constructive) and pi (destructive); the normalization constant is
    setting-dependent, so raw masses are the comparable quantity.
    """
    sites = enumerate_paths(spec)
    dmat = grid_distance_matrix(
        sites.astype(float), np.arange(spec.steps + 1, dtype=float), distance,
        mass=spec.mass,
    )
    if distance_scale != 1.0:
        dmat = dmat * distance_scale
    w = corridor_weights(sites, margin)
    mask = upper_arm_mask(sites, margin).astype(float)
    masses = []
    for phase in (0.0, np.pi):
        ensemble, _ = lattice_ensemble(spec, sites, phase * mask)
        unnorm, _, _ = unnormalized_probabilities(ensemble, dmat, weights=w)
        masses.append(float(np.sum(unnorm)))
    p_plus, p_minus = masses
    if p_plus + p_minus == 0.0:
        return 0.0
    return abs(p_plus - p_minus) / (p_plus + p_minus)
