"""Lattice path integral: enumeration, transfer matrix, decoherence."""

import numpy as np
import pytest

from realpathsim.distances import DistanceSpec, galilean_distance
from realpathsim.engine import WeightFunction, path_probabilities
from realpathsim.errors import NoPaths, SpecViolation, TooManyPaths
from realpathsim.lattice import (
    LatticeSpec,
    corridor_weights,
    enumerate_paths,
    lattice_ensemble,
    run_lattice_experiment,
    site_path,
    transfer_amplitude,
    two_arm_visibility,
)


def test_single_step_single_path():
    spec = LatticeSpec(steps=1, extent=3, start=0, end=2, hop=2)
    sites = enumerate_paths(spec)
    assert sites.shape == (1, 2)
    assert list(sites[0]) == [0, 2]
    # amplitude exp(-i m (b-a)^2 / 2)
    ens, _ = lattice_ensemble(spec, sites)
    assert ens.amplitudes[0] == pytest.approx(np.exp(-1j * 1.0 * 4 / 2))
    assert transfer_amplitude(spec) == pytest.approx(ens.amplitudes[0])


def test_two_step_three_paths():
    spec = LatticeSpec(steps=2, extent=1, start=0, end=0, hop=1)
    sites = enumerate_paths(spec)
    assert sites.shape[0] == 3
    assert sorted(s[1] for s in sites) == [-1, 0, 1]


def test_nineteen_paths_and_count_oracle():
    spec = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1)
    assert enumerate_paths(spec).shape[0] == 19
    counting = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1, mass=0.0)
    assert transfer_amplitude(counting) == pytest.approx(19.0)


def test_transfer_matches_enumeration():
    for spec in (
        LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1, mass=1.0),
        LatticeSpec(steps=5, extent=3, start=-1, end=2, hop=2, mass=0.7),
        LatticeSpec(steps=6, extent=2, start=0, end=0, hop=1, mass=2.3),
    ):
        ens, _ = lattice_ensemble(spec)
        total = complex(np.sum(ens.amplitudes))
        assert abs(total - transfer_amplitude(spec)) < 1e-10


def test_extent_constrains_enumeration():
    wide = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1)
    tight = LatticeSpec(steps=4, extent=1, start=0, end=0, hop=1)
    assert enumerate_paths(tight).shape[0] < enumerate_paths(wide).shape[0]
    assert (np.abs(enumerate_paths(tight)) <= 1).all()
    # the transfer matrix honors the same wall
    count = LatticeSpec(steps=4, extent=1, start=0, end=0, hop=1, mass=0.0)
    assert transfer_amplitude(count) == pytest.approx(enumerate_paths(tight).shape[0])


def test_no_paths_and_bounds():
    with pytest.raises(NoPaths):
        LatticeSpec(steps=2, extent=9, start=0, end=8, hop=1)
    with pytest.raises(TooManyPaths):
        LatticeSpec(steps=20, extent=30, start=0, end=0, hop=3)
    with pytest.raises(SpecViolation):
        LatticeSpec(steps=0, extent=1, start=0, end=0)
    with pytest.raises(SpecViolation):
        LatticeSpec(steps=2, extent=1, start=0, end=2, hop=2)


def test_zero_scale_distance_gives_uniform():
    spec = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1)
    dist, _ = run_lattice_experiment(spec, DistanceSpec("max_sep"), distance_scale=0.0)
    assert np.allclose(dist.probs, 1.0 / 19.0, atol=1e-12)


def test_site_paths_match_grid_distances():
    spec = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1, mass=1.5)
    sites = enumerate_paths(spec)
    a, b = site_path(spec, sites[0]), site_path(spec, sites[7])
    from realpathsim.distances import grid_distance_matrix

    for name in ("max_sep", "l1_time_integral", "l2", "velocity_l1", "mass_l1"):
        dspec = DistanceSpec(name)
        mat = grid_distance_matrix(
            sites.astype(float), np.arange(5, dtype=float), dspec, mass=spec.mass
        )
        assert mat[0, 7] == pytest.approx(galilean_distance(a, b, dspec), abs=1e-12)


def test_velocity_distance_suppresses_zigzags():
    spec = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1, mass=10.0)
    dist, sites = run_lattice_experiment(spec, DistanceSpec("velocity_l1"))
    zig = np.abs(np.diff(sites, n=2, axis=1)).sum(axis=1)
    straight = int(np.argmin(zig))      # the resting path
    zigzag = int(np.argmax(zig))        # maximal velocity reversals
    assert list(sites[straight]) == [0, 0, 0, 0, 0]
    assert dist.probs[straight] > dist.probs[zigzag]


def test_curvature_cutoff_zeroes_kinked_paths():
    spec = LatticeSpec(steps=4, extent=4, start=0, end=0, hop=1)
    dist, sites = run_lattice_experiment(
        spec,
        DistanceSpec("max_sep"),
        weight=WeightFunction("curvature_cutoff", {"threshold": 1.0}),
    )
    kinked = np.abs(np.diff(sites, n=2, axis=1)).max(axis=1) > 1.0
    assert kinked.any()
    assert np.all(dist.probs[kinked] == 0.0)
    assert np.all(dist.probs[~kinked] > 0.0)


def test_corridor_weights_split_arms():
    spec = LatticeSpec(steps=6, extent=6, start=0, end=0, hop=2)
    sites = enumerate_paths(spec)
    w = corridor_weights(sites, margin=1)
    interior = sites[:, 1:-1]
    upper = (interior >= 1).all(axis=1)
    lower = (interior <= -1).all(axis=1)
    assert np.array_equal(w > 0, upper | lower)
    assert upper.sum() == lower.sum()  # mirror symmetry


def test_monotone_decoherence_under_distance_scaling():
    spec = LatticeSpec(steps=6, extent=6, start=0, end=0, hop=2)
    vis = [
        two_arm_visibility(spec, DistanceSpec("max_sep"), distance_scale=s)
        for s in (0.0, 1.0, 10.0, 100.0)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(vis, vis[1:]))
    assert vis[0] > 0.5       # coherent limit interferes
    assert vis[-1] < 1e-3     # far-separated arms decohere


def test_mass_weighted_visibility_non_increasing():
    vis = []
    for m in (1.0, 2.0, 4.0, 8.0):
        spec = LatticeSpec(steps=6, extent=6, start=0, end=0, hop=2, mass=m)
        vis.append(two_arm_visibility(spec, DistanceSpec("mass_max_sep")))
    assert all(a >= b - 1e-12 for a, b in zip(vis, vis[1:]))


def test_normalization_and_phase_invariance_on_lattice():
    spec = LatticeSpec(steps=5, extent=3, start=0, end=1, hop=1, mass=0.8)
    ens, sites = lattice_ensemble(spec)
    from realpathsim.distances import grid_distance_matrix
    from realpathsim.paths import PathEnsemble

    dmat = grid_distance_matrix(
        sites.astype(float), np.arange(6, dtype=float), DistanceSpec("l2")
    )
    base = path_probabilities(ens, dmat)
    assert abs(float(np.sum(base.probs)) - 1.0) < 1e-9
    rotated = path_probabilities(
        PathEnsemble(np.exp(0.7j) * ens.amplitudes), dmat
    )
    assert np.max(np.abs(base.probs - rotated.probs)) < 1e-12
