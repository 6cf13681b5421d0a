"""
Test lattice connections on the cylinder and the K-area duality check
Location: abw_lab/test_karea.py

No direct file output
"""

import numpy as np
import pytest
from scipy.linalg import expm

from groups.karea import (
    CutoffProfile,
    LatticeConnection,
    build_cutoff,
    coarse_length,
    column_holonomies,
    connection_from_path,
    curvature_norm,
    gauge_transform,
    holonomy_path_extract,
    karea_duality_check,
    plaquette_holonomies,
    random_connection,
    random_gauge,
    reparameterize_arc,
)
from groups.unitary import GroupPath, alcove_of, path_length, torus_geodesic
from inequalities.abw import AlcovePoint, su2_class
from utils.errors import DegenerateSamplingError, InputValidationError, PlaquetteBranchError

MESH_SLACK = 0.1


def su2_torus_path(angles):
    theta = np.asarray(angles, dtype=float)
    diagonals = np.stack([np.exp(2j * np.pi * theta), np.exp(-2j * np.pi * theta)], axis=1)
    matrices = np.einsum("kj,ij->kij", diagonals, np.eye(2))
    return GroupPath(matrices=matrices, params=np.linspace(0.0, 1.0, len(theta)))


def test_cutoff_profile():
    psi = build_cutoff(0.05, 64)
    assert psi.T == 64
    assert psi.values[0] == 1.0
    assert np.all(np.diff(psi.values) <= 0)
    assert psi.drops().max() * 64 == pytest.approx(1.05)
    assert psi.values[-1] == 0.0
    with pytest.raises(ValueError):
        CutoffProfile(epsilon=0.05, values=[0.9, 0.0], slope_bound=1.05)
    with pytest.raises(ValueError):
        CutoffProfile(epsilon=0.05, values=[1.0, 0.0], slope_bound=1.05)
    with pytest.raises(InputValidationError):
        build_cutoff(-0.1, 64)


def test_flat_connection():
    c = LatticeConnection.flat(2, 16, 16)
    assert curvature_norm(c) == 0.0
    assert np.allclose(column_holonomies(c), np.eye(2))
    assert c.cell_area == pytest.approx(1 / 256)


def test_connection_validation():
    s = np.broadcast_to(np.eye(2), (16, 16, 2, 2)).copy()
    t = np.broadcast_to(np.eye(2), (16, 16, 2, 2)).copy()
    with pytest.raises(ValueError):
        LatticeConnection(s_edges=s, t_edges=t)
    with pytest.raises(ValueError):
        LatticeConnection(s_edges=2 * s, t_edges=np.broadcast_to(np.eye(2), (17, 16, 2, 2)))


def test_connection_from_geodesic():
    path = torus_geodesic([0.0, 0.0], [0.3, -0.3], samples=32)
    psi = build_cutoff(0.05, 64)
    c = connection_from_path(path, psi, 32, 64)

    assert np.allclose(column_holonomies(c), path.matrices, atol=1e-10)
    assert curvature_norm(c) == pytest.approx(1.05 * 0.3, rel=1e-6)

    extracted = holonomy_path_extract(c)
    assert np.allclose(extracted.matrices, path.matrices, atol=1e-10)
    assert coarse_length(extracted) <= curvature_norm(c) + 1e-9


def test_area_rescales_curvature():
    path = torus_geodesic([0.0, 0.0], [0.2, -0.2], samples=16)
    psi = build_cutoff(0.05, 32)
    unit = curvature_norm(connection_from_path(path, psi, 16, 32))
    double = curvature_norm(connection_from_path(path, psi, 16, 32, area=2.0))
    assert 2.0 * double == pytest.approx(unit)


def random_smooth_path(n, rng, samples=128):
    """s -> exp(i (s H0 + sin(2 pi s) H1 + s^2 H2)) with random traceless H"""
    g = rng.standard_normal((3, n, n)) + 1j * rng.standard_normal((3, n, n))
    h = 0.5 * (g + np.conj(np.swapaxes(g, 1, 2)))
    h -= (np.trace(h, axis1=1, axis2=2) / n)[:, None, None] * np.eye(n)
    h *= (rng.uniform(0.2, 2.0, size=3) / np.linalg.norm(h, 2, axis=(1, 2)))[:, None, None]
    s = np.linspace(0.0, 1.0, samples + 1)
    matrices = np.stack([expm(1j * (t * h[0] + np.sin(2 * np.pi * t) * h[1] + t * t * h[2])) for t in s])
    return GroupPath(matrices=matrices, params=s)


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("n", [2, 3])
def test_path_connection_curvature_bounded_by_coarse_length(n, seed):
    path = random_smooth_path(n, np.random.default_rng(seed))
    psi = build_cutoff(0.05, 32)
    c = connection_from_path(path, psi, 32, 32)

    assert path_length(path) <= coarse_length(path) + 1e-12
    assert curvature_norm(c) <= 1.05 * coarse_length(path) * (1 + MESH_SLACK)
    assert coarse_length(holonomy_path_extract(c)) <= curvature_norm(c) * (1 + MESH_SLACK)

    # the extracted loop path is the input up to the frame at s = 0
    extracted = holonomy_path_extract(c)
    assert alcove_of(extracted.end()).alpha == pytest.approx(alcove_of(path.end()).alpha, abs=1e-6)


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("n,scale", [(2, 0.005), (2, 0.02), (3, 0.01)])
def test_extraction_bounded_by_curvature(n, scale, seed):
    c = random_connection(n, 16, 16, scale=scale, seed=100 + seed)
    assert coarse_length(holonomy_path_extract(c)) <= curvature_norm(c) * (1 + MESH_SLACK)


def test_gauge_invariance():
    c = random_connection(2, 16, 16, scale=0.02, seed=7)
    g = random_gauge(2, 16, 16, seed=8)
    moved = gauge_transform(c, g)
    assert curvature_norm(moved) == pytest.approx(curvature_norm(c), rel=1e-8)
    assert coarse_length(holonomy_path_extract(moved)) == pytest.approx(
        coarse_length(holonomy_path_extract(c)), rel=1e-6)
    with pytest.raises(InputValidationError):
        gauge_transform(c, g[:-1])


def test_plaquette_near_branch_cut():
    s = np.broadcast_to(np.eye(2, dtype=complex), (16, 16, 2, 2)).copy()
    s[0, 0] = np.diag(np.exp([0.95j * np.pi, -0.95j * np.pi]))
    t = np.broadcast_to(np.eye(2, dtype=complex), (17, 16, 2, 2)).copy()
    c = LatticeConnection(s_edges=s, t_edges=t)
    assert plaquette_holonomies(c).shape == (16, 16, 2, 2)
    with pytest.raises(PlaquetteBranchError):
        curvature_norm(c)


def test_coarse_length_errors():
    single = GroupPath(matrices=np.eye(2)[None], params=[0.0])
    with pytest.raises(DegenerateSamplingError):
        coarse_length(single)
    stuck = GroupPath(matrices=np.stack([np.eye(2)] * 2), params=[0.0, 0.0])
    with pytest.raises(DegenerateSamplingError):
        coarse_length(stuck)


def test_reparameterize_constant_path():
    constant = GroupPath.from_matrices([np.eye(2)] * 5)
    assert reparameterize_arc(constant) is constant


def test_reparameterize_slow_fast_path():
    s = np.linspace(0.0, 1.0, 61)
    path = su2_torus_path(0.3 * s ** 2)
    assert coarse_length(path) > 0.5

    uniform = reparameterize_arc(path)
    assert path_length(uniform) == pytest.approx(path_length(path), rel=5e-3)
    assert coarse_length(uniform) == pytest.approx(0.3, rel=1e-6)
    assert np.allclose(uniform.end().entries, path.end().entries, atol=1e-10)


def test_duality_check_converges():
    report = karea_duality_check(su2_class(0.1), su2_class(0.3), mesh=64, budget=4, seed=1)
    assert report.distance == pytest.approx(0.2)
    assert report.converged
    assert report.ratio == pytest.approx(1.05, abs=0.01)
    assert report.candidates == 4


def test_duality_check_half_turn():
    report = karea_duality_check(su2_class(0.0), su2_class(0.5), mesh=64, budget=4, seed=1)
    assert report.distance == pytest.approx(0.5)
    assert report.ratio == pytest.approx(1.05, abs=0.01)
    assert report.converged


def test_duality_check_identical_classes():
    report = karea_duality_check(su2_class(0.2), su2_class(0.2), mesh=32, budget=2)
    assert report.ratio == 1.0
    assert report.converged


def test_duality_check_validation():
    with pytest.raises(InputValidationError):
        karea_duality_check(AlcovePoint(alpha=(0.1, 0.0, -0.1)), AlcovePoint(alpha=(0.1, 0.0, -0.1)))
    with pytest.raises(InputValidationError):
        karea_duality_check(su2_class(0.1), su2_class(0.3), mesh=8)


if __name__ == "__main__":
    print("=" * 70)
    print("TESTING K-AREA ON THE CYLINDER")
    print("=" * 70)
    raise SystemExit(pytest.main([__file__, "-v"]))
