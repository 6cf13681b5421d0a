"""
Test the normalized Hamiltonian on Grassmannians
Location: abw_lab/test_moment.py

No direct file output
"""

import numpy as np
import pytest

from grassmannian.moment import (
    Frame,
    action_inequality_bridge,
    action_value,
    coordinate_frame,
    critical_values,
    haar_frame,
    haar_mean_check,
    hamiltonian_value,
)
from grassmannian.schubert import make_index
from inequalities.abw import AlcovePoint, enumerate_inequalities, random_alcove_point, su2_class
from utils.errors import InputValidationError

ALPHA = AlcovePoint(alpha=(0.3, 0.1, -0.1, -0.3))


def test_frame_validation():
    with pytest.raises(ValueError):
        Frame(columns=np.ones((3, 2)))
    with pytest.raises(ValueError):
        Frame(columns=np.ones((2, 3)) / np.sqrt(3))
    frame = haar_frame(5, 2, np.random.default_rng(1))
    assert frame.row_weights().sum() == pytest.approx(2.0)


def test_critical_values_at_coordinate_planes():
    values = critical_values(ALPHA, 2)
    assert len(values) == 6
    for subset, value in values.items():
        frame = coordinate_frame(make_index(subset, 4))
        assert hamiltonian_value(frame, ALPHA) == value
    assert values[(1, 2)] == pytest.approx(-0.4)
    assert values[(1, 4)] == pytest.approx(0.0)


def test_hamiltonian_range_is_bounded_by_critical_values():
    rng = np.random.default_rng(2)
    values = critical_values(ALPHA, 2).values()
    low, high = min(values), max(values)
    for _ in range(200):
        h = hamiltonian_value(haar_frame(4, 2, rng), ALPHA)
        assert low - 1e-12 <= h <= high + 1e-12


def test_haar_mean_is_zero():
    mean, stderr = haar_mean_check(ALPHA, 2, samples=20000, seed=3)
    assert abs(mean) <= 5 * stderr + 1e-12
    with pytest.raises(InputValidationError):
        haar_mean_check(ALPHA, 2, samples=10)


def test_haar_mean_thread_independent():
    serial = haar_mean_check(ALPHA, 1, samples=9000, seed=4, threads=1)
    parallel = haar_mean_check(ALPHA, 1, samples=9000, seed=4, threads=3)
    assert serial[0] == pytest.approx(parallel[0], abs=1e-15)


def test_action_value():
    assert action_value(make_index([1, 3], 4), 1, ALPHA) == pytest.approx(0.2 - 1)
    with pytest.raises(InputValidationError):
        action_value(make_index([1], 2), 0, ALPHA)


def test_bridge_on_su2_tetrahedron():
    tetrahedron = enumerate_inequalities(2, 3)
    zeta = [su2_class(0.1), su2_class(0.1), su2_class(0.3)]
    bounds = [action_inequality_bridge(ineq, zeta) for ineq in tetrahedron]
    assert max(bounds) == pytest.approx(0.1)


def test_bridge_on_random_su3_classes():
    rng = np.random.default_rng(5)
    for ineq in enumerate_inequalities(3, 3):
        zeta = [random_alcove_point(3, rng) for _ in range(3)]
        action_inequality_bridge(ineq, zeta)


def test_bridge_detects_wrong_class_count():
    ineq = enumerate_inequalities(2, 3)[0]
    with pytest.raises(InputValidationError):
        action_inequality_bridge(ineq, [su2_class(0.1)] * 2)


def test_critical_values_range_check():
    with pytest.raises(InputValidationError):
        critical_values(ALPHA, 4)


if __name__ == "__main__":
    print("=" * 70)
    print("TESTING MOMENT MAP AND ACTION VALUES")
    print("=" * 70)
    raise SystemExit(pytest.main([__file__, "-v"]))
