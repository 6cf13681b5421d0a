"""
Test the eigenvalue inequalities
Location: abw_lab/test_abw.py

No direct file output (reads golden/*.json)
"""

import json
from itertools import product

import numpy as np
import pytest

from config import GOLDEN_DIR
from grassmannian.schubert import make_index
from groups.unitary import product_class, su2_upsilon3_closed_form
from inequalities.abw import (
    AbwInequality,
    AlcovePoint,
    check_membership,
    enumerate_inequalities,
    evaluate_form,
    inequalities_from_json,
    inequalities_to_json,
    inverse_alcove,
    random_alcove_point,
    su2_class,
    upsilon_lower_bound,
)
from utils.errors import InputValidationError


def su2(*zetas):
    return [su2_class(z) for z in zetas]


def test_alcove_point_validation():
    AlcovePoint(alpha=(0.5, -0.5))
    AlcovePoint(alpha=(0.25, 0.25, -0.5))
    with pytest.raises(ValueError):
        AlcovePoint(alpha=(0.3, -0.2))
    with pytest.raises(ValueError):
        AlcovePoint(alpha=(-0.1, 0.1))
    with pytest.raises(ValueError):
        AlcovePoint(alpha=(0.7, -0.1, -0.6))
    with pytest.raises(ValueError):
        AlcovePoint(alpha=(0.0,))


def test_inverse_alcove():
    assert inverse_alcove(AlcovePoint(alpha=(0.3, 0.1, -0.4))).alpha == pytest.approx((0.4, -0.1, -0.3))
    assert inverse_alcove(su2_class(0.2)).alpha == pytest.approx((0.2, -0.2))


def test_random_alcove_points_are_valid():
    rng = np.random.default_rng(0)
    for n in range(2, 7):
        point = random_alcove_point(n, rng)
        assert point.n == n


def test_su2_tetrahedron():
    ineqs = enumerate_inequalities(2, 3, d_max=1)
    found = [(tuple(s.indices for s in ineq.subsets), ineq.d) for ineq in ineqs]
    assert found == [
        (((1,), (2,), (2,)), 0),
        (((2,), (1,), (2,)), 0),
        (((2,), (2,), (1,)), 0),
        (((1,), (1,), (1,)), 1),
    ]
    assert all(ineq.gw_value == 1 for ineq in ineqs)


def test_su2_pair_forces_equal_classes():
    ineqs = enumerate_inequalities(2, 2, d_max=0)
    assert [(tuple(s.indices for s in i.subsets), i.d) for i in ineqs] == [
        (((1,), (2,)), 0),
        (((2,), (1,)), 0),
    ]
    assert check_membership(su2(0.2, 0.2), ineqs).inside
    assert not check_membership(su2(0.2, 0.3), ineqs).inside


@pytest.mark.parametrize("n,l,name", [(2, 3, "abw_n2_l3.json"), (2, 2, "abw_n2_l2.json")])
def test_matches_golden_files(n, l, name):
    expected = json.loads((GOLDEN_DIR / name).read_text(encoding="utf-8"))
    assert json.loads(inequalities_to_json(enumerate_inequalities(n, l))) == expected


def test_json_import_export():
    ineqs = enumerate_inequalities(3, 3)
    assert inequalities_from_json(inequalities_to_json(ineqs)) == ineqs
    assert inequalities_to_json([]) == "[]"
    with pytest.raises(InputValidationError, match="line"):
        inequalities_from_json("[{")
    with pytest.raises(InputValidationError, match="record 0"):
        inequalities_from_json('[{"n": 2, "r": 1, "d": 0, "subsets": [[1], [1]], "gw": 1}]')


def test_enumeration_is_stable_and_thread_independent():
    serial = enumerate_inequalities(4, 3, threads=1)
    parallel = enumerate_inequalities(4, 3, threads=3)
    assert inequalities_to_json(serial) == inequalities_to_json(parallel)
    assert serial == sorted(serial, key=AbwInequality.sort_key)


def test_enumerated_inequalities_are_symmetric_under_reordering():
    ineqs = enumerate_inequalities(3, 3)
    keys = {(tuple(s.indices for s in i.subsets), i.d) for i in ineqs}
    for subsets, d in keys:
        assert (tuple(reversed(subsets)), d) in keys
        assert ((subsets[1], subsets[0], subsets[2]), d) in keys


def test_range_checks():
    with pytest.raises(InputValidationError):
        enumerate_inequalities(7, 3)
    with pytest.raises(InputValidationError):
        enumerate_inequalities(3, 1)
    with pytest.raises(InputValidationError):
        enumerate_inequalities(3, 3, d_max=-1)


def test_inequality_validation():
    subsets = tuple(make_index([1], 2) for _ in range(3))
    with pytest.raises(ValueError):
        AbwInequality(r=1, subsets=subsets, d=0, gw_value=1)
    with pytest.raises(ValueError):
        AbwInequality(r=1, subsets=subsets, d=1, gw_value=0)
    ineq = AbwInequality(r=1, subsets=subsets, d=1, gw_value=1)
    assert ineq.describe() == "z1_1 + z2_1 + z3_1 <= 1"


def test_membership_examples():
    tetrahedron = enumerate_inequalities(2, 3, d_max=1)
    report = check_membership(su2(0.25, 0.25, 0.5), tetrahedron)
    assert report.inside
    assert report.max_margin == pytest.approx(0.0, abs=1e-12)

    report = check_membership(su2(0.1, 0.1, 0.3), tetrahedron)
    assert not report.inside
    assert len(report.violations) == 1
    assert report.violations[0].margin == pytest.approx(0.1)
    assert report.violations[0].inequality == "z1_2 + z2_2 + z3_1 <= 0"


def test_lower_bound_examples():
    tetrahedron = enumerate_inequalities(2, 3)
    assert upsilon_lower_bound(su2(0.1, 0.1, 0.3), tetrahedron) == pytest.approx(0.1)
    assert upsilon_lower_bound(su2(0.45, 0.45, 0.5), tetrahedron) == pytest.approx(0.4)
    assert upsilon_lower_bound(su2(0.0, 0.0, 0.0), tetrahedron) == 0.0


def test_lower_bound_equals_su2_closed_form_on_grid():
    tetrahedron = enumerate_inequalities(2, 3)
    grid = [k / 20 for k in range(11)]
    for z in product(grid, repeat=3):
        bound = upsilon_lower_bound(su2(*z), tetrahedron)
        assert abs(bound - su2_upsilon3_closed_form(*z)) <= 1e-12


def test_evaluate_form_checks_shapes():
    ineq = enumerate_inequalities(2, 3)[0]
    with pytest.raises(InputValidationError):
        evaluate_form(ineq, su2(0.1, 0.2))
    with pytest.raises(InputValidationError):
        evaluate_form(ineq, [AlcovePoint(alpha=(0.1, 0.0, -0.1))] * 3)


@pytest.mark.parametrize("n,l", [(2, 3), (3, 3), (3, 4), (4, 3)])
def test_sampled_products_satisfy_every_inequality(n, l):
    ineqs = enumerate_inequalities(n, l)
    rng = np.random.default_rng(100 * n + l)
    for k in range(200):
        zeta = [random_alcove_point(n, rng) for _ in range(l - 1)]
        zeta.append(product_class(zeta, seed=k))
        report = check_membership(zeta, ineqs)
        assert report.inside, report.violations


if __name__ == "__main__":
    print("=" * 70)
    print("TESTING EIGENVALUE INEQUALITIES")
    print("=" * 70)
    raise SystemExit(pytest.main([__file__, "-v"]))
