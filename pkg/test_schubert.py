"""
Test classical Schubert calculus
Location: abw_lab/test_schubert.py

No direct file output
"""

from itertools import combinations

import pytest

from grassmannian.schubert import (
    CohomologyElement,
    Partition,
    SchubertIndex,
    complement,
    cup_product,
    dual_index,
    index_to_partition,
    lr_coefficient,
    lr_coefficient_parts,
    make_index,
    partition_to_index,
    pieri_product,
    poincare_pairing,
    schubert_basis,
)
from utils.cache_manager import StructureConstantCache
from utils.errors import InputValidationError, MismatchedGrassmannianError


def sigma(parts, n, r):
    return CohomologyElement.basis(Partition(parts=parts, r=r, c=n - r))


def test_index_partition_bijection():
    assert index_to_partition(make_index([1, 2], 4)).parts == (2, 2)
    assert index_to_partition(make_index([3, 4], 4)).parts == ()
    assert index_to_partition(make_index([1, 3], 4)).parts == (2, 1)
    assert index_to_partition(make_index([1], 2)).parts == (1,)

    for n, r in [(4, 2), (5, 2), (6, 3)]:
        for subset in combinations(range(1, n + 1), r):
            index = SchubertIndex(indices=subset, n=n, r=r)
            assert partition_to_index(index_to_partition(index)) == index


def test_dual_index_is_complement():
    index = make_index([1, 3], 5)
    assert index_to_partition(dual_index(index)) == complement(index_to_partition(index))


def test_make_index_sorts_and_validates():
    assert make_index([3, 1], 4).indices == (1, 3)
    with pytest.raises(InputValidationError):
        make_index([1, 1], 4)
    with pytest.raises(InputValidationError):
        make_index([0, 2], 4)
    with pytest.raises(InputValidationError):
        make_index([1, 2, 3, 4], 4)


def test_partition_must_fit_box():
    with pytest.raises(ValueError):
        Partition(parts=(3,), r=2, c=2)
    with pytest.raises(ValueError):
        Partition(parts=(1, 2), r=2, c=2)
    assert Partition(parts=(2, 0), r=2, c=2).parts == (2,)


def test_basis_order():
    basis = schubert_basis(4, 2)
    assert [p.parts for p in basis] == [(), (1,), (1, 1), (2,), (2, 1), (2, 2)]
    assert len(schubert_basis(6, 3)) == 20
    with pytest.raises(InputValidationError):
        schubert_basis(4, 4)


def test_cup_products_gr24():
    s1 = sigma((1,), 4, 2)
    assert cup_product(s1, s1).terms == {(2,): 1, (1, 1): 1}
    assert cup_product(s1, sigma((2, 1), 4, 2)).terms == {(2, 2): 1}
    assert cup_product(sigma((2,), 4, 2), sigma((1, 1), 4, 2)).is_zero()
    assert cup_product(sigma((2,), 4, 2), sigma((2,), 4, 2)).terms == {(2, 2): 1}


def test_lines_meeting_four_lines():
    s1 = sigma((1,), 4, 2)
    fourth = cup_product(cup_product(cup_product(s1, s1), s1), s1)
    assert fourth.terms == {(2, 2): 2}


@pytest.mark.parametrize("lam,mu,nu,expected", [
    ((1,), (1, 1), (2, 1), 1),
    ((2, 1), (2, 1), (3, 2, 1), 2),
    ((2, 1), (2, 1), (4, 2), 1),
    ((1,), (1,), (3,), 0),
])
def test_lr_coefficients(lam, mu, nu, expected):
    assert lr_coefficient_parts(lam, mu, nu) == expected


def test_lr_coefficient_models():
    lam = Partition(parts=(2, 1), r=3, c=3)
    nu = Partition(parts=(3, 2, 1), r=3, c=3)
    assert lr_coefficient(lam, lam, nu) == 2
    product = cup_product(CohomologyElement.basis(lam), CohomologyElement.basis(lam))
    assert product.coefficient(nu) == 2


def test_pieri_agrees_with_cup_product():
    n, r = 5, 2
    for lam in schubert_basis(n, r):
        for k in range(1, n - r + 1):
            row = sigma((k,), n, r)
            assert pieri_product(lam, k) == cup_product(row, CohomologyElement.basis(lam))


def test_poincare_duality():
    n, r = 5, 2
    for lam in schubert_basis(n, r):
        for mu in schubert_basis(n, r):
            expected = 1 if mu == complement(lam) else 0
            assert poincare_pairing(CohomologyElement.basis(lam), CohomologyElement.basis(mu)) == expected


def test_commutative_and_unit():
    a = sigma((2, 1), 5, 2) + sigma((1,), 5, 2)
    b = sigma((1, 1), 5, 2)
    assert cup_product(a, b) == cup_product(b, a)
    assert cup_product(CohomologyElement.unit(5, 2), a) == a


def test_mismatched_grassmannians():
    with pytest.raises(MismatchedGrassmannianError):
        cup_product(sigma((1,), 4, 2), sigma((1,), 4, 1))


def test_private_cache_counts_hits():
    cache = StructureConstantCache()
    s1 = sigma((1,), 4, 2)
    cup_product(s1, s1, cache=cache)
    cup_product(s1, s1, cache=cache)
    stats = cache.get_stats()
    assert stats["misses"] == 1
    assert stats["hits"] == 1


if __name__ == "__main__":
    print("=" * 70)
    print("TESTING CLASSICAL SCHUBERT CALCULUS")
    print("=" * 70)
    raise SystemExit(pytest.main([__file__, "-v"]))
