"""
Validation script
Location: abw_lab/validate.py
No direct file output

Note: Validation results printed to console only. Sizes are reduced from the
full acceptance runs; raise them with --full.
"""

import argparse
import itertools
import sys
import time

import numpy as np

from cli import montecarlo_frame
from config import *
from grassmannian.moment import action_inequality_bridge, coordinate_frame, critical_values, hamiltonian_value
from grassmannian.quantum import GwQuery, QuantumClass, gw_invariant, quantum_pieri, quantum_product
from grassmannian.schubert import CohomologyElement, cup_product, make_index, schubert_basis
from groups.karea import karea_duality_check
from groups.unitary import su2_upsilon3_closed_form, upsilon_estimate
from inequalities.abw import enumerate_inequalities, random_alcove_point, su2_class, upsilon_lower_bound


# =========================
# CHECKS
# =========================

def check_tetrahedron(full: bool) -> str:
    described = sorted(ineq.describe() for ineq in enumerate_inequalities(2, 3, 1))
    assert len(described) == 4, f"expected 4 facets, got {len(described)}"
    return "; ".join(described)


def check_su2_lower_bound(full: bool) -> str:
    steps = 21
    inequalities = enumerate_inequalities(2, 3)
    grid = np.linspace(0.0, 0.5, steps)
    worst = 0.0
    for z in itertools.product(grid, repeat=3):
        bound = upsilon_lower_bound([su2_class(a) for a in z], inequalities)
        worst = max(worst, abs(bound - su2_upsilon3_closed_form(*z)))
    assert worst <= 1e-12, f"closed form differs by {worst:.3e}"
    return f"{steps ** 3} grid points, max difference {worst:.1e}"


def check_su2_estimate(full: bool) -> str:
    grid = np.linspace(0.0, 0.5, 5) if full else [0.0, 0.25, 0.5]
    budget = 20000 if full else 3000
    worst = 0.0
    for z in itertools.product(grid, repeat=3):
        value, _ = upsilon_estimate([su2_class(a) for a in z], budget=budget, seed=DEFAULT_SEED,
                                    starts=8, threads=THREAD_COUNT)
        worst = max(worst, abs(value - su2_upsilon3_closed_form(*z)))
    assert worst <= 5e-3, f"estimate off by {worst:.3e}"
    return f"{len(grid) ** 3} points at budget {budget}, max error {worst:.2e}"


def check_quantum_ring(full: bool) -> str:
    checked = 0
    for n, r in [(4, 2), (5, 2)]:
        partitions = schubert_basis(n, r)
        basis = [QuantumClass.basis(lam) for lam in partitions]
        for lam, mu in itertools.product(partitions, repeat=2):
            a, b = QuantumClass.basis(lam), QuantumClass.basis(mu)
            ab = quantum_product(a, b)
            assert ab == quantum_product(b, a), "not commutative"
            classical = cup_product(CohomologyElement.basis(lam), CohomologyElement.basis(mu))
            assert ab.degree_part(0) == classical.terms, "degree zero part differs from cup product"
            checked += 1
        for a, b, c in itertools.product(basis, repeat=3):
            assert quantum_product(quantum_product(a, b), c) == quantum_product(a, quantum_product(b, c))
        s1 = basis[1]
        for a in basis:
            assert quantum_pieri(a) == quantum_product(s1, a), "Pieri and rim hook paths disagree"
    return f"{checked} products on Gr(2,4) and Gr(2,5)"


def check_gw(full: bool) -> str:
    assert gw_invariant(GwQuery(classes=(make_index([1], 2),) * 3, d=1)) == 1
    subsets = list(itertools.combinations(range(1, 5), 2))
    queries = 0
    for triple in itertools.combinations_with_replacement(subsets, 3):
        for d in range(2):
            values = {gw_invariant(GwQuery(classes=tuple(make_index(s, 4) for s in order), d=d))
                      for order in itertools.permutations(triple)}
            assert len(values) == 1, f"{triple} d={d} not permutation invariant"
            assert min(values) >= 0, f"{triple} d={d} negative"
            queries += 1
    return f"{queries} queries on Gr(2,4)"


def check_montecarlo(full: bool) -> str:
    samples = 10000 if full else 500
    totals = []
    for n in (2, 3):
        df = montecarlo_frame(n, 3, samples, seed=DEFAULT_SEED)
        violations = int(df["violations"].sum())
        assert violations == 0, f"n={n}: {violations} violations"
        totals.append(f"n={n}: max margin {df['max_margin'].max():.2e}")
    return ", ".join(totals)


def check_moment(full: bool) -> str:
    rng = np.random.default_rng(DEFAULT_SEED)
    frames = 0
    for n in range(2, 6):
        alpha = random_alcove_point(n, rng)
        for r in range(1, n):
            for subset, value in critical_values(alpha, r).items():
                assert hamiltonian_value(coordinate_frame(make_index(subset, n)), alpha) == value
                frames += 1
    instances = 0
    for n, l in [(2, 3), (4, 3)]:
        for ineq in enumerate_inequalities(n, l):
            action_inequality_bridge(ineq, [random_alcove_point(n, rng) for _ in range(l)])
            instances += 1
    return f"{frames} coordinate frames exact, bridge holds on {instances} inequalities"


def check_karea(full: bool) -> str:
    mesh = DEFAULT_MESH if full else 64
    report = karea_duality_check(su2_class(0.1), su2_class(0.3), mesh=mesh, budget=8)
    assert report.converged, f"ratio {report.ratio:.4f} outside tolerance"
    return f"mesh {mesh}: curvature {report.curvature_min:.4f} vs distance {report.distance:.4f}"


CHECKS = [
    ("SU(2) tetrahedron", check_tetrahedron),
    ("SU(2) lower bound vs closed form", check_su2_lower_bound),
    ("SU(2) Upsilon estimate", check_su2_estimate),
    ("Quantum ring integrity", check_quantum_ring),
    ("Gromov-Witten sanity", check_gw),
    ("Monte-Carlo soundness", check_montecarlo),
    ("Moment map identities", check_moment),
    ("K-area duality", check_karea),
]


def run_validation(full: bool = False) -> bool:
    print("=" * 70)
    print("ABW LAB VALIDATION")
    print("=" * 70)

    passed = 0
    failed = 0
    for i, (name, check) in enumerate(CHECKS, 1):
        print(f"\n[Check {i}] {name}")
        print("-" * 70)
        start = time.time()
        try:
            detail = check(full)
            print(f"   PASS ({time.time() - start:.1f}s) {detail}")
            passed += 1
        except Exception as e:
            print(f"  ❌ FAIL ({time.time() - start:.1f}s) {type(e).__name__}: {e}")
            failed += 1

    print("\n" + "=" * 70)
    print("VALIDATION SUMMARY")
    print("=" * 70)
    print(f" Passed: {passed}/{len(CHECKS)}")
    print(f"❌ Failed: {failed}/{len(CHECKS)}")
    print("=" * 70)
    return failed == 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the acceptance checks")
    parser.add_argument("--full", action="store_true", help="full-size grids and sample counts")
    args = parser.parse_args()
    sys.exit(0 if run_validation(full=args.full) else 1)
