"""
Eigenvalue inequalities for products in SU(n)
Location: abw_lab/inequalities/abw.py

No direct file output (JSON text is returned; the CLI writes it)

Every nonzero Gromov-Witten number (sigma_I1, ..., sigma_Il)_d on some
Gr(r, n) gives a linear inequality

    sum_j sum_{i in I_j} zeta^j_i <= d

on the alcove points of l conjugacy classes whose product can be the
identity. Also holds the AlcovePoint type shared by the numeric modules.
"""

import json
import sys
from itertools import permutations
from multiprocessing.pool import ThreadPool
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

sys.path.append(str(Path(__file__).parent.parent))

from config import ALCOVE_TOL, MAX_L, MAX_N, MEMBERSHIP_TOL, MIN_L, MIN_N, THREAD_COUNT, VERBOSE
from grassmannian.quantum import QuantumClass, quantum_product
from grassmannian.schubert import (
    Partition,
    SchubertIndex,
    complement,
    index_to_partition,
    partition_to_index,
    schubert_basis,
)
from utils.cache_manager import get_default_cache
from utils.errors import InputValidationError, InternalConsistencyError


# =========================
# ALCOVE POINTS
# =========================

class AlcovePoint(BaseModel):
    """
    Label of a conjugacy class of SU(n): eigenvalues exp(2 pi i alpha_j) with
    sum alpha_j = 0 and alpha_1 >= ... >= alpha_n >= alpha_1 - 1.
    """

    model_config = ConfigDict(frozen=True)

    alpha: Tuple[float, ...]

    @field_validator("alpha", mode="before")
    @classmethod
    def _as_floats(cls, value):
        return tuple(float(a) for a in value)

    @model_validator(mode="after")
    def _in_alcove(self):
        a = self.alpha
        if len(a) < 2:
            raise ValueError(f"an alcove point needs n >= 2 coordinates, got {len(a)}")
        if abs(sum(a)) > ALCOVE_TOL:
            raise ValueError(f"coordinates {list(a)} sum to {sum(a):.3e}, not 0")
        if any(x < y - ALCOVE_TOL for x, y in zip(a, a[1:])):
            raise ValueError(f"coordinates {list(a)} are not non-increasing")
        if a[-1] < a[0] - 1 - ALCOVE_TOL:
            raise ValueError(f"alpha_n = {a[-1]} is below alpha_1 - 1 = {a[0] - 1}")
        return self

    @property
    def n(self) -> int:
        return len(self.alpha)

    def as_array(self) -> np.ndarray:
        return np.array(self.alpha, dtype=float)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{a:.6g}" for a in self.alpha) + ")"


def zero_alcove(n: int) -> AlcovePoint:
    return AlcovePoint(alpha=(0.0,) * n)


def su2_class(zeta: float) -> AlcovePoint:
    """SU(2) class with eigenvalues exp(+-2 pi i zeta), zeta in [0, 1/2]"""
    if not -ALCOVE_TOL <= zeta <= 0.5 + ALCOVE_TOL:
        raise InputValidationError(f"SU(2) class parameter {zeta} outside [0, 1/2]")
    return AlcovePoint(alpha=(zeta, -zeta))


def inverse_alcove(point: AlcovePoint) -> AlcovePoint:
    """Class of U^-1: (-alpha_n, ..., -alpha_1)"""
    return AlcovePoint(alpha=tuple(-a for a in reversed(point.alpha)))


def alcove_from_angles(theta: Sequence[float]) -> AlcovePoint:
    """
    Alcove point of the class with eigenvalues exp(2 pi i theta_j), theta real
    with integer sum. Angles are reduced to [0, 1), sorted decreasingly, and
    the s largest are shifted down by 1 where s is the (rounded) angle sum.
    """
    t = np.mod(np.asarray(theta, dtype=float), 1.0)
    t[t >= 1.0] = 0.0
    t = np.sort(t)[::-1]
    n = len(t)
    s = int(round(float(t.sum())))
    s = min(max(s, 0), n)
    alpha = np.concatenate([t[s:], t[:s] - 1.0])
    alpha -= alpha.mean()
    return AlcovePoint(alpha=tuple(alpha))


def random_alcove_point(n: int, rng: np.random.Generator) -> AlcovePoint:
    """Alcove point of n - 1 uniform angles completed to an integer sum"""
    theta = rng.random(n - 1)
    theta = np.append(theta, -theta.sum())
    return alcove_from_angles(theta)


def shared_n(points: Sequence[AlcovePoint]) -> int:
    if not points:
        raise InputValidationError("no classes given")
    sizes = {p.n for p in points}
    if len(sizes) > 1:
        raise InputValidationError(f"classes of different sizes {sorted(sizes)}")
    return points[0].n


# =========================
# INEQUALITIES
# =========================

class AbwInequality(BaseModel):
    """sum_j sum_{i in I_j} zeta^j_i <= d, backed by a positive GW number"""

    model_config = ConfigDict(frozen=True)

    r: int
    subsets: Tuple[SchubertIndex, ...]
    d: int
    gw_value: int

    @model_validator(mode="after")
    def _consistent(self):
        if len(self.subsets) < 2:
            raise ValueError("an inequality needs at least two subsets")
        if any(s.r != self.r for s in self.subsets) or len({s.n for s in self.subsets}) > 1:
            raise ValueError("subsets come from different Grassmannians")
        if self.d < 0:
            raise ValueError(f"negative degree {self.d}")
        if self.gw_value <= 0:
            raise ValueError(f"inequality backed by a non-positive GW number {self.gw_value}")
        codim = sum(p.size for p in self.partitions)
        if codim != self.r * (self.n - self.r) + self.n * self.d:
            raise ValueError(f"dimension condition fails for {self.describe()}")
        return self

    @property
    def n(self) -> int:
        return self.subsets[0].n

    @property
    def l(self) -> int:
        return len(self.subsets)

    @property
    def partitions(self) -> List[Partition]:
        return [index_to_partition(s) for s in self.subsets]

    def sort_key(self) -> Tuple:
        return (self.r, self.d, tuple(s.indices for s in self.subsets))

    def describe(self) -> str:
        lhs = " + ".join(
            " + ".join(f"z{j}_{i}" for i in s.indices)
            for j, s in enumerate(self.subsets, start=1)
        )
        return f"{lhs} <= {self.d}"

    def to_record(self) -> Dict:
        return {
            "n": self.n,
            "l": self.l,
            "r": self.r,
            "d": self.d,
            "subsets": [list(s.indices) for s in self.subsets],
            "partitions": [list(p.parts) for p in self.partitions],
            "gw": self.gw_value,
        }


def default_d_max(n: int, l: int, r: int) -> int:
    """Largest dimension-feasible degree: floor(l * r(n - r) / n)"""
    return (l * r * (n - r)) // n


def _check_ranges(n: int, l: int, d_max: Optional[int]):
    if not MIN_N <= n <= MAX_N:
        raise InputValidationError(f"n={n} outside {MIN_N}..{MAX_N}")
    if not MIN_L <= l <= MAX_L:
        raise InputValidationError(f"l={l} outside {MIN_L}..{MAX_L}")
    if d_max is not None and d_max < 0:
        raise InputValidationError(f"d_max={d_max} is negative")


def _enumerate_for_r(n: int, l: int, r: int, d_max: int) -> List[AbwInequality]:
    """
    All positive (sigma_lam1, ..., sigma_laml)_d with d <= d_max on Gr(r, n).

    Walks multisets of the first l - 1 classes with shared prefix products;
    each term q^d * sigma_nu of the product yields the last class complement(nu).
    Values are stored per multiset of all l classes and then expanded to every
    ordering.
    """
    basis = schubert_basis(n, r)
    values: Dict[Tuple[Tuple[int, ...], ...], int] = {}

    def walk(start: int, chosen: List[Partition], product: QuantumClass):
        if len(chosen) == l - 1:
            for d, nu, coeff in product.items():
                if d > d_max or coeff <= 0:
                    continue
                full = tuple(sorted([p.parts for p in chosen] + [complement(nu).parts]))
                previous = values.setdefault(full, coeff)
                if previous != coeff:
                    raise InternalConsistencyError(
                        f"GW number of {full} on Gr({r},{n}) read as {previous} and {coeff}"
                    )
            return
        for k in range(start, len(basis)):
            lam = basis[k]
            walk(k, chosen + [lam], quantum_product(product, QuantumClass.basis(lam)))

    walk(0, [], QuantumClass.unit(n, r))

    c = n - r
    found = []
    for full, coeff in values.items():
        for order in set(permutations(full)):
            subsets = tuple(partition_to_index(Partition(parts=p, r=r, c=c)) for p in order)
            d = (sum(sum(p) for p in order) - r * c) // n
            found.append(AbwInequality(r=r, subsets=subsets, d=d, gw_value=coeff))
    return found


def enumerate_inequalities(n: int, l: int, d_max: Optional[int] = None,
                           threads: Optional[int] = None) -> List[AbwInequality]:
    """
    Every inequality from a positive l-point GW number on Gr(r, n), r = 1..n-1,
    with degree d <= d_max (default: the largest feasible degree per r).
    Sorted by (r, d, subsets).
    """
    _check_ranges(n, l, d_max)
    threads = threads or THREAD_COUNT

    def job(r: int) -> List[AbwInequality]:
        bound = default_d_max(n, l, r) if d_max is None else d_max
        return _enumerate_for_r(n, l, r, bound)

    ranks = list(range(1, n))
    if threads > 1:
        with ThreadPool(min(threads, len(ranks))) as pool:
            chunks = pool.map(job, ranks)
    else:
        chunks = [job(r) for r in ranks]

    inequalities = sorted((ineq for chunk in chunks for ineq in chunk), key=AbwInequality.sort_key)
    get_default_cache().save()
    if VERBOSE:
        print(f" Enumerated {len(inequalities)} inequalities for n={n}, l={l}")
    return inequalities


# =========================
# EVALUATION
# =========================

class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    inequality: str
    margin: float


class MembershipReport(BaseModel):
    """Margins L(zeta) of every inequality and the ones above tolerance"""

    model_config = ConfigDict(frozen=True)

    inside: bool
    tolerance: float
    margins: List[float]
    violations: List[Violation]

    @property
    def max_margin(self) -> float:
        return max(self.margins) if self.margins else float("-inf")


def _check_shapes(zeta: Sequence[AlcovePoint], ineq: AbwInequality):
    if len(zeta) != ineq.l:
        raise InputValidationError(f"{len(zeta)} classes given for an inequality with l={ineq.l}")
    if zeta[0].n != ineq.n:
        raise InputValidationError(f"classes have n={zeta[0].n}, inequality has n={ineq.n}")


def evaluate_form(ineq: AbwInequality, zeta: Sequence[AlcovePoint]) -> float:
    """L(zeta) = sum_j sum_{i in I_j} zeta^j_i - d (positive means violated)"""
    shared_n(zeta)
    _check_shapes(zeta, ineq)
    total = 0.0
    for point, subset in zip(zeta, ineq.subsets):
        total += sum(point.alpha[i - 1] for i in subset.indices)
    return total - ineq.d


def check_membership(zeta: Sequence[AlcovePoint], ineqs: Sequence[AbwInequality],
                     tolerance: float = MEMBERSHIP_TOL) -> MembershipReport:
    shared_n(zeta)
    margins = [evaluate_form(ineq, zeta) for ineq in ineqs]
    violations = [
        Violation(index=k, inequality=ineq.describe(), margin=m)
        for k, (ineq, m) in enumerate(zip(ineqs, margins))
        if m > tolerance
    ]
    return MembershipReport(inside=not violations, tolerance=tolerance,
                            margins=margins, violations=violations)


def upsilon_lower_bound(zeta: Sequence[AlcovePoint], ineqs: Sequence[AbwInequality]) -> float:
    """max(0, max L(zeta)): certified lower bound for Upsilon_l"""
    shared_n(zeta)
    best = 0.0
    for ineq in ineqs:
        best = max(best, evaluate_form(ineq, zeta))
    return best


# =========================
# JSON
# =========================

def inequalities_to_json(ineqs: Sequence[AbwInequality]) -> str:
    return json.dumps([ineq.to_record() for ineq in ineqs], indent=2)


def inequalities_from_json(text: str) -> List[AbwInequality]:
    try:
        records = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputValidationError(f"inequality list is not JSON (line {e.lineno}, column {e.colno})") from e
    inequalities = []
    for k, rec in enumerate(records):
        try:
            n = rec["n"]
            subsets = tuple(SchubertIndex(indices=tuple(s), n=n, r=rec["r"]) for s in rec["subsets"])
            inequalities.append(AbwInequality(r=rec["r"], subsets=subsets, d=rec["d"], gw_value=rec["gw"]))
        except (KeyError, TypeError, ValueError) as e:
            raise InputValidationError(f"record {k}: {e}") from e
    return inequalities


if __name__ == "__main__":
    tetrahedron = enumerate_inequalities(2, 3, 1)
    for ineq in tetrahedron:
        print(ineq.describe())

    zeta = [su2_class(0.1), su2_class(0.1), su2_class(0.3)]
    report = check_membership(zeta, tetrahedron)
    print("inside:", report.inside, "| violations:", [v.inequality for v in report.violations])
    print("lower bound:", upsilon_lower_bound(zeta, tetrahedron))
