"""
Classical Schubert calculus on Gr(r, n)
Location: abw_lab/grassmannian/schubert.py

No direct file output

Basis bookkeeping, Littlewood-Richardson products and Poincare duality.

Conventions used everywhere in the project:
- A Schubert class is labeled by a partition inside the r x (n - r) box
  (its codimension is |lambda|) or, equivalently, by an r-subset
  I = {i_1 < ... < i_r} of {1..n}.
- The bijection is lambda_k = n - r + k - i_k, so I = {1..r} is the
  point class (top codimension) and I = {n-r+1..n} is the fundamental class.
"""

import sys
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

sys.path.append(str(Path(__file__).parent.parent))

from config import COEFFICIENT_BOUND
from utils.cache_manager import StructureConstantCache, get_default_cache
from utils.errors import (
    CoefficientOverflowError,
    InputValidationError,
    MismatchedGrassmannianError,
)

Parts = Tuple[int, ...]


# =========================
# DOMAIN TYPES
# =========================

class Partition(BaseModel):
    """A weakly decreasing sequence fitting the r x c box (c = n - r)"""

    model_config = ConfigDict(frozen=True)

    parts: Parts
    r: int
    c: int

    @field_validator("parts", mode="before")
    @classmethod
    def _strip_zeros(cls, value):
        parts = [int(p) for p in value]
        while parts and parts[-1] == 0:
            parts.pop()
        return tuple(parts)

    @model_validator(mode="after")
    def _fits_box(self):
        if self.r < 0 or self.c < 0:
            raise ValueError(f"box {self.r}x{self.c} has a negative side")
        if len(self.parts) > self.r:
            raise ValueError(f"{self.parts} has more than {self.r} rows")
        if any(p < 0 for p in self.parts):
            raise ValueError(f"{self.parts} has a negative part")
        if any(p > self.c for p in self.parts):
            raise ValueError(f"{self.parts} has a part above {self.c}")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"{self.parts} is not weakly decreasing")
        return self

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def n(self) -> int:
        return self.r + self.c

    def padded(self) -> Parts:
        """Parts padded with zeros to exactly r entries"""
        return self.parts + (0,) * (self.r - len(self.parts))

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


class SchubertIndex(BaseModel):
    """A strictly increasing r-subset of {1..n}"""

    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]
    n: int
    r: int

    @model_validator(mode="after")
    def _valid_subset(self):
        if not 1 <= self.r <= self.n - 1:
            raise ValueError(f"r={self.r} outside 1..{self.n - 1}")
        if len(self.indices) != self.r:
            raise ValueError(f"{list(self.indices)} does not have {self.r} elements")
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError(f"{list(self.indices)} is not strictly increasing")
        if self.indices and (self.indices[0] < 1 or self.indices[-1] > self.n):
            raise ValueError(f"{list(self.indices)} is not inside 1..{self.n}")
        return self

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"


class CohomologyElement(BaseModel):
    """Integer combination of Schubert classes of Gr(r, n), keyed by partition parts"""

    model_config = ConfigDict(frozen=True)

    n: int
    r: int
    terms: Dict[Parts, int]

    @field_validator("terms")
    @classmethod
    def _clean_terms(cls, terms, info):
        if "n" not in info.data or "r" not in info.data:
            return terms
        n, r = info.data["n"], info.data["r"]
        cleaned: Dict[Parts, int] = {}
        for parts, coeff in terms.items():
            lam = Partition(parts=parts, r=r, c=n - r)
            cleaned[lam.parts] = _check_coefficient(cleaned.get(lam.parts, 0) + coeff)
        return {parts: coeff for parts, coeff in cleaned.items() if coeff}

    @classmethod
    def basis(cls, lam: Partition) -> "CohomologyElement":
        return cls(terms={lam.parts: 1}, n=lam.n, r=lam.r)

    @classmethod
    def unit(cls, n: int, r: int) -> "CohomologyElement":
        return cls(terms={(): 1}, n=n, r=r)

    def coefficient(self, lam: Partition) -> int:
        return self.terms.get(lam.parts, 0)

    def items(self) -> Iterator[Tuple[Partition, int]]:
        c = self.n - self.r
        for parts in sorted(self.terms, key=lambda p: (sum(p), p)):
            yield Partition(parts=parts, r=self.r, c=c), self.terms[parts]

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CohomologyElement") -> "CohomologyElement":
        _same_grassmannian(self, other)
        terms = dict(self.terms)
        for parts, coeff in other.terms.items():
            terms[parts] = _check_coefficient(terms.get(parts, 0) + coeff)
        return CohomologyElement(terms=terms, n=self.n, r=self.r)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{coeff}*s{lam}" for lam, coeff in self.items())


# =========================
# BASIS BOOKKEEPING
# =========================

def index_to_partition(index: SchubertIndex) -> Partition:
    """lambda_k = n - r + k - i_k"""
    n, r = index.n, index.r
    parts = tuple(n - r + k - i for k, i in enumerate(index.indices, start=1))
    return Partition(parts=parts, r=r, c=n - r)


def partition_to_index(lam: Partition) -> SchubertIndex:
    """Inverse of index_to_partition: i_k = n - r + k - lambda_k"""
    n, r = lam.n, lam.r
    indices = tuple(n - r + k - p for k, p in enumerate(lam.padded(), start=1))
    return SchubertIndex(indices=indices, n=n, r=r)


def make_index(indices: Sequence[int], n: int) -> SchubertIndex:
    """SchubertIndex from a plain sequence, sorting it first"""
    try:
        return SchubertIndex(indices=tuple(sorted(int(i) for i in indices)), n=n, r=len(indices))
    except ValueError as e:
        raise InputValidationError(f"invalid Schubert index {list(indices)} for n={n}: {e}") from e


def dual_index(index: SchubertIndex) -> SchubertIndex:
    """Poincare dual *I = {n + 1 - i : i in I}"""
    n = index.n
    return SchubertIndex(indices=tuple(sorted(n + 1 - i for i in index.indices)), n=n, r=index.r)


def complement(lam: Partition) -> Partition:
    """Complement of lambda in the box; labels the Poincare dual class"""
    padded = lam.padded()
    return Partition(parts=tuple(lam.c - p for p in reversed(padded)), r=lam.r, c=lam.c)


def schubert_basis(n: int, r: int) -> List[Partition]:
    """All partitions in the r x (n - r) box, by codimension then parts"""
    if not 1 <= r <= n - 1:
        raise InputValidationError(f"Gr({r},{n}) is not a proper Grassmannian")
    basis = [index_to_partition(SchubertIndex(indices=idx, n=n, r=r))
             for idx in combinations(range(1, n + 1), r)]
    return sorted(basis, key=lambda p: (p.size, p.parts))


def poincare_pairing(a: CohomologyElement, b: CohomologyElement) -> int:
    """<a, b> = sum of a_lambda * b_(complement of lambda)"""
    _same_grassmannian(a, b)
    total = 0
    for lam, coeff in a.items():
        total += coeff * b.coefficient(complement(lam))
    return _check_coefficient(total)


# =========================
# LITTLEWOOD-RICHARDSON KERNEL
# =========================

def lr_coefficient(lam: Partition, mu: Partition, nu: Partition) -> int:
    """c^nu_{lambda mu}: number of LR skew tableaux of shape nu/lambda and content mu"""
    return lr_coefficient_parts(lam.parts, mu.parts, nu.parts)


def lr_coefficient_parts(lam: Sequence[int], mu: Sequence[int], nu: Sequence[int]) -> int:
    """
    Count semistandard fillings of nu/lam with content mu whose reverse
    reading word (rows top to bottom, each row right to left) is a lattice word.
    """
    lam, mu, nu = _strip(lam), _strip(mu), _strip(nu)
    if sum(lam) + sum(mu) != sum(nu):
        return 0
    if len(lam) > len(nu) or any(lam[i] > nu[i] for i in range(len(lam))):
        return 0
    if not mu:
        return 1

    rows = len(nu)
    inner = lam + (0,) * (rows - len(lam))
    content = mu
    top = len(content)

    def fill_rows(i: int, above: Dict[int, int], counts: List[int]) -> int:
        if i == rows:
            return 1 if counts[1:] == list(content) else 0
        cells = list(range(inner[i], nu[i]))
        total = 0
        for row in _row_fillings(cells, above, counts, min(i + 1, top), content):
            after = list(counts)
            lattice = True
            for value in reversed(row):
                after[value] += 1
                if value > 1 and after[value] > after[value - 1]:
                    lattice = False
                    break
            if lattice:
                total += fill_rows(i + 1, dict(zip(cells, row)), after)
        return total

    return fill_rows(0, {}, [0] * (top + 1))


def _row_fillings(cells: List[int], above: Dict[int, int], counts: List[int],
                  max_value: int, content: Parts) -> Iterator[List[int]]:
    """Weakly increasing fillings of one row, strictly below the row above"""
    row: List[int] = []
    used = [0] * (max_value + 1)

    def extend(pos: int) -> Iterator[List[int]]:
        if pos == len(cells):
            yield list(row)
            return
        low = row[-1] if row else 1
        if cells[pos] in above:
            low = max(low, above[cells[pos]] + 1)
        for value in range(low, max_value + 1):
            if counts[value] + used[value] >= content[value - 1]:
                continue
            row.append(value)
            used[value] += 1
            yield from extend(pos + 1)
            used[value] -= 1
            row.pop()

    yield from extend(0)


def partitions_between(inner: Sequence[int], size: int, max_rows: int,
                       max_first: Optional[int] = None) -> Iterator[Parts]:
    """Partitions nu containing inner with |nu| = size, at most max_rows rows, nu_1 <= max_first"""
    inner = _strip(inner)
    if len(inner) > max_rows:
        return
    padded = inner + (0,) * (max_rows - len(inner))
    cap = size if max_first is None else max_first

    def build(i: int, prefix: List[int], remaining: int) -> Iterator[Parts]:
        if i == max_rows:
            if remaining == 0:
                yield _strip(prefix)
            return
        upper = min(prefix[-1] if prefix else cap, padded[i] + remaining)
        for value in range(upper, padded[i] - 1, -1):
            prefix.append(value)
            yield from build(i + 1, prefix, remaining - (value - padded[i]))
            prefix.pop()

    yield from build(0, [], size - sum(inner))


def classical_product_parts(lam: Sequence[int], mu: Sequence[int], max_rows: int,
                            max_first: Optional[int] = None) -> Dict[Parts, int]:
    """s_lam * s_mu restricted to partitions with at most max_rows rows (and nu_1 <= max_first)"""
    lam, mu = _strip(lam), _strip(mu)
    first = (lam[0] if lam else 0) + (mu[0] if mu else 0)
    if max_first is not None:
        first = min(first, max_first)
    product = {}
    for nu in partitions_between(lam, sum(lam) + sum(mu), max_rows, first):
        coeff = lr_coefficient_parts(lam, mu, nu)
        if coeff:
            product[nu] = _check_coefficient(coeff)
    return product


# =========================
# PRODUCTS
# =========================

def cup_product(a: CohomologyElement, b: CohomologyElement,
                cache: Optional[StructureConstantCache] = None) -> CohomologyElement:
    """Bilinear extension of sigma_lam * sigma_mu = sum c^nu_{lam mu} sigma_nu inside the box"""
    _same_grassmannian(a, b)
    cache = cache or get_default_cache()
    n, r = a.n, a.r
    terms: Dict[Parts, int] = {}
    for lam, ca in a.terms.items():
        for mu, cb in b.terms.items():
            for (_, nu), coeff in _basis_cup(lam, mu, n, r, cache).items():
                terms[nu] = _check_coefficient(terms.get(nu, 0) + ca * cb * coeff)
    return CohomologyElement(terms=terms, n=n, r=r)


def _basis_cup(lam: Parts, mu: Parts, n: int, r: int, cache: StructureConstantCache):
    cached = cache.get("cup", n, r, lam, mu)
    if cached is not None:
        return cached
    product = {(0, nu): coeff
               for nu, coeff in classical_product_parts(lam, mu, r, n - r).items()}
    cache.set("cup", n, r, lam, mu, product)
    return product


def pieri_product(lam: Partition, k: int = 1) -> CohomologyElement:
    """Classical Pieri rule: sigma_(k) * sigma_lam = sum over horizontal k-strips inside the box"""
    r, c = lam.r, lam.c
    padded = lam.padded()
    terms = {}

    def build(i: int, prefix: List[int], remaining: int):
        if i == r:
            if remaining == 0:
                terms[_strip(prefix)] = 1
            return
        # horizontal strip: lam_i <= nu_i <= lam_{i-1}
        upper = c if i == 0 else padded[i - 1]
        for value in range(padded[i], min(upper, padded[i] + remaining) + 1):
            prefix.append(value)
            build(i + 1, prefix, remaining - (value - padded[i]))
            prefix.pop()

    build(0, [], k)
    return CohomologyElement(terms=terms, n=lam.n, r=r)


# =========================
# HELPERS
# =========================

def _strip(parts: Sequence[int]) -> Parts:
    parts = list(parts)
    while parts and parts[-1] == 0:
        parts.pop()
    return tuple(parts)


def _check_coefficient(value: int) -> int:
    if abs(value) > COEFFICIENT_BOUND:
        raise CoefficientOverflowError(f"coefficient {value} exceeds the 64-bit bound")
    return value


def _same_grassmannian(a, b):
    if (a.n, a.r) != (b.n, b.r):
        raise MismatchedGrassmannianError(
            f"classes live on Gr({a.r},{a.n}) and Gr({b.r},{b.n})"
        )


if __name__ == "__main__":
    n, r = 4, 2
    s1 = CohomologyElement.basis(Partition(parts=(1,), r=r, c=n - r))
    print("Gr(2,4) basis:", [str(p) for p in schubert_basis(n, r)])
    print("s1 * s1 =", cup_product(s1, s1))
    print("dual of {1,3}:", dual_index(make_index([1, 3], n)))
