"""
Small quantum cohomology of Gr(r, n)
Location: abw_lab/grassmannian/quantum.py

No direct file output

Quantum product by rim-hook reduction, an independent quantum Pieri path,
and l-point genus-0 Gromov-Witten numbers read off iterated products.

The Novikov variable is a single degree counter q^d (c_1 of a degree-d curve
is n*d on Gr(r, n)).
"""

import sys
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

sys.path.append(str(Path(__file__).parent.parent))

from grassmannian.schubert import (
    Partition,
    SchubertIndex,
    _check_coefficient,
    _same_grassmannian,
    _strip,
    classical_product_parts,
    complement,
    index_to_partition,
    pieri_product,
)
from utils.cache_manager import StructureConstantCache, get_default_cache
from utils.errors import InputValidationError

Parts = Tuple[int, ...]
Key = Tuple[int, Parts]


# =========================
# DOMAIN TYPES
# =========================

class QuantumClass(BaseModel):
    """Integer combination of q^d * sigma_lambda on Gr(r, n)"""

    model_config = ConfigDict(frozen=True)

    n: int
    r: int
    terms: Dict[Key, int]

    @field_validator("terms")
    @classmethod
    def _clean_terms(cls, terms, info):
        if "n" not in info.data or "r" not in info.data:
            return terms
        n, r = info.data["n"], info.data["r"]
        cleaned: Dict[Key, int] = {}
        for (d, parts), coeff in terms.items():
            if d < 0:
                raise ValueError(f"negative q-degree {d}")
            lam = Partition(parts=parts, r=r, c=n - r)
            key = (d, lam.parts)
            cleaned[key] = _check_coefficient(cleaned.get(key, 0) + coeff)
        return {key: coeff for key, coeff in cleaned.items() if coeff}

    @classmethod
    def basis(cls, lam: Partition, d: int = 0) -> "QuantumClass":
        return cls(n=lam.n, r=lam.r, terms={(d, lam.parts): 1})

    @classmethod
    def from_index(cls, index: SchubertIndex) -> "QuantumClass":
        return cls.basis(index_to_partition(index))

    @classmethod
    def unit(cls, n: int, r: int) -> "QuantumClass":
        return cls(n=n, r=r, terms={(0, ()): 1})

    def coefficient(self, lam: Partition, d: int = 0) -> int:
        return self.terms.get((d, lam.parts), 0)

    def degree_part(self, d: int) -> Dict[Parts, int]:
        """The q^d component as a partition -> coefficient map"""
        return {parts: coeff for (deg, parts), coeff in self.terms.items() if deg == d}

    def gradings(self) -> List[int]:
        """Sorted distinct values of |lambda| + n*d over the terms"""
        return sorted({sum(parts) + self.n * d for d, parts in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.gradings()) <= 1

    def items(self) -> Iterator[Tuple[int, Partition, int]]:
        c = self.n - self.r
        for d, parts in sorted(self.terms, key=lambda k: (k[0], sum(k[1]), k[1])):
            yield d, Partition(parts=parts, r=self.r, c=c), self.terms[(d, parts)]

    def __add__(self, other: "QuantumClass") -> "QuantumClass":
        _same_grassmannian(self, other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = _check_coefficient(terms.get(key, 0) + coeff)
        return QuantumClass(n=self.n, r=self.r, terms=terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for d, lam, coeff in self.items():
            q = "" if d == 0 else ("q*" if d == 1 else f"q^{d}*")
            pieces.append(f"{coeff}*{q}s{lam}")
        return " + ".join(pieces)


class GwQuery(BaseModel):
    """An l-point Gromov-Witten number (sigma_I1, ..., sigma_Il)_d"""

    model_config = ConfigDict(frozen=True)

    classes: Tuple[SchubertIndex, ...]
    d: int

    @model_validator(mode="after")
    def _shared_grassmannian(self):
        if self.d < 0:
            raise ValueError(f"negative degree {self.d}")
        if self.classes and len({(c.n, c.r) for c in self.classes}) > 1:
            raise ValueError("classes come from different Grassmannians")
        return self

    @property
    def n(self) -> int:
        return self.classes[0].n

    @property
    def r(self) -> int:
        return self.classes[0].r

    def codimensions(self) -> List[int]:
        return [index_to_partition(c).size for c in self.classes]

    def expected_total(self) -> int:
        """r(n - r) + n*d: the total codimension a nonzero invariant needs"""
        return self.r * (self.n - self.r) + self.n * self.d

    def dimension_ok(self) -> bool:
        return sum(self.codimensions()) == self.expected_total()

    def audit(self) -> str:
        total = sum(self.codimensions())
        verdict = "ok" if self.dimension_ok() else "fails"
        return (f"dimension condition: sum |lambda_j| = {'+'.join(map(str, self.codimensions()))} = {total}, "
                f"r(n-r) + n*d = {self.expected_total()} -> {verdict}")


# =========================
# RIM-HOOK REDUCTION
# =========================

def rim_hook_reduce(nu: Sequence[int], n: int, r: int) -> Optional[Tuple[int, int, Parts]]:
    """
    Reduce a partition with at most r rows into the r x (n - r) box by
    removing n-rim hooks.

    Returns (sign, d, lambda) or None when the term vanishes. Works on beads
    beta_i = nu_i + (r - i): removing an n-rim hook moves one bead down by n,
    and the hook height is 1 + the number of beads jumped over. Each removed
    hook contributes (-1)^(r - height) and one power of q.
    """
    nu = _strip(nu)
    if len(nu) > r:
        return None
    padded = nu + (0,) * (r - len(nu))
    beads = [part + (r - 1 - i) for i, part in enumerate(padded)]
    if len({b % n for b in beads}) < r:
        return None

    sign, d = 1, 0
    while max(beads) >= n:
        top = max(beads)
        target = top - n
        jumped = sum(1 for b in beads if target < b < top)
        height = jumped + 1
        if (r - height) % 2:
            sign = -sign
        beads[beads.index(top)] = target
        d += 1

    beads.sort(reverse=True)
    parts = tuple(b - (r - 1 - i) for i, b in enumerate(beads))
    return sign, d, _strip(parts)


def _basis_quantum(lam: Parts, mu: Parts, n: int, r: int,
                   cache: StructureConstantCache) -> Dict[Key, int]:
    cached = cache.get("quantum", n, r, lam, mu)
    if cached is not None:
        return cached
    product: Dict[Key, int] = {}
    # classical product in r variables, no column bound
    for nu, coeff in classical_product_parts(lam, mu, r).items():
        reduced = rim_hook_reduce(nu, n, r)
        if reduced is None:
            continue
        sign, d, parts = reduced
        key = (d, parts)
        product[key] = _check_coefficient(product.get(key, 0) + sign * coeff)
    product = {key: coeff for key, coeff in product.items() if coeff}
    cache.set("quantum", n, r, lam, mu, product)
    return product


# =========================
# PRODUCTS
# =========================

def quantum_product(a: QuantumClass, b: QuantumClass,
                    cache: Optional[StructureConstantCache] = None) -> QuantumClass:
    """Bilinear quantum product; q-degrees add"""
    _same_grassmannian(a, b)
    cache = cache or get_default_cache()
    n, r = a.n, a.r
    terms: Dict[Key, int] = {}
    for (da, lam), ca in a.terms.items():
        for (db, mu), cb in b.terms.items():
            for (d, nu), coeff in _basis_quantum(lam, mu, n, r, cache).items():
                key = (da + db + d, nu)
                terms[key] = _check_coefficient(terms.get(key, 0) + ca * cb * coeff)
    return QuantumClass(n=n, r=r, terms=terms)


def quantum_pieri(a: QuantumClass) -> QuantumClass:
    """
    Multiply by sigma_(1) with the quantum Pieri rule: add one box inside the
    box, plus q * sigma_(lambda_2 - 1, ..., lambda_r - 1) when lambda_1 = n - r
    and lambda_r >= 1.
    """
    n, r = a.n, a.r
    c = n - r
    terms: Dict[Key, int] = {}
    for (d, parts), coeff in a.terms.items():
        lam = Partition(parts=parts, r=r, c=c)
        for nu, one in pieri_product(lam, 1).terms.items():
            key = (d, nu)
            terms[key] = _check_coefficient(terms.get(key, 0) + coeff * one)
        padded = lam.padded()
        if padded[0] == c and padded[-1] >= 1:
            key = (d + 1, _strip(tuple(p - 1 for p in padded[1:])))
            terms[key] = _check_coefficient(terms.get(key, 0) + coeff)
    return QuantumClass(n=n, r=r, terms=terms)


def quantum_power(a: QuantumClass, k: int) -> QuantumClass:
    """a * a * ... * a (k factors); k = 0 gives the unit"""
    if k < 0:
        raise InputValidationError(f"negative power {k}")
    result = QuantumClass.unit(a.n, a.r)
    for _ in range(k):
        result = quantum_product(result, a)
    return result


def iterated_product(classes: Sequence[QuantumClass]) -> QuantumClass:
    """Left-to-right product of a non-empty sequence of classes"""
    if not classes:
        raise InputValidationError("empty product")
    result = classes[0]
    for cls in classes[1:]:
        result = quantum_product(result, cls)
    return result


# =========================
# GROMOV-WITTEN NUMBERS
# =========================

def gw_invariant(query: GwQuery) -> int:
    """
    (sigma_I1, ..., sigma_Il)_d: coefficient of q^d * sigma_(complement of lambda_l)
    in sigma_I1 * ... * sigma_I(l-1). Zero when the dimension condition fails.
    """
    if len(query.classes) < 2:
        raise InputValidationError(f"a Gromov-Witten number needs l >= 2 classes, got {len(query.classes)}")
    if not query.dimension_ok():
        return 0
    product = iterated_product([QuantumClass.from_index(c) for c in query.classes[:-1]])
    dual = complement(index_to_partition(query.classes[-1]))
    return product.coefficient(dual, query.d)


if __name__ == "__main__":
    from grassmannian.schubert import make_index

    point = QuantumClass.basis(Partition(parts=(1,), r=1, c=1))
    print("CP^1: s1 * s1 =", quantum_product(point, point))

    top = QuantumClass.basis(Partition(parts=(2, 2), r=2, c=2))
    print("Gr(2,4): s22 * s1 =", quantum_pieri(top))

    query = GwQuery(classes=tuple(make_index([1], 2) for _ in range(3)), d=1)
    print(query.audit())
    print("(s1, s1, s1)_1 =", gw_invariant(query))
