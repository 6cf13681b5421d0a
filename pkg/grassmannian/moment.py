"""
Normalized Hamiltonian H_alpha on Gr(r, n)
Location: abw_lab/grassmannian/moment.py

No direct file output

H_alpha is generated by the circle action diag(exp(2 pi i alpha_j t)).
On an orthonormal frame B (n x r) spanning a point of Gr(r, n):

    H_alpha(B) = -sum_j alpha_j * |row_j(B)|^2

Its critical values -sum_{j in I} alpha_j sit at the coordinate planes z_I,
and the action of the constant loop at z_I capped by a degree-d sphere is
sum_{j in I} alpha_j - d. The bridge below checks that these actions add up
to the linear forms of the eigenvalue inequalities.
"""

import sys
from itertools import combinations
from multiprocessing.pool import ThreadPool
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

sys.path.append(str(Path(__file__).parent.parent))

from config import BRIDGE_TOL, FRAME_TOL, THREAD_COUNT
from grassmannian.schubert import SchubertIndex
from inequalities.abw import AbwInequality, AlcovePoint, evaluate_form
from utils.errors import InputValidationError, InternalConsistencyError

CHUNK = 4096


class Frame(BaseModel):
    """n x r matrix with orthonormal columns; its span is a point of Gr(r, n)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    columns: np.ndarray

    @field_validator("columns", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return np.array(value, dtype=complex)

    @model_validator(mode="after")
    def _orthonormal(self):
        b = self.columns
        if b.ndim != 2 or not 1 <= b.shape[1] <= b.shape[0]:
            raise ValueError(f"frame shape {b.shape} is not n x r with 1 <= r <= n")
        err = np.abs(b.conj().T @ b - np.eye(b.shape[1])).max()
        if not err <= FRAME_TOL:
            raise ValueError(f"columns not orthonormal: max |B^H B - I| = {err:.3e}")
        return self

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def r(self) -> int:
        return self.columns.shape[1]

    def row_weights(self) -> np.ndarray:
        """|row_j|^2; these sum to r"""
        return (np.abs(self.columns) ** 2).sum(axis=1)


def coordinate_frame(index: SchubertIndex) -> Frame:
    """Frame spanning {e_j : j in I}"""
    eye = np.eye(index.n, dtype=complex)
    return Frame(columns=eye[:, [i - 1 for i in index.indices]])


def haar_frame(n: int, r: int, rng: np.random.Generator) -> Frame:
    """Uniformly distributed point of Gr(r, n): QR of a complex Gaussian n x r matrix"""
    g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    q, _ = np.linalg.qr(g)
    # column phases do not change the span
    return Frame(columns=q)


def hamiltonian_value(frame: Frame, alpha: AlcovePoint) -> float:
    if frame.n != alpha.n:
        raise InputValidationError(f"frame in C^{frame.n}, class of SU({alpha.n})")
    # summed in coordinate order so coordinate frames give -sum_{j in I} alpha_j bit for bit
    return -sum(float(w) * a for w, a in zip(frame.row_weights(), alpha.alpha))


def action_value(index: SchubertIndex, d: int, alpha: AlcovePoint) -> float:
    """sum_{j in I} alpha_j - d"""
    if index.n != alpha.n:
        raise InputValidationError(f"subset of 1..{index.n}, class of SU({alpha.n})")
    return sum(alpha.alpha[i - 1] for i in index.indices) - d


def critical_values(alpha: AlcovePoint, r: int) -> Dict[Tuple[int, ...], float]:
    """-sum_{j in I} alpha_j for every r-subset I (one critical point per subset)"""
    if not 1 <= r <= alpha.n - 1:
        raise InputValidationError(f"r={r} outside 1..{alpha.n - 1}")
    return {
        subset: -sum(alpha.alpha[i - 1] for i in subset)
        for subset in combinations(range(1, alpha.n + 1), r)
    }


def _chunk_sums(weights: np.ndarray, size: int, seed_seq: np.random.SeedSequence,
                n: int, r: int) -> Tuple[float, float]:
    rng = np.random.default_rng(seed_seq)
    g = rng.standard_normal((size, n, r)) + 1j * rng.standard_normal((size, n, r))
    q, _ = np.linalg.qr(g)  # batched over the first axis
    # row weights of each frame, paired with alpha
    values = -(np.abs(q) ** 2).sum(axis=2) @ weights
    return float(values.sum()), float((values ** 2).sum())


def haar_mean_check(alpha: AlcovePoint, r: int, samples: int = 10000,
                    seed: Optional[int] = None, threads: Optional[int] = None) -> Tuple[float, float]:
    """
    Monte-Carlo mean of H_alpha over Haar-random points of Gr(r, n) and its
    standard error. The exact mean is -sum(alpha) * r / n = 0.
    """
    if samples < 100:
        raise InputValidationError(f"need at least 100 samples, got {samples}")
    if not 1 <= r <= alpha.n - 1:
        raise InputValidationError(f"r={r} outside 1..{alpha.n - 1}")
    weights = alpha.as_array()
    # fixed-size chunks, one spawned seed each; results do not depend on threads
    sizes = [CHUNK] * (samples // CHUNK) + ([samples % CHUNK] if samples % CHUNK else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))

    def run(job):
        return _chunk_sums(weights, job[0], job[1], alpha.n, r)

    threads = threads or THREAD_COUNT
    if threads > 1:
        with ThreadPool(min(threads, len(jobs))) as pool:
            sums = pool.map(run, jobs)
    else:
        sums = [run(job) for job in jobs]

    # pooled first and second moments
    total = sum(s for s, _ in sums)
    squares = sum(q for _, q in sums)
    mean = total / samples
    variance = max(squares / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, float(np.sqrt(variance / samples))


def action_inequality_bridge(ineq: AbwInequality, zeta: Sequence[AlcovePoint]) -> float:
    """
    The bound sum_j sum_{i in I_j} zeta^j_i - d three ways: summed action
    values, minus the critical values of H at the coordinate frames, and the
    inequality's linear form. They must agree to BRIDGE_TOL.
    """
    if len(zeta) != ineq.l:
        raise InputValidationError(f"{len(zeta)} classes for an inequality with l={ineq.l}")
    by_actions = sum(action_value(s, 0, z) for s, z in zip(ineq.subsets, zeta)) - ineq.d
    by_hamiltonian = -sum(hamiltonian_value(coordinate_frame(s), z)
                          for s, z in zip(ineq.subsets, zeta)) - ineq.d
    by_form = evaluate_form(ineq, zeta)

    spread = max(by_actions, by_hamiltonian, by_form) - min(by_actions, by_hamiltonian, by_form)
    if spread > BRIDGE_TOL:
        raise InternalConsistencyError(
            f"action bound disagrees for {ineq.describe()}: "
            f"actions {by_actions!r}, hamiltonian {by_hamiltonian!r}, form {by_form!r}"
        )
    return by_form


if __name__ == "__main__":
    from grassmannian.schubert import make_index

    alpha = AlcovePoint(alpha=(0.3, 0.1, -0.1, -0.3))
    print("H at z_{1,2}:", hamiltonian_value(coordinate_frame(make_index([1, 2], 4)), alpha))
    mean, stderr = haar_mean_check(alpha, 2, samples=10000, seed=1)
    print(f"Haar mean {mean:.5f} +- {stderr:.5f}")
