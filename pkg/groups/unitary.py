"""
SU(n) numeric laboratory
Location: abw_lab/groups/unitary.py

SAVES IT TO (write_upsilon_report only):
File: caller-supplied CSV path

Conjugacy classes, Haar sampling, the bi-invariant operator-norm Finsler
distance and a multistart estimator for

    Upsilon_l(C_1, ..., C_l) = inf over phi_i in C_i of rho(Id, phi_1 ... phi_l)

Distances are in alcove units (full turns): the norm of a generator with
eigenvalues 2 pi i x_j is max_j |x_j|.
"""

import sys
from functools import lru_cache
from itertools import permutations, product
from multiprocessing.pool import ThreadPool
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.linalg import LinAlgError, qr, schur

sys.path.append(str(Path(__file__).parent.parent))

from config import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_STARTS,
    DETERMINANT_TOL,
    EIGEN_MAX_ITER,
    EIGEN_RESIDUAL_TOL,
    INITIAL_STEP,
    MIN_STEP,
    NORMALITY_TOL,
    STEP_GROW,
    STEP_SHRINK,
    THREAD_COUNT,
    UNITARITY_TOL,
    VERBOSE,
)
from inequalities.abw import AlcovePoint, alcove_from_angles, inverse_alcove, shared_n
from utils.errors import InputValidationError, NumericConvergenceError

TWO_PI = 2.0 * np.pi
LIFT_WINDOW = 2


# =========================
# DOMAIN TYPES
# =========================

class UnitaryMatrix(BaseModel):
    """An element of SU(n)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return np.array(value, dtype=complex)

    @model_validator(mode="after")
    def _special_unitary(self):
        u = self.entries
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {u.shape}")
        err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
        if not err <= UNITARITY_TOL:
            raise ValueError(f"not unitary: max |U^H U - I| = {err:.3e}")
        det_err = abs(np.linalg.det(u) - 1.0)
        if not det_err <= DETERMINANT_TOL:
            raise ValueError(f"determinant off by {det_err:.3e}")
        return self

    @classmethod
    def identity(cls, n: int) -> "UnitaryMatrix":
        return cls(entries=np.eye(n))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def inverse(self) -> "UnitaryMatrix":
        return UnitaryMatrix(entries=self.entries.conj().T)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        return UnitaryMatrix(entries=self.entries @ other.entries)


class GroupPath(BaseModel):
    """Samples a(s_0), ..., a(s_K) of a path in SU(n); matrices has shape (K+1, n, n)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrices: np.ndarray
    params: np.ndarray

    @field_validator("matrices", mode="before")
    @classmethod
    def _as_stack(cls, value):
        return np.array(value, dtype=complex)

    @field_validator("params", mode="before")
    @classmethod
    def _as_params(cls, value):
        return np.array(value, dtype=float)

    @model_validator(mode="after")
    def _shapes(self):
        m = self.matrices
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValueError(f"expected a (K+1, n, n) stack, got shape {m.shape}")
        if self.params.shape != (m.shape[0],):
            raise ValueError(f"{len(self.params)} parameters for {m.shape[0]} samples")
        if len(m):
            eye = np.eye(m.shape[1])
            err = np.abs(np.conj(np.swapaxes(m, 1, 2)) @ m - eye).max()
            if not err <= UNITARITY_TOL:
                raise ValueError(f"sample not unitary: max |U^H U - I| = {err:.3e}")
        return self

    @classmethod
    def from_matrices(cls, matrices: Sequence[np.ndarray],
                      params: Optional[Sequence[float]] = None) -> "GroupPath":
        """Path from samples; parameters default to a uniform grid on [0, 1]"""
        if not len(matrices):
            raise InputValidationError("a path needs at least one sample")
        if params is None:
            params = np.linspace(0.0, 1.0, len(matrices))
        return cls(matrices=np.stack([np.asarray(m) for m in matrices]), params=params)

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def at(self, j: int) -> UnitaryMatrix:
        return UnitaryMatrix(entries=self.matrices[j])

    def start(self) -> UnitaryMatrix:
        return self.at(0)

    def end(self) -> UnitaryMatrix:
        return self.at(-1)


# =========================
# EIGENANGLES
# =========================

def _quadratic_roots(coeffs: np.ndarray) -> np.ndarray:
    _, b, c = coeffs
    root = np.sqrt(b * b - 4.0 * c + 0j)
    # pick the sign that avoids cancellation
    q = -0.5 * (b + root if abs(b + root) >= abs(b - root) else b - root)
    if q == 0:
        return np.zeros(2, dtype=complex)
    return np.array([q, c / q])


def _durand_kerner(coeffs: np.ndarray) -> Tuple[np.ndarray, float]:
    """Simultaneous root iteration; returns unit-circle roots and max |p/p'|"""
    n = len(coeffs) - 1
    # powers of a point off the unit circle and off the real axis
    z = (0.4 + 0.9j) ** np.arange(n)
    for _ in range(EIGEN_MAX_ITER):
        # Weierstrass correction: p(z_j) / prod_{k != j} (z_j - z_k)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        delta = np.polyval(coeffs, z) / diff.prod(axis=1)
        z = z - delta
        if not np.all(np.isfinite(z)):
            break
        if np.abs(delta).max() < 1e-15:
            break
    # eigenvalues of a unitary matrix lie on the circle
    z = z / np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        residual = np.abs(np.polyval(coeffs, z) / np.polyval(np.polyder(coeffs), z)).max()
    return z, float(residual)


def _schur_eigenvalues(u: np.ndarray) -> np.ndarray:
    try:
        t, _ = schur(u, output="complex")
    except (ValueError, LinAlgError) as e:
        raise NumericConvergenceError(f"Schur fallback failed: {e}") from e
    off = np.abs(np.triu(t, 1)).max() if len(t) > 1 else 0.0
    if not off <= NORMALITY_TOL:
        raise NumericConvergenceError("eigenvalues did not converge", residual=float(off))
    return np.diag(t)


def eigenangles(u: np.ndarray) -> np.ndarray:
    """
    theta_j in (-1/2, 1/2] with eigenvalues exp(2 pi i theta_j).

    Roots of the characteristic polynomial: closed form for n = 2, Durand-Kerner
    otherwise, projected to the unit circle. Falls back to a complex Schur form
    when the root residual exceeds the tolerance (multiple roots do this).
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if n == 1:
        return np.array([np.angle(u[0, 0]) / TWO_PI])
    # det(z I - U), highest degree first
    coeffs = np.poly(u)
    if n == 2:
        roots = _quadratic_roots(coeffs)
        if np.all(np.isfinite(roots)) and np.all(roots != 0):
            roots = roots / np.abs(roots)
        else:
            roots = _schur_eigenvalues(u)
    else:
        roots, residual = _durand_kerner(coeffs)
        if not (np.isfinite(residual) and residual <= EIGEN_RESIDUAL_TOL):
            roots = _schur_eigenvalues(u)
    theta = np.angle(roots) / TWO_PI
    theta[theta <= -0.5] += 1.0
    return theta


def alcove_of(u: UnitaryMatrix) -> AlcovePoint:
    """Alcove point labeling the conjugacy class of U"""
    return alcove_from_angles(eigenangles(u.entries))


# =========================
# SAMPLING AND REPRESENTATIVES
# =========================

def haar_array(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    # rescale into SU(n)
    phase = np.angle(np.linalg.det(q))
    return q * np.exp(-1j * phase / n)


def haar_sample(n: int, seed: Optional[int] = None,
                rng: Optional[np.random.Generator] = None) -> UnitaryMatrix:
    """Haar-random element of SU(n); reproducible for a fixed seed"""
    rng = rng if rng is not None else np.random.default_rng(seed)
    return UnitaryMatrix(entries=haar_array(n, rng))


def _conjugate(v: np.ndarray, diagonal: np.ndarray) -> np.ndarray:
    return (v * diagonal) @ v.conj().T


def class_representative(alpha: AlcovePoint, conjugator: Optional[np.ndarray] = None,
                         seed: Optional[int] = None) -> UnitaryMatrix:
    """V diag(exp(2 pi i alpha_j)) V^H for the given V (any unitary) or a Haar-random one"""
    if conjugator is None:
        conjugator = haar_array(alpha.n, np.random.default_rng(seed))
    v = np.asarray(conjugator, dtype=complex)
    if v.shape != (alpha.n, alpha.n):
        raise InputValidationError(f"conjugator shape {v.shape} does not match n={alpha.n}")
    return UnitaryMatrix(entries=_conjugate(v, np.exp(2j * np.pi * alpha.as_array())))


def product_class(classes: Sequence[AlcovePoint], seed: Optional[int] = None,
                  conjugators: Optional[Sequence[np.ndarray]] = None) -> AlcovePoint:
    """
    Class of (phi_1 ... phi_k)^-1 for representatives phi_i of the inputs, so
    that the inputs together with the result lie in Delta_(k+1).
    """
    n = shared_n(classes)
    rng = np.random.default_rng(seed)
    if conjugators is not None and len(conjugators) != len(classes):
        raise InputValidationError(f"{len(conjugators)} conjugators for {len(classes)} classes")
    total = np.eye(n, dtype=complex)
    for k, alpha in enumerate(classes):
        v = conjugators[k] if conjugators is not None else haar_array(n, rng)
        total = total @ _conjugate(np.asarray(v, dtype=complex), np.exp(2j * np.pi * alpha.as_array()))
    return alcove_from_angles(eigenangles(total.conj().T))


# =========================
# FINSLER DISTANCE
# =========================

@lru_cache(maxsize=None)
def _lift_table(n: int, total: int) -> np.ndarray:
    """Integer shifts k in {-2..2}^n with sum k = total"""
    rows = [k for k in product(range(-LIFT_WINDOW, LIFT_WINDOW + 1), repeat=n) if sum(k) == total]
    if not rows:
        raise InputValidationError(f"no integer lift for n={n} with shift sum {total}")
    return np.array(rows, dtype=float)


def minimal_lift(theta: Sequence[float]) -> np.ndarray:
    """theta + k minimizing max |theta_j + k_j| subject to sum (theta + k) = 0"""
    theta = np.asarray(theta, dtype=float)
    shifts = _lift_table(len(theta), -int(round(float(theta.sum()))))
    norms = np.abs(theta[None, :] + shifts).max(axis=1)
    return theta + shifts[int(np.argmin(norms))]


def lift_distance(theta: Sequence[float]) -> float:
    """Norm of the shortest one-parameter subgroup reaching exp(2 pi i theta)"""
    theta = np.asarray(theta, dtype=float)
    shifts = _lift_table(len(theta), -int(round(float(theta.sum()))))
    return float(np.abs(theta[None, :] + shifts).max(axis=1).min())


def _distance_raw(u: np.ndarray) -> float:
    return lift_distance(eigenangles(u))


def finsler_distance_to_id(u: UnitaryMatrix) -> float:
    """rho(Id, U) for the bi-invariant operator-norm Finsler metric"""
    return _distance_raw(u.entries)


def class_distance(alpha: AlcovePoint, beta: AlcovePoint) -> float:
    """rho(C_alpha, C_beta): best alignment of the two classes on a shared torus"""
    if alpha.n != beta.n:
        raise InputValidationError(f"classes of different sizes {alpha.n} and {beta.n}")
    a, b = alpha.as_array(), beta.as_array()
    return min(lift_distance(b - a[list(perm)]) for perm in permutations(range(alpha.n)))


def upsilon_two(alpha: AlcovePoint, beta: AlcovePoint) -> float:
    """Upsilon_2(C_alpha, C_beta) = rho(C_alpha^-1, C_beta)"""
    return class_distance(inverse_alcove(alpha), beta)


# =========================
# UPSILON ESTIMATION
# =========================

def su2_upsilon3_closed_form(z1: float, z2: float, z3: float) -> float:
    """
    Upsilon_3 for SU(2) classes with parameters in [0, 1/2], evaluated with
    each argument in turn as the distinguished one:
    max_k max(0, z_k - min(S_k, 1 - S_k)), S_k the sum of the other two.
    """
    zeta = (z1, z2, z3)
    for z in zeta:
        if not 0.0 <= z <= 0.5:
            raise InputValidationError(f"SU(2) class parameter {z} outside [0, 1/2]")
    best = 0.0
    for k in range(3):
        rest = sum(zeta) - zeta[k]
        best = max(best, zeta[k] - min(rest, 1.0 - rest))
    return best


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (g + g.conj().T)
    return h / np.linalg.norm(h)


def _expi_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(i H) for Hermitian H"""
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * w)) @ q.conj().T


def _product(phis: Sequence[np.ndarray]) -> np.ndarray:
    total = phis[0]
    for phi in phis[1:]:
        total = total @ phi
    return total


def _initial_conjugators(n: int, l: int, start: int, aligned_starts: int,
                         rng: np.random.Generator) -> List[np.ndarray]:
    eye = np.eye(n, dtype=complex)
    if start == 0:
        return [eye.copy() for _ in range(l)]
    if start < aligned_starts:
        # permutation matrices: classes stay on the diagonal torus
        return [eye.copy()] + [eye[rng.permutation(n)] for _ in range(l - 1)]
    return [eye.copy()] + [haar_array(n, rng) for _ in range(l - 1)]


def _local_search(diagonals: List[np.ndarray], budget: int, rng: np.random.Generator,
                  start: int, aligned_starts: int) -> Tuple[float, int, List[np.ndarray], int]:
    """Adaptive random-step descent over V_2..V_l (V_1 = Id)"""
    n, l = len(diagonals[0]), len(diagonals)
    vs = _initial_conjugators(n, l, start, aligned_starts, rng)
    phis = [_conjugate(v, d) for v, d in zip(vs, diagonals)]
    best = _distance_raw(_product(phis))
    evaluations = 1
    step = INITIAL_STEP

    while evaluations < budget and step >= MIN_STEP and best > 0.0:
        i = int(rng.integers(1, l))
        trial_v = _expi_hermitian(step * random_hermitian(n, rng)) @ vs[i]
        trial_phi = _conjugate(trial_v, diagonals[i])
        value = _distance_raw(_product(phis[:i] + [trial_phi] + phis[i + 1:]))
        evaluations += 1
        if value < best:
            best = value
            vs[i], phis[i] = trial_v, trial_phi
            step = min(step * STEP_GROW, 4 * INITIAL_STEP)
        else:
            step *= STEP_SHRINK

    return best, start, phis, evaluations


def upsilon_estimate(classes: Sequence[AlcovePoint], budget: int = DEFAULT_BUDGET,
                     seed: int = DEFAULT_SEED, starts: int = DEFAULT_STARTS,
                     threads: Optional[int] = None) -> Tuple[float, List[UnitaryMatrix]]:
    """
    Upper bound for Upsilon_l by multistart local search over conjugators.

    budget counts objective evaluations over all starts. Start 0 uses
    identity conjugators, the next quarter of the starts permutation matrices,
    the rest Haar-random ones; every start draws from its own spawned seed.
    Returns the best value (ties go to the lower start index) and the witness
    phi_1, ..., phi_l.
    """
    n = shared_n(classes)
    l = len(classes)
    if l < 2:
        raise InputValidationError(f"Upsilon needs at least two classes, got {l}")
    if budget <= 0:
        raise InputValidationError(f"evaluation budget must be positive, got {budget}")
    starts = max(1, min(starts, budget))
    shares = [budget // starts + (1 if k < budget % starts else 0) for k in range(starts)]
    aligned = max(1, starts // 4)
    diagonals = [np.exp(2j * np.pi * c.as_array()) for c in classes]
    children = np.random.SeedSequence(seed).spawn(starts)

    def run(k: int):
        return _local_search(diagonals, shares[k], np.random.default_rng(children[k]), k, aligned)

    threads = threads or THREAD_COUNT
    if threads > 1:
        with ThreadPool(min(threads, starts)) as pool:
            results = pool.map(run, range(starts))
    else:
        results = [run(k) for k in range(starts)]

    value, best_start, phis, _ = min(results, key=lambda res: (res[0], res[1]))
    if VERBOSE:
        used = sum(res[3] for res in results)
        print(f" Upsilon estimate {value:.6f} ({used} evaluations, best start {best_start})")
    return value, [UnitaryMatrix(entries=phi) for phi in phis]


# =========================
# PATHS
# =========================

def torus_geodesic(start_angles: Sequence[float], end_angles: Sequence[float], samples: int = 100,
                   conjugator: Optional[np.ndarray] = None) -> GroupPath:
    """
    s -> V diag(exp(2 pi i ((1 - s) a + s b))) V^H on a uniform grid of
    samples + 1 points. Both angle vectors must sum to zero.
    """
    a = np.asarray(start_angles, dtype=float)
    b = np.asarray(end_angles, dtype=float)
    if a.shape != b.shape:
        raise InputValidationError(f"angle vectors of lengths {len(a)} and {len(b)}")
    if abs(a.sum()) > 1e-9 or abs(b.sum()) > 1e-9:
        raise InputValidationError("torus angles must sum to zero")
    if samples < 1:
        raise InputValidationError(f"need at least one step, got {samples}")
    n = len(a)
    v = np.eye(n, dtype=complex) if conjugator is None else np.asarray(conjugator, dtype=complex)
    s = np.linspace(0.0, 1.0, samples + 1)
    angles = (1.0 - s)[:, None] * a[None, :] + s[:, None] * b[None, :]
    diagonals = np.exp(2j * np.pi * angles)
    matrices = np.einsum("ij,kj,lj->kil", v, diagonals, v.conj())
    return GroupPath(matrices=matrices, params=s)


def principal_generator(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(Z, phi) with U = Z diag(exp(i phi)) Z^H and phi in (-pi, pi]"""
    try:
        t, z = schur(np.asarray(u, dtype=complex), output="complex")
    except (ValueError, LinAlgError) as e:
        raise NumericConvergenceError(f"Schur decomposition failed: {e}") from e
    return z, np.angle(np.diag(t))


def principal_power(z: np.ndarray, phi: np.ndarray, f: float) -> np.ndarray:
    """exp(f log U) for U = Z diag(exp(i phi)) Z^H"""
    return (z * np.exp(1j * f * phi)) @ z.conj().T


def sample_path(a: GroupPath, targets: Sequence[float]) -> np.ndarray:
    """
    Matrices at the parameter values targets, following the principal
    geodesic a_j exp(f log(a_j^-1 a_(j+1))) inside each sampled segment.
    """
    m, p = a.matrices, a.params
    if len(m) < 2:
        raise InputValidationError("need at least two samples to interpolate")
    steps = [principal_generator(m[j].conj().T @ m[j + 1]) for j in range(len(m) - 1)]
    out = np.empty((len(targets),) + m.shape[1:], dtype=complex)
    for k, s in enumerate(targets):
        j = int(np.clip(np.searchsorted(p, s, side="right") - 1, 0, len(m) - 2))
        f = float(np.clip((s - p[j]) / (p[j + 1] - p[j]), 0.0, 1.0))
        z, phi = steps[j]
        out[k] = m[j] @ principal_power(z, phi, f)
    return out


def increment_norms(a: GroupPath) -> np.ndarray:
    """rho(a_j, a_(j+1)) for consecutive samples"""
    m = a.matrices
    return np.array([_distance_raw(m[j + 1] @ m[j].conj().T) for j in range(len(m) - 1)])


def path_length(a: GroupPath) -> float:
    """Polygonal length: sum of distances between consecutive samples"""
    if len(a) < 2:
        return 0.0
    return float(increment_norms(a).sum())


def system_of_paths_from_witness(witness: Sequence[UnitaryMatrix], samples: int = 100) -> List[GroupPath]:
    """
    Paths a_1, ..., a_l with a_1(0) ... a_l(0) = Id and a_i(1) = phi_i.
    a_i is constant for i < l; a_l runs from phi_l P^-1 to phi_l along the
    shortest one-parameter subgroup, P = phi_1 ... phi_l. The total length
    equals rho(Id, P).
    """
    if len(witness) < 2:
        raise InputValidationError("a system of paths needs at least two elements")
    n = witness[0].n
    phis = [w.entries for w in witness]
    total = _product(phis)
    t, z = schur(total, output="complex")
    lifted = minimal_lift(np.angle(np.diag(t)) / TWO_PI)
    climb = torus_geodesic(np.zeros(n), lifted, samples, conjugator=z)

    start = phis[-1] @ total.conj().T
    paths = [GroupPath(matrices=np.repeat(phi[None], samples + 1, axis=0), params=climb.params)
             for phi in phis[:-1]]
    paths.append(GroupPath(matrices=start[None] @ climb.matrices, params=climb.params))
    return paths


def system_length(paths: Sequence[GroupPath]) -> float:
    return float(sum(path_length(a) for a in paths))


# =========================
# REPORTS
# =========================

def write_upsilon_report(rows: Sequence[Dict], path: str) -> pd.DataFrame:
    """CSV with one row per estimate: seed, n, l, classes, estimate, lower_bound, gap"""
    columns = ["seed", "n", "l", "classes", "estimate", "lower_bound", "gap"]
    df = pd.DataFrame(list(rows), columns=columns)
    df.to_csv(path, index=False, float_format="%.15g")
    return df


if __name__ == "__main__":
    from inequalities.abw import su2_class

    zeta = [su2_class(0.1), su2_class(0.1), su2_class(0.3)]
    value, witness = upsilon_estimate(zeta, budget=4000, starts=8)
    print(f"SU(2) (0.1, 0.1, 0.3): estimate {value:.4f}, closed form {su2_upsilon3_closed_form(0.1, 0.1, 0.3):.4f}")
    paths = system_of_paths_from_witness(witness)
    print(f"system of paths length {system_length(paths):.4f}")

    u = haar_sample(3, seed=7)
    print("alcove of a Haar sample:", alcove_of(u), "| distance to Id:", round(finsler_distance_to_id(u), 4))
