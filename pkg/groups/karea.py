"""
K-area versus distance on the cylinder
Location: abw_lab/groups/karea.py

No direct file output (reports are returned; the CLI prints/writes them)

Lattice connections on [0, 1] x S^1 with structure group SU(n).

Lattice layout (S cells along s, T cells around the circle):
- vertex (i, k), i = 0..S, k = 0..T-1
- s_edges[i, k]: parallel transport (i, k) -> (i+1, k), shape (S, T, n, n)
- t_edges[i, k]: parallel transport (i, k) -> (i, k+1 mod T), shape (S+1, T, n, n)
- plaquette (i, k): s_edges[i, k] t_edges[i+1, k] s_edges[i, k+1]^H t_edges[i, k]^H

The curvature norm is the largest principal eigenangle of a plaquette per
unit area. A path a(s) gives a connection whose curvature is at most
(1 + eps) times its coarse length; the holonomies around the circles of a
connection give back a path whose coarse length is at most the curvature.
"""

import sys
from itertools import permutations
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

sys.path.append(str(Path(__file__).parent.parent))

from config import (
    BRANCH_CUT_TURNS,
    DEFAULT_EPSILON,
    DEFAULT_MESH,
    DEFAULT_SEED,
    KAREA_RATIO_BOUND,
    MIN_MESH,
    UNITARITY_TOL,
    VERBOSE,
)
from groups.unitary import (
    GroupPath,
    haar_array,
    increment_norms,
    minimal_lift,
    principal_generator,
    principal_power,
    random_hermitian,
    sample_path,
    torus_geodesic,
    upsilon_two,
)
from inequalities.abw import AlcovePoint, inverse_alcove
from utils.errors import DegenerateSamplingError, InputValidationError, PlaquetteBranchError

TWO_PI = 2.0 * np.pi


def _dagger(stack: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(stack, -1, -2))


def _unitarity_error(stack: np.ndarray) -> float:
    n = stack.shape[-1]
    return float(np.abs(_dagger(stack) @ stack - np.eye(n)).max())


# =========================
# DOMAIN TYPES
# =========================

class LatticeConnection(BaseModel):
    """Edge transports of an S x T lattice on the cylinder; cell_area = area / (S T)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s_edges: np.ndarray
    t_edges: np.ndarray
    area: float = 1.0

    @field_validator("s_edges", "t_edges", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return np.array(value, dtype=complex)

    @model_validator(mode="after")
    def _consistent(self):
        s, t = self.s_edges, self.t_edges
        if s.ndim != 4 or t.ndim != 4:
            raise ValueError("edge arrays must have shape (rows, T, n, n)")
        S, T, n, _ = s.shape
        if t.shape != (S + 1, T, n, n):
            raise ValueError(f"t_edges shape {t.shape} does not match s_edges {s.shape}")
        if self.area <= 0:
            raise ValueError(f"area must be positive, got {self.area}")
        err = max(_unitarity_error(s), _unitarity_error(t))
        if not err <= UNITARITY_TOL:
            raise ValueError(f"edge not unitary: max |U^H U - I| = {err:.3e}")
        return self

    @classmethod
    def flat(cls, n: int, S: int, T: int, area: float = 1.0) -> "LatticeConnection":
        """Trivial connection: every edge is the identity"""
        eye = np.broadcast_to(np.eye(n, dtype=complex), (S + 1, T, n, n))
        return cls(s_edges=eye[:S].copy(), t_edges=eye.copy(), area=area)

    @property
    def shape(self):
        S, T, n, _ = self.s_edges.shape
        return S, T, n

    @property
    def cell_area(self) -> float:
        S, T, _ = self.shape
        return self.area / (S * T)


class CutoffProfile(BaseModel):
    """Samples psi(k / T), k = 0..T-1, of a monotone cut-off with psi = 1 near 0 and 0 near 1"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: float
    values: np.ndarray
    slope_bound: float

    @field_validator("values", mode="before")
    @classmethod
    def _as_floats(cls, value):
        return np.array(value, dtype=float)

    @model_validator(mode="after")
    def _monotone(self):
        v = self.values
        if v.ndim != 1 or len(v) < 2:
            raise ValueError("a cut-off needs at least two samples")
        if v[0] != 1.0:
            raise ValueError(f"psi(0) must be 1, got {v[0]}")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("psi leaves [0, 1]")
        drops = -np.diff(np.append(v, 0.0))
        if np.any(drops < -1e-15):
            raise ValueError("psi is not non-increasing")
        if drops.max() * len(v) > self.slope_bound + 1e-12:
            raise ValueError(f"discrete slope {drops.max() * len(v):.6f} above bound {self.slope_bound}")
        if self.slope_bound > 1.0 + self.epsilon + 1e-12:
            raise ValueError(f"slope bound {self.slope_bound} above 1 + epsilon")
        return self

    @property
    def T(self) -> int:
        return len(self.values)

    def drops(self) -> np.ndarray:
        """psi_k - psi_(k+1) with psi_T = 0"""
        return -np.diff(np.append(self.values, 0.0))


def build_cutoff(epsilon: float, T: int) -> CutoffProfile:
    """
    Linear ramp from 1 at t = delta to 0 at t = 1 - delta, delta = eps / (2 (1 + eps)),
    flat outside; slope exactly 1 + eps on the ramp.
    """
    if epsilon < 0:
        raise InputValidationError(f"epsilon must be non-negative, got {epsilon}")
    if T < 2:
        raise InputValidationError(f"need at least two samples, got T={T}")
    delta = epsilon / (2.0 * (1.0 + epsilon))
    t = np.arange(T) / T
    values = np.clip((1.0 - delta - t) * (1.0 + epsilon), 0.0, 1.0)
    values[0] = 1.0
    return CutoffProfile(epsilon=epsilon, values=values, slope_bound=1.0 + epsilon)


# =========================
# PATH NORMS
# =========================

def coarse_length(a: GroupPath) -> float:
    """Largest speed max_j rho(a_j, a_(j+1)) / (s_(j+1) - s_j)"""
    if len(a) < 2:
        raise DegenerateSamplingError(f"coarse length needs at least two samples, got {len(a)}")
    steps = np.diff(a.params)
    if np.any(steps <= 0):
        raise DegenerateSamplingError("path parameters are not strictly increasing")
    return float((increment_norms(a) / steps).max())


def reparameterize_arc(a: GroupPath, samples: Optional[int] = None) -> GroupPath:
    """
    Resample at equal increments of length so the speed is constant; the
    coarse length of the result then matches its length. A path of zero
    length comes back unchanged.
    """
    if len(a) < 2:
        raise DegenerateSamplingError(f"cannot reparameterize a path with {len(a)} samples")
    norms = increment_norms(a)
    total = float(norms.sum())
    if total <= 1e-15:
        return a
    K = samples or (len(a) - 1)
    arc = np.concatenate([[0.0], np.cumsum(norms)])
    # walk the arc-length parameterization; zero-length segments are skipped
    keep = np.concatenate([[True], norms > 0])
    arc_path = GroupPath(matrices=a.matrices[keep], params=arc[keep])
    targets = np.linspace(0.0, total, K + 1)
    matrices = sample_path(arc_path, targets)
    return GroupPath(matrices=matrices, params=np.linspace(0.0, 1.0, K + 1))


# =========================
# CONNECTIONS
# =========================

def _check_mesh(S: int, T: int):
    if S < MIN_MESH or T < MIN_MESH:
        raise InputValidationError(f"mesh {S}x{T} is coarser than {MIN_MESH}x{MIN_MESH}")


def connection_from_path(a: GroupPath, psi: CutoffProfile, S: int, T: int,
                         area: float = 1.0) -> LatticeConnection:
    """
    Discretize the connection whose horizontal lift along s is psi(t) a'(s).

    The path is resampled at s_i = i / S; with L_i = log(a_i^-1 a_(i+1)) the
    s-edges are exp(psi_k L_i), the t-edges are identities except the gluing
    edge (k = T-1 -> 0) which carries a(s_i). Since psi_0 = 1, the column
    holonomy at s_i is a(s_i).
    """
    _check_mesh(S, T)
    if psi.T != T:
        raise InputValidationError(f"cut-off has {psi.T} samples, mesh needs T={T}")
    if len(a) < 2:
        raise DegenerateSamplingError("need at least two path samples")
    p = a.params
    targets = p[0] + (p[-1] - p[0]) * np.arange(S + 1) / S
    points = sample_path(a, targets)
    n = a.n

    s_edges = np.empty((S, T, n, n), dtype=complex)
    for i in range(S):
        # L_i = z diag(i phi) z^H
        z, phi = principal_generator(points[i].conj().T @ points[i + 1])
        # row k of the strip scales L_i by psi_k
        phases = np.exp(1j * psi.values[:, None] * phi[None, :])
        s_edges[i] = (z[None] * phases[:, None, :]) @ z.conj().T

    t_edges = np.broadcast_to(np.eye(n, dtype=complex), (S + 1, T, n, n)).copy()
    # gluing edge only
    t_edges[:, T - 1] = points
    return LatticeConnection(s_edges=s_edges, t_edges=t_edges, area=area)


def plaquette_holonomies(c: LatticeConnection) -> np.ndarray:
    """Holonomy around every cell, shape (S, T, n, n)"""
    s, t = c.s_edges, c.t_edges
    s_next = np.roll(s, -1, axis=1)  # k + 1 wraps to 0
    return s @ t[1:] @ _dagger(s_next) @ _dagger(t[:-1])


def curvature_norm(c: LatticeConnection) -> float:
    """max over plaquettes of |principal eigenangle| / cell_area"""
    # turns, per eigenvalue of every plaquette: shape (S, T, n)
    angles = np.abs(np.angle(np.linalg.eigvals(plaquette_holonomies(c)))) / TWO_PI
    worst = float(angles.max())
    if worst >= BRANCH_CUT_TURNS:
        i, k = np.unravel_index(int(np.argmax(angles.max(axis=-1))), angles.shape[:2])
        raise PlaquetteBranchError(
            f"plaquette ({i}, {k}) holonomy angle {worst:.3f} turns is too close to the log branch cut; refine the mesh",
            residual=worst,
        )
    return worst / c.cell_area


def column_holonomies(c: LatticeConnection) -> np.ndarray:
    """t_edges[i, 0] ... t_edges[i, T-1] for every column, shape (S+1, n, n)"""
    t = c.t_edges
    total = np.broadcast_to(np.eye(t.shape[-1], dtype=complex), (t.shape[0],) + t.shape[2:]).copy()
    # all columns at once, walking once around the circle
    for k in range(t.shape[1]):
        total = total @ t[:, k]
    return total


def holonomy_path_extract(c: LatticeConnection) -> GroupPath:
    """
    Path s_i -> holonomy of the circle at s_i, based at vertex (0, 0) by
    transporting along the bottom row: a(i) = p(i) H(i) p(i)^-1 with
    p(i) = s_edges[0, 0] ... s_edges[i-1, 0].
    """
    S, _, n = c.shape
    transports = np.empty((S + 1, n, n), dtype=complex)
    transports[0] = np.eye(n)
    # bottom row k = 0
    for i in range(S):
        transports[i + 1] = transports[i] @ c.s_edges[i, 0]
    loops = transports @ column_holonomies(c) @ _dagger(transports)
    return GroupPath(matrices=loops, params=np.linspace(0.0, 1.0, S + 1))


def gauge_transform(c: LatticeConnection, g: np.ndarray) -> LatticeConnection:
    """Vertex-wise change of frame: U(x -> y) becomes g(x) U g(y)^H; g has shape (S+1, T, n, n)"""
    S, T, n = c.shape
    g = np.asarray(g, dtype=complex)
    if g.shape != (S + 1, T, n, n):
        raise InputValidationError(f"gauge shape {g.shape}, expected {(S + 1, T, n, n)}")
    s_edges = g[:-1] @ c.s_edges @ _dagger(g[1:])
    t_edges = g @ c.t_edges @ _dagger(np.roll(g, -1, axis=1))
    return LatticeConnection(s_edges=s_edges, t_edges=t_edges, area=c.area)


def _expi_traceless(h: np.ndarray) -> np.ndarray:
    """exp(i H) for a stack of Hermitian matrices, projected to trace zero"""
    n = h.shape[-1]
    h = h - (np.trace(h, axis1=-2, axis2=-1) / n)[..., None, None] * np.eye(n)
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * w)[..., None, :]) @ _dagger(q)


def random_connection(n: int, S: int, T: int, scale: float = 0.01,
                      seed: Optional[int] = None, area: float = 1.0) -> LatticeConnection:
    """Every edge exp(i * scale * H) with H Gaussian Hermitian; small scale keeps curvature small"""
    _check_mesh(S, T)
    rng = np.random.default_rng(seed)

    def edges(rows: int) -> np.ndarray:
        g = rng.standard_normal((rows, T, n, n)) + 1j * rng.standard_normal((rows, T, n, n))
        return _expi_traceless(0.5 * scale * (g + _dagger(g)))

    return LatticeConnection(s_edges=edges(S), t_edges=edges(S + 1), area=area)


def random_gauge(n: int, S: int, T: int, seed: Optional[int] = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.stack([np.stack([haar_array(n, rng) for _ in range(T)]) for _ in range(S + 1)])


# =========================
# DUALITY CHECK
# =========================

class KareaReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    mesh: int
    epsilon: float
    curvature_min: float
    distance: float
    ratio: float
    converged: bool
    gap: float
    candidates: int


def _candidate_paths(z1: AlcovePoint, z2: AlcovePoint, samples: int, budget: int,
                     rng: np.random.Generator) -> List[GroupPath]:
    """
    Paths from C_1^-1 to C_2: torus geodesics for every alignment of the two
    diagonals, then perturbations (sin(pi s) bumps, geodesics from a rotated
    start) until the budget is used.
    """
    start = inverse_alcove(z1).as_array()
    end = z2.as_array()
    n = z1.n
    geodesics = []
    for perm in permutations(range(n)):
        a = start[list(perm)]
        geodesics.append(torus_geodesic(a, a + minimal_lift(end - a), samples))
    geodesics.sort(key=lambda path: float(increment_norms(path).sum()))
    candidates = geodesics[:budget]

    s = np.linspace(0.0, 1.0, samples + 1)
    while len(candidates) < budget:
        base = geodesics[len(candidates) % len(geodesics)]
        # odd slots bump a geodesic, even slots restart from a conjugated endpoint
        if len(candidates) % 2:
            h = random_hermitian(n, rng) * rng.uniform(0.05, 0.5)
            bumps = _expi_traceless(np.sin(np.pi * s)[:, None, None] * h[None])
            candidates.append(GroupPath(matrices=base.matrices @ bumps, params=s))
        else:
            v = haar_array(n, rng)
            a0 = v @ base.matrices[0] @ v.conj().T
            z, phi = principal_generator(a0.conj().T @ base.matrices[-1])
            matrices = np.stack([a0 @ principal_power(z, phi, f) for f in s])
            candidates.append(GroupPath(matrices=matrices, params=s))
    return candidates


def karea_duality_check(z1: AlcovePoint, z2: AlcovePoint, mesh: int = DEFAULT_MESH,
                        epsilon: float = DEFAULT_EPSILON, budget: int = 8,
                        seed: int = DEFAULT_SEED) -> KareaReport:
    """
    Minimize the curvature norm over connections built from candidate paths
    with boundary holonomies in C_1^-1 and C_2, and compare the minimum with
    Upsilon_2(C_1, C_2) = rho(C_1^-1, C_2). Ratio 1 when both are below 1e-6.
    """
    if z1.n != 2 or z2.n != 2:
        raise InputValidationError("the duality check runs on SU(2) classes")
    _check_mesh(mesh, mesh)
    if budget < 1:
        raise InputValidationError(f"budget must be positive, got {budget}")
    rng = np.random.default_rng(seed)
    psi = build_cutoff(epsilon, mesh)

    best = np.inf
    candidates = _candidate_paths(z1, z2, mesh, budget, rng)
    for path in candidates:
        best = min(best, curvature_norm(connection_from_path(path, psi, mesh, mesh)))

    distance = upsilon_two(z1, z2)
    if best < 1e-6 and distance < 1e-6:
        ratio = 1.0
    elif distance < 1e-6:
        ratio = float("inf")
    else:
        ratio = best / distance
    converged = 1.0 / KAREA_RATIO_BOUND <= ratio <= KAREA_RATIO_BOUND
    if VERBOSE:
        print(f" K-area check: curvature {best:.6f} vs distance {distance:.6f} (ratio {ratio:.4f})")
    return KareaReport(mesh=mesh, epsilon=epsilon, curvature_min=float(best), distance=distance,
                       ratio=ratio, converged=converged, gap=float(best - distance),
                       candidates=len(candidates))


if __name__ == "__main__":
    from inequalities.abw import su2_class

    report = karea_duality_check(su2_class(0.1), su2_class(0.3), mesh=64, budget=4)
    print(report.model_dump_json(indent=2))
