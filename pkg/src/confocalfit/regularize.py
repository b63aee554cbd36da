"""Ridge- and lasso-type regularization of orthogonal least squares.

Hyperplanes are encoded by their tangential coefficients ``u`` via
``{x : <u, x> = 1}`` (planes through the origin are unreachable in this
gauge; shift the data if needed).  The mass-weighted orthogonal residual of
such a plane,

    f(u) = sum_j m_j (<u, r_j> - 1)^2 / ||u||^2,

is minimized subject to an L1 or L2 bound on ``u``.  The hyperplanes of a
fixed residual level form a quadric in tangential coordinates; varying the
level yields a linear pencil dual to the confocal family, which is what
makes the bound's point of tangency the regularized solution.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import NoEnvelope, ZeroVector
from .geometry import Hyperplane, WeightedPointSet, _as_vector, centroid, inertia_operator
from .pencil import ConfocalPencil

SEED_ENV_VAR = "CONFOCAL_FIT_SEED"

_N_STARTS = 16
_STEP_TOL = 1e-12
_MAX_ITERS = 2000


@dataclass(frozen=True)
class CoefficientVector:
    """Tangential coefficients of the hyperplane {x : <u, x> = 1}."""

    u: np.ndarray

    def __post_init__(self) -> None:
        u = _as_vector(self.u, name="coefficients")
        if float(np.linalg.norm(u)) == 0.0:
            raise ZeroVector("coefficient vector must be nonzero")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def hyperplane(self) -> Hyperplane:
        nrm = float(np.linalg.norm(self.u))
        return Hyperplane(self.u / nrm, 1.0 / nrm)


@dataclass(frozen=True)
class DualQuadric:
    """Homogeneous tangential form of one residual level.

    A hyperplane ``{x : <v, x> = c}`` has hyperplanar moment equal to
    ``moment`` exactly when its tangential coordinates ``t = (v, c)``
    annihilate the symmetric (k+1)-form ``matrix``.
    """

    matrix: np.ndarray
    moment: float

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def residual(self, plane: Hyperplane | CoefficientVector) -> float:
        """Scale-free violation |t^T M t| / (||M|| ||t||^2)."""
        if isinstance(plane, CoefficientVector):
            t = np.append(plane.u, 1.0)
        else:
            t = np.append(plane.normal, plane.offset)
        raw = float(t @ self.matrix @ t)
        return abs(raw) / (float(np.linalg.norm(self.matrix)) * float(t @ t))


@dataclass(frozen=True)
class RegularizedFit:
    """Solution of a bounded-coefficient orthogonal regression."""

    coefficients: CoefficientVector
    moment: float
    norm: str
    bound: float
    active: bool
    zero_coordinates: tuple[int, ...]


def moment_of_coefficients(ps: WeightedPointSet, u: CoefficientVector) -> float:
    """Hyperplanar moment of the plane {x : <u, x> = 1}."""
    r = ps.coords @ u.u - 1.0
    return float(ps.masses @ (r * r) / (u.u @ u.u))


def dual_quadric(pencil: ConfocalPencil, j_pi: float) -> DualQuadric:
    """Tangential form of the envelope at moment level ``j_pi``.

    In the centered principal frame a plane ``<v~, x~> = c~`` is tangent to
    the envelope iff ``sum_i sigma_i v~_i^2 = c~^2`` with
    ``sigma_i = (j_pi - J_i)/m``; this is homogenized and pushed back to the
    original frame.  Raises ``NoEnvelope`` below the attainable minimum.
    """
    J = pencil.principal_moments
    j_pi = float(j_pi)
    if j_pi < J[0] - 1e-12 * max(float(J[-1]), abs(j_pi)):
        raise NoEnvelope("no hyperplane attains a moment below J_1")
    sigma = (j_pi - J) / pencil.mass
    frame = pencil.frame
    c = pencil.center
    k = pencil.dim
    top = (frame * sigma) @ frame.T - np.outer(c, c)
    m = np.zeros((k + 1, k + 1))
    m[:k, :k] = top
    m[:k, k] = c
    m[k, :k] = c
    m[k, k] = -1.0
    return DualQuadric(m, j_pi)


# ---------------------------------------------------------------------------
# Projections onto norm balls
# ---------------------------------------------------------------------------

def project_l2_ball(u: np.ndarray, bound: float) -> np.ndarray:
    nrm = float(np.linalg.norm(u))
    return u if nrm <= bound else u * (bound / nrm)


def project_l1_ball(u: np.ndarray, bound: float) -> np.ndarray:
    """Euclidean projection onto {||u||_1 <= bound} via simplex projection."""
    if float(np.abs(u).sum()) <= bound:
        return u
    w = np.sort(np.abs(u))[::-1]
    cumulative = np.cumsum(w)
    idx = np.arange(1, u.size + 1)
    rho = int(np.max(np.flatnonzero(w - (cumulative - bound) / idx > 0))) + 1
    theta = (cumulative[rho - 1] - bound) / rho
    return np.sign(u) * np.maximum(np.abs(u) - theta, 0.0)


def _objective_pieces(ps: WeightedPointSet):
    j0 = inertia_operator(ps, np.zeros(ps.dim)).entries
    s = (ps.masses[:, None] * ps.coords).sum(axis=0)
    m = ps.total_mass
    return j0, s, m


def _pgd(j0, s, m, proj, bound, u0) -> tuple[np.ndarray, float]:
    u = proj(np.asarray(u0, dtype=float), bound)
    if float(np.linalg.norm(u)) < 1e-14:
        u = proj(np.full_like(u0, 1e-6), bound)

    def value(v):
        vv = float(v @ v)
        return (float(v @ j0 @ v) - 2 * float(v @ s) + m) / vv

    f = value(u)
    step = 1.0
    for _ in range(_MAX_ITERS):
        grad = (2.0 / float(u @ u)) * (j0 @ u - s - f * u)
        u_new, f_new = u, f
        while step > 1e-18:
            cand = proj(u - step * grad, bound)
            if float(np.linalg.norm(cand)) < 1e-14:
                step *= 0.5
                continue
            f_cand = value(cand)
            if f_cand < f:
                u_new, f_new = cand, f_cand
                break
            step *= 0.5
        delta = float(np.linalg.norm(u_new - u))
        u, f = u_new, f_new
        step = min(step * 2.0, 1e6)
        if delta < _STEP_TOL * max(1.0, float(np.linalg.norm(u))):
            break
    return u, f


def _seed_list(ps: WeightedPointSet, bound: float, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    k = ps.dim
    seeds: list[np.ndarray] = []
    c = centroid(ps)
    op = inertia_operator(ps, c)
    vals, vecs = np.linalg.eigh(op.entries)
    # the unconstrained optimum, when representable in this gauge
    n = vecs[:, 0]
    p = float(n @ c)
    if abs(p) > 1e-12:
        seeds.append(n / p)
    for i in range(k):
        for sign in (1.0, -1.0):
            seeds.append(sign * 0.7 * bound * vecs[:, i] + 1e-3 * rng.normal(size=k))
    while len(seeds) < _N_STARTS:
        seeds.append(rng.normal(size=k))
    return seeds[:_N_STARTS]


def constrained_fit(
    ps: WeightedPointSet,
    norm: str,
    bound: float,
    seed: int | None = None,
) -> RegularizedFit:
    """Minimize the orthogonal residual subject to ``||u||_norm <= bound``.

    The objective is a ratio of quadratics and not convex, so the solver
    runs projected gradient descent from 16 deterministic starts (principal
    directions plus seeded perturbations) and keeps the best outcome.  The
    seed defaults to the ``CONFOCAL_FIT_SEED`` environment variable.
    """
    norm = norm.lower()
    if norm not in ("l1", "l2"):
        raise ValueError("norm must be 'l1' or 'l2'")
    bound = float(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, "0"))
    proj = project_l1_ball if norm == "l1" else project_l2_ball
    j0, s, m = _objective_pieces(ps)
    best: tuple[np.ndarray, float] | None = None
    for u0 in _seed_list(ps, bound, seed):
        u, f = _pgd(j0, s, m, proj, bound, u0)
        if best is None or f < best[1]:
            best = (u, f)
    assert best is not None
    u, f = best
    norm_val = float(np.abs(u).sum()) if norm == "l1" else float(np.linalg.norm(u))
    active = abs(norm_val - bound) <= 1e-6 * bound
    zero_tol = 1e-8 * float(np.abs(u).max())
    zeros = tuple(int(i) for i in np.flatnonzero(np.abs(u) <= zero_tol))
    return RegularizedFit(CoefficientVector(u), float(f), norm, bound, active, zeros)


__all__ = [
    "CoefficientVector",
    "DualQuadric",
    "RegularizedFit",
    "moment_of_coefficients",
    "dual_quadric",
    "constrained_fit",
    "project_l1_ball",
    "project_l2_ball",
    "SEED_ENV_VAR",
]
