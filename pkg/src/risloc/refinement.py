"""Fresnel-domain model fitting: objective, analytic derivatives, damped Newton.

The model vector z(r, theta) stacks the cross-element sums
z_i = sum_n conj(a_{n,p}) a_{n,q} with pair index i = (q - 1) K + p.
Writing each summand as exp(j phi) makes the derivatives mechanical:
d(exp(j phi)) = j phi' exp(j phi) and d2 = (j phi'' - phi'^2) exp(j phi).
Note the curvature carries the squared phase slope, not the squared
summand; a naive transcription that squares the first-derivative terms
double-counts the unit-modulus factor and fails finite-difference checks,
which are the arbiter for every formula here.

The squared-distance objective beta = ||y - z||^2 then has
    d(beta)/dk   = -2 Re{(y - z)^H dz/dk}
    d2(beta)/dk2 = 2 ||dz/dk||^2 - 2 Re{(y - z)^H d2z/dk2}
for each coordinate k in {r, theta} separately; the iteration updates both
coordinates from the same iterate with their own scalar curvatures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .geometry import SystemConfig, near_field_bounds, ris_element_positions
from .signaling import Observation

# y-component of the UE array axis; scales the angular phase slope.
ULA_AXIS_Y = 1.0

# Curvature at or below this threshold triggers the fixed-length
# gradient fallback instead of a Newton step.
CURVATURE_FLOOR = 1e-12

THETA_MARGIN = 1e-3


@dataclass(frozen=True)
class RefinementSettings:
    """Damped-Newton tuning knobs.

    ``tau`` is the stopping threshold applied to the per-iteration update
    magnitude of both coordinates (meters for range, radians for azimuth).
    """

    gamma: float = 0.5
    tau: float = 1e-4
    max_iter: int = 200

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class RefinementResult:
    r_hat: float
    theta_hat: float
    iterations: int
    objective_trace: np.ndarray
    converged: bool


@dataclass(frozen=True)
class _ModelPlan:
    """Precomputed per-config arrays consumed by the kernel backend."""

    gy: np.ndarray
    weights: np.ndarray
    big_delta: np.ndarray
    small_delta: np.ndarray
    wavelength: float
    d_u: float
    k: int


@lru_cache(maxsize=32)
def _plan(cfg: SystemConfig) -> _ModelPlan:
    # Distinct axis projections g.s_n with multiplicities; the model phase
    # depends on the element position only through this projection.
    gy_full = ris_element_positions(cfg)[:, 1] * ULA_AXIS_Y
    gy, counts = np.unique(gy_full, return_counts=True)
    k = cfg.k_ue
    i0 = np.arange(k * k)
    p = i0 % k  # zero-based p - 1
    q = i0 // k  # zero-based q - 1
    return _ModelPlan(
        gy=np.ascontiguousarray(gy, dtype=np.float64),
        weights=np.ascontiguousarray(counts, dtype=np.float64),
        big_delta=np.ascontiguousarray(q * q - p * p, dtype=np.float64),
        small_delta=np.ascontiguousarray(q - p, dtype=np.float64),
        wavelength=cfg.wavelength,
        d_u=cfg.d_u,
        k=k,
    )


def _check_range(r: float):
    if not r > 0:
        raise ValueError(f"range must be positive, got {r}")


def model_terms(cfg: SystemConfig, r: float, theta: float):
    """Model vector and all four derivative vectors in one kernel pass."""
    _check_range(r)
    pl = _plan(cfg)
    return kernels.model_terms(
        pl.gy, pl.weights, pl.big_delta, pl.small_delta, pl.wavelength, pl.d_u, r, theta
    )


def model_vector(cfg: SystemConfig, r: float, theta: float) -> np.ndarray:
    """Fresnel-model observation vector z(r, theta), length K^2.

    Entries with p = q are exactly N; the vector is conjugate-symmetric
    under the pair swap (p, q) -> (q, p).
    """
    return model_terms(cfg, r, theta)[0]


def model_derivatives(cfg: SystemConfig, r: float, theta: float):
    """Analytic (dz/dr, d2z/dr2, dz/dtheta, d2z/dtheta2), each length K^2."""
    return model_terms(cfg, r, theta)[1:]


def objective(obs: Observation, cfg: SystemConfig, r: float, theta: float) -> float:
    """Squared model-fit error beta = ||y_tilde - z(r, theta)||^2."""
    _check_range(r)
    resid = obs.y_tilde - model_vector(cfg, r, theta)
    return float(np.vdot(resid, resid).real)


def _beta_terms(y_tilde: np.ndarray, terms) -> tuple[float, float, float, float, float]:
    z, dz_dr, d2z_dr2, dz_dt, d2z_dt2 = terms
    resid = y_tilde - z
    beta = float(np.vdot(resid, resid).real)
    b_r = -2.0 * float(np.vdot(resid, dz_dr).real)
    b_rr = 2.0 * float(np.vdot(dz_dr, dz_dr).real) - 2.0 * float(np.vdot(resid, d2z_dr2).real)
    b_t = -2.0 * float(np.vdot(resid, dz_dt).real)
    b_tt = 2.0 * float(np.vdot(dz_dt, dz_dt).real) - 2.0 * float(np.vdot(resid, d2z_dt2).real)
    return beta, b_r, b_rr, b_t, b_tt


def objective_derivatives(
    obs: Observation, cfg: SystemConfig, r: float, theta: float
) -> tuple[float, float, float, float]:
    """First and second partials of the objective w.r.t. r and theta.

    Returns (dbeta/dr, d2beta/dr2, dbeta/dtheta, d2beta/dtheta2).
    """
    _, b_r, b_rr, b_t, b_tt = _beta_terms(obs.y_tilde, model_terms(cfg, r, theta))
    return b_r, b_rr, b_t, b_tt


def _step(grad: float, curv: float, fallback_len: float) -> float:
    """Raw (undamped) update for one coordinate.

    Newton when the curvature is usable; otherwise a fixed-length step
    down the gradient so flat or concave stretches cannot stall or launch
    the iterate.
    """
    if curv > CURVATURE_FLOOR:
        return grad / curv
    if grad == 0.0:
        return 0.0
    return math.copysign(fallback_len, grad)


def _gn_terms(y_tilde: np.ndarray, terms) -> tuple[float, float, float, float, float]:
    """Objective, gradients, and Gauss-Newton curvatures.

    The step denominators keep only the positive-definite part
    2 ||dz/dk||^2 of the exact curvature. At a small-residual optimum the
    dropped term vanishes, so local convergence matches the exact-curvature
    iteration; away from the optimum the exact curvature changes sign on
    this landscape and a raw quotient step would climb toward the range
    clamp, so the definite form is what makes far coarse starts usable.
    """
    z, dz_dr, _, dz_dt, _ = terms
    resid = y_tilde - z
    beta = float(np.vdot(resid, resid).real)
    b_r = -2.0 * float(np.vdot(resid, dz_dr).real)
    b_t = -2.0 * float(np.vdot(resid, dz_dt).real)
    d_r = 2.0 * float(np.vdot(dz_dr, dz_dr).real)
    d_t = 2.0 * float(np.vdot(dz_dt, dz_dt).real)
    return beta, b_r, d_r, b_t, d_t


def refine(
    obs: Observation,
    cfg: SystemConfig,
    start: tuple[float, float],
    settings: RefinementSettings = RefinementSettings(),
) -> RefinementResult:
    """Damped per-coordinate Newton descent on beta from a coarse start.

    Both coordinates are updated simultaneously from the current iterate:
    kappa <- kappa - gamma * (dbeta/dkappa) / curvature, where the
    curvature is the positive-definite Gauss-Newton form (see
    :func:`_gn_terms`). Iteration stops once both applied updates drop
    below ``tau``, or at ``max_iter``. Iterates are clamped to a safety
    box spanning half the Fresnel distance to twice the Rayleigh distance
    and the open azimuth sector.
    """
    r0, theta0 = float(start[0]), float(start[1])
    if not r0 > 0:
        raise ValueError(f"start range must be positive, got {r0}")
    if obs.y_tilde.shape[0] != cfg.k_ue**2:
        raise ValueError(
            f"observation length {obs.y_tilde.shape[0]} does not match K^2={cfg.k_ue ** 2}"
        )
    bounds = near_field_bounds(cfg)
    r_lo, r_hi = bounds.fresnel / 2.0, 2.0 * bounds.rayleigh
    t_lo, t_hi = -math.pi / 2 + THETA_MARGIN, math.pi / 2 - THETA_MARGIN

    r = min(max(r0, r_lo), r_hi)
    theta = min(max(theta0, t_lo), t_hi)
    fallback_len = 100.0 * settings.tau

    beta, b_r, d_r, b_t, d_t = _gn_terms(obs.y_tilde, model_terms(cfg, r, theta))
    trace = [beta]
    converged = False
    iterations = 0
    for _ in range(settings.max_iter):
        iterations += 1
        r_new = min(max(r - settings.gamma * _step(b_r, d_r, fallback_len), r_lo), r_hi)
        t_new = min(max(theta - settings.gamma * _step(b_t, d_t, fallback_len), t_lo), t_hi)
        moved_r = abs(r_new - r)
        moved_t = abs(t_new - theta)
        r, theta = r_new, t_new
        beta, b_r, d_r, b_t, d_t = _gn_terms(obs.y_tilde, model_terms(cfg, r, theta))
        trace.append(beta)
        if moved_r < settings.tau and moved_t < settings.tau:
            converged = True
            break

    return RefinementResult(
        r_hat=r,
        theta_hat=theta,
        iterations=iterations,
        objective_trace=np.array(trace),
        converged=converged,
    )
