"""Pure-numpy implementation of the refinement hot kernel.

Evaluates the Fresnel-domain model vector z(r, theta) together with its
first and second partial derivatives in one pass. The per-pair phase is

    phi(i, u) = -(2 pi / lambda) * (d_u^2 D_i / (2 r) + d_u d_i (sin(theta) - gy_u / r))

where gy_u runs over the distinct axis projections of the RIS elements and
each carries an integer multiplicity. Derivatives follow from the phase:
d/dk exp(j phi) = j phi_k exp(j phi) and
d2/dk2 exp(j phi) = (j phi_kk - phi_k^2) exp(j phi).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"


def model_terms(
    gy: np.ndarray,
    weights: np.ndarray,
    big_delta: np.ndarray,
    small_delta: np.ndarray,
    wavelength: float,
    d_u: float,
    r: float,
    theta: float,
):
    """Model vector and derivatives at (r, theta).

    Args:
        gy: distinct axis projections g.s_n of the RIS elements, shape (U,).
        weights: multiplicity of each projection, shape (U,); sums to N.
        big_delta: (q-1)^2 - (p-1)^2 per pair index, shape (K^2,).
        small_delta: q - p per pair index, shape (K^2,).
        wavelength, d_u: carrier wavelength and UE element spacing, meters.
        r, theta: evaluation point.

    Returns:
        (z, dz_dr, d2z_dr2, dz_dtheta, d2z_dtheta2), each complex (K^2,).
    """
    c = 2.0 * math.pi / wavelength
    sin_t = math.sin(theta)
    cos_t = math.cos(theta)
    bd = np.asarray(big_delta, dtype=np.float64)
    sd = np.asarray(small_delta, dtype=np.float64)

    # (K^2, U) phase and its radial slope
    phi = (
        -c * d_u * d_u * bd[:, None] / (2.0 * r)
        - c * d_u * sd[:, None] * sin_t
        + c * d_u * sd[:, None] * gy[None, :] / r
    )
    phi_r = c * d_u / (r * r) * (d_u * bd[:, None] / 2.0 - sd[:, None] * gy[None, :])
    a = np.exp(1j * phi)
    wa = weights[None, :] * a

    z = wa.sum(axis=1)
    dz_dr = (wa * (1j * phi_r)).sum(axis=1)
    d2z_dr2 = (wa * (1j * (-2.0 / r) * phi_r - phi_r * phi_r)).sum(axis=1)

    # The angular slope is element-independent, so both theta-derivatives
    # are per-pair scalar multiples of z.
    phi_t = -c * d_u * sd * cos_t
    phi_tt = c * d_u * sd * sin_t
    dz_dt = 1j * phi_t * z
    d2z_dt2 = (1j * phi_tt - phi_t * phi_t) * z
    return z, dz_dr, d2z_dr2, dz_dt, d2z_dt2
