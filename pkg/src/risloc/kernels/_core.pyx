# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the refinement hot kernel.

Same contract as ``_reference.model_terms``; a single tight loop over
(pair, projection) accumulates the model vector and its radial derivatives,
then applies the element-independent angular factors.
"""

from libc.math cimport sin, cos

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def model_terms(
    double[::1] gy,
    double[::1] weights,
    double[::1] big_delta,
    double[::1] small_delta,
    double wavelength,
    double d_u,
    double r,
    double theta,
):
    cdef Py_ssize_t n_pairs = big_delta.shape[0]
    cdef Py_ssize_t n_proj = gy.shape[0]

    z_arr = np.empty(n_pairs, dtype=np.complex128)
    dr_arr = np.empty(n_pairs, dtype=np.complex128)
    drr_arr = np.empty(n_pairs, dtype=np.complex128)
    dt_arr = np.empty(n_pairs, dtype=np.complex128)
    dtt_arr = np.empty(n_pairs, dtype=np.complex128)
    cdef double complex[::1] z = z_arr
    cdef double complex[::1] dr = dr_arr
    cdef double complex[::1] drr = drr_arr
    cdef double complex[::1] dt = dt_arr
    cdef double complex[::1] dtt = dtt_arr

    cdef double c = 2.0 * 3.14159265358979323846 / wavelength
    cdef double sin_t = sin(theta)
    cdef double cos_t = cos(theta)
    cdef double inv_r = 1.0 / r
    cdef double inv_r2 = inv_r * inv_r

    cdef Py_ssize_t i, u
    cdef double bd, sd, phi0, slope, w
    cdef double phi, phi_r, ca, sa
    cdef double complex a, jphir, acc_z, acc_dr, acc_drr
    cdef double phi_t, phi_tt

    for i in range(n_pairs):
        bd = big_delta[i]
        sd = small_delta[i]
        # phi = phi0 + slope * gy[u]; phi_r follows the same split
        phi0 = -c * d_u * d_u * bd * 0.5 * inv_r - c * d_u * sd * sin_t
        slope = c * d_u * sd * inv_r
        acc_z = 0
        acc_dr = 0
        acc_drr = 0
        for u in range(n_proj):
            phi = phi0 + slope * gy[u]
            phi_r = c * d_u * inv_r2 * (d_u * bd * 0.5 - sd * gy[u])
            w = weights[u]
            ca = cos(phi)
            sa = sin(phi)
            a = w * (ca + 1j * sa)
            acc_z = acc_z + a
            acc_dr = acc_dr + a * (1j * phi_r)
            acc_drr = acc_drr + a * (1j * (-2.0 * inv_r) * phi_r - phi_r * phi_r)
        z[i] = acc_z
        dr[i] = acc_dr
        drr[i] = acc_drr
        phi_t = -c * d_u * sd * cos_t
        phi_tt = c * d_u * sd * sin_t
        dt[i] = 1j * phi_t * acc_z
        dtt[i] = (1j * phi_tt - phi_t * phi_t) * acc_z

    return z_arr, dr_arr, drr_arr, dt_arr, dtt_arr
