# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled marching core; see `_core_py` for the reference semantics."""

import numpy as np

cimport cython
from libc.math cimport isfinite
from scipy.linalg.cython_blas cimport ddot

BACKEND = "cython"

STATUS_DONE = 0
STATUS_BLOWDOWN = 1
STATUS_NONFINITE = 2

cdef int _ST_DONE = 0
cdef int _ST_BLOWDOWN = 1
cdef int _ST_NONFINITE = 2


cdef inline double _h(double phi, bint use_modified, double c, double phi_minus,
                      double pm3, double junction, double qa, double qb,
                      double qc, double qd, double qe) nogil:
    if use_modified and phi < junction:
        return qa * phi * phi * phi * phi + qb * phi * phi * phi \
            + qc * phi * phi + qd * phi + qe
    return -c * (phi - phi_minus) + phi * phi * phi - pm3


def march(double phi0, double psi0, double tau, double dx, Py_ssize_t n_max,
          bint use_modified, double c, double phi_minus, double junction,
          double qa, double qb, double qc, double qd, double qe,
          double[::1] tail, double[::1] pow_arr, double[::1] body,
          double[::1] edge, double c_new, double kq, double floor,
          Py_ssize_t window=0):
    cdef double pm3 = phi_minus * phi_minus * phi_minus
    cdef Py_ssize_t n_alloc = n_max + 1

    phi_arr = np.empty(n_alloc)
    psi_arr = np.empty(n_alloc)
    pp_arr = np.empty(n_alloc)
    dal_arr = np.empty(n_alloc)
    ppr_arr = np.empty(n_alloc)
    cdef double[::1] phi = phi_arr
    cdef double[::1] psi = psi_arr
    cdef double[::1] pp = pp_arr
    cdef double[::1] dal = dal_arr
    cdef double[::1] ppr = ppr_arr

    cdef Py_ssize_t k, m, off, j0
    cdef Py_ssize_t j_prev = 0
    cdef double phi_p, psi_p, rest, pp_pred
    cdef double denom = tau + c_new
    cdef double t_acc = 0.0
    cdef int status = _ST_DONE
    cdef Py_ssize_t n_done = n_max
    cdef int blas_n, blas_inc = 1

    phi[0] = phi0
    psi[0] = psi0
    dal[0] = tail[0]
    pp[0] = (_h(phi0, use_modified, c, phi_minus, pm3, junction,
                qa, qb, qc, qd, qe) - dal[0]) / tau
    ppr[n_max] = pp[0]

    with nogil:
        for k in range(n_max):
            m = k + 1
            phi_p = phi[k] + dx * psi[k]
            psi_p = psi[k] + dx * pp[k]

            j0 = m - window if (window > 0 and m > window) else 0
            while j_prev < j0:
                t_acc += 0.5 * dx * (psi[j_prev] + psi[j_prev + 1])
                j_prev += 1

            rest = tail[m]
            if j0 > 0:
                rest += (t_acc / (j0 * dx)) * (pow_arr[m] - pow_arr[m - j0])
            rest += pow_arr[m - j0] * psi[j0] + kq * edge[m - j0] * pp[j0]
            if m - j0 >= 2:
                # sum_{i=j0+1}^{m-1} body[m-i] * pp[i], using the reversed
                # copy: pp[i] == ppr[n_max - i]
                off = n_max - m
                blas_n = <int> (m - j0 - 1)
                rest += kq * ddot(&blas_n, &body[1], &blas_inc,
                                  &ppr[off + 1], &blas_inc)

            pp_pred = (_h(phi_p, use_modified, c, phi_minus, pm3, junction,
                          qa, qb, qc, qd, qe) - rest) / denom

            phi[m] = phi[k] + 0.5 * dx * (psi[k] + psi_p)
            psi[m] = psi[k] + 0.5 * dx * (pp[k] + pp_pred)

            if not (isfinite(phi[m]) and isfinite(psi[m])):
                status = _ST_NONFINITE
                n_done = k
                break

            pp[m] = (_h(phi[m], use_modified, c, phi_minus, pm3, junction,
                        qa, qb, qc, qd, qe) - rest) / denom
            ppr[n_max - m] = pp[m]
            dal[m] = rest + c_new * pp[m]

            if phi[m] < floor:
                status = _ST_BLOWDOWN
                n_done = m
                break

    cdef Py_ssize_t n = n_done + 1
    return (phi_arr[:n].copy(), psi_arr[:n].copy(), pp_arr[:n].copy(),
            dal_arr[:n].copy(), status)
