# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels; mirrors ``_rk4_py`` operation for operation."""
import numpy as np

from libc.math cimport fabs, isfinite


cdef inline void _rhs_reduced(double f, double fp, double h1p, double m, double rho,
                              double lam, double* df, double* dfp, double* dh) noexcept nogil:
    cdef double fpp = (lam - (m - 1.0) * fp * fp + f * fp * h1p - rho * f * f) / f
    df[0] = fp
    dfp[0] = fpp
    dh[0] = m * fpp / f + rho


def rk4_reduced(double f, double fp, double h1p, double m, double rho, double lam,
                double step, Py_ssize_t nsteps, double fmin, double guard):
    cdef double[::1] fs = np.empty(nsteps + 1)
    cdef double[::1] fps = np.empty(nsteps + 1)
    cdef double[::1] hs = np.empty(nsteps + 1)
    cdef double half = 0.5 * step
    cdef double sixth = step / 6.0
    cdef double a1, b1, c1, a2, b2, c2, a3, b3, c3, a4, b4, c4
    cdef double f2, f3, f4, nf, nfp, nh
    cdef Py_ssize_t count = 1
    cdef Py_ssize_t i
    cdef int halt = 0
    fs[0] = f
    fps[0] = fp
    hs[0] = h1p
    with nogil:
        for i in range(nsteps):
            _rhs_reduced(f, fp, h1p, m, rho, lam, &a1, &b1, &c1)
            f2 = f + half * a1
            if not f2 > fmin:
                halt = 1
                break
            _rhs_reduced(f2, fp + half * b1, h1p + half * c1, m, rho, lam, &a2, &b2, &c2)
            f3 = f + half * a2
            if not f3 > fmin:
                halt = 1
                break
            _rhs_reduced(f3, fp + half * b2, h1p + half * c2, m, rho, lam, &a3, &b3, &c3)
            f4 = f + step * a3
            if not f4 > fmin:
                halt = 1
                break
            _rhs_reduced(f4, fp + step * b3, h1p + step * c3, m, rho, lam, &a4, &b4, &c4)
            nf = f + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            nfp = fp + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            nh = h1p + sixth * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            if not (isfinite(nf) and isfinite(nfp) and isfinite(nh)):
                halt = 2
                break
            if fabs(nf) + fabs(nfp) > guard:
                halt = 2
                break
            if not nf > fmin:
                halt = 1
                break
            f = nf
            fp = nfp
            h1p = nh
            fs[count] = f
            fps[count] = fp
            hs[count] = h1p
            count += 1
    return (np.asarray(fs)[:count].copy(), np.asarray(fps)[:count].copy(),
            np.asarray(hs)[:count].copy(), halt)


cdef inline void _rhs_m1(double f, double fp, double k, double rho_term,
                         double* df, double* dfp) noexcept nogil:
    df[0] = fp
    dfp[0] = k * f * fp - rho_term * f


def rk4_m1(double f, double fp, double k, double rho_term, double step,
           Py_ssize_t nsteps, double fmin, double guard):
    cdef double[::1] fs = np.empty(nsteps + 1)
    cdef double[::1] fps = np.empty(nsteps + 1)
    cdef double half = 0.5 * step
    cdef double sixth = step / 6.0
    cdef double a1, b1, a2, b2, a3, b3, a4, b4, nf, nfp
    cdef Py_ssize_t count = 1
    cdef Py_ssize_t i
    cdef int halt = 0
    fs[0] = f
    fps[0] = fp
    with nogil:
        for i in range(nsteps):
            _rhs_m1(f, fp, k, rho_term, &a1, &b1)
            _rhs_m1(f + half * a1, fp + half * b1, k, rho_term, &a2, &b2)
            _rhs_m1(f + half * a2, fp + half * b2, k, rho_term, &a3, &b3)
            _rhs_m1(f + step * a3, fp + step * b3, k, rho_term, &a4, &b4)
            nf = f + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            nfp = fp + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            if not (isfinite(nf) and isfinite(nfp)):
                halt = 2
                break
            if fabs(nf) + fabs(nfp) > guard:
                halt = 2
                break
            if not nf > fmin:
                halt = 1
                break
            f = nf
            fp = nfp
            fs[count] = f
            fps[count] = fp
            count += 1
    return np.asarray(fs)[:count].copy(), np.asarray(fps)[:count].copy(), halt
