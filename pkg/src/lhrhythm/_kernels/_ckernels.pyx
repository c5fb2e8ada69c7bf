# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; same signatures as _pykernels."""
import numpy as np

from libc.math cimport sin, exp, floor, sqrt, M_PI

NAME = "cython"


cdef inline double _pspike(int kind, double p_const, double p_min, double dp,
                           double p_photo, double zeta, double k, double t) noexcept nogil:
    cdef double w
    if kind == 0:
        return p_const
    w = 2.0 * M_PI / p_photo
    if kind == 1 or t < p_photo:
        return 0.5 * dp * (sin(w * t) + 1.0) + p_min
    return (0.5 * dp * (sin(sqrt(1.0 - zeta * zeta) * w * t) + 1.0)
            * k * exp(-zeta * w * (t - p_photo)) + p_min)


def relax(double[::1] f_mid, double decay, double gain, double y0):
    cdef Py_ssize_t n = f_mid.shape[0], i
    out = np.empty(n + 1)
    cdef double[::1] y = out
    with nogil:
        y[0] = y0
        for i in range(n):
            y[i + 1] = decay * y[i] + gain * f_mid[i]
    return out


def integrate_model(int kind, double p_const, double p_min, double dp, double p_photo,
                    double zeta, double k, double a_spike, double k_hl, double decay,
                    double gain, double dt, Py_ssize_t n_steps, double y0):
    cdef Py_ssize_t i
    cdef double tm, p, f
    out = np.empty(n_steps + 1)
    cdef double[::1] y = out
    with nogil:
        y[0] = y0
        for i in range(n_steps):
            tm = (i + 0.5) * dt
            p = _pspike(kind, p_const, p_min, dp, p_photo, zeta, k, tm)
            f = a_spike * exp(-k_hl * (tm - floor(tm / p) * p))
            y[i + 1] = decay * y[i] + gain * f
    return out


def lag_products(const double complex[::1] z, const double[::1] g, const double[::1] h2,
                 Py_ssize_t n_start, Py_ssize_t n_stop):
    cdef Py_ssize_t n_z = z.shape[0], n_lag = h2.shape[0], n_g = g.shape[0]
    cdef Py_ssize_t half_g = (n_g - 1) // 2
    cdef Py_ssize_t rows = n_stop - n_start, width = rows + n_g - 1
    cdef Py_ssize_t r, tau, mi, c, a, b
    cdef double acc_re, acc_im, gm
    out = np.empty((rows, n_lag), dtype=complex)
    cdef double complex[:, ::1] o = out
    pre_arr = np.empty(width)
    pim_arr = np.empty(width)
    cdef double[::1] pre = pre_arr
    cdef double[::1] pim = pim_arr
    cdef double complex za, zb
    with nogil:
        for tau in range(n_lag):
            # products at centres c = n_start - half_g + k, zero off the support
            for c in range(width):
                a = n_start - half_g + c + tau
                b = n_start - half_g + c - tau
                if b < 0 or a >= n_z or a < 0 or b >= n_z:
                    pre[c] = 0.0
                    pim[c] = 0.0
                else:
                    za = z[a]
                    zb = z[b]
                    pre[c] = za.real * zb.real + za.imag * zb.imag
                    pim[c] = za.imag * zb.real - za.real * zb.imag
            for r in range(rows):
                acc_re = 0.0
                acc_im = 0.0
                for mi in range(n_g):
                    gm = g[mi]
                    acc_re = acc_re + gm * pre[r + mi]
                    acc_im = acc_im + gm * pim[r + mi]
                o[r, tau] = h2[tau] * (acc_re + 1j * acc_im)
    return out
