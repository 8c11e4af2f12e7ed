# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels.

Cython translations of the pure-NumPy kernels in ``_reference``; same
semantics, same operation structure, explicit C loops instead of BLAS
calls.  See ``_reference`` for the full contract.
"""

import numpy as np

cimport cython


cdef inline void _mat_apply(
    double[:, ::1] a, double[:, ::1] src, double[:, ::1] dst, Py_ssize_t n, Py_ssize_t q
) noexcept nogil:
    """dst = a @ src for (n, n) times (n, q)."""
    cdef Py_ssize_t i, l, c
    cdef double acc
    for i in range(n):
        for c in range(q):
            dst[i, c] = 0.0
    for i in range(n):
        for l in range(n):
            acc = a[i, l]
            if acc != 0.0:
                for c in range(q):
                    dst[i, c] += acc * src[l, c]


def ct_delay_rk4(a, f_half, int m, double h, int k_steps, y0):
    """Integrate ``y' = A y(t - m h) + f(t)``; see the reference kernel."""
    cdef double[:, ::1] A = np.ascontiguousarray(a, dtype=float)
    cdef double[:, ::1] F = np.ascontiguousarray(f_half, dtype=float)
    cdef double[:, ::1] Y0 = np.ascontiguousarray(y0, dtype=float)
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t q = Y0.shape[1]

    out_arr = np.zeros((k_steps + 1, n, q))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, c, k
    cdef Py_ssize_t j
    for i in range(n):
        for c in range(q):
            out[0, i, c] = Y0[i, c]

    work = np.zeros((5, n, q))
    cdef double[:, :, ::1] w = work
    # Slots: 0 = stage k1, 1 = stage k2, 2 = stage k3 / midpoint input,
    #        3 = stage k4, 4 = scratch state.
    cdef double h6 = h / 6.0
    cdef double h8 = h / 8.0

    if m == 0:
        for k in range(k_steps):
            # k1 = A y + f(t_k)
            _mat_apply(A, out[k], w[0], n, q)
            for i in range(n):
                for c in range(q):
                    w[0, i, c] += F[2 * k, i]
            # k2 = A (y + h/2 k1) + f(t_k + h/2)
            for i in range(n):
                for c in range(q):
                    w[4, i, c] = out[k, i, c] + 0.5 * h * w[0, i, c]
            _mat_apply(A, w[4], w[1], n, q)
            for i in range(n):
                for c in range(q):
                    w[1, i, c] += F[2 * k + 1, i]
            # k3 = A (y + h/2 k2) + f(t_k + h/2)
            for i in range(n):
                for c in range(q):
                    w[4, i, c] = out[k, i, c] + 0.5 * h * w[1, i, c]
            _mat_apply(A, w[4], w[2], n, q)
            for i in range(n):
                for c in range(q):
                    w[2, i, c] += F[2 * k + 1, i]
            # k4 = A (y + h k3) + f(t_{k+1})
            for i in range(n):
                for c in range(q):
                    w[4, i, c] = out[k, i, c] + h * w[2, i, c]
            _mat_apply(A, w[4], w[3], n, q)
            for i in range(n):
                for c in range(q):
                    w[3, i, c] += F[2 * k + 2, i]
            for i in range(n):
                for c in range(q):
                    out[k + 1, i, c] = out[k, i, c] + h6 * (
                        w[0, i, c] + 2.0 * (w[1, i, c] + w[2, i, c]) + w[3, i, c]
                    )
        return out_arr

    deriv_arr = np.zeros((k_steps + 1, n, q))
    cdef double[:, :, ::1] deriv = deriv_arr
    for i in range(n):
        for c in range(q):
            deriv[0, i, c] = F[0, i]

    for k in range(k_steps):
        j = k - m
        # k2 = A z_mid + f(t_k + h/2), with z_mid from cubic Hermite data,
        # or exactly zero when the delayed midpoint lies before t = 0.
        if j >= 0:
            for i in range(n):
                for c in range(q):
                    w[2, i, c] = 0.5 * (out[j, i, c] + out[j + 1, i, c]) + h8 * (
                        deriv[j, i, c] - deriv[j + 1, i, c]
                    )
            _mat_apply(A, w[2], w[1], n, q)
            for i in range(n):
                for c in range(q):
                    w[1, i, c] += F[2 * k + 1, i]
        else:
            for i in range(n):
                for c in range(q):
                    w[1, i, c] = F[2 * k + 1, i]
        # k4 = A y(t_{k+1-m}) + f(t_{k+1})
        if j + 1 >= 0:
            _mat_apply(A, out[j + 1], w[3], n, q)
            for i in range(n):
                for c in range(q):
                    w[3, i, c] += F[2 * k + 2, i]
        else:
            for i in range(n):
                for c in range(q):
                    w[3, i, c] = F[2 * k + 2, i]
        for i in range(n):
            for c in range(q):
                deriv[k + 1, i, c] = w[3, i, c]
                out[k + 1, i, c] = out[k, i, c] + h6 * (
                    deriv[k, i, c] + 4.0 * w[1, i, c] + w[3, i, c]
                )
    return out_arr


def dt_delay_iterate(m_mat, r, int d, int k_steps):
    """Run ``z(k+1) = z(k) - M (z(k-d) + r(k-d))``; see the reference kernel."""
    cdef double[:, ::1] M = np.ascontiguousarray(m_mat, dtype=float)
    cdef double[:, ::1] R = np.ascontiguousarray(r, dtype=float)
    cdef Py_ssize_t n = M.shape[0]
    z_arr = np.zeros((k_steps + 1, n))
    cdef double[:, ::1] z = z_arr
    cdef Py_ssize_t k, i, l, j
    cdef double acc
    for k in range(k_steps):
        j = k - d
        if j >= 0:
            for i in range(n):
                acc = 0.0
                for l in range(n):
                    acc += M[i, l] * (z[j, l] + R[j, l])
                z[k + 1, i] = z[k, i] - acc
        else:
            for i in range(n):
                z[k + 1, i] = z[k, i]
    return z_arr
