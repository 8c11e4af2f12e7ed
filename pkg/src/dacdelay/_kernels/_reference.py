"""Pure-NumPy time-stepping kernels.

These are the fallback implementations of the two hot loops; the compiled
extension in ``_speedups`` mirrors them operation-for-operation.  Both
kernels advance *deviation* states with zero pre-history, so delayed
evaluations at negative times are exactly zero rather than interpolated.

``ct_delay_rk4``
    Fixed-step integrator for ``y'(t) = A y(t - m*h) + f(t)`` with
    ``y(t) = 0`` for ``t < 0`` and ``y(0) = y0``.  For ``m >= 1`` the right
    side over one step depends only on already-computed history, so the
    classic Runge-Kutta stage structure collapses to Simpson quadrature of
    the right side with a cubic-Hermite delayed midpoint.  For ``m = 0`` it
    is standard fourth-order Runge-Kutta.

``dt_delay_iterate``
    The delayed first-order recursion
    ``z(k+1) = z(k) - M (z(k-d) + r(k-d))`` with ``z = 0`` and ``r``
    ignored for negative arguments.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ct_delay_rk4", "dt_delay_iterate"]


def ct_delay_rk4(
    a: np.ndarray, f_half: np.ndarray, m: int, h: float, k_steps: int, y0: np.ndarray
) -> np.ndarray:
    """Integrate ``y' = A y(t - m h) + f(t)`` over ``k_steps`` steps of size ``h``.

    Parameters
    ----------
    a : (n, n) array
        System matrix applied to the delayed state.
    f_half : (2 k_steps + 1, n) array
        Forcing sampled on the half-step grid ``t_j = j h / 2`` (shared by
        all columns of the state).
    m : int
        Delay in whole steps; ``m = 0`` means no delay.
    k_steps : int
        Number of steps; the returned array has ``k_steps + 1`` time slices.
    y0 : (n, q) array
        Initial state columns at ``t = 0`` (the pre-history is zero).

    Returns
    -------
    (k_steps + 1, n, q) array of state snapshots on the full grid.
    """
    a = np.ascontiguousarray(a, dtype=float)
    f_half = np.ascontiguousarray(f_half, dtype=float)
    y0 = np.ascontiguousarray(y0, dtype=float)
    n, q = y0.shape
    out = np.zeros((k_steps + 1, n, q))
    out[0] = y0

    if m == 0:
        for k in range(k_steps):
            fa = f_half[2 * k][:, None]
            fm = f_half[2 * k + 1][:, None]
            fb = f_half[2 * k + 2][:, None]
            yk = out[k]
            k1 = a @ yk + fa
            k2 = a @ (yk + 0.5 * h * k1) + fm
            k3 = a @ (yk + 0.5 * h * k2) + fm
            k4 = a @ (yk + h * k3) + fb
            out[k + 1] = yk + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        return out

    # Delayed case: the right side over [t_k, t_{k+1}] involves the state
    # only on [t_{k-m}, t_{k+1-m}], which is known, so Simpson quadrature
    # applies.  ``deriv[j]`` caches y'(t_j) for the Hermite midpoint.
    deriv = np.zeros((k_steps + 1, n, q))
    deriv[0] = f_half[0][:, None]
    for k in range(k_steps):
        j = k - m
        k1 = deriv[k]
        if j >= 0:
            zmid = 0.5 * (out[j] + out[j + 1]) + (h / 8.0) * (deriv[j] - deriv[j + 1])
            k2 = a @ zmid + f_half[2 * k + 1][:, None]
        else:
            # The delayed midpoint lies strictly before t = 0: exactly zero.
            k2 = np.broadcast_to(f_half[2 * k + 1][:, None], (n, q))
        if j + 1 >= 0:
            k4 = a @ out[j + 1] + f_half[2 * k + 2][:, None]
        else:
            k4 = np.broadcast_to(f_half[2 * k + 2][:, None], (n, q))
        deriv[k + 1] = k4
        out[k + 1] = out[k] + (h / 6.0) * (k1 + 4.0 * k2 + k4)
    return out


def dt_delay_iterate(m_mat: np.ndarray, r: np.ndarray, d: int, k_steps: int) -> np.ndarray:
    """Run ``z(k+1) = z(k) - M (z(k-d) + r(k-d))`` from ``z(0) = 0``.

    ``r`` must provide at least ``k_steps`` rows; rows with negative index
    (and the corresponding ``z``) are treated as zero, so the update is
    simply ``z(k+1) = z(k)`` while ``k < d``.

    Returns the ``(k_steps + 1, n)`` array of iterates.
    """
    m_mat = np.ascontiguousarray(m_mat, dtype=float)
    r = np.ascontiguousarray(r, dtype=float)
    n = m_mat.shape[0]
    z = np.zeros((k_steps + 1, n))
    for k in range(k_steps):
        j = k - d
        if j >= 0:
            z[k + 1] = z[k] - m_mat @ (z[j] + r[j])
        else:
            z[k + 1] = z[k]
    return z
