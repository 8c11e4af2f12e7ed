"""Complex Lambert W function with branch selection.

``lambert_w(z, k)`` returns a solution ``w`` of ``w * exp(w) = z`` on
branch ``k``, computed by Halley iteration from a branch-aware seed.  The
continuous-time decay-rate analysis only needs branches ``k in {-1, 0, 1}``,
but the implementation accepts any integer branch.

Branch conventions follow the standard ones: the principal branch ``k=0``
is real on ``[-1/e, inf)``; ``k=-1`` is real on ``[-1/e, 0)``; branch cuts
lie on the negative real axis and points *on* a cut resolve as the limit
from the upper half-plane.
"""

from __future__ import annotations

import cmath
import math

from .errors import NumericalError, ParameterError

__all__ = ["lambert_w", "w0_series"]

_BRANCH_POINT = -1.0 / math.e
_MAX_ITER = 100
_TOL = 1e-12


def _bp_series(q: complex) -> complex:
    """Series for W about the branch point ``z = -1/e`` in ``q = sqrt(2(ez+1))``."""
    return -1.0 + q - q * q / 3.0 + 11.0 * q**3 / 72.0


def _seed(z: complex, k: int) -> complex:
    """Starting point for the Halley iteration on branch ``k``."""
    p = cmath.sqrt(2.0 * (math.e * z + 1.0))
    near_branch_point = abs(z - _BRANCH_POINT) < 0.25
    if near_branch_point:
        if k == 0:
            return _bp_series(p)
        if k == -1 and z.imag >= 0.0:
            return _bp_series(-p)
        if k == 1 and z.imag < 0.0:
            return _bp_series(-p)
    if k == 0:
        if z.imag == 0.0 and z.real < _BRANCH_POINT:
            # Below the branch point on the real axis the principal value
            # is complex (limit from above); a real polynomial seed would
            # trap the iteration on the real line, so start from the
            # asymptotic complex seed (log has imaginary part +pi here).
            return cmath.log(z) - cmath.log(cmath.log(z))
        if abs(z - 1.0) < 0.5:
            # log(log z) degenerates near z = 1; use the tangent there.
            return 0.5671432904097838 + 0.3618962566348892 * (z - 1.0)
        if abs(z) < 1.0:
            return z * (1.0 - z + 1.5 * z * z)
        return cmath.log(z) - cmath.log(cmath.log(z))
    if k == -1 and z.imag == 0.0 and _BRANCH_POINT < z.real < 0.0:
        lz = math.log(-z.real)
        return complex(lz - math.log(-lz))
    base = cmath.log(z) + 2.0j * math.pi * k
    return base - cmath.log(base)


def lambert_w(z: complex, k: int = 0) -> complex:
    """Branch ``k`` of the Lambert W function at ``z``.

    Solves ``w * exp(w) = z`` by Halley's method to a residual below
    ``1e-12 * max(1, |z|)``.  ``z = 0`` is only in the domain of the
    principal branch (``W_0(0) = 0``); elsewhere it raises
    :class:`ParameterError`.  Failure to converge raises
    :class:`NumericalError`.
    """
    z = complex(z)
    if z.imag == 0.0 and math.copysign(1.0, z.imag) < 0.0:
        # Resolve points on the branch cut as the limit from above.
        z = complex(z.real, 0.0)
    if z == 0.0:
        if k == 0:
            return 0.0 + 0.0j
        raise ParameterError(f"lambert_w(0) is undefined on branch k={k}")
    w = _seed(z, k)
    tol = _TOL * max(1.0, abs(z))
    for _ in range(_MAX_ITER):
        ew = cmath.exp(w)
        f = w * ew - z
        if abs(f) <= tol:
            return w
        wp1 = w + 1.0
        if abs(wp1) < 1e-300:
            w += 1e-8
            continue
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w = w - f / denom
    raise NumericalError(f"lambert_w failed to converge for z={z!r}, k={k}")


def w0_series(z: complex, max_terms: int = 1000) -> complex:
    """Principal-branch Lambert W via its Taylor series at the origin.

    Valid for ``|z| <= 1/e`` (the series' radius of convergence); used as an
    independent cross-check of :func:`lambert_w`.  Terms follow the
    recurrence ``t_{n+1} = t_n * (-(1 + 1/n)^(n-1) * z)`` starting from
    ``t_1 = z``.  Convergence slows near the radius itself (terms shrink
    like ``(e|z|)^n``), hence the generous term budget.
    """
    z = complex(z)
    if abs(z) > 1.0 / math.e:
        raise ParameterError(f"series only converges for |z| <= 1/e, got |z|={abs(z):.4f}")
    total = 0.0 + 0.0j
    term = z
    for n in range(1, max_terms + 1):
        total += term
        if abs(term) < 1e-15:
            return total
        term = term * (-((1.0 + 1.0 / n) ** (n - 1)) * z)
    raise NumericalError(f"w0_series did not converge within {max_terms} terms for z={z!r}")
