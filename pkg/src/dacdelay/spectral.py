"""Eigenvalue utilities and Lyapunov-equation helpers.

Thin, defensively-checked wrappers around dense linear algebra:

* :func:`eig_general` / :func:`eig_symmetric` -- residual-checked
  eigendecompositions with a deterministic eigenvalue ordering,
* :class:`Spectrum` -- the Laplacian spectrum split into its zero mode and
  the nonzero part used by every delay bound,
* :func:`spectral_radius`, :func:`is_schur` -- stability predicates for the
  discrete-time augmented system,
* :func:`solve_discrete_lyapunov` -- ``A^T X A - X = -C`` with an explicit
  residual check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import GraphStructureError, NumericalError

__all__ = [
    "eig_general",
    "eig_symmetric",
    "spectral_radius",
    "is_schur",
    "solve_discrete_lyapunov",
    "Spectrum",
]

#: Relative residual accepted from the dense eigensolver and Lyapunov solver.
_RESIDUAL_TOL = 1e-8


def _sorted_by_real_then_imag(values: np.ndarray) -> np.ndarray:
    order = np.lexsort((values.imag, values.real))
    return values[order]


def eig_general(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real square matrix, sorted by real part then imaginary.

    The decomposition is verified: the worst relative residual
    ``||A v - lambda v|| / max(1, ||A||)`` over all eigenpairs must not
    exceed ``1e-8``, otherwise :class:`NumericalError` is raised.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    values, vectors = np.linalg.eig(a)
    scale = max(1.0, float(np.linalg.norm(a, np.inf)))
    residual = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    worst = float(residual.max(initial=0.0)) / scale
    if worst > _RESIDUAL_TOL:
        raise NumericalError(f"eigendecomposition residual {worst:.3e} exceeds {_RESIDUAL_TOL:.0e}")
    return _sorted_by_real_then_imag(values)

def eig_symmetric(s: np.ndarray, symmetry_tol: float = 1e-10) -> np.ndarray:
    """Ascending real eigenvalues of a symmetric matrix.

    Raises :class:`NumericalError` when ``||S - S^T||_inf`` exceeds
    ``symmetry_tol`` (scaled by ``max(1, ||S||_inf)``) -- calling this on a
    non-symmetric matrix is always a programming error.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    scale = max(1.0, float(np.linalg.norm(s, np.inf)))
    asym = float(np.linalg.norm(s - s.T, np.inf))
    if asym > symmetry_tol * scale:
        raise NumericalError(f"matrix is not symmetric: ||S - S^T|| = {asym:.3e}")
    return np.linalg.eigvalsh((s + s.T) / 2.0)


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    return float(np.max(np.abs(eig_general(np.asarray(a, dtype=float)))))


def is_schur(a: np.ndarray, margin: float = 0.0) -> bool:
    """True when every eigenvalue of ``a`` has modulus below ``1 - margin``."""
    return spectral_radius(a) < 1.0 - margin


def solve_discrete_lyapunov(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Solve ``A^T X A - X = -C`` for symmetric ``X`` with a residual check.

    ``C`` must be symmetric.  The solution is symmetrised and the residual
    ``||A^T X A - X + C|| / max(1, ||C||)`` is verified against ``1e-8``.
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    # scipy's convention solves a x a^H - x + q = 0, so pass the transpose.
    x = scipy.linalg.solve_discrete_lyapunov(a.T, c)
    x = (x + x.T) / 2.0
    scale = max(1.0, float(np.linalg.norm(c, np.inf)))
    residual = float(np.linalg.norm(a.T @ x @ a - x + c, np.inf)) / scale
    if residual > _RESIDUAL_TOL:
        raise NumericalError(f"Lyapunov residual {residual:.3e} exceeds {_RESIDUAL_TOL:.0e}")
    return x


@dataclass(frozen=True)
class Spectrum:
    """Laplacian spectrum plus the spectrum of the symmetric part.

    ``laplacian_eigs`` holds all ``n`` eigenvalues sorted by real part then
    imaginary part, with the (unique) zero eigenvalue snapped to exactly 0
    and listed first; for a strongly connected, weight-balanced graph the
    remaining ``n - 1`` eigenvalues lie strictly in the open right
    half-plane.  ``sym_eigs`` are the ascending eigenvalues of
    ``(L + L^T) / 2``; ``lambda2_hat`` and ``lambdaN_hat`` are its
    second-smallest and largest eigenvalues.
    """

    laplacian_eigs: tuple[complex, ...]
    sym_eigs: tuple[float, ...]
    lambda2_hat: float
    lambdaN_hat: float

    @classmethod
    def from_laplacian(cls, lap: np.ndarray, zero_tol: float = 1e-8) -> "Spectrum":
        """Build the spectrum of a Laplacian, checking its structure.

        Exactly one eigenvalue may fall within ``zero_tol`` (scaled by
        ``max(1, ||L||_inf)``) of zero; anything else raises
        :class:`GraphStructureError`, because it means the graph is not
        strongly connected (repeated zero) or the matrix is not a Laplacian.
        So does a nonzero eigenvalue with non-positive real part.
        """
        lap = np.asarray(lap, dtype=float)
        values = eig_general(lap)
        scale = max(1.0, float(np.linalg.norm(lap, np.inf)))
        near_zero = np.abs(values) <= zero_tol * scale
        if int(near_zero.sum()) != 1:
            raise GraphStructureError(
                f"expected exactly one zero eigenvalue, found {int(near_zero.sum())}"
                " (graph not strongly connected, or matrix not a Laplacian)"
            )
        nonzero = values[~near_zero]
        if np.any(nonzero.real <= 0.0):
            raise GraphStructureError(
                "a nonzero Laplacian eigenvalue has non-positive real part;"
                " the graph is not strongly connected and weight-balanced"
            )
        sym = eig_symmetric((lap + lap.T) / 2.0, symmetry_tol=1.0)  # symmetric by construction
        ordered = (0.0 + 0.0j,) + tuple(complex(v) for v in _sorted_by_real_then_imag(nonzero))
        return cls(
            laplacian_eigs=ordered,
            sym_eigs=tuple(float(v) for v in sym),
            lambda2_hat=float(sym[1]),
            lambdaN_hat=float(sym[-1]),
        )

    @property
    def n(self) -> int:
        return len(self.laplacian_eigs)

    @property
    def nonzero(self) -> tuple[complex, ...]:
        """The ``n - 1`` eigenvalues other than the structural zero."""
        return self.laplacian_eigs[1:]

    @property
    def slowest_real_part(self) -> float:
        """Smallest real part among the nonzero eigenvalues."""
        return min(v.real for v in self.nonzero)

    def to_dict(self) -> dict:
        """JSON-ready view; complex eigenvalues become ``[real, imag]`` pairs."""
        return {
            "laplacian_eigs": [[v.real, v.imag] for v in self.laplacian_eigs],
            "sym_eigs": list(self.sym_eigs),
            "lambda2_hat": self.lambda2_hat,
            "lambdaN_hat": self.lambdaN_hat,
        }
