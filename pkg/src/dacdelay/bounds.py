"""Admissible delays, decay rates, envelopes and tracking-error bounds.

Everything here answers one of four questions about the delayed consensus
tracker on a strongly connected, weight-balanced digraph:

* *How much delay is tolerable?*  :func:`ct_admissible_delay` /
  :func:`dt_admissible_delay` give the exact spectral answers,
  :func:`ct_degree_bound` / :func:`dt_degree_bound` the cheaper
  degree-based lower bounds, :func:`dt_stepsize_range` the stepsize
  interval in which the discrete iteration can work at all.
* *How fast does disagreement decay?*  :func:`ct_decay_rate` (via the
  principal Lambert W branch) and the certified pair from
  :func:`dt_envelope`.
* *With what overshoot?*  :func:`ct_envelope_gain` (measured on the
  fundamental matrix) and the same :func:`dt_envelope` certificate.
* *How large can the steady tracking error be?*
  :func:`ct_tracking_bound` / :func:`dt_tracking_bound`, combining the
  rate/gain pair with the input-variation constant.

:func:`build_ct_report` and :func:`build_dt_report` bundle the answers
into serializable report objects.  :func:`ct_rightmost_root` and
:func:`gamma_region_contains` are independent cross-checks of the two
admissibility computations, kept public for the verification suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ct_delay_rk4
from .errors import DelayInadmissibleError, ParameterError
from .graph import Digraph, disagreement_basis, laplacian
from .lambertw import lambert_w
from .spectral import Spectrum, eig_symmetric, solve_discrete_lyapunov, spectral_radius

__all__ = [
    "AlgorithmParams",
    "CtDelayReport",
    "DtDelayReport",
    "EnvelopeCertificate",
    "ct_admissible_delay",
    "ct_degree_bound",
    "ct_decay_rate",
    "ct_envelope_gain",
    "ct_tracking_bound",
    "ct_rightmost_root",
    "dt_stepsize_range",
    "dt_admissible_delay",
    "DtAdmissibleDelay",
    "dt_degree_bound",
    "gamma_region_contains",
    "build_augmented",
    "dt_envelope",
    "dt_envelope_certificate",
    "dt_tracking_bound",
    "build_ct_report",
    "build_dt_report",
]


@dataclass(frozen=True)
class AlgorithmParams:
    """Validated tracker parameters: gain, and the delay/stepsize in use.

    ``tau`` is the continuous-time delay in seconds; ``delta`` and ``d``
    are the discrete stepsize (seconds) and delay (steps).  Unused fields
    stay ``None``.
    """

    beta: float
    tau: float | None = None
    delta: float | None = None
    d: int | None = None

    def __post_init__(self) -> None:
        if self.beta <= 0.0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if self.tau is not None and self.tau < 0.0:
            raise ParameterError(f"tau must be nonnegative, got {self.tau}")
        if self.delta is not None and self.delta <= 0.0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if self.d is not None and (self.d < 0 or int(self.d) != self.d):
            raise ParameterError(f"d must be a nonnegative integer, got {self.d}")


# ---------------------------------------------------------------------------
# Continuous time
# ---------------------------------------------------------------------------


def ct_admissible_delay(spectrum: Spectrum, beta: float) -> tuple[float, np.ndarray]:
    """Largest admissible continuous delay, and the per-eigenvalue margins.

    Each nonzero Laplacian eigenvalue ``lambda_i`` tolerates
    ``tau_i = (pi/2 - |arg lambda_i|) / (beta |lambda_i|)`` before its
    delayed mode crosses the imaginary axis; the network tolerates the
    minimum.  Real eigenvalues (undirected graphs) give
    ``(pi/2) / (beta lambda_i)``, so the overall bound reduces to
    ``pi / (2 beta lambda_N)`` there.

    Returns ``(tau_bar, taus)`` with ``taus`` aligned to
    ``spectrum.nonzero``.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    taus = np.array(
        [
            (math.pi / 2.0 - abs(math.atan2(lam.imag, lam.real))) / (beta * abs(lam))
            for lam in spectrum.nonzero
        ]
    )
    return float(taus.min()), taus


def ct_degree_bound(d_max: float, beta: float) -> float:
    """Degree-based lower bound ``1 / (2 beta d_max)`` on the delay margin."""
    if d_max <= 0.0 or beta <= 0.0:
        raise ParameterError("d_max and beta must be positive")
    return 1.0 / (2.0 * beta * d_max)


def ct_decay_rate(spectrum: Spectrum, beta: float, tau: float) -> float:
    """Exponential decay rate of the disagreement under delay ``tau``.

    For ``tau > 0`` the slowest characteristic root of the delayed
    disagreement dynamics lies on the principal Lambert W branch, giving
    ``rho = -(1/tau) * max_i Re W_0(-beta lambda_i tau)``; the ``tau = 0``
    limit is ``beta * min_i Re lambda_i``.  Raises
    :class:`DelayInadmissibleError` at or beyond the admissible bound,
    where no positive rate exists.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if tau < 0.0:
        raise ParameterError(f"tau must be nonnegative, got {tau}")
    tau_bar, _ = ct_admissible_delay(spectrum, beta)
    if tau >= tau_bar:
        raise DelayInadmissibleError(
            f"tau={tau} is not admissible (tau_bar={tau_bar:.6g}); no decay rate exists"
        )
    if tau == 0.0:
        return beta * spectrum.slowest_real_part
    worst = max((lambert_w(-beta * lam * tau, 0).real for lam in spectrum.nonzero))
    return -worst / tau


def ct_rightmost_root(
    spectrum: Spectrum, beta: float, tau: float, branches: tuple[int, ...] = (-1, 0, 1)
) -> complex:
    """Rightmost characteristic root of the delayed disagreement dynamics.

    Scans ``s = W_k(-beta lambda_i tau) / tau`` over the given Lambert W
    branches and all nonzero eigenvalues, returning the root with the
    largest real part.  Its sign is an independent stability oracle: it
    crosses zero exactly at the admissible-delay bound.
    """
    if tau <= 0.0:
        raise ParameterError(f"root scan needs tau > 0, got {tau}")
    best: complex | None = None
    for lam in spectrum.nonzero:
        z = -beta * complex(lam) * tau
        for branch in branches:
            s = lambert_w(z, branch) / tau
            if best is None or s.real > best.real:
                best = s
    assert best is not None
    return best


def ct_envelope_gain(
    g: Digraph,
    beta: float,
    tau: float,
    horizon: float | None = None,
    grid: int = 2000,
) -> float:
    """Overshoot constant ``k_tau`` of the disagreement decay envelope.

    Integrates the fundamental matrix ``Phi(t)`` of the zero-input delayed
    disagreement dynamics (identity initial condition, zero pre-history)
    and measures ``k_tau = max_t ||Phi(t)|| e^{rho t}``, the smallest
    constant for which ``||Phi(t)|| <= k_tau e^{-rho t}`` on the grid.
    The measurement runs on the requested grid and once more at double
    resolution, reporting the larger maximum.  ``k_tau >= 1`` always
    (``Phi(0) = I``).

    ``horizon`` defaults to ``10 / rho``; anything below ``5 / rho`` is
    rejected as too short to see the envelope.
    """
    spectrum = Spectrum.from_laplacian(laplacian(g))
    rho = ct_decay_rate(spectrum, beta, tau)  # validates beta, tau, admissibility
    if horizon is None:
        horizon = 10.0 / rho
    elif horizon < 5.0 / rho:
        raise ParameterError(
            f"envelope horizon {horizon:.6g} is too short: need at least 5/rho = {5.0 / rho:.6g}"
        )
    if grid < 10:
        raise ParameterError(f"grid must have at least 10 steps, got {grid}")

    basis = disagreement_basis(g.n)
    h_sub = -beta * (basis.T @ laplacian(g) @ basis)
    best = 1.0
    for steps in (grid, 2 * grid):
        h_nom = horizon / steps
        if tau > 0.0:
            m = max(1, int(round(tau / h_nom)))
            h = tau / m
        else:
            m = 0
            h = h_nom
        k_steps = int(math.ceil(horizon / h - 1e-9))
        f_half = np.zeros((2 * k_steps + 1, g.n - 1))
        phi = ct_delay_rk4(h_sub, f_half, m, h, k_steps, np.eye(g.n - 1))
        norms = np.linalg.norm(phi, ord=2, axis=(1, 2))
        times = np.arange(k_steps + 1) * h
        best = max(best, float(np.max(norms * np.exp(rho * times))))
    return best


def ct_tracking_bound(gamma: float, k_tau: float, rho_tau: float) -> float:
    """Ultimate tracking-error bound ``gamma * k_tau / rho_tau``.

    Zero input variation (static references) gives a zero bound: the
    tracker reaches the exact average.
    """
    if gamma < 0.0:
        raise ParameterError(f"gamma must be nonnegative, got {gamma}")
    if rho_tau <= 0.0:
        raise ParameterError(f"decay rate must be positive, got {rho_tau}")
    if k_tau < 1.0:
        raise ParameterError(f"envelope gain must be >= 1, got {k_tau}")
    return gamma * k_tau / rho_tau


# ---------------------------------------------------------------------------
# Discrete time
# ---------------------------------------------------------------------------


def dt_stepsize_range(beta: float, d_max: float) -> tuple[float, float]:
    """Open stepsize interval ``(0, 1/(beta*d_max))`` for the iteration."""
    if beta <= 0.0 or d_max <= 0.0:
        raise ParameterError("beta and d_max must be positive")
    return (0.0, 1.0 / (beta * d_max))


@dataclass(frozen=True)
class DtAdmissibleDelay:
    """Admissible discrete delay summary.

    ``per_eigenvalue_d_hats`` aligns with ``Spectrum.nonzero``;
    ``d_bar`` is the smallest integer strictly greater than
    ``d_hat_min``, and the admissible integers are exactly
    ``{0, ..., max_admissible_d} = {0, ..., d_bar - 1}``.
    """

    d_hat_min: float
    d_bar: int
    max_admissible_d: int
    per_eigenvalue_d_hats: tuple[float, ...]


def dt_admissible_delay(spectrum: Spectrum, beta: float, delta: float) -> DtAdmissibleDelay:
    """Admissible discrete delays from the eigenvalue phase/magnitude test.

    Each nonzero eigenvalue bounds the delay through
    ``d_hat_i = ((pi - 2|arg lambda_i|) / (2 asin(beta delta |lambda_i| / 2)) - 1) / 2``;
    real eigenvalues use ``arg = 0``.  The iteration is exponentially
    stable for integer delays up to ``max_admissible_d`` inclusive.
    """
    if beta <= 0.0 or delta <= 0.0:
        raise ParameterError("beta and delta must be positive")
    d_hats = []
    for lam in spectrum.nonzero:
        half = beta * delta * abs(lam) / 2.0
        if half >= 1.0:
            raise ParameterError(
                f"beta*delta*|lambda|/2 = {half:.6g} >= 1: stepsize far outside the stable range"
            )
        d_hats.append(
            ((math.pi - 2.0 * abs(math.atan2(lam.imag, lam.real))) / (2.0 * math.asin(half)) - 1.0)
            / 2.0
        )
    d_hat_min = min(d_hats)
    d_bar = math.floor(d_hat_min) + 1  # smallest integer strictly greater
    return DtAdmissibleDelay(
        d_hat_min=float(d_hat_min),
        d_bar=int(d_bar),
        max_admissible_d=int(d_bar - 1),
        per_eigenvalue_d_hats=tuple(float(v) for v in d_hats),
    )


def dt_degree_bound(beta: float, delta: float, d_max: float) -> float:
    """Degree-based lower bound ``((1/(beta*delta*d_max)) - 1) / 2`` on ``d_bar``."""
    if beta <= 0.0 or delta <= 0.0 or d_max <= 0.0:
        raise ParameterError("beta, delta and d_max must be positive")
    return 0.5 * (1.0 / (beta * delta * d_max) - 1.0)


def gamma_region_contains(z: complex, d: int) -> bool:
    """Membership in the delayed-iteration stability region for delay ``d``.

    The region is enclosed by the curve ``2i sin(phi/(2d+1)) e^{i phi}``,
    ``phi`` in ``[-pi/2, pi/2]``; writing ``z = r e^{i(pi/2 + phi)}`` (up
    to conjugation) membership means ``r < 2 sin(phi/(2d+1))`` strictly.
    The origin is inside for every ``d``; for ``d = 0`` the test reduces
    to ``|1 + z| < 1``.  Used as a cross-check of
    :func:`dt_admissible_delay` on the scaled eigenvalues
    ``-beta*delta*lambda_i``.
    """
    if d < 0 or int(d) != d:
        raise ParameterError(f"delay d must be a nonnegative integer, got {d}")
    z = complex(z)
    if z == 0.0:
        return True
    if z.real >= 0.0:
        return False
    mirrored = complex(z.real, abs(z.imag))  # the region is conjugate-symmetric
    phi = math.atan2(mirrored.imag, mirrored.real) - math.pi / 2.0
    return abs(z) < 2.0 * math.sin(phi / (2 * int(d) + 1))


def build_augmented(h_scaled: np.ndarray, d: int) -> np.ndarray:
    """Companion form of the delayed iteration ``x(k+1) = x(k) + H x(k-d)``.

    For ``d >= 1`` the state is the stacked history
    ``(x(k-d), ..., x(k))`` and the one-step map is the block-companion
    matrix with identity blocks on the superdiagonal and bottom row
    ``[H, 0, ..., 0, I]``; for ``d = 0`` it is simply ``I + H``.
    """
    if d < 0 or int(d) != d:
        raise ParameterError(f"delay d must be a nonnegative integer, got {d}")
    h_scaled = np.asarray(h_scaled, dtype=float)
    n_sub = h_scaled.shape[0]
    if h_scaled.shape != (n_sub, n_sub):
        raise ParameterError(f"H must be square, got shape {h_scaled.shape}")
    d = int(d)
    if d == 0:
        return np.eye(n_sub) + h_scaled
    size = (d + 1) * n_sub
    a_aug = np.zeros((size, size))
    for block in range(d):
        rows = slice(block * n_sub, (block + 1) * n_sub)
        cols = slice((block + 1) * n_sub, (block + 2) * n_sub)
        a_aug[rows, cols] = np.eye(n_sub)
    bottom = slice(d * n_sub, size)
    a_aug[bottom, 0:n_sub] = h_scaled
    a_aug[bottom, bottom] = np.eye(n_sub)
    return a_aug


@dataclass(frozen=True)
class EnvelopeCertificate:
    """Certified decay pair with its Lyapunov witness.

    The witness satisfies, with ``A`` the augmented one-step map:
    ``A^T Q A - Q = -(1 - omega_bar^2) I`` exactly (one Lyapunov solve),
    ``0 < Q <= I``, and hence ``A^T Q A <= omega_bar^2 Q``.  Together
    these certify ``||x(k)|| <= sqrt(k_bar) * omega_bar^k * ||x_aug(0)||``
    with ``k_bar = 1 / lambda_min(Q) >= 1``.
    """

    omega_bar: float
    k_bar: float
    q: np.ndarray
    a_aug: np.ndarray


def dt_envelope_certificate(h_scaled: np.ndarray, d: int) -> EnvelopeCertificate:
    """Certified geometric envelope for the delayed iteration.

    Builds the augmented map ``A``, solves one Lyapunov equation
    ``A^T W A - W = -I`` and sets ``Q = (1 - omega_bar^2) W`` where
    ``omega_bar`` is the larger of (a) the spectral radius plus a small
    admissibility margin and (b) the smallest value keeping ``Q <= I``.
    For normal ``A`` choice (a) binds, so ``omega_bar`` is the spectral
    radius up to the margin.  Raises :class:`DelayInadmissibleError` when
    the map is not Schur stable (delay out of the admissible range).
    """
    a_aug = build_augmented(h_scaled, d)
    radius = spectral_radius(a_aug)
    if radius >= 1.0:
        raise DelayInadmissibleError(
            f"delay d={d} is not admissible: augmented spectral radius {radius:.6g} >= 1"
        )
    witness = solve_discrete_lyapunov(a_aug, np.eye(a_aug.shape[0]))
    w_eigs = eig_symmetric(witness)
    lam_min, lam_max = float(w_eigs[0]), float(w_eigs[-1])
    base = radius + 1e-6 + 1e-3 * (1.0 - radius)
    if base >= 1.0:
        base = radius + 1e-3 * (1.0 - radius)
    floor_sq = 1.0 - (1.0 - 1e-9) / lam_max  # keeps Q <= I strictly
    omega_bar = max(base, math.sqrt(max(0.0, floor_sq)))
    q = (1.0 - omega_bar**2) * witness
    k_bar = 1.0 / ((1.0 - omega_bar**2) * lam_min)
    return EnvelopeCertificate(omega_bar=float(omega_bar), k_bar=float(k_bar), q=q, a_aug=a_aug)


def dt_envelope(h_scaled: np.ndarray, d: int) -> tuple[float, float]:
    """The ``(omega_bar, k_bar)`` pair of :func:`dt_envelope_certificate`."""
    cert = dt_envelope_certificate(h_scaled, d)
    return cert.omega_bar, cert.k_bar


def dt_tracking_bound(gamma: float, delta: float, k_bar: float, omega_bar: float) -> float:
    """Ultimate tracking-error bound ``gamma * delta * k_bar / (1 - omega_bar)``."""
    if gamma < 0.0:
        raise ParameterError(f"gamma must be nonnegative, got {gamma}")
    if delta <= 0.0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if k_bar < 1.0:
        raise ParameterError(f"envelope gain must be >= 1, got {k_bar}")
    if omega_bar >= 1.0:
        raise ParameterError(f"omega_bar must be < 1, got {omega_bar}")
    return gamma * delta * k_bar / (1.0 - omega_bar)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CtDelayReport:
    """Continuous-time delay analysis for one graph and one queried delay.

    Rate, gain and tracking fields are ``None`` when the queried ``tau``
    is not admissible (``admissible`` is then ``False``); the bound
    fields are always present.
    """

    beta: float
    tau: float
    tau_bar: float
    tau_degree_bound: float
    per_eigenvalue_taus: tuple[float, ...]
    admissible: bool
    rho_tau: float | None
    k_tau: float | None
    gamma: float | None
    tracking_bound: float | None

    def to_dict(self) -> dict:
        return {
            "mode": "ct",
            "beta": self.beta,
            "tau": self.tau,
            "tau_bar": self.tau_bar,
            "tau_degree_bound": self.tau_degree_bound,
            "per_eigenvalue_taus": list(self.per_eigenvalue_taus),
            "admissible": self.admissible,
            "rho_tau": self.rho_tau,
            "k_tau": self.k_tau,
            "gamma": self.gamma,
            "tracking_bound": self.tracking_bound,
        }


@dataclass(frozen=True)
class DtDelayReport:
    """Discrete-time delay analysis for one graph, stepsize and delay."""

    beta: float
    delta: float
    d: int
    stepsize_range_upper: float
    d_hat_min: float
    d_bar: int
    max_admissible_d: int
    d_degree_bound: float
    per_eigenvalue_d_hats: tuple[float, ...]
    admissible: bool
    omega_bar: float
    k_bar: float | None
    gamma: float | None
    tracking_bound: float | None

    def to_dict(self) -> dict:
        return {
            "mode": "dt",
            "beta": self.beta,
            "delta": self.delta,
            "d": self.d,
            "stepsize_range_upper": self.stepsize_range_upper,
            "d_hat_min": self.d_hat_min,
            "d_bar": self.d_bar,
            "max_admissible_d": self.max_admissible_d,
            "d_degree_bound": self.d_degree_bound,
            "per_eigenvalue_d_hats": list(self.per_eigenvalue_d_hats),
            "admissible": self.admissible,
            "omega_bar": self.omega_bar,
            "k_bar": self.k_bar,
            "gamma": self.gamma,
            "tracking_bound": self.tracking_bound,
        }


def build_ct_report(
    g: Digraph,
    beta: float,
    tau: float,
    gamma: float | None = None,
    envelope_horizon: float | None = None,
    envelope_grid: int = 2000,
) -> CtDelayReport:
    """Full continuous-time analysis of a graph at one queried delay.

    When ``tau`` is admissible the decay rate, envelope gain and (if
    ``gamma`` is supplied) the ultimate tracking bound are filled in;
    otherwise those fields are ``None`` and ``admissible`` is ``False``.
    """
    if tau < 0.0:
        raise ParameterError(f"tau must be nonnegative, got {tau}")
    spectrum = Spectrum.from_laplacian(laplacian(g))
    tau_bar, taus = ct_admissible_delay(spectrum, beta)
    d_max = float(g.out_degrees().max())
    degree = ct_degree_bound(d_max, beta)
    admissible = tau < tau_bar
    rho = k_tau = bound = None
    if admissible:
        rho = ct_decay_rate(spectrum, beta, tau)
        k_tau = ct_envelope_gain(g, beta, tau, horizon=envelope_horizon, grid=envelope_grid)
        if gamma is not None:
            bound = ct_tracking_bound(gamma, k_tau, rho)
    return CtDelayReport(
        beta=float(beta),
        tau=float(tau),
        tau_bar=tau_bar,
        tau_degree_bound=degree,
        per_eigenvalue_taus=tuple(float(v) for v in taus),
        admissible=admissible,
        rho_tau=rho,
        k_tau=k_tau,
        gamma=gamma,
        tracking_bound=bound,
    )


def build_dt_report(
    g: Digraph,
    beta: float,
    delta: float,
    d: int,
    gamma: float | None = None,
) -> DtDelayReport:
    """Full discrete-time analysis of a graph at one stepsize and delay.

    ``omega_bar`` is always reported: the certified envelope rate for
    admissible ``d``, the (>= 1) spectral radius of the augmented map for
    inadmissible ``d``.  ``k_bar`` and the tracking bound exist only in
    the admissible case.
    """
    if d < 0 or int(d) != d:
        raise ParameterError(f"delay d must be a nonnegative integer, got {d}")
    spectrum = Spectrum.from_laplacian(laplacian(g))
    d_max = float(g.out_degrees().max())
    lo, hi = dt_stepsize_range(beta, d_max)
    if not lo < delta < hi:
        raise ParameterError(f"stepsize delta={delta} outside the stable range (0, {hi:.6g})")
    admissibility = dt_admissible_delay(spectrum, beta, delta)
    degree = dt_degree_bound(beta, delta, d_max)
    basis = disagreement_basis(g.n)
    h_scaled = -delta * beta * (basis.T @ laplacian(g) @ basis)
    admissible = int(d) <= admissibility.max_admissible_d
    if admissible:
        omega_bar, k_bar = dt_envelope(h_scaled, int(d))
        bound = dt_tracking_bound(gamma, delta, k_bar, omega_bar) if gamma is not None else None
    else:
        omega_bar = spectral_radius(build_augmented(h_scaled, int(d)))
        k_bar = None
        bound = None
    return DtDelayReport(
        beta=float(beta),
        delta=float(delta),
        d=int(d),
        stepsize_range_upper=hi,
        d_hat_min=admissibility.d_hat_min,
        d_bar=admissibility.d_bar,
        max_admissible_d=admissibility.max_admissible_d,
        d_degree_bound=degree,
        per_eigenvalue_d_hats=admissibility.per_eigenvalue_d_hats,
        admissible=admissible,
        omega_bar=omega_bar,
        k_bar=k_bar,
        gamma=gamma,
        tracking_bound=bound,
    )
