"""Self-contained invariant suite, runnable from the command line.

Every check here re-derives one of the package's structural or numerical
guarantees from scratch on freshly generated instances: graph algebra,
eigenvalue identities, the Lambert W defining equation, bound dominance
and sign flips at the admissibility boundaries, envelope certificates,
conservation laws and integrator order.  ``run_all`` executes the whole
suite and reports per-check pass/fail; a check name can be *injected*
with a deliberate fault to demonstrate that the suite actually detects
violations (used by the command-line ``verify --inject``).

The suite is a smoke-level mirror of the test suite: smaller instance
counts, a few seconds total, no external files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, sim
from ._kernels import ct_delay_rk4
from .errors import ParameterError
from .graph import (
    Digraph,
    chorded_ring_graph,
    disagreement_basis,
    laplacian,
    load_graph,
    projector,
    ring_graph,
    validate,
)
from .lambertw import lambert_w, w0_series
from .signals import Constant, Sinusoid, sampled_hold_catalog, smooth_catalog
from .spectral import Spectrum, eig_general, is_schur, spectral_radius

__all__ = ["CheckResult", "run_all", "check_names", "random_scwb_digraph", "random_undirected_graph"]


class CheckFailed(Exception):
    """A verification check found a violated invariant."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------------------
# Instance generators (cycle sums are exactly weight-balanced by construction)
# ---------------------------------------------------------------------------


def random_scwb_digraph(rng: np.random.Generator, n_min: int = 3, n_max: int = 8) -> Digraph:
    """Random strongly connected, weight-balanced digraph.

    Superimposes a full-length random directed cycle (guaranteeing strong
    connectivity) with one to three shorter random cycles, each with a
    positive weight.  Sums of directed cycles are exactly weight-balanced.
    """
    n = int(rng.integers(n_min, n_max + 1))
    weights: dict[tuple[int, int], float] = {}

    def add_cycle(nodes: list[int], w: float) -> None:
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            weights[(a, b)] = weights.get((a, b), 0.0) + w

    add_cycle(list(rng.permutation(n)), float(rng.uniform(0.2, 1.5)))
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(2, n + 1))
        subset = list(rng.permutation(n)[:size])
        add_cycle(subset, float(rng.uniform(0.2, 1.5)))
    return load_graph([(i, j, w) for (i, j), w in weights.items()], n=n)


def random_undirected_graph(rng: np.random.Generator, n_min: int = 3, n_max: int = 8) -> Digraph:
    """Random connected undirected graph (spanning tree plus extra edges)."""
    n = int(rng.integers(n_min, n_max + 1))
    pairs: set[tuple[int, int]] = set()
    order = list(rng.permutation(n))
    for idx in range(1, n):
        a = order[idx]
        b = order[int(rng.integers(0, idx))]
        pairs.add((min(a, b), max(a, b)))
    for _ in range(int(rng.integers(0, n))):
        a, b = rng.integers(0, n, size=2)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    edges = []
    for a, b in sorted(pairs):
        w = float(rng.uniform(0.3, 1.5))
        edges.append((int(a), int(b), w))
        edges.append((int(b), int(a), w))
    return load_graph(edges, n=n)


# ---------------------------------------------------------------------------
# Checks.  Each takes (rng, inject) and raises CheckFailed on violation;
# inject=True plants a deliberate fault that the check must then report.
# ---------------------------------------------------------------------------


def _check_laplacian_zero_row_sum(rng: np.random.Generator, inject: bool) -> str:
    for _ in range(8):
        g = random_scwb_digraph(rng)
        lap = laplacian(g)
        if inject:
            lap = lap.copy()
            lap[0, -1] += 1e-3
        row = float(np.abs(lap @ np.ones(g.n)).max())
        col = float(np.abs(np.ones(g.n) @ lap).max())
        if row > 1e-9 or col > 1e-9:
            raise CheckFailed(f"row/column sums of L not zero: {row:.2e}, {col:.2e}")
    return "8 random graphs"


def _check_disagreement_basis(rng: np.random.Generator, inject: bool) -> str:
    for n in (2, 3, 5, 8, 13):
        basis = disagreement_basis(n)
        if inject:
            basis = basis * 1.001
        gram = float(np.abs(basis.T @ basis - np.eye(n - 1)).max())
        proj = float(np.abs(basis @ basis.T - projector(n)).max())
        if gram > 1e-12 or proj > 1e-12:
            raise CheckFailed(f"basis not orthonormal at n={n}: {gram:.2e}, {proj:.2e}")
    return "n in {2,3,5,8,13}"


def _check_ring_spectrum(rng: np.random.Generator, inject: bool) -> str:
    n = 6
    lap = laplacian(ring_graph(n))
    if inject:
        lap = lap.copy()
        lap[2, 3] += 5e-3
    got = np.sort_complex(eig_general(lap))
    want = np.sort_complex(np.array([1.0 - np.exp(2j * math.pi * k / n) for k in range(n)]))
    err = float(np.abs(got - want).max())
    if err > 1e-8:
        raise CheckFailed(f"ring eigenvalues deviate from circulant form by {err:.2e}")
    return "6-cycle circulant identity"


def _check_lambert_identity(rng: np.random.Generator, inject: bool) -> str:
    pts = rng.uniform(-3, 3, size=(60, 2))
    worst = 0.0
    for re, im in pts:
        z = complex(re, im)
        for branch in (-1, 0, 1):
            if z == 0 and branch != 0:
                continue
            w = lambert_w(z, branch)
            if inject:
                w += 1e-6
            worst = max(worst, abs(w * np.exp(w) - z) / max(1.0, abs(z)))
    if worst > 1e-12:
        raise CheckFailed(f"defining identity residual {worst:.2e} > 1e-12")
    return f"180 branch evaluations, residual {worst:.1e}"


def _check_lambert_series(rng: np.random.Generator, inject: bool) -> str:
    radii = rng.uniform(0.0, 0.95 / math.e, size=25)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=25)
    worst = 0.0
    for r, a in zip(radii, angles):
        z = r * complex(math.cos(a), math.sin(a))
        delta = 1e-7 if inject else 0.0
        worst = max(worst, abs(lambert_w(z, 0) - w0_series(z) + delta))
    if worst > 1e-10:
        raise CheckFailed(f"series vs iteration deviation {worst:.2e} > 1e-10")
    return f"25 points inside the series disc, deviation {worst:.1e}"


def _check_ct_degree_bound(rng: np.random.Generator, inject: bool) -> str:
    graphs = [ring_graph(6), chorded_ring_graph()] + [random_scwb_digraph(rng) for _ in range(8)]
    beta = 1.0
    for g in graphs:
        spectrum = Spectrum.from_laplacian(laplacian(g))
        tau_bar, _ = bounds.ct_admissible_delay(spectrum, beta)
        degree = bounds.ct_degree_bound(float(g.out_degrees().max()), beta)
        if inject:
            degree *= 1.2
        if degree > tau_bar + 1e-12:
            raise CheckFailed(f"degree bound {degree:.4g} exceeds tau_bar {tau_bar:.4g}")
    return f"{len(graphs)} graphs"


def _check_dt_degree_bound(rng: np.random.Generator, inject: bool) -> str:
    graphs = [ring_graph(6), chorded_ring_graph()] + [random_scwb_digraph(rng) for _ in range(8)]
    beta = 1.0
    for g in graphs:
        spectrum = Spectrum.from_laplacian(laplacian(g))
        d_max = float(g.out_degrees().max())
        delta = float(rng.uniform(0.25, 0.75)) / (beta * d_max)
        adm = bounds.dt_admissible_delay(spectrum, beta, delta)
        degree = bounds.dt_degree_bound(beta, delta, d_max)
        if inject:
            degree = adm.d_bar + 0.5
        if degree > adm.d_bar + 1e-12:
            raise CheckFailed(f"degree bound {degree:.4g} exceeds d_bar {adm.d_bar}")
    return f"{len(graphs)} graphs"


def _check_ct_root_sign_flip(rng: np.random.Generator, inject: bool) -> str:
    for _ in range(6):
        g = random_scwb_digraph(rng)
        spectrum = Spectrum.from_laplacian(laplacian(g))
        beta = float(rng.uniform(0.5, 2.0))
        tau_bar, _ = bounds.ct_admissible_delay(spectrum, beta)
        factor_low = 1.01 if inject else 0.99
        below = bounds.ct_rightmost_root(spectrum, beta, factor_low * tau_bar).real
        above = bounds.ct_rightmost_root(spectrum, beta, 1.01 * tau_bar).real
        if not (below < 0.0):
            raise CheckFailed(f"rightmost root {below:.3e} not negative below tau_bar")
        if not (above > 0.0):
            raise CheckFailed(f"rightmost root {above:.3e} not positive above tau_bar")
    return "6 graphs, roots flip sign across tau_bar"


def _augmented_from_graph(g: Digraph, beta: float, delta: float, d: int) -> np.ndarray:
    basis = disagreement_basis(g.n)
    h_scaled = -delta * beta * (basis.T @ laplacian(g) @ basis)
    return bounds.build_augmented(h_scaled, d)


def _check_dt_schur_flip(rng: np.random.Generator, inject: bool) -> str:
    done = 0
    while done < 6:
        g = random_scwb_digraph(rng)
        beta = float(rng.uniform(0.5, 2.0))
        d_max = float(g.out_degrees().max())
        delta = float(rng.uniform(0.25, 0.75)) / (beta * d_max)
        spectrum = Spectrum.from_laplacian(laplacian(g))
        adm = bounds.dt_admissible_delay(spectrum, beta, delta)
        if adm.d_bar > 40:
            continue
        d_stable = adm.max_admissible_d + (1 if inject else 0)
        stable = is_schur(_augmented_from_graph(g, beta, delta, d_stable))
        unstable = is_schur(_augmented_from_graph(g, beta, delta, adm.d_bar))
        if not stable:
            raise CheckFailed(f"augmented map not Schur at d={d_stable}")
        if unstable:
            raise CheckFailed(f"augmented map Schur at d_bar={adm.d_bar}")
        done += 1
    return "6 graphs, Schur property flips across d_bar"


def _check_gamma_region(rng: np.random.Generator, inject: bool) -> str:
    done = 0
    while done < 6:
        g = random_scwb_digraph(rng)
        beta = float(rng.uniform(0.5, 2.0))
        d_max = float(g.out_degrees().max())
        delta = float(rng.uniform(0.25, 0.75)) / (beta * d_max)
        spectrum = Spectrum.from_laplacian(laplacian(g))
        adm = bounds.dt_admissible_delay(spectrum, beta, delta)
        if adm.d_bar > 40:
            continue
        for d in range(adm.d_bar + 1):
            inside = all(
                bounds.gamma_region_contains(-beta * delta * lam, d) for lam in spectrum.nonzero
            )
            expected = d <= adm.max_admissible_d
            if inject:
                expected = not expected
            if inside != expected:
                raise CheckFailed(
                    f"region membership at d={d} is {inside}, admissibility says {expected}"
                )
        done += 1
    return "6 graphs, all delays up to d_bar"


def _check_dt_envelope_certificate(rng: np.random.Generator, inject: bool) -> str:
    for _ in range(5):
        g = random_scwb_digraph(rng)
        beta = float(rng.uniform(0.5, 2.0))
        d_max = float(g.out_degrees().max())
        delta = float(rng.uniform(0.25, 0.75)) / (beta * d_max)
        spectrum = Spectrum.from_laplacian(laplacian(g))
        adm = bounds.dt_admissible_delay(spectrum, beta, delta)
        d = min(adm.max_admissible_d, 3)
        basis = disagreement_basis(g.n)
        h_scaled = -delta * beta * (basis.T @ laplacian(g) @ basis)
        cert = bounds.dt_envelope_certificate(h_scaled, d)
        # the fault claims a faster rate than certified, which must show
        # up as a positive decay-inequality residual
        omega = max(0.0, cert.omega_bar - 0.2) if inject else cert.omega_bar
        size = cert.a_aug.shape[0]
        residual = cert.a_aug.T @ cert.q @ cert.a_aug - cert.q + (1.0 - omega**2) * np.eye(size)
        lam_max = float(np.linalg.eigvalsh((residual + residual.T) / 2.0).max())
        if lam_max > 1e-8:
            raise CheckFailed(f"certificate residual eigenvalue {lam_max:.2e} > 1e-8")
        q_eigs = np.linalg.eigvalsh((cert.q + cert.q.T) / 2.0)
        if q_eigs[0] <= 0.0 or q_eigs[-1] > 1.0 + 1e-12:
            raise CheckFailed(f"witness not within (0, I]: eigs [{q_eigs[0]:.2e}, {q_eigs[-1]:.6f}]")
        if cert.k_bar < 1.0:
            raise CheckFailed(f"k_bar {cert.k_bar:.4g} < 1")
        # geometric envelope on random unit histories
        for _ in range(20):
            state = rng.normal(size=size)
            state /= np.linalg.norm(state)
            x = state.copy()
            for k in range(1, 60):
                x = cert.a_aug @ x
                if np.linalg.norm(x) > cert.k_bar * cert.omega_bar**k + 1e-12:
                    raise CheckFailed(
                        f"envelope violated at step {k}: {np.linalg.norm(x):.4g} >"
                        f" {cert.k_bar * cert.omega_bar**k:.4g}"
                    )
    return "5 graphs, certificate + 20 random histories each"


def _check_ct_envelope_dominates(rng: np.random.Generator, inject: bool) -> str:
    g = ring_graph(6)
    beta, tau = 1.0, 0.2
    spectrum = Spectrum.from_laplacian(laplacian(g))
    rho = bounds.ct_decay_rate(spectrum, beta, tau)
    k_tau = bounds.ct_envelope_gain(g, beta, tau, grid=1500)
    if inject:
        k_tau *= 0.5
    basis = disagreement_basis(g.n)
    h_sub = -beta * (basis.T @ laplacian(g) @ basis)
    horizon = 10.0 / rho
    m = max(1, int(round(tau / (horizon / 3000))))
    h = tau / m
    k_steps = int(math.ceil(horizon / h - 1e-9))
    phi = ct_delay_rk4(h_sub, np.zeros((2 * k_steps + 1, g.n - 1)), m, h, k_steps, np.eye(g.n - 1))
    norms = np.linalg.norm(phi, ord=2, axis=(1, 2))
    envelope = k_tau * np.exp(-rho * np.arange(k_steps + 1) * h)
    margin = float((norms / envelope).max())
    if margin > 1.0 + 1e-3:
        raise CheckFailed(f"fundamental-matrix norm exceeds envelope by factor {margin:.6f}")
    return f"ring tau=0.2, worst norm/envelope ratio {margin:.6f}"


def _check_dt_conservation(rng: np.random.Generator, inject: bool) -> str:
    g = random_scwb_digraph(rng)
    n = g.n
    beta = 1.0
    d_max = float(g.out_degrees().max())
    delta = 0.5 / d_max
    signals = sampled_hold_catalog(n, seed=7)
    traj = sim.simulate_dt(g, beta, delta, 1, signals, 10_000)
    z = traj.x - traj.reference
    drift = float(np.abs(z.sum(axis=1)).max())
    if inject:
        drift += 1e-6
    if drift > 1e-9:
        raise CheckFailed(f"sum of internal states drifts by {drift:.2e} over 10^4 steps")
    return f"10^4 steps, drift {drift:.1e}"


def _check_delayed_exponential(rng: np.random.Generator, inject: bool) -> str:
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(0, 4))
        # magnitudes representative of the scaled update matrices the
        # formula is used on; much larger entries make the alternating
        # binomial sum shed digits to cancellation
        a = rng.uniform(-0.3, 0.3, size=(n, n))
        if inject:
            a_formula = a + 1e-6
        else:
            a_formula = a
        history = [np.eye(n)] * (d + 1)  # sliding window X(k-d), ..., X(k)
        for k in range(31):
            formula = sim.delayed_exponential(a_formula, d, k)
            worst = max(worst, float(np.abs(formula - history[-1]).max()))
            history.append(history[-1] + a @ history[0])
            history.pop(0)
    if worst > 1e-10:
        raise CheckFailed(f"formula vs recurrence deviation {worst:.2e} > 1e-10")
    return f"10 matrices, k <= 30, deviation {worst:.1e}"


def _check_dt_formula(rng: np.random.Generator, inject: bool) -> str:
    g = random_scwb_digraph(rng)
    beta = 1.0
    d_max = float(g.out_degrees().max())
    delta = 0.4 / d_max
    d = 1
    signals = sampled_hold_catalog(g.n, seed=11)
    steps = 120
    traj = sim.simulate_dt(g, beta, delta, d, signals, steps)
    basis = disagreement_basis(g.n)
    worst = 0.0
    for k in (0, 1, 5, 40, steps):
        direct = basis.T @ traj.x[k]
        formula = sim.dt_trajectory_formula(g, beta, delta, d, signals, k)
        if inject and k == 40:
            formula = formula + 1e-6
        scale = max(1.0, float(np.linalg.norm(direct)))
        worst = max(worst, float(np.linalg.norm(direct - formula)) / scale)
    if worst > 1e-9:
        raise CheckFailed(f"superposition formula deviates from iteration by {worst:.2e}")
    return f"120-step run, deviation {worst:.1e}"


def _check_ct_order(rng: np.random.Generator, inject: bool) -> str:
    g = ring_graph(6)
    beta, tau, horizon = 1.0, 0.2, 10.0
    signals = [Sinusoid(0.5, 0.6 + 0.1 * i) for i in range(6)]
    finals = []
    for h in (0.02, 0.01, 0.005):
        traj = sim.simulate_ct(g, beta, tau, signals, h, horizon)
        finals.append(traj.x[-1])
    err_coarse = float(np.linalg.norm(finals[0] - finals[2]))
    err_fine = float(np.linalg.norm(finals[1] - finals[2]))
    # Richardson: with error ~ C h^4, coarse/fine differences to the finest
    # run are ~16 C h^4 vs ~... comparing (h -> h/2) halvings
    ratio = err_coarse / max(err_fine, 1e-300)
    if inject:
        ratio /= 4.0
    # e(h)-e(h/4) vs e(h/2)-e(h/4): ratio ~ (16-1)/(4-1)*... expect about
    # (h^4 - (h/4)^4)/((h/2)^4 - (h/4)^4) = (256-1)/(16-1) = 17
    if not 8.0 <= ratio <= 40.0:
        raise CheckFailed(f"step-halving error ratio {ratio:.2f} outside [8, 40] (expected ~17)")
    return f"error ratio {ratio:.1f} (4th-order expectation ~17)"


def _check_rate_monotone(rng: np.random.Generator, inject: bool) -> str:
    spectrum = Spectrum.from_laplacian(laplacian(ring_graph(6)))
    beta = 1.0
    tau_bar, _ = bounds.ct_admissible_delay(spectrum, beta)
    taus = np.linspace(0.0, 0.95 * tau_bar, 10)
    rates = [bounds.ct_decay_rate(spectrum, beta, float(t)) for t in taus]
    if inject:
        rates[4], rates[5] = rates[5], rates[4]
    for a, b in zip(rates, rates[1:]):
        if b > a + 1e-12:
            raise CheckFailed(f"decay rate increased along the delay grid: {a:.4g} -> {b:.4g}")
    return "10-point delay grid, nonincreasing"


def _check_undirected_one_step(rng: np.random.Generator, inject: bool) -> str:
    beta = 1.0
    for _ in range(8):
        g = random_undirected_graph(rng)
        d_max = float(g.out_degrees().max())
        # restricted stepsize regime in which the one-step guarantee is provable
        delta = float(rng.uniform(0.1, 1.0)) / (2.0 * beta * d_max)
        if inject:
            delta = 0.99 / (beta * d_max)
            g = load_graph([(0, 1, 1.0), (1, 0, 1.0)])
        spectrum = Spectrum.from_laplacian(laplacian(g))
        adm = bounds.dt_admissible_delay(spectrum, beta, delta)
        if adm.max_admissible_d < 1:
            raise CheckFailed(
                f"undirected graph with delta={delta:.4g} tolerates no delay"
                f" (d_hat_min={adm.d_hat_min:.4g})"
            )
    return "8 undirected graphs, delta <= 1/(2 beta d_max)"


def _check_static_exact(rng: np.random.Generator, inject: bool) -> str:
    g = ring_graph(6)
    signals = [Constant(v) for v in (1.0, -0.5, 2.0, 0.25, -1.5, 0.75)]
    traj_ct = sim.simulate_ct(g, 1.0, 0.25, signals, 0.025, 90.0)
    traj_dt = sim.simulate_dt(g, 1.0, 0.19, 2, signals, 3000)
    err_ct = traj_ct.steady_error
    err_dt = traj_dt.steady_error
    if inject:
        err_ct += 1e-3
    if err_ct > 1e-6 or err_dt > 1e-6:
        raise CheckFailed(f"static steady error too large: ct {err_ct:.2e}, dt {err_dt:.2e}")
    return f"ct {err_ct:.1e}, dt {err_dt:.1e}"


def _check_smooth_gamma(rng: np.random.Generator, inject: bool) -> str:
    signals = smooth_catalog(6)
    gamma = sim.signal_variation_gamma(signals, 40.0, "ct")
    same = sim.signal_variation_gamma([Sinusoid(0.5, 0.8)] * 6, 40.0, "ct")
    if inject:
        same += 0.01
    if not gamma > 0.0:
        raise CheckFailed("distinct smooth signals should have positive variation")
    if same > 1e-12:
        raise CheckFailed(f"identical signals should have zero variation, got {same:.2e}")
    return f"catalog gamma {gamma:.4f}, identical-signal gamma {same:.1e}"


_CHECKS: dict[str, Callable[[np.random.Generator, bool], str]] = {
    "laplacian-zero-row-sum": _check_laplacian_zero_row_sum,
    "disagreement-basis-orthonormal": _check_disagreement_basis,
    "ring-spectrum-circulant": _check_ring_spectrum,
    "lambert-defining-identity": _check_lambert_identity,
    "lambert-series-agreement": _check_lambert_series,
    "ct-degree-bound-dominated": _check_ct_degree_bound,
    "dt-degree-bound-dominated": _check_dt_degree_bound,
    "ct-root-sign-flip": _check_ct_root_sign_flip,
    "dt-schur-flip": _check_dt_schur_flip,
    "gamma-region-consistency": _check_gamma_region,
    "dt-envelope-certificate": _check_dt_envelope_certificate,
    "ct-envelope-dominates": _check_ct_envelope_dominates,
    "dt-state-conservation": _check_dt_conservation,
    "delayed-exponential-equivalence": _check_delayed_exponential,
    "dt-superposition-formula": _check_dt_formula,
    "ct-integrator-order": _check_ct_order,
    "ct-rate-monotone-ring": _check_rate_monotone,
    "undirected-one-step-guarantee": _check_undirected_one_step,
    "static-input-exactness": _check_static_exact,
    "signal-variation-gamma": _check_smooth_gamma,
}


def check_names() -> list[str]:
    """Names of all registered verification checks, in execution order."""
    return list(_CHECKS)


def run_all(seed: int = 20260824, inject: str | None = None) -> list[CheckResult]:
    """Run every check with a seeded generator; optionally fault one by name.

    ``inject`` plants a deliberate violation inside the named check, which
    must then fail -- the mechanism that proves the suite has teeth.
    """
    if inject is not None and inject not in _CHECKS:
        raise ParameterError(
            f"unknown check {inject!r}; valid names: {', '.join(_CHECKS)}"
        )
    results = []
    for index, (name, func) in enumerate(_CHECKS.items()):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        try:
            detail = func(rng, inject == name)
            results.append(CheckResult(name=name, passed=True, detail=detail))
        except CheckFailed as exc:
            results.append(CheckResult(name=name, passed=False, detail=str(exc)))
        except Exception as exc:  # noqa: BLE001 - a crash is a failure with context
            results.append(CheckResult(name=name, passed=False, detail=f"{type(exc).__name__}: {exc}"))
    return results
