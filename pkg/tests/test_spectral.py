import math

import numpy as np
import pytest
import scipy.linalg

from dacdelay.errors import GraphStructureError, NumericalError
from dacdelay.graph import laplacian, load_graph, ring_graph
from dacdelay.spectral import (
    Spectrum,
    eig_general,
    eig_symmetric,
    is_schur,
    solve_discrete_lyapunov,
    spectral_radius,
)
from dacdelay.verify import random_scwb_digraph


def test_eig_general_matches_characteristic_roots(rng):
    for _ in range(10):
        n = int(rng.integers(2, 7))
        a = rng.normal(size=(n, n))
        eigs = eig_general(a)
        # residual of the characteristic polynomial via trace/determinant checks
        assert abs(eigs.sum() - np.trace(a)) < 1e-8 * max(1.0, abs(np.trace(a)))
        det = np.prod(eigs)
        assert abs(det - np.linalg.det(a)) < 1e-8 * max(1.0, abs(np.linalg.det(a)))


def test_eig_general_sorted_by_real_then_imag():
    a = np.diag([3.0, -1.0, 2.0])
    eigs = eig_general(a)
    assert np.allclose(eigs, [-1.0, 2.0, 3.0])
    ring = eig_general(laplacian(ring_graph(6)))
    reals = ring.real
    assert all(reals[i] <= reals[i + 1] + 1e-12 for i in range(5))


def test_ring_eigenvalues_are_circulant():
    # the directed n-cycle Laplacian is circulant: eigenvalues 1 - exp(2*pi*i*k/n)
    n = 6
    eigs = np.sort_complex(eig_general(laplacian(ring_graph(n))))
    expected = np.sort_complex(
        np.array([1.0 - np.exp(2j * math.pi * k / n) for k in range(n)])
    )
    assert np.abs(eigs - expected).max() < 1e-10


def test_eig_symmetric_rejects_asymmetry():
    with pytest.raises(NumericalError):
        eig_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    vals = eig_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(vals, [1.0, 3.0])


def test_spectral_radius_and_schur():
    a = np.array([[0.0, 1.0], [-0.25, 0.0]])
    assert abs(spectral_radius(a) - 0.5) < 1e-12
    assert is_schur(a)
    assert not is_schur(np.eye(2))
    assert not is_schur(a, margin=0.6)


def test_solve_discrete_lyapunov_residual(rng):
    for _ in range(5):
        n = int(rng.integers(2, 8))
        a = rng.normal(size=(n, n))
        a *= 0.8 / max(spectral_radius(a), 1e-9)
        c = np.eye(n)
        x = solve_discrete_lyapunov(a, c)
        assert np.abs(x - x.T).max() < 1e-12  # symmetrized
        assert np.abs(a.T @ x @ a - x + c).max() < 1e-8
        # agrees with the library solver it wraps
        ref = scipy.linalg.solve_discrete_lyapunov(a.T, c)
        assert np.abs(x - (ref + ref.T) / 2.0).max() < 1e-8


def test_spectrum_from_ring_laplacian(ring6):
    spec = Spectrum.from_laplacian(laplacian(ring6))
    assert spec.n == 6
    assert spec.laplacian_eigs[0] == 0.0 + 0.0j  # structural zero snapped, listed first
    assert len(spec.nonzero) == 5
    assert min(v.real for v in spec.nonzero) > 0.0
    assert abs(spec.slowest_real_part - 0.5) < 1e-10
    # symmetric part of the directed ring is the undirected ring: eigenvalues
    # 1 - cos(2 pi k / 6) doubled up
    assert abs(spec.lambda2_hat - 0.5) < 1e-10
    assert abs(spec.lambdaN_hat - 2.0) < 1e-10
    assert np.allclose(sorted(spec.sym_eigs), [0.0, 0.5, 0.5, 1.5, 1.5, 2.0], atol=1e-10)


def test_spectrum_rejects_multiple_zero_eigenvalues():
    # two disjoint 2-cycles: weight-balanced but disconnected, so the zero
    # eigenvalue is not simple
    g = load_graph([(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)], n=4)
    with pytest.raises(GraphStructureError):
        Spectrum.from_laplacian(laplacian(g))


def test_spectrum_on_random_graphs(rng):
    for _ in range(10):
        g = random_scwb_digraph(rng)
        spec = Spectrum.from_laplacian(laplacian(g))
        assert spec.n == g.n
        assert spec.lambda2_hat > 0.0
        assert spec.lambdaN_hat >= spec.lambda2_hat
        assert all(v.real > 0 for v in spec.nonzero)
        # eigenvalues of a real matrix come in conjugate pairs
        eigs = np.array(spec.nonzero)
        assert np.abs(np.sort_complex(eigs) - np.sort_complex(eigs.conj())).max() < 1e-8


def test_spectrum_to_dict_is_json_ready(ring6):
    d = Spectrum.from_laplacian(laplacian(ring6)).to_dict()
    assert d["laplacian_eigs"][0] == [0.0, 0.0]
    assert len(d["sym_eigs"]) == 6
    assert isinstance(d["lambda2_hat"], float) and isinstance(d["lambdaN_hat"], float)
