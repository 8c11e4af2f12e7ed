import cmath
import math

import numpy as np
import pytest
from scipy.special import lambertw as scipy_lambertw

from dacdelay.errors import ParameterError
from dacdelay.lambertw import lambert_w, w0_series


def test_known_values():
    # Omega constant: W_0(1) solves w e^w = 1
    assert abs(lambert_w(1.0) - 0.5671432904097838) < 1e-14
    assert abs(lambert_w(0.1) - 0.09127652716086226) < 1e-14
    assert lambert_w(0.0) == 0.0
    assert abs(lambert_w(math.e) - 1.0) < 1e-14
    # branch point: both real branches meet at -1
    assert abs(lambert_w(-1.0 / math.e, 0) - (-1.0)) < 1e-6
    assert abs(lambert_w(-1.0 / math.e, -1) - (-1.0)) < 1e-6


def test_zero_only_on_principal_branch():
    with pytest.raises(ParameterError):
        lambert_w(0.0, k=-1)
    with pytest.raises(ParameterError):
        lambert_w(0.0, k=1)


def test_defining_identity_dense_sampling(rng):
    pts = rng.uniform(-4.0, 4.0, size=(400, 2))
    for re, im in pts:
        z = complex(re, im)
        if z == 0:
            continue
        for k in (-1, 0, 1):
            w = lambert_w(z, k)
            assert abs(w * cmath.exp(w) - z) <= 1e-12 * max(1.0, abs(z))


def test_agrees_with_scipy_across_branches(rng):
    pts = [complex(x, 0.0) for x in np.linspace(-30.0, 30.0, 241) if x != 0.0]
    pts += [complex(*p) for p in rng.uniform(-6.0, 6.0, size=(300, 2))]
    pts += [complex(*p) * 500.0 for p in rng.uniform(-1.0, 1.0, size=(50, 2))]
    for z in pts:
        if z == 0:
            continue
        for k in (-1, 0, 1, 2, -3):
            mine = lambert_w(z, k)
            ref = scipy_lambertw(z, k)
            assert abs(mine - ref) <= 1e-9 * max(1.0, abs(ref)), (z, k)


def test_negative_real_axis_principal_branch():
    # below the branch point the principal value is complex with
    # imaginary part in (0, pi): the limit from the upper side of the cut
    for x in np.linspace(-0.999 / math.e, -80.0, 173):
        w = lambert_w(complex(x, 0.0), 0)
        assert 0.0 <= w.imag < math.pi
        assert abs(w * cmath.exp(w) - x) <= 1e-12 * max(1.0, abs(x))


def test_branch_minus_one_real_segment():
    # k=-1 is real on (-1/e, 0)
    for x in (-0.3, -0.2, -0.05, -1e-4):
        w = lambert_w(x, -1)
        assert abs(w.imag) < 1e-12
        assert w.real <= -1.0


def test_conjugate_symmetry(rng):
    for re, im in rng.uniform(-3.0, 3.0, size=(50, 2)):
        z = complex(re, abs(im) + 1e-3)
        assert abs(lambert_w(z.conjugate(), 0) - lambert_w(z, 0).conjugate()) < 1e-10
        # branches mirror: W_{-k}(conj z) = conj W_k(z)
        assert abs(lambert_w(z.conjugate(), -1) - lambert_w(z, 1).conjugate()) < 1e-10


def test_series_matches_iteration_inside_disc(rng):
    radii = rng.uniform(0.0, 0.95 / math.e, size=60)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=60)
    for r, a in zip(radii, angles):
        z = r * cmath.exp(1j * a)
        assert abs(w0_series(z) - lambert_w(z, 0)) < 1e-10


def test_series_rejects_outside_radius():
    with pytest.raises(ParameterError):
        w0_series(0.5)


def test_branch_cut_resolves_from_above():
    # -0.0 imaginary part is treated as the limit from the upper half-plane
    below = lambert_w(complex(-2.0, -0.0), 0)
    above = lambert_w(complex(-2.0, 0.0), 0)
    assert below == above
    assert above.imag > 0.0
