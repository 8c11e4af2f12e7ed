import math

import numpy as np
import pytest

from dacdelay.errors import ParameterError
from dacdelay.signals import (
    ArctanRamp,
    Constant,
    Ramp,
    SampledHold,
    Sinusoid,
    Sum,
    constant_catalog,
    sample_derivatives,
    sample_values,
    sampled_hold_catalog,
    smooth_catalog,
)


def test_signals_are_one_sided():
    for s in (Constant(2.0), Sinusoid(1.0, 1.0, offset=3.0), Ramp(1.0), ArctanRamp(1.0, 1.0)):
        assert s.value(-0.5) == 0.0
        assert s.derivative(-0.5) == 0.0
    hold = SampledHold(seed=1)
    assert hold.value(-1.0) == 0.0


def test_scalar_and_array_evaluation_agree():
    s = Sinusoid(0.5, 0.8, phase=0.2, offset=1.0)
    ts = np.array([-1.0, 0.0, 0.3, 2.0])
    arr = s.value(ts)
    assert arr.shape == (4,)
    for t, v in zip(ts, arr):
        assert s.value(float(t)) == v
    # 2-d input keeps its shape
    grid = np.array([[0.1, 0.2], [0.3, 0.4]])
    assert s.value(grid).shape == (2, 2)


def test_sinusoid_value_and_derivative():
    s = Sinusoid(2.0, 3.0, phase=0.5, offset=1.0)
    t = 0.7
    assert abs(s.value(t) - (2.0 * math.sin(3.0 * t + 0.5) + 1.0)) < 1e-15
    assert abs(s.derivative(t) - 6.0 * math.cos(3.0 * t + 0.5)) < 1e-15


def test_ramp_and_arctan():
    assert Ramp(0.1).value(5.0) == 0.5
    assert Ramp(0.1).derivative(5.0) == 0.1
    a = ArctanRamp(2.0, 0.5)
    assert abs(a.value(2.0) - 2.0 * math.atan(1.0)) < 1e-15
    assert abs(a.derivative(2.0) - 2.0 * 0.5 / (1.0 + 1.0)) < 1e-15


def test_sum_and_operator():
    s = Sinusoid(1.0, 1.0) + Constant(2.0)
    assert isinstance(s, Sum)
    assert abs(s.value(1.0) - (math.sin(1.0) + 2.0)) < 1e-15
    assert abs(s.derivative(1.0) - math.cos(1.0)) < 1e-15
    assert s.smooth


def test_sampled_hold_is_piecewise_constant_and_reproducible():
    h1 = SampledHold(seed=42, stream=3, bias=0.25, period=5.0)
    h2 = SampledHold(seed=42, stream=3, bias=0.25, period=5.0)
    ts = np.linspace(0.0, 24.9, 500)
    assert np.array_equal(h1.value(ts), h2.value(ts))
    # constant within each hold interval
    for m in range(4):
        seg = h1.value(np.linspace(m * 5.0 + 1e-9, (m + 1) * 5.0 - 1e-9, 50))
        assert np.ptp(seg) == 0.0
    # different streams decorrelate
    other = SampledHold(seed=42, stream=4, bias=0.25, period=5.0)
    assert not np.array_equal(h1.value(ts), other.value(ts))
    # value stays within offset +/- 1 + bias
    vals = h1.value(ts)
    assert np.all(vals <= 2.0 + 1.0 + 0.25 + 1e-12)
    assert np.all(vals >= 2.0 - 1.0 + 0.25 - 1e-12)


def test_sampled_hold_prefix_stability():
    # evaluating over a longer horizon must not change earlier holds
    h = SampledHold(seed=5)
    early = h.value(np.array([2.0, 7.0]))
    late = h.value(np.array([2.0, 7.0, 52.0]))
    assert np.array_equal(early, late[:2])


def test_sampled_hold_derivative_is_zero_and_flagged_nonsmooth():
    h = SampledHold(seed=1)
    assert not h.smooth
    assert h.derivative(3.3) == 0.0
    assert (Sinusoid(1, 1) + h).smooth is False
    with pytest.raises(ParameterError):
        SampledHold(seed=1, period=0.0)


def test_smooth_catalog_properties():
    sigs = smooth_catalog(6)
    assert len(sigs) == 6
    assert all(s.smooth for s in sigs)
    # distinct signals: pairwise different at some probe time
    probes = np.linspace(0.0, 20.0, 101)
    vals = sample_values(sigs, probes)
    for i in range(6):
        for j in range(i + 1, 6):
            assert np.abs(vals[:, i] - vals[:, j]).max() > 1e-3
    longer = smooth_catalog(9)
    assert len(longer) == 9


def test_sampled_hold_catalog_varies_across_agents():
    sigs = sampled_hold_catalog(6, seed=7)
    ts = np.linspace(0.0, 30.0, 301)
    vals = sample_values(sigs, ts)
    # per-agent biases and independent streams produce distinct columns
    for i in range(6):
        for j in range(i + 1, 6):
            assert np.abs(vals[:, i] - vals[:, j]).max() > 1e-6
    again = sample_values(sampled_hold_catalog(6, seed=7), ts)
    assert np.array_equal(vals, again)


def test_constant_catalog():
    sigs = constant_catalog([1.0, -2.0])
    assert sigs[0].value(10.0) == 1.0
    assert sigs[1].value(10.0) == -2.0


def test_sample_helpers_shapes():
    sigs = smooth_catalog(3)
    ts = np.linspace(0, 1, 11)
    assert sample_values(sigs, ts).shape == (11, 3)
    assert sample_derivatives(sigs, ts).shape == (11, 3)
