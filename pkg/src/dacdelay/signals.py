"""Reference-signal catalog for the consensus simulators.

All signals are one-sided: ``value(t) == 0`` for ``t < 0``.  That
convention matches the simulators, which treat the network as silent
before start-up, and it makes delayed evaluations ``r(t - tau)``
well-defined without special cases.

Two families are provided:

* smooth analytic signals (:class:`Sinusoid`, :class:`Ramp`,
  :class:`ArctanRamp`, :class:`Constant`, sums thereof) with exact
  derivatives, used by the continuous-time simulator and the
  derivative-based input-variation measure;
* :class:`SampledHold`, a seeded piecewise-constant signal that redraws a
  random sinusoid sample every ``period`` seconds and holds it -- a
  stand-in for slowly refreshed sensor readings.  Draws are per-stream and
  prefix-stable: extending the horizon never changes earlier values.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ParameterError

__all__ = [
    "Signal",
    "Constant",
    "Sinusoid",
    "Ramp",
    "ArctanRamp",
    "Sum",
    "SampledHold",
    "smooth_catalog",
    "sampled_hold_catalog",
    "constant_catalog",
    "sample_values",
    "sample_derivatives",
]


def _one_sided(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.where(t < 0.0, 0.0, values)


class Signal:
    """A scalar reference signal, zero for ``t < 0``.

    Subclasses implement ``_value`` (and ``_derivative`` when the signal is
    differentiable) for ``t >= 0``; the public methods apply the one-sided
    convention and accept scalars or arrays.  ``smooth`` marks signals
    whose pointwise derivative captures their full variation; held
    signals with jumps set it false so variation measures fall back to
    finite differences.
    """

    smooth: bool = True

    def _value(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self, t: np.ndarray) -> np.ndarray:
        raise ParameterError(f"{type(self).__name__} has no pointwise derivative")

    def value(self, t) -> np.ndarray | float:
        arr = np.asarray(t, dtype=float)
        out = _one_sided(arr, self._value(arr))
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def derivative(self, t) -> np.ndarray | float:
        arr = np.asarray(t, dtype=float)
        out = _one_sided(arr, self._derivative(arr))
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def __add__(self, other: "Signal") -> "Signal":
        return Sum((self, other))


class Constant(Signal):
    """Constant level for ``t >= 0``."""

    def __init__(self, level: float):
        self.level = float(level)

    def _value(self, t):
        return np.full_like(t, self.level)

    def _derivative(self, t):
        return np.zeros_like(t)


class Sinusoid(Signal):
    """``amplitude * sin(omega * t + phase) + offset`` for ``t >= 0``."""

    def __init__(self, amplitude: float, omega: float, phase: float = 0.0, offset: float = 0.0):
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        self.phase = float(phase)
        self.offset = float(offset)

    def _value(self, t):
        return self.amplitude * np.sin(self.omega * t + self.phase) + self.offset

    def _derivative(self, t):
        return self.amplitude * self.omega * np.cos(self.omega * t + self.phase)


class Ramp(Signal):
    """``slope * t`` for ``t >= 0``."""

    def __init__(self, slope: float):
        self.slope = float(slope)

    def _value(self, t):
        return self.slope * t

    def _derivative(self, t):
        return np.full_like(t, self.slope)


class ArctanRamp(Signal):
    """``gain * arctan(rate * t)`` -- a ramp that saturates."""

    def __init__(self, gain: float, rate: float):
        self.gain = float(gain)
        self.rate = float(rate)

    def _value(self, t):
        return self.gain * np.arctan(self.rate * t)

    def _derivative(self, t):
        return self.gain * self.rate / (1.0 + (self.rate * t) ** 2)


class Sum(Signal):
    """Pointwise sum of component signals."""

    def __init__(self, parts: Sequence[Signal]):
        self.parts = tuple(parts)
        self.smooth = all(p.smooth for p in self.parts)

    def _value(self, t):
        return sum((p._value(t) for p in self.parts), start=np.zeros_like(t))

    def _derivative(self, t):
        return sum((p._derivative(t) for p in self.parts), start=np.zeros_like(t))


@lru_cache(maxsize=256)
def _held_draws(
    seed: int, stream: int, omega_sigma: float, phase_sigma: float, count: int
) -> tuple[tuple[float, float], ...]:
    """First ``count`` (omega, phase) pairs for a hold stream.

    Pair ``m`` is produced from uniform draws ``2m`` and ``2m + 1`` of a
    generator seeded by ``SeedSequence(seed, spawn_key=(stream,))`` via the
    Box-Muller transform, so the sequence is prefix-stable in ``count``.
    """
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))
    pairs = []
    for _ in range(count):
        u1 = 1.0 - gen.random()  # in (0, 1]: keeps the logarithm finite
        u2 = gen.random()
        radius = math.sqrt(-2.0 * math.log(u1))
        g1 = radius * math.cos(2.0 * math.pi * u2)
        g2 = radius * math.sin(2.0 * math.pi * u2)
        pairs.append((omega_sigma * g1, phase_sigma * g2))
    return tuple(pairs)


class SampledHold(Signal):
    """Piecewise-constant signal refreshed every ``period`` seconds.

    On the interval ``[m * period, (m + 1) * period)`` the value is::

        offset + sin(omega_m * t_m + phase_m) + bias,   t_m = m * period

    with ``(omega_m, phase_m)`` drawn once per interval from independent
    Gaussian draws (standard deviations ``omega_sigma`` and
    ``phase_sigma``) on the stream identified by ``(seed, stream)``.
    Different streams are statistically independent, so a catalog of these
    signals varies across agents.

    ``derivative`` returns the almost-everywhere derivative, which is zero
    between refresh instants; the jumps themselves are invisible to it, so
    the meaningful variation measure for held signals is the discrete
    first difference, not the derivative (``smooth`` is false).
    """

    smooth = False

    def __init__(
        self,
        seed: int,
        stream: int = 0,
        bias: float = 0.0,
        offset: float = 2.0,
        period: float = 5.0,
        omega_sigma: float = 0.5,
        phase_sigma: float = math.pi / 2.0,
    ):
        if period <= 0.0:
            raise ParameterError(f"hold period must be positive, got {period}")
        self.seed = int(seed)
        self.stream = int(stream)
        self.bias = float(bias)
        self.offset = float(offset)
        self.period = float(period)
        self.omega_sigma = float(omega_sigma)
        self.phase_sigma = float(phase_sigma)

    def _value(self, t):
        shape = np.shape(t)
        flat = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
        m = np.floor(np.maximum(flat, 0.0) / self.period).astype(int)
        count = int(m.max(initial=0)) + 1
        draws = _held_draws(self.seed, self.stream, self.omega_sigma, self.phase_sigma, count)
        omegas = np.array([d[0] for d in draws])
        phases = np.array([d[1] for d in draws])
        sample_times = m * self.period
        held = np.sin(omegas[m] * sample_times + phases[m])
        return (self.offset + held + self.bias).reshape(shape)

    def _derivative(self, t):
        return np.zeros_like(t)


#: Per-agent bias levels for the default six-agent sampled-hold catalog.
_DEFAULT_BIASES = (-0.55, 1.0, 0.6, -0.9, -0.6, 0.4)


def smooth_catalog(n: int) -> list[Signal]:
    """``n`` smooth analytic signals with distinct shapes and averages.

    The first six entries are a fixed benchmark set (sinusoids of several
    frequencies, a ramp, a saturating ramp, a cosine); beyond six the
    catalog cycles with a small frequency shift so entries stay distinct.
    """
    base: list[Signal] = [
        Sinusoid(0.55, 0.8),
        Sinusoid(0.5, 0.7) + Sinusoid(0.5, 0.6),
        Ramp(0.1),
        ArctanRamp(2.0, 0.5),
        Sinusoid(0.1, 2.0, phase=math.pi / 2.0),  # 0.1 * cos(2 t)
        Sinusoid(0.5, 0.5),
    ]
    if n <= len(base):
        return base[:n]
    out = list(base)
    i = 0
    while len(out) < n:
        shift = 0.05 * (1 + len(out) // len(base))
        out.append(Sinusoid(0.4, 0.5 + shift, phase=0.3 * i))
        i += 1
    return out


def sampled_hold_catalog(n: int, seed: int, period: float = 5.0) -> list[SampledHold]:
    """``n`` independent sampled-hold signals with per-agent biases."""
    return [
        SampledHold(
            seed=seed,
            stream=i,
            bias=_DEFAULT_BIASES[i % len(_DEFAULT_BIASES)],
            period=period,
        )
        for i in range(n)
    ]


def constant_catalog(levels: Sequence[float]) -> list[Constant]:
    """Constant signals at the given levels (static-input benchmarks)."""
    return [Constant(v) for v in levels]


def sample_values(signals: Sequence[Signal], times: np.ndarray) -> np.ndarray:
    """Stack signal values into an array of shape ``(len(times), len(signals))``."""
    times = np.asarray(times, dtype=float)
    return np.column_stack([np.asarray(s.value(times), dtype=float) for s in signals])


def sample_derivatives(signals: Sequence[Signal], times: np.ndarray) -> np.ndarray:
    """Stack signal derivatives into ``(len(times), len(signals))``."""
    times = np.asarray(times, dtype=float)
    return np.column_stack([np.asarray(s.derivative(times), dtype=float) for s in signals])
