"""Parameter sweeps and boundary solvers built on :func:`secret_key_rate`."""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import ChannelParams
from .errors import ConfigError, NoKeyError, SolverError
from .gaussian import log_negativity
from .keyrate import secret_key_rate
from .resources import MismatchParams, ResourceSpec, noisy_source_cm

KEY_ZERO = 1e-12
DISTANCE_BRACKET = (0.0, 500.0)
ETA_BRACKET = (1e-3, 1.0)
MAX_POINTS = 1_000_000
COARSE_POINTS = 101
MONOTONE_SLACK = 1e-15

FIGURE_DELTAS = (0.01, 0.02, 0.03, 0.04, 0.05)
FIGURE_T_BS = 0.9
FIGURE_LENGTH_KM = 15.0


class SweepAxis(enum.Enum):
    DISTANCE = "distance"
    ETA = "eta"
    DELTA = "delta"


@dataclass(frozen=True)
class SweepSpec:
    """Half-open grid ``start, start + step, ... < stop`` along one axis.

    The swept field of ``resource``/``mismatch``/``channel`` is ignored.
    """

    axis: SweepAxis
    start: float
    stop: float
    step: float
    resource: ResourceSpec
    mismatch: MismatchParams = field(default_factory=MismatchParams)
    channel: ChannelParams = field(default_factory=ChannelParams)

    def __post_init__(self):
        if isinstance(self.axis, str):
            object.__setattr__(self, "axis", SweepAxis(self.axis))
        if not all(math.isfinite(v) for v in (self.start, self.stop, self.step)):
            raise ConfigError("sweep bounds must be finite")
        if not self.start < self.stop:
            raise ConfigError(f"sweep needs start < stop, got {self.start} >= {self.stop}")
        if not self.step > 0:
            raise ConfigError(f"sweep step must be positive, got {self.step}")
        if self.n_points > MAX_POINTS:
            raise ConfigError(f"sweep has {self.n_points} points, limit is {MAX_POINTS}")

    @property
    def n_points(self) -> int:
        return max(1, math.ceil((self.stop - self.start) / self.step - 1e-9))

    def grid(self) -> list[float]:
        return [round(self.start + i * self.step, 12) for i in range(self.n_points)]


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    key_rate: float
    i_ab: float
    chi_be: float
    entangled: bool
    raw_rate: float


def _point(spec: SweepSpec, value: float):
    resource, mismatch, ch = spec.resource, spec.mismatch, spec.channel
    try:
        if spec.axis is SweepAxis.DISTANCE:
            ch = ch.with_(length_km=value)
        elif spec.axis is SweepAxis.ETA:
            ch = ch.with_(eta=value)
        else:
            mismatch = MismatchParams.direct(value)
    except ValueError as exc:
        raise ConfigError(f"sweep value {value!r} invalid for {spec.axis.value}: {exc}") from exc
    return resource, mismatch, ch


def evaluate_row(spec: SweepSpec, value: float) -> SweepRow:
    b = secret_key_rate(*_point(spec, value))
    return SweepRow(
        axis_value=value,
        key_rate=b.key_rate,
        i_ab=b.i_ab,
        chi_be=b.chi_be,
        entangled=log_negativity(b.v_shared) > 0,
        raw_rate=b.raw_rate,
    )


def default_workers() -> int:
    cap = os.environ.get("CVKEY_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise ConfigError(f"CVKEY_THREADS must be an integer, got {cap!r}") from exc
    return n


def sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRow]:
    """One row per grid point, ordered by axis value."""
    grid = spec.grid()
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(grid) < 64:
        return [evaluate_row(spec, v) for v in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: evaluate_row(spec, v), grid))


def figure_sweeps(resource: ResourceSpec, axis: SweepAxis, channel: ChannelParams | None = None,
                  start: float | None = None, stop: float | None = None,
                  step: float | None = None) -> dict[float, list[SweepRow]]:
    """Key-rate curves for the five mismatch levels used in the figures."""
    if axis is SweepAxis.DISTANCE:
        channel = channel or ChannelParams(eta=1.0)
        defaults = (0.0, 200.0, 1.0)
    elif axis is SweepAxis.ETA:
        channel = channel or ChannelParams(length_km=FIGURE_LENGTH_KM)
        defaults = (0.95, 1.0005, 0.001)
    else:
        raise ConfigError("figure sweeps run over distance or eta")
    start, stop, step = (d if v is None else v for v, d in zip((start, stop, step), defaults))
    return {
        d: sweep(SweepSpec(axis, start, stop, step, resource, MismatchParams.direct(d), channel))
        for d in FIGURE_DELTAS
    }


def _check_monotone(xs, ys, increasing: bool, what: str) -> None:
    diffs = np.diff(ys)
    bad = diffs < -MONOTONE_SLACK if increasing else diffs > MONOTONE_SLACK
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SolverError(
            f"key rate is not monotone in {what} between {xs[i]:.6g} and {xs[i + 1]:.6g};"
            " refusing to bisect"
        )


def _check_threshold(threshold: float) -> None:
    if not (threshold >= KEY_ZERO and math.isfinite(threshold)):
        raise ConfigError(f"key-rate threshold must be finite and at least {KEY_ZERO:g}, got {threshold!r}")


def _bisect(f: Callable[[float], bool], good: float, bad: float, tol: float) -> tuple[float, float]:
    """Shrink ``[good, bad]`` (in either order) until its width is below ``tol``."""
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if f(mid):
            good = mid
        else:
            bad = mid
    return good, bad


def max_distance(spec: ResourceSpec, mm: MismatchParams, ch: ChannelParams,
                 tol_km: float = 0.01, bracket: tuple[float, float] = DISTANCE_BRACKET,
                 threshold: float = KEY_ZERO) -> float:
    """Distance (km) at which the key rate drops to ``threshold`` (zero by default).

    A positive floor such as ``1e-4`` gives the end of a curve on a log plot.
    """
    def key(length):
        return secret_key_rate(spec, mm, ch.with_(length_km=float(length))).key_rate

    _check_threshold(threshold)
    lo, hi = bracket
    if key(lo) <= threshold:
        raise NoKeyError("no key at any distance")
    xs = np.linspace(lo, hi, COARSE_POINTS)
    ys = np.array([key(x) for x in xs])
    _check_monotone(xs, ys, increasing=False, what="distance")
    dead = np.nonzero(ys <= threshold)[0]
    if dead.size == 0:
        raise SolverError(f"key rate still positive at {hi:g} km; crossing lies outside the bracket")
    i = int(dead[0])
    good, bad = _bisect(lambda x: key(x) > threshold, xs[i - 1], xs[i], tol_km)
    return float(0.5 * (good + bad))


def min_efficiency(spec: ResourceSpec, mm: MismatchParams, ch: ChannelParams,
                   tol: float = 1e-6, bracket: tuple[float, float] = ETA_BRACKET,
                   threshold: float = KEY_ZERO) -> float:
    """Lowest detector efficiency that still gives a positive key at ``ch.length_km``."""
    def key(eta):
        return secret_key_rate(spec, mm, ch.with_(eta=float(eta))).key_rate

    _check_threshold(threshold)
    lo, hi = bracket
    if key(hi) <= threshold:
        raise NoKeyError("no key even with perfect detectors")
    xs = np.linspace(lo, hi, COARSE_POINTS)
    ys = np.array([key(x) for x in xs])
    _check_monotone(xs, ys, increasing=True, what="eta")
    dead = np.nonzero(ys <= threshold)[0]
    if dead.size == 0:
        raise SolverError(f"key rate still positive at eta={lo:g}; threshold lies outside the bracket")
    i = int(dead[-1])
    good, bad = _bisect(lambda x: key(x) > threshold, xs[i + 1], xs[i], tol)
    return float(0.5 * (good + bad))


def separability_threshold(r: float) -> float:
    """Mismatch noise above which the TMSV of squeezing ``r`` is separable.

    ``1 - cosh 2r + sinh 2r``, evaluated as ``1 - exp(-2r)``.
    """
    if not r > 0:
        raise ConfigError(f"squeezing r must be positive, got {r!r}")
    return float(-np.expm1(-2 * r))


def resource_separability_threshold(spec: ResourceSpec, tol: float = 1e-12) -> float:
    """Same threshold found numerically for any resource's source CM."""
    def entangled(delta):
        return log_negativity(noisy_source_cm(spec, delta)) > 0

    if not entangled(0.0):
        return 0.0
    hi = 1.0
    while entangled(hi):
        hi *= 2
        if hi > 1e6:
            raise SolverError("source stays entangled for any mismatch noise")
    good, bad = _bisect(entangled, 0.0, hi, tol)
    return float(0.5 * (good + bad))
