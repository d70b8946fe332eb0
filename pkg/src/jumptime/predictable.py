"""Announcing sequences and the decreasing Y process for predictable times.

A predictable time tau is announced by stopping times tau_1 <= tau_2 <= ...
that stay strictly below tau and converge to it.  From a strictly increasing
announcing sequence one builds a continuous nonincreasing process Y with
Y > 0 before tau and Y = 0 from tau on, so tau is exactly the first time Y
hits zero.  Y is piecewise linear with value 1/i at the (i-1)-th announcing
time; a finite sequence of m times is closed by one last linear segment from
level 1/(m+1) down to zero at the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import INFINITY, LINEAR, CadlagPath, TimeLike, TimePoint, as_timepoint

__all__ = [
    "GEOMETRIC",
    "HARMONIC",
    "AnnouncingSequence",
    "YProcess",
    "build_y_process",
    "extract_strict_subsequence",
    "make_announcing_sequence",
    "y_hitting_time",
]

GEOMETRIC = "geometric"
HARMONIC = "harmonic"

#: Slack for comparing a declared closeness against the float-computed gap.
_GAP_SLACK = 1e-12


@dataclass(frozen=True)
class AnnouncingSequence:
    """Finitely many times announcing a target from strictly below.

    ``times`` are nondecreasing and (for a positive target) all strictly less
    than ``target``, with the last one within ``epsilon_announce`` of it.  The
    degenerate target 0 announces itself: times must be empty or all zero.
    """

    times: tuple[float, ...]
    target: float
    epsilon_announce: Optional[float] = None

    def __post_init__(self):
        target = float(self.target)
        if math.isinf(target):
            raise ValueError("an infinite target has no finite announcing sequence")
        if math.isnan(target) or target < 0.0:
            raise ValueError(f"target must be a nonnegative real, got {target}")
        object.__setattr__(self, "target", target)

        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        for i, t in enumerate(times):
            if not (math.isfinite(t) and t >= 0.0):
                raise ValueError(f"announcing time {i} must be a finite nonnegative real")
            if i > 0 and t < times[i - 1]:
                raise ValueError(f"announcing times must be nondecreasing at index {i}")

        if target == 0.0:
            if any(t != 0.0 for t in times):
                raise ValueError("target 0 admits only the all-zero announcing sequence")
            object.__setattr__(self, "epsilon_announce", float(self.epsilon_announce or 0.0))
            return

        if not times:
            raise ValueError("a positive target needs at least one announcing time")
        if times[-1] >= target:
            raise ValueError(
                f"announcing times must stay strictly below the target "
                f"({times[-1]} >= {target})"
            )
        gap = target - times[-1]
        if self.epsilon_announce is None:
            object.__setattr__(self, "epsilon_announce", gap)
        else:
            eps = float(self.epsilon_announce)
            if not (math.isfinite(eps) and eps > 0.0):
                raise ValueError(f"epsilon_announce must be positive and finite, got {eps}")
            if gap > eps + _GAP_SLACK * max(1.0, target):
                raise ValueError(
                    f"last time misses the target by {gap}, beyond the declared "
                    f"closeness {eps}"
                )
            object.__setattr__(self, "epsilon_announce", eps)

    def __len__(self) -> int:
        return len(self.times)


def extract_strict_subsequence(seq: AnnouncingSequence) -> AnnouncingSequence:
    """Keep the first time, then every time strictly above the last kept one.

    The result is strictly increasing, idempotent under repetition, and ends
    at the same maximum, so it announces the same target just as closely.
    """
    if seq.target > 0.0 and not seq.times:
        raise ValueError("cannot strictify an empty announcing sequence")
    kept: list[float] = []
    for t in seq.times:
        if not kept or t > kept[-1]:
            kept.append(t)
    if seq.target == 0.0:
        kept = kept[:1]
    return AnnouncingSequence(tuple(kept), seq.target, seq.epsilon_announce)


@dataclass(frozen=True)
class YProcess:
    """Continuous nonincreasing path hitting zero exactly at its target.

    ``knot_levels`` records the value 1/i at the start of segment i, i.e. at
    time tau_{i-1}; the closing knot at the target has value 0.
    """

    path: CadlagPath
    knot_levels: tuple[float, ...]
    target: TimePoint

    def __post_init__(self):
        values = self.path.values
        if any(v < 0.0 for v in values):
            raise ValueError("Y must be nonnegative")
        if any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("Y must be nonincreasing")
        if values[-1] != 0.0:
            raise ValueError("Y must end at exactly 0")
        if any(kind != LINEAR for kind in self.path.kinds):
            raise ValueError("Y is continuous: all segments must be linear")

    def __call__(self, t: TimeLike) -> float:
        return self.path.evaluate(t)


def build_y_process(seq: AnnouncingSequence, target: TimeLike | None = None) -> YProcess:
    """Piecewise-linear Y through (tau_{i-1}, 1/i), closed to 0 at the target.

    Knots: (0, 1), (tau_1, 1/2), ..., (tau_m, 1/(m+1)), (target, 0); the last
    segment is the finite-truncation closure of the infinite construction.
    Requires strictly increasing positive times (strictify first) below the
    target.  A target of 0 yields the identically-zero process.
    """
    if target is not None:
        tp = as_timepoint(target)
        declared = tp.value if tp.is_finite else math.inf
        if declared != seq.target:
            raise ValueError(
                f"explicit target {declared} disagrees with the sequence target {seq.target}"
            )

    if seq.target == 0.0:
        return YProcess(
            path=CadlagPath.constant(0.0),
            knot_levels=(),
            target=TimePoint(0.0),
        )

    times = seq.times
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            raise ValueError(
                "announcing times must be strictly increasing; "
                "apply extract_strict_subsequence first"
            )
    if times[0] <= 0.0:
        raise ValueError("the first announcing time must be strictly positive")
    if times[-1] >= seq.target:
        raise ValueError("the target must exceed the last announcing time")

    m = len(times)
    knot_times = (0.0,) + times + (seq.target,)
    knot_levels = tuple(1.0 / i for i in range(1, m + 2))
    knot_values = knot_levels + (0.0,)
    path = CadlagPath.piecewise_linear(knot_times, knot_values)
    return YProcess(path=path, knot_levels=knot_levels, target=TimePoint(seq.target))


def y_hitting_time(Y: YProcess) -> TimePoint:
    """First time Y reaches 0, read off the knots exactly (no grid search).

    A nonincreasing continuous piecewise-linear path first touches zero at
    the earliest knot with value zero; interior points of a segment ending
    above zero stay positive.
    """
    for t, v in zip(Y.path.times, Y.path.values):
        if v == 0.0:
            return TimePoint(t)
    return INFINITY


def make_announcing_sequence(target: TimeLike, m: int, scheme: str) -> AnnouncingSequence:
    """Concrete announcing sequences for a finite positive target.

    GEOMETRIC: tau_n = target * (1 - 2**-n), closing gap target * 2**-m.
    HARMONIC:  tau_n = target * n / (n + 1), closing gap target / (m + 1).
    """
    tp = as_timepoint(target)
    if not tp.is_finite:
        raise ValueError("an infinite target has no finite announcing sequence")
    t = tp.value
    if t <= 0.0:
        raise ValueError(f"target must be positive, got {t}")
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if scheme == GEOMETRIC:
        times = tuple(t - t * 2.0**-n for n in range(1, m + 1))
        eps = t * 2.0**-m
    elif scheme == HARMONIC:
        times = tuple(t * n / (n + 1) for n in range(1, m + 1))
        eps = t / (m + 1)
    else:
        raise ValueError(f"unknown scheme {scheme!r}; use {GEOMETRIC!r} or {HARMONIC!r}")
    return AnnouncingSequence(times, t, eps)
