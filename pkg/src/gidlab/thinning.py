"""Renewal processes and p-thinning.

A renewal process with Mittag-Leffler(alpha) intervals is invariant under
p-thinning followed by rescaling time by ``p^(1/alpha)``: each thinned
interval is ``p^(1/alpha)`` times a geometric(p) sum of original intervals,
which is Mittag-Leffler(alpha) again.  Whether such a process is also a Cox
process is not examined here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .attraction import KS_TOL, ExperimentReport
from .numerics import ks_two_sample
from .samplers import RandomStream, sample_mittag_leffler

MIN_EVENTS = 10_000
INCONCLUSIVE_EVENTS = 1_000
DEFAULT_EVENTS = 200_000
_CHUNK = 1 << 14


@dataclass
class EventTrain:
    """Arrival times on ``(0, horizon]``.

    The inter-arrival intervals are kept as drawn: with heavy-tailed laws a
    tiny interval after a huge arrival time is lost to rounding in the
    cumulative sum, so times are only guaranteed non-decreasing in floating
    point while the stored intervals stay exact and strictly positive.
    """

    times: np.ndarray
    horizon: float
    law: str = ""
    gaps: np.ndarray = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.gaps is None:
            self.gaps = np.diff(self.times, prepend=0.0)
        self.gaps = np.asarray(self.gaps, dtype=float)
        if self.gaps.size != self.times.size:
            raise ValueError("one interval per arrival required")
        if np.any(self.gaps <= 0) or np.any(np.diff(self.times) < 0):
            raise ValueError("arrival times must be strictly increasing")
        if self.times.size and self.times[-1] > self.horizon:
            raise ValueError("arrival beyond the horizon")

    def __len__(self):
        return self.times.size

    def intervals(self):
        return self.gaps

    def to_csv(self):
        return "index,time\n" + "".join(
            f"{i},{t!r}\n" for i, t in enumerate(self.times.tolist(), start=1))


def simulate_renewal(interval_sampler, horizon, stream, max_events=None, law=""):
    """Arrivals of a renewal process on ``(0, horizon]``.

    ``interval_sampler(stream, size)`` returns positive intervals.  With
    ``max_events`` the train stops after that many arrivals; an infinite
    horizon then becomes the last arrival time.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if math.isinf(horizon) and max_events is None:
        raise ValueError("an infinite horizon needs max_events")
    parts, gaps, last, count, j = [], [], 0.0, 0, 0
    while True:
        draws = np.asarray(interval_sampler(stream.child(j), _CHUNK), dtype=float)
        j += 1
        if np.any(draws <= 0):
            raise ValueError("interval sampler produced a non-positive interval")
        times = last + np.cumsum(draws)
        stop = np.searchsorted(times, horizon, side="right")
        if max_events is not None:
            stop = min(stop, max_events - count)
        parts.append(times[:stop])
        gaps.append(draws[:stop])
        count += stop
        if stop < times.size:
            break
        last = times[-1]
    times = np.concatenate(parts)
    if math.isinf(horizon):
        horizon = float(times[-1]) if times.size else 0.0
    return EventTrain(times, horizon, law, np.concatenate(gaps))


def p_thin(train, p, rescale_exponent, stream):
    """Keep each arrival with probability p, then scale time by ``p^rescale_exponent``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    keep = stream.generator().random(len(train)) < p
    scale = p ** rescale_exponent
    idx = np.flatnonzero(keep)
    gaps = np.empty(0)
    if idx.size:
        # interval between retained arrivals = sum of the original intervals in between
        starts = np.concatenate([[0], idx[:-1] + 1])
        gaps = np.add.reduceat(train.gaps[:idx[-1] + 1], starts)
    return EventTrain(train.times[keep] * scale, train.horizon * scale,
                      f"thinned[p={p!r}]({train.law})", gaps * scale)


def thinning_invariance_test(alpha, p, horizon=None, stream=None,
                             n_events=DEFAULT_EVENTS, deterministic=False):
    """Two-sample KS between thinned-and-rescaled intervals and fresh intervals.

    With ``horizon=None`` the train runs for ``n_events`` arrivals.  The
    ``deterministic`` control replaces the Mittag-Leffler intervals by unit
    intervals, whose thinned law is a geometric sum and must be rejected.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    stream = stream or RandomStream(0)
    if deterministic:
        sampler = lambda s, n: np.ones(n)  # noqa: E731
        law = "deterministic(1)"
    else:
        sampler = partial(sample_mittag_leffler, alpha)
        law = f"mittag_leffler(alpha={alpha!r})"
    h = math.inf if horizon is None else horizon
    cap = n_events if horizon is None else None
    train = simulate_renewal(sampler, h, stream.child(0), cap, law)
    thinned = p_thin(train, p, 1.0 / alpha, stream.child(1))
    fresh = sampler(stream.child(2), max(len(train), 1))

    report = ExperimentReport("thinning", f"p_thin(p={p!r}, rescale=1/{alpha!r})",
                              seed=stream.seed, tolerances={"ks": KS_TOL,
                                                            "min_events": MIN_EVENTS})
    report.metrics.update({"events": len(train), "retained": len(thinned),
                           "retained_fraction": len(thinned) / max(len(train), 1),
                           "interval_law": law})
    if len(thinned) < INCONCLUSIVE_EVENTS:
        report.verdict = "inconclusive"
        report.notes.append(f"only {len(thinned)} retained events")
        return report
    ks = ks_two_sample(thinned.intervals(), fresh)
    report.metrics["ks_two_sample"] = ks
    enough = len(thinned) >= MIN_EVENTS and len(train) >= MIN_EVENTS
    if ks < KS_TOL and not enough:
        report.verdict = "inconclusive"
        report.notes.append(f"fewer than {MIN_EVENTS} events")
    else:
        report.verdict = "pass" if ks < KS_TOL else "fail"
    report.rows.append({"n": len(thinned), "sup_distance": None, "ks": ks,
                        "verdict": report.verdict})
    return report
