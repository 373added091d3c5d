"""Empirical c.f.s, c.f. inversion, distances and convergence-rate fits."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .cf_core import CharFn, GridSpec, _points

GP_T_MAX = 100.0
GP_STEP = 1e-3
# points per trig-sum task; fixed so that results do not depend on ``jobs``
_TASK = 64


@dataclass(frozen=True)
class DistanceReport:
    grid: object
    sup_distance: float
    argmax_t: float

    def csv_row(self, n):
        return f"{n},{self.argmax_t!r},{self.sup_distance!r}"


DISTANCE_CSV_HEADER = "n,t_argmax,sup_distance"


def trig_sums(points, freqs, cos_weights, sin_weights, jobs=1):
    """``(sum_j wc_j cos(f_j x), sum_j ws_j sin(f_j x))`` for every point x."""
    points = np.ascontiguousarray(points, dtype=float)
    args = [np.ascontiguousarray(a, dtype=float) for a in (freqs, cos_weights, sin_weights)]
    kern = _backend.kernels.trig_sums
    chunks = [points[i:i + _TASK] for i in range(0, points.size, _TASK)]
    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda c: kern(c, *args), chunks))
    else:
        parts = [kern(c, *args) for c in chunks]
    if not parts:
        return np.empty(0), np.empty(0)
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


def _values(batch):
    return np.asarray(getattr(batch, "values", batch), dtype=float)


def empirical_cf(batch, grid, jobs=1):
    """Tabulated empirical c.f. ``(1/N) sum_j exp(i t x_j)`` on the grid.

    The returned :class:`CharFn` interpolates linearly between grid points
    and is exact at them; ``phi(0) = 1`` exactly.
    """
    x = _values(batch)
    if x.size == 0:
        raise ValueError("empirical c.f. of an empty batch")
    t = _points(grid)
    w = np.ones(x.size)
    re, im = trig_sums(t, x, w, w, jobs)
    re, im = re / x.size, im / x.size
    zero = t == 0.0
    re[zero], im[zero] = 1.0, 0.0
    table = re + 1j * im

    def value(s):
        s = np.asarray(s, dtype=float)
        hit = np.searchsorted(t, s)
        hit = np.clip(hit, 0, t.size - 1)
        exact = t[hit] == s
        out = np.interp(s, t, table.real) + 1j * np.interp(s, t, table.imag)
        return np.where(exact, table[hit], out)

    phi = CharFn(value, symmetric=False, label=f"empirical(N={x.size})")
    phi.grid_points = t
    phi.grid_values = table
    return phi


def sup_cf_distance(phi1, phi2, grid):
    t = _points(grid)
    d = np.abs(phi1(t) - phi2(t))
    i = int(np.argmax(d))
    return DistanceReport(grid, float(d[i]), float(t[i]))


def gil_pelaez_cdf(phi, x, t_max=GP_T_MAX, step=GP_STEP, jobs=1):
    """CDF by Gil-Pelaez inversion, midpoint rule on ``[0, t_max]``.

    ``F(x) = 1/2 - (1/pi) int_0^t_max Im(e^{-itx} phi(t)) / t dt``.  Midpoints
    never touch ``t = 0``, where the integrand has a removable singularity.
    """
    if not t_max > 0 or not step > 0:
        raise ValueError("t_max and step must be positive")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = int(round(t_max / step))
    t = (np.arange(m) + 0.5) * step
    v = phi(t)
    # Im(e^{-itx} phi) = Im(phi) cos(tx) - Re(phi) sin(tx)
    c, s = trig_sums(x, t, step * v.imag / t, -step * v.real / t, jobs)
    F = np.clip(0.5 - (c + s) / np.pi, 0.0, 1.0)
    return float(F[0]) if scalar else F


class TabulatedCDF:
    """Monotone piecewise-linear CDF through Gil-Pelaez values at nodes."""

    def __init__(self, phi, nodes, t_max=GP_T_MAX, step=GP_STEP, jobs=1):
        self.nodes = np.unique(np.asarray(nodes, dtype=float))
        values = gil_pelaez_cdf(phi, self.nodes, t_max, step, jobs)
        # quadrature noise can break monotonicity by ~1e-9
        self.values = np.maximum.accumulate(values)

    @classmethod
    def for_sample(cls, phi, sample, n_nodes=1001, tail=5e-4, **kw):
        """Nodes at sample quantiles; mass outside them is at most ``tail``."""
        q = np.quantile(_values(sample), np.linspace(tail, 1.0 - tail, n_nodes))
        return cls(phi, q, **kw)

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values)


def ks_statistic(batch, cdf):
    """One-sample Kolmogorov-Smirnov statistic ``sup |F_N - F|``."""
    x = np.sort(_values(batch))
    if x.size == 0:
        raise ValueError("KS statistic of an empty batch")
    F = np.asarray(cdf(x), dtype=float)
    if np.any(np.diff(F) < -1e-12):
        raise ValueError("cdf is not monotone on the sample")
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))


def ks_two_sample(a, b):
    """Two-sample KS statistic ``sup |F_a - F_b|``."""
    from scipy.stats import ks_2samp

    return float(ks_2samp(_values(a), _values(b)).statistic)


@dataclass(frozen=True)
class RateFit:
    order: float
    r_squared: float
    mode: str = "power"

    @property
    def ratio(self):
        """Per-step error ratio ``e(n)/e(n+1)`` implied by a geometric fit."""
        return float(np.exp(-self.order))


def rate_fit(ns, errors, mode="power"):
    """Least-squares slope of ``log error`` against ``log n`` (or ``n``).

    ``mode="power"`` fits ``error ~ n^order``; ``mode="geometric"`` fits
    ``error ~ exp(order * n)``.
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.size != errors.size or ns.size < 3:
        raise ValueError("rate fit needs two equal-length lists of at least 3 values")
    if np.any(errors <= 0) or np.any(ns <= 0):
        raise ValueError("rate fit needs positive errors and indices")
    if mode == "power":
        x = np.log(ns)
    elif mode == "geometric":
        x = ns
    else:
        raise ValueError(f"unknown mode {mode!r}")
    y = np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    return RateFit(float(slope), r2, mode)


__all__ = [
    "DistanceReport", "GridSpec", "RateFit", "TabulatedCDF", "empirical_cf",
    "gil_pelaez_cdf", "ks_statistic", "ks_two_sample", "rate_fit", "sup_cf_distance",
    "trig_sums",
]
