"""Characteristic-function exponents and the transforms built on them.

An infinitely divisible (ID) law with c.f. ``exp{-g(t)}`` is paired with its
geometric version, the law with c.f. ``1/(1 + g(t))``.  This module holds the
exponent families (stable, Gaussian, semi-stable with a log-periodic
perturbation), the :class:`CharFn` wrapper, the geometric compounding
transform and the numerical identity checks used throughout the package.

All evaluation is vectorised over numpy arrays and done in complex
arithmetic.  Every :class:`CharFn` also knows ``1 - phi(t)`` in a
cancellation-free form, which keeps compounding with tiny ``p`` accurate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

ALGEBRAIC_TOL = 1e-12
PSD_TOL = 1e-8
POLE_TOL = 1e-15
EPSILON_MAX = 0.1


class PoleError(ZeroDivisionError):
    """A denominator came within ``POLE_TOL`` of zero."""


class ExponentKind(enum.Enum):
    STABLE = "stable"
    SEMI_STABLE = "semistable"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class ExponentDescriptor:
    """Parametric exponent ``g`` of a symmetric ID law.

    ``g(t) = c|t|^alpha`` for stable and Gaussian (alpha = 2) kinds, and
    ``g(t) = c|t|^alpha (1 + eps cos(2 pi ln|t| / ln(1/b)))`` for the
    semi-stable kind, which satisfies ``g(t) = a g(bt)`` with ``a b^alpha = 1``.
    """

    kind: ExponentKind
    alpha: float
    scale_c: float = 1.0
    order_b: Optional[float] = None
    epsilon: float = 0.0
    multiplier_a: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.scale_c > 0.0:
            raise ValueError(f"scale c must be positive, got {self.scale_c}")
        if self.kind is ExponentKind.GAUSSIAN and self.alpha != 2.0:
            raise ValueError("Gaussian exponent requires alpha = 2")
        if self.kind is ExponentKind.SEMI_STABLE:
            b = self.order_b
            if b is None or not 0.0 < b < 1.0:
                raise ValueError(f"semi-stable order b must lie in (0, 1), got {b}")
            if not 0.0 <= self.epsilon < EPSILON_MAX + 1e-15:
                raise ValueError(
                    f"epsilon must lie in [0, {EPSILON_MAX}], got {self.epsilon}")
            a = b ** (-self.alpha) if self.multiplier_a is None else self.multiplier_a
            if not a > 1.0 or abs(a * b ** self.alpha - 1.0) > ALGEBRAIC_TOL:
                raise ValueError(
                    f"multiplier a={a} violates a*b^alpha = 1 for b={b}, alpha={self.alpha}")
            object.__setattr__(self, "multiplier_a", a)
        else:
            if self.order_b is not None or self.epsilon != 0.0:
                raise ValueError(f"{self.kind.value} exponent takes no order or epsilon")

    @classmethod
    def stable(cls, alpha, c=1.0):
        return cls(ExponentKind.STABLE, float(alpha), float(c))

    @classmethod
    def gaussian(cls, c=0.5):
        return cls(ExponentKind.GAUSSIAN, 2.0, float(c))

    @classmethod
    def semistable(cls, alpha, b, epsilon=0.0, c=1.0, a=None):
        return cls(ExponentKind.SEMI_STABLE, float(alpha), float(c), float(b),
                   float(epsilon), None if a is None else float(a))

    @property
    def period(self):
        """Period of the perturbation in ``ln|t|`` (semi-stable only)."""
        if self.kind is not ExponentKind.SEMI_STABLE:
            return None
        return math.log(1.0 / self.order_b)

    def __call__(self, t):
        return eval_exponent(self, t)

    def describe(self):
        if self.kind is ExponentKind.SEMI_STABLE:
            return (f"semistable(alpha={self.alpha!r}, b={self.order_b!r}, "
                    f"a={self.multiplier_a!r}, eps={self.epsilon!r}, c={self.scale_c!r})")
        return f"{self.kind.value}(alpha={self.alpha!r}, c={self.scale_c!r})"


@dataclass(frozen=True)
class ExponentSum:
    """Sum of exponents; the exponent of the convolution of the ID laws."""

    terms: tuple

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return sum((eval_exponent(d, t) for d in self.terms), np.zeros(t.shape, complex))

    def describe(self):
        return " + ".join(d.describe() for d in self.terms)


def eval_exponent(desc, t):
    """Evaluate the exponent ``g(t)``; returns complex (scalar or array)."""
    if isinstance(desc, ExponentSum):
        return desc(t)
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("exponent argument must be finite")
    at = np.abs(t)
    out = desc.scale_c * at ** desc.alpha
    if desc.kind is ExponentKind.SEMI_STABLE and desc.epsilon:
        nz = at > 0.0
        wave = np.ones_like(at)
        wave[nz] += desc.epsilon * np.cos(2.0 * np.pi * np.log(at[nz]) / desc.period)
        out = out * wave
    out = out.astype(complex)
    return out[()] if scalar else out


class CharFn:
    """Complex-valued c.f. on real arguments.

    ``complement`` evaluates ``1 - phi(t)`` without cancellation when the
    closed form is known; otherwise it falls back to the subtraction.
    """

    def __init__(self, evaluator: Callable, symmetric: bool = False,
                 source=None, complement: Optional[Callable] = None, label: str = ""):
        self._evaluator = evaluator
        self._complement = complement
        self.symmetric = symmetric
        self.source = source
        self.label = label

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        out = np.asarray(self._evaluator(np.asarray(t, dtype=float)), dtype=complex)
        return out[()] if scalar else out

    def complement(self, t):
        if self._complement is None:
            return 1.0 - self(t)
        scalar = np.ndim(t) == 0
        out = np.asarray(self._complement(np.asarray(t, dtype=float)), dtype=complex)
        return out[()] if scalar else out

    def __repr__(self):
        return f"CharFn({self.label or self._evaluator!r})"


def check_charfn(phi, t, tol=ALGEBRAIC_TOL):
    """Assert the c.f. invariants on the points ``t``; returns the values."""
    t = np.asarray(t, dtype=float)
    v = phi(t)
    if abs(phi(0.0) - 1.0) != 0.0:
        raise AssertionError(f"phi(0) = {phi(0.0)} != 1")
    if np.max(np.abs(v)) > 1.0 + tol:
        raise AssertionError(f"|phi| exceeds 1: {np.max(np.abs(v))}")
    if np.max(np.abs(phi(-t) - np.conj(v))) > tol:
        raise AssertionError("phi is not Hermitian")
    if phi.symmetric and np.max(np.abs(v.imag)) > tol:
        raise AssertionError("symmetric phi has an imaginary part")
    return v


def gv_transform(desc):
    """Geometric version: the c.f. ``1/(1 + g(t))``."""
    def value(t):
        return 1.0 / (1.0 + eval_exponent(desc, t))

    def complement(t):
        g = eval_exponent(desc, t)
        return g / (1.0 + g)

    return CharFn(value, symmetric=True, source=desc, complement=complement,
                  label=f"gv[{desc.describe()}]")


def id_cf(desc):
    """The ID c.f. ``exp{-g(t)}``."""
    def value(t):
        return np.exp(-eval_exponent(desc, t))

    def complement(t):
        return -np.expm1(-eval_exponent(desc, t))

    return CharFn(value, symmetric=True, source=desc, complement=complement,
                  label=f"id[{desc.describe()}]")


def gv_invert(phi, t):
    """Recover the exponent ``g(t) = 1/phi(t) - 1``."""
    v = phi(t)
    if np.any(np.abs(v) < POLE_TOL):
        raise PoleError("c.f. vanishes; 1/phi has a pole")
    # 1/phi - 1 = (1 - phi)/phi keeps small exponents exact
    return phi.complement(t) / v


def geometric_compound_cf(p, phi):
    """c.f. of a geometric(p) sum of i.i.d. terms with c.f. ``phi``.

    ``t -> p phi(t) / (1 - (1-p) phi(t))``; the denominator is formed as
    ``p + (1-p)(1 - phi)`` so that p near 0 and phi near 1 do not cancel.
    The result is of order ``phi/(1 + (1-phi)/p)``, so a pole is declared
    when the denominator falls below ``POLE_TOL * p``.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    q = 1.0 - p

    def denominator(t):
        d = p + q * phi.complement(t)
        if np.any(np.abs(d) < POLE_TOL * p):
            raise PoleError("geometric compounding denominator vanishes")
        return d

    def value(t):
        return p * phi(t) / denominator(t)

    def complement(t):
        return phi.complement(t) / denominator(t)

    return CharFn(value, symmetric=phi.symmetric, source=phi.source,
                  complement=complement, label=f"compound[p={p!r}]({phi.label})")


def scaled_exponent(desc, factor):
    """Exponent ``factor * g``; stays in the descriptor family."""
    if isinstance(desc, ExponentSum):
        return ExponentSum(tuple(scaled_exponent(d, factor) for d in desc.terms))
    if desc.kind is ExponentKind.SEMI_STABLE:
        return ExponentDescriptor.semistable(desc.alpha, desc.order_b, desc.epsilon,
                                             desc.scale_c * factor, desc.multiplier_a)
    return ExponentDescriptor(desc.kind, desc.alpha, desc.scale_c * factor)


def un_cf(desc, n):
    """Exact c.f. of ``U_n``: a geometric(1/n) sum of terms with c.f. ``exp{-g/n}``."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    return geometric_compound_cf(1.0 / n, id_cf(scaled_exponent(desc, 1.0 / n)))


def linnik_cf(alpha, c=1.0):
    return gv_transform(ExponentDescriptor.stable(alpha, c))


def gss_fixed_point_residual(alpha, p, grid, iterations=1):
    """Sup over the grid of ``|phi(t) - P phi(ct) / (1 - (1-P) phi(ct))|``.

    Here ``phi = 1/(1 + |t|^alpha)``, ``P = p^n`` and ``c = p^(n/alpha)`` for
    ``n = iterations``.  The identity is exact, so the result is rounding.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    t = _points(grid)
    phi = linnik_cf(alpha)
    c = p ** (iterations / alpha)
    compounded = geometric_compound_cf(p ** iterations, phi)
    return float(np.max(np.abs(phi(t) - compounded(c * t))))


def semilaplace_scaling_residual(desc, grid):
    """Sup over the grid of ``|g(t) - a g(bt)|`` for a semi-stable exponent."""
    if desc.kind is not ExponentKind.SEMI_STABLE:
        raise ValueError("scaling residual requires a semi-stable exponent")
    return _scaling_residual(desc, desc.order_b, desc.multiplier_a, _points(grid, desc))


def _scaling_residual(desc, b, a, t):
    return float(np.max(np.abs(eval_exponent(desc, t) - a * eval_exponent(desc, b * t))))


@dataclass(frozen=True)
class CollapseReport:
    residual_b2: float
    collapses: bool


def order_collapse_check(desc, b2, grid, tol=ALGEBRAIC_TOL):
    """Test whether ``desc`` also has order ``b2`` (with ``a2 = b2^-alpha``).

    A semi-stable exponent with two orders whose log-ratio is irrational is a
    pure power ``c|t|^alpha``; a perturbed exponent therefore fails here at
    such orders and passes at orders that are integer powers of its own.
    """
    if desc.kind is not ExponentKind.SEMI_STABLE:
        raise ValueError("order check requires a semi-stable exponent")
    if not 0.0 < b2 < 1.0 or b2 == desc.order_b:
        raise ValueError(f"b2 must lie in (0, 1) and differ from b, got {b2}")
    residual = _scaling_residual(desc, b2, b2 ** (-desc.alpha), _points(grid, desc))
    return CollapseReport(residual, residual <= tol)


def semistable_epsilon_max(alpha, b):
    """Largest eps for which the log-periodic exponent is a Levy exponent.

    A symmetric Levy density ``x^(-1-alpha) (1 + d cos(w ln x + f))`` with
    ``w = 2 pi / ln(1/b)`` integrates to ``c|t|^alpha (1 + eps cos(w ln|t| + f'))``
    with ``eps = d |C(alpha - iw)| / C(alpha)``, where
    ``C(s) = pi / (2 Gamma(1+s) sin(pi s/2))``.  The density is non-negative
    iff ``d <= 1``.  Above the bound ``exp{-g}`` is not ID and ``1/(1+g)``
    is not GID.
    """
    from scipy.special import gammaln, loggamma

    if not 0.0 < alpha <= 2.0 or not 0.0 < b < 1.0:
        raise ValueError("need 0 < alpha <= 2 and 0 < b < 1")
    if alpha == 2.0:
        return 0.0
    w = 2.0 * math.pi / math.log(1.0 / b)
    x = math.pi * w / 2.0
    # log sinh(x), safe for large x
    log_sinh = x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)
    s = math.sin(math.pi * alpha / 2.0)
    log_sin_c = 0.5 * np.logaddexp(2.0 * math.log(s), 2.0 * log_sinh)
    log_rho = (gammaln(1.0 + alpha) + math.log(s)
               - loggamma(1.0 + alpha - 1j * w).real - log_sin_c)
    return float(math.exp(log_rho))


@dataclass(frozen=True)
class AdmissibilityReport:
    epsilon_max: float
    admissible: bool
    grid_check: "GIDReport"


def check_admissible(desc, r_values=(0.5, 1.0, 2.0), grid=None):
    """Exact bound on eps together with the PSD check of ``1/(1+g)``.

    The grid check is only necessary: it can pass above the exact bound.
    """
    grid = DEFAULT_GRID if grid is None else grid
    if desc.kind is ExponentKind.SEMI_STABLE:
        emax = semistable_epsilon_max(desc.alpha, desc.order_b)
    else:
        emax = math.inf
    rep = gid_necessary_check(gv_transform(desc), r_values, grid)
    return AdmissibilityReport(emax, desc.epsilon <= emax, rep)


@dataclass(frozen=True)
class GIDReport:
    min_eigenvalues: dict
    passed: bool
    tol: float = PSD_TOL


def gid_necessary_check(phi, r_values, grid, tol=PSD_TOL):
    """Positive-semidefiniteness of ``[chi_r(t_i - t_j)]`` for each r.

    ``chi_r(t) = exp{r (1 - 1/phi(t))}`` must be a c.f. for every r > 0 when
    the law is GID; a negative eigenvalue below ``-tol`` disproves that.
    """
    t = _points(grid)
    diffs = np.subtract.outer(t, t)
    # evaluate on the distinct differences only
    uniq, inverse = np.unique(np.round(diffs, 12), return_inverse=True)
    v = phi(uniq)
    if np.any(np.abs(v) < POLE_TOL):
        raise ValueError("1/phi has a pole on the grid")
    exponent = -phi.complement(uniq) / v
    mins = {}
    for r in r_values:
        if not r > 0:
            raise ValueError(f"r must be positive, got {r}")
        chi = np.exp(r * exponent)[inverse.reshape(diffs.shape)]
        # [chi(t_i - t_j)] is Hermitian when chi(-t) = conj(chi(t))
        mins[float(r)] = float(np.linalg.eigvalsh(chi)[0])
    return GIDReport(mins, all(m >= -tol for m in mins.values()), tol)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of a search for a PSD violation.

    ``trials`` holds ``(r, step, size, min_eigenvalue)`` for every grid tried;
    grids on which ``1/phi`` has a pole are skipped and counted.
    """

    found: bool
    best: Optional[tuple]
    trials: list
    skipped: int = 0


def psd_witness_search(phi, r_values=(0.1, 0.5, 1.0, 2.0, 10.0),
                       steps=(0.05, 0.1, 0.25, 0.5), sizes=(9, 17, 33, 65),
                       tol=PSD_TOL):
    """Look for an r and a centred grid on which ``gid_necessary_check`` fails.

    A hit proves the law is not GID; no hit proves nothing.
    """
    trials, skipped = [], 0
    for step in steps:
        for m in sizes:
            t = (np.arange(m) - (m - 1) / 2) * step
            try:
                rep = gid_necessary_check(phi, r_values, t, tol)
            except ValueError:
                skipped += 1
                continue
            trials += [(r, step, m, e) for r, e in rep.min_eigenvalues.items()]
    best = min(trials, key=lambda x: x[3]) if trials else None
    return WitnessReport(best is not None and best[3] < -tol, best, trials, skipped)


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid ``t_min, t_min + step, ..., t_max``.

    With ``log_subgrid`` set, semi-stable exponents are also sampled on a
    log-spaced grid with ``points_per_period`` points per period in ``ln|t|``.
    """

    t_min: float = -10.0
    t_max: float = 10.0
    step: float = 0.05
    log_subgrid: bool = True
    points_per_period: int = 128
    periods: int = 4

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError("grid requires t_min < t_max")
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if self.size < 3:
            raise ValueError("grid needs at least 3 points")

    @property
    def size(self):
        return int(round((self.t_max - self.t_min) / self.step)) + 1

    def points(self, period=None):
        t = self.t_min + self.step * np.arange(self.size)
        if self.log_subgrid and period:
            top = max(abs(self.t_min), abs(self.t_max))
            m = self.points_per_period * self.periods
            pos = top * np.exp(-period * np.arange(m) / self.points_per_period)
            sub = np.concatenate([-pos, pos])
            sub = sub[(sub >= self.t_min) & (sub <= self.t_max)]
            t = np.unique(np.concatenate([t, sub]))
        return t


DEFAULT_GRID = GridSpec()


def _points(grid, desc=None):
    if isinstance(grid, GridSpec):
        period = getattr(desc, "period", None)
        return grid.points(period)
    return np.atleast_1d(np.asarray(grid, dtype=float))
