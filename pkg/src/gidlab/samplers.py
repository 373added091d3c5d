"""Seeded generation of the laws and geometric random sums.

Randomness comes from :class:`RandomStream`, a ``(seed, substream)`` pair
mapped onto numpy ``SeedSequence`` spawn keys.  Batches are cut into blocks
of :data:`BLOCK` draws, each with its own child stream, so a batch is the same
whatever the number of worker threads.

Component laws (normal, symmetric stable, Linnik, positive stable,
Mittag-Leffler) are generated by exact transformations of uniforms:
Box-Muller, the Chambers-Mallows-Stuck formula and Kanter's one-sided
formula.  The transformation loops live in the compiled kernel when it is
built (see :mod:`gidlab._backend`).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _backend
from ._fallback import (K_CONSTANT, K_LINNIK, K_MITTAG_LEFFLER, K_NORMAL,
                        K_POS_STABLE, K_SYM_STABLE, K_ZERO)
from .cf_core import ExponentDescriptor, ExponentKind

BLOCK = 1 << 14
DEFAULT_SIZE = 100_000

_ROLE_COUNTS = 0x636E74
_ROLE_VALUES = 0x76616C


@dataclass(frozen=True)
class RandomStream:
    """Reproducible source of generators.

    Identical ``(seed, substream, path)`` always yields the same draws;
    distinct ones are statistically independent.
    """

    seed: int
    substream: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.substream < 0:
            raise ValueError("substream index must be non-negative")

    def child(self, index):
        return RandomStream(self.seed, self.substream, self.path + (int(index),))

    def generator(self, role=0):
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.substream, *self.path, role))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class GeometricLaw:
    """Geometric law on {1, 2, ...}: ``P(N = k) = p (1-p)^(k-1)``, mean 1/p."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")

    @property
    def mean(self):
        return 1.0 / self.p

    @property
    def variance(self):
        return (1.0 - self.p) / self.p**2


@dataclass(frozen=True)
class Component:
    """A summand law the kernels can generate directly."""

    kind: int
    alpha: float = 1.0
    scale: float = 1.0
    name: str = ""

    @classmethod
    def zero(cls):
        return cls(K_ZERO, name="zero")

    @classmethod
    def constant(cls, value):
        return cls(K_CONSTANT, scale=float(value), name=f"constant({value!r})")

    @classmethod
    def normal(cls, sd=1.0):
        return cls(K_NORMAL, 2.0, float(sd), f"normal(sd={sd!r})")

    @classmethod
    def sym_stable(cls, alpha, scale=1.0):
        _check_alpha(alpha)
        return cls(K_SYM_STABLE, float(alpha), float(scale),
                   f"sym_stable(alpha={alpha!r}, scale={scale!r})")

    @classmethod
    def linnik(cls, alpha, scale=1.0):
        _check_alpha(alpha)
        return cls(K_LINNIK, float(alpha), float(scale),
                   f"linnik(alpha={alpha!r}, scale={scale!r})")

    @classmethod
    def positive_stable(cls, alpha, scale=1.0):
        _check_alpha(alpha, one_sided=True)
        return cls(K_POS_STABLE, float(alpha), float(scale),
                   f"positive_stable(alpha={alpha!r}, scale={scale!r})")

    @classmethod
    def mittag_leffler(cls, alpha, scale=1.0):
        _check_alpha(alpha, one_sided=True)
        return cls(K_MITTAG_LEFFLER, float(alpha), float(scale),
                   f"mittag_leffler(alpha={alpha!r}, scale={scale!r})")

    @classmethod
    def id_law(cls, desc, fraction=1.0):
        """Component with c.f. ``exp{-fraction * g(t)}`` for stable/Gaussian ``g``."""
        if desc.kind is ExponentKind.SEMI_STABLE:
            raise NotImplementedError("no exact sampler for semi-stable exponents")
        c = desc.scale_c * fraction
        if desc.kind is ExponentKind.GAUSSIAN:
            # c t^2 is the exponent of a normal with variance 2c
            return cls.normal(math.sqrt(2.0 * c))
        return cls.sym_stable(desc.alpha, c ** (1.0 / desc.alpha))

    def sample(self, stream, size=None, jobs=1):
        return _batched(lambda s, n: _backend.kernels.draw(
            self.kind, self.alpha, self.scale, s.generator(_ROLE_VALUES), n),
            stream, size, jobs)


@dataclass
class SampleBatch:
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size < 1:
            raise ValueError("a sample batch needs at least one value")

    def __len__(self):
        return self.values.size

    def to_csv(self):
        return "value\n" + "".join(f"{v!r}\n" for v in self.values.tolist())

    def meta_block(self):
        return "".join(f"{k} = {v}\n" for k, v in self.meta.items())


def _check_alpha(alpha, one_sided=False):
    if one_sided:
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    elif not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")


def _batched(fn, stream, size, jobs=1):
    """Run ``fn(block_stream, n)`` over fixed blocks and concatenate.

    Block boundaries depend only on ``size``, so ``jobs`` changes the wall
    time and never the values.
    """
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError("size must be at least 1")
    spans = [(j, min(BLOCK, n - j * BLOCK)) for j in range((n + BLOCK - 1) // BLOCK)]

    def run(span):
        j, m = span
        return fn(stream.child(j), m)

    if jobs > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(s) for s in spans]
    out = np.concatenate(parts)
    return out[0].item() if size is None else out


def sample_geometric(law, stream, size=None, jobs=1):
    """Geometric draws on {1, 2, ...} by inversion."""
    if not isinstance(law, GeometricLaw):
        law = GeometricLaw(law)
    return _batched(lambda s, n: _backend.kernels.geometric_counts(
        law.p, s.generator(_ROLE_COUNTS), n), stream, size, jobs)


def sample_sym_stable(alpha, stream, size=None, jobs=1):
    """Symmetric stable draws with c.f. ``exp{-|t|^alpha}``."""
    return Component.sym_stable(alpha).sample(stream, size, jobs)


def sample_positive_stable(alpha, stream, size=None, jobs=1):
    """Positive stable draws with Laplace transform ``exp{-s^alpha}``."""
    return Component.positive_stable(alpha).sample(stream, size, jobs)


def sample_linnik(alpha, stream, size=None, jobs=1):
    """Linnik draws ``E^(1/alpha) Z``; c.f. ``1/(1 + |t|^alpha)``."""
    return Component.linnik(alpha).sample(stream, size, jobs)


def sample_mittag_leffler(alpha, stream, size=None, jobs=1):
    """Mittag-Leffler draws ``E^(1/alpha) S``; Laplace transform ``1/(1 + s^alpha)``."""
    return Component.mittag_leffler(alpha).sample(stream, size, jobs)


def sample_geometric_sum(p, B, component, stream, size=None, jobs=1):
    """Draws of ``(X_1 + ... + X_N) / B`` with ``N`` geometric(p) on {1, 2, ...}.

    ``component`` is a :class:`Component` (summed term by term in the kernel)
    or any callable ``(stream, size) -> array``, in which case the terms of
    each block are drawn in one call.
    """
    law = GeometricLaw(p)
    if not B > 0:
        raise ValueError(f"normaliser B must be positive, got {B}")
    return _random_sums(law.p, 0, B, component, stream, size, jobs)


def sample_fixed_sum(k, B, component, stream, size=None, jobs=1):
    """Draws of ``(X_1 + ... + X_k) / B`` for a deterministic count ``k``."""
    if k < 1 or int(k) != k:
        raise ValueError(f"count must be a positive integer, got {k}")
    if not B > 0:
        raise ValueError(f"normaliser B must be positive, got {B}")
    return _random_sums(1.0, int(k), B, component, stream, size, jobs)


def _random_sums(p, fixed, B, component, stream, size, jobs):
    if isinstance(component, Component):
        def block(s, n):
            sums = _backend.kernels.random_sums(
                component.kind, component.alpha, component.scale, p, fixed,
                s.generator(_ROLE_COUNTS), s.generator(_ROLE_VALUES), n)
            return sums / B
    else:
        def block(s, n):
            if fixed:
                counts = np.full(n, fixed, dtype=np.int64)
            else:
                counts = _backend.kernels.geometric_counts(p, s.generator(_ROLE_COUNTS), n)
            terms = np.asarray(component(s.child(_ROLE_VALUES), int(counts.sum())))
            sums = np.add.reduceat(terms, np.concatenate([[0], np.cumsum(counts)[:-1]]))
            return sums / B
    return _batched(block, stream, size, jobs)


def sample_un(desc, n, stream, size=None, jobs=1, method="sum"):
    """Draws of ``U_n``: a geometric(1/n) sum of ID terms with exponent ``g/n``.

    ``method="sum"`` adds the terms one by one.  ``method="closure"`` uses
    that a sum of ``N`` i.i.d. stable (or Gaussian) terms is the single term
    scaled by ``N^(1/alpha)``, which is exact in law and O(1) per draw.
    """
    if desc.kind is ExponentKind.SEMI_STABLE:
        raise NotImplementedError("no exact sampler for semi-stable exponents")
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    term = Component.id_law(desc, 1.0 / n)
    if method == "sum":
        return sample_geometric_sum(1.0 / n, 1.0, term, stream, size, jobs)
    if method != "closure":
        raise ValueError(f"unknown method {method!r}")

    def block(s, m):
        counts = _backend.kernels.geometric_counts(1.0 / n, s.generator(_ROLE_COUNTS), m)
        single = _backend.kernels.draw(term.kind, term.alpha, term.scale,
                                       s.generator(_ROLE_VALUES), m)
        return counts.astype(float) ** (1.0 / term.alpha) * single
    return _batched(block, stream, size, jobs)


def make_batch(values, law, stream, **params):
    meta = {"law": law, **params, "seed": stream.seed, "substream": stream.substream,
            "size": int(np.size(values))}
    return SampleBatch(values, meta)


SAMPLERS: dict[str, Callable] = {
    "sym_stable": sample_sym_stable,
    "positive_stable": sample_positive_stable,
    "linnik": sample_linnik,
    "mittag_leffler": sample_mittag_leffler,
}


def replay(batch: SampleBatch) -> Optional[np.ndarray]:
    """Regenerate a batch from its metadata (component laws only)."""
    meta = batch.meta
    fn = SAMPLERS.get(meta.get("law"))
    if fn is None:
        return None
    stream = RandomStream(int(meta["seed"]), int(meta["substream"]))
    return fn(float(meta["alpha"]), stream, int(meta["size"]))
