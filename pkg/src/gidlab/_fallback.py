"""Pure-Python (numpy) twin of :mod:`gidlab._kernels`.

Uniform consumption order matches the compiled kernels exactly: component
``i`` uses uniforms ``[k*i, k*i + k)`` of its stream, where ``k`` is the
per-kind uniform count below.
"""
import numpy as np

NAME = "python"

OPEN_SHIFT = 2.0**-54

K_ZERO = 0
K_CONSTANT = 1
K_NORMAL = 2
K_SYM_STABLE = 3
K_LINNIK = 4
K_POS_STABLE = 5
K_MITTAG_LEFFLER = 6

UNIFORMS_PER_DRAW = {
    K_ZERO: 0,
    K_CONSTANT: 0,
    K_NORMAL: 2,
    K_SYM_STABLE: 2,
    K_POS_STABLE: 2,
    K_LINNIK: 3,
    K_MITTAG_LEFFLER: 3,
}

# components per chunk inside random_sums; bounds memory for long sums
_CHUNK = 1 << 18
# points per chunk inside trig_sums
_POINT_CHUNK = 16


def _sym_stable(alpha, u1, u2):
    v = np.pi * (u1 - 0.5)
    w = -np.log(u2)
    if alpha == 1.0:
        return np.tan(v)
    if alpha == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(v)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def _pos_stable(alpha, u1, u2):
    v = np.pi * u1
    w = -np.log(u2)
    return (np.sin(alpha * v) / np.sin(v) ** (1.0 / alpha)
            * (np.sin((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def draw(kind, alpha, scale, generator, n):
    k = UNIFORMS_PER_DRAW[kind]
    if kind == K_ZERO:
        return np.zeros(n)
    if kind == K_CONSTANT:
        return np.full(n, float(scale))
    u = (generator.random(n * k) + OPEN_SHIFT).reshape(n, k)
    if kind == K_NORMAL:
        return scale * np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
    if kind == K_SYM_STABLE:
        return scale * _sym_stable(alpha, u[:, 0], u[:, 1])
    if kind == K_POS_STABLE:
        return scale * _pos_stable(alpha, u[:, 0], u[:, 1])
    mix = (-np.log(u[:, 0])) ** (1.0 / alpha)
    if kind == K_LINNIK:
        return scale * mix * _sym_stable(alpha, u[:, 1], u[:, 2])
    if kind == K_MITTAG_LEFFLER:
        return scale * mix * _pos_stable(alpha, u[:, 1], u[:, 2])
    raise ValueError(f"unknown component kind {kind}")


def geometric_counts(p, generator, n):
    u = generator.random(n)
    if p >= 1.0:
        return np.ones(n, dtype=np.int64)
    return 1 + np.floor(np.log(u + OPEN_SHIFT) / np.log1p(-p)).astype(np.int64)


def random_sums(kind, alpha, scale, p, fixed_count, count_generator,
                component_generator, n):
    if fixed_count > 0:
        counts = np.full(n, fixed_count, dtype=np.int64)
    else:
        counts = geometric_counts(p, count_generator, n)
    ends = np.cumsum(counts)
    total = int(ends[-1]) if n else 0
    out = np.zeros(n)
    start = 0
    while start < total:
        stop = min(start + _CHUNK, total)
        values = draw(kind, alpha, scale, component_generator, stop - start)
        owner = np.searchsorted(ends, np.arange(start, stop), side="right")
        lo = owner[0]
        out[lo:owner[-1] + 1] += np.bincount(owner - lo, weights=values)
        start = stop
    return out


def trig_sums(points, freqs, cos_weights, sin_weights):
    points = np.ascontiguousarray(points, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    wc = np.ascontiguousarray(cos_weights, dtype=np.float64)
    ws = np.ascontiguousarray(sin_weights, dtype=np.float64)
    if wc.shape[0] != freqs.shape[0] or ws.shape[0] != freqs.shape[0]:
        raise ValueError("weights must match freqs in length")
    c_out = np.empty(points.shape[0])
    s_out = np.empty(points.shape[0])
    for lo in range(0, points.shape[0], _POINT_CHUNK):
        arg = np.multiply.outer(points[lo:lo + _POINT_CHUNK], freqs)
        c_out[lo:lo + _POINT_CHUNK] = np.cos(arg) @ wc
        s_out[lo:lo + _POINT_CHUNK] = np.sin(arg) @ ws
    return c_out, s_out
