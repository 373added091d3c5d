# cython: language_level=3
"""Compiled hot loops: component variates, geometric random sums, trig sums.

Every routine consumes uniforms from the numpy bit generator in exactly the
order used by :mod:`gidlab._fallback`, so both backends draw the same variates
(up to last-bit differences between libm and numpy transcendental functions).
"""
import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport cos, floor, log, log1p, pow, sin, sqrt, tan
from numpy.random cimport bitgen_t

cnp.import_array()

NAME = "compiled"

cdef double PI = 3.141592653589793
# shifts numpy's [0, 1) doubles onto the open interval (0, 1)
cdef double OPEN_SHIFT = 5.551115123125783e-17

cdef enum:
    K_ZERO = 0
    K_CONSTANT = 1
    K_NORMAL = 2
    K_SYM_STABLE = 3
    K_LINNIK = 4
    K_POS_STABLE = 5
    K_MITTAG_LEFFLER = 6


cdef bitgen_t *_bitgen(object generator) except NULL:
    capsule = generator.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("generator does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double _uniform(bitgen_t *rng) noexcept nogil:
    return rng.next_double(rng.state) + OPEN_SHIFT


cdef inline double _sym_stable(double alpha, double u1, double u2) noexcept nogil:
    cdef double v = PI * (u1 - 0.5)
    cdef double w = -log(u2)
    if alpha == 1.0:
        return tan(v)
    if alpha == 2.0:
        return 2.0 * sqrt(w) * sin(v)
    return (sin(alpha * v) / pow(cos(v), 1.0 / alpha)
            * pow(cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha))


cdef inline double _pos_stable(double alpha, double u1, double u2) noexcept nogil:
    cdef double v = PI * u1
    cdef double w = -log(u2)
    return (sin(alpha * v) / pow(sin(v), 1.0 / alpha)
            * pow(sin((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha))


cdef inline double _component(int kind, double alpha, double scale,
                              bitgen_t *rng) noexcept nogil:
    # argument evaluation order is unspecified in C: draw into locals first
    cdef double u1, u2, u3
    if kind == K_ZERO:
        return 0.0
    if kind == K_CONSTANT:
        return scale
    u1 = _uniform(rng)
    u2 = _uniform(rng)
    if kind == K_NORMAL:
        return scale * sqrt(-2.0 * log(u1)) * cos(2.0 * PI * u2)
    if kind == K_SYM_STABLE:
        return scale * _sym_stable(alpha, u1, u2)
    if kind == K_POS_STABLE:
        return scale * _pos_stable(alpha, u1, u2)
    u3 = _uniform(rng)
    if kind == K_LINNIK:
        return scale * pow(-log(u1), 1.0 / alpha) * _sym_stable(alpha, u2, u3)
    # K_MITTAG_LEFFLER
    return scale * pow(-log(u1), 1.0 / alpha) * _pos_stable(alpha, u2, u3)


def draw(int kind, double alpha, double scale, object generator, Py_ssize_t n):
    """``n`` independent component variates."""
    cdef bitgen_t *rng = _bitgen(generator)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t i
    with generator.bit_generator.lock:
        with nogil:
            for i in range(n):
                res[i] = _component(kind, alpha, scale, rng)
    return out


def geometric_counts(double p, object generator, Py_ssize_t n):
    """Geometric variates on {1, 2, ...} with mean 1/p, by inversion."""
    cdef bitgen_t *rng = _bitgen(generator)
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] res = out
    cdef double log_q = log1p(-p) if p < 1.0 else 0.0
    cdef Py_ssize_t i
    with generator.bit_generator.lock:
        with nogil:
            for i in range(n):
                if p >= 1.0:
                    rng.next_double(rng.state)
                    res[i] = 1
                else:
                    res[i] = 1 + <cnp.int64_t> floor(log(_uniform(rng)) / log_q)
    return out


def random_sums(int kind, double alpha, double scale, double p,
                Py_ssize_t fixed_count, object count_generator,
                object component_generator, Py_ssize_t n):
    """Sums of a random (geometric) or fixed number of component variates.

    With ``fixed_count > 0`` every sum has that many terms and the count
    generator is left untouched; otherwise the counts are geometric(p).
    Terms are generated and accumulated one at a time.
    """
    cdef bitgen_t *rc = _bitgen(count_generator)
    cdef bitgen_t *rx = _bitgen(component_generator)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef double log_q = log1p(-p) if p < 1.0 else 0.0
    cdef Py_ssize_t i
    cdef cnp.int64_t j, m
    cdef double s
    with count_generator.bit_generator.lock, component_generator.bit_generator.lock:
        with nogil:
            for i in range(n):
                if fixed_count > 0:
                    m = fixed_count
                elif p >= 1.0:
                    rc.next_double(rc.state)
                    m = 1
                else:
                    m = 1 + <cnp.int64_t> floor(log(_uniform(rc)) / log_q)
                s = 0.0
                for j in range(m):
                    s += _component(kind, alpha, scale, rx)
                res[i] = s
    return out


def trig_sums(const double[::1] points, const double[::1] freqs,
              const double[::1] cos_weights, const double[::1] sin_weights):
    """Per point x: (sum_j wc_j cos(f_j x), sum_j ws_j sin(f_j x))."""
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t k = freqs.shape[0]
    if cos_weights.shape[0] != k or sin_weights.shape[0] != k:
        raise ValueError("weights must match freqs in length")
    c_out = np.empty(m, dtype=np.float64)
    s_out = np.empty(m, dtype=np.float64)
    cdef double[::1] c_res = c_out
    cdef double[::1] s_res = s_out
    cdef Py_ssize_t i, j
    cdef double x, arg, cs, ss
    with nogil:
        for i in range(m):
            x = points[i]
            cs = 0.0
            ss = 0.0
            for j in range(k):
                arg = freqs[j] * x
                cs += cos_weights[j] * cos(arg)
                ss += sin_weights[j] * sin(arg)
            c_res[i] = cs
            s_res[i] = ss
    return c_out, s_out
