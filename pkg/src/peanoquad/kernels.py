"""Peano kernels of the three Newton-Cotes rules.

For ``x`` in ``[a, b]`` let ``p(x, t) = t - a`` when ``t <= x`` and ``t - b``
otherwise, and ``q(x, s) = integral of p(x, t) p(t, s) dt`` over ``[a, b]``.
The quadrature error of each rule, scaled by an integer multiplier, equals
``(1/(b-a)) * integral of K(s) f''(s) ds`` with

    K1 = 2 q(m, .) + q(a, .)
    K2 = q(a, .) + 3 q((2a+b)/3, .) + 3 q((a+2b)/3, .) + q(b, .)
    K3 = 7 q(a, .) + 32 q((3a+b)/4, .) + 12 q(m, .) + 32 q((a+3b)/4, .) + 7 q(b, .)

where ``m = (a+b)/2``.  Kernels are assembled from ``q`` directly; their
zeros and the values of ``integral |K|`` are then checked, not assumed.

All closed-form routines are written with plain arithmetic so that passing
:class:`fractions.Fraction` endpoints gives exact rational results.
"""

import enum
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .expr import as_expr, eval_derivs, eval_real


class KernelId(enum.Enum):
    K1 = "K1"
    K2 = "K2"
    K3 = "K3"


# A point (p*a + q*b) / r is stored as the triple (p, q, r).
_A = (1, 0, 1)
_B = (0, 1, 1)
_MID = (1, 1, 2)

# (multiplier, node) terms of each kernel
COMBINATIONS = {
    KernelId.K1: ((2, _MID), (1, _A)),
    KernelId.K2: ((1, _A), (3, (2, 1, 3)), (3, (1, 2, 3)), (1, _B)),
    KernelId.K3: ((7, _A), (32, (3, 1, 4)), (12, _MID), (32, (1, 3, 4)), (7, _B)),
}

ZEROS = {
    KernelId.K1: (_A, (2, 1, 3), (1, 2, 3), _B),
    KernelId.K2: (_A, (3, 1, 4), _MID, (1, 3, 4), _B),
    KernelId.K3: (_A, (38, 7, 45), (2, 1, 3), (1, 2, 3), (7, 38, 45), _B),
}

# integral of |K| over [0, 1]; scales with (b - a)**4
ABS_INTEGRAL_CONSTANTS = {
    KernelId.K1: Fraction(1, 27),
    KernelId.K2: Fraction(1, 24),
    KernelId.K3: Fraction(2036, 6075),
}


def point(node, a, b):
    p, q, r = node
    if q == 0:
        return a
    if p == 0:
        return b
    return (p * a + q * b) / r


def _check_interval(a, b):
    if not a < b:
        raise PreconditionError(f"need a < b, got a={a!r}, b={b!r}")


def _check_inside(name, v, a, b):
    if np.ndim(v):
        ok = bool(np.all((a <= v) & (v <= b)))
    else:
        ok = a <= v <= b
    if not ok:
        raise PreconditionError(f"{name} must lie in [{a}, {b}]")


def _p(x, t, a, b):
    return t - a if t <= x else t - b


def p_eval(x, t, a, b):
    """``p(x, t)`` on ``[a, b]``."""
    _check_interval(a, b)
    _check_inside("x", x, a, b)
    _check_inside("t", t, a, b)
    return _p(x, t, a, b)


def _q_branch(x, s, c, a, b):
    # (b-a)(x-m)(s-c) - (b-a)/2 (s-c)^2 with c = a left of x, c = b right of x
    h = b - a
    return h * (x - (a + b) / 2) * (s - c) - h / 2 * (s - c) ** 2


def _q(x, s, a, b):
    if np.ndim(s):
        return np.where(s <= x, _q_branch(x, s, a, a, b), _q_branch(x, s, b, a, b))
    return _q_branch(x, s, a if s <= x else b, a, b)


def q_eval(x, s, a, b):
    """Closed form of ``q(x, s) = integral of p(x, t) p(t, s) dt``."""
    _check_interval(a, b)
    _check_inside("x", x, a, b)
    _check_inside("s", s, a, b)
    return _q(x, s, a, b)


def _kernel(k, s, a, b):
    return sum(w * _q(point(node, a, b), s, a, b) for w, node in COMBINATIONS[k])


def kernel_eval(k, s, a, b):
    """Value of kernel ``k`` at ``s`` (a float or an array of points)."""
    k = KernelId(k)
    _check_interval(a, b)
    _check_inside("s", s, a, b)
    return _kernel(k, s, a, b)


def kernel_zeros(k, a, b):
    """Sorted zeros of kernel ``k`` on ``[a, b]``, endpoints included."""
    k = KernelId(k)
    _check_interval(a, b)
    return sorted(point(z, a, b) for z in ZEROS[k])


def _q_antiderivative(x, s, c, a, b):
    h = b - a
    d = s - c
    return h * (x - (a + b) / 2) * d**2 / 2 - h * d**3 / 6


def _piece_integrals(k, a, b, extra_cuts=()):
    # signed integral of K over each piece between consecutive breakpoints
    terms = [(w, point(node, a, b)) for w, node in COMBINATIONS[k]]
    cuts = sorted({a, b} | set(extra_cuts) | {x for _, x in terms})
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        piece = 0
        for w, x in terms:
            c = a if mid <= x else b
            piece += w * (_q_antiderivative(x, hi, c, a, b) - _q_antiderivative(x, lo, c, a, b))
        pieces.append(piece)
    return pieces


def kernel_abs_integral(k, a, b):
    """``integral of |K(s)| ds`` over ``[a, b]`` in closed form.

    Between consecutive breakpoints (the kernel zeros and the nodes where a
    ``q`` term switches branch) the kernel is a quadratic of one sign, so
    each piece is integrated through the antiderivative of the ``q``
    branches and the absolute values are summed.
    """
    k = KernelId(k)
    _check_interval(a, b)
    zeros = [point(z, a, b) for z in ZEROS[k]]
    return sum(abs(piece) for piece in _piece_integrals(k, a, b, zeros))


def kernel_abs_integral_oracle(k, a, b, n=1_000_000):
    """Composite trapezoid estimate of ``integral |K|`` on ``n`` uniform points."""
    k = KernelId(k)
    _check_interval(a, b)
    if n < 1000:
        raise PreconditionError(f"oracle needs n >= 1000 points, got {n}")
    s = np.linspace(a, b, n)
    s[-1] = b
    v = np.abs(_kernel(k, s, a, b))
    h = (b - a) / (n - 1)
    return float(h * (v.sum() - 0.5 * (v[0] + v[-1])))


def kernel_mean(k, a, b):
    """``integral of K(s) ds``; zero for all three kernels."""
    k = KernelId(k)
    _check_interval(a, b)
    return sum(_piece_integrals(k, a, b))


def _gauss(lo, hi, n):
    x, w = np.polynomial.legendre.leggauss(n)
    half = (hi - lo) / 2
    return lo + half * (x + 1), half * w


def lemma1_residual(expr, x, a, b, ref_integral, n=400):
    """Both sides of the kernel identity for ``f`` at the point ``x``.

    ``lhs = f(x)(b-a) - (x - (a+b)/2)(f(b) - f(a)) - ref_integral`` and
    ``rhs = 1/(b-a) * double integral of p(x,t) p(t,s) f''(s) ds dt``.

    The double integral uses Gauss-Legendre rules split at the jumps of
    ``p`` (``t = x`` outside, ``s = t`` inside), ``n`` nodes per direction.
    """
    ast = as_expr(expr)
    _check_interval(a, b)
    _check_inside("x", x, a, b)
    if n < 4 or n % 2:
        raise PreconditionError(f"n must be an even number >= 4, got {n}")
    fa, fb, fx = eval_real(ast, a), eval_real(ast, b), eval_real(ast, x)
    lhs = fx * (b - a) - (x - (a + b) / 2) * (fb - fa) - ref_integral

    half = n // 2
    u, wu = np.polynomial.legendre.leggauss(half)
    rhs = 0.0
    for lo, hi, anchor in ((a, x, a), (x, b, b)):
        if hi <= lo:
            continue
        t, wt = _gauss(lo, hi, half)
        # g(t) = int_a^t (s-a) f''(s) ds + int_t^b (s-b) f''(s) ds
        left, right = (t - a) / 2, (b - t) / 2
        s_left = a + left[:, None] * (u + 1)
        s_right = t[:, None] + right[:, None] * (u + 1)
        g = left * ((s_left - a) * eval_derivs(ast, s_left)[2] * wu).sum(axis=1)
        g += right * ((s_right - b) * eval_derivs(ast, s_right)[2] * wu).sum(axis=1)
        rhs += float(np.sum(wt * (t - anchor) * g))
    return lhs, rhs / (b - a)
