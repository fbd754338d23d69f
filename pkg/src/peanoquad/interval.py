"""Interval arithmetic and second-order jets.

No directed rounding is used.  Every computed result is widened outward by a
relative ``16 * eps`` plus an absolute ``1e-300``, which dominates the error
of a correctly or faithfully rounded operation.  Enclosures are therefore
rigorous under that floating-point model, not last-ulp validated.

A :class:`Jet2` carries enclosures of ``(f, f', f'')`` over an interval and
propagates them with the first and second order chain rules.
"""

import math
import sys
from fractions import Fraction

from .errors import DomainError, PreconditionError

EPS = sys.float_info.epsilon
REL_INFLATION = 16 * EPS
ABS_INFLATION = 1e-300

_TWO_PI = 2.0 * math.pi
_HALF_PI = 0.5 * math.pi


class Interval:
    """Closed interval ``[lo, hi]`` with finite endpoints.

    Instances are immutable.  Arithmetic operators accept plain ``int`` and
    ``float`` operands, which are taken as exact point intervals.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise PreconditionError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise PreconditionError(f"empty interval: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @classmethod
    def around(cls, value):
        """Smallest representable-ish enclosure of a real ``value``.

        Exact for ints and floats; a :class:`~fractions.Fraction` or decimal
        string that is not a binary float gets widened outward.
        """
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            f = float(value)
            if Fraction(f) == value:
                return cls(f)
            return _outward(f, f)
        return cls(value)

    # -- queries ---------------------------------------------------------

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def mag(self):
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, other):
        if isinstance(other, Interval):
            return self.lo <= other.lo and other.hi <= self.hi
        return self.lo <= other <= self.hi

    def contains_zero(self):
        return self.lo <= 0.0 <= self.hi

    def hull(self, *others):
        lo, hi = self.lo, self.hi
        for o in others:
            lo = min(lo, o.lo)
            hi = max(hi, o.hi)
        return _make(lo, hi)

    def intersect(self, other):
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise DomainError(f"disjoint intervals {self!r} and {other!r}")
        return _make(lo, hi)

    def widen(self, slack):
        return _make(self.lo - slack, self.hi + slack)

    def split(self, pieces):
        """Cover ``self`` by ``pieces`` consecutive subintervals sharing endpoints."""
        lo, w = self.lo, self.hi - self.lo
        cuts = [lo] + [lo + w * (k / pieces) for k in range(1, pieces)] + [self.hi]
        return [_make(cuts[k], cuts[k + 1]) for k in range(pieces)]

    # -- comparisons and display -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return f"[{self.lo:.17g}, {self.hi:.17g}]"

    def __iter__(self):
        yield self.lo
        yield self.hi

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        return _make(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _outward(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _outward(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        p = (a * c, a * d, b * c, b * d)
        return _outward(min(p), max(p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise DomainError(f"division by an interval containing zero: {other}")
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        p = (a / c, a / d, b / c, b / d)
        return _outward(min(p), max(p))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k):
        if isinstance(k, int):
            return pow_int(self, k)
        return NotImplemented


def _make(lo, hi):
    # trusted constructor: caller guarantees finiteness and ordering
    x = object.__new__(Interval)
    object.__setattr__(x, "lo", lo)
    object.__setattr__(x, "hi", hi)
    return x


def inflate(lo, hi=None):
    """Interval ``[lo, hi]`` widened outward by the rounding allowance."""
    return _outward(float(lo), float(lo if hi is None else hi))


def _outward(lo, hi):
    lo = lo - abs(lo) * REL_INFLATION - ABS_INFLATION
    hi = hi + abs(hi) * REL_INFLATION + ABS_INFLATION
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("interval overflow")
    return _make(lo, hi)


def _coerce(x):
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float)):
        return Interval(x)
    if isinstance(x, Fraction):
        return Interval.around(x)
    return NotImplemented


def hull(intervals):
    intervals = iter(intervals)
    first = next(intervals)
    return first.hull(*intervals)


# -- elementary functions ----------------------------------------------------


def _touches(lo, hi, phase):
    """True if ``phase + 2*pi*k`` lies in ``[lo, hi]`` for some integer k.

    The test is padded so that rounding can only produce false positives,
    which merely loosen an enclosure.
    """
    pad = 4 * EPS * max(1.0, abs(lo), abs(hi))
    k = math.ceil((lo - pad - phase) / _TWO_PI)
    return phase + _TWO_PI * k <= hi + pad


def _clip_unit(lo, hi):
    return _make(max(lo, -1.0), min(hi, 1.0))


def sin(x):
    if x.hi - x.lo >= _TWO_PI:
        return _make(-1.0, 1.0)
    a, b = math.sin(x.lo), math.sin(x.hi)
    lo, hi = min(a, b), max(a, b)
    if _touches(x.lo, x.hi, _HALF_PI):
        hi = 1.0
    if _touches(x.lo, x.hi, -_HALF_PI):
        lo = -1.0
    y = _outward(lo, hi)
    return _clip_unit(y.lo, y.hi)


def cos(x):
    if x.hi - x.lo >= _TWO_PI:
        return _make(-1.0, 1.0)
    a, b = math.cos(x.lo), math.cos(x.hi)
    lo, hi = min(a, b), max(a, b)
    if _touches(x.lo, x.hi, 0.0):
        hi = 1.0
    if _touches(x.lo, x.hi, math.pi):
        lo = -1.0
    y = _outward(lo, hi)
    return _clip_unit(y.lo, y.hi)


def exp(x):
    try:
        lo, hi = math.exp(x.lo), math.exp(x.hi)
    except OverflowError:
        raise DomainError(f"exp overflow on {x}") from None
    y = _outward(lo, hi)
    return _make(max(y.lo, 0.0), y.hi)


def log(x):
    if not x.lo > 0.0:
        raise DomainError(f"log requires a strictly positive interval, got {x}")
    return _outward(math.log(x.lo), math.log(x.hi))


def sqrt(x):
    if not x.lo > 0.0:
        raise DomainError(f"sqrt requires a strictly positive interval, got {x}")
    y = _outward(math.sqrt(x.lo), math.sqrt(x.hi))
    return _make(max(y.lo, 0.0), y.hi)


def pow_int(x, k):
    """``x**k`` for an integer exponent; negative ``k`` needs ``0 not in x``."""
    if not isinstance(k, int):
        raise PreconditionError(f"pow_int needs an integer exponent, got {k!r}")
    if k == 0:
        return _make(1.0, 1.0)
    if k == 1:
        return x
    if k < 0:
        if x.contains_zero():
            raise DomainError(f"negative power of an interval containing zero: {x}")
        return 1.0 / pow_int(x, -k)
    try:
        a, b = x.lo ** k, x.hi ** k
    except OverflowError:
        raise DomainError(f"power overflow on {x}") from None
    if k % 2:
        return _outward(a, b)
    if x.contains_zero():
        y = _outward(0.0, max(a, b))
        return _make(0.0, y.hi)
    y = _outward(min(a, b), max(a, b))
    return _make(max(y.lo, 0.0), y.hi)


def neg(x):
    return -x


_ELEMENTARY = {"sin": sin, "cos": cos, "exp": exp, "log": log, "sqrt": sqrt, "neg": neg}


def elem(fn, x, k=None):
    """Apply the elementary function named ``fn`` to ``x``."""
    if fn == "pow_int":
        return pow_int(x, k)
    try:
        f = _ELEMENTARY[fn]
    except KeyError:
        raise PreconditionError(f"unknown elementary function {fn!r}") from None
    return f(x)


# -- second-order jets -------------------------------------------------------


_ZERO = _make(0.0, 0.0)
_ONE = _make(1.0, 1.0)


class Jet2:
    """Enclosures ``val``, ``d1``, ``d2`` of f, f', f'' over one interval."""

    __slots__ = ("val", "d1", "d2")

    def __init__(self, val, d1, d2):
        self.val = val
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def constant(cls, c):
        return cls(_coerce(c), _ZERO, _ZERO)

    @classmethod
    def variable(cls, x):
        return cls(x, _ONE, _ZERO)

    def __repr__(self):
        return f"Jet2(val={self.val}, d1={self.d1}, d2={self.d2})"

    def __neg__(self):
        return Jet2(-self.val, -self.d1, -self.d2)

    def __add__(self, other):
        other = _coerce_jet(other)
        return Jet2(self.val + other.val, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_jet(other)
        return Jet2(self.val - other.val, self.d1 - other.d1, self.d2 - other.d2)

    def __rsub__(self, other):
        return _coerce_jet(other) - self

    def __mul__(self, other):
        other = _coerce_jet(other)
        u, v = self, other
        # (uv)'' = u''v + 2u'v' + uv''
        return Jet2(
            u.val * v.val,
            u.d1 * v.val + u.val * v.d1,
            u.d2 * v.val + 2.0 * (u.d1 * v.d1) + u.val * v.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * reciprocal(_coerce_jet(other))

    def __rtruediv__(self, other):
        return _coerce_jet(other) * reciprocal(self)

    def __pow__(self, k):
        if isinstance(k, int):
            return jet_pow_int(self, k)
        return NotImplemented


def _coerce_jet(x):
    if isinstance(x, Jet2):
        return x
    return Jet2.constant(x)


def _chain(u, g, g1, g2):
    """Compose an outer function with enclosures g, g', g'' over ``u.val``."""
    d1 = g1 * u.d1
    d2 = g2 * pow_int(u.d1, 2) + g1 * u.d2
    return Jet2(g, d1, d2)


def jet_sin(u):
    s = sin(u.val)
    return _chain(u, s, cos(u.val), -s)


def jet_cos(u):
    c = cos(u.val)
    return _chain(u, c, -sin(u.val), -c)


def jet_exp(u):
    e = exp(u.val)
    return _chain(u, e, e, e)


def jet_log(u):
    x = u.val
    return _chain(u, log(x), 1.0 / x, -pow_int(x, -2))


def jet_sqrt(u):
    x = u.val
    r = sqrt(x)
    return _chain(u, r, 0.5 / r, -0.25 / (x * r))


def reciprocal(u):
    x = u.val
    if x.contains_zero():
        raise DomainError(f"division by an interval containing zero: {x}")
    r = 1.0 / x
    return _chain(u, r, -pow_int(x, -2), 2.0 * pow_int(x, -3))


def jet_pow_int(u, k):
    if k == 0:
        return Jet2.constant(1.0)
    if k == 1:
        return u
    x = u.val
    g1 = k * pow_int(x, k - 1)
    g2 = (k * (k - 1)) * pow_int(x, k - 2)
    return _chain(u, pow_int(x, k), g1, g2)


def jet_pow_real(u, k):
    """``u**k`` for non-integer ``k`` as ``exp(k * log(u))``; needs u > 0."""
    return jet_exp(float(k) * jet_log(u))


_JET_ELEMENTARY = {
    "sin": jet_sin,
    "cos": jet_cos,
    "exp": jet_exp,
    "log": jet_log,
    "sqrt": jet_sqrt,
    "neg": Jet2.__neg__,
}


def jet_elem(fn, u, k=None):
    if fn == "pow_int":
        return jet_pow_int(u, k)
    try:
        f = _JET_ELEMENTARY[fn]
    except KeyError:
        raise PreconditionError(f"unknown elementary function {fn!r}") from None
    return f(u)
