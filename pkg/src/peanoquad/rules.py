"""Simpson, 3/8 Simpson and Boole rules with Peano-like error bounds.

For ``gamma <= f'' <= Gamma`` on ``[a, b]`` each rule satisfies

    |Q(f) - integral of f| <= C * (Gamma - gamma) * (b - a)**3

with ``C = 1/162``, ``1/384`` and ``509/273375`` respectively.  The classical
Peano bound replaces ``Gamma - gamma`` by ``||f''||_inf`` and doubles ``C``.
"""

import enum
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CertificationError, DomainError, EvaluationError, PreconditionError
from .expr import as_expr, compile_real, eval_interval, jet_enclosure
from .interval import Interval
from .kernels import KernelId

_U = sys.float_info.epsilon / 2  # unit roundoff


@dataclass(frozen=True)
class _RuleData:
    label: str
    nodes: tuple  # (p, q, r): node = (p*a + q*b) / r
    weights: tuple  # integer numerators over ``denominator``
    denominator: int
    peano_like_const: Fraction
    peano_const: Fraction
    degree: int
    multiplier: int
    kernel: KernelId


_DATA = {
    "simpson": _RuleData(
        "Simpson",
        ((1, 0, 1), (1, 1, 2), (0, 1, 1)),
        (1, 4, 1),
        6,
        Fraction(1, 162),
        Fraction(1, 81),
        3,
        3,
        KernelId.K1,
    ),
    "simpson38": _RuleData(
        "3/8 Simpson",
        ((1, 0, 1), (2, 1, 3), (1, 2, 3), (0, 1, 1)),
        (1, 3, 3, 1),
        8,
        Fraction(1, 384),
        Fraction(1, 192),
        3,
        8,
        KernelId.K2,
    ),
    "boole": _RuleData(
        "Boole",
        ((1, 0, 1), (3, 1, 4), (1, 1, 2), (1, 3, 4), (0, 1, 1)),
        (7, 32, 12, 32, 7),
        90,
        Fraction(509, 273375),
        Fraction(1018, 273375),
        5,
        90,
        KernelId.K3,
    ),
}

_ALIASES = {"3/8": "simpson38", "simpson3/8": "simpson38", "simpson_38": "simpson38"}


class RuleId(enum.Enum):
    SIMPSON = "simpson"
    SIMPSON38 = "simpson38"
    BOOLE = "boole"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        return cls(_ALIASES.get(key, key))

    @property
    def _data(self):
        return _DATA[self.value]

    @property
    def label(self):
        return self._data.label

    @property
    def nodes(self):
        """Affine coefficients ``(alpha, beta)`` with node = alpha*a + beta*b."""
        return tuple((Fraction(p, r), Fraction(q, r)) for p, q, r in self._data.nodes)

    @property
    def weights(self):
        d = self._data
        return tuple(Fraction(w, d.denominator) for w in d.weights)

    @property
    def peano_like_const(self):
        return self._data.peano_like_const

    @property
    def peano_const(self):
        return self._data.peano_const

    @property
    def degree(self):
        return self._data.degree

    @property
    def multiplier(self):
        """Integer the rule is scaled by in the kernel identity (3, 8, 90)."""
        return self._data.multiplier

    @property
    def kernel(self):
        return self._data.kernel


def _check_ab(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise PreconditionError(f"endpoints must be finite, got a={a!r}, b={b!r}")
    if not a < b:
        raise PreconditionError(f"need a < b, got a={a!r}, b={b!r}")


def node_points(rule, a, b):
    """Float nodes of ``rule`` on ``[a, b]``; the endpoints are exact."""
    out = []
    for p, q, r in RuleId.parse(rule)._data.nodes:
        if q == 0:
            out.append(a)
        elif p == 0:
            out.append(b)
        else:
            out.append(min(max((p * a + q * b) / r, a), b))
    return out


def _as_callable(f):
    if callable(f):
        return f
    return compile_real(as_expr(f))


def _rule_sum(rule, values, a, b):
    d = rule._data
    s = math.fsum(w * v for w, v in zip(d.weights, values))
    return (b - a) * s / d.denominator


def apply_rule(rule, f, a, b):
    """``(b - a) * sum(w_i * f(x_i))`` for one panel.

    ``f`` is a callable, an expression string or a parsed expression.
    """
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    f = _as_callable(f)
    return _rule_sum(rule, [f(x) for x in node_points(rule, a, b)], a, b)


def peano_like_bound(rule, gamma, Gamma, a, b):
    """``C * (Gamma - gamma) * (b - a)**3``."""
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    if gamma > Gamma:
        raise PreconditionError(f"need gamma <= Gamma, got {gamma} > {Gamma}")
    return float(rule.peano_like_const) * (Gamma - gamma) * (b - a) ** 3


def peano_bound(rule, sup_norm_f2, a, b):
    """Classical bound ``c * ||f''||_inf * (b - a)**3``."""
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    if sup_norm_f2 < 0:
        raise PreconditionError(f"sup norm must be >= 0, got {sup_norm_f2}")
    return float(rule.peano_const) * sup_norm_f2 * (b - a) ** 3


@dataclass(frozen=True)
class BoundComparison:
    peano_like: float
    peano_classic: float
    ratio: float
    gamma: float
    Gamma: float
    sup_norm: float


def compare_bounds(rule, gamma, Gamma, a, b):
    """Peano-like against classical bound for the same ``[gamma, Gamma]``.

    With gamma, Gamma the inf and sup of f'' the Peano-like bound is never
    larger, and the two coincide exactly when ``Gamma == -gamma``.  The ratio
    is reported as 1 when the classical bound vanishes.
    """
    like = peano_like_bound(rule, gamma, Gamma, a, b)
    sup_norm = max(abs(gamma), abs(Gamma))
    classic = peano_bound(rule, sup_norm, a, b)
    ratio = like / classic if classic > 0 else 1.0
    return BoundComparison(like, classic, ratio, gamma, Gamma, sup_norm)


# -- certified panels ----------------------------------------------------------


def round_up(x):
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class Panel:
    """One certified subinterval.

    ``truncation`` is the Peano-like bound ``C * (Gamma - gamma) * (b - a)**3``
    rounded upward; ``rounding`` bounds the floating-point error of
    ``estimate`` against the exact rule value; ``bound`` is their sum.
    """

    a: float
    b: float
    gamma: float
    Gamma: float
    estimate: float
    truncation: float
    rounding: float
    bound: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "bound", round_up(self.truncation + self.rounding))

    @property
    def width(self):
        return self.b - self.a


@dataclass(frozen=True)
class CertifiedResult:
    """Integral estimate with a rigorous bound on ``|estimate - integral|``."""

    rule: RuleId
    estimate: float
    bound: float
    panels: tuple
    evals: int

    @property
    def a(self):
        return self.panels[0].a

    @property
    def b(self):
        return self.panels[-1].b

    @property
    def gamma(self):
        return min(p.gamma for p in self.panels)

    @property
    def Gamma(self):
        return max(p.Gamma for p in self.panels)

    @property
    def truncation(self):
        return math.fsum(p.truncation for p in self.panels)

    @property
    def rounding(self):
        return math.fsum(p.rounding for p in self.panels)


def assemble(rule, panels, evals):
    """Combine panels (any order) into a left-to-right certified result."""
    panels = tuple(sorted(panels, key=lambda p: p.a))
    estimate = math.fsum(p.estimate for p in panels)
    # fsum is correctly rounded; one ulp of the estimate covers its error
    bound = round_up(math.fsum(p.bound for p in panels) + math.ulp(estimate))
    return CertifiedResult(rule, estimate, bound, panels, evals)


def _truncation_upper(rule, d2, a, b):
    h = Interval(b) - Interval(a)
    spread = Interval(d2.hi) - Interval(d2.lo)
    return (Interval.around(rule.peano_like_const) * spread * h**3).hi


def _rounding_upper(rule, ast, a, b, nodes, values, d1):
    """Bound on ``|float rule sum - exact rule sum|`` for true f, exact nodes.

    Three sources: the error of each float ``f(x_i)`` (measured against a
    point-interval evaluation), the node offsets ``|x_i - exact x_i|``
    propagated through ``|f'|``, and the arithmetic of the weighted sum.
    """
    d = rule._data
    eval_err = 0.0
    node_err = 0.0
    magnitude = 0.0
    slope = d1.mag
    for (p, q, r), w, x, v in zip(d.nodes, d.weights, nodes, values):
        enc = eval_interval(ast, Interval(x))
        eval_err += w * max(v - enc.lo, enc.hi - v, 0.0)
        if p and q:
            node_err += w * slope * 4 * _U * (abs(p * a) + abs(q * b)) / r
        magnitude += w * abs(v)
    scale = (b - a) / d.denominator
    total = scale * (eval_err + node_err) * (1 + 8 * _U) + 8 * _U * scale * magnitude
    return round_up(total * (1 + 8 * _U))


def certify(ast, rule, a, b, refine_depth, outer=None):
    """Certify one panel; returns ``(panel, evals)``.

    ``outer`` is an already known enclosure of f'' on a superset of
    ``[a, b]``; the per-panel enclosure is intersected with it.
    """
    x = Interval(a, b)
    try:
        jet = jet_enclosure(ast, x, refine_depth)
    except DomainError as exc:
        raise CertificationError(
            f"{rule.label} rule cannot be certified on [{a!r}, {b!r}]: {exc}"
        ) from None
    d2 = jet.d2 if outer is None else jet.d2.intersect(outer)
    nodes = node_points(rule, a, b)
    try:
        f = compile_real(ast)
        values = [f(t) for t in nodes]
        rounding = _rounding_upper(rule, ast, a, b, nodes, values, jet.d1)
    except (EvaluationError, DomainError) as exc:
        raise CertificationError(
            f"{rule.label} rule cannot be evaluated on [{a!r}, {b!r}]: {exc}"
        ) from None
    panel = Panel(
        a=a,
        b=b,
        gamma=d2.lo,
        Gamma=d2.hi,
        estimate=_rule_sum(rule, values, a, b),
        truncation=_truncation_upper(rule, d2, a, b),
        rounding=rounding,
    )
    return panel, len(nodes)


def certify_panel(expr, rule, a, b, refine_depth=6):
    """Single-panel rule estimate with its certified error bound.

    Raises :class:`CertificationError` when f'' cannot be enclosed on
    ``[a, b]`` (for example ``sqrt(t)`` near 0).
    """
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    panel, evals = certify(as_expr(expr), rule, a, b, refine_depth)
    return assemble(rule, [panel], evals)


__all__ = [
    "BoundComparison",
    "CertifiedResult",
    "Panel",
    "RuleId",
    "apply_rule",
    "assemble",
    "certify_panel",
    "compare_bounds",
    "node_points",
    "peano_bound",
    "peano_like_bound",
]
