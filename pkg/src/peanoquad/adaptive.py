"""Composite rules and certified integration to a prescribed tolerance."""

import heapq
import math
from fractions import Fraction

from .errors import BudgetExhausted, CertificationError, DomainError, PreconditionError
from .expr import as_expr, second_derivative_enclosure
from .interval import Interval
from .rules import CertifiedResult, Panel, RuleId, _check_ab, apply_rule, assemble, certify

DEFAULT_MAX_PANELS = 100_000
GLOBAL_REFINE_DEPTH = 6
PANEL_REFINE_DEPTH = 2

__all__ = [
    "CertifiedResult",
    "Panel",
    "composite_apply",
    "integrate_adaptive",
    "integrate_uniform",
    "uniform_panel_count",
]


def composite_apply(rule, f, partition):
    """Sum of single-panel rule values over consecutive partition points."""
    rule = RuleId.parse(rule)
    partition = list(partition)
    if len(partition) < 2:
        raise PreconditionError("a partition needs at least two points")
    if any(not lo < hi for lo, hi in zip(partition, partition[1:])):
        raise PreconditionError("partition must be strictly increasing")
    return math.fsum(apply_rule(rule, f, lo, hi) for lo, hi in zip(partition, partition[1:]))


def uniform_panel_count(rule, gamma, Gamma, a, b, eps):
    """Smallest ``n >= 1`` with ``C (Gamma - gamma) (b - a)**3 / n**2 <= eps``.

    The comparison is carried out exactly in rational arithmetic.
    """
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    if not eps > 0:
        raise PreconditionError(f"eps must be > 0, got {eps}")
    if gamma > Gamma:
        raise PreconditionError(f"need gamma <= Gamma, got {gamma} > {Gamma}")
    need = (
        rule.peano_like_const
        * (Fraction(Gamma) - Fraction(gamma))
        * (Fraction(b) - Fraction(a)) ** 3
        / Fraction(eps)
    )
    # smallest n with n*n >= need
    n = max(1, math.isqrt(math.floor(need)))
    while n * n < need:
        n += 1
    while n > 1 and (n - 1) ** 2 >= need:
        n -= 1
    return n


def _uniform_partition(a, b, n):
    w = b - a
    points = [a] + [a + w * (i / n) for i in range(1, n)] + [b]
    if any(not lo < hi for lo, hi in zip(points, points[1:])):
        raise PreconditionError(f"[{a!r}, {b!r}] cannot be split into {n} float panels")
    return points


def _global_enclosure(ast, rule, a, b, refine_depth):
    try:
        return second_derivative_enclosure(ast, Interval(a, b), refine_depth)
    except DomainError as exc:
        raise CertificationError(
            f"{rule.label} rule cannot be certified on [{a!r}, {b!r}]: {exc}"
        ) from None


def integrate_uniform(
    expr,
    rule,
    a,
    b,
    eps,
    refine_depth=GLOBAL_REFINE_DEPTH,
    panel_refine_depth=PANEL_REFINE_DEPTH,
    max_panels=DEFAULT_MAX_PANELS,
):
    """Uniform composite rule sized a priori to meet ``eps``.

    The global enclosure of f'' fixes the panel count; every panel is then
    re-enclosed (intersected with the global enclosure, so never looser)
    and the reported bound is the sum of the per-panel bounds.  If rounding
    allowances push that sum above ``eps`` the panel count is increased.
    """
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    if not eps > 0:
        raise PreconditionError(f"eps must be > 0, got {eps}")
    ast = as_expr(expr)
    outer = _global_enclosure(ast, rule, a, b, refine_depth)
    n = uniform_panel_count(rule, outer.lo, outer.hi, a, b, eps)
    result = None
    while True:
        if n > max_panels:
            raise BudgetExhausted(
                f"uniform {rule.label} needs {n} panels, budget is {max_panels}", result
            )
        points = _uniform_partition(a, b, n)
        panels, evals = [], 0
        for lo, hi in zip(points, points[1:]):
            panel, k = certify(ast, rule, lo, hi, panel_refine_depth, outer)
            panels.append(panel)
            evals += k
        result = assemble(rule, panels, evals)
        if result.bound <= eps:
            return result
        n = max(n + 1, math.ceil(1.25 * n))


def integrate_adaptive(
    expr,
    rule,
    a,
    b,
    eps,
    max_panels=DEFAULT_MAX_PANELS,
    refine_depth=PANEL_REFINE_DEPTH,
):
    """Worst-first bisection until the certified bound is at most ``eps``.

    The panel with the largest bound is split at its midpoint; ties go to
    the leftmost panel, so the panel list is deterministic.  Raises
    :class:`BudgetExhausted` (carrying the best result so far) when
    ``max_panels`` would be exceeded.
    """
    rule = RuleId.parse(rule)
    _check_ab(a, b)
    if not eps > 0:
        raise PreconditionError(f"eps must be > 0, got {eps}")
    if max_panels < 1:
        raise PreconditionError(f"max_panels must be >= 1, got {max_panels}")
    ast = as_expr(expr)

    first, evals = certify(ast, rule, a, b, refine_depth)
    heap = [(-first.bound, first.a, first)]
    running = first.bound
    while True:
        if running <= eps:
            result = assemble(rule, [item[2] for item in heap], evals)
            if result.bound <= eps:
                return result
            running = result.bound
        if len(heap) >= max_panels:
            raise BudgetExhausted(
                f"adaptive {rule.label} reached {len(heap)} panels with bound "
                f"{_total(heap):.3g} > eps={eps:g}",
                assemble(rule, [item[2] for item in heap], evals),
            )
        _, _, worst = heapq.heappop(heap)
        mid = 0.5 * (worst.a + worst.b)
        if not worst.a < mid < worst.b:
            heapq.heappush(heap, (-worst.bound, worst.a, worst))
            raise BudgetExhausted(
                f"panel [{worst.a!r}, {worst.b!r}] cannot be bisected further",
                assemble(rule, [item[2] for item in heap], evals),
            )
        running -= worst.bound
        for lo, hi in ((worst.a, mid), (mid, worst.b)):
            panel, k = certify(ast, rule, lo, hi, refine_depth)
            evals += k
            running += panel.bound
            heapq.heappush(heap, (-panel.bound, panel.a, panel))


def _total(heap):
    return math.fsum(item[2].bound for item in heap)
