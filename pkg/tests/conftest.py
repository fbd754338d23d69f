"""Shared corpus with independent closed-form oracles.

Every corpus entry carries the source string plus hand-written formulas for
f, f', f'' and an antiderivative, all in mpmath so that reference integrals
are accurate far beyond double precision.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import pytest

mpmath.mp.dps = 50


@dataclass(frozen=True)
class Case:
    src: str
    f: Callable
    d1: Callable
    d2: Callable
    antiderivative: Callable
    monomial: int = -1  # power k for t^k, so references can be exact rationals

    def exact(self, a, b):
        """Integral over [a, b]: a Fraction for monomials, else a 50-digit mpf."""
        if self.monomial >= 0:
            k = self.monomial + 1
            return (Fraction(b) ** k - Fraction(a) ** k) / k
        with mpmath.workdps(50):
            return self.antiderivative(mpmath.mpf(b)) - self.antiderivative(mpmath.mpf(a))

    def reference(self, a, b):
        """Integral over [a, b] rounded to a float."""
        return float(self.exact(a, b))

    def error(self, estimate, a, b):
        """``|estimate - integral|`` computed without rounding the integral first."""
        exact = self.exact(a, b)
        if isinstance(exact, Fraction):
            return abs(Fraction(estimate) - exact)
        with mpmath.workdps(50):
            return abs(mpmath.mpf(estimate) - exact)

    def within(self, estimate, bound, a, b):
        """True if the certificate ``bound`` covers the actual error."""
        err = self.error(estimate, a, b)
        if isinstance(err, Fraction):
            return err <= Fraction(bound)
        with mpmath.workdps(50):
            return err <= mpmath.mpf(bound)

    def values(self, t):
        """(f, f', f'') at float t, via mpmath."""
        t = mpmath.mpf(t)
        return float(self.f(t)), float(self.d1(t)), float(self.d2(t))


def _monomial(k):
    return Case(
        f"t^{k}",
        lambda t: t**k,
        lambda t: k * t ** (k - 1) if k >= 1 else mpmath.mpf(0),
        lambda t: k * (k - 1) * t ** (k - 2) if k >= 2 else mpmath.mpf(0),
        lambda t: t ** (k + 1) / (k + 1),
        monomial=k,
    )


def _gauss_antiderivative(t):
    return mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(t)


CORPUS = [_monomial(k) for k in range(9)] + [
    Case("sin(t)", mpmath.sin, mpmath.cos, lambda t: -mpmath.sin(t), lambda t: -mpmath.cos(t)),
    Case("cos(t)", mpmath.cos, lambda t: -mpmath.sin(t), lambda t: -mpmath.cos(t), mpmath.sin),
    Case("exp(t)", mpmath.exp, mpmath.exp, mpmath.exp, mpmath.exp),
    Case(
        "exp(-t^2)",
        lambda t: mpmath.exp(-(t**2)),
        lambda t: -2 * t * mpmath.exp(-(t**2)),
        lambda t: (4 * t**2 - 2) * mpmath.exp(-(t**2)),
        _gauss_antiderivative,
    ),
    Case(
        "1/(1+t)",
        lambda t: 1 / (1 + t),
        lambda t: -1 / (1 + t) ** 2,
        lambda t: 2 / (1 + t) ** 3,
        lambda t: mpmath.log(1 + t),
    ),
    Case(
        "log(1+t)",
        lambda t: mpmath.log(1 + t),
        lambda t: 1 / (1 + t),
        lambda t: -1 / (1 + t) ** 2,
        lambda t: (1 + t) * mpmath.log(1 + t) - t,
    ),
]

CORPUS_BY_SRC = {case.src: case for case in CORPUS}

RULES = ("simpson", "simpson38", "boole")


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="rewrite tests/golden/*.json from the current CLI output",
    )


@pytest.fixture
def update_golden(request):
    return request.config.getoption("--update-golden")


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line; ``report(ok, detail)`` also prints it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})
    number = request.node.get_closest_marker("criterion").args[0]

    def report(ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok

    return report


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])


@pytest.fixture(params=CORPUS, ids=lambda c: c.src)
def case(request):
    return request.param
