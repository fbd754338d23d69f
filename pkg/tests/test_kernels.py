from fractions import Fraction

import numpy as np
import pytest

from peanoquad.errors import PreconditionError
from peanoquad.kernels import (
    ABS_INTEGRAL_CONSTANTS,
    KernelId,
    kernel_abs_integral,
    kernel_abs_integral_oracle,
    kernel_eval,
    kernel_mean,
    kernel_zeros,
    lemma1_residual,
    p_eval,
    q_eval,
)

KERNELS = list(KernelId)
# sum of the combination multipliers, used to scale absolute tolerances
SCALE = {KernelId.K1: 3, KernelId.K2: 8, KernelId.K3: 90}


def random_intervals(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        a = float(rng.uniform(-5, 5))
        out.append((a, a + float(rng.uniform(0.1, 4))))
    return out


# -- p and q -----------------------------------------------------------------------


@pytest.mark.parametrize("x, t, want", [(0.5, 0.25, 0.25), (0.5, 0.75, -0.25), (1.0, 0.5, 0.5)])
def test_p_examples(x, t, want):
    assert p_eval(x, t, 0.0, 1.0) == want


def test_p_rejects_points_outside():
    with pytest.raises(PreconditionError):
        p_eval(0.5, 1.5, 0.0, 1.0)
    with pytest.raises(PreconditionError):
        p_eval(0.5, 0.5, 1.0, 1.0)


def test_q_examples():
    assert q_eval(0.0, 0.5, 0.0, 1.0) == pytest.approx(0.125, abs=1e-15)
    assert q_eval(0.5, 0.25, 0.0, 1.0) == pytest.approx(-0.03125, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 0.3, 0.5, 1.0])
def test_q_vanishes_at_endpoints(x):
    assert q_eval(x, 0.0, 0.0, 1.0) == 0.0
    assert q_eval(x, 1.0, 0.0, 1.0) == 0.0


def _q_numeric(x, s, a, b, nodes=8):
    # p(x, t) p(t, s) is piecewise linear times piecewise linear in t with
    # jumps at t = x and t = s, so Gauss-Legendre per piece is exact
    u, w = np.polynomial.legendre.leggauss(nodes)
    cuts = sorted({a, b, x, s})
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        half = (hi - lo) / 2
        for ui, wi in zip(u, w):
            t = lo + half * (ui + 1)
            total += half * wi * p_eval(x, t, a, b) * p_eval(t, s, a, b)
    return total


def test_q_matches_numeric_integral_on_grid():
    grid = np.linspace(0.0, 1.0, 20)
    for x in grid:
        for s in grid:
            assert abs(q_eval(x, s, 0.0, 1.0) - _q_numeric(x, s, 0.0, 1.0)) <= 1e-8


# -- kernels ------------------------------------------------------------------------


def test_kernel_examples():
    a, b = 0.0, 1.0
    assert kernel_eval(KernelId.K1, (2 * a + b) / 3, a, b) == pytest.approx(0, abs=1e-15)
    assert kernel_eval(KernelId.K3, (38 * a + 7 * b) / 45, a, b) == pytest.approx(0, abs=1e-14)
    assert kernel_eval(KernelId.K2, (a + b) / 2, a, b) == pytest.approx(0, abs=1e-15)


def test_kernel_exact_in_rationals():
    a, b = Fraction(0), Fraction(1)
    for k in KERNELS:
        for z in kernel_zeros(k, a, b):
            assert kernel_eval(k, z, a, b) == 0


def test_kernel_eval_vectorised_matches_scalar():
    s = np.linspace(0, 1, 101)
    for k in KERNELS:
        vec = kernel_eval(k, s, 0.0, 1.0)
        assert np.allclose(vec, [kernel_eval(k, float(v), 0.0, 1.0) for v in s], atol=1e-15)


@pytest.mark.parametrize(
    "k, want",
    [
        (KernelId.K1, [0, Fraction(1, 3), Fraction(2, 3), 1]),
        (KernelId.K2, [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1]),
        (KernelId.K3, [0, Fraction(7, 45), Fraction(1, 3), Fraction(2, 3), Fraction(38, 45), 1]),
    ],
)
def test_kernel_zeros_examples(k, want):
    assert kernel_zeros(k, Fraction(0), Fraction(1)) == want
    assert kernel_zeros(k, 0.0, 1.0) == pytest.approx([float(w) for w in want], abs=1e-16)


@pytest.mark.parametrize("k", KERNELS)
def test_zero_residuals_scaled(k):
    for a, b in random_intervals(20, 3):
        for z in kernel_zeros(k, a, b):
            assert abs(kernel_eval(k, z, a, b)) <= 1e-10 * (b - a) ** 3 * SCALE[k]


def _side_signs(k, z, a, b):
    d = 1e-4 * (b - a)
    return np.sign(kernel_eval(k, z - d, a, b)), np.sign(kernel_eval(k, z + d, a, b))


@pytest.mark.parametrize(
    "k, z",
    [
        (KernelId.K1, Fraction(1, 3)),
        (KernelId.K1, Fraction(2, 3)),
        (KernelId.K2, Fraction(1, 4)),
        (KernelId.K2, Fraction(3, 4)),
        (KernelId.K3, Fraction(7, 45)),
        (KernelId.K3, Fraction(1, 3)),
        (KernelId.K3, Fraction(2, 3)),
        (KernelId.K3, Fraction(38, 45)),
    ],
)
def test_interior_zero_is_a_crossing(k, z):
    left, right = _side_signs(k, float(z), 0.0, 1.0)
    assert left * right < 0


def test_k2_midpoint_zero_is_a_touching_double_zero():
    # K2 is non-positive on [1/4, 3/4] and vanishes at 1/2 without changing sign
    for d in (Fraction(1, 100), Fraction(1, 1000), Fraction(1, 8)):
        left = kernel_eval(KernelId.K2, Fraction(1, 2) - d, Fraction(0), Fraction(1))
        right = kernel_eval(KernelId.K2, Fraction(1, 2) + d, Fraction(0), Fraction(1))
        assert left == right < 0


@pytest.mark.parametrize("k", KERNELS)
def test_no_other_zeros(k):
    # between consecutive listed zeros the kernel keeps one strict sign
    zs = kernel_zeros(k, 0.0, 1.0)
    for lo, hi in zip(zs, zs[1:]):
        s = np.linspace(lo, hi, 2002)[1:-1]
        v = kernel_eval(k, s, 0.0, 1.0)
        assert np.all(v > 0) or np.all(v < 0)


@pytest.mark.parametrize("k", KERNELS)
def test_midpoint_symmetry(k):
    for a, b in random_intervals(5, 9):
        u = np.linspace(0, (b - a) / 2, 1000)
        left = kernel_eval(k, np.minimum(a + u, b), a, b)
        right = kernel_eval(k, np.maximum(b - u, a), a, b)
        assert np.max(np.abs(left - right)) <= 1e-10 * (b - a) ** 3 * SCALE[k]


# -- integrals ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "k, want",
    [
        (KernelId.K1, Fraction(1, 27)),
        (KernelId.K2, Fraction(1, 24)),
        (KernelId.K3, Fraction(2036, 6075)),
    ],
)
def test_abs_integral_constants(k, want):
    assert kernel_abs_integral(k, Fraction(0), Fraction(1)) == want
    assert kernel_abs_integral(k, 0.0, 1.0) == pytest.approx(float(want), rel=1e-12)
    assert ABS_INTEGRAL_CONSTANTS[k] == want


@pytest.mark.parametrize("k", KERNELS)
def test_mean_zero(k):
    assert kernel_mean(k, Fraction(0), Fraction(1)) == 0
    for a, b in random_intervals(20, 5):
        assert abs(kernel_mean(k, a, b)) <= 1e-12 * (b - a) ** 3 * SCALE[k]


@pytest.mark.parametrize("k", KERNELS)
def test_abs_integral_scaling(k):
    unit = kernel_abs_integral(k, 0.0, 1.0)
    for a, b in random_intervals(20, 1):
        got = kernel_abs_integral(k, a, b)
        assert got == pytest.approx(unit * (b - a) ** 4, rel=1e-12)


@pytest.mark.parametrize("k", KERNELS)
def test_abs_integral_translation(k):
    for a, b in random_intervals(20, 2):
        base = kernel_abs_integral(k, Fraction(a), Fraction(b))
        for c in (-3.25, 0.5, 7.0):
            assert kernel_abs_integral(k, Fraction(a) + Fraction(c), Fraction(b) + Fraction(c)) == base
            shifted = kernel_abs_integral(k, a + c, b + c)
            assert shifted == pytest.approx(kernel_abs_integral(k, a, b), rel=1e-12)


@pytest.mark.parametrize(
    "k, a, b, want, tol",
    [
        (KernelId.K1, 0.0, 1.0, 0.037037, 1e-6),
        (KernelId.K2, 0.0, 1.0, 0.041667, 1e-6),
        (KernelId.K3, 0.0, 2.0, 2036 / 6075 * 16, 1e-4),
    ],
)
def test_oracle_examples(k, a, b, want, tol):
    assert abs(kernel_abs_integral_oracle(k, a, b) - want) <= tol


@pytest.mark.parametrize("k", KERNELS)
def test_oracle_agrees_with_closed_form(k):
    for a, b in [(0.0, 1.0), (-1.0, 2.0)]:
        closed = kernel_abs_integral(k, a, b)
        assert abs(closed - kernel_abs_integral_oracle(k, a, b)) <= 1e-5 * (b - a) ** 4


def test_oracle_coarse_grid():
    for k in KERNELS:
        closed = kernel_abs_integral(k, 0.0, 1.0)
        assert abs(kernel_abs_integral_oracle(k, 0.0, 1.0, n=1000) - closed) <= 1e-2


def test_oracle_requires_enough_points():
    with pytest.raises(PreconditionError):
        kernel_abs_integral_oracle(KernelId.K1, 0.0, 1.0, n=999)


# -- kernel identity --------------------------------------------------------------------


@pytest.mark.parametrize("x", [0.0, 0.3, 1.0])
def test_identity_linear(x):
    lhs, rhs = lemma1_residual("t", x, 0.0, 1.0, 0.5)
    assert lhs == pytest.approx(0, abs=1e-15)
    assert rhs == pytest.approx(0, abs=1e-15)


def test_identity_square_midpoint():
    lhs, rhs = lemma1_residual("t^2", 0.5, 0.0, 1.0, 1 / 3)
    assert lhs == pytest.approx(-1 / 12, abs=1e-15)
    assert rhs == pytest.approx(-1 / 12, abs=1e-10)


def test_identity_square_left_end():
    lhs, rhs = lemma1_residual("t^2", 0.0, 0.0, 1.0, 1 / 3)
    assert lhs == pytest.approx(1 / 6, abs=1e-15)
    assert rhs == pytest.approx(1 / 6, abs=1e-10)


def test_identity_rejects_odd_resolution():
    with pytest.raises(PreconditionError):
        lemma1_residual("t", 0.5, 0.0, 1.0, 0.5, n=401)
