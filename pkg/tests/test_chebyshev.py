import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from satotate_lab import chebyshev as ch
from satotate_lab import kernels as kn


def test_cheb_poly_low_degrees():
    assert ch.cheb_poly(0) == [1]
    assert ch.cheb_poly(2) == [-1, 0, 1]
    assert ch.cheb_poly(3) == [0, -2, 0, 1]


def test_cheb_eval_values():
    assert ch.cheb_eval(1, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert ch.cheb_eval(2, 1 / 3) == pytest.approx(0.0, abs=1e-14)
    assert ch.cheb_eval(4, 0.0) == 5.0


@given(st.integers(0, 60), st.floats(0.01, 0.99))
def test_sine_ratio(n, t):
    expect = math.sin((n + 1) * math.pi * t) / math.sin(math.pi * t)
    assert ch.cheb_eval(n, t) == pytest.approx(expect, abs=1e-9)


@given(st.integers(0, 40), st.floats(0, 1))
def test_recurrence_matches_eval(n, t):
    x = 2 * math.cos(math.pi * t)
    prev, cur = 1.0, x
    values = [prev, cur]
    for _ in range(n):
        prev, cur = cur, x * cur - prev
        values.append(cur)
    assert values[n] == pytest.approx(ch.cheb_eval(n, t), abs=1e-10)


def test_cheb_product_examples():
    assert ch.cheb_product(1, 1) == ch.ChebyshevExpansion({0: 1, 2: 1})
    assert ch.cheb_product(0, 7) == ch.ChebyshevExpansion.basis(7)
    assert ch.cheb_product(2, 3) == ch.ChebyshevExpansion({1: 1, 3: 1, 5: 1})


def test_product_formula_against_monomials():
    for n in range(21):
        for m in range(n, 21):
            assert ch.cheb_product(n, m).to_monomial() == ch.poly_mul(ch.cheb_poly(n), ch.cheb_poly(m))


@given(st.integers(0, 12), st.integers(0, 12), st.floats(0, 1))
def test_product_pointwise(n, m, t):
    assert ch.cheb_product(n, m).evaluate(t) == pytest.approx(ch.cheb_eval(n, t) * ch.cheb_eval(m, t), abs=1e-9)


def test_orthonormality():
    spec = ch.MeasureSpec.sato_tate()
    for n, m in itertools.combinations_with_replacement(range(0, 31, 3), 2):
        val = ch.integrate(spec, lambda t: ch.cheb_eval(n, t) * ch.cheb_eval(m, t))
        assert val == pytest.approx(1.0 if n == m else 0.0, abs=1e-10)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_generating_function(p):
    ts = np.random.default_rng(p).uniform(0, 1, 50)
    series = sum(ch.cheb_eval(2 * m, ts) / p**m for m in range(201))
    assert np.abs(series - ch.plancherel_factor(p, ts)).max() < 1e-8


def test_d_table_examples():
    assert ch.d_table([3]).values == {3: 1}
    assert ch.d_table([2, 2]).values == {0: 1, 2: 1, 4: 1}
    assert ch.d_table([1, 2]).values == {1: 1, 3: 1}
    assert ch.d_table([2, 2, 2]).values == {0: 1, 2: 3, 4: 2, 6: 1}
    assert ch.d_table([2, 2]).to_json() == {"0": "1", "2": "1", "4": "1"}


@given(st.lists(st.integers(1, 8), min_size=1, max_size=4))
def test_d_table_properties(args):
    tab = ch.d_table(args)
    s = sum(args)
    assert all(v > 0 for v in tab.values.values())
    assert all(0 <= m <= s and (s - m) % 2 == 0 for m in tab.values)
    assert sum(v * (m + 1) for m, v in tab.values.items()) == math.prod(a + 1 for a in args)
    assert ch.d_table(reversed(args)).values == tab.values


def test_d_table_guards():
    with pytest.raises(ValueError):
        ch.d_table([])
    with pytest.raises(ValueError):
        ch.d_table([0, 1])
    with pytest.raises(ValueError):
        ch.d_table([1] * 9)
    with pytest.raises(ValueError):
        ch.d_table([40, 40])


def test_measure_density_values():
    st_ = ch.MeasureSpec.sato_tate()
    assert ch.measure_density(st_, 0.5) == pytest.approx(2.0)
    assert ch.measure_density(st_, 0.0) == 0.0
    assert ch.measure_density(ch.MeasureSpec.mu_p(5), 0.5) == pytest.approx(5 / 3, abs=1e-14)


def test_measure_moments():
    assert ch.measure_moment(ch.MeasureSpec.sato_tate(), 0) == pytest.approx(1.0, abs=1e-12)
    assert ch.measure_moment(ch.MeasureSpec.mu_p(5), 4) == pytest.approx(1 / 25, abs=1e-10)
    assert ch.measure_moment(ch.MeasureSpec.mu_p(3), 3) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_mu_p_moment_table(p):
    spec = ch.MeasureSpec.mu_p(p)
    for m in range(6):
        assert abs(ch.measure_moment(spec, 2 * m) - p**-m) < 1e-8
        assert abs(ch.measure_moment(spec, 2 * m + 1)) < 1e-8


def test_mu_p_is_probability():
    for p in (2, 11, 101):
        assert ch.integrate(ch.MeasureSpec.mu_p(p), lambda t: np.ones_like(t)) == pytest.approx(1.0, abs=1e-12)


def test_zm_power_integral():
    fejer = kn.periodic_weight(kn.SmoothKernel.fejer(), 2, 2000)
    gauss = kn.periodic_weight(kn.SmoothKernel.gaussian(), 2, 2000)
    st_ = ch.MeasureSpec.sato_tate()
    assert ch.zm_power_integral(gauss, 1, st_) == pytest.approx(0.0, abs=1e-12)
    assert ch.zm_power_integral(fejer, 2, st_) == pytest.approx(0.0625, abs=1e-12)
    assert ch.zm_power_integral(gauss, 2, st_) == pytest.approx(gauss.variance, abs=1e-12)
    near = ch.zm_power_integral(fejer, 2, ch.MeasureSpec.mu_p(101))
    assert abs(near - 0.0625) < 4 * 2**2 / 101
    with pytest.raises(ValueError):
        ch.zm_power_integral(fejer, 9, st_)


def test_expansion_multiplication_is_bilinear():
    a = ch.ChebyshevExpansion({1: 2, 3: -1})
    b = ch.ChebyshevExpansion({2: 1})
    prod = a * b
    assert prod == ch.ChebyshevExpansion({1: 1, 3: 1, 5: -1})
    assert prod.degree == 5
