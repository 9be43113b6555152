import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satotate_lab import kernels as kn
from satotate_lab import modular_forms as mf
from satotate_lab.acceptance import tau_eta_product
from satotate_lab.curves import primes_up_to


@pytest.fixture(scope="module")
def delta():
    return mf.eigenform(12, 2000)


def test_eta_product_oracle(delta):
    tau = tau_eta_product(301)
    assert [delta.c(n) for n in range(1, 301)] == tau[1:301]


def test_eigenform_examples():
    f = mf.eigenform(12, 10)
    assert (f.c(2), f.c(3), f.c(5)) == (-24, 252, 4830)
    assert mf.eigenform(12, 2).c(1) == 1
    assert mf.eigenform(16, 5).c(2) == 216


def test_unsupported_weight():
    with pytest.raises(mf.UnsupportedWeightError):
        mf.eigenform(14, 10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=40),
       st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=40),
       st.integers(1, 90))
def test_kronecker_matches_schoolbook(f, g, n):
    assert mf.series_mul(f, g, n) == mf.series_mul_schoolbook(f, g, n)


def test_1728_divisibility():
    assert mf.discriminant_series(500)[:3] == [0, 1, -24]


def test_theta_f(delta):
    assert mf.theta_f(delta, 2) == pytest.approx(math.acos(-24 / 2**6.5) / math.pi, abs=1e-15)
    assert mf.theta_f(delta, 2) == pytest.approx(0.5854264439, abs=1e-10)


def test_af_prime_power(delta):
    assert mf.af_prime_power(delta, 7, 0) == 1.0
    assert delta.c(4) == -1472 == delta.c(2) ** 2 - 2**11
    assert mf.af_prime_power(delta, 2, 2) == pytest.approx(-1472 / 2**11, abs=1e-9)


@pytest.mark.parametrize("k", sorted(mf.SUPPORTED_WEIGHTS))
def test_hecke_vs_chebyshev(k):
    form = mf.eigenform(k, 2000)
    for p in map(int, primes_up_to(50)):
        for m in range(6):
            if p**m > form.n_max:
                break
            exact = mf.hecke_prime_power(form, p, m)
            if m:
                assert exact == form.c(p**m)
            assert abs(exact / p ** (m * (k - 1) / 2) - mf.af_prime_power(form, p, m)) < 1e-9
            if m:
                lhs = 2 * math.cos(2 * math.pi * m * mf.theta_f(form, p))
                rhs = form.normalized(p ** (2 * m)) - form.normalized(p ** (2 * m - 2)) if p ** (2 * m) <= form.n_max else None
                if rhs is not None:
                    assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("k", sorted(mf.SUPPORTED_WEIGHTS))
def test_multiplicativity(k):
    form = mf.eigenform(k, 2000)
    pairs = [(2, 3), (2, 5), (3, 5), (4, 9), (7, 8), (5, 11), (3, 13), (9, 16), (4, 25), (11, 13), (7, 27)]
    for m, n in pairs:
        assert math.gcd(m, n) == 1
        assert form.c(m * n) == form.c(m) * form.c(n)


@pytest.mark.parametrize("k", sorted(mf.SUPPORTED_WEIGHTS))
def test_deligne(k):
    assert mf.eigenform(k, 10_000).deligne_ok()


def test_deligne_detects_violation():
    fake = mf.EigenformQExpansion(12, (0, 1, 10**4, 0))
    assert not fake.deligne_ok()


@pytest.mark.parametrize("kernel", [kn.SmoothKernel.gaussian(), kn.SmoothKernel.fejer()], ids=lambda k: k.name)
def test_identity_check(delta, kernel):
    w = kn.periodic_weight(kernel, 2, 500)
    assert mf.n_phi_f_identity_check(delta, 500, w) < 1e-8 * len(primes_up_to(500))


def test_identity_check_fejer_L1(delta):
    w = kn.periodic_weight(kn.SmoothKernel.fejer(), 1, 500)
    assert mf.n_phi_f_identity_check(delta, 500, w) < 1e-12


def test_trace_residuals():
    r4 = mf.trace_residual(12, 4)
    assert r4.main_term == 0.5 and r4.lhs == -0.71875 and r4.residual == -1.21875
    r2 = mf.trace_residual(12, 2)
    assert r2.main_term == 0.0 and r2.lhs == pytest.approx(-0.5303300858899106)
    assert mf.trace_residual(12, 1).residual == 0.0


def test_zm_main_term():
    fejer = kn.periodic_weight(kn.SmoothKernel.fejer(), 2, 2000)
    assert abs(mf.zm_main_term(fejer, [2], [10007]) - 0.0625) < 4 * 4 / 10007
    assert mf.zm_main_term(fejer, [1], [5]) == pytest.approx(0.05, abs=1e-12)
    assert mf.zm_main_term(fejer, [], []) == 1.0
    gauss = kn.periodic_weight(kn.SmoothKernel.gaussian(), 2, 2000)
    expect = sum(u * 7.0**-m for m, u in enumerate(gauss.u_coeffs, start=1))
    assert mf.zm_main_term(gauss, [1], [7]) == pytest.approx(expect, abs=1e-12)


def test_csv_export():
    text = mf.eigenform(12, 5).to_csv()
    assert text == "n,c_n\n1,1\n2,-24\n3,252\n4,-1472\n5,4830\n"
    big = mf.eigenform(26, 300).to_csv().splitlines()[-1]
    assert "e" not in big and int(big.split(",")[1]) == mf.eigenform(26, 300).c(300)
