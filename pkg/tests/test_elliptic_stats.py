import json
import math
from fractions import Fraction

import numpy as np
import pytest

from satotate_lab import curves as cv
from satotate_lab import elliptic_stats as es
from satotate_lab import kernels as kn
from satotate_lab.acceptance import CLT_BANDS, in_band, s_average_bruteforce

G = kn.SmoothKernel.gaussian()
F = kn.SmoothKernel.fejer()

# first verified run of the desk-scale smoke test; the run is deterministic
GOLDEN_MOMENTS = {
    1: -0.03712513822891819,
    2: 1.0114927283447874,
    3: 0.024778487673555873,
    4: 2.8753580947098762,
}


def test_gaussian_moment():
    assert [es.gaussian_moment(r) for r in range(7)] == [1, 0, 1, 0, 3, 0, 15]


def test_n_phi_single_prime_window():
    cache = cv.sweep(1, 1, cv.prime_window(10))
    w = kn.periodic_weight(G, 2, 10)
    rec = cache.records(cv.Curve(1, 1))[0]
    assert (rec.p, rec.ap) == (7, 3)
    expect = kn.periodic_weight_eval(G, 2, cv.theta(rec))
    assert es.n_phi_direct(cv.Curve(1, 1), cache, w) == pytest.approx(expect, abs=1e-15)
    assert es.n_phi_direct(cv.Curve(1, 1), cache, w) == pytest.approx(0.30573248459153723, abs=1e-14)


def test_n_phi_no_good_primes():
    # Delta(5, 5) = -16 * 1175 = -16 * 5^2 * 47, so 47 is bad
    c = cv.Curve(5, 5)
    assert c.delta % 47 == 0
    cache = cv.sweep(5, 5, cv.prime_window(47))
    cache = cv.ApCache(5, 5, 47.0, "dyadic", cache.curves, cache.primes[-1:], cache.ap[:, -1:])
    w = kn.periodic_weight(G, 2, 47)
    assert es.n_phi_direct(c, cache, w) == 0.0
    assert es.n_phi_fourier(c, cache, w) == 0.0


def test_fejer_L1_counts_good_primes(cache_small):
    w = kn.periodic_weight(F, 1, 200)
    good = cache_small.good_mask()
    for i, c in enumerate(cache_small.curves):
        assert es.n_phi_direct(c, cache_small, w) == pytest.approx(good[i].sum(), abs=1e-12)


@pytest.mark.parametrize("kernel", [G, F], ids=lambda k: k.name)
@pytest.mark.parametrize("L", [2, 4])
def test_fourier_identity(cache_25, kernel, L):
    w = kn.periodic_weight(kernel, L, 2000)
    rng = np.random.default_rng(7)
    for i in rng.choice(len(cache_25.curves), 100, replace=False):
        c = cache_25.curves[i]
        defect = abs(es.n_phi_direct(c, cache_25, w) - es.n_phi_fourier(c, cache_25, w))
        assert defect <= 135 * (1e-12 + kn.TAIL_TOLERANCE) * 100


def test_clt_golden(cache_25):
    rep = es.family_moments(cache_25, kn.periodic_weight(G, 2, 2000), r_max=4)
    assert rep.family_count == 2496 and rep.window_count == 135
    emp = {r: v[0] for r, v in rep.moments.items()}
    assert emp == GOLDEN_MOMENTS
    for r, band in CLT_BANDS.items():
        assert in_band(emp[r], band)
    assert [rep.moments[r][1] for r in (1, 2, 3, 4)] == [0, 1, 0, 3]


def test_cauchy_schwarz(cache_small):
    for kernel in (G, F):
        rep = es.family_moments(cache_small, kn.periodic_weight(kernel, 2, 200), r_max=2)
        assert rep.moments[1][0] ** 2 <= rep.moments[2][0]


def test_scale_covariance(cache_small):
    base = es.family_moments(cache_small, kn.periodic_weight(G, 2, 200), r_max=4)
    scaled = es.family_moments(cache_small, kn.periodic_weight(G.scaled(2.5), 2, 200), r_max=4)
    for r in range(1, 5):
        assert scaled.moments[r][0] == pytest.approx(base.moments[r][0], abs=1e-10)


def test_thread_determinism(cache_25):
    w = kn.periodic_weight(G, 2, 2000)
    one = es.family_moments(cache_25, w, threads=1, keep_errors=True)
    four = es.family_moments(cache_25, w, threads=4, keep_errors=True)
    assert json.dumps(one.to_json(True)) == json.dumps(four.to_json(True))


def test_singleton_family():
    cache = cv.sweep(1, 1, cv.prime_window(200))
    single = cv.ApCache(1, 1, 200.0, "dyadic", cache.curves[:1], cache.primes, cache.ap[:1])
    w = kn.periodic_weight(G, 2, 200)
    rep = es.family_moments(single, w, r_max=1, keep_errors=True)
    n = len(cache.primes)
    expect = (es.n_phi_direct(single.curves[0], single, w) - n * w.mean) / math.sqrt(n * w.variance)
    assert rep.moments[1][0] == pytest.approx(expect, abs=1e-13)
    assert rep.config == {"kernel": "gaussian", "L": 2, "x": "200", "A": 1, "B": 1, "M": w.M}


def test_histogram_layout(cache_25):
    rep = es.family_moments(cache_25, kn.periodic_weight(G, 2, 2000), keep_errors=True)
    hist = rep.to_json(histogram=True)["histogram"]
    assert len(hist["binEdges"]) == 62 and len(hist["counts"]) == 63
    assert sum(hist["counts"]) == rep.family_count
    assert hist["binEdges"][0] == -4.0 and hist["binEdges"][-1] == 4.0


def test_degenerate_variance(cache_small):
    with pytest.raises(es.DegenerateVarianceError):
        es.family_moments(cache_small, kn.periodic_weight(F, 1, 200))


def test_r_max_guard(cache_small):
    with pytest.raises(ValueError):
        es.family_moments(cache_small, kn.periodic_weight(G, 2, 200), r_max=9)


def test_s_average():
    for p in (5, 7, 11):
        assert es.s_average(p, 0) == 1
    assert es.s_average_exact(5, 2) == Fraction(-4, 125) == s_average_bruteforce(5, 2)
    assert es.s_average(5, 2) == -0.032
    # brute force over residue pairs for alpha = 1: X_1(a_p / sqrt p) summed
    oracle = sum(
        cv.ap(cv.Curve(a, b), 7).ap
        for a in range(1, 8)
        for b in range(1, 8)
        if (a * b * (4 * a**3 + 27 * b * b)) % 7
    )
    assert es.s_average(7, 1) == oracle / (49 * math.sqrt(7)) == 0.0
    for alpha in (2, 4):
        assert es.s_average_exact(7, alpha) == s_average_bruteforce(7, alpha)
    with pytest.raises(ValueError):
        es.s_average_exact(5, 3)
