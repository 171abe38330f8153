import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ptpmdl.quantizer import (EXACT_LEVEL_CONSTANT, QuantizerSpec, bin_edges, default_tau,
                              num_levels, quantize, quantize_array, representation_level,
                              scheme_levels)


def oracle_levels(n):
    # ceil(1.772 * sqrt(n)) in 60-digit arithmetic
    with mpmath.workdps(60):
        return int(mpmath.ceil(mpmath.mpf("1.772") * mpmath.sqrt(n)))


def arcsine_mass(a, b):
    """Arcsine-law mass of [a, b] by adaptive quadrature with algebraic end weights."""
    f = lambda t: 1.0 / (math.pi * math.sqrt(t * (1.0 - t)))
    if a == 0.0 and b == 1.0:
        return integrate.quad(lambda t: 1.0 / math.pi, 0, 1, weight="alg", wvar=(-0.5, -0.5))[0]
    if a == 0.0:
        return integrate.quad(lambda t: 1.0 / (math.pi * math.sqrt(1 - t)), 0, b,
                              weight="alg", wvar=(-0.5, 0), epsabs=1e-14)[0]
    if b == 1.0:
        return integrate.quad(lambda t: 1.0 / (math.pi * math.sqrt(t)), a, 1,
                              weight="alg", wvar=(0, -0.5), epsabs=1e-14)[0]
    return integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12)[0]


@pytest.mark.parametrize("n,K", [(1, 2), (4, 4), (10**4, 178), (1024, 57), (10**6, 1772)])
def test_num_levels_examples(n, K):
    assert num_levels(n) == K


@given(st.integers(1, 10**15))
def test_num_levels_matches_high_precision(n):
    assert num_levels(n) == oracle_levels(n)


def test_exact_constant_disagrees_at_one_million():
    # the unrounded constant lands one level higher; num_levels keeps 1.772
    assert math.ceil(EXACT_LEVEL_CONSTANT * 1000) == 1773
    assert abs(EXACT_LEVEL_CONSTANT - 1.772) < 1e-3


@pytest.mark.parametrize("K", [2, 7, 57, 1772])
def test_bins_have_equal_arcsine_mass(K):
    e = bin_edges(K)
    assert e[0] == 0.0 and e[-1] == 1.0
    masses = np.array([arcsine_mass(e[k], e[k + 1]) for k in range(K)])
    assert np.max(np.abs(masses - 1.0 / K)) < 1e-9


@pytest.mark.parametrize("K", [1, 2, 3, 57, 1772])
def test_idempotent_on_levels(K):
    r = representation_level(np.arange(K), K)
    k2, r2 = quantize_array(r, K)
    assert np.array_equal(k2, np.arange(K))
    assert np.array_equal(r2, r)


def test_representation_examples():
    assert quantize(0.3, 2) == (0, pytest.approx(0.1464466, abs=1e-7))
    assert quantize(0.9, 2) == (1, pytest.approx(0.8535534, abs=1e-7))
    assert quantize(0.0, 5)[0] == 0 and quantize(1.0, 5)[0] == 4


@given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 3000))
def test_monotone(a, b, K):
    lo, hi = sorted((a, b))
    assert quantize(lo, K)[0] <= quantize(hi, K)[0]


@given(st.floats(0, 1), st.integers(1, 3000))
def test_level_lies_in_its_bin(theta, K):
    k, r = quantize(theta, K)
    e = bin_edges(K)
    assert e[k] <= theta <= e[k + 1] + 1e-15
    assert e[k] < r < e[k + 1]


def test_scheme_levels():
    N = 10**6
    assert scheme_levels(0, N, 4, 10, 1000) == 1772
    assert scheme_levels(1, N, 4, 10, 1000) == num_levels(250000) == 886
    assert scheme_levels(2, N, 4, 10, 1000) == num_levels(1000) == 57
    assert scheme_levels(2, N, 4, 1000, 1000) == 1772
    q = QuantizerSpec(2, N, default_tau(N))
    assert q.tau == 1000 and q.levels(4, 999) == 57
    with pytest.raises(ValueError):
        QuantizerSpec(3, N)


def test_default_tau():
    assert [default_tau(n) for n in (1, 2, 4, 5, 10**6, 10**6 + 1)] == [1, 2, 2, 3, 1000, 1001]


def test_quantization_redundancy_is_bounded():
    # average excess code length from quantizing a Bernoulli ML estimate stays
    # within the asymptotic per-state constant plus a small margin
    rng = np.random.default_rng(7)
    n = 10**5
    K = num_levels(n)
    excess = []
    for theta in rng.uniform(0.02, 0.98, 300):
        n1 = rng.binomial(n, theta)
        n0 = n - n1
        t = n1 / n
        _, r = quantize(t, K)
        ml = -(n1 * math.log2(t) + n0 * math.log2(1 - t))
        q = -(n1 * math.log2(r) + n0 * math.log2(1 - r))
        excess.append(q - ml)
    assert 0 <= np.mean(excess) <= 0.5
