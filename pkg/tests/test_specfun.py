import math

import numpy as np
import pytest
from scipy import special

from gfnbp import specfun as sf
from gfnbp.errors import DivergentSeries, DomainError, NonConvergent, NumeratorPole, Overflow


def test_series_control_validation():
    with pytest.raises(DomainError):
        sf.SeriesControl(max_terms=0)
    with pytest.raises(DomainError):
        sf.SeriesControl(abs_tol=0.0)


def test_ml3_reduces_to_exp():
    assert sf.ml3(1, 1, 1, 1.0) == pytest.approx(math.e, rel=1e-14)
    for z in np.linspace(-5, 5, 21):
        assert sf.ml3(1, 1, 1, z) == pytest.approx(math.exp(z), abs=1e-8)


def test_ml3_zero_argument():
    assert sf.ml3(1, 0.5, 1, 0.0) == 1.0


def test_ml3_half_order_erfc():
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    assert sf.ml3(1, 0.5, 1, -1.0) == pytest.approx(math.e * math.erfc(1.0), abs=1e-12)


def test_ml3_three_parameter_closed_form():
    # E^2_{1,1}(z) = (1 + z) e^z
    for z in (-2.0, 0.5, 3.0):
        assert sf.ml3(2, 1, 1, z) == pytest.approx((1 + z) * math.exp(z), rel=1e-12, abs=1e-13)


def test_ml3_errors():
    with pytest.raises(NonConvergent):
        sf.ml3(1, 0.5, 1, -40.0, sf.SeriesControl(max_terms=20))
    with pytest.raises(Overflow):
        sf.ml3(1, 0.2, 1, -80.0)
    with pytest.raises(DomainError):
        sf.ml3(0, 1, 1, 1.0)


def test_ml3_truncation_certificate():
    for z in (-0.5, -2.0, -4.0):
        tau = 1e-9
        a = sf.ml3(1.5, 0.7, 1.2, z, sf.SeriesControl(abs_tol=tau))
        b = sf.ml3(1.5, 0.7, 1.2, z, sf.SeriesControl(abs_tol=tau / 10))
        assert abs(a - b) < tau


def test_mittag_leffler_falls_back_to_contour():
    # series loses everything at z = -30; exp(x^2) erfc(x) is erfcx
    assert sf.mittag_leffler(1, 0.5, 1, -30.0) == pytest.approx(special.erfcx(30.0), rel=1e-10)


def test_ml3_contour_matches_series():
    for x in (0.3, 1.0, 2.5):
        assert sf.ml3_contour(1.3, 0.6, 0.9, x) == pytest.approx(sf.ml3(1.3, 0.6, 0.9, -x), abs=1e-10)


def test_gen_wright_examples():
    assert sf.gen_wright([(1, 1)], [(1, 1)], 1.0) == pytest.approx(math.e, rel=1e-14)
    assert sf.gen_wright([(1, 1)], [(1, 0.5)], 0.0) == 1.0
    # sum_k z^k (k+1) / k! = (1 + z) e^z
    assert sf.gen_wright([(2, 1)], [(1, 1)], 0.5) == pytest.approx(1.5 * math.exp(0.5), rel=1e-14)


def test_gen_wright_matches_ml3():
    for beta in (0.3, 0.7, 1.0):
        for z in (-1.5, 0.4):
            assert sf.gen_wright([(1, 1)], [(1, beta)], z) == pytest.approx(sf.ml3(1, beta, 1, z), abs=1e-10)


def test_gen_wright_refuses_divergent_and_poles():
    with pytest.raises(DivergentSeries):
        sf.gen_wright([(1, 2)], [(1, 0.5)], 1.0)
    with pytest.raises(NumeratorPole):
        sf.gen_wright([(1, -0.5), (1, 1)], [(1, 1)], 0.3)


def test_gen_wright_denominator_poles_vanish():
    # 1/G(1 - k) kills every k >= 1 term
    assert sf.gen_wright([(1, 1)], [(1, -1), (1, 2)], 0.7) == pytest.approx(1.0)


def test_m_wright_gaussian_form():
    assert sf.m_wright(0.5, 0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    for z in (1.0, 2.0, 1.3):
        assert sf.m_wright(0.5, z) == pytest.approx(math.exp(-z * z / 4) / math.sqrt(math.pi), rel=1e-11)
    with pytest.raises(DomainError):
        sf.m_wright(1.0, 1.0)


def test_beta_and_incomplete_beta():
    assert sf.beta_fn(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert sf.inc_beta(1, 1, 0.3) == pytest.approx(0.3, rel=1e-14)
    # mpmath quadrature oracle (tests/oracles)
    assert sf.inc_beta(0.5, 1.5, 0.5) == pytest.approx(1.2853981633974483, rel=1e-13)
    for r in (0.3, 0.7, 1.5, 3):
        for s in (0.3, 0.7, 1.5, 3):
            assert sf.inc_beta(r, s, 1.0) == pytest.approx(sf.beta_fn(r, s), rel=1e-10)
    with pytest.raises(DomainError):
        sf.inc_beta(1, 1, 1.5)


def test_gamma_family():
    euler = 0.5772156649015329
    assert sf.digamma(1) == pytest.approx(-euler, rel=1e-14)
    assert sf.digamma(2) == pytest.approx(1 - euler, rel=1e-14)
    assert sf.log_gamma(1) == 0.0
    for x in (1e-3, 0.7, 12.5, 1e6):
        assert sf.digamma(x + 1) - sf.digamma(x) == pytest.approx(1 / x, rel=1e-10)
    with pytest.raises(DomainError):
        sf.digamma(0.0)
    with pytest.raises(DomainError):
        sf.log_gamma(-1.0)
