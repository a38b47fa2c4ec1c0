import math

import numpy as np
import pytest

from gfnbp import analytic as an
from gfnbp import simulate as sim
from gfnbp import stats as st
from gfnbp.analytic import GfnbpParams, PmfTable
from gfnbp.errors import DegenerateCorrelation, DomainError, GridMiss


def make_ensemble(values, grid, kind="counting"):
    values = np.asarray(values)
    return sim.Ensemble(grid=np.asarray(grid, dtype=float), values=values, kind=kind,
                        params=None, generator_id="synthetic", master_seed=0)


def poisson_ensemble(n=100_000, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.poisson(1.0, n)
    return make_ensemble(np.c_[np.zeros(n, dtype=np.int64), x], [0.0, 1.0])


# -- pmf and TV ------------------------------------------------------------------

def test_empirical_pmf_constant_zero():
    e = make_ensemble(np.zeros((50, 3), dtype=np.int64), [0.0, 1.0, 2.0])
    tab = st.empirical_pmf(e, 1.0)
    assert list(tab.probs) == [1.0] and tab.tail_bound == 0.0
    assert st.tv_distance(tab, tab) == 0.0
    with pytest.raises(GridMiss):
        st.empirical_pmf(e, 1.5)


def test_empirical_pmf_tail_fraction():
    e = make_ensemble(np.array([[0, 0], [0, 1], [0, 5], [0, 9]]), [0.0, 1.0])
    tab = st.empirical_pmf(e, 1.0, n_max=2)
    assert list(tab.probs) == [0.25, 0.25, 0.0]
    assert tab.tail_bound == 0.5


def test_poisson_ensemble_tv():
    tab = st.empirical_pmf(poisson_ensemble(), 1.0)
    n = np.arange(tab.n_max + 1)
    ref = PmfTable(1.0, np.exp(-1.0) / np.array([math.factorial(int(k)) for k in n]), 0.0)
    assert st.tv_distance(tab, ref) < 0.01


# -- moments and transforms ---------------------------------------------------------

def test_constant_ensemble_moment():
    e = make_ensemble(np.tile([0.0, 2.5], (20, 1)), [0.0, 1.0], "subordinator")
    assert st.empirical_moment(e, 1.0, 1.0) == (2.5, 0.0)
    assert st.empirical_laplace(e, 1.0, 0.0) == (1.0, 0.0)
    with pytest.raises(DomainError):
        st.empirical_moment(e, 1.0, 0.0)


def test_ml_levy_moment_z_score():
    p = GfnbpParams(0.7, 1)
    e = sim.run_ensemble(sim.process_spec("ml_levy", p), 100_000, [0.0, 1.0], 31)
    m, se = st.empirical_moment(e, 1.0, 0.3)
    assert abs(m - an.ml_levy_moment(0.3, 1.0, p)) / se < 3


# -- covariance and dispersion ------------------------------------------------------

def test_cov_diagonal_is_variance():
    e = poisson_ensemble(1000)
    assert st.empirical_cov(e, 1.0, 1.0)[0] == pytest.approx(np.var(e.at(1.0), ddof=1))
    with pytest.raises(DomainError):
        st.empirical_cov(e, 1.0, 0.0)


def test_cov_independent_columns():
    rng = np.random.default_rng(3)
    v = np.c_[np.zeros(20000), rng.normal(size=(20000, 2))]
    e = make_ensemble(v, [0.0, 1.0, 2.0], "subordinator")
    c, se = st.empirical_cov(e, 1.0, 2.0)
    assert abs(c) < 3 * se


def test_overdispersion_gfnbp():
    e = sim.run_ensemble(sim.process_spec("gfnbp", GfnbpParams(0.9, 0.4)), 100_000,
                         [0.0, 1.0, 5.0], 17)
    for t in (1.0, 5.0):
        d, se = st.dispersion_index(e, t)
        assert d / se > 2.33


def test_poisson_dispersion_calibrated():
    d, se = st.dispersion_index(poisson_ensemble(seed=4), 1.0)
    assert abs(d) < 3 * se


def test_covariance_asymptote_monte_carlo():
    # the decisive check between the two published forms of the covariance limit
    p = GfnbpParams(0.9, 0.3)
    e = sim.run_ensemble(sim.process_spec("gfnbp", p), 100_000, [0.0, 1.0, 100.0], 2)
    c, se = st.empirical_cov(e, 1.0, 100.0)
    assert abs(c - an.gfnbp_cov_asymptotic(1.0, 100.0, p)) < 3 * se
    assert abs(c - an.gfnbp_cov_asymptotic(1.0, 100.0, p, "as_stated")) > 10 * se


# -- LRD ---------------------------------------------------------------------------

def test_planted_power_law():
    t = np.array([5.0, 10.0, 20.0, 40.0, 80.0])
    fit = st.fit_power_law(t, t**-0.5, 1.0)
    assert abs(fit.slope + 0.5) < 1e-10
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.slope_stderr < 1e-10


def test_lrd_point_checks():
    with pytest.raises(DomainError):
        st.fit_power_law([5, 10, 20], [1, 1, 1], 1.0)
    with pytest.raises(DomainError):
        st.fit_power_law([5, 10, 20, 40], np.ones(4), 1.0)
    with pytest.raises(DomainError):
        st.fit_power_law([1, 10, 20, 80], np.ones(4), 1.0)
    with pytest.raises(DegenerateCorrelation):
        st.fit_power_law([5, 10, 20, 40, 80], [0.5, 0.4, -0.1, 0.3, 0.0], 1.0)
    fit = st.fit_power_law([5, 10, 20, 40, 80], [0.5, 0.4, -0.1, 0.3, 0.25], 1.0)
    assert fit.t_points == (5.0, 10.0, 40.0, 80.0)


def test_lrd_slope_short_memory_pair():
    # (beta, alpha) = (0.3, 0.9): finite variance, slope -beta/alpha
    e = sim.run_ensemble(sim.process_spec("gfnbp", GfnbpParams(0.9, 0.3)), 10_000,
                         [0.0, 1.0, 5.0, 10.0, 20.0, 40.0, 80.0], 2024)
    fit = st.lrd_fit(e, 1.0, (5, 10, 20, 40, 80))
    assert abs(fit.slope - an.lrd_exponent(GfnbpParams(0.9, 0.3))) < 0.1


# -- KS ----------------------------------------------------------------------------

def test_ks_extremes():
    a = np.arange(10.0)
    assert st.ks_two_sample(a, a) == 0.0
    assert st.ks_two_sample(a, a + 100) == 1.0
    with pytest.raises(DomainError):
        st.ks_two_sample([], a)


def test_ks_same_stable_law():
    rng = sim.make_rng(8)
    a = sim.stable_unit(rng, 0.6, 100_000)
    b = sim.stable_unit(rng, 0.6, 100_000)
    assert st.ks_two_sample(a, b) < 0.01


# -- verification battery -----------------------------------------------------------

def test_verify_zero_budget():
    assert st.verify_suite(GfnbpParams(0.9, 0.5), st.Budget(n_paths=0)) == []


def test_verify_reduction_battery():
    reports = st.verify_suite(GfnbpParams(1, 1), st.Budget(n_paths=20_000, lrd_paths=0))
    assert reports
    assert all(r.passed for r in reports), [r.as_dict() for r in reports if not r.passed]
    ids = {r.check_id for r in reports}
    assert any("nb" in i for i in ids)


def test_verify_schema():
    reports = st.verify_suite(GfnbpParams(0.9, 0.5), st.Budget(n_paths=5000, lrd_paths=0))
    for r in reports:
        d = r.as_dict()
        for key in ("check_id", "analytic", "empirical", "mc_stderr", "tolerance", "pass"):
            assert key in d
        assert d["pass"] == (abs(d["analytic"] - d["empirical"]) <= d["tolerance"])
        assert d["mc_stderr"] >= 0 and d["tolerance"] > 0
