import math
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from mellinmix.distributions import (
    Beta, Exponential, Gamma, MixtureModel, Sample, UniformUnit, point_mass, sample_mixture, two_point,
)
from mellinmix.errors import (
    ConfigurationError, DataError, DomainError, FeasibilityError, StripError,
)
from mellinmix.estimator import (
    EstimatorConfig, estimate_cdf, pointwise_risk, population_estimate_cdf, smoothing_density,
    smoothing_mellin, triangular_kernel, truncation_for,
)

TWO_POINT = two_point(1.0, 2.0, 1 / 3)
BETA_TP = MixtureModel(Beta(2, 2), TWO_POINT)
GRID = np.linspace(0.02, 0.98, 49)


def test_triangular_kernel_examples():
    assert triangular_kernel(0.0, 10.0) == 1.0
    assert triangular_kernel(5.0, 10.0) == 0.5
    assert triangular_kernel(-5.0, 10.0) == 0.5
    assert triangular_kernel(10.0, 10.0) == 0.0
    assert triangular_kernel(20.0, 10.0) == 0.0
    with pytest.raises(DomainError):
        triangular_kernel(1.0, 0.0)


def test_smoothing_density_at_one_is_limit():
    T, u = 40.0, 0.3
    assert smoothing_density(1.0, T, u) == pytest.approx(T / (2 * math.pi))
    assert smoothing_density(1.0 + 1e-7, T, u) == pytest.approx(T / (2 * math.pi), rel=1e-5)


def test_smoothing_mellin_is_kernel():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    pts = 0
    for T in (10.0, 50.0, 200.0):
        for u in (-0.5, 0.2, 0.9):
            for v in np.concatenate([[0.0, T, 1.5 * T], rng.uniform(-T, T, 1)]):
                assert smoothing_mellin(u, v, T) == pytest.approx(triangular_kernel(v, T), abs=1e-6)
                pts += 1
    assert pts >= 30
    assert time.perf_counter() - start < 10


def test_unhalved_density_has_twice_the_bandwidth():
    # sin^2(T log x) / (pi T x^u log^2 x) has transform (1 - |v|/(2T))_+, i.e. the
    # kernel at 2T, not at T.  In r = T log x its transform at v = T is
    # (1/pi) int sin^2(r) cos(r) / r^2 dr.
    f = lambda r: math.sin(r) ** 2 * math.cos(r) / r ** 2 / math.pi
    total = 2 * sum(integrate.quad(f, k * math.pi, (k + 1) * math.pi)[0] for k in range(4000))
    assert total == pytest.approx(0.5, abs=1e-3)
    assert smoothing_mellin(0.5, 30.0, 60.0) == pytest.approx(0.5, abs=1e-6)
    assert triangular_kernel(30.0, 30.0) == 0.0


def smoothed_cdf_oracle(cdf, x, T, u, periods=4000, order=24):
    """F * W at x as an r-integral: int F(x e^{-2r/T}) e^{2r(1-u)/T} sin^2 r / (pi r^2) dr."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    k = np.arange(-periods, periods)
    r = ((k[:, None] + 0.5) + 0.5 * nodes[None, :]) * math.pi
    w = 0.5 * math.pi * weights[None, :]
    integrand = cdf(x * np.exp(-2 * r / T)) * np.exp(2 * r * (1 - u) / T) * np.sin(r) ** 2 / (math.pi * r ** 2)
    return float(np.sum(w * integrand))


def test_population_estimate_is_smoothed_cdf():
    e = Exponential(1.0)
    xs = np.array([0.5, 1.0, 2.0])
    got = population_estimate_cdf(e, EstimatorConfig(0.5, 200.0), xs).values
    ref = [smoothed_cdf_oracle(e.cdf, x, 200.0, 0.5) for x in xs]
    np.testing.assert_allclose(got, ref, atol=1e-4)
    np.testing.assert_allclose(got, e.cdf(xs), atol=5e-3)


def test_degenerate_laws_recover_point_mass():
    pm = point_mass(1.0)
    cfg = EstimatorConfig(0.5, 500.0)
    assert population_estimate_cdf(MixtureModel(pm, pm), cfg, [10.0]).values[0] == pytest.approx(1, abs=0.01)
    assert estimate_cdf(np.ones(25), pm, cfg, [10.0]).values[0] == pytest.approx(1, abs=0.01)


def test_exact_mixture_transform_recovers_median():
    got = population_estimate_cdf(BETA_TP, EstimatorConfig(0.5, 1000.0), [0.5]).values[0]
    assert got == pytest.approx(0.5, abs=0.005)


def test_bias_halves_when_T_doubles():
    b = Beta(2, 2)
    errs = [np.abs(population_estimate_cdf(b, EstimatorConfig(0.5, T), GRID).values - b.cdf(GRID)).max()
            for T in (100.0, 200.0, 400.0)]
    for a, c in zip(errs, errs[1:]):
        assert 0.4 <= c / a <= 0.6
    e = Exponential(1.0)
    x = np.linspace(0.05, 5.0, 100)
    sup = [np.abs(population_estimate_cdf(e, EstimatorConfig(0.5, T), x).values - e.cdf(x)).max()
           for T in (100.0, 200.0)]
    assert 0.4 <= sup[1] / sup[0] <= 0.6


def test_far_right_tail_is_one():
    assert population_estimate_cdf(Beta(2, 2), EstimatorConfig(0.5, 500.0), [50.0]).values[0] == \
        pytest.approx(1.0, abs=1e-3)


@given(st.integers(0, 10 ** 6), st.sampled_from([100.0, 250.0, 500.0]))
def test_imaginary_part_negligible(seed, T):
    s = sample_mixture(BETA_TP, 200, seed)
    est = estimate_cdf(s, TWO_POINT, EstimatorConfig(0.5, T), GRID)
    assert np.all(np.abs(est.imag) <= 1e-8 * (1 + np.abs(est.values)))


def test_panel_doubling_is_stable():
    s = sample_mixture(BETA_TP, 500, 1)
    a = estimate_cdf(s, TWO_POINT, EstimatorConfig(0.5, 500.0), GRID)
    b = estimate_cdf(s, TWO_POINT, EstimatorConfig(0.5, 500.0, panels=2 * a.panels_used), GRID)
    assert b.panels_used == 2 * a.panels_used
    assert np.abs(a.values - b.values).max() <= 1e-6


def test_clipping_and_determinism():
    s = sample_mixture(BETA_TP, 300, 4)
    raw = estimate_cdf(s, TWO_POINT, EstimatorConfig(0.5, 300.0), GRID)
    clipped = estimate_cdf(s, TWO_POINT, EstimatorConfig(0.5, 300.0, clip_to_unit=True), GRID)
    np.testing.assert_array_equal(clipped.values, np.clip(raw.values, 0, 1))
    again = estimate_cdf(sample_mixture(BETA_TP, 300, 4), TWO_POINT, EstimatorConfig(0.5, 300.0), GRID)
    np.testing.assert_array_equal(raw.values, again.values)


def test_errors():
    s = sample_mixture(BETA_TP, 50, 0)
    with pytest.raises(FeasibilityError):
        estimate_cdf(s, TWO_POINT, EstimatorConfig(0.0, 100.0), GRID)
    with pytest.raises(ConfigurationError):
        EstimatorConfig(1.0, 100.0)
    with pytest.raises(ConfigurationError):
        EstimatorConfig(0.5, -1.0)
    with pytest.raises(ConfigurationError):
        EstimatorConfig(0.5, 10.0, panels=10)
    with pytest.raises(ConfigurationError):
        EstimatorConfig(0.5, 10.0, take_real_part=False)
    with pytest.raises(DataError):
        estimate_cdf(np.array([1.0, 0.0]), TWO_POINT, EstimatorConfig(), GRID)
    with pytest.raises(DataError):
        estimate_cdf(np.array([]), TWO_POINT, EstimatorConfig(), GRID)
    for grid in ([0.5, -1.0], [0.5, 0.4], [1e-9], []):
        with pytest.raises(DomainError):
            estimate_cdf(s, TWO_POINT, EstimatorConfig(), grid)
    with pytest.raises(StripError):
        population_estimate_cdf(Gamma(2, 2), EstimatorConfig(-1.5, 100.0), GRID)
    with pytest.raises(StripError):
        estimate_cdf(s, UniformUnit(), EstimatorConfig(-0.5, 100.0), GRID)


def test_csv_format():
    s = sample_mixture(BETA_TP, 50, 7)
    text = estimate_cdf(s, TWO_POINT, EstimatorConfig(0.5, 100.0), [0.25, 0.5]).to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("# method=mellin u_star=0.5 T=100.0")
    assert "seed=7" in lines[0] and "n=50" in lines[0]
    assert lines[1] == "x,fhat"
    assert len(lines) == 4 and lines[2].startswith("0.25,")


def test_pointwise_risk_examples():
    assert pointwise_risk(0.4, 0.5, 0.5, 4.0) == pytest.approx(0.05)
    assert pointwise_risk(0.5, 0.5, 0.3, 2.0) == 0.0
    np.testing.assert_allclose(pointwise_risk([0.1, 0.2], [0.2, 0.2], 0.0, [1.0, 2.0]), [0.1, 0.0])
    with pytest.raises(DomainError):
        pointwise_risk(0.1, 0.2, 0.5, 0.0)


def test_truncation_rule():
    assert truncation_for(100) == pytest.approx(10.0)
    assert truncation_for(400, scale=2.0) == pytest.approx(40.0)
    assert truncation_for(50, "linear") == 50.0
    with pytest.raises(ConfigurationError):
        truncation_for(50, "cubic")
