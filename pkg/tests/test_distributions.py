import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from mellinmix.distributions import (
    Beta, Exponential, FiniteDiscrete, Gamma, Geometric, MixtureModel, PositivePoisson,
    Sample, UniformUnit, Zeta, cdf, parse_spec, point_mass, sample, sample_mixture, two_point,
)
from mellinmix.errors import DataError, ParameterError, SpecSyntaxError
from mellinmix.special import real_zeta

TWO_POINT = two_point(1.0, 2.0, 1 / 3)
ALL_SPECS = [Beta(2, 2), Gamma(2, 2), Exponential(1.0), UniformUnit(), TWO_POINT,
             Geometric(0.5), PositivePoisson(1.5), Zeta(5.0)]


def test_cdf_examples():
    assert cdf(Beta(2, 2), 0.5) == pytest.approx(0.5, abs=1e-15)
    assert cdf(Gamma(2, 2), 1e3) == pytest.approx(1.0)
    assert cdf(TWO_POINT, 1.0) == pytest.approx(1 / 6, abs=1e-15)
    assert cdf(Exponential(1.0), 0.4) == pytest.approx(1 - math.exp(-0.4), rel=1e-14)
    dens = integrate.quad(lambda t: math.exp(-t), 0, 0.4)[0]
    assert cdf(Exponential(1.0), 0.4) == pytest.approx(dens, rel=1e-12)
    assert cdf(Beta(2, 2), 0.0) == 0.0


def test_cdf_rejects_negative():
    with pytest.raises(ParameterError):
        cdf(Beta(2, 2), -0.1)


def test_discrete_midpoint_convention():
    geom = Geometric(0.5)
    assert cdf(geom, 1.0) == pytest.approx(0.25)
    assert cdf(geom, 1.5) == pytest.approx(0.5)
    z = Zeta(5.0)
    p1 = 1 / real_zeta(5.0)
    assert cdf(z, 1.0) == pytest.approx(p1 / 2, rel=1e-12)
    pp = PositivePoisson(1.5)
    p1 = 1.5 * math.exp(-1.5) / (1 - math.exp(-1.5))
    assert cdf(pp, 1.0) == pytest.approx(p1 / 2, rel=1e-12)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.canonical())
def test_cdf_monotone_and_bounded(spec):
    x = np.linspace(0, 20, 2001)
    F = cdf(spec, x)
    assert np.all(np.diff(F) >= -1e-15)
    assert F.min() >= 0 and F.max() <= 1


@pytest.mark.parametrize("bad", [
    lambda: Beta(0, 1), lambda: Gamma(2, -1), lambda: Exponential(0), lambda: Zeta(1.0),
    lambda: Geometric(1.0), lambda: PositivePoisson(-1),
    lambda: FiniteDiscrete(((2, 0.5), (1, 0.5))), lambda: FiniteDiscrete(((1, 0.5), (2, 0.4))),
    lambda: FiniteDiscrete(((1, 0.0), (2, 1.0))), lambda: FiniteDiscrete(((-1, 1.0),)),
])
def test_parameter_validation(bad):
    with pytest.raises(ParameterError):
        bad()


def test_sum_of_probabilities_tolerance():
    FiniteDiscrete(((1, 0.3333333), (2, 0.6666667)))
    with pytest.raises(ParameterError):
        FiniteDiscrete(((1, 0.333), (2, 0.666)))


def test_sampling_deterministic_and_serialised_identically():
    for spec in ALL_SPECS:
        a, b = sample(spec, 257, 11), sample(spec, 257, 11)
        assert a == b
        assert a.to_text() == b.to_text()
        assert sample(spec, 257, 12) != a


def test_degenerate_sample():
    s = sample(point_mass(1.0), 5, 3)
    assert np.array_equal(s.values, np.ones(5))


def test_beta_mean():
    s = sample(Beta(2, 2), 10 ** 5, 1)
    assert s.values.mean() == pytest.approx(0.5, abs=0.005)


def test_zeta_frequency_of_one():
    s = sample(Zeta(5.0), 10 ** 5, 1)
    p1 = 1 / sum(k ** -5.0 for k in range(1, 10 ** 5))
    assert p1 == pytest.approx(0.9644, abs=1e-4)
    assert np.mean(s.values == 1.0) == pytest.approx(p1, abs=0.003)


def test_integer_laws_frequencies():
    s = sample(PositivePoisson(1.5), 10 ** 5, 2)
    assert s.values.min() >= 1
    pmf = stats.poisson.pmf(np.arange(1, 6), 1.5) / (1 - math.exp(-1.5))
    freq = np.array([np.mean(s.values == k) for k in range(1, 6)])
    np.testing.assert_allclose(freq, pmf, atol=0.005)
    g = sample(Geometric(0.3), 10 ** 5, 2)
    assert g.values.mean() == pytest.approx(1 / 0.3, rel=0.02)


@pytest.mark.parametrize("spec", [Beta(2, 2), Gamma(2, 2), Exponential(1.0), UniformUnit()],
                         ids=lambda s: s.canonical())
def test_ks_goodness_of_fit(spec):
    s = sample(spec, 10 ** 4, 5)
    d = stats.kstest(s.values, spec.cdf).statistic
    assert d < 1.63 / math.sqrt(10 ** 4)


def test_mixture_streams():
    y = sample(Beta(2, 2), 100, 9)
    m = sample_mixture(MixtureModel(Beta(2, 2), point_mass(1.0)), 100, 9)
    assert np.array_equal(y.values, m.values)
    x = sample_mixture(MixtureModel(point_mass(1.0), TWO_POINT), 10 ** 4, 4)
    assert np.mean(x.values == 2.0) == pytest.approx(2 / 3, abs=0.01)
    big = sample_mixture(MixtureModel(Beta(2, 2), TWO_POINT), 10 ** 5, 4)
    assert big.values.mean() == pytest.approx(0.5 * 5 / 3, abs=0.01)


def test_sample_validation_and_roundtrip(tmp_path):
    with pytest.raises(DataError):
        Sample(np.array([1.0, 0.0]), 0)
    with pytest.raises(DataError):
        Sample(np.array([]), 0)
    s = sample_mixture(MixtureModel(Gamma(2, 2), Zeta(5.0)), 50, 77)
    p = tmp_path / "s.txt"
    s.save(p)
    assert Sample.load(p) == s
    assert p.read_text().splitlines()[0] == f"# seed=77 spec={s.spec}"
    with pytest.raises(ValueError):
        s.values[0] = 1.0


spec_strategy = st.one_of(
    st.builds(Beta, st.floats(0.1, 20), st.floats(0.1, 20)),
    st.builds(Gamma, st.floats(0.1, 20), st.floats(0.1, 20)),
    st.builds(Exponential, st.floats(0.01, 50)),
    st.just(UniformUnit()),
    st.builds(Zeta, st.floats(1.01, 20)),
    st.builds(Geometric, st.floats(0.01, 0.99)),
    st.builds(PositivePoisson, st.floats(0.01, 30)),
    st.builds(lambda a, b, p: two_point(min(a, b), max(a, b) + 0.5, p),
              st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.01, 0.99)),
)


@given(spec_strategy)
def test_canonical_roundtrip(spec):
    again = parse_spec(spec.canonical())
    assert again == spec
    assert again.canonical() == spec.canonical()


def test_parse_fractions_and_syntax_errors():
    assert parse_spec("discrete:1@1/3,2@2/3").probs[0] == pytest.approx(1 / 3, rel=1e-15)
    for bad in ["foo", "beta:1", "discrete:1", "beta:a,b"]:
        with pytest.raises(SpecSyntaxError):
            parse_spec(bad)
    with pytest.raises(ParameterError):
        parse_spec("beta:-1,2")
