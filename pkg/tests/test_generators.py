import math

import numpy as np
import pytest
from scipy import stats

from deltatest import (CategoricalModel, DeltaTestError, DirichletRegularization,
                       GeneratorSpec, dirichlet_marginal_moments, sample_categorical_loglik,
                       sample_dirichlet_loglik, standard_generator)
from deltatest.generators import sample_dirichlet, sample_sums


class TestCategorical:
    def test_model_validation(self):
        with pytest.raises(DeltaTestError):
            CategoricalModel([0.5, 0.6])
        with pytest.raises(DeltaTestError):
            CategoricalModel([1.0, 0.0])
        with pytest.raises(DeltaTestError):
            CategoricalModel([0.5, 0.5], symbols=["A"])

    def test_degenerate(self):
        assert np.all(sample_categorical_loglik(CategoricalModel([1.0]), 50, 0) == 0.0)

    def test_equal_probabilities(self):
        x = sample_categorical_loglik(CategoricalModel([0.5, 0.5]), 100, 0)
        assert np.all(x == math.log(0.5))

    def test_frequencies(self):
        count = 10 ** 5
        x = sample_categorical_loglik(CategoricalModel([0.9, 0.1]), count, 1)
        assert set(np.unique(x)) <= {math.log(0.9), math.log(0.1)}
        freq = np.mean(x == math.log(0.9))
        assert abs(freq - 0.9) <= 3 * math.sqrt(0.09 / count)


class TestDirichlet:
    def test_marginal_moments(self):
        assert dirichlet_marginal_moments(0.5, 3.0) == (0.5, 0.0625)
        assert dirichlet_marginal_moments(0.3, 1e12)[1] < 1e-12
        assert dirichlet_marginal_moments(1e-9, 1.0)[1] < 1e-9
        with pytest.raises(DeltaTestError):
            dirichlet_marginal_moments(1.0, 1.0)

    def test_concentration_validation(self):
        with pytest.raises(DeltaTestError):
            DirichletRegularization(0.0)

    def test_coordinates_match_moments(self):
        count = 10 ** 5
        v = sample_dirichlet(CategoricalModel([0.5, 0.5]), DirichletRegularization(3.0), count, 2)[:, 0]
        mean, var = dirichlet_marginal_moments(0.5, 3.0)
        se_mean = math.sqrt(var / count)
        m4 = np.mean((v - v.mean()) ** 4)
        se_var = math.sqrt((m4 - v.var() ** 2) / count)
        assert abs(v.mean() - mean) <= 3 * se_mean
        assert abs(v.var(ddof=1) - var) <= 3 * se_var

    def test_loglik_negative_and_continuous(self):
        x = sample_dirichlet_loglik(CategoricalModel([0.25] * 4), DirichletRegularization(2.0),
                                    10 ** 4, 3)
        assert np.all(x < 0)
        assert np.unique(x).size == x.size

    def test_large_concentration_collapses(self):
        x = sample_dirichlet_loglik(CategoricalModel([0.5, 0.5]), DirichletRegularization(1e8),
                                    10 ** 4, 4)
        assert abs(x.mean() - math.log(0.5)) <= 1e-3

    def test_symbol_drawn_from_vector(self):
        # theta = (0.9, 0.1) with huge concentration behaves like the categorical model
        x = sample_dirichlet_loglik(CategoricalModel([0.9, 0.1]), DirichletRegularization(1e9),
                                    10 ** 5, 5)
        near = np.abs(x - math.log(0.9)) < 1e-3
        assert abs(near.mean() - 0.9) <= 3 * math.sqrt(0.09 / 1e5)

    @pytest.mark.slow
    def test_absolute_moments_stable(self):
        model, reg = CategoricalModel([0.25] * 4), DirichletRegularization(2.0)
        a = sample_dirichlet_loglik(model, reg, 10 ** 6, 10)
        b = sample_dirichlet_loglik(model, reg, 10 ** 6, 11)
        for m in (3, 6, 9):
            ma, mb = np.mean(np.abs(a) ** m), np.mean(np.abs(b) ** m)
            assert np.isfinite(ma) and np.isfinite(mb)
            assert abs(ma - mb) <= 0.1 * max(ma, mb)


class TestStandard:
    @pytest.mark.parametrize("kind,params", [("normal", {"sigma": 0.0}),
                                             ("exponential", {"rate": -1.0}),
                                             ("two_point", {"p": 1.0}),
                                             ("two_point", {"a": 1.0, "b": 1.0}),
                                             ("bogus", {})])
    def test_validation(self, kind, params):
        with pytest.raises(DeltaTestError):
            GeneratorSpec(kind, params)

    def test_normal_mean(self):
        x = standard_generator(GeneratorSpec("normal", {"mu": 0.0, "sigma": 1.0}), 10 ** 5, 0)
        assert abs(x.mean()) <= 3 / math.sqrt(10 ** 5)

    def test_two_point_support(self):
        x = standard_generator(GeneratorSpec("two_point", {"p": 0.5, "a": -1.0, "b": math.sqrt(2)}),
                               1000, 0)
        assert set(np.unique(x)) == {-1.0, math.sqrt(2)}

    def test_exponential_third_moment(self):
        x = standard_generator(GeneratorSpec("exponential", {"rate": 1.0}), 10 ** 6, 1)
        k3 = stats.kstat(x, 3)
        # sd of the k-statistic ~ sqrt(var(X^3-ish)/N); generous 5 % band
        assert k3 == pytest.approx(2.0, rel=0.05)

    def test_deterministic(self):
        for spec in (GeneratorSpec("normal", {}), GeneratorSpec("exponential", {}),
                     GeneratorSpec("categorical", {"theta": [0.2, 0.8]}),
                     GeneratorSpec("dirichlet", {"theta": [0.2, 0.8], "concentration": 5.0})):
            assert np.array_equal(standard_generator(spec, 100, 9), standard_generator(spec, 100, 9))

    def test_shift(self):
        base = GeneratorSpec("exponential", {"rate": 2.0})
        moved = base.with_shift(1.5)
        assert moved.mean() == pytest.approx(base.mean() + 1.5)
        x = standard_generator(moved, 10 ** 5, 0)
        assert x.mean() == pytest.approx(2.0, abs=0.01)

    @pytest.mark.parametrize("spec", [
        GeneratorSpec("normal", {"mu": 1.0, "sigma": 2.0}),
        GeneratorSpec("exponential", {"rate": 0.5}),
        GeneratorSpec("two_point", {"p": 0.3, "a": -1.0, "b": 2.0}),
        GeneratorSpec("categorical", {"theta": [0.1, 0.3, 0.6]}),
    ])
    def test_population_moments(self, spec):
        x = standard_generator(spec, 10 ** 6, 3)
        assert x.mean() == pytest.approx(spec.mean(), abs=5 * spec.std() / 1000)
        assert x.std() == pytest.approx(spec.std(), rel=0.01)

    @pytest.mark.parametrize("spec", [
        GeneratorSpec("normal", {"mu": 1.0, "sigma": 2.0}),
        GeneratorSpec("exponential", {"rate": 0.5}),
        GeneratorSpec("two_point", {"p": 0.3, "a": -1.0, "b": 2.0}),
        GeneratorSpec("categorical", {"theta": [0.1, 0.3, 0.6]}),
        GeneratorSpec("dirichlet", {"theta": [0.5, 0.5], "concentration": 3.0}),
    ])
    def test_sum_sampler_matches_direct_sums(self, spec):
        count, size = 30, 20_000
        fast = sample_sums(spec, count, size, 1)
        direct = standard_generator(spec, count * size, 2).reshape(size, count).sum(axis=1)
        # lattice laws: summation order moves values by ulps and would split ties
        fast, direct = np.round(fast, 8), np.round(direct, 8)
        assert stats.ks_2samp(fast, direct).pvalue > 1e-3
