"""
Tests for synthetic data generation
"""

import numpy as np
import pytest
from scipy import stats

from app.models.simulation import AlternativeKind, CovarianceKind, GeneratorSpec, Marginal
from app.services.datagen import (
    MARGINAL_LAWS,
    alternative_shift,
    copula_sample,
    covariance_setting,
    generate,
    ordinal_sample,
    shift_alternative,
    to_correlation,
)
from app.utils.errors import DimensionMismatchError
from app.utils.seeding import stream


class TestCovarianceSettings:

    def test_autoregressive(self):
        m = covariance_setting(CovarianceKind.AR, 3, rho=0.6)
        assert m[0, 2] == pytest.approx(0.36)
        assert np.all(np.diag(m) == 1.0)

    def test_compound_symmetry_is_identity(self):
        assert np.array_equal(covariance_setting(CovarianceKind.CS, 4), np.eye(4))

    def test_toeplitz(self):
        m = covariance_setting(CovarianceKind.TOEPLITZ, 4)
        assert m[0].tolist() == [4.0, 3.0, 2.0, 1.0]
        corr = to_correlation(m)
        assert np.allclose(np.diag(corr), 1.0)
        assert corr[0, 3] == pytest.approx(0.25)

    def test_rejects_empty(self):
        with pytest.raises(DimensionMismatchError):
            covariance_setting(CovarianceKind.AR, 0)


class TestCopula:

    @pytest.mark.parametrize("marginal", [
        Marginal.NORMAL, Marginal.DOUBLE_EXPONENTIAL, Marginal.LOGNORMAL, Marginal.CHISQ15,
    ])
    def test_marginal_distribution(self, marginal):
        spec = GeneratorSpec(marginal=marginal, covariance=CovarianceKind.AR, group_sizes=[4000], d=2)
        data = copula_sample(spec, stream(10, 0))
        column = data.values[0][:, 1]
        assert stats.kstest(column, MARGINAL_LAWS[marginal].cdf).pvalue > 0.001

    def test_dependence_follows_setting(self):
        spec = GeneratorSpec(marginal=Marginal.NORMAL, covariance=CovarianceKind.AR, rho=0.6,
                             group_sizes=[20000], d=3)
        values = copula_sample(spec, stream(11, 0)).values[0]
        corr = np.corrcoef(values, rowvar=False)
        assert corr[0, 1] == pytest.approx(0.6, abs=0.03)
        assert corr[0, 2] == pytest.approx(0.36, abs=0.03)

    def test_fully_observed_and_shaped(self):
        spec = GeneratorSpec(group_sizes=[5, 7], d=4)
        data = copula_sample(spec, stream(1, 0))
        assert data.group_sizes == (5, 7) and data.d == 4
        assert all(m.all() for m in data.mask)

    def test_reproducible(self):
        spec = GeneratorSpec(marginal=Marginal.LOGNORMAL, group_sizes=[6, 6], d=3)
        assert generate(spec, stream(5, 0)).equals(generate(spec, stream(5, 0)))

    def test_rejects_ordinal(self):
        with pytest.raises(ValueError):
            copula_sample(GeneratorSpec(marginal=Marginal.ORDINAL, group_sizes=[3], d=2), stream(0))


class TestOrdinal:

    def test_scores_in_four_categories(self):
        data = ordinal_sample(1.0, 2, 5, (200, 200), stream(2, 0))
        scores = np.concatenate([v.ravel() for v in data.values])
        assert set(np.unique(scores).tolist()) == {1.0, 2.0, 3.0, 4.0}

    def test_association_grows_with_c(self):
        weak = ordinal_sample(0.0, 1, 2, (5000,), stream(3, 0)).values[0]
        strong = ordinal_sample(5.0, 1, 2, (5000,), stream(3, 0)).values[0]
        assert abs(np.corrcoef(weak, rowvar=False)[0, 1]) < 0.05
        assert np.corrcoef(strong, rowvar=False)[0, 1] > 0.5

    def test_rejects_negative_c(self):
        with pytest.raises(ValueError):
            ordinal_sample(-1.0, 1, 2, (3,), stream(0))

    def test_group_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ordinal_sample(1.0, 2, 2, (3,), stream(0))


class TestShifts:

    def test_alternative_vectors(self):
        assert alternative_shift(AlternativeKind.ALT1, 4, 1.5).tolist() == [0.0, 0.0, 1.5, 1.5]
        assert alternative_shift(AlternativeKind.ALT1, 5, 1.0).tolist() == [0.0, 0.0, 1.0, 1.0, 1.0]
        assert alternative_shift(AlternativeKind.ALT2, 4, 2.0).tolist() == [0.0, 0.0, 0.0, 2.0]

    def test_shift_one_group(self):
        data = generate(GeneratorSpec(group_sizes=[3, 3], d=2), stream(4, 0))
        shifted = shift_alternative(data, 1, [0.0, 2.0])
        assert np.array_equal(shifted.values[0], data.values[0])
        assert shifted.values[1][:, 1] == pytest.approx(data.values[1][:, 1] + 2.0)

    def test_shift_bad_length(self):
        data = generate(GeneratorSpec(group_sizes=[3], d=2), stream(4, 0))
        with pytest.raises(DimensionMismatchError):
            shift_alternative(data, 0, [1.0])
        with pytest.raises(DimensionMismatchError):
            shift_alternative(data, 1, [1.0, 1.0])

    def test_generator_shifts_apply_to_ordinal(self):
        spec = GeneratorSpec(marginal=Marginal.ORDINAL, group_sizes=[4, 4], d=2,
                             shifts=[[0.0, 0.0], [0.0, 10.0]])
        data = generate(spec, stream(6, 0))
        assert np.all(data.values[1][:, 1] >= 11.0)
        assert np.all(data.values[0] <= 4.0)

    def test_invalid_shift_shape(self):
        with pytest.raises(ValueError):
            GeneratorSpec(group_sizes=[2, 2], d=2, shifts=[[0.0, 0.0]])
