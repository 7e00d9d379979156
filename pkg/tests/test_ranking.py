"""
Tests for pooled mid-ranks, relative effects and centered ranks
"""

import numpy as np
import pytest

from app.models.dataset import IncompleteDataset
from app.services.design import validate
from app.services.ranking import centered_ranks, midranks, relative_effects

from .oracles import counting_midranks, oracle_effects


class TestMidranks:

    def test_ties_share_average_rank(self):
        assert midranks([1.0, 2.0, 2.0, 3.0]).tolist() == [1.0, 2.5, 2.5, 4.0]

    def test_all_tied(self):
        assert midranks([5.0] * 4).tolist() == [2.5] * 4

    def test_rank_sum(self):
        ranks = midranks(np.random.default_rng(1).integers(0, 3, size=20).astype(float))
        assert ranks.sum() == pytest.approx(20 * 21 / 2)

    def test_empty(self):
        with pytest.raises(ValueError):
            midranks([])

    def test_matches_counting_oracle(self):
        """Sort-based ranks equal the O(N^2) counting function exactly"""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            size = int(rng.integers(1, 51))
            values = np.where(
                rng.random(size) < 0.3,
                rng.integers(0, 5, size=size).astype(float),
                rng.normal(size=size),
            )
            assert np.array_equal(midranks(values), counting_midranks(values))


class TestRelativeEffects:

    def test_two_groups_single_occasion(self):
        data = IncompleteDataset.from_rows([[[1.0], [2.0]], [[3.0], [4.0]]])
        _, p_hat = relative_effects(validate(data))
        assert p_hat == pytest.approx([0.25, 0.75])

    def test_group_major_order(self, small_dataset):
        table, p_hat = relative_effects(validate(small_dataset))
        assert p_hat.shape == (6,)
        assert p_hat[3] == pytest.approx((table.cell_means[1, 0] - 0.5) / table.N)

    def test_matches_oracle(self, make_dataset):
        for seed in range(30):
            data, rows = make_dataset(seed, tie_rate=0.3)
            _, p_hat = relative_effects(validate(data))
            assert p_hat == pytest.approx(oracle_effects(rows), abs=1e-12)

    def test_effects_lie_in_unit_interval(self, make_dataset):
        data, _ = make_dataset(5)
        _, p_hat = relative_effects(validate(data))
        assert np.all((p_hat > 0.0) & (p_hat < 1.0))

    def test_invariant_under_monotone_transform(self, make_dataset):
        data, _ = make_dataset(11, missing_rate=0.3)
        _, p_hat = relative_effects(validate(data))
        _, p_exp = relative_effects(validate(data.map_values(np.exp)))
        assert np.array_equal(p_hat, p_exp)

    def test_unobserved_entries_do_not_matter(self):
        data = IncompleteDataset.from_rows([[[1.0, None], [2.0, 4.0], [0.5, 3.0]]])
        other = IncompleteDataset(
            values=(np.array([[1.0, 99.0], [2.0, 4.0], [0.5, 3.0]]),),
            mask=data.mask,
        )
        assert np.array_equal(relative_effects(validate(data))[1], relative_effects(validate(other))[1])


class TestCenteredRanks:

    def test_two_subjects(self):
        data = IncompleteDataset.from_rows([[[1.0], [2.0]]])
        table, _ = relative_effects(validate(data))
        z = centered_ranks(table)
        assert z[0][:, 0].tolist() == [-0.5, 0.5]

    def test_cells_sum_to_zero(self, small_dataset):
        table, _ = relative_effects(validate(small_dataset))
        for z, obs in zip(centered_ranks(table), table.mask):
            assert z.sum(axis=0) == pytest.approx(np.zeros(3), abs=1e-12)
            assert np.all(z[~obs] == 0.0)
