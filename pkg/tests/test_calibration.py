"""
Monte Carlo calibration, liberality and power checks.

Everything marked slow is deselected by default; run with `pytest -m slow`.
The remaining checks are exhaustive oracle, invariance and determinism
sweeps that finish in seconds.
"""

import numpy as np
import pytest
from scipy import stats

from app.models.dataset import IncompleteDataset
from app.models.estimates import HypothesisKind
from app.models.reports import BootstrapConfig
from app.models.simulation import CovarianceKind, GeneratorSpec, Marginal
from app.services.contrasts import canonical_kinds, hypothesis_matrix
from app.services.datagen import generate
from app.services.design import validate
from app.services.estimation import estimate_effects
from app.services.mc_harness import load_config, simulate
from app.services.statistics import ats, mats, wts
from app.services.wild_bootstrap import bootstrap_pvalue
from app.utils.seeding import stream
from app.workflows.factorial_analysis import FactorialAnalysis

from .oracles import oracle_ats, oracle_covariance, oracle_effects, oracle_mats, oracle_wts, random_dataset_rows


def _rate(result, method, zeta=None):
    rows = [r for r in result.summary if r.method.value == method and r.zeta == zeta]
    assert len(rows) == 1
    return rows[0].rejection_rate, rows[0].se


class TestEstimatorOracles:

    def test_complete_designs(self):
        rng = np.random.default_rng(77)
        for _ in range(200):
            a = int(rng.integers(1, 4))
            d = int(rng.integers(1, 5))
            sizes = [int(s) for s in rng.integers(2, 13, size=a)]
            rows = random_dataset_rows(rng, sizes, d, missing_rate=0.0, tie_rate=0.3)
            est = estimate_effects(validate(IncompleteDataset.from_rows(rows)))

            assert est.p_hat == pytest.approx(oracle_effects(rows), abs=1e-10)
            assert est.covariance.v_n == pytest.approx(oracle_covariance(rows), abs=1e-10)
            for kind in canonical_kinds(a, d):
                contrast = hypothesis_matrix(a, d, kind)
                p, v, c, n = est.p_hat, est.covariance.v_n, contrast.matrix, est.n
                assert wts(p, v, c, n).value == pytest.approx(oracle_wts(p, v, c, n), rel=1e-8, abs=1e-10)
                if np.trace(contrast.projection @ v) > 0:
                    t_a, f_hat = oracle_ats(p, v, c, n)
                    result = ats(p, v, contrast.projection, n)
                    assert result.value == pytest.approx(t_a, abs=1e-10)
                    assert result.dof == pytest.approx(f_hat, rel=1e-8)
                if np.all(np.diag(v) > 0):
                    assert mats(p, est.covariance.d_n, c, n).value == pytest.approx(
                        oracle_mats(p, v, c, n), rel=1e-8, abs=1e-10
                    )


class TestInvarianceAndDeterminism:

    def test_exp_transform_changes_nothing(self, make_dataset):
        config = BootstrapConfig(replicates=20, seed=13, threads=1)
        analysis = FactorialAnalysis(config)
        for seed in range(100):
            data, _ = make_dataset(seed, group_sizes=(5, 6), d=3, missing_rate=0.2, tie_rate=0.2)
            raw = analysis.run(data).model_dump_json()
            assert analysis.run(data.map_values(np.exp)).model_dump_json() == raw

    def test_thread_count_changes_nothing(self, make_dataset):
        data, _ = make_dataset(1, group_sizes=(10, 12), d=4, missing_rate=0.2)
        contrast = hypothesis_matrix(2, 4, HypothesisKind.INTERACTION)
        single = bootstrap_pvalue(data, contrast, BootstrapConfig(replicates=200, seed=5, threads=1, chunk_size=32))
        many = bootstrap_pvalue(data, contrast, BootstrapConfig(replicates=200, seed=5, threads=8, chunk_size=32))
        assert single.model_dump_json() == many.model_dump_json()

    def test_simulation_thread_count_changes_nothing(self):
        payload = {
            "generators": [{"group_sizes": [6, 6], "d": 2}],
            "missingness": [{"mechanism": "MCAR", "rate": 0.1}],
            "methods": ["wts", "ats_boot"],
            "nsim": 6,
            "bootstrap_replicates": 30,
            "seed": 9,
        }
        single = simulate(load_config({**payload, "threads": 1}))
        many = simulate(load_config({**payload, "threads": 8}))
        assert single.summary == many.summary
        assert single.replications == many.replications


@pytest.mark.slow
class TestNullCalibration:

    def test_wald_statistic_is_chi_square(self):
        spec = GeneratorSpec(marginal=Marginal.NORMAL, covariance=CovarianceKind.CS, group_sizes=[150, 150], d=2)
        contrast = hypothesis_matrix(2, 2, HypothesisKind.INTERACTION)
        values = []
        for rep in range(2000):
            est = estimate_effects(validate(generate(spec, stream(31, rep))))
            values.append(wts(est.p_hat, est.covariance.v_n, contrast.matrix, est.n).value)
        values = np.asarray(values)
        rejection = float(np.mean(values > stats.chi2.ppf(0.95, 1)))
        assert 0.035 <= rejection <= 0.075
        assert stats.kstest(values, stats.chi2(1).cdf).statistic < 0.05

    def test_bootstrap_tests_hold_level(self):
        config = load_config({
            "name": "calibration",
            "generators": [{"marginal": "NORMAL", "covariance": "AR", "group_sizes": [10, 10], "d": 4}],
            "missingness": [{"mechanism": "MCAR", "rate": 0.1}],
            "hypotheses": ["interaction"],
            "methods": ["wts_boot", "ats_boot", "mats_boot"],
            "nsim": 2000,
            "bootstrap_replicates": 499,
            "seed": 20240101,
            "threads": 0,
        })
        result = simulate(config)
        for method in ("wts_boot", "ats_boot", "mats_boot"):
            rate, _ = _rate(result, method)
            assert 0.035 <= rate <= 0.065, method

    def test_asymptotic_wald_is_liberal_in_small_samples(self):
        config = load_config({
            "name": "liberality",
            "generators": [{"marginal": "NORMAL", "covariance": "AR", "group_sizes": [5, 5], "d": 4}],
            "missingness": [{"mechanism": "MCAR", "rate": 0.1}],
            "hypotheses": ["interaction"],
            "methods": ["wts", "ats_boot"],
            "nsim": 2000,
            "bootstrap_replicates": 499,
            "seed": 20240102,
            "threads": 0,
        })
        result = simulate(config)
        wald, _ = _rate(result, "wts")
        anova, _ = _rate(result, "ats_boot")
        assert wald > 0.075
        assert wald >= anova + 0.02

    def test_ordinal_null(self):
        config = load_config({
            "name": "ordinal",
            "generators": [{"marginal": "ORDINAL", "ordinal_c": 1.0, "group_sizes": [20, 20], "d": 4}],
            "missingness": [{"mechanism": "MCAR", "rate": 0.1}],
            "hypotheses": ["interaction"],
            "methods": ["ats_boot"],
            "nsim": 2000,
            "bootstrap_replicates": 499,
            "seed": 20240103,
            "threads": 0,
        })
        rate, _ = _rate(simulate(config), "ats_boot")
        assert 0.035 <= rate <= 0.065


@pytest.mark.slow
def test_power_grows_with_shift():
    zetas = [0.0, 1.0, 2.0, 3.0]
    config = load_config({
        "name": "power",
        "generators": [{"marginal": "NORMAL", "covariance": "AR", "group_sizes": [15], "d": 4}],
        "missingness": [{"mechanism": "MCAR", "rate": 0.3}],
        "hypotheses": ["time"],
        "methods": ["ats_boot"],
        "alternative": {"kind": "ALT1", "group": 1, "zetas": zetas},
        "nsim": 1000,
        "bootstrap_replicates": 499,
        "seed": 20240104,
        "threads": 0,
    })
    result = simulate(config)
    curve = [_rate(result, "ats_boot", zeta) for zeta in zetas]
    inversions = 0
    for (low, low_se), (high, high_se) in zip(curve, curve[1:]):
        if high < low:
            inversions += 1
            assert low - high <= 2 * max(low_se, high_se)
    assert inversions <= 1
    assert curve[-1][0] > curve[0][0] + 0.3
