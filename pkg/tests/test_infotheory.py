import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infousage.ensemble import StatisticEnsemble, sample_batch
from infousage.errors import ConfigurationError, InputError
from infousage.infotheory import (
    CORRECTION_MILLER_MADOW,
    binned_mutual_information,
    estimate_information_usage,
    kl_selection_decomposition,
    max_information_rank,
    plugin_entropy,
    pvalue_information,
)
from infousage.rng import TAG_NOISE, TAG_PHI, normal_rows
from infousage.selection import ArgmaxRule, ArgminRule, TopKUniformRule


def test_plugin_entropy_values():
    assert plugin_entropy([1] * 8) == pytest.approx(np.log(8))
    assert plugin_entropy([42]) == 0.0
    # high-precision reference for a 3:1 split
    assert plugin_entropy([7500, 2500]) == pytest.approx(0.5623351446188083, abs=1e-12)


def test_miller_madow_correction():
    base = plugin_entropy([10, 10, 20])
    corrected = plugin_entropy([10, 10, 20], CORRECTION_MILLER_MADOW)
    assert corrected == pytest.approx(base + 2 / 80)
    with pytest.raises(InputError):
        plugin_entropy([])
    with pytest.raises(InputError):
        plugin_entropy([1, 2], correction="magic")


@given(counts=st.lists(st.integers(1, 500), min_size=1, max_size=12))
@settings(max_examples=60, deadline=None)
def test_plugin_entropy_permutation_invariant_and_bounded(counts):
    h = plugin_entropy(counts)
    assert h == pytest.approx(plugin_entropy(counts[::-1]))
    assert -1e-12 <= h <= np.log(len(counts)) + 1e-12
    uniform = plugin_entropy([1] * len(counts))
    assert h <= uniform + 1e-12


def test_information_usage_argmax_nulls():
    ens = StatisticEnsemble.gaussian(1000)
    batch = sample_batch(ens, ArgmaxRule(), 50_000, seed=1)
    est = estimate_information_usage(batch, CORRECTION_MILLER_MADOW)
    assert est.H_T_given_phi == 0.0
    assert est.I == pytest.approx(np.log(1000), abs=0.05)


def test_information_usage_full_randomization_is_zero():
    ens = StatisticEnsemble.gaussian(50)
    batch = sample_batch(ens, TopKUniformRule(50), 20_000, seed=2)
    est = estimate_information_usage(batch, CORRECTION_MILLER_MADOW)
    assert est.I <= 0.01


def test_information_usage_topk_nulls():
    ens = StatisticEnsemble.gaussian(100)
    batch = sample_batch(ens, TopKUniformRule(10), 50_000, seed=3)
    est = estimate_information_usage(batch, CORRECTION_MILLER_MADOW)
    assert est.H_T_given_phi == pytest.approx(np.log(10))
    assert est.I == pytest.approx(np.log(10), abs=0.03)


def test_binned_mi_identity_and_independence():
    x = normal_rows(4, TAG_PHI, 0, 100_000, 1)[:, 0]
    assert binned_mutual_information(x, x, 16) >= 0.9 * np.log(16)
    y = normal_rows(4, TAG_NOISE, 0, 100_000, 1)[:, 0]
    assert binned_mutual_information(x, y, 16) <= 0.02
    with pytest.raises(InputError):
        binned_mutual_information(x, y[:-1], 16)


def test_binned_mi_additive_gaussian_channel():
    x = normal_rows(5, TAG_PHI, 0, 100_000, 1)[:, 0]
    w = normal_rows(5, TAG_NOISE, 0, 100_000, 1)[:, 0]
    est = binned_mutual_information(x, x + w, 16)
    assert est == pytest.approx(0.5 * np.log(2), rel=0.10)


def test_pvalue_information_argmin():
    ens = StatisticEnsemble.uniform_pvalues(5)
    batch = sample_batch(ens, ArgminRule(), 100_000, seed=6)
    out = pvalue_information(batch, ens, 0.05)
    assert out["P_small"] == pytest.approx(1 - 0.95 ** 5, abs=0.01)
    assert out["I_TZ"] > 0
    with pytest.raises(InputError):
        pvalue_information(batch, ens, 0.6)
    gauss = StatisticEnsemble.gaussian(5)
    with pytest.raises(ConfigurationError):
        pvalue_information(batch, gauss, 0.05)


def test_pvalue_information_independent_selection_near_zero():
    ens = StatisticEnsemble.uniform_pvalues(4)
    batch = sample_batch(ens, ArgminRule(), 50_000, seed=7)
    batch.selections = np.zeros(batch.R, dtype=np.int64)  # decouple T from phi
    out = pvalue_information(batch, ens, 0.1)
    assert out["I_TZ"] <= 0.01
    assert out["P_small"] == pytest.approx(0.1, abs=0.01)


def test_max_information_rank():
    assert max_information_rank(np.full(100, 0.01)) == pytest.approx(np.log(100))
    assert max_information_rank([0.97, 0.01, 0.01, 0.01]) == pytest.approx(np.log(100))
    out = max_information_rank([0.5, 0.25, 0.25], signal_index=0)
    assert out["I_inf"] == pytest.approx(np.log(4))
    assert out["signal_form"] == pytest.approx(np.log(2 / 0.5))
    # zero-probability cells are unreachable, excluded from the max
    assert max_information_rank([0.5, 0.5, 0.0]) == pytest.approx(np.log(2))
    with pytest.raises(InputError):
        max_information_rank([0.5, 0.4])


def test_kl_decomposition_two_symmetric_nulls():
    ens = StatisticEnsemble.gaussian(2)
    batch = sample_batch(ens, ArgmaxRule(), 50_000, seed=8)
    out = kl_selection_decomposition(batch, ens)
    assert out["weighted_sum"] <= np.log(2) + 0.05
    assert not out["omitted"]


def test_kl_decomposition_mean_shift_inequality():
    ens = StatisticEnsemble.gaussian(1000)
    batch = sample_batch(ens, ArgmaxRule(), 50_000, seed=9)
    est = estimate_information_usage(batch, CORRECTION_MILLER_MADOW)
    out = kl_selection_decomposition(batch, ens, min_count=30)
    assert out["weighted_delta_sq"] <= 2.0 * est.I + 0.1


def test_kl_decomposition_independent_rule_near_zero():
    ens = StatisticEnsemble.gaussian(3)
    batch = sample_batch(ens, ArgmaxRule(), 50_000, seed=10)
    batch.selections = batch.selections * 0  # fixed selection
    out = kl_selection_decomposition(batch, ens)
    assert out["weighted_sum"] <= 0.01
