import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infousage import bounds as bd
from infousage.errors import InputError


def test_bias_bound_values():
    assert bd.bias_bound(1.0, 0.0) == 0.0
    assert bd.bias_bound(1.0, np.log(1000)) == pytest.approx(3.7169222, abs=1e-6)
    assert bd.bias_bound(2.0, 0.5) == pytest.approx(2.0)
    with pytest.raises(InputError):
        bd.bias_bound(1.0, -0.1)
    with pytest.raises(InputError):
        bd.bias_bound(0.0, 1.0)


def test_hetero_bound():
    assert bd.bias_bound_hetero(
        [1.0, 3.0], [0.5, 0.5], np.log(2)
    ) == pytest.approx(np.sqrt(5) * np.sqrt(2 * np.log(2)), abs=1e-9)
    sig = np.full(7, 1.3)
    pmf = np.full(7, 1 / 7)
    assert bd.bias_bound_hetero(sig, pmf, 0.8) == pytest.approx(
        bd.bias_bound(1.3, 0.8)
    )
    assert bd.bias_bound_hetero([1.0, 2.0], [0.3, 0.7], 0.0) == 0.0
    with pytest.raises(InputError):
        bd.bias_bound_hetero([1.0], [0.5, 0.5], 1.0)


def test_subexp_bound():
    assert bd.bias_bound_subexp(2.0, 4.0, 1.0) == pytest.approx(4.5)
    assert bd.bias_bound_subexp(1.0, 0.25, 2.0) == pytest.approx(2.0)
    assert bd.bias_bound_subexp(2.0, 4.0, 0.0) == pytest.approx(0.5)
    assert bd.bias_bound_subexp(1.0, 0.25, 0.0) == pytest.approx(1.0)


def test_error_bounds():
    assert bd.abs_error_bound(1.0, 0.0) == pytest.approx(1.0)
    assert bd.sq_error_bound(1.0, 0.0) == pytest.approx(1.25)
    assert bd.sq_error_bound(0.5, 2.0) == pytest.approx(5.3125)


def test_entropy_sandwich_bounds():
    assert bd.sq_error_lower_bound(np.log(2)) == pytest.approx(
        np.log(2) / 8 - 2.5
    )
    assert bd.sq_error_lower_bound(40.0) == pytest.approx(2.5)
    assert bd.sq_error_upper_bound_entropy(40.0) == pytest.approx(401.5)
    assert bd.sq_error_lower_bound(0.0) == -2.5
    assert bd.sq_error_upper_bound_entropy(0.0) == 1.5


def test_topk_bound():
    assert bd.topk_bound(1.0, 1000, 1) == pytest.approx(3.7169222, abs=1e-6)
    assert bd.topk_bound(1.0, 64, 64) == 0.0
    assert bd.topk_bound(1.0, 4096, 16) == pytest.approx(
        np.sqrt(2 * np.log(256)), abs=1e-9
    )


def test_pvalue_bound():
    assert bd.pvalue_bound(0.05, 0.0) == pytest.approx(0.05)
    assert bd.pvalue_bound(0.05, np.log(5)) == pytest.approx(
        0.05 + np.sqrt(np.log(5) / np.log(10)), abs=1e-9
    )
    assert bd.pvalue_bound(0.05, 100.0) == 1.0
    with pytest.raises(InputError):
        bd.pvalue_bound(0.5, 1.0)


def test_regret_and_vc_bounds():
    assert bd.regret_bound(1.0, 0.0) == 0.0
    assert bd.regret_bound(1.0, np.log(10)) == pytest.approx(2.1460, abs=1e-4)
    assert bd.regret_bound(3.0, 2.0) == pytest.approx(6.0)
    assert bd.vc_info_bound(1, 100) == pytest.approx(np.log(100 * np.e), abs=1e-9)
    assert bd.vc_info_bound(25, 25) == 25.0  # log floor
    assert bd.overfit_bound(0.0, 50) == 0.0


def test_fourth_root_budget_arithmetic():
    omegas = bd.fourth_root_schedule(1.0, 4)
    budget = float((0.5 / omegas ** 2).sum())
    assert budget == pytest.approx(sum(1 / (2 * np.sqrt(j)) for j in (1, 2, 3, 4)))
    assert budget == pytest.approx(1.3922285, abs=1e-6)


def test_multistep_bound_zero_history():
    got = bd.multistep_error_bound(1.0, 10_000, 0)
    assert got == pytest.approx(0.01 + np.sqrt(2 / (np.pi * 10_000)))


def test_multistep_bound_fourth_root_scaling():
    # bound(16k)/bound(k) -> 16^(1/4) = 2 for large k
    lo = bd.multistep_error_bound(1.0, 10 ** 8, 4096)
    hi = bd.multistep_error_bound(1.0, 10 ** 8, 16 * 4096)
    assert hi / lo == pytest.approx(2.0, abs=0.05)


def test_multistep_bound_explicit_schedule_validation():
    with pytest.raises(InputError):
        bd.multistep_error_bound(1.0, 100, 3, schedule=[1.0, 1.0])
    with pytest.raises(InputError):
        bd.multistep_error_bound(1.0, 100, 1, schedule=[1.0, -1.0])


@given(
    sigma=st.floats(0.1, 5.0),
    i1=st.floats(0.0, 10.0),
    delta=st.floats(0.0, 5.0),
)
@settings(max_examples=80, deadline=None)
def test_upper_bounds_monotone_in_information(sigma, i1, delta):
    i2 = i1 + delta
    assert bd.bias_bound(sigma, i2) >= bd.bias_bound(sigma, i1)
    assert bd.abs_error_bound(sigma, i2) >= bd.abs_error_bound(sigma, i1)
    assert bd.sq_error_bound(sigma, i2) >= bd.sq_error_bound(sigma, i1)
    assert bd.regret_bound(sigma, i2) >= bd.regret_bound(sigma, i1)


@given(m0=st.integers(1, 500), m1=st.integers(0, 200))
@settings(max_examples=60, deadline=None)
def test_topk_bound_non_increasing_in_m0(m0, m1):
    m = 500 + m1
    assert bd.topk_bound(1.0, m, m0) >= bd.topk_bound(1.0, m, min(m, m0 + 1))


def test_bound_report_check():
    ok = bd.BoundReport.check("x", 1.0, 0.9)
    assert ok.satisfied and ok.slack == pytest.approx(0.1)
    bad = bd.BoundReport.check("x", 1.0, 1.2)
    assert not bad.satisfied
    low = bd.BoundReport.check("x", 0.5, 0.6, lower=True)
    assert low.satisfied and low.lower
