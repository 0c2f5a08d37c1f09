import itertools

import numpy as np
import pytest

from infousage.classify import ClassificationSetup, erm_train, overfitting_audit
from infousage.errors import InputError


def test_threshold_patterns_count_and_shape():
    xs = np.array([0.3, -1.2, 2.0, 0.9])
    setup = ClassificationSetup(xs, 0.5)
    assert setup.patterns.shape == (5, 4)  # n+1 distinct threshold patterns
    assert setup.vc_dimension == 1
    # every pattern is +1 exactly on the top-j inputs for some j
    ranks = np.argsort(np.argsort(-xs))
    for pat in setup.patterns:
        j = (pat == 1).sum()
        assert np.array_equal(pat == 1, ranks < j)


def test_threshold_patterns_with_duplicate_inputs():
    setup = ClassificationSetup([1.0, 1.0, 2.0], 0.5)
    assert len(setup.patterns) == 3  # duplicates collapse


def test_erm_matches_brute_force():
    rng = np.random.default_rng(0)
    xs = rng.normal(size=8)
    setup = ClassificationSetup(xs, 0.5)
    for labels in itertools.product((-1, 1), repeat=8):
        labels = np.array(labels)
        got = setup.patterns[erm_train(setup, labels)]
        errs = (setup.patterns != labels).sum(axis=1)
        best = errs.min()
        assert (got != labels).sum() == best
        # tie break to the smallest index
        assert erm_train(setup, labels) == int(np.argmin(errs))


def test_erm_realizable_labels_give_zero_error():
    xs = np.linspace(-1, 1, 9)
    setup = ClassificationSetup(xs, 0.5)
    labels = np.where(xs >= 0.2, 1, -1)
    idx = erm_train(setup, labels)
    assert np.array_equal(setup.patterns[idx], labels)


def test_erm_input_validation():
    setup = ClassificationSetup([0.0, 1.0], 0.5)
    with pytest.raises(InputError):
        erm_train(setup, [1, 0])
    with pytest.raises(InputError):
        erm_train(setup, [1, 1, 1])


def test_setup_validation():
    with pytest.raises(InputError):
        ClassificationSetup([], 0.5)
    with pytest.raises(InputError):
        ClassificationSetup([0.0], 1.5)
    with pytest.raises(InputError):
        ClassificationSetup([0.0, 1.0], 0.5, function_class="mystery")
    with pytest.raises(InputError):
        ClassificationSetup([0.0, 1.0], 0.5, function_class="explicit_finite",
                            patterns=np.array([[1, 2]]))
    ok = ClassificationSetup([0.0, 1.0], 0.5, function_class="explicit_finite",
                             patterns=np.array([[1, -1], [1, 1]]))
    assert ok.vc_dimension is None


def test_deterministic_labels_have_zero_gap_and_information():
    xs = np.linspace(-1, 1, 10)
    probs = np.where(xs >= 0.0, 1.0, 0.0)  # labels realizable and certain
    out = overfitting_audit(ClassificationSetup(xs, probs), seed=1)
    assert out["gap"] == 0.0
    assert out["I_hat"] == 0.0
    assert out["H_pattern"] == 0.0


def test_audit_gap_within_bounds_pure_noise():
    xs = np.linspace(-2, 2, 12)
    out = overfitting_audit(ClassificationSetup(xs, 0.5), replications=20_000,
                            seed=2)
    assert out["exact_joint"]
    assert 0 <= out["I_hat"] <= out["H_pattern"] + 1e-12
    assert out["I_hat"] <= out["vc_cap"] + 1e-9
    assert out["gap"] <= out["bound"] + 3 * out["gap_se"]
    assert out["bound"] <= out["vc_bound"] + 1e-12
    # pure label noise means every pattern has true risk 1/2
    assert out["gap"] > 0


def test_audit_vc_cap_arithmetic():
    xs = np.linspace(0, 1, 100)
    out = overfitting_audit(ClassificationSetup(xs, 0.5), seed=3)
    assert out["vc_cap"] == pytest.approx(np.log(100 * np.e), abs=1e-9)
    assert not out["exact_joint"]
    assert out["I_hat"] == out["H_pattern"]


def test_audit_replication_floor():
    with pytest.raises(InputError):
        overfitting_audit(ClassificationSetup([0.0, 1.0], 0.5), replications=100)
