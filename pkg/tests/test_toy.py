import numpy as np
import pytest

from shift_oracle import (
    EmptyGroup,
    InvalidInput,
    LinearSigmoidClassifier,
    OutOfTheoremScope,
    Role,
    ScoreKind,
    ToyConfig,
    ToySample,
    correctness,
    minority_margin,
    run_biased_support_experiment,
    run_consistency_experiment,
    sample_toy,
    score,
    toy_predict,
    toy_true_accuracy,
)
from shift_oracle.estimators import fit_atc
from shift_oracle.toy import stream_rng


def make_config(**overrides):
    base = dict(gamma=0.1, c=1.0, p_spr=0.9, p_spr_target=0.5, n=1000, seed=0)
    base.update(overrides)
    return ToyConfig(**base)


class TestSampling:
    def test_config_validation(self):
        with pytest.raises(InvalidInput):
            make_config(gamma=1.5)
        with pytest.raises(InvalidInput):
            make_config(p_spr=0.4)
        with pytest.raises(InvalidInput):
            make_config(p_spr_target=1.5)
        with pytest.raises(InvalidInput):
            make_config(c_target=0.05)

    def test_full_agreement(self):
        s = sample_toy(make_config(p_spr_target=1.0), Role.TARGET)
        assert np.all(s.x_spr * (2 * s.y - 1) == 1)

    def test_full_disagreement(self):
        s = sample_toy(make_config(p_spr_target=0.0), Role.TARGET)
        assert np.all(s.x_spr * (2 * s.y - 1) == -1)

    def test_agreement_fraction_concentrates(self):
        s = sample_toy(make_config(n=100_000), Role.SOURCE)
        frac = np.mean(s.x_spr * (2 * s.y - 1) > 0)
        assert abs(frac - 0.9) < 0.01

    def test_invariant_feature_sign_and_support(self):
        cfg = make_config(n=10_000, c_target=0.6)
        for role, bound in ((Role.SOURCE, 1.0), (Role.TARGET, 0.6)):
            s = sample_toy(cfg, role)
            np.testing.assert_array_equal(np.sign(s.x_inv), 2 * s.y - 1)
            mags = np.abs(s.x_inv)
            assert mags.min() >= cfg.gamma and mags.max() <= bound

    def test_deterministic_given_seed(self):
        a = sample_toy(make_config(), Role.SOURCE)
        b = sample_toy(make_config(), Role.SOURCE)
        np.testing.assert_array_equal(a.x_inv, b.x_inv)
        np.testing.assert_array_equal(a.x_spr, b.x_spr)
        np.testing.assert_array_equal(a.y, b.y)

    def test_source_and_target_streams_differ(self):
        cfg = make_config(p_spr_target=0.9)
        a = sample_toy(cfg, Role.SOURCE)
        b = sample_toy(cfg, Role.TARGET)
        assert not np.array_equal(a.x_inv, b.x_inv)


class TestPredict:
    def test_margin_point_correct(self):
        clf = LinearSigmoidClassifier(1.0, 0.0)
        sample = ToySample(np.array([0.1]), np.array([1.0]), np.array([1]))
        preds = toy_predict(clf, sample)
        assert preds.probs[0, 1] > 0.5
        assert correctness(preds)[0]

    def test_zero_logit_is_uniform(self):
        clf = LinearSigmoidClassifier(1.0, 0.5)
        sample = ToySample(np.array([0.5]), np.array([-1.0]), np.array([1]))
        np.testing.assert_allclose(toy_predict(clf, sample).probs, [[0.5, 0.5]], atol=1e-12)

    def test_spurious_pull_flips_prediction(self):
        clf = LinearSigmoidClassifier(1.0, 0.5)
        sample = ToySample(np.array([0.2]), np.array([-1.0]), np.array([1]))
        preds = toy_predict(clf, sample)
        # z = 0.2 - 0.5 = -0.3 -> predicted class 0, label 1
        assert preds.probs[0, 1] == pytest.approx(1 / (1 + np.exp(0.3)))
        assert not correctness(preds)[0]


class TestTrueAccuracy:
    def test_no_spurious_weight_is_perfect(self):
        clf = LinearSigmoidClassifier(2.0, 0.0)
        for p in (0.0, 0.3, 1.0):
            assert toy_true_accuracy(clf, make_config(p_spr_target=p), Role.TARGET) == 1.0

    def test_closed_form_value(self):
        clf = LinearSigmoidClassifier(1.0, 0.5)
        acc = toy_true_accuracy(clf, make_config(p_spr_target=0.5), Role.TARGET)
        assert acc == pytest.approx(0.5 + 0.5 * (1 - 0.4 / 0.9))

    def test_dominant_spurious_weight(self):
        clf = LinearSigmoidClassifier(1.0, 2.0)
        acc = toy_true_accuracy(clf, make_config(p_spr_target=0.0), Role.TARGET)
        assert acc == 0.0

    def test_out_of_scope(self):
        with pytest.raises(OutOfTheoremScope):
            toy_true_accuracy(LinearSigmoidClassifier(-1.0, 0.5), make_config(), Role.TARGET)

    def test_matches_monte_carlo(self):
        rng = np.random.default_rng(17)
        for _ in range(6):
            gamma = rng.uniform(0.02, 0.4)
            c = gamma + rng.uniform(0.2, 1.5)
            clf = LinearSigmoidClassifier(rng.uniform(0.3, 2.0), rng.uniform(-1.5, 1.5))
            p = rng.uniform(0.0, 1.0)
            cfg = ToyConfig(gamma, c, 0.9, p, 1_000_000, int(rng.integers(1e6)))
            sample = sample_toy(cfg, Role.TARGET)
            preds = toy_predict(clf, sample)
            emp = correctness(preds).mean()
            a = toy_true_accuracy(clf, cfg, Role.TARGET)
            assert abs(a - emp) < 3 * np.sqrt(max(a * (1 - a), 1e-8) / cfg.n) + 1e-4


class TestThresholdInvariance:
    def test_agreement_group_scores_stay_above_threshold(self):
        cfg = make_config(n=100_000, seed=3)
        clf = LinearSigmoidClassifier(1.0, 0.5)
        fit_sample = sample_toy(cfg, Role.SOURCE, rng=stream_rng(cfg.seed, 10))
        preds = toy_predict(clf, fit_sample)
        model = fit_atc(score(preds, ScoreKind.MAX_CONFIDENCE), correctness(preds))
        fresh = sample_toy(cfg, Role.SOURCE, rng=stream_rng(cfg.seed, 11))
        fresh_preds = toy_predict(clf, fresh)
        s = score(fresh_preds, ScoreKind.MAX_CONFIDENCE).scores
        agreement = fresh.x_spr * (2 * fresh.y - 1) > 0
        assert int(np.sum(s[agreement] < model.threshold)) <= 3


class TestConsistencyExperiment:
    def test_no_shift_point_within_source_bound(self):
        cfg = make_config(n=20_000, p_spr_target=0.9)
        clf = LinearSigmoidClassifier(1.0, 0.5)
        rows = run_consistency_experiment(clf, cfg, [0.9])
        bound = 2 * np.sqrt(np.log(4 / 0.01) / (2 * cfg.n))
        assert abs(rows[0].atc_mc - rows[0].true_acc) <= bound

    def test_ac_deviates_while_atc_tracks(self):
        cfg = make_config(n=100_000)
        clf = LinearSigmoidClassifier(1.0, 0.5)
        rows = run_consistency_experiment(clf, cfg, [0.2])
        row = rows[0]
        # With this underconfident sigmoid, AC lands well below the truth
        # while ATC stays within the theoretical bound.
        assert abs(row.ac - row.true_acc) > 0.03
        assert abs(row.atc_mc - row.true_acc) < 0.01

    def test_nonuniform_label_marginal_preserves_bound(self):
        # subsample class 1 to shift the target label marginal to ~0.77/0.23
        cfg = make_config(n=100_000, p_spr_target=0.3, seed=5)
        clf = LinearSigmoidClassifier(1.0, 0.5)
        source = sample_toy(cfg, Role.SOURCE, rng=stream_rng(cfg.seed, 0))
        src_preds = toy_predict(clf, source)
        model = fit_atc(score(src_preds, ScoreKind.MAX_CONFIDENCE), correctness(src_preds))
        target = sample_toy(cfg, Role.TARGET, rng=stream_rng(cfg.seed, 2))
        keep = (target.y == 0) | (np.arange(target.n) % 3 == 0)
        skewed = ToySample(target.x_inv[keep], target.x_spr[keep], target.y[keep])
        preds = toy_predict(clf, skewed)
        est_err = float(np.mean(score(preds, ScoreKind.MAX_CONFIDENCE).scores < model.threshold))
        true_acc = toy_true_accuracy(clf, cfg, Role.TARGET)  # label-symmetric
        bound = np.sqrt(np.log(8 / 0.01) / (cfg.n * (1 - cfg.p_spr))) * 1.5
        assert abs((1 - est_err) - true_acc) <= bound

    def test_requires_positive_invariant_weight(self):
        with pytest.raises(OutOfTheoremScope):
            run_consistency_experiment(LinearSigmoidClassifier(0.0, 0.5), make_config(), [0.5])


class TestBiasedSupport:
    def test_overestimation(self):
        cfg = make_config(n=100_000, c_target=0.6, p_spr_target=0.5)
        clf = LinearSigmoidClassifier(1.0, 0.5)
        true_acc, atc_acc = run_biased_support_experiment(clf, cfg)
        assert atc_acc - true_acc > 0.02

    def test_full_support_reduces_to_consistency(self):
        cfg = make_config(n=100_000, c_target=1.0, p_spr_target=0.5)
        clf = LinearSigmoidClassifier(1.0, 0.5)
        true_acc, atc_acc = run_biased_support_experiment(clf, cfg)
        assert abs(atc_acc - true_acc) < 0.01

    def test_scope_checks(self):
        clf = LinearSigmoidClassifier(1.0, 0.5)
        with pytest.raises(InvalidInput):
            run_biased_support_experiment(clf, make_config())
        with pytest.raises(OutOfTheoremScope):
            run_biased_support_experiment(
                LinearSigmoidClassifier(1.0, -0.5), make_config(c_target=0.6)
            )
        with pytest.raises(OutOfTheoremScope):
            # ratio w_spr/w_inv above the target support bound
            run_biased_support_experiment(
                LinearSigmoidClassifier(1.0, 0.8), make_config(c_target=0.6)
            )


class TestMinorityMargin:
    def test_single_minority_point(self):
        sample = ToySample(
            np.array([0.37, -0.9]), np.array([-1.0, -1.0]), np.array([1, 0])
        )
        assert minority_margin(sample) == pytest.approx(0.37)

    def test_empty_minority_group(self):
        sample = ToySample(np.array([0.5]), np.array([1.0]), np.array([1]))
        with pytest.raises(EmptyGroup):
            minority_margin(sample)

    def test_margin_saturates_with_sample_size(self):
        small, large = [], []
        for seed in range(20):
            cfg_small = make_config(n=100, seed=seed)
            cfg_large = make_config(n=100_000, seed=seed)
            small.append(minority_margin(sample_toy(cfg_small, Role.SOURCE)))
            large.append(minority_margin(sample_toy(cfg_large, Role.SOURCE)))
        assert np.median(small) > np.median(large)
        # large-sample margin approaches the true margin gamma = 0.1
        assert np.median(large) == pytest.approx(0.1, abs=0.005)
