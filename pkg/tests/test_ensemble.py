import math

import numpy as np
import pytest

from baitline.corpus import Label
from baitline.ensemble import EnsembleConfig, ensemble_predict, fit_weights

CB = Label.CLICKBAIT
NCB = Label.NON_CLICKBAIT

REFERENCE_WEIGHTS = (0.19, 0.19, 0.22, 0.19, 0.21)
MODEL_IDS = ("rf", "svm", "bilstm", "encoder-head", "contrastive")


class TestFitWeights:
    def test_all_correct_vs_all_wrong(self):
        golds = [CB, NCB, CB]
        config = fit_weights(["good", "bad"], [list(golds), [NCB, CB, NCB]], golds)
        assert config.weights == (1.0, 0.0)

    def test_reference_vector_from_matching_accuracies(self):
        golds = [CB] * 50 + [NCB] * 50
        preds = []
        for accuracy in (0.76, 0.76, 0.88, 0.76, 0.84):
            n_correct = round(accuracy * 100)
            pred = list(golds[:n_correct]) + [
                NCB if g is CB else CB for g in golds[n_correct:]
            ]
            preds.append(pred)
        config = fit_weights(MODEL_IDS, preds, golds)
        assert config.weights == pytest.approx(REFERENCE_WEIGHTS, abs=1e-12)
        assert sum(config.weights) == pytest.approx(1.0, abs=1e-9)

    def test_equal_accuracies_uniform(self):
        golds = [CB, NCB]
        config = fit_weights(["a", "b", "c"], [[CB, CB]] * 3, golds)
        assert config.weights == pytest.approx((1 / 3,) * 3, abs=1e-12)

    def test_empty_validation_rejected(self):
        with pytest.raises(ValueError):
            fit_weights(["a"], [[]], [])

    def test_misaligned_preds_rejected(self):
        with pytest.raises(ValueError):
            fit_weights(["a"], [[CB]], [CB, NCB])


def reference_config():
    return EnsembleConfig(model_ids=MODEL_IDS, weights=REFERENCE_WEIGHTS)


class TestEnsemblePredict:
    def test_unanimous_high(self):
        label, combined = ensemble_predict([0.9] * 5, reference_config())
        assert label is CB
        assert combined == pytest.approx(0.9, abs=1e-12)

    def test_hand_computed_combination(self):
        label, combined = ensemble_predict([1, 1, 0, 0, 0], reference_config())
        assert combined == pytest.approx(0.38, abs=1e-12)
        assert label is NCB

    def test_boundary_inclusive_clickbait(self):
        config = EnsembleConfig(model_ids=("a", "b"), weights=(0.5, 0.5))
        label, combined = ensemble_predict([0.5, 0.5], config)
        assert combined == 0.5
        assert label is CB

    def test_score_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            ensemble_predict([1.2, 0, 0, 0, 0], reference_config())

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ensemble_predict([0.5, 0.5], reference_config())

    def test_convex_combination_bounds(self):
        rng = np.random.default_rng(0)
        config = reference_config()
        for _ in range(200):
            scores = rng.random(5).tolist()
            _, combined = ensemble_predict(scores, config)
            assert min(scores) - 1e-12 <= combined <= max(scores) + 1e-12

    def test_unanimous_extremes_preserved(self):
        config = reference_config()
        assert ensemble_predict([1.0] * 5, config) == (CB, pytest.approx(1.0))
        label, combined = ensemble_predict([0.0] * 5, config)
        assert label is NCB
        assert combined == 0.0

    def test_matches_brute_force_recomputation(self):
        rng = np.random.default_rng(1)
        config = reference_config()
        for _ in range(300):
            scores = rng.random(5).tolist()
            label, combined = ensemble_predict(scores, config)
            expected = math.fsum(w * s for w, s in zip(config.weights, scores))
            assert abs(combined - expected) <= 1e-12
            assert label is (CB if expected >= 0.5 else NCB)

    def test_invariant_under_weight_rescaling(self):
        rng = np.random.default_rng(2)
        raw = (0.76, 0.76, 0.88, 0.76, 0.84)
        total = sum(raw)
        normalized = EnsembleConfig(MODEL_IDS, tuple(w / total for w in raw))
        scaled_raw = tuple(3.7 * w for w in raw)
        scaled_total = sum(scaled_raw)
        rescaled = EnsembleConfig(MODEL_IDS, tuple(w / scaled_total for w in scaled_raw))
        for _ in range(100):
            scores = rng.random(5).tolist()
            label_a, _ = ensemble_predict(scores, normalized)
            label_b, _ = ensemble_predict(scores, rescaled)
            assert label_a is label_b


class TestEnsembleConfig:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            EnsembleConfig(model_ids=("a", "b"), weights=(0.6, 0.6))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            EnsembleConfig(model_ids=("a",), weights=(0.5, 0.5))

    def test_save_load_round_trip(self, tmp_path):
        config = reference_config()
        path = tmp_path / "ensemble.json"
        config.save(path)
        loaded = EnsembleConfig.load(path)
        assert loaded == config
