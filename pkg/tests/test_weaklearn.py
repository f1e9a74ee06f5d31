import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import best_stump_error
from smoothboost.data import LabeledDataset, ParseError
from smoothboost.weaklearn import (Stump, VotedEnsemble, ensemble_from_csv,
                                   ensemble_to_csv, predict, predict_dataset,
                                   predict_ensemble, train_stump, vote_sign,
                                   weighted_error)


def pair_ds():
    return LabeledDataset(np.array([[-1.0], [1.0]]), np.array([-1, 1]))


class TestStump:
    def test_polarity_validated(self):
        with pytest.raises(ValueError):
            Stump(0, 0.0, 2)

    def test_predict_above_threshold(self):
        assert predict(Stump(0, 0.0, 1), np.array([1.0])) == 1
        assert predict(Stump(0, 0.0, -1), np.array([1.0])) == -1

    def test_boundary_is_strict(self):
        # value == threshold falls on the -polarity side
        assert predict(Stump(0, 0.0, 1), np.array([0.0])) == -1

    def test_dimension_checked(self):
        with pytest.raises(ValueError):
            predict(Stump(3, 0.0, 1), np.array([1.0]))


class TestEnsemble:
    def test_majority(self):
        members = [Stump(0, -2.0, 1), Stump(0, -2.0, 1), Stump(0, -2.0, -1)]
        assert predict_ensemble(VotedEnsemble(members), np.array([0.0])) == 1

    def test_tie_goes_positive(self):
        members = [Stump(0, -2.0, 1), Stump(0, -2.0, -1)]
        assert predict_ensemble(VotedEnsemble(members), np.array([0.0])) == 1

    def test_single_member(self):
        e = VotedEnsemble([Stump(0, 0.5, 1)])
        assert predict_ensemble(e, np.array([0.0])) == -1

    def test_alpha_weighting(self):
        members = [Stump(0, -2.0, 1), Stump(0, -2.0, -1)]
        e = VotedEnsemble(members, alphas=np.array([1.0, 3.0]))
        assert predict_ensemble(e, np.array([0.0])) == -1

    def test_vote_sign_zero(self):
        assert vote_sign(np.array([0.0, -0.5, 2.0])).tolist() == [1, -1, 1]


class TestWeightedError:
    def test_perfect(self):
        ds = pair_ds()
        assert weighted_error(Stump(0, 0.0, 1), ds, np.array([0.5, 0.5])) == 0.0

    def test_constant_on_balanced(self):
        ds = pair_ds()
        # threshold -inf makes the stump constant +1
        assert weighted_error(Stump(0, -np.inf, 1), ds, np.array([0.5, 0.5])) == 0.5

    def test_weighted_sum(self):
        X = np.zeros((4, 1))
        X[:, 0] = [1, -1, 1, -1]
        y = np.array([-1, -1, -1, -1])
        w = np.array([0.5, 0.3, 0.1, 0.1])
        # stump +1 above 0: mistakes on examples 0 and 2 (weights 0.5, 0.1)
        assert weighted_error(Stump(0, 0.0, 1), LabeledDataset(X, y), w) == pytest.approx(0.6)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            weighted_error(Stump(0, 0.0, 1), pair_ds(), np.array([1.0]))


class TestTrainStump:
    def test_separable_pair(self):
        stump = train_stump(pair_ds(), np.array([0.5, 0.5]))
        assert stump == Stump(0, 0.0, 1)

    def test_degenerate_weight(self):
        stump = train_stump(pair_ds(), np.array([1.0, 0.0]))
        assert weighted_error(stump, pair_ds(), np.array([1.0, 0.0])) == 0.0

    def test_all_zero_weights_rejected(self):
        with pytest.raises(ValueError):
            train_stump(pair_ds(), np.zeros(2))

    def test_empty_dataset_rejected(self):
        ds = LabeledDataset(np.zeros((0, 1)), np.zeros(0, dtype=int))
        with pytest.raises(ValueError):
            train_stump(ds, np.zeros(0))

    def test_matches_brute_force_small(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            X = rng.choice([-1.0, 0.0, 1.0], size=(n, 3))
            y = rng.choice([-1, 1], size=n)
            w = rng.random(n)
            stump = train_stump(LabeledDataset(X, y), w)
            got = weighted_error(stump, LabeledDataset(X, y), w)
            want = best_stump_error(X, y, w)
            assert got == pytest.approx(want, abs=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 4))
        y = rng.choice([-1, 1], size=20)
        w = rng.random(20)
        ds = LabeledDataset(X, y)
        s1 = train_stump(ds, w)
        s2 = train_stump(ds, 7.5 * w)
        assert s1 == s2
        assert weighted_error(s2, ds, 7.5 * w) == pytest.approx(
            7.5 * weighted_error(s1, ds, w))

    def test_tie_breaking_prefers_low_feature(self):
        # two identical features: both admit a zero-error stump
        X = np.array([[-1.0, -1.0], [1.0, 1.0]])
        stump = train_stump(LabeledDataset(X, np.array([-1, 1])), np.array([0.5, 0.5]))
        assert stump.feature == 0

    def test_tie_breaking_prefers_positive_polarity(self):
        # all-same-label data: any stump predicting +1 everywhere is optimal
        X = np.array([[0.0], [1.0]])
        stump = train_stump(LabeledDataset(X, np.array([1, 1])), np.array([0.5, 0.5]))
        assert stump.polarity == 1
        assert stump.threshold == -np.inf

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_never_beaten_by_random_stump(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 33))
        X = rng.choice([-1.0, 1.0], size=(n, 2))
        y = rng.choice([-1, 1], size=n)
        w = rng.random(n)
        ds = LabeledDataset(X, y)
        best = weighted_error(train_stump(ds, w), ds, w)
        rival = Stump(int(rng.integers(0, 2)), float(rng.normal()),
                      int(rng.choice([-1, 1])))
        assert best <= weighted_error(rival, ds, w) + 1e-12


class TestEnsembleCsv:
    def test_roundtrip_plain(self, tmp_path):
        e = VotedEnsemble([Stump(0, 0.123456789012345, 1), Stump(2, -np.inf, -1)])
        path = tmp_path / "e.csv"
        ensemble_to_csv(e, path)
        back = ensemble_from_csv(path)
        assert back.members == e.members
        assert back.alphas is None

    def test_roundtrip_alphas(self, tmp_path):
        e = VotedEnsemble([Stump(1, 0.5, -1)], alphas=np.array([0.7]))
        path = tmp_path / "e.csv"
        ensemble_to_csv(e, path)
        back = ensemble_from_csv(path)
        assert back.members == e.members
        assert np.array_equal(back.alphas, e.alphas)

    def test_mixed_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,0.5,1\n1,0.5,1,0.3\n")
        with pytest.raises(ParseError):
            ensemble_from_csv(path)


def test_predict_dataset_matches_predict():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(10, 3))
    ds = LabeledDataset(X, rng.choice([-1, 1], size=10))
    stump = Stump(1, 0.2, -1)
    vec = predict_dataset(stump, ds)
    assert vec.tolist() == [predict(stump, x) for x in X]
