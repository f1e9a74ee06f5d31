import numpy as np
import pytest

from smoothboost.data import (LabeledDataset, ParseError, dataset_to_csv,
                              dataset_to_libsvm, gen_long_servedio,
                              inject_label_noise, parse_libsvm, partition,
                              split_train_test)


def small_ds():
    return LabeledDataset(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0]]),
                          np.array([1, -1, 1, -1]))


class TestLabeledDataset:
    def test_validates_labels(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((2, 1)), np.array([0, 1]))

    def test_validates_shape(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((2, 1)), np.array([1, 1, -1]))

    def test_arrays_frozen(self):
        ds = small_ds()
        with pytest.raises(ValueError):
            ds.features[0, 0] = 5.0

    def test_dim_and_len(self):
        ds = small_ds()
        assert len(ds) == 4
        assert ds.dim == 2


class TestParseLibsvm:
    def test_basic(self):
        ds = parse_libsvm("+1 1:1 3:-1\n-1 2:1")
        assert len(ds) == 2
        assert ds.dim == 3
        assert ds.features.tolist() == [[1, 0, -1], [0, 1, 0]]
        assert ds.labels.tolist() == [1, -1]

    def test_empty_is_error(self):
        with pytest.raises(ParseError):
            parse_libsvm("")

    def test_malformed_value_reports_line(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_libsvm("1 2:0.5x")

    def test_nonincreasing_indices_rejected(self):
        with pytest.raises(ParseError, match="increasing"):
            parse_libsvm("1 2:1 2:2")

    def test_zero_index_rejected(self):
        with pytest.raises(ParseError, match="1-based"):
            parse_libsvm("1 0:1")

    @pytest.mark.parametrize("text,expect", [
        ("0 1:1\n1 1:2", [-1, 1]),
        ("1 1:1\n2 1:2", [-1, 1]),
        ("-1 1:1\n+1 1:2", [-1, 1]),
    ])
    def test_label_alphabets(self, text, expect):
        assert parse_libsvm(text).labels.tolist() == expect

    def test_mixed_alphabet_rejected(self):
        with pytest.raises(ParseError, match="alphabet"):
            parse_libsvm("-1 1:1\n2 1:2")

    def test_roundtrip_through_libsvm_file(self, tmp_path):
        ds = gen_long_servedio(50, seed=3)
        path = tmp_path / "d.libsvm"
        dataset_to_libsvm(ds, path)
        back = parse_libsvm(path.read_text())
        # -1 coordinates are written explicitly, so nothing is lost to sparsity
        assert np.array_equal(back.features, ds.features)
        assert np.array_equal(back.labels, ds.labels)


class TestLongServedio:
    def test_shape_and_alphabet(self):
        ds = gen_long_servedio(500, seed=0)
        assert ds.dim == 21
        assert set(np.unique(ds.features)) <= {-1.0, 1.0}

    def test_n_zero_rejected(self):
        with pytest.raises(ValueError):
            gen_long_servedio(0, seed=0)

    def test_determinism(self):
        a = gen_long_servedio(100, seed=9)
        b = gen_long_servedio(100, seed=9)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_branch_structure(self):
        ds = gen_long_servedio(2000, seed=1)
        agree = ds.features * ds.labels[:, None]  # +1 where coordinate = y
        head = np.sum(agree[:, :11] == 1, axis=1)
        tail = np.sum(agree[:, 11:] == 1, axis=1)
        all_y = (head == 11) & (tail == 10)
        first_block = (head == 11) & (tail == 0)
        mixture = (head == 5) & (tail == 6)
        assert np.all(all_y | first_block | mixture)

    def test_branch_frequencies(self):
        ds = gen_long_servedio(100_000, seed=2)
        agree = ds.features * ds.labels[:, None]
        head = np.sum(agree[:, :11] == 1, axis=1)
        tail = np.sum(agree[:, 11:] == 1, axis=1)
        p_all = np.mean((head == 11) & (tail == 10))
        p_first = np.mean((head == 11) & (tail == 0))
        p_mix = np.mean((head == 5) & (tail == 6))
        assert abs(p_all - 0.25) < 0.01
        assert abs(p_first - 0.25) < 0.01
        assert abs(p_mix - 0.50) < 0.01

    def test_noiseless_majority_separates(self):
        # the all-coordinate majority vote is correct on every clean example
        ds = gen_long_servedio(10_000, seed=4)
        vote = np.sign(np.sum(ds.features, axis=1))
        assert np.array_equal(vote, ds.labels)


class TestNoise:
    def test_rate_zero_identity(self):
        ds = small_ds()
        out = inject_label_noise(ds, 0.0, seed=1)
        assert np.array_equal(out.labels, ds.labels)

    def test_rate_one_negates(self):
        ds = small_ds()
        out = inject_label_noise(ds, 1.0, seed=1)
        assert np.array_equal(out.labels, -ds.labels)

    def test_bad_rate(self):
        with pytest.raises(ValueError):
            inject_label_noise(small_ds(), 1.5, seed=0)

    def test_flip_count_concentrates(self):
        ds = gen_long_servedio(100_000, seed=5)
        out = inject_label_noise(ds, 0.1, seed=6)
        flips = int(np.sum(out.labels != ds.labels))
        sigma = np.sqrt(100_000 * 0.1 * 0.9)
        assert abs(flips - 10_000) < 3 * sigma

    def test_features_untouched(self):
        ds = small_ds()
        out = inject_label_noise(ds, 0.5, seed=2)
        assert np.array_equal(out.features, ds.features)


class TestSplit:
    def test_sizes(self):
        ds = gen_long_servedio(10, seed=0)
        train, test = split_train_test(ds, 0.8, seed=0)
        assert (len(train), len(test)) == (8, 2)

    def test_union_preserved(self):
        ds = gen_long_servedio(30, seed=1)
        train, test = split_train_test(ds, 0.5, seed=3)
        merged = np.concatenate([train.features, test.features])
        assert np.array_equal(np.sort(merged, axis=0), np.sort(ds.features, axis=0))

    def test_determinism(self):
        ds = gen_long_servedio(40, seed=1)
        a = split_train_test(ds, 0.5, seed=7)[0]
        b = split_train_test(ds, 0.5, seed=7)[0]
        assert np.array_equal(a.features, b.features)

    def test_degenerate_frac(self):
        ds = small_ds()
        for frac in (0.0, 1.0):
            with pytest.raises(ValueError):
                split_train_test(ds, frac, seed=0)


class TestPartition:
    def test_k1_identity(self):
        ds = small_ds()
        shards = partition(ds, 1)
        assert shards.k == 1
        assert np.array_equal(shards.parts[0].features, ds.features)

    def test_uniform_sizes(self):
        ds = gen_long_servedio(16, seed=0)
        shards = partition(ds, 4, "uniform", seed=1)
        assert [len(p) for p in shards.parts] == [4, 4, 4, 4]

    def test_by_label_skews(self):
        X = np.zeros((10, 1))
        y = np.array([1, -1] * 5)
        shards = partition(LabeledDataset(X, y), 2, "by-label")
        assert set(shards.parts[0].labels) == {-1}
        assert set(shards.parts[1].labels) == {1}

    def test_round_robin(self):
        ds = gen_long_servedio(7, seed=0)
        shards = partition(ds, 3, "round-robin")
        assert [idx.tolist() for idx in shards.indices] == [[0, 3, 6], [1, 4], [2, 5]]

    @pytest.mark.parametrize("strategy", ["uniform", "by-label", "round-robin"])
    def test_multiset_preserved(self, strategy):
        ds = gen_long_servedio(23, seed=2)
        shards = partition(ds, 5, strategy, seed=4)
        rebuilt = np.empty_like(ds.features)
        labels = np.empty_like(ds.labels)
        for part, idx in zip(shards.parts, shards.indices):
            rebuilt[idx] = part.features
            labels[idx] = part.labels
        assert np.array_equal(rebuilt, ds.features)
        assert np.array_equal(labels, ds.labels)

    def test_k_exceeding_n_rejected(self):
        with pytest.raises(ValueError):
            partition(small_ds(), 5)

    def test_flatten_inverts_sharding(self):
        ds = gen_long_servedio(11, seed=3)
        shards = partition(ds, 3, "uniform", seed=8)
        values = [p.labels.astype(float) for p in shards.parts]
        assert np.array_equal(shards.flatten(values), ds.labels.astype(float))


def test_csv_export_header(tmp_path):
    ds = small_ds()
    path = tmp_path / "d.csv"
    dataset_to_csv(ds, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "label,f1,f2"
    assert lines[1] == "1,1,0"
    assert len(lines) == 5
