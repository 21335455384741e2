import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from botsage import (
    DataError,
    Dataset,
    EmbeddingStore,
    EmptyInputError,
    MissingMetadataError,
    NormalizationStats,
    UserRecord,
    build_fused_matrix,
    extract_auxiliary,
    fallback_featurize,
    fuse,
    normalize_auxiliary,
    pool_tweets,
    read_fused,
    write_fused,
)
from botsage.features import FusedMatrix


class TestExtractAuxiliary:
    def test_fixed_order(self):
        u = UserRecord(user_id="u", aux=(100, 50, 2000, 10))
        assert extract_auxiliary(u) == (100.0, 50.0, 2000.0, 10.0)

    def test_all_zero(self):
        u = UserRecord(user_id="u", aux=(0, 0, 0, 0))
        assert extract_auxiliary(u) == (0.0, 0.0, 0.0, 0.0)

    def test_missing_metadata(self):
        with pytest.raises(MissingMetadataError):
            extract_auxiliary(UserRecord(user_id="u"))


class TestNormalizeAuxiliary:
    def test_constant_column_maps_to_zero(self):
        raw = np.full((5, 4), 7.0)
        normed, stats = normalize_auxiliary(raw)
        assert np.allclose(normed, 0.0)
        assert np.all(stats.std == 1.0)

    def test_zero_under_identity_stats(self):
        stats = NormalizationStats(mode="log-z", mean=np.zeros(1), std=np.ones(1))
        normed, _ = normalize_auxiliary(np.array([[0.0]]), stats=stats)
        assert normed[0, 0] == 0.0

    def test_e_minus_one_under_identity_stats(self):
        stats = NormalizationStats(mode="log-z", mean=np.zeros(1), std=np.ones(1))
        normed, _ = normalize_auxiliary(np.array([[math.e - 1.0]]), stats=stats)
        assert normed[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_fitted_stats_standardize_fitting_rows(self):
        rng = np.random.default_rng(3)
        raw = rng.integers(0, 10000, size=(200, 4)).astype(float)
        normed, _ = normalize_auxiliary(raw)
        assert np.abs(normed.mean(axis=0)).max() < 1e-9
        assert np.abs(normed.std(axis=0) - 1.0).max() < 1e-6

    def test_none_mode_passthrough(self):
        raw = np.array([[1.0, 2.0, 3.0, 4.0]])
        normed, stats = normalize_auxiliary(raw, mode="none")
        assert np.array_equal(normed, raw)
        assert stats.mode == "none"

    def test_negative_counts_rejected(self):
        with pytest.raises(DataError):
            normalize_auxiliary(np.array([[-1.0]]))


class TestPoolTweets:
    def test_max_pooling(self):
        assert np.array_equal(pool_tweets(np.array([[1, 5], [4, 2]]), "max"), [4, 5])

    def test_avg_pooling(self):
        assert np.array_equal(pool_tweets(np.array([[1, 1], [3, 3]]), "avg"), [2, 2])

    def test_singleton_idempotent_both_modes(self):
        row = np.array([[7.0, -2.0]])
        assert np.array_equal(pool_tweets(row, "max"), [7, -2])
        assert np.array_equal(pool_tweets(row, "avg"), [7, -2])

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            pool_tweets(np.zeros((0, 3)))

    @given(
        arrays(np.float64, (5, 3), elements=st.floats(-100, 100)),
        st.permutations(range(5)),
    )
    @settings(max_examples=50, deadline=None)
    def test_permutation_invariance(self, matrix, perm):
        shuffled = matrix[list(perm)]
        for mode in ("max", "avg"):
            assert np.allclose(pool_tweets(matrix, mode), pool_tweets(shuffled, mode))

    @given(arrays(np.float64, (4, 3), elements=st.floats(-100, 100)))
    @settings(max_examples=50, deadline=None)
    def test_max_dominates_avg(self, matrix):
        assert np.all(pool_tweets(matrix, "max") >= pool_tweets(matrix, "avg") - 1e-12)


class TestFuse:
    def test_concatenation_order(self):
        assert np.array_equal(fuse(np.array([1.0, 2.0]), np.array([3, 4, 5, 6])),
                              [1, 2, 3, 4, 5, 6])

    def test_without_aux_unchanged(self):
        v = np.array([1.0, 2.0])
        assert np.array_equal(fuse(v), v)

    def test_zeros(self):
        assert np.array_equal(fuse(np.zeros(2), np.zeros(4)), np.zeros(6))

    @given(
        arrays(np.float64, 4, elements=st.floats(-50, 50)),
        arrays(np.float64, 4, elements=st.floats(-50, 50)),
    )
    @settings(max_examples=50, deadline=None)
    def test_projection_recovers_both_inputs(self, v, a):
        fused = fuse(v, a)
        assert np.array_equal(fused[:4], v)
        assert np.array_equal(fused[4:], a)


class TestFallbackFeaturizer:
    def test_identical_tweets_identical_rows(self):
        rows = fallback_featurize(["same words here", "same words here"], d=16, seed=1)
        assert np.array_equal(rows[0], rows[1])

    def test_pure_bit_identical(self):
        a = fallback_featurize(["one two", "three"], d=32, seed=9)
        b = fallback_featurize(["one two", "three"], d=32, seed=9)
        assert a.tobytes() == b.tobytes()

    def test_nonzero_rows_unit_norm(self):
        rows = fallback_featurize(["a few tokens", "more tokens here", ""], d=8, seed=2)
        norms = np.linalg.norm(rows, axis=1)
        assert norms[0] == pytest.approx(1.0, abs=1e-6)
        assert norms[1] == pytest.approx(1.0, abs=1e-6)

    def test_empty_tweet_zero_row(self):
        rows = fallback_featurize([""], d=5, seed=0)
        assert np.array_equal(rows, np.zeros((1, 5), dtype=np.float32))

    def test_seed_changes_output(self):
        a = fallback_featurize(["hello world"], d=64, seed=0)
        b = fallback_featurize(["hello world"], d=64, seed=1)
        assert not np.array_equal(a, b)

    def test_case_and_whitespace_normalized(self):
        a = fallback_featurize(["Hello   WORLD"], d=16, seed=4)
        b = fallback_featurize(["hello world"], d=16, seed=4)
        assert np.array_equal(a, b)


def small_dataset(with_aux=True):
    users = []
    rng = np.random.default_rng(0)
    store = EmbeddingStore(dim=4)
    for i in range(3):
        aux = (10 * (i + 1), 5, 100, 2) if with_aux else None
        users.append(UserRecord(user_id=f"u{i}", tweets=("a", "b"), aux=aux, label=i % 2))
        store.add(f"u{i}", rng.normal(size=(2, 4)).astype(np.float32))
    return Dataset(users=tuple(users)), store


class TestBuildFusedMatrix:
    def test_shape_with_aux(self):
        ds, store = small_dataset(with_aux=True)
        fm, stats = build_fused_matrix(ds, store)
        assert (fm.rows, fm.cols) == (3, 8)
        assert fm.aux_present and stats is not None

    def test_shape_without_aux(self):
        ds, store = small_dataset(with_aux=False)
        fm, stats = build_fused_matrix(ds, store)
        assert (fm.rows, fm.cols) == (3, 4)
        assert not fm.aux_present and stats is None

    def test_identical_tweets_max_row_equals_embedding_plus_aux(self):
        store = EmbeddingStore(dim=3)
        row = np.array([0.5, -1.0, 2.0], dtype=np.float32)
        store.add("u0", np.vstack([row, row, row]))
        ds = Dataset(users=(UserRecord(user_id="u0", tweets=("t",) * 3, aux=(1, 2, 3, 4)),))
        fm, stats = build_fused_matrix(ds, store, mode="max")
        assert np.allclose(fm.data[0, :3], row.astype(np.float64))
        expected_aux = stats.apply(np.array([[1.0, 2.0, 3.0, 4.0]]))[0]
        assert np.array_equal(fm.data[0, 3:], expected_aux)

    def test_missing_user_named_in_error(self):
        ds, store = small_dataset()
        del store.entries["u1"]
        with pytest.raises(DataError, match="u1"):
            build_fused_matrix(ds, store)

    def test_zero_tweet_user_named_in_error(self):
        ds, store = small_dataset()
        store.entries["u2"] = np.zeros((0, 4), dtype=np.float32)
        with pytest.raises(DataError, match="u2"):
            build_fused_matrix(ds, store)

    def test_aux_drop_removes_one_column(self):
        ds, store = small_dataset(with_aux=True)
        fm, stats = build_fused_matrix(ds, store, aux_drop=2)
        assert fm.cols == 7 and fm.n_aux == 3
        assert stats.n_columns == 3

    def test_inference_reuses_training_stats(self):
        ds, store = small_dataset(with_aux=True)
        _, stats = build_fused_matrix(ds, store)
        fm2, stats2 = build_fused_matrix(ds, store, stats=stats)
        assert stats2 is stats
        fm1, _ = build_fused_matrix(ds, store)
        assert np.array_equal(fm1.data, fm2.data)


class TestFusedRoundTrip:
    def test_rgbf_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        fm = FusedMatrix(data=rng.normal(size=(7, 6)), tweet_dim=4, n_aux=2)
        path = tmp_path / "fused.rgbf"
        write_fused(fm, path)
        back = read_fused(path)
        assert back.tweet_dim == 4 and back.n_aux == 2
        assert back.data.tobytes() == fm.data.tobytes()
