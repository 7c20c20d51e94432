import itertools

import numpy as np
import pytest

from conftest import boolean_hamming_optimum
from topiclink.errors import ArgumentError, DataError
from topiclink.linkmodels import (
    LMFModel,
    LMFParams,
    _lmf_gradients,
    bnmf,
    bnmfk_fit,
    boolean_product,
    ensemble_fit,
    lmf_fit,
    lmf_loss,
    lmf_predict,
    sigmoid,
)
from topiclink.masked import ONE, UNKNOWN, ZERO, MaskedBinaryMatrix


def masked_from_array(arr):
    return MaskedBinaryMatrix(np.asarray(arr, dtype=np.int8))


def zero_model(n, m, k, lam=0.0):
    return LMFModel(
        W=np.zeros((n, k)),
        H=np.zeros((k, m)),
        b_r=np.zeros(n),
        b_c=np.zeros(m),
        lam=lam,
        rank=k,
    )


class TestSigmoid:
    def test_zero_is_half(self):
        assert sigmoid(0.0) == 0.5

    def test_large_negative_stays_positive(self):
        value = sigmoid(-800.0)
        assert 0.0 < value <= 1e-300

    def test_large_positive_stays_below_one(self):
        value = sigmoid(800.0)
        assert 1.0 - 1e-12 < value < 1.0

    def test_matches_high_precision_reference(self):
        import mpmath

        mpmath.mp.dps = 50
        for x in (1.0, -3.5, 0.25, 17.0):
            expected = float(1 / (1 + mpmath.exp(-mpmath.mpf(x))))
            assert sigmoid(x) == pytest.approx(expected, rel=1e-14)

    def test_vectorized_matches_scalar(self):
        xs = np.array([-5.0, -0.5, 0.0, 2.0, 30.0])
        out = sigmoid(xs)
        assert out.shape == xs.shape
        for i, x in enumerate(xs):
            assert out[i] == sigmoid(float(x))


class TestLMFPredict:
    def test_zero_logits_give_half(self):
        probs = lmf_predict(zero_model(3, 4, 2))
        assert np.allclose(probs, 0.5)

    def test_row_bias_dominates(self):
        model = zero_model(3, 4, 2)
        b_r = np.zeros(3)
        b_r[1] = 10.0
        model = LMFModel(W=model.W, H=model.H, b_r=b_r, b_c=model.b_c, lam=0.0, rank=2)
        probs = lmf_predict(model)
        assert (probs[1] > 0.9999).all()

    def test_matches_naive_triple_loop(self):
        rng = np.random.default_rng(21)
        W = rng.normal(size=(4, 2))
        H = rng.normal(size=(2, 3))
        b_r = rng.normal(size=4)
        b_c = rng.normal(size=3)
        model = LMFModel(W=W, H=H, b_r=b_r, b_c=b_c, lam=0.1, rank=2)
        probs = lmf_predict(model)
        for i in range(4):
            for j in range(3):
                logit = b_r[i] + b_c[j]
                for r in range(2):
                    logit += W[i, r] * H[r, j]
                assert probs[i, j] == pytest.approx(
                    1.0 / (1.0 + np.exp(-logit)), rel=1e-12
                )


class TestLMFLoss:
    def test_all_unknown_no_regularizer_is_zero(self):
        X = masked_from_array(np.full((2, 2), UNKNOWN))
        assert lmf_loss(zero_model(2, 2, 1, lam=0.0), X) == 0.0

    def test_pure_regularization_term(self):
        X = masked_from_array(np.full((1, 1), UNKNOWN))
        model = LMFModel(
            W=np.array([[2.0]]),
            H=np.zeros((1, 1)),
            b_r=np.zeros(1),
            b_c=np.zeros(1),
            lam=0.5,
            rank=1,
        )
        assert lmf_loss(model, X) == pytest.approx(2.0)

    def test_single_observed_cell_at_zero_logit(self):
        cells = np.full((2, 2), UNKNOWN, dtype=np.int8)
        cells[0, 0] = ONE
        X = masked_from_array(cells)
        assert lmf_loss(zero_model(2, 2, 1), X) == pytest.approx(-np.log(0.5))

    def test_dimension_mismatch_rejected(self):
        X = masked_from_array(np.zeros((3, 3), dtype=np.int8))
        with pytest.raises(ArgumentError):
            lmf_loss(zero_model(2, 2, 1), X)


class TestLMFFit:
    def test_identity_pattern_separates_diagonal(self):
        cells = np.zeros((6, 6), dtype=np.int8)
        np.fill_diagonal(cells, ONE)
        X = masked_from_array(cells)
        model = lmf_fit(X, k=3, lam=0.01, learning_rate=0.05, epochs=500, seed=0)
        probs = lmf_predict(model)
        diag = np.eye(6, dtype=bool)
        correct = (probs[diag] > 0.5).sum() + (probs[~diag] < 0.5).sum()
        assert correct >= 34

    def test_gradients_match_central_finite_differences(self):
        rng = np.random.default_rng(9)
        cells = rng.integers(0, 2, size=(5, 4)).astype(np.int8)
        cells[rng.random((5, 4)) < 0.25] = UNKNOWN
        X = masked_from_array(cells)
        lam = 0.05
        k = 2
        W = rng.normal(0, 0.5, (5, k))
        H = rng.normal(0, 0.5, (k, 4))
        b_r = rng.normal(0, 0.5, 5)
        b_c = rng.normal(0, 0.5, 4)
        mask = X.known_mask().astype(np.float64)
        values = X.values_filled(0.0)
        analytic = _lmf_gradients(W, H, b_r, b_c, values, mask, lam)

        def loss_at(params):
            model = LMFModel(W=params[0], H=params[1], b_r=params[2], b_c=params[3],
                             lam=lam, rank=k)
            return lmf_loss(model, X)

        step = 1e-5
        params = [W, H, b_r, b_c]
        for block in range(4):
            numeric = np.zeros_like(params[block])
            flat = params[block].ravel()
            num_flat = numeric.ravel()
            for idx in range(flat.size):
                orig = flat[idx]
                flat[idx] = orig + step
                up = loss_at(params)
                flat[idx] = orig - step
                down = loss_at(params)
                flat[idx] = orig
                num_flat[idx] = (up - down) / (2 * step)
            rel = np.linalg.norm(analytic[block] - numeric) / np.linalg.norm(numeric)
            assert rel < 1e-5

    def test_single_epoch_runs_one_update(self):
        cells = np.array([[ONE, ZERO], [ZERO, ONE]], dtype=np.int8)
        X = masked_from_array(cells)
        model = lmf_fit(X, k=1, lam=0.01, learning_rate=0.01, epochs=1, seed=4)
        assert len(model.loss_trace) == 2
        assert model.loss_trace[1] <= model.loss_trace[0]

    def test_loss_non_increasing_at_small_learning_rate(self):
        rng = np.random.default_rng(6)
        cells = rng.integers(0, 2, size=(8, 7)).astype(np.int8)
        X = masked_from_array(cells)
        model = lmf_fit(X, k=2, lam=0.01, learning_rate=0.01, epochs=200, seed=6)
        assert (np.diff(model.loss_trace) <= 1e-9).all()

    def test_final_loss_not_above_first(self):
        rng = np.random.default_rng(15)
        cells = rng.integers(0, 2, size=(10, 6)).astype(np.int8)
        X = masked_from_array(cells)
        model = lmf_fit(X, k=3, seed=15)
        assert model.loss_trace[-1] <= model.loss_trace[0]

    def test_all_unknown_rejected(self):
        X = masked_from_array(np.full((3, 3), UNKNOWN))
        with pytest.raises(DataError):
            lmf_fit(X, k=1)

    def test_deterministic(self):
        cells = np.eye(4, dtype=np.int8)
        X = masked_from_array(cells)
        a = lmf_fit(X, k=2, seed=3, epochs=50)
        b = lmf_fit(X, k=2, seed=3, epochs=50)
        assert np.array_equal(a.W, b.W)
        assert np.array_equal(a.b_c, b.b_c)


class TestBooleanProduct:
    def test_identity(self):
        eye = np.eye(2, dtype=np.uint8)
        assert np.array_equal(boolean_product(eye, eye), eye)

    def test_or_absorbs_multiplicity(self):
        W = np.array([[1, 1]], dtype=np.uint8)
        H = np.array([[1], [1]], dtype=np.uint8)
        result = boolean_product(W, H)
        assert result[0, 0] == 1

    def test_matches_clipped_integer_product(self):
        rng = np.random.default_rng(12)
        W = rng.integers(0, 2, size=(5, 3))
        H = rng.integers(0, 2, size=(3, 4))
        expected = np.minimum(W @ H, 1)
        assert np.array_equal(boolean_product(W, H), expected)

    def test_non_binary_rejected(self):
        with pytest.raises(ArgumentError):
            boolean_product(np.array([[2, 0]]), np.array([[1], [0]]))


class TestBNMF:
    def test_planted_boolean_factors_reach_zero_error(self):
        rng = np.random.default_rng(1)
        W0 = rng.integers(0, 2, size=(8, 2)).astype(np.uint8)
        W0[:, 0] |= ~W0.any(axis=1)  # avoid all-zero rows
        H0 = rng.integers(0, 2, size=(2, 6)).astype(np.uint8)
        H0[0] |= ~H0.any(axis=0)
        T = masked_from_array(boolean_product(W0, H0))
        model = bnmf(T, k=2, seed=1)
        assert model.hamming_error == 0
        rec = boolean_product(model.W_bool, model.H_bool)
        assert np.array_equal(rec, T.cells)

    def test_all_ones_rank_one(self):
        T = masked_from_array(np.ones((3, 3), dtype=np.int8))
        model = bnmf(T, k=1, seed=0)
        assert model.hamming_error == 0
        assert model.W_bool.all() and model.H_bool.all()

    def test_identity_matches_exhaustive_search(self):
        T = np.eye(3, dtype=np.int8)
        model = bnmf(masked_from_array(T), k=3, seed=2)
        assert model.hamming_error == boolean_hamming_optimum(T, 3) == 0

    def test_matches_exhaustive_optimum_on_all_2x2(self):
        for bits in itertools.product((0, 1), repeat=4):
            T = np.array(bits, dtype=np.int8).reshape(2, 2)
            for k in (1, 2):
                model = bnmf(masked_from_array(T), k=k, seed=5)
                assert model.hamming_error == boolean_hamming_optimum(T, k)

    def test_unknown_cells_excluded_from_error(self):
        cells = np.array([[ONE, UNKNOWN], [ZERO, ONE]], dtype=np.int8)
        T = masked_from_array(cells)
        model = bnmf(T, k=2, seed=3)
        rec = boolean_product(model.W_bool, model.H_bool)
        observed = T.known_mask()
        assert model.hamming_error == int(((rec != T.cells) & observed).sum())

    def test_no_observed_cells_rejected(self):
        T = masked_from_array(np.full((2, 2), UNKNOWN))
        with pytest.raises(DataError):
            bnmf(T, k=1, seed=0)

    def test_hamming_recomputable(self):
        rng = np.random.default_rng(8)
        T = masked_from_array(rng.integers(0, 2, size=(6, 5)).astype(np.int8))
        model = bnmf(T, k=2, seed=8)
        rec = boolean_product(model.W_bool, model.H_bool)
        assert model.hamming_error == int((rec != T.cells).sum())


class TestBNMFkFit:
    def test_planted_rank_two_blocks(self):
        cells = np.zeros((30, 20), dtype=np.int8)
        cells[:15, :10] = 1
        cells[15:, 10:] = 1
        T = masked_from_array(cells)
        model = bnmfk_fit(T, candidates=range(1, 6), ensemble_size=8, seed=7)
        assert model.rank == 2
        assert model.hamming_error == 0

    def test_all_ones_selects_rank_one(self):
        T = masked_from_array(np.ones((8, 8), dtype=np.int8))
        model = bnmfk_fit(T, candidates=[1, 2, 3], ensemble_size=8, seed=0)
        assert model.rank == 1

    def test_rank_always_in_candidates(self):
        rng = np.random.default_rng(30)
        T = masked_from_array(rng.integers(0, 2, size=(10, 10)).astype(np.int8))
        candidates = [2, 4]
        model = bnmfk_fit(T, candidates=candidates, ensemble_size=6, seed=30)
        assert model.rank in candidates


@pytest.fixture(scope="module")
def fitted():
    cells = np.zeros((12, 10), dtype=np.int8)
    cells[:6, :5] = 1
    cells[6:, 5:] = 1
    T = masked_from_array(cells)
    return T, ensemble_fit(T, candidates=[1, 2, 3], lmf_params=LMFParams(), seed=11)


class TestEnsemble:
    def test_scores_strictly_inside_unit_interval(self, fitted):
        _, model = fitted
        assert (model.scores > 0).all() and (model.scores < 1).all()

    def test_scores_match_per_cell_recomputation(self, fitted):
        _, model = fitted
        rec = model.reconstruction()
        for i in range(rec.shape[0]):
            for j in range(rec.shape[1]):
                expected = sigmoid(float(rec[i, j]) + model.b_r[i] + model.b_c[j])
                assert model.scores[i, j] == pytest.approx(expected, rel=1e-12)

    def test_reconstructed_cell_logit_gap_is_exactly_one(self, fitted):
        _, model = fitted
        rec = model.reconstruction()
        ones = rec == 1
        zeros = rec == 0
        if ones.any() and zeros.any():
            b = np.add.outer(model.b_r, model.b_c)
            # same-bias cells differ in score exactly via the +1 logit
            i, j = np.argwhere(ones)[0]
            assert model.scores[i, j] == pytest.approx(sigmoid(1.0 + b[i, j]))

    def test_sigma_reference_points(self):
        assert sigmoid(1.0) == pytest.approx(0.7310585786300049, rel=1e-12)
        assert sigmoid(0.0) == 0.5
