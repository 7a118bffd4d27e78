import numpy as np
import pytest

from src.criteria.cv import (
    CvConfig,
    cv_loss,
    fixed_beta_loss,
    make_folds,
    make_split,
    reference_loss,
    scale_loss,
)
from src.errors import ConfigError
from tests.conftest import ORTHO_BLOCK


def hand_cv_loss(bench, lam):
    """CV loss of the orthogonal toy, with each fold fit in closed form."""
    X, y = bench.dataset.X, bench.dataset.y
    w = np.exp(lam)
    losses = []
    for train, val in make_folds(bench.n, bench.criterion):
        corr = X[train].T @ y[train] / train.size
        beta = np.sign(corr) * np.maximum(np.abs(corr) - w, 0.0)
        resid = y[val] - X[val] @ beta
        losses.append(np.mean(resid ** 2))
    return float(np.mean(losses))


# --- Folds ---


def test_folds_partition_rows():
    """It should put every row in exactly one validation block."""
    folds = make_folds(23, CvConfig(k_folds=5))
    val = np.concatenate([v for _, v in folds])
    assert sorted(val.tolist()) == list(range(23))
    assert [v.size for _, v in folds] == [5, 5, 5, 4, 4]
    for train, v in folds:
        assert np.intersect1d(train, v).size == 0
        assert train.size + v.size == 23


def test_folds_deterministic():
    """It should produce the same folds for the same seed and different ones for another."""
    a = make_folds(40, CvConfig(fold_seed=1))
    b = make_folds(40, CvConfig(fold_seed=1))
    c = make_folds(40, CvConfig(fold_seed=2))
    assert all(np.array_equal(x[1], y[1]) for x, y in zip(a, b))
    assert not all(np.array_equal(x[1], y[1]) for x, y in zip(a, c))


def test_more_folds_than_rows():
    """It should refuse K > n."""
    with pytest.raises(ConfigError):
        make_folds(3, CvConfig(k_folds=4))


def test_ortho_training_halves(ortho_bench):
    """It should give each training half an identity Gram matrix (fixture sanity)."""
    for fold in ortho_bench.cv_split.folds:
        X = np.asarray(fold.train.X)
        np.testing.assert_allclose(X.T @ X / X.shape[0], np.eye(2))
        assert sorted(map(tuple, X.tolist())) == sorted(map(tuple, ORTHO_BLOCK.tolist()))


# --- Loss ---


@pytest.mark.parametrize("lam", [[-3.0, -3.0], [-0.5, -2.0], [0.2, -1.0], [2.0, 2.0]])
def test_cv_loss_matches_closed_form(ortho_bench, lam):
    """It should equal the hand-computed K-fold MSE on an orthogonal design."""
    lam = np.array(lam)
    value = cv_loss(ortho_bench.dataset, lam, split=ortho_bench.cv_split, tol=1e-12)
    assert value.loss == pytest.approx(hand_cv_loss(ortho_bench, lam), rel=1e-10, abs=1e-12)
    assert value.scaled is None
    assert value.objective == value.loss
    assert len(value.betas) == 2


def test_cv_loss_cost_sums_folds(tiny_bench):
    """It should meter the cost as the sum of per-fold passes times fold size."""
    value = cv_loss(tiny_bench.dataset, np.full(tiny_bench.d, tiny_bench.lam_max - 2.0), split=tiny_bench.cv_split)
    expected = sum(
        sol.n_passes * fold.train.n * fold.train.d
        for sol, fold in zip(value.solutions, tiny_bench.cv_split.folds)
    )
    assert value.cost == expected
    assert value.per_fold.shape == (3,)
    assert value.loss == pytest.approx(value.per_fold.mean())


def test_cv_loss_deterministic(tiny_bench):
    """It should return bit-identical values for repeated calls."""
    lam = np.linspace(tiny_bench.lam_min, tiny_bench.lam_max, tiny_bench.d)
    a = cv_loss(tiny_bench.dataset, lam, split=tiny_bench.cv_split)
    b = cv_loss(tiny_bench.dataset, lam, split=tiny_bench.cv_split)
    assert a.loss == b.loss
    assert a.cost == b.cost


def test_warm_start_count_checked(tiny_bench):
    """It should refuse a warm-start list that does not match the fold count."""
    with pytest.raises(ConfigError):
        cv_loss(tiny_bench.dataset, np.zeros(tiny_bench.d), split=tiny_bench.cv_split, warm_starts=[None])


def test_scaled_loss_uses_reference(tiny_bench):
    """It should divide the CV loss by the ground-truth reference loss."""
    value = cv_loss(
        tiny_bench.dataset, np.full(tiny_bench.d, tiny_bench.lam_max - 1.0),
        split=tiny_bench.cv_split, reference=tiny_bench.reference,
    )
    assert value.scaled == pytest.approx(value.loss / tiny_bench.reference)
    assert value.objective == value.scaled


def test_reference_of_truth_scales_to_one(tiny_bench):
    """It should give the ground-truth coefficients a scaled loss of exactly one."""
    value = fixed_beta_loss(tiny_bench.cv_split, tiny_bench.beta_true, reference=tiny_bench.reference)
    assert value.objective == pytest.approx(1.0)
    assert value.cost == 0


def test_reference_floor_disables_scaling():
    """It should leave losses unscaled when the reference is below the floor."""
    assert scale_loss(2.0, 0.0) is None
    assert scale_loss(2.0, None) is None
    assert scale_loss(2.0, 4.0) == 0.5


def test_reference_requires_ground_truth(ortho_bench):
    """It should raise for a benchmark without beta_true."""
    with pytest.raises(ConfigError):
        reference_loss(ortho_bench)


def test_split_uses_config(tiny_bench):
    """It should carry the config it was built from."""
    split = make_split(tiny_bench.dataset, CvConfig(k_folds=4))
    assert split.k == 4
    assert split.config.k_folds == 4


def test_folds_balanced_remainder():
    """It should give the extra row to the first block when K does not divide n."""
    folds = make_folds(7, CvConfig(k_folds=3))
    assert [len(val) for _, val in folds] == [3, 2, 2]
    assert sorted(np.concatenate([val for _, val in folds]).tolist()) == list(range(7))
