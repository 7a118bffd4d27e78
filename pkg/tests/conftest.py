import numpy as np
import pytest

from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import BoundsKind, compute_bounds
from src.benchgen.synthetic import make_preset, make_synthetic
from src.benchgen.synthetic_spec import SyntheticSpec
from src.criteria.cv import CvConfig, make_folds
from src.lasso.dataset import Dataset


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale run, only with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def bench_from_arrays(X, y, k_folds=2, name="toy", beta_true=None):
    """Benchmark around a hand-built design, with synthetic bounds."""
    dataset = Dataset(X=X, y=y, name=name)
    lam_min, lam_max = compute_bounds(dataset, BoundsKind.SYNTHETIC)
    return Benchmark(
        dataset=dataset,
        lam_min=lam_min,
        lam_max=lam_max,
        name=name,
        bounds_kind=BoundsKind.SYNTHETIC,
        criterion=CvConfig(k_folds=k_folds),
        beta_true=beta_true,
    )


ORTHO_BLOCK = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])


def orthogonal_halves(y):
    """
    n=8, d=2 design whose rows are placed so that each 2-fold training half is
    ORTHO_BLOCK: X_train^T X_train / n_train = I on both folds.
    """
    folds = make_folds(8, CvConfig(k_folds=2))
    X = np.empty((8, 2))
    for _, val in folds:
        X[val] = ORTHO_BLOCK
    return bench_from_arrays(X, np.asarray(y, dtype=np.float64), k_folds=2, name="ortho")


@pytest.fixture(scope="session")
def simple_bench():
    return make_preset("synt_simple")


@pytest.fixture(scope="session")
def tiny_bench():
    spec = SyntheticSpec(n=24, d=6, d_e=2, seed=3)
    return make_synthetic(spec, name="tiny", criterion=CvConfig(k_folds=3))


@pytest.fixture
def ortho_bench():
    return orthogonal_halves([3.0, -1.0, 2.0, 0.5, 1.5, -2.5, 0.7, 1.1])
