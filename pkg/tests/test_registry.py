import bz2

import numpy as np
import pytest
import scipy.sparse as sp

from src.benchgen.bounds import BoundsKind
from src.criteria.cv import CvConfig
from src.data.registry import (
    DatasetRegistryEntry,
    get_entry,
    load_real_benchmark,
    load_registry,
    standardize_columns,
)
from src.errors import ParseError, ShapeMismatchError, SourceError, UnknownNameError
from src.lasso.solver import solve_wlasso

ROWS = """\
1 1:0.5 2:1 3:-1
-1 1:1.5 3:2
1 2:-0.5 3:0.5
-1 1:-1 2:2
1 1:2 2:0.5 3:1
-1 1:0.1 2:-1 3:-2
"""


@pytest.fixture
def libsvm_file(tmp_path):
    path = tmp_path / "toy_scale"
    path.write_text(ROWS)
    return path


def test_registry_contents():
    """It should list the five real-world datasets with their shapes."""
    registry = load_registry()
    assert set(registry) == {"breast_cancer", "diabetes", "leukemia", "dna", "rcv1"}
    assert (registry["leukemia"].n, registry["leukemia"].d) == (72, 7129)
    assert registry["rcv1"].bounds_kind == BoundsKind.RCV1_LIKE
    assert registry["leukemia"].source == ["leu.bz2", "leu.t.bz2"]


def test_lookup_case_insensitive():
    """It should find entries regardless of case and reject unknown names."""
    assert get_entry("Diabetes").name == "diabetes"
    with pytest.raises(UnknownNameError):
        get_entry("mnist")


def test_load_dense_standardized(libsvm_file, tmp_path):
    """It should densify a narrow dataset and standardize its columns."""
    entry = DatasetRegistryEntry(name="toy", n=6, d=3, source=libsvm_file.name)
    bench = load_real_benchmark(entry, data_dir=tmp_path, allow_download=False)
    X = bench.dataset.X
    assert not bench.dataset.is_sparse
    np.testing.assert_allclose(X.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(X.std(axis=0), 1.0)
    assert bench.lam_max - bench.lam_min == pytest.approx(np.log(1e5))
    assert bench.registry_name == "toy"
    assert bench.spec is None and bench.beta_true is None


def test_multiple_sources_concatenate(libsvm_file, tmp_path):
    """It should stack several sources, compressed ones included, in order."""
    packed = tmp_path / "toy_scale.t.bz2"
    with bz2.open(packed, "wt") as handle:
        handle.write("1 1:3 3:1\n")
    entry = DatasetRegistryEntry(name="toy", n=7, d=3, source=[libsvm_file.name, packed.name], standardize=False)
    bench = load_real_benchmark(entry, data_dir=tmp_path, allow_download=False)
    assert bench.n == 7
    np.testing.assert_array_equal(bench.dataset.X[-1], [3.0, 0.0, 1.0])
    assert bench.dataset.y[-1] == 1.0


def test_shape_mismatch(libsvm_file, tmp_path):
    """It should refuse data whose shape differs from the registered one."""
    entry = DatasetRegistryEntry(name="toy", n=5, d=3, source=libsvm_file.name)
    with pytest.raises(ShapeMismatchError):
        load_real_benchmark(entry, data_dir=tmp_path, allow_download=False)


def test_missing_source_without_download(tmp_path):
    """It should raise SourceError when the file is absent and downloads are off."""
    entry = DatasetRegistryEntry(name="toy", n=6, d=3, source="absent", url_base="https://example.invalid/")
    with pytest.raises(SourceError):
        load_real_benchmark(entry, data_dir=tmp_path, allow_download=False)


def test_drop_empty_columns(tmp_path):
    """It should remove columns with no stored entries when asked."""
    path = tmp_path / "gappy"
    path.write_text("1 1:1 4:2\n-1 1:0.5 4:-1\n1 4:3\n")
    entry = DatasetRegistryEntry(
        name="gappy", n=3, d=2, source=path.name, standardize=False,
        drop_empty_columns=True, bounds_kind="rcv1-like",
    )
    bench = load_real_benchmark(entry, data_dir=tmp_path, allow_download=False, criterion=CvConfig(k_folds=2))
    np.testing.assert_array_equal(bench.dataset.X, [[1.0, 2.0], [0.5, -1.0], [0.0, 3.0]])
    assert bench.lam_max - bench.lam_min == pytest.approx(np.log(1e3))


def test_standardize_sparse_scales_only():
    """It should scale sparse columns to unit variance without centering."""
    X = sp.csc_matrix(np.array([[0.0, 2.0], [3.0, 0.0], [0.0, 4.0], [3.0, 0.0]]))
    out = standardize_columns(X)
    assert sp.issparse(out)
    dense = out.toarray()
    assert np.all(dense[X.toarray() == 0.0] == 0.0)
    np.testing.assert_allclose(dense.std(axis=0), 1.0)


def test_standardize_constant_column():
    """It should leave constant columns at zero after centering."""
    out = standardize_columns(np.array([[1.0, 2.0], [1.0, 4.0], [1.0, 6.0]]))
    np.testing.assert_array_equal(out[:, 0], 0.0)


@pytest.mark.parametrize("standardize, bounds_kind", [(True, "real"), (False, "real"), (True, "rcv1-like")])
def test_real_lambda_max_gives_empty_model(libsvm_file, tmp_path, standardize, bounds_kind):
    """It should return beta = 0 at a uniform lam_max on a loaded dataset."""
    entry = DatasetRegistryEntry(
        name="toy", n=6, d=3, source=libsvm_file.name, standardize=standardize, bounds_kind=bounds_kind,
    )
    bench = load_real_benchmark(entry, data_dir=tmp_path, allow_download=False)
    sol = solve_wlasso(bench.dataset, np.full(bench.d, bench.lam_max))
    assert np.all(sol.beta == 0.0)
    assert sol.n_passes == 0


def test_undecodable_source_is_a_parse_error(tmp_path):
    """It should report a source that is not UTF-8 text as a parse error."""
    path = tmp_path / "binary"
    path.write_bytes(b"1 1:0.5\n\xff\xfe 2:1\n")
    entry = DatasetRegistryEntry(name="binary", n=2, d=2, source=path.name)
    with pytest.raises(ParseError, match="not UTF-8"):
        load_real_benchmark(entry, data_dir=tmp_path, allow_download=False)
