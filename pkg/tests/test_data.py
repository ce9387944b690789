import numpy as np
import pytest

from ucurve.data import (
    DataError,
    as_discrete,
    bundled_path,
    filter_sparse_features,
    is_discrete,
    load_dataset,
    preprocess,
    quantize_levels,
    write_dataset,
    zscore_binarize,
)


def column(values, labels=None):
    from ucurve.data import Dataset

    values = np.asarray(values, dtype=float).reshape(len(values), -1)
    labels = np.zeros(len(values), dtype=np.int64) if labels is None else np.asarray(labels)
    return Dataset(values, labels, ("a", "b"))


def test_load_dense_labels(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,2,a\n3,4,b\n5,6,a\n")
    d = load_dataset(p)
    assert d.class_count == 2 and d.labels.tolist() == [0, 1, 0]
    assert d.values.tolist() == [[1, 2], [3, 4], [5, 6]]


def test_load_label_first_and_whitespace(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("# comment\nx 1 0\n\ny 0 1\n")
    d = load_dataset(p, "csv_labeled_first")
    assert d.class_names == ("x", "y") and d.values.tolist() == [[1, 0], [0, 1]]


def test_load_sparse(tmp_path):
    p = tmp_path / "d.svm"
    p.write_text("+1 1:3 3:1\n-1 2:5\n")
    d = load_dataset(p, "svmlight_like")
    assert d.values.tolist() == [[3, 0, 1], [0, 5, 0]]


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "no samples"),
        ("1,2,a\n1,a\n", "row 2"),
        ("1,x,a\n", "non-numeric"),
    ],
)
def test_load_errors(tmp_path, text, message):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataError, match=message):
        load_dataset(p)


def test_missing_file_and_unknown_format(tmp_path):
    with pytest.raises(DataError):
        load_dataset(tmp_path / "none.csv")
    with pytest.raises(DataError):
        load_dataset(tmp_path / "none.csv", "xml")


def test_bundled_pendigits_shape():
    d = load_dataset(bundled_path("pendigits16.csv"))
    assert d.feature_count == 16 and d.class_count == 10


def test_bundled_fixture_shapes():
    shapes = {
        "votes16.csv": (435, 16, 2),
        "woperator16_a.csv": (2000, 16, 2),
        "biological27.csv": (15, 27, 3),
        "ionosphere34.csv": (351, 34, 2),
    }
    for name, shape in shapes.items():
        d = load_dataset(bundled_path(name))
        assert (d.sample_count, d.feature_count, d.class_count) == shape
    with pytest.raises(DataError):
        bundled_path("nope.csv")


def test_binarize_examples():
    assert zscore_binarize(column([1, 2, 3])).values[:, 0].tolist() == [0, 0, 1]
    assert zscore_binarize(column([5, 5, 5])).values[:, 0].tolist() == [0, 0, 0]


def test_binarize_keeps_structure_and_stays_binary():
    rng = np.random.default_rng(0)
    d = column(rng.normal(size=(30, 4)), rng.integers(0, 2, 30))
    once = zscore_binarize(d)
    assert set(np.unique(once.values)) <= {0, 1}
    assert once.labels.tolist() == d.labels.tolist() and once.values.shape == d.values.shape
    assert set(np.unique(zscore_binarize(once).values)) <= {0, 1}


def test_filter_examples():
    d = column([[0, 1], [0, 1], [1, 1]])
    kept = filter_sparse_features(d, 2)
    assert kept.values.tolist() == [[1], [1], [1]]
    assert "kept=1" in kept.provenance[-1]
    assert filter_sparse_features(d, 0).values.tolist() == d.values.tolist()


def test_filter_on_dorothea_style_fixture():
    d = load_dataset(bundled_path("dorothea60.csv"))
    f = filter_sparse_features(d, 100)
    assert 0 < f.feature_count < d.feature_count
    assert ((f.values != 0).sum(axis=0) >= 100).all()


def test_quantize_examples():
    assert quantize_levels(column([1, 2, 3, 4, 5, 6]), 3).values[:, 0].tolist() == [0, 0, 1, 1, 2, 2]
    binary = column([0, 1, 1, 0, 1])
    assert quantize_levels(binary, 2).values[:, 0].tolist() == [0, 1, 1, 0, 1]


def test_quantize_biological_fixture():
    d = quantize_levels(load_dataset(bundled_path("biological27.csv")), 3)
    assert d.feature_count == 27 and d.sample_count == 15
    assert set(np.unique(d.values)) <= {0, 1, 2}


def test_equal_values_share_a_level():
    q = quantize_levels(column([7, 7, 7, 7, 1, 9]), 3).values[:, 0].tolist()
    assert len(set(q[:4])) == 1


def test_preprocess_runs_filters_first():
    d = column([[0, 3], [0, 2], [5, 1]])
    out = preprocess(d, ["binarize", "filter=2"])
    assert out.feature_count == 1
    assert [p.split(":")[0] for p in out.provenance] == ["filter", "binarize"]
    with pytest.raises(DataError):
        preprocess(d, ["smooth"])


def test_discreteness_and_write_round_trip(tmp_path):
    d = column([[0.5], [1.0]])
    assert not is_discrete(d)
    with pytest.raises(DataError):
        as_discrete(d)
    b = zscore_binarize(d)
    path = tmp_path / "out.csv"
    write_dataset(b, path)
    assert path.read_text().startswith("# ")
    back = load_dataset(path)
    assert back.values.tolist() == b.values.tolist()
