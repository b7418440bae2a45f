import json
import logging

import numpy as np
import pytest

from qklab.config import ExperimentConfig
from qklab.datasets import (PCAScaler, PreparedDataset, RawDataset, binarize_labels,
                            corrupt_labels, corruption_indices, impute_median, load_csv,
                            make_gaussian_blobs, parse_holdout, pca_scale, prepare_dataset, split,
                            subsample, write_prepared)
from qklab.exceptions import EmptyDatasetError, MalformedRowError, ValidationError

HEART_ROWS = [
    "63,1,1,145,233,1,2,150,0,2.3,3,0,6,0",
    "67,1,4,160,286,0,2,108,1,1.5,2,3,3,2",
    "56,1,2,120,236,0,0,178,0,0.8,1,?,3,0",
]


def _write(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("\n".join(lines) + ("\n" if lines else ""))
    return path


def test_load_heart_with_missing_values(tmp_path):
    raw = load_csv(_write(tmp_path, "heart.csv", HEART_ROWS), "heart")
    assert raw.m == 3
    assert len(raw.feature_names) == 13
    assert raw.n_missing == 1
    assert np.isnan(raw.features[2, raw.feature_names.index("ca")])
    np.testing.assert_array_equal(binarize_labels(raw, "heart"), [-1.0, 1.0, -1.0])


def test_load_wine_with_header(tmp_path):
    path = _write(tmp_path, "wine.csv", ['"fixed acidity";"volatile acidity";"quality"',
                                         "7.4;0.7;5", "7.8;0.88;6"])
    raw = load_csv(path, "wine")
    assert raw.feature_names == ("fixed acidity", "volatile acidity")
    np.testing.assert_allclose(raw.features, [[7.4, 0.7], [7.8, 0.88]])
    np.testing.assert_array_equal(binarize_labels(raw, "wine"), [-1.0, 1.0])


def test_load_cancer_drops_id(tmp_path):
    rows = [f"{842300 + i},{d}," + ",".join(["1.5"] * 30) for i, d in enumerate("MBM")]
    raw = load_csv(_write(tmp_path, "wdbc.csv", rows), "cancer")
    assert raw.features.shape == (3, 30)
    assert "id" not in raw.feature_names
    np.testing.assert_array_equal(binarize_labels(raw, "cancer"), [1.0, -1.0, 1.0])


def test_load_errors(tmp_path):
    bad = HEART_ROWS[:1] + ["67,1,4,160,abc,0,2,108,1,1.5,2,3,3,2"]
    with pytest.raises(MalformedRowError) as info:
        load_csv(_write(tmp_path, "bad.csv", bad), "heart")
    assert (info.value.row, info.value.column) == (1, "chol")
    with pytest.raises(EmptyDatasetError):
        load_csv(_write(tmp_path, "empty.csv", []), "heart")
    with pytest.raises(EmptyDatasetError):
        load_csv(_write(tmp_path, "header.csv", ['"alcohol";"quality"']), "wine")
    with pytest.raises(ValidationError, match="label column"):
        load_csv(_write(tmp_path, "nolabel.csv", ['"alcohol";"grade"', "9.4;5"]), "wine")
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "missing.csv", "heart")
    with pytest.raises(ValidationError, match="Unknown dataset"):
        load_csv(tmp_path / "missing.csv", "iris")


def test_binarize_rules():
    np.testing.assert_array_equal(binarize_labels(["3", "5", "6", "8"], "wine"), [-1, -1, 1, 1])
    np.testing.assert_array_equal(binarize_labels([0, 1, 4], "heart"), [-1, 1, 1])
    np.testing.assert_array_equal(binarize_labels(["b", "M "], "cancer"), [-1, 1])
    np.testing.assert_array_equal(binarize_labels([0, 1, 1], "htru2"), [-1, 1, 1])
    with pytest.raises(ValidationError, match="outside the domain"):
        binarize_labels([0, 5], "heart")
    with pytest.raises(ValidationError, match="outside the domain"):
        binarize_labels(["X"], "cancer")
    with pytest.raises(ValidationError, match="numeric"):
        binarize_labels(["good"], "wine")
    with pytest.raises(ValidationError, match="Unknown label rule"):
        binarize_labels([0], "iris")


def test_impute_median():
    x = np.array([[1.0, 2.0], [np.nan, 4.0], [3.0, 6.0], [5.0, np.nan]])
    raw = impute_median(RawDataset(x, np.zeros(4, dtype=object), ("a", "b")))
    np.testing.assert_allclose(raw.features[:, 0], [1.0, 3.0, 3.0, 5.0])
    np.testing.assert_allclose(raw.features[:, 1], [2.0, 4.0, 6.0, 4.0])
    assert raw.n_missing == 0
    empty = RawDataset(np.array([[np.nan], [np.nan]]), np.zeros(2, dtype=object), ("a",))
    with pytest.raises(ValidationError, match="no values"):
        impute_median(empty)


def test_gaussian_blobs_balanced_and_seeded():
    raw = make_gaussian_blobs(501, cluster_std=3.0, seed=7)
    assert raw.features.shape == (501, 2)
    labels = binarize_labels(raw, "blobs")
    assert {int((labels > 0).sum()), int((labels < 0).sum())} == {250, 251}
    again = make_gaussian_blobs(501, cluster_std=3.0, seed=7)
    np.testing.assert_array_equal(raw.features, again.features)
    with pytest.raises(ValidationError):
        make_gaussian_blobs(1)


def test_pca_scaler_range(rng):
    x = rng.normal(size=(50, 4)) @ rng.normal(size=(4, 4))
    features, scaler = pca_scale(x, 2)
    assert features.shape == (50, 2)
    np.testing.assert_allclose(features.min(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(features.max(axis=0), np.pi, atol=1e-12)
    assert 0.0 < scaler.explained_variance_ratio <= 1.0
    assert np.all(np.diff(scaler.eigenvalues_) <= 0)
    params = scaler.params()
    assert params["n_components"] == 2
    json.dumps(params)


def test_pca_scaler_errors(rng):
    x = np.column_stack([rng.normal(size=10), np.full(10, 2.0)])
    with pytest.raises(ValidationError, match="zero variance"):
        PCAScaler(2).fit(x)
    with pytest.raises(ValidationError, match="Cannot keep"):
        PCAScaler(3).fit(x)
    with pytest.raises(ValidationError, match="not fitted"):
        PCAScaler(1).transform(x)


def test_pca_transform_clips_held_out_values(rng, caplog):
    x = rng.normal(size=(30, 2))
    scaler = PCAScaler(2).fit(x)
    with caplog.at_level(logging.WARNING, logger="qklab.datasets"):
        out = scaler.transform(x * 10.0)
    assert out.min() >= 0.0 and out.max() <= np.pi
    assert "Clipped" in caplog.text


def test_corruption_counts_and_determinism():
    assert corruption_indices(10, 0.25, 1).size == 3
    assert corruption_indices(10, 0.0, 1).size == 0
    np.testing.assert_array_equal(corruption_indices(10, 1.0, 1), np.arange(10))
    np.testing.assert_array_equal(corruption_indices(40, 0.3, [5, 0, 2]),
                                  corruption_indices(40, 0.3, [5, 0, 2]))
    with pytest.raises(ValidationError):
        corruption_indices(10, 1.5, 1)

    y = np.array([1.0, -1.0] * 10)
    flipped = corrupt_labels(y, 0.5, 9)
    changed = np.flatnonzero(flipped != y)
    np.testing.assert_array_equal(changed, corruption_indices(20, 0.5, 9))
    np.testing.assert_array_equal(flipped[changed], -y[changed])
    np.testing.assert_array_equal(corrupt_labels(y, 1.0, 9), -y)


def test_holdout_split():
    plan = split(303, holdout="75/25", seed=4)
    assert plan.is_holdout
    assert (plan.train.size, plan.test.size) == (227, 76)
    assert np.intersect1d(plan.train, plan.test).size == 0
    np.testing.assert_array_equal(np.union1d(plan.train, plan.test), np.arange(303))
    again = split(303, holdout="75/25", seed=4)
    np.testing.assert_array_equal(plan.test, again.test)
    assert split(500, holdout="80/20").test.size == 100


def test_kfold_split():
    plan = split(20, folds=5, seed=1)
    assert not plan.is_holdout
    tests = [te for _, te in plan.folds]
    assert all(te.size == 4 for te in tests)
    np.testing.assert_array_equal(np.sort(np.concatenate(tests)), np.arange(20))
    for tr, te in plan.folds:
        assert np.intersect1d(tr, te).size == 0
    with pytest.raises(ValidationError):
        split(20, holdout="75/25", folds=5)
    with pytest.raises(ValidationError):
        split(3, folds=5)


def test_parse_holdout():
    assert parse_holdout("75/25") == 0.75
    assert parse_holdout("80/20") == pytest.approx(0.8)
    assert parse_holdout(0.6) == 0.6
    for bad in ("75/", "0/100", "1.5", "x"):
        with pytest.raises(ValidationError):
            parse_holdout(bad)


def test_subsample_modes():
    raw = make_gaussian_blobs(20, seed=0)
    first = subsample(raw, 5, mode="first")
    np.testing.assert_array_equal(first.features, raw.features[:5])
    seeded = subsample(raw, 5, seed=2)
    assert seeded.m == 5
    np.testing.assert_array_equal(seeded.features, subsample(raw, 5, seed=2).features)
    assert subsample(raw, 50) is raw
    with pytest.raises(ValidationError):
        subsample(raw, 5, mode="last")


def test_prepare_blobs_dataset_and_write(tmp_path):
    config = ExperimentConfig(dataset="blobs", subset=40, seed=3, cluster_std=0.8, n_qubits=2)
    data = prepare_dataset(config)
    assert data.features.shape == (40, 2)
    assert set(np.unique(data.labels)) == {-1.0, 1.0}
    assert data.provenance["n_samples"] == 40
    assert data.provenance["n_positive"] + data.provenance["n_negative"] == 40

    csv_path, sidecar = write_prepared(data, tmp_path / "prepared.csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "f0,f1,label"
    assert len(lines) == 41
    assert json.loads(sidecar.read_text())["seed"] == 3


def test_prepare_csv_dataset(tmp_path):
    path = _write(tmp_path, "heart.csv", HEART_ROWS + [
        "37,1,3,130,250,0,0,187,0,3.5,3,0,3,0",
        "41,0,2,130,204,0,2,172,0,1.4,1,0,3,1",
    ])
    config = ExperimentConfig(dataset="heart", path=str(path), n_qubits=3)
    data = prepare_dataset(config)
    assert data.features.shape == (5, 3)
    np.testing.assert_array_equal(data.labels, [-1, 1, -1, -1, 1])
    with pytest.raises(ValidationError, match="needs a path"):
        prepare_dataset(ExperimentConfig(dataset="heart", n_qubits=3))


def test_prepared_dataset_range_check():
    with pytest.raises(ValidationError, match=r"\[0, pi\]"):
        PreparedDataset(np.array([[4.0]]), np.array([1.0]))
