# qklab/datasets.py

"""
Dataset Ingestion and Preparation

Loads the UCI datasets from user-supplied CSV files (or generates the
two-blob Gaussian set), maps raw labels to {-1, +1}, imputes missing values,
reduces the features to one per qubit with PCA and scales them into [0, pi]
for IQP encoding. Also provides label corruption and seeded split utilities.

@references
1. D. Dua and C. Graff, "UCI Machine Learning Repository", University of California, Irvine (2019)
2. I. T. Jolliffe, "Principal Component Analysis", Springer (2002)

Functions:
    - load_csv / binarize_labels / impute_median: ingestion
    - make_gaussian_blobs: synthetic two-cluster data
    - PCAScaler / pca_scale: scale -> PCA -> rescale to [0, pi]
    - corrupt_labels: seeded sign flips of a label fraction
    - split / parse_holdout: holdout and k-fold plans
    - subsample / prepare_dataset / write_prepared: end-to-end pipeline
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from sklearn.datasets import make_blobs
from sklearn.impute import SimpleImputer
from sklearn.model_selection import KFold, train_test_split
from sklearn.preprocessing import MinMaxScaler

from .exceptions import EmptyDatasetError, MalformedRowError, ValidationError
from .numerics import symmetric_eigen

logger = logging.getLogger(__name__)

FEATURE_RANGE = (0.0, math.pi)
RANGE_TOL = 1e-12
DEFAULT_CENTERS = ((-4.0, -4.0), (4.0, 4.0))
MISSING_TOKENS = ("", "?")


@dataclass(frozen=True)
class DatasetSchema:
    """
    How to read one CSV layout.

    ``columns`` names the columns of a headerless file; None means the file
    has a header row.
    """
    name: str
    label_column: str
    rule: str
    sep: str = ","
    columns: Optional[Tuple[str, ...]] = None
    drop_columns: Tuple[str, ...] = ()


_WDBC_FEATURES = ("radius", "texture", "perimeter", "area", "smoothness", "compactness",
                  "concavity", "concave_points", "symmetry", "fractal_dimension")

SCHEMAS = {
    "wine": DatasetSchema("wine", label_column="quality", rule="wine", sep=";"),
    "heart": DatasetSchema(
        "heart", label_column="num", rule="heart",
        columns=("age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach",
                 "exang", "oldpeak", "slope", "ca", "thal", "num")),
    "cancer": DatasetSchema(
        "cancer", label_column="diagnosis", rule="cancer",
        columns=("id", "diagnosis") + tuple(
            f"{feature}_{stat}" for stat in ("mean", "se", "worst") for feature in _WDBC_FEATURES),
        drop_columns=("id",)),
    "htru2": DatasetSchema(
        "htru2", label_column="class", rule="htru2",
        columns=("ip_mean", "ip_std", "ip_kurtosis", "ip_skewness",
                 "dm_mean", "dm_std", "dm_kurtosis", "dm_skewness", "class")),
}


@dataclass(frozen=True, eq=False)
class RawDataset:
    """Feature matrix (NaN marks a missing value), raw labels and column names."""
    features: np.ndarray
    labels: np.ndarray
    feature_names: Tuple[str, ...]
    source: str = ""

    @property
    def m(self):
        return self.features.shape[0]

    @property
    def n_missing(self):
        return int(np.isnan(self.features).sum())

    def take(self, indices):
        indices = np.asarray(indices, dtype=int)
        return RawDataset(self.features[indices], self.labels[indices], self.feature_names,
                          self.source)


@dataclass(frozen=True, eq=False)
class PreparedDataset:
    """Features in [0, pi], one column per qubit, labels in {-1, +1}."""
    features: np.ndarray
    labels: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        x = self.features
        if x.ndim != 2 or x.shape[0] != self.labels.shape[0]:
            raise ValidationError(
                f"{x.shape[0]} feature rows for {self.labels.shape[0]} labels")
        if x.size and (x.min() < FEATURE_RANGE[0] - RANGE_TOL
                       or x.max() > FEATURE_RANGE[1] + RANGE_TOL):
            raise ValidationError(f"Prepared features leave [0, pi]: [{x.min()}, {x.max()}]")

    @property
    def m(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]


def load_csv(path, schema):
    """
    Read a dataset file.

    Parameters:
    path (str or Path): CSV file; missing values are "" or "?".
    schema (DatasetSchema or str): Layout, or the name of a shipped schema.

    Returns:
    RawDataset: Missing entries are NaN.

    Raises:
    FileNotFoundError, EmptyDatasetError, MalformedRowError (with row index),
    ValidationError (label column absent).
    """
    schema = get_schema(schema)
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset file not found: {path}")
    try:
        frame = pd.read_csv(path, sep=schema.sep,
                            header=None if schema.columns else 0,
                            names=list(schema.columns) if schema.columns else None,
                            na_values=list(MISSING_TOKENS), keep_default_na=False,
                            dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise EmptyDatasetError(f"{path}: no data")
    frame.columns = [str(c).strip().strip('"') for c in frame.columns]
    if schema.label_column not in frame.columns:
        raise ValidationError(f"{path}: label column '{schema.label_column}' not found")
    if frame.empty:
        raise EmptyDatasetError(f"{path}: no data rows")

    labels = frame[schema.label_column].str.strip().to_numpy(dtype=object)
    feature_frame = frame.drop(columns=[schema.label_column, *schema.drop_columns])
    numeric = feature_frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna() & feature_frame.notna()
    if bad.to_numpy().any():
        row, col = np.argwhere(bad.to_numpy())[0]
        column = feature_frame.columns[col]
        raise MalformedRowError(
            f"{path}: row {row}: column '{column}' holds non-numeric value "
            f"'{feature_frame.iat[row, col]}'", row=int(row), column=column)
    raw = RawDataset(numeric.to_numpy(dtype=float), labels, tuple(feature_frame.columns),
                     source=schema.name)
    logger.info("Loaded %d samples with %d features from %s (%d missing values)",
                raw.m, len(raw.feature_names), path, raw.n_missing)
    return raw


def get_schema(schema):
    if isinstance(schema, DatasetSchema):
        return schema
    try:
        return SCHEMAS[schema]
    except KeyError:
        raise ValidationError(f"Unknown dataset: {schema}")


def _numeric_labels(labels, rule):
    try:
        return np.asarray(labels, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"Label rule '{rule}' needs numeric labels")


def _check_domain(values, allowed, rule):
    outside = ~np.isin(values, allowed)
    if outside.any():
        raise ValidationError(
            f"Label '{values[np.argmax(outside)]}' outside the domain of rule '{rule}'")


def binarize_labels(raw, rule):
    """
    Map raw labels to {-1, +1}.

    Rules:
    - wine: quality above 5 -> +1
    - heart: diagnosis above 0 -> +1
    - cancer: "M" (malignant) -> +1, "B" -> -1
    - htru2, blobs: 1 -> +1, 0 -> -1
    """
    labels = raw.labels if isinstance(raw, RawDataset) else np.asarray(raw, dtype=object)
    if rule == 'wine':
        values = _numeric_labels(labels, rule)
        _check_domain(values, np.arange(11), rule)
        return np.where(values > 5, 1.0, -1.0)
    elif rule == 'heart':
        values = _numeric_labels(labels, rule)
        _check_domain(values, np.arange(5), rule)
        return np.where(values > 0, 1.0, -1.0)
    elif rule == 'cancer':
        values = np.array([str(v).strip().upper() for v in labels], dtype=object)
        _check_domain(values, np.array(["M", "B"], dtype=object), rule)
        return np.where(values == "M", 1.0, -1.0)
    elif rule in ('htru2', 'blobs'):
        values = _numeric_labels(labels, rule)
        _check_domain(values, (0.0, 1.0), rule)
        return np.where(values == 1.0, 1.0, -1.0)
    else:
        raise ValidationError(f"Unknown label rule: {rule}")


def impute_median(raw):
    """Replace each missing entry by the median of the present values in its column."""
    x = raw.features
    if not np.isnan(x).any():
        return raw
    empty = np.all(np.isnan(x), axis=0)
    if empty.any():
        name = raw.feature_names[int(np.argmax(empty))]
        raise ValidationError(f"Column '{name}' has no values to impute from")
    filled = SimpleImputer(strategy="median").fit_transform(x)
    logger.info("Imputed %d missing values with column medians", raw.n_missing)
    return RawDataset(filled, raw.labels, raw.feature_names, raw.source)


def make_gaussian_blobs(n, cluster_std=3.0, seed=0, centers=DEFAULT_CENTERS):
    """
    Two isotropic 2-D Gaussian clusters with balanced raw labels 0 / 1.

    Parameters:
    n (int): Total sample count (>= 2); classes differ in size by at most one.
    cluster_std (float): Standard deviation of both clusters.
    seed (int): Generator seed.
    centers (sequence): The two cluster centres.
    """
    if n < 2:
        raise ValidationError(f"Need at least 2 samples, got {n}")
    centers = np.asarray(centers, dtype=float)
    if centers.shape[0] != 2:
        raise ValidationError(f"Need exactly two centres, got {centers.shape[0]}")
    x, y = make_blobs(n_samples=n, centers=centers, cluster_std=cluster_std,
                      random_state=seed)
    names = tuple(f"x{i}" for i in range(x.shape[1]))
    return RawDataset(x.astype(float), y.astype(object), names, source="blobs")


class PCAScaler:
    """
    Min-max scale each raw column to [0, pi], centre, project onto the top-N
    covariance eigenvectors and min-max rescale each projection to [0, pi].
    """

    def __init__(self, n_components):
        if n_components < 1:
            raise ValidationError(f"n_components must be >= 1, got {n_components}")
        self.n_components = n_components
        self.input_scaler_ = None
        self.mean_ = None
        self.components_ = None
        self.eigenvalues_ = None
        self.proj_min_ = None
        self.proj_max_ = None

    def fit(self, features):
        x = np.asarray(features, dtype=float)
        if x.ndim != 2:
            raise ValidationError(f"Features must be a 2-D matrix, got shape {x.shape}")
        m, d = x.shape
        if m < 2:
            raise ValidationError(f"PCA needs at least 2 samples, got {m}")
        if self.n_components > d:
            raise ValidationError(
                f"Cannot keep {self.n_components} components of {d} features")

        self.input_scaler_ = MinMaxScaler(feature_range=FEATURE_RANGE).fit(x)
        scaled = self.input_scaler_.transform(x)
        self.mean_ = scaled.mean(axis=0)
        cov = np.atleast_2d(np.cov(scaled - self.mean_, rowvar=False))
        values, vectors = symmetric_eigen(cov)
        self.eigenvalues_ = values
        self.components_ = vectors[:, :self.n_components]

        projected = (scaled - self.mean_) @ self.components_
        self.proj_min_ = projected.min(axis=0)
        self.proj_max_ = projected.max(axis=0)
        flat = np.flatnonzero(self.proj_max_ - self.proj_min_ <= RANGE_TOL)
        if flat.size:
            raise ValidationError(f"Principal component {int(flat[0])} has zero variance")
        return self

    @property
    def explained_variance(self):
        return float(self.eigenvalues_[:self.n_components].sum())

    @property
    def explained_variance_ratio(self):
        total = float(self.eigenvalues_.sum())
        return self.explained_variance / total if total > 0 else math.nan

    def transform(self, features):
        if self.components_ is None:
            raise ValidationError("PCAScaler is not fitted yet; call fit() first")
        scaled = self.input_scaler_.transform(np.asarray(features, dtype=float))
        projected = (scaled - self.mean_) @ self.components_
        out = (projected - self.proj_min_) / (self.proj_max_ - self.proj_min_) * FEATURE_RANGE[1]
        outside = (out < -RANGE_TOL) | (out > FEATURE_RANGE[1] + RANGE_TOL)
        if outside.any():
            logger.warning("Clipped %d held-out feature values into [0, pi]", int(outside.sum()))
        return np.clip(out, *FEATURE_RANGE)

    def fit_transform(self, features):
        return self.fit(features).transform(features)

    def params(self):
        """Transform parameters as plain lists, for provenance records."""
        return {
            "n_components": self.n_components,
            "raw_min": self.input_scaler_.data_min_.tolist(),
            "raw_max": self.input_scaler_.data_max_.tolist(),
            "mean": self.mean_.tolist(),
            "components": self.components_.tolist(),
            "eigenvalues": self.eigenvalues_.tolist(),
            "projected_min": self.proj_min_.tolist(),
            "projected_max": self.proj_max_.tolist(),
        }


def pca_scale(features, n_components):
    """
    Returns:
    tuple[np.ndarray, PCAScaler]: Features in [0, pi] and the fitted transform.
    """
    scaler = PCAScaler(n_components)
    return scaler.fit_transform(features), scaler


def corruption_indices(m, fraction, seed):
    """Indices of round-half-up(fraction * m) labels, drawn without replacement."""
    if not 0.0 <= fraction <= 1.0:
        raise ValidationError(f"Corruption fraction must lie in [0, 1], got {fraction}")
    count = int(math.floor(fraction * m + 0.5))
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(m, size=count, replace=False))


def corrupt_labels(labels, fraction, seed):
    """Copy of ``labels`` with a seeded fraction of them sign-flipped."""
    y = np.array(labels, dtype=float)
    idx = corruption_indices(y.shape[0], fraction, seed)
    y[idx] = -y[idx]
    return y


@dataclass(frozen=True, eq=False)
class SplitPlan:
    """Either a holdout split (train/test) or k-fold assignments (folds)."""
    seed: int
    train: Optional[np.ndarray] = None
    test: Optional[np.ndarray] = None
    folds: Tuple[Tuple[np.ndarray, np.ndarray], ...] = ()

    @property
    def is_holdout(self):
        return self.train is not None


def parse_holdout(holdout):
    """'75/25' or a train fraction in (0, 1) -> train fraction."""
    if isinstance(holdout, str) and "/" in holdout:
        try:
            train, test = (float(v) for v in holdout.split("/"))
        except ValueError:
            raise ValidationError(f"Bad holdout ratio: {holdout}")
        if train <= 0 or test <= 0:
            raise ValidationError(f"Bad holdout ratio: {holdout}")
        return train / (train + test)
    try:
        fraction = float(holdout)
    except (TypeError, ValueError):
        raise ValidationError(f"Bad holdout ratio: {holdout}")
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"Holdout train fraction must lie in (0, 1), got {holdout}")
    return fraction


def split(m, holdout=None, folds=None, seed=0):
    """
    Seeded holdout split or k-fold plan.

    The test share is ceil((1 - train fraction) * m); the rest trains
    (303 samples at 75/25 -> 227/76).
    """
    if (holdout is None) == (folds is None):
        raise ValidationError("Give exactly one of holdout or folds")
    indices = np.arange(m)
    if folds is not None:
        if folds < 2:
            raise ValidationError(f"Need at least 2 folds, got {folds}")
        if m < folds:
            raise ValidationError(f"Cannot split {m} samples into {folds} folds")
        kfold = KFold(n_splits=folds, shuffle=True, random_state=seed)
        plan = tuple((np.sort(tr), np.sort(te)) for tr, te in kfold.split(indices))
        return SplitPlan(seed=seed, folds=plan)

    train_fraction = parse_holdout(holdout)
    n_test = int(math.ceil((1.0 - train_fraction) * m - 1e-9))
    if n_test < 1 or n_test >= m:
        raise ValidationError(f"Holdout {holdout} leaves an empty split for m = {m}")
    train, test = train_test_split(indices, test_size=n_test, random_state=seed, shuffle=True)
    return SplitPlan(seed=seed, train=np.sort(train), test=np.sort(test))


def subsample(raw, n, mode="seeded", seed=0):
    """Keep ``n`` samples: a seeded draw without replacement, or the first n rows."""
    if n is None or n >= raw.m:
        return raw
    if n < 1:
        raise ValidationError(f"Subset size must be >= 1, got {n}")
    if mode == "seeded":
        rng = np.random.default_rng(seed)
        return raw.take(np.sort(rng.choice(raw.m, size=n, replace=False)))
    elif mode == "first":
        return raw.take(np.arange(n))
    else:
        raise ValidationError(f"Unknown subset mode: {mode}")


def prepare_dataset(config):
    """
    Load or generate the configured dataset and run the full pipeline:
    binarize -> impute -> subset -> pca_scale.

    ``config`` provides dataset, path, subset, subset_mode, seed,
    cluster_std, centers and n_qubits.
    """
    if config.dataset == "blobs":
        n = config.subset or 500
        raw = make_gaussian_blobs(n, cluster_std=config.cluster_std, seed=config.seed,
                                  centers=config.centers or DEFAULT_CENTERS)
        rule = "blobs"
    else:
        if not config.path:
            raise ValidationError(f"Dataset '{config.dataset}' needs a path to its CSV file")
        schema = get_schema(config.dataset)
        raw = impute_median(load_csv(config.path, schema))
        raw = subsample(raw, config.subset, mode=config.subset_mode, seed=config.seed)
        rule = schema.rule
    labels = binarize_labels(raw, rule)
    features, scaler = pca_scale(raw.features, config.n_qubits)
    provenance = {
        "source": raw.source,
        "path": str(config.path) if config.path else None,
        "seed": config.seed,
        "subset": config.subset,
        "subset_mode": config.subset_mode,
        "n_samples": int(features.shape[0]),
        "n_positive": int(np.sum(labels > 0)),
        "n_negative": int(np.sum(labels < 0)),
        "pca": scaler.params(),
    }
    logger.info("Prepared %s: %d samples, %d features (explained variance ratio %.4f)",
                raw.source, features.shape[0], features.shape[1], scaler.explained_variance_ratio)
    return PreparedDataset(features, labels, provenance)


def write_prepared(dataset, path):
    """Write features f0..f{N-1} and label to CSV, and the provenance to a JSON sidecar."""
    path = Path(path)
    frame = pd.DataFrame(dataset.features,
                         columns=[f"f{i}" for i in range(dataset.n_features)])
    frame["label"] = dataset.labels.astype(int)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(dataset.provenance, indent=2, sort_keys=True) + "\n")
    return path, sidecar
