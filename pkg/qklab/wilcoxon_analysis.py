# qklab/wilcoxon_analysis.py

"""
Wilcoxon Signed-Rank Analysis for Noise Models

This module compares the per-fold test accuracies obtained with different
noise models (e.g. global vs local depolarising noise at matched survival
probability) using the Wilcoxon signed-rank test. Folds are the pairing unit:
fold k of every model uses the same train/test partition.

@references
1. Wilcoxon F. (1945) Individual comparisons by ranking methods. Biometrics Bulletin 1(6):80-83
2. J. Demsar, "Statistical comparisons of classifiers over multiple data sets", JMLR 7, 1-30 (2006)
"""

import itertools
import logging
import math

import numpy as np
import pandas as pd
from scipy.stats import wilcoxon

logger = logging.getLogger(__name__)


def paired_wilcoxon(a, b):
    """
    Two-sided signed-rank p-value of paired samples.

    Returns NaN when the lengths differ, when fewer than one non-zero
    difference exists, or when scipy rejects the input.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size == 0:
        return math.nan
    if np.all(a - b == 0.0):
        return math.nan
    try:
        _, p = wilcoxon(a, b)
    except ValueError as e:
        logger.debug("Wilcoxon test not computed: %s", e)
        return math.nan
    return float(p)


def pairwise_wilcoxon(data: pd.DataFrame, models: list, metric_col: str = 'accuracy',
                      pair_col: str = 'fold') -> pd.DataFrame:
    """
    Perform pairwise Wilcoxon signed-rank test on multiple noise models.

    Parameters:
    data (pd.DataFrame): DataFrame with 'model', ``pair_col`` and metric column.
    models (list): Models to compare.
    metric_col (str): Metric column name (default 'accuracy').
    pair_col (str): Column pairing observations across models (default 'fold').

    Returns:
    pd.DataFrame: Symmetric matrix of p-values.

    Example:
    >>> pvals = pairwise_wilcoxon(folds, ['global', 'local'])
    """
    results = pd.DataFrame(index=models, columns=models, dtype='float')

    for m1, m2 in itertools.combinations(models, 2):
        d1 = data[data['model'] == m1].sort_values(pair_col)[metric_col].values
        d2 = data[data['model'] == m2].sort_values(pair_col)[metric_col].values
        p = paired_wilcoxon(d1, d2)
        results.loc[m1, m2] = p
        results.loc[m2, m1] = p

    for m in models:
        results.loc[m, m] = 1.0

    return results


def wilcoxon_by_level(data: pd.DataFrame, level_col: str, models=('global', 'local'),
                      metric_col: str = 'accuracy', pair_col: str = 'fold') -> pd.DataFrame:
    """
    Compare two models separately at every value of ``level_col`` (e.g. p_local).

    Returns:
    pd.DataFrame: Columns ``level_col`` and 'wilcoxon_p', sorted by level.
    """
    first, second = models
    rows = []
    for level, group in data.groupby(level_col, sort=True):
        pvals = pairwise_wilcoxon(group, [first, second], metric_col, pair_col)
        rows.append({level_col: level, 'wilcoxon_p': pvals.loc[first, second]})
    return pd.DataFrame(rows, columns=[level_col, 'wilcoxon_p'])
