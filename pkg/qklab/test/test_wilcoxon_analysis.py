import math

import pandas as pd
import pytest

from qklab.wilcoxon_analysis import pairwise_wilcoxon, paired_wilcoxon, wilcoxon_by_level


def _folds(level, local, glob):
    rows = [{"p_local": level, "model": "local", "fold": k, "accuracy": v}
            for k, v in enumerate(local)]
    rows += [{"p_local": level, "model": "global", "fold": k, "accuracy": v}
             for k, v in enumerate(glob)]
    return rows


def test_paired_wilcoxon_all_positive_differences():
    a = [10.0, 11.0, 12.0, 13.0, 14.0, 15.0]
    b = [9.0, 9.0, 9.0, 9.0, 9.0, 9.0]
    assert paired_wilcoxon(a, b) == pytest.approx(0.03125)


def test_paired_wilcoxon_undefined_cases():
    assert math.isnan(paired_wilcoxon([0.5, 0.6], [0.5, 0.6]))
    assert math.isnan(paired_wilcoxon([0.5, 0.6], [0.5]))
    assert math.isnan(paired_wilcoxon([], []))


def test_pairwise_matrix_is_symmetric():
    data = pd.DataFrame(_folds(0.1, [10, 11, 12, 13, 14, 15], [9] * 6))
    pvals = pairwise_wilcoxon(data, ["global", "local"])
    assert pvals.loc["global", "local"] == pvals.loc["local", "global"]
    assert pvals.loc["local", "local"] == 1.0


def test_pairwise_pairs_by_fold_not_row_order():
    rows = _folds(0.1, [10, 11, 12, 13, 14, 15], [9] * 6)
    shuffled = pd.DataFrame(rows[::-1])
    ordered = pd.DataFrame(rows)
    assert (pairwise_wilcoxon(shuffled, ["global", "local"]).loc["global", "local"]
            == pairwise_wilcoxon(ordered, ["global", "local"]).loc["global", "local"])


def test_wilcoxon_by_level():
    data = pd.DataFrame(_folds(0.0, [0.9] * 5, [0.9] * 5)
                        + _folds(0.2, [10, 11, 12, 13, 14, 15], [9] * 6))
    result = wilcoxon_by_level(data, "p_local")
    assert list(result.columns) == ["p_local", "wilcoxon_p"]
    assert list(result["p_local"]) == [0.0, 0.2]
    assert math.isnan(result.loc[0, "wilcoxon_p"])
    assert result.loc[1, "wilcoxon_p"] == pytest.approx(0.03125)
