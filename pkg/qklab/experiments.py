# qklab/experiments.py

"""
Experiment Runners

Config-driven studies over noisy quantum kernels. Each study prepares the
configured dataset, builds the kernels it needs, trains soft-margin SVMs on
them and writes plot-ready CSV files plus a JSON run record.

Studies:
    - corruption: accuracy and training-margin distribution under label corruption
    - noise-compare: global vs local depolarising noise at matched survival probability
    - bounds: empirical noisy margin against the upper and lower margin bounds
    - select: C0 selection and the feasible C' range of a dataset
    - kernel-export: prepared dataset and kernel matrix as CSV
"""

import json
import logging
import math
import multiprocessing
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import partial
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .datasets import corrupt_labels, prepare_dataset, split, write_prepared
from .exceptions import (DegenerateMarginError, DegenerateRegressionError,
                         InfeasibleCError, InvariantViolation, QklabError,
                         ValidationError)
from .noise_bounds import (CASE_INVALID, bound_sweep, c_prime_max, c_prime_min,
                           feasible_c_range, theoretical_c, weight_norm_contraction)
from .numerics import combine_uncertainty, linear_regression, summary_stats
from .quantum_sim import (CircuitConfig, NoiseSpec, QuantumKernel, equivalent_global_p,
                          per_layer_global_p, survival_probability)
from .svm import (margin_report, noisy_margin_cross_eval, predict_accuracy,
                  solve_dual)
from .wilcoxon_analysis import wilcoxon_by_level

logger = logging.getLogger(__name__)

STUDIES = ("corruption", "noise-compare", "bounds", "select", "kernel-export")
VIOLATION_SLACK = 1e-9


@dataclass
class RunRecord:
    study: str
    config_hash: str
    seed: int
    config: dict
    outputs: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    started_at: str = ""
    finished_at: str = ""

    def to_json(self, path):
        path = Path(path)
        payload = {
            "study": self.study,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "config": self.config,
            "outputs": self.outputs,
            "summary": _jsonable(self.summary),
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path


@dataclass
class SelectionResult:
    c0: float
    gamma_sq_clean: float
    noisy_estimates: dict
    feasible_range: Optional[tuple]
    c0_scores: dict = field(default_factory=dict)
    c_validation: Optional[float] = None

    @property
    def status(self):
        return "feasible" if self.feasible_range is not None else "rejected"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _now():
    return datetime.now(timezone.utc).isoformat()


def write_csv(frame, path):
    """CSV with 17 significant digits and LF line endings."""
    path = Path(path)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def _tag(frame, config):
    frame = frame.copy()
    frame.insert(0, "seed", config.seed)
    frame.insert(0, "config_hash", config.config_hash)
    return frame


def _with_context(error, context):
    error.args = (f"{context}: {error.args[0] if error.args else ''}",) + tuple(error.args[1:])
    return error


def _map(func, items, parallel=False, n_processes=None):
    """
    Apply ``func`` to every item, optionally in a multiprocessing pool.
    Results keep the input order in both modes.
    """
    items = list(items)
    if not parallel or len(items) < 2:
        return [func(item) for item in items]
    if n_processes is None:
        n_processes = multiprocessing.cpu_count()
    with multiprocessing.Pool(processes=n_processes) as pool:
        return pool.map(func, items)


def circuit_for(config):
    return CircuitConfig(n_qubits=config.n_qubits, n_layers=config.n_layers,
                         entanglement=config.entanglement)


def _check_features(config, data):
    if data.n_features != config.n_qubits:
        raise ValidationError(
            f"Prepared dataset has {data.n_features} features for {config.n_qubits} qubits")


def _train_and_score(k, y, train, test, c, tol, max_iter):
    k_train = k[np.ix_(train, train)]
    solution = solve_dual(k_train, y[train], c, tol=tol, max_iter=max_iter)
    accuracy = predict_accuracy(solution, y[train], k[np.ix_(test, train)], y[test])
    return solution, accuracy


# corruption

def _corruption_unit(k, y, folds, config, unit):
    """
    One (fraction, fold) point of the corruption study.
    Helper function for parallel execution in run_corruption_study.
    """
    grid_index, fraction, fold = unit
    train, test = folds[fold]
    test_before = y[test].tobytes()
    try:
        y_train = corrupt_labels(y[train], fraction, seed=[config.seed, fold, grid_index])
        k_train = k[np.ix_(train, train)]
        solution = solve_dual(k_train, y_train, config.c0, tol=config.tol,
                              max_iter=config.max_iter)
        accuracy = predict_accuracy(solution, y_train, k[np.ix_(test, train)], y[test])
        try:
            margins = margin_report(solution, k_train, y_train,
                                    reference_labels=y[train]).per_sample_margins
        except DegenerateMarginError as e:
            logger.warning("fraction %s, fold %d: %s", fraction, fold, e)
            margins = np.full(train.size, math.nan)
    except QklabError as e:
        raise _with_context(e, f"fraction {fraction}, fold {fold}")
    if y[test].tobytes() != test_before:
        raise InvariantViolation("Test labels changed during corruption")
    return {"fraction": fraction, "fold": fold, "accuracy": accuracy, "margins": margins}


def run_corruption_study(config, out_dir=None):
    """
    Label-corruption study on the noiseless kernel.

    For every corruption fraction and CV fold the TRAINING labels are
    corrupted, an SVM is trained and scored on the untouched test labels, and
    the per-sample training margins (signed against the true labels) are
    summarised.

    Returns:
    tuple[RunRecord, dict]: Record and the DataFrames 'margins', 'accuracy', 'regression'.
    """
    started = _now()
    out_dir = Path(out_dir or config.out_dir)
    data = prepare_dataset(config)
    _check_features(config, data)
    qk = QuantumKernel(circuit_for(config), parallel=config.parallel,
                       n_processes=config.n_processes)
    k = qk.kernel_matrix(data.features).entries
    y = data.labels
    folds = split(data.m, folds=config.folds, seed=config.seed).folds
    logger.info("Corruption study on %s: %d samples, %d fractions, %d folds",
                config.name, data.m, len(config.corruption_grid), len(folds))

    units = [(g, f, fold) for g, f in enumerate(config.corruption_grid)
             for fold in range(len(folds))]
    results = _map(partial(_corruption_unit, k, y, folds, config), units,
                   config.parallel, config.n_processes)
    results.sort(key=lambda r: (r["fraction"], r["fold"]))

    margin_rows, accuracy_rows = [], []
    for fraction in config.corruption_grid:
        group = [r for r in results if r["fraction"] == fraction]
        for r in group:
            margin_rows.append(_margin_row(fraction, r["fold"], r["accuracy"], r["margins"]))
        pooled = np.concatenate([r["margins"] for r in group])
        accuracies = [r["accuracy"] for r in group]
        margin_rows.append(_margin_row(fraction, "pooled", float(np.mean(accuracies)), pooled))
        acc = summary_stats(accuracies)
        medians = summary_stats([float(np.nanmedian(r["margins"])) for r in group])
        accuracy_rows.append({
            "fraction": fraction, "fold": "cv",
            "accuracy_mean": acc.mean, "accuracy_std": acc.stddev,
            "median_margin_mean": medians.mean, "median_margin_std": medians.stddev,
            "n_folds": acc.count,
        })
    margins = pd.DataFrame(margin_rows)
    accuracy = pd.DataFrame(accuracy_rows)

    try:
        fit = linear_regression(accuracy["median_margin_mean"], accuracy["accuracy_mean"])
        slope, intercept, r = fit.slope, fit.intercept, fit.pearson_r
    except DegenerateRegressionError as e:
        logger.warning("Accuracy vs median margin regression undefined: %s", e)
        slope = intercept = r = math.nan
    regression = pd.DataFrame([{"fold": "cv", "x": "median_margin_mean", "y": "accuracy_mean",
                                "slope": slope, "intercept": intercept, "pearson_r": r,
                                "n_points": len(accuracy)}])

    frames = {"margins": _tag(margins, config), "accuracy": _tag(accuracy, config),
              "regression": _tag(regression, config)}
    record = _record("corruption", config, started)
    record.outputs = _write_frames(frames, out_dir, config.name, "corruption")
    record.summary = {
        "pearson_r": r, "slope": slope,
        "accuracy_first": accuracy["accuracy_mean"].iloc[0],
        "accuracy_last": accuracy["accuracy_mean"].iloc[-1],
        "median_margin_first": accuracy["median_margin_mean"].iloc[0],
        "median_margin_last": accuracy["median_margin_mean"].iloc[-1],
    }
    logger.info("Corruption study done: Pearson r = %.4f", r)
    return _finish(record, out_dir), frames


def _margin_row(fraction, fold, accuracy, margins):
    finite = margins[np.isfinite(margins)]
    row = {"fraction": fraction, "fold": str(fold), "accuracy": accuracy}
    if finite.size:
        s = summary_stats(finite)
        row.update(q1=s.q1, median=s.median, q3=s.q3, mean=s.mean, stddev=s.stddev,
                   min=float(finite.min()), max=float(finite.max()),
                   negative_fraction=float(np.mean(finite < 0)), count=s.count)
    else:
        row.update(q1=math.nan, median=math.nan, q3=math.nan, mean=math.nan, stddev=math.nan,
                   min=math.nan, max=math.nan, negative_fraction=math.nan, count=0)
    return row


# global vs local

def _noise_compare_unit(features, y, folds, config, unit):
    """
    CV accuracies for one (p_local, model) point.
    Helper function for parallel execution in run_global_vs_local.
    """
    p_local, model, p = unit
    qk = QuantumKernel(circuit_for(config))
    k = qk.kernel_matrix(features, model, p).entries
    rows = []
    for fold, (train, test) in enumerate(folds):
        try:
            _, accuracy = _train_and_score(k, y, train, test, config.c0, config.tol,
                                           config.max_iter)
        except QklabError as e:
            raise _with_context(e, f"{model} noise, p_local {p_local}, fold {fold}")
        rows.append({"p_local": p_local, "model": model, "p": p, "fold": fold,
                     "accuracy": accuracy})
    return rows


def run_global_vs_local(config, out_dir=None):
    """
    Accuracy difference between global and local depolarising noise whose
    survival probabilities are matched, over the local noise grid.

    Global noise uses the per-layer probability whose L-fold composition equals
    the end-of-circuit probability 1 - (1 - p_local)^(N L).
    """
    started = _now()
    out_dir = Path(out_dir or config.out_dir)
    data = prepare_dataset(config)
    _check_features(config, data)
    circuit = circuit_for(config)
    folds = split(data.m, folds=config.folds, seed=config.seed).folds

    units, p_global = [], {}
    for p_local in config.p_grid:
        if not 0.0 <= p_local <= 0.75:
            raise ValidationError(f"Local noise grid value {p_local} outside [0, 0.75]")
        p_end = equivalent_global_p(p_local, circuit.n_qubits, circuit.n_layers)
        p_layer = per_layer_global_p(p_end, circuit.n_layers)
        local = NoiseSpec.for_circuit(circuit, "local", p_local)
        glob = NoiseSpec.for_circuit(circuit, "global", min(p_layer, 1.0))
        if abs(survival_probability(local) - survival_probability(glob)) > 1e-12:
            raise InvariantViolation(f"Survival probabilities differ at p_local = {p_local}")
        p_global[p_local] = (p_end, p_layer)
        units.append((p_local, "global", glob.p))
        units.append((p_local, "local", p_local))
    logger.info("Noise comparison on %s: %d noise levels, %d folds",
                config.name, len(config.p_grid), len(folds))

    results = _map(partial(_noise_compare_unit, data.features, data.labels, folds, config),
                   units, config.parallel, config.n_processes)
    fold_frame = pd.DataFrame([row for rows in results for row in rows])
    fold_frame = fold_frame.sort_values(["p_local", "model", "fold"], kind="mergesort")
    fold_frame = fold_frame.reset_index(drop=True)
    fold_frame["fold"] = fold_frame["fold"].astype(str)

    pvals = wilcoxon_by_level(fold_frame, "p_local")
    rows = []
    for p_local in config.p_grid:
        group = fold_frame[fold_frame["p_local"] == p_local]
        acc_g = summary_stats(group[group["model"] == "global"]["accuracy"])
        acc_l = summary_stats(group[group["model"] == "local"]["accuracy"])
        p_end, p_layer = p_global[p_local]
        rows.append({
            "p_local": p_local, "p_global_equivalent": p_end, "p_global_per_layer": p_layer,
            "fold": "cv",
            "accuracy_global_mean": acc_g.mean, "accuracy_global_std": acc_g.stddev,
            "accuracy_local_mean": acc_l.mean, "accuracy_local_std": acc_l.stddev,
            "difference": acc_g.mean - acc_l.mean,
            "sigma_e": combine_uncertainty(acc_g.stddev, acc_l.stddev),
            "wilcoxon_p": float(pvals.loc[pvals["p_local"] == p_local, "wilcoxon_p"].iloc[0]),
        })
    summary = pd.DataFrame(rows)

    frames = {"folds": _tag(fold_frame, config), "summary": _tag(summary, config)}
    record = _record("noise-compare", config, started)
    record.outputs = _write_frames(frames, out_dir, config.name, "noise_compare")
    record.summary = {"mean_difference": float(summary["difference"].mean()),
                      "max_difference": float(summary["difference"].max())}
    return _finish(record, out_dir), frames


# dataset selection and bounds

def _c0_unit(k, y, folds, config, unit):
    """
    One (C0, fold) accuracy for the C0 search.
    Helper function for parallel execution in select_c0.
    """
    c0, fold = unit
    train, test = folds[fold]
    try:
        _, accuracy = _train_and_score(k, y, train, test, c0, config.tol, config.max_iter)
    except QklabError as e:
        raise _with_context(e, f"C0 {c0}, fold {fold}")
    return accuracy


def select_c0(k, y, config):
    """
    C0 from the grid with the best mean CV accuracy (first in grid order on ties).

    Returns:
    tuple[float, dict]: Chosen C0 and the mean accuracy of every candidate.
    """
    if not config.c0_grid:
        return config.c0, {}
    folds = split(y.shape[0], folds=config.folds, seed=config.seed).folds
    units = [(c0, fold) for c0 in config.c0_grid for fold in range(len(folds))]
    accuracies = _map(partial(_c0_unit, k, y, folds, config), units,
                      config.parallel, config.n_processes)
    scores = {}
    for (c0, _), acc in zip(units, accuracies):
        scores.setdefault(c0, []).append(acc)
    scores = {c0: float(np.mean(v)) for c0, v in scores.items()}
    best = max(config.c0_grid, key=lambda c0: (scores[c0], -config.c0_grid.index(c0)))
    logger.info("Selected C0 = %s (CV accuracy %.4f)", best, scores[best])
    return best, scores


def matched_validation_c(c, m_train, m_valid):
    """
    Box parameter for the validation split that keeps C' = m C of the
    training split.

    ||w||^2 of a saturated noisy solution grows like (m C)^2, so estimating
    the training-split noisy margin on a smaller split needs the same C'.
    """
    if m_train < 1 or m_valid < 1:
        raise ValidationError(f"Split sizes must be >= 1, got {m_train} and {m_valid}")
    return c * m_train / m_valid


def _noisy_estimate_unit(features, y, k_clean, config, c, p):
    """
    Noisy squared margin estimate on the validation split for one p.
    Helper function for parallel execution in _select.
    """
    qk = QuantumKernel(circuit_for(config))
    k_noisy = qk.kernel_matrix(features, "local", p).entries
    try:
        solution = solve_dual(k_noisy, y, c, tol=config.tol, max_iter=config.max_iter)
        return noisy_margin_cross_eval(solution, k_clean, y)
    except DegenerateMarginError as e:
        logger.warning("p = %s: noisy margin estimate undefined (%s); using the trivial C'_min",
                       p, e)
        return None
    except QklabError as e:
        raise _with_context(e, f"validation estimate at p {p}")


def _select(config, data, plan, k_all):
    train, valid = plan.train, plan.test
    k_train = k_all[np.ix_(train, train)]
    y_train = data.labels[train]
    c0, scores = select_c0(k_train, y_train, config)
    solution = solve_dual(k_train, y_train, c0, tol=config.tol, max_iter=config.max_iter)
    gamma_sq = margin_report(solution, k_train, y_train).margin_sq

    c_valid = matched_validation_c(c0, len(train), len(valid))
    logger.debug("Validation C = %.6g keeps C' = %.6g on %d samples", c_valid, c0 * len(train),
                 len(valid))
    estimates = _map(partial(_noisy_estimate_unit, data.features[valid], data.labels[valid],
                             k_all[np.ix_(valid, valid)], config, c_valid),
                     config.p_grid, config.parallel, config.n_processes)
    noisy = {p: est for p, est in zip(config.p_grid, estimates) if est is not None}
    feasible = feasible_c_range(gamma_sq, noisy, config.p_grid, config.n_qubits,
                                config.n_layers)
    if feasible is None:
        logger.warning("Dataset %s rejected: no C' satisfies the bound constraints at every p",
                       config.name)
    else:
        logger.info("Feasible C' range for %s: [%.6g, %.6g)", config.name, *feasible)
    return SelectionResult(c0=c0, gamma_sq_clean=gamma_sq, noisy_estimates=noisy,
                           feasible_range=feasible, c0_scores=scores,
                           c_validation=c_valid)


def _holdout_setup(config):
    data = prepare_dataset(config)
    _check_features(config, data)
    plan = split(data.m, holdout=config.holdout, seed=config.seed)
    qk = QuantumKernel(circuit_for(config), parallel=config.parallel,
                       n_processes=config.n_processes)
    return data, plan, qk, qk.kernel_matrix(data.features).entries


def run_dataset_selection(config, out_dir=None):
    """
    Choose C0, compute the clean margin on the training split, estimate the
    noisy margin on the validation split at every p and intersect the per-p
    [C'_min, C'_max) intervals. An empty intersection rejects the dataset.
    """
    started = _now()
    out_dir = Path(out_dir or config.out_dir)
    data, plan, _, k_all = _holdout_setup(config)
    selection = _select(config, data, plan, k_all)

    per_p = []
    for p in config.p_grid:
        est = selection.noisy_estimates.get(p)
        per_p.append({
            "p": p, "fold": "holdout",
            "gamma_sq_clean": selection.gamma_sq_clean,
            "gamma_sq_noisy_est": math.nan if est is None else est,
            "c_prime_min": max(0.0, c_prime_min(selection.gamma_sq_clean, est, p,
                                                config.n_qubits, config.n_layers)),
            "c_prime_max": c_prime_max(selection.gamma_sq_clean, p, config.n_qubits,
                                       config.n_layers),
        })
    low, high = selection.feasible_range or (math.nan, math.nan)
    _, c_prime_theory = theoretical_c(selection.c0, plan.train.size, config.beta)
    table = pd.DataFrame([{
        "dataset": config.name, "layers": config.n_layers, "c0": selection.c0,
        "samples": data.m, "data_split": config.holdout, "fold": "holdout",
        "gamma_sq_clean": selection.gamma_sq_clean, "c_prime_theoretical": c_prime_theory,
        "c_validation": selection.c_validation,
        "feasible_low": low, "feasible_high": high, "status": selection.status,
    }])
    frames = {"per_p": _tag(pd.DataFrame(per_p), config), "summary": _tag(table, config)}
    record = _record("select", config, started)
    record.outputs = _write_frames(frames, out_dir, config.name, "selection")
    record.summary = {"c0": selection.c0, "gamma_sq_clean": selection.gamma_sq_clean,
                      "c_validation": selection.c_validation,
                      "feasible_low": low, "feasible_high": high,
                      "status": selection.status, "c0_scores": selection.c0_scores}
    return _finish(record, out_dir), frames, selection


def resolve_c_prime(config, selection, m_train):
    """
    C' for the bound study: a number as given, C0 m^(1 - beta) for
    'theoretical', or the midpoint of the feasible range for 'auto'.

    Raises:
    InfeasibleCError: when the range is empty or C' lies outside it.
    """
    feasible = selection.feasible_range
    cmax = c_prime_max(selection.gamma_sq_clean, 0.0, config.n_qubits, config.n_layers)
    if feasible is None:
        raise InfeasibleCError(f"Dataset {config.name} has no feasible C' range",
                               c_prime_max=cmax, feasible_range=None)
    if config.c_prime == "auto":
        return 0.5 * (feasible[0] + feasible[1])
    if config.c_prime == "theoretical":
        c_prime = theoretical_c(selection.c0, m_train, config.beta)[1]
    else:
        c_prime = float(config.c_prime)
    if not feasible[0] <= c_prime < feasible[1]:
        raise InfeasibleCError(
            f"C' = {c_prime:.6g} lies outside the feasible range "
            f"[{feasible[0]:.6g}, {feasible[1]:.6g})", c_prime_max=cmax, feasible_range=feasible)
    return c_prime


def _bound_unit(features, y, k_clean, config, c0, p):
    """
    Empirical noisy margin and weight-norm contraction for one p.
    Helper function for parallel execution in run_bound_validation.
    """
    qk = QuantumKernel(circuit_for(config))
    k_noisy = qk.kernel_matrix(features, "local", p).entries
    try:
        solution = solve_dual(k_noisy, y, c0, tol=config.tol, max_iter=config.max_iter)
        gamma_sq_noisy = noisy_margin_cross_eval(solution, k_clean, y)
    except QklabError as e:
        raise _with_context(e, f"bounds at p {p}")
    ratio, _, holds = weight_norm_contraction(solution.alphas, y, k_clean, k_noisy, p,
                                              config.n_qubits, config.n_layers)
    return {"p": p, "gamma_sq_noisy": gamma_sq_noisy, "contraction_ratio": ratio,
            "contraction_holds": holds}


def run_bound_validation(config, out_dir=None):
    """
    Compare the empirical noisy margin (noisy dual solution on the clean
    kernel) against the upper and lower margin bounds over the local noise grid.

    Raises:
    InfeasibleCError: before any training on the noise grid when C' is outside
        the feasible range.
    InvariantViolation: with ``strict`` and an upper-bound violation (after
        the CSV is written).
    """
    started = _now()
    out_dir = Path(out_dir or config.out_dir)
    data, plan, _, k_all = _holdout_setup(config)
    selection = _select(config, data, plan, k_all)
    train = plan.train
    c_prime = resolve_c_prime(config, selection, train.size)
    logger.info("Bound validation on %s with C0 = %s, C' = %.6g", config.name,
                selection.c0, c_prime)

    k_clean = k_all[np.ix_(train, train)]
    y = data.labels[train]
    results = _map(partial(_bound_unit, data.features[train], y, k_clean, config,
                           selection.c0),
                   config.p_grid, config.parallel, config.n_processes)
    empirical = {r["p"]: r["gamma_sq_noisy"] for r in results}
    frame = bound_sweep(selection.gamma_sq_clean, c_prime, train.size, config.p_grid,
                        config.n_qubits, config.n_layers, noisy_margins=empirical)
    frame.insert(1, "fold", "holdout")
    frame["c_prime"] = c_prime
    frame["contraction_ratio"] = [r["contraction_ratio"] for r in results]
    frame["contraction_holds"] = [r["contraction_holds"] for r in results]
    upper_violation = np.isfinite(frame["upper"]) & (
        frame["gamma_sq_noisy"] > frame["upper"] + VIOLATION_SLACK)
    lower_violation = (frame["lower_case"] != CASE_INVALID) & np.isfinite(frame["lower"]) & (
        frame["lower"] > frame["gamma_sq_noisy"] + VIOLATION_SLACK)
    frame["upper_violation"] = upper_violation
    frame["lower_violation"] = lower_violation

    for _, row in frame[upper_violation | lower_violation].iterrows():
        kind = "upper" if row["upper_violation"] else "lower"
        logger.warning("%s bound violated at p = %s: N = %d, L = %d, m = %d, C' = %.6g, "
                       "gamma^2 = %.6g, noisy gamma^2 = %.6g, upper = %.6g, lower = %.6g (%s)",
                       kind, row["p"], config.n_qubits, config.n_layers, train.size, c_prime,
                       selection.gamma_sq_clean, row["gamma_sq_noisy"], row["upper"],
                       row["lower"], row["lower_case"])

    frames = {"bounds": _tag(frame, config)}
    record = _record("bounds", config, started)
    record.outputs = _write_frames(frames, out_dir, config.name, "bounds")
    record.summary = {"c0": selection.c0, "c_prime": c_prime,
                      "gamma_sq_clean": selection.gamma_sq_clean,
                      "feasible_range": list(selection.feasible_range),
                      "upper_violations": int(upper_violation.sum()),
                      "lower_violations": int(lower_violation.sum())}
    record = _finish(record, out_dir)
    if config.strict and upper_violation.any():
        raise InvariantViolation(
            f"Upper margin bound violated at p = {frame.loc[upper_violation, 'p'].tolist()}")
    return record, frames


# kernel export

def run_kernel_export(config, out_dir=None):
    """Write the prepared dataset and its kernel for the configured noise model at export_p."""
    started = _now()
    out_dir = Path(out_dir or config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = prepare_dataset(config)
    _check_features(config, data)
    qk = QuantumKernel(circuit_for(config), parallel=config.parallel,
                       n_processes=config.n_processes)
    p = config.export_p if config.noise_model != "none" else 0.0
    kernel = qk.kernel_matrix(data.features, config.noise_model, p)
    dataset_path, sidecar = write_prepared(data, out_dir / f"{config.name}_prepared.csv")
    kernel_path = kernel.to_csv(out_dir / f"{config.name}_kernel.csv")
    record = _record("kernel-export", config, started)
    record.outputs = {"prepared": str(dataset_path), "provenance": str(sidecar),
                      "kernel": str(kernel_path)}
    record.summary = {"noise_model": config.noise_model, "p": p, "m": kernel.size}
    return _finish(record, out_dir), kernel


def _record(study, config, started):
    return RunRecord(study=study, config_hash=config.config_hash, seed=config.seed,
                     config=_jsonable(config.to_dict()), started_at=started)


def _write_frames(frames, out_dir, name, study):
    out_dir.mkdir(parents=True, exist_ok=True)
    return {key: str(write_csv(frame, out_dir / f"{name}_{study}_{key}.csv"))
            for key, frame in frames.items()}


def _finish(record, out_dir):
    record.finished_at = _now()
    path = record.to_json(Path(out_dir) / f"{record.config['name']}_{record.study}_run.json")
    logger.info("Run record written to %s", path)
    return record


class ExperimentRunner:
    def __init__(self, config, out_dir=None):
        """
        Runs the studies of one experiment configuration.
        :param config: ExperimentConfig
        :param out_dir: output directory (default: config.out_dir)
        """
        self.config = config
        self.out_dir = out_dir

    def run(self, study='bounds'):
        """
        Run a study by name.

        Parameters:
        -----------
        study : str
            Study code ('corruption', 'noise-compare', 'bounds', 'select', 'kernel-export')

        Returns:
        --------
        RunRecord
            The record of the finished run
        """
        logger.info("Running %s study for %s (config %s, seed %d)", study, self.config.name,
                    self.config.config_hash, self.config.seed)
        if study == 'corruption':
            return run_corruption_study(self.config, self.out_dir)[0]
        elif study == 'noise-compare':
            return run_global_vs_local(self.config, self.out_dir)[0]
        elif study == 'bounds':
            return run_bound_validation(self.config, self.out_dir)[0]
        elif study == 'select':
            return run_dataset_selection(self.config, self.out_dir)[0]
        elif study == 'kernel-export':
            return run_kernel_export(self.config, self.out_dir)[0]
        else:
            raise ValidationError(f"Unknown study: {study}")
