# qklab/svm.py

"""
Soft-Margin SVM over Precomputed Kernels

Dual solver, decision function, slack and margin extraction, and the
cross-evaluation of a dual solution trained on a noisy kernel against the
ideal kernel.

@references
1. J. C. Platt, "Sequential Minimal Optimization: A Fast Algorithm for Training Support Vector Machines", MSR-TR-98-14 (1998)
2. R.-E. Fan, P.-H. Chen and C.-J. Lin, "Working set selection using second order information for training SVM", JMLR 6, 1889-1918 (2005)
3. C.-C. Chang and C.-J. Lin, "LIBSVM: A library for support vector machines", ACM TIST 2(3), 2011

Functions:
    - solve_dual: SMO with second-order working set selection
    - dual_objective / primal_objective / weight_norm_sq: objective values
    - decision_function / predict_accuracy: inference from a dual solution
    - margin_report / noisy_margin_cross_eval: geometric margins
    - kkt_violation / complementarity_sum: optimality diagnostics
    - QSVM: estimator-style wrapper
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import (ConvergenceError, DegenerateMarginError,
                         InvariantViolation, ShapeError, ValidationError)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
MAX_ITER = 1_000_000
DEGENERATE_NORM = 1e-14
# LIBSVM's substitute for a non-positive second derivative along the pair direction
TAU = 1e-12


@dataclass(frozen=True, eq=False)
class LabeledSet:
    """Binary labels in {-1, +1}."""
    labels: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.labels, dtype=float).ravel()
        bad = ~np.isin(y, (-1.0, 1.0))
        if bad.any():
            raise ValidationError(
                f"Labels must be -1 or +1; found {y[bad][0]} at index {int(np.argmax(bad))}")
        object.__setattr__(self, "labels", y)

    @property
    def m(self):
        return self.labels.shape[0]

    @property
    def n_positive(self):
        return int(np.sum(self.labels > 0))

    @property
    def n_negative(self):
        return int(np.sum(self.labels < 0))

    def require_both_classes(self):
        if self.n_positive == 0 or self.n_negative == 0:
            raise ValidationError(
                f"Training needs both classes, got {self.n_positive} positive and "
                f"{self.n_negative} negative labels")
        return self


@dataclass(frozen=True, eq=False)
class DualSolution:
    alphas: np.ndarray
    bias: float
    c: float
    objective: float
    iterations: int = 0
    kkt_violation: float = 0.0

    def validate(self, labels, box_tol=1e-9, eq_tol=1e-6):
        """Box constraints 0 <= alpha <= C and sum alpha_i y_i = 0."""
        y = _as_labels(labels).labels
        a = self.alphas
        if a.min(initial=0.0) < -box_tol or a.max(initial=0.0) > self.c + box_tol:
            raise InvariantViolation(
                f"alphas leave the box [0, {self.c}]: min {a.min():.3e}, max {a.max():.3e}")
        eq = abs(float(np.dot(a, y)))
        if eq > eq_tol:
            raise InvariantViolation(f"|sum alpha_i y_i| = {eq:.3e} exceeds {eq_tol}")
        return self

    @property
    def support(self):
        return np.flatnonzero(self.alphas > 0.0)


@dataclass(frozen=True, eq=False)
class MarginReport:
    """
    Geometric margin of a dual solution on a kernel.

    per_sample_margins are signed distances y_i f(x_i) / ||w||; negative
    entries are misclassified samples.
    """
    weight_norm_sq: float
    margin_sq: float
    per_sample_margins: np.ndarray
    slacks: np.ndarray
    decision_values: np.ndarray

    @property
    def median_margin(self):
        return float(np.median(self.per_sample_margins))


def _as_labels(labels):
    return labels if isinstance(labels, LabeledSet) else LabeledSet(labels)


def _as_kernel(kernel):
    k = np.asarray(kernel, dtype=float)
    if k.ndim != 2:
        raise ShapeError(f"Kernel must be a 2-D matrix, got shape {k.shape}")
    return k


def _check_square(k, m):
    if k.shape != (m, m):
        raise ShapeError(f"Kernel shape {k.shape} does not match {m} samples")


def _prepare(alphas, labels, kernel):
    y = _as_labels(labels).labels
    a = np.asarray(alphas, dtype=float).ravel()
    k = _as_kernel(kernel)
    if a.shape != y.shape:
        raise ShapeError(f"{a.shape[0]} alphas for {y.shape[0]} labels")
    _check_square(k, y.shape[0])
    return a, y, k


def weight_norm_sq(alphas, labels, kernel):
    """
    ||w||^2 = sum_ij alpha_i alpha_j y_i y_j K_ij.

    Any (alpha, K) pairing is accepted, e.g. a noisy solution on the clean kernel.
    """
    a, y, k = _prepare(alphas, labels, kernel)
    ay = a * y
    return float(ay @ k @ ay)


def dual_objective(alphas, labels, kernel):
    """sum_i alpha_i - 1/2 ||w||^2."""
    a, y, k = _prepare(alphas, labels, kernel)
    return float(a.sum()) - 0.5 * weight_norm_sq(a, y, k)


def decision_function(solution, labels, kernel_rows):
    """
    f(x) = sum_j alpha_j y_j K(x, x_j) + b for each row of ``kernel_rows``
    (rows = evaluated samples, columns = training samples).
    """
    y = _as_labels(labels).labels
    rows = _as_kernel(kernel_rows)
    if rows.shape[1] != y.shape[0] or solution.alphas.shape[0] != y.shape[0]:
        raise ShapeError(
            f"Kernel rows have {rows.shape[1]} columns for {y.shape[0]} training samples")
    return rows @ (solution.alphas * y) + solution.bias


def _decision_values(a, y, k, bias):
    return k @ (a * y) + bias


def primal_objective(alphas, labels, kernel, bias, c):
    """1/2 ||w||^2 + C sum_i xi_i with xi_i = max(0, 1 - y_i f(x_i))."""
    a, y, k = _prepare(alphas, labels, kernel)
    slacks = np.maximum(0.0, 1.0 - y * _decision_values(a, y, k, bias))
    return 0.5 * weight_norm_sq(a, y, k) + c * float(slacks.sum())


def complementarity_sum(alphas, labels, kernel, bias):
    """
    sum_i alpha_i (1 - y_i f(x_i)).

    Equals ||alpha||_1 - ||w||^2 whenever sum_i alpha_i y_i = 0, and
    C sum_i xi_i at a clean optimum.
    """
    a, y, k = _prepare(alphas, labels, kernel)
    return float(np.dot(a, 1.0 - y * _decision_values(a, y, k, bias)))


def _working_sets(a, y, c):
    up = ((y > 0) & (a < c)) | ((y < 0) & (a > 0))
    low = ((y > 0) & (a > 0)) | ((y < 0) & (a < c))
    return up, low


def _violation(grad, a, y, c):
    up, low = _working_sets(a, y, c)
    if not up.any() or not low.any():
        return 0.0
    score = -y * grad
    return max(0.0, float(score[up].max() - score[low].min()))


def kkt_violation(alphas, labels, kernel, c):
    """Maximal violating pair gap max_{I_up} -y G - min_{I_low} -y G (0 when optimal)."""
    a, y, k = _prepare(alphas, labels, kernel)
    q = np.outer(y, y) * k
    return _violation(q @ a - 1.0, a, y, c)


def _select_pair(grad, a, y, c, q, q_diag):
    """
    Second-order working set selection: i is the maximal violator in I_up,
    j minimises -b_ij^2 / quad_ij over the I_low candidates violating with i.
    Returns (i, j, maximal violating pair gap).
    """
    up, low = _working_sets(a, y, c)
    score = -y * grad
    # np.argmax / np.argmin return the lowest index among ties
    i = int(np.argmax(np.where(up, score, -np.inf)))
    g_max = score[i]
    gap = float(g_max - np.min(np.where(low, score, np.inf)))
    b = g_max - score
    candidates = low & (b > 0.0)
    if not candidates.any():
        return i, i, gap
    quad = q_diag[i] + q_diag - 2.0 * y[i] * y * q[i]
    quad = np.where(quad > 0.0, quad, TAU)
    j = int(np.argmin(np.where(candidates, -(b * b) / quad, np.inf)))
    return i, j, gap


def _update_pair(a, grad, q, y, c, i, j):
    ai, aj = a[i], a[j]
    if y[i] != y[j]:
        quad = q[i, i] + q[j, j] + 2.0 * q[i, j]
        if quad <= 0.0:
            quad = TAU
        delta = (-grad[i] - grad[j]) / quad
        diff = ai - aj
        ni, nj = ai + delta, aj + delta
        if diff > 0.0:
            if nj < 0.0:
                nj, ni = 0.0, diff
        elif ni < 0.0:
            ni, nj = 0.0, -diff
        if diff > 0.0:
            if ni > c:
                ni, nj = c, c - diff
        elif nj > c:
            nj, ni = c, c + diff
    else:
        quad = q[i, i] + q[j, j] - 2.0 * q[i, j]
        if quad <= 0.0:
            quad = TAU
        delta = (grad[i] - grad[j]) / quad
        total = ai + aj
        ni, nj = ai - delta, aj + delta
        if total > c:
            if ni > c:
                ni, nj = c, total - c
        elif nj < 0.0:
            nj, ni = 0.0, total
        if total > c:
            if nj > c:
                nj, ni = c, total - c
        elif ni < 0.0:
            ni, nj = 0.0, total
    ni = min(max(ni, 0.0), c)
    nj = min(max(nj, 0.0), c)
    grad += q[:, i] * (ni - ai) + q[:, j] * (nj - aj)
    a[i], a[j] = ni, nj


def _bias(grad, a, y, c):
    yg = y * grad
    free = (a > 0.0) & (a < c)
    if free.any():
        return -float(yg[free].mean())
    at_upper = a >= c
    at_lower = a <= 0.0
    ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = float(yg[ub_mask].min()) if ub_mask.any() else np.inf
    lb = float(yg[lb_mask].max()) if lb_mask.any() else -np.inf
    if not np.isfinite(ub) or not np.isfinite(lb):
        finite = [v for v in (ub, lb) if np.isfinite(v)]
        return -finite[0] if finite else 0.0
    return -(ub + lb) / 2.0


def solve_dual(kernel, labels, c, tol=DEFAULT_TOL, max_iter=MAX_ITER):
    """
    Maximise sum alpha - 1/2 sum alpha_i alpha_j y_i y_j K_ij subject to
    0 <= alpha_i <= C and sum alpha_i y_i = 0.

    Parameters:
    kernel (array-like or KernelMatrix): m x m training kernel.
    labels (LabeledSet or array-like): Labels in {-1, +1}, both classes present.
    c (float): Box parameter C > 0.
    tol (float): Stop once the maximal violating pair gap is <= tol.
    max_iter (int): Budget of pair updates.

    Returns:
    DualSolution: Bias is the mean of y_i - sum_j alpha_j y_j K_ij over free
    support vectors, or the midpoint of the feasible bias interval when none
    are free.

    Raises:
    ConvergenceError: when the budget runs out; carries the last iterate.
    """
    labels = _as_labels(labels).require_both_classes()
    y = labels.labels
    k = _as_kernel(kernel)
    _check_square(k, labels.m)
    if not c > 0:
        raise ValidationError(f"C must be positive, got {c}")
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")

    q = np.outer(y, y) * k
    q_diag = np.diag(q).copy()
    a = np.zeros(labels.m)
    grad = -np.ones(labels.m)
    gap = np.inf
    iterations = 0
    while iterations < max_iter:
        i, j, gap = _select_pair(grad, a, y, c, q, q_diag)
        if gap <= tol:
            break
        _update_pair(a, grad, q, y, c, i, j)
        iterations += 1
    else:
        gap = _violation(grad, a, y, c)

    solution = DualSolution(alphas=a, bias=_bias(grad, a, y, c), c=float(c),
                            objective=float(a.sum() - 0.5 * (a @ q @ a)),
                            iterations=iterations, kkt_violation=max(0.0, float(gap)))
    solution.validate(labels)
    if solution.kkt_violation > tol:
        raise ConvergenceError(
            f"SMO did not converge in {max_iter} iterations (KKT violation "
            f"{solution.kkt_violation:.3e} > {tol})",
            solution=solution, kkt_violation=solution.kkt_violation)
    logger.debug("SMO converged after %d iterations, KKT violation %.3e, %d support vectors",
                 iterations, solution.kkt_violation, solution.support.size)
    return solution


def margin_report(solution, kernel, labels, reference_labels=None):
    """
    Weight norm, squared margin, per-sample signed distances and slacks.

    Parameters:
    solution (DualSolution): Dual solution sized for ``kernel``.
    kernel (array-like): Kernel on which ||w|| and f are evaluated.
    labels (array-like): Labels the solution was trained with.
    reference_labels (array-like, optional): Labels used to sign the per-sample
        margins (defaults to ``labels``).

    Raises:
    DegenerateMarginError: if ||w||^2 <= 1e-14.
    """
    a, y, k = _prepare(solution.alphas, labels, kernel)
    y_ref = y if reference_labels is None else _as_labels(reference_labels).labels
    if y_ref.shape != y.shape:
        raise ShapeError(f"{y_ref.shape[0]} reference labels for {y.shape[0]} samples")
    norm_sq = weight_norm_sq(a, y, k)
    if norm_sq <= DEGENERATE_NORM:
        raise DegenerateMarginError(f"||w||^2 = {norm_sq:.3e}; margin undefined")
    f = _decision_values(a, y, k, solution.bias)
    return MarginReport(weight_norm_sq=norm_sq, margin_sq=1.0 / norm_sq,
                        per_sample_margins=y_ref * f / np.sqrt(norm_sq),
                        slacks=np.maximum(0.0, 1.0 - y * f),
                        decision_values=f)


def noisy_margin_cross_eval(noisy_solution, clean_kernel, labels):
    """Squared margin 1 / ||w||^2 of a (noisy) dual solution evaluated on the clean kernel."""
    norm_sq = weight_norm_sq(noisy_solution.alphas, labels, clean_kernel)
    if norm_sq <= DEGENERATE_NORM:
        raise DegenerateMarginError(f"||w||^2 = {norm_sq:.3e} on the clean kernel; margin undefined")
    return 1.0 / norm_sq


def predict_accuracy(solution, train_labels, cross_kernel, test_labels):
    """Fraction of test samples with sign(f(x)) equal to the label; sign(0) counts as +1."""
    y_test = _as_labels(test_labels).labels
    f = decision_function(solution, train_labels, cross_kernel)
    if f.shape[0] != y_test.shape[0]:
        raise ShapeError(f"{f.shape[0]} kernel rows for {y_test.shape[0]} test labels")
    predicted = np.where(f >= 0.0, 1.0, -1.0)
    return float(np.mean(predicted == y_test))


class QSVM:
    """
    Soft-margin SVM on precomputed (quantum) kernels.

    Example:
        model = QSVM(c=1.0).fit(k_train, y_train)
        model.score(k_test_train, y_test)
    """

    def __init__(self, c=1.0, tol=DEFAULT_TOL, max_iter=MAX_ITER):
        self.c = c
        self.tol = tol
        self.max_iter = max_iter
        self.solution_ = None
        self.labels_ = None
        self.kernel_ = None

    def fit(self, kernel, labels):
        self.labels_ = _as_labels(labels)
        self.kernel_ = _as_kernel(kernel)
        self.solution_ = solve_dual(self.kernel_, self.labels_, self.c,
                                    tol=self.tol, max_iter=self.max_iter)
        return self

    def _check_fitted(self):
        if self.solution_ is None:
            raise ValidationError("QSVM is not fitted yet; call fit() first")

    def decision_function(self, kernel_rows):
        self._check_fitted()
        return decision_function(self.solution_, self.labels_, kernel_rows)

    def predict(self, kernel_rows):
        return np.where(self.decision_function(kernel_rows) >= 0.0, 1.0, -1.0)

    def score(self, kernel_rows, labels):
        self._check_fitted()
        return predict_accuracy(self.solution_, self.labels_, kernel_rows, labels)

    def margin_report(self, kernel=None, reference_labels=None):
        """Margins on ``kernel`` (default: the training kernel)."""
        self._check_fitted()
        kernel = self.kernel_ if kernel is None else kernel
        return margin_report(self.solution_, kernel, self.labels_, reference_labels)
