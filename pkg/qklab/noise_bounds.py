# qklab/noise_bounds.py

"""
Margin Bounds under Local Depolarising Noise

Closed-form evaluators for the noisy kernel bound, the upper and lower bounds
on the squared margin of an SVM trained on a noisy kernel, and the C' = mC
feasibility range in which those bounds are defined.

Throughout, s = (1 - p)^(2LN) is the decay factor of N qubits under L layers
of local noise with per-qubit probability p in [0, 3/4].

@references
1. V. Vapnik, "Statistical Learning Theory", Wiley (1998)
2. Y. Du et al., "Quantum noise protects quantum classifiers against adversaries", PRR 3, 023153 (2021)

Functions:
    - decay_factor / kernel_noise_bound: entrywise kernel bound
    - margin_upper_bound / hard_margin_upper_bound / margin_lower_bound: margin bounds
    - c_prime_max / c_prime_min / c_prime_min_trivial / c_prime_min_lower: C' limits
    - feasible_c_range / theoretical_c: regularisation selection
    - bound_report / bound_sweep: typed diagnostics over a noise grid
    - weight_norm_contraction: ||w~||^2 / ||w||^2 against the decay factor
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from .exceptions import InfeasibleCError, SingularParameterError, ValidationError
from .quantum_sim import LOCAL_P_MAX
from .svm import weight_norm_sq

logger = logging.getLogger(__name__)

CASE_A = "case-A"
CASE_B = "case-B"
CASE_INVALID = "invalid"

BOUND_SWEEP_COLUMNS = ["p", "decay_factor", "gamma_sq_clean", "gamma_sq_noisy",
                       "upper", "lower", "lower_case", "feasible"]


@dataclass(frozen=True)
class BoundParams:
    """
    Inputs of the margin bounds.

    ``c`` is the regularisation C of the training problem; C' = m * C.
    """
    p: float
    n_qubits: int
    n_layers: int
    m: int
    c: float
    gamma_sq_clean: float
    gamma_sq_noisy_est: Optional[float] = None

    def __post_init__(self):
        _check_p(self.p)
        if self.m < 1:
            raise ValidationError(f"m must be >= 1, got {self.m}")
        if self.c < 0:
            raise ValidationError(f"C must be >= 0, got {self.c}")
        if not self.gamma_sq_clean > 0:
            raise ValidationError(f"gamma_sq_clean must be positive, got {self.gamma_sq_clean}")
        if self.gamma_sq_noisy_est is not None and not self.gamma_sq_noisy_est > 0:
            raise ValidationError(
                f"gamma_sq_noisy_est must be positive, got {self.gamma_sq_noisy_est}")

    @property
    def c_prime(self):
        return self.m * self.c

    @property
    def decay(self):
        return decay_factor(self.p, self.n_qubits, self.n_layers)

    @classmethod
    def from_c_prime(cls, c_prime, p, n_qubits, n_layers, m, gamma_sq_clean,
                     gamma_sq_noisy_est=None):
        if m < 1:
            raise ValidationError(f"m must be >= 1, got {m}")
        return cls(p=p, n_qubits=n_qubits, n_layers=n_layers, m=m, c=c_prime / m,
                   gamma_sq_clean=gamma_sq_clean, gamma_sq_noisy_est=gamma_sq_noisy_est)


@dataclass(frozen=True)
class BoundReport:
    p: float
    decay_factor: float
    upper: float
    lower: float
    lower_case: str
    c_prime: float
    c_prime_max: float
    c_prime_min: float
    feasible: bool


def _check_p(p):
    if not 0.0 <= p <= LOCAL_P_MAX:
        raise ValidationError(f"local p must lie in [0, {LOCAL_P_MAX}], got {p}")


def decay_factor(p, n_qubits, n_layers=1):
    """(1 - p)^(2LN)."""
    _check_p(p)
    return (1.0 - p) ** (2 * n_layers * n_qubits)


def kernel_noise_bound(k_clean, p, n_qubits, n_layers=1):
    """Upper bound s K + (1 - s) on a noisy kernel entry."""
    if not -1e-9 <= k_clean <= 1.0 + 1e-9:
        raise ValidationError(f"Clean kernel value must lie in [0, 1], got {k_clean}")
    s = decay_factor(p, n_qubits, n_layers)
    return s * k_clean + (1.0 - s)


def hard_margin_upper_bound(gamma_sq_clean, p, n_qubits, n_layers=1):
    """gamma^2 s / (2 - s), the C = 0 form of the upper bound."""
    s = decay_factor(p, n_qubits, n_layers)
    return gamma_sq_clean * s / (2.0 - s)


def c_prime_max(gamma_sq_clean, p, n_qubits, n_layers=1):
    """(2 - s) / (2 gamma^2): largest C' for which the upper bound is defined."""
    if not gamma_sq_clean > 0:
        raise ValidationError(f"gamma_sq_clean must be positive, got {gamma_sq_clean}")
    s = decay_factor(p, n_qubits, n_layers)
    return (2.0 - s) / (2.0 * gamma_sq_clean)


def c_prime_min_trivial(gamma_sq_clean, p, n_qubits, n_layers=1):
    """(1 - s) / gamma^2, obtained from the trivial estimate gamma~^2 <= gamma^2."""
    if not gamma_sq_clean > 0:
        raise ValidationError(f"gamma_sq_clean must be positive, got {gamma_sq_clean}")
    s = decay_factor(p, n_qubits, n_layers)
    return (1.0 - s) / gamma_sq_clean


def c_prime_min(gamma_sq_clean, gamma_sq_noisy_est, p, n_qubits, n_layers=1):
    """
    Smallest C' for which the upper bound holds given an estimate of the noisy
    margin: C'_max - s / (2 gamma~^2). Falls back to the trivial form when no
    estimate is given.
    """
    if gamma_sq_noisy_est is None:
        return c_prime_min_trivial(gamma_sq_clean, p, n_qubits, n_layers)
    if not gamma_sq_noisy_est > 0:
        raise ValidationError(f"Noisy margin estimate must be positive, got {gamma_sq_noisy_est}")
    s = decay_factor(p, n_qubits, n_layers)
    return c_prime_max(gamma_sq_clean, p, n_qubits, n_layers) - s / (2.0 * gamma_sq_noisy_est)


def c_prime_min_lower(gamma_sq_clean, gamma_sq_noisy_est, p, n_qubits, n_layers=1):
    """(1 - 2s) / (2 gamma~^2) + 1 / (2 gamma^2): C' needed by the case-A lower bound."""
    if not gamma_sq_clean > 0 or not gamma_sq_noisy_est > 0:
        raise ValidationError("Both squared margins must be positive")
    s = decay_factor(p, n_qubits, n_layers)
    return (1.0 - 2.0 * s) / (2.0 * gamma_sq_noisy_est) + 1.0 / (2.0 * gamma_sq_clean)


def margin_upper_bound(params):
    """
    Upper bound on the noisy squared margin,

        gamma^2 s / (2 (1 - C' gamma^2) - s).

    Raises:
    InfeasibleCError: when the denominator is not positive, i.e. C' >= C'_max.
    """
    s = params.decay
    g = params.gamma_sq_clean
    denominator = 2.0 * (1.0 - params.c_prime * g) - s
    if denominator <= 0.0:
        cmax = c_prime_max(g, params.p, params.n_qubits, params.n_layers)
        raise InfeasibleCError(
            f"C' = {params.c_prime:.6g} must be below C'_max = {cmax:.6g} at p = {params.p}",
            c_prime_max=cmax)
    return g * s / denominator


def _lower_case(s, gc):
    if s <= 0.5 < gc:
        return CASE_A
    if gc < 0.5 <= s:
        return CASE_B
    return CASE_INVALID


def margin_lower_bound(params):
    """
    Lower bound gamma^2 (1 - 2s) / (2 C' gamma^2 - 1) with its validity tag.

    case-A: s <= 1/2 < gamma^2 C'; case-B: gamma^2 C' < 1/2 <= s. Outside both
    the value is still returned, tagged ``invalid``.

    Raises:
    SingularParameterError: when 2 C' gamma^2 = 1 exactly.
    """
    s = params.decay
    g = params.gamma_sq_clean
    gc = g * params.c_prime
    denominator = 2.0 * gc - 1.0
    if denominator == 0.0:
        raise SingularParameterError(
            f"2 C' gamma^2 = 1 (C' = {params.c_prime}, gamma^2 = {g}); lower bound undefined")
    return g * (1.0 - 2.0 * s) / denominator, _lower_case(s, gc)


def feasible_c_range(gamma_sq_clean, noisy_estimates, p_grid, n_qubits, n_layers=1):
    """
    Intersection over the noise grid of [C'_min(p), C'_max(p)).

    Parameters:
    gamma_sq_clean (float): Clean squared margin.
    noisy_estimates (dict): p -> validation estimate of the noisy squared margin
        (a missing p uses the trivial C'_min).
    p_grid (sequence): Local noise probabilities.

    Returns:
    tuple[float, float] or None: Half-open (low, high); None when empty.
    C'_min is floored at 0.
    """
    p_grid = list(p_grid)
    if not p_grid:
        raise ValidationError("p_grid must not be empty")
    low, high = 0.0, math.inf
    for p in p_grid:
        est = noisy_estimates.get(p)
        low = max(low, c_prime_min(gamma_sq_clean, est, p, n_qubits, n_layers))
        high = min(high, c_prime_max(gamma_sq_clean, p, n_qubits, n_layers))
    if low >= high:
        logger.warning("Empty feasible C' range: C'_min %.6g >= C'_max %.6g", low, high)
        return None
    return low, high


def theoretical_c(c0, m, beta):
    """
    C = C0 / m^beta, so C' = m C = C0 m^(1 - beta).

    Returns:
    tuple[float, float]: (C, C').
    """
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    c = c0 / m ** beta
    return c, c * m


def bound_report(params):
    """All bounds for one parameter set; infeasible values are NaN and never raise."""
    s = params.decay
    cmax = c_prime_max(params.gamma_sq_clean, params.p, params.n_qubits, params.n_layers)
    cmin = max(0.0, c_prime_min(params.gamma_sq_clean, params.gamma_sq_noisy_est,
                                params.p, params.n_qubits, params.n_layers))
    try:
        upper = margin_upper_bound(params)
    except InfeasibleCError:
        upper = math.nan
    try:
        lower, case = margin_lower_bound(params)
    except SingularParameterError:
        lower, case = math.nan, CASE_INVALID
    feasible = cmin <= params.c_prime < cmax
    return BoundReport(p=params.p, decay_factor=s, upper=upper, lower=lower, lower_case=case,
                       c_prime=params.c_prime, c_prime_max=cmax, c_prime_min=cmin,
                       feasible=feasible)


def bound_sweep(gamma_sq_clean, c_prime, m, p_grid, n_qubits, n_layers=1,
                noisy_margins=None):
    """
    Bound diagnostics over a grid of local noise probabilities.

    Parameters:
    noisy_margins (dict, optional): p -> empirical or estimated noisy squared margin,
        reported in ``gamma_sq_noisy`` and used for C'_min.

    Returns:
    pd.DataFrame: Columns ``BOUND_SWEEP_COLUMNS``, one row per p.
    """
    noisy_margins = noisy_margins or {}
    rows = []
    for p in p_grid:
        est = noisy_margins.get(p)
        params = BoundParams.from_c_prime(c_prime, p, n_qubits, n_layers, m, gamma_sq_clean,
                                          gamma_sq_noisy_est=est)
        report = bound_report(params)
        rows.append({
            "p": p,
            "decay_factor": report.decay_factor,
            "gamma_sq_clean": gamma_sq_clean,
            "gamma_sq_noisy": math.nan if est is None else est,
            "upper": report.upper,
            "lower": report.lower,
            "lower_case": report.lower_case,
            "feasible": report.feasible,
        })
    return pd.DataFrame(rows, columns=BOUND_SWEEP_COLUMNS)


def weight_norm_contraction(alphas, labels, k_clean, k_noisy, p, n_qubits, n_layers=1,
                            slack=1e-9):
    """
    Compare ||w||^2 on the noisy kernel against s times ||w||^2 on the clean one.

    Returns:
    tuple[float, float, bool]: (ratio noisy/clean, decay factor s, whether
    noisy <= s * clean + slack).
    """
    s = decay_factor(p, n_qubits, n_layers)
    clean = weight_norm_sq(alphas, labels, k_clean)
    noisy = weight_norm_sq(alphas, labels, k_noisy)
    ratio = noisy / clean if clean > 0 else math.nan
    holds = bool(noisy <= s * clean + slack)
    if not holds:
        logger.debug("Weight norm contraction %.6g exceeds decay factor %.6g at p = %s "
                     "(N = %d, L = %d)", ratio, s, p, n_qubits, n_layers)
    return ratio, s, holds


def upper_bound_violations(frame, empirical_column="gamma_sq_noisy", slack=1e-9):
    """Rows of a bound sweep whose empirical margin exceeds the upper bound."""
    upper = frame["upper"].to_numpy(dtype=float)
    empirical = frame[empirical_column].to_numpy(dtype=float)
    mask = np.isfinite(upper) & np.isfinite(empirical) & (empirical > upper + slack)
    return frame.loc[mask]
