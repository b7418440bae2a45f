# qklab/numerics.py

"""
Dense Linear Algebra and Descriptive Statistics

Thin, validated wrappers over numpy/scipy used by the simulator, the SVM
solver, the data pipeline and the experiment runners. Complex matrices are
plain ``numpy.ndarray`` objects of dtype complex128 (row-major).

@references
1. M. A. Nielsen and I. L. Chuang, "Quantum Computation and Quantum Information", Section 2.1.3 (Pauli matrices)
2. G. H. Golub and C. F. Van Loan, "Matrix Computations", Chapter 8 (symmetric eigenproblem)
3. R. J. Hyndman and Y. Fan, "Sample quantiles in statistical packages", The American Statistician 50(4), 1996

Functions:
    - matmul, kron, trace, dagger: shape-checked matrix algebra
    - symmetric_eigen: descending eigen-decomposition of a real symmetric matrix
    - linear_regression: least squares fit with Pearson correlation
    - summary_stats: median, interpolated quartiles, mean and sample stddev
    - combine_uncertainty: sqrt(sigma_a^2 + sigma_b^2)
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import DegenerateRegressionError, ShapeError, ValidationError

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

# sigma_0 .. sigma_3
PAULIS = (I2, X, Y, Z)

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class RegressionResult:
    """Least squares line ``y = slope * x + intercept``; ``pearson_r`` is NaN when undefined."""
    slope: float
    intercept: float
    pearson_r: float

    @property
    def r_defined(self):
        return not math.isnan(self.pearson_r)


@dataclass(frozen=True)
class SummaryStats:
    median: float
    q1: float
    q3: float
    mean: float
    stddev: float
    count: int


def _as_matrix(a, name):
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    return a


def matmul(a, b):
    """
    Matrix product with an explicit shape check.

    Parameters:
    a (array-like): Left matrix, shape (r, k).
    b (array-like): Right matrix, shape (k, c).

    Returns:
    np.ndarray: The (r, c) product.
    """
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"Cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b):
    """Kronecker product, shape (a.rows*b.rows, a.cols*b.cols)."""
    return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))


def kron_all(matrices):
    """Left-to-right Kronecker product of a non-empty sequence."""
    matrices = list(matrices)
    if not matrices:
        raise ValidationError("kron_all needs at least one matrix")
    out = _as_matrix(matrices[0], "matrices[0]")
    for m in matrices[1:]:
        out = kron(out, m)
    return out


def trace(a):
    """Sum of the diagonal of a square matrix (complex)."""
    a = _as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def dagger(a):
    """Conjugate transpose."""
    return _as_matrix(a, "a").conj().T


def symmetric_eigen(a, tol=SYMMETRY_TOL):
    """
    Eigen-decomposition of a real symmetric matrix.

    Parameters:
    a (array-like): Real symmetric (n, n) matrix.
    tol (float): Largest tolerated entry of |A - A^T|.

    Returns:
    tuple[np.ndarray, np.ndarray]: Eigenvalues sorted in descending order and
    the matching orthonormal eigenvectors as columns. Each eigenvector is
    sign-normalised so that its largest-magnitude entry is positive, which
    makes the decomposition reproducible across runs.
    """
    a = _as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"symmetric_eigen needs a square matrix, got {a.shape}")
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag), initial=0.0) > tol:
            raise ValidationError("symmetric_eigen needs a real matrix")
        a = a.real
    a = a.astype(float)
    asym = np.max(np.abs(a - a.T), initial=0.0)
    if asym > tol:
        raise ValidationError(f"Matrix is not symmetric (max |A - A^T| = {asym:.3e})")

    values, vectors = np.linalg.eigh((a + a.T) / 2.0)
    order = np.argsort(values)[::-1]
    values = values[order]
    vectors = vectors[:, order]
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return values, vectors * signs


def linear_regression(xs, ys):
    """
    Least squares line and Pearson correlation of paired samples.

    Parameters:
    xs (sequence): Predictor values.
    ys (sequence): Response values, same length as ``xs`` (at least 2).

    Returns:
    RegressionResult: slope, intercept and pearson_r. ``pearson_r`` is NaN
    when ``ys`` is constant (the fit is then the horizontal line at its mean).

    Raises:
    DegenerateRegressionError: if ``xs`` has zero variance.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ShapeError(f"xs and ys must be 1-D and equally long, got {xs.shape} and {ys.shape}")
    if xs.size < 2:
        raise ValidationError("linear_regression needs at least 2 points")
    if np.ptp(xs) == 0.0:
        raise DegenerateRegressionError("Slope undefined: all x values are identical")
    if np.ptp(ys) == 0.0:
        return RegressionResult(slope=0.0, intercept=float(ys[0]), pearson_r=math.nan)

    fit = stats.linregress(xs, ys)
    return RegressionResult(slope=float(fit.slope), intercept=float(fit.intercept),
                            pearson_r=float(fit.rvalue))


def summary_stats(values):
    """
    Box-plot style summary of a non-empty sample.

    Quartiles use linear interpolation between order statistics (numpy's
    default ``linear`` method); the standard deviation uses the n-1 divisor
    and is 0.0 for a single value.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValidationError("summary_stats needs at least one value")
    q1, median, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    stddev = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return SummaryStats(median=float(median), q1=float(q1), q3=float(q3),
                        mean=float(np.mean(values)), stddev=stddev, count=int(values.size))


def combine_uncertainty(sigma_a, sigma_b):
    """Uncertainty of a difference A - B of independent quantities."""
    return math.hypot(sigma_a, sigma_b)
