# This file tells Python that this directory is a package.
from .config import ExperimentConfig, load_config
from .datasets import (PCAScaler, PreparedDataset, RawDataset, SplitPlan, binarize_labels,
                       corrupt_labels, impute_median, load_csv, make_gaussian_blobs, pca_scale,
                       prepare_dataset, split)
from .experiments import (ExperimentRunner, RunRecord, run_bound_validation,
                          run_corruption_study, run_dataset_selection, run_global_vs_local,
                          run_kernel_export)
from .noise_bounds import (BoundParams, BoundReport, bound_sweep, c_prime_max, c_prime_min,
                           feasible_c_range, kernel_noise_bound, margin_lower_bound,
                           margin_upper_bound, theoretical_c)
from .quantum_sim import (CircuitConfig, DensityMatrix, KernelMatrix, NoiseSpec, QuantumKernel,
                          apply_global_depolarizing, apply_local_depolarizing, encode_with_noise,
                          equivalent_global_p, exact_noisy_kernel_element, iqp_encode,
                          kernel_element, kernel_matrix, survival_probability)
from .svm import (QSVM, DualSolution, LabeledSet, MarginReport, dual_objective, margin_report,
                  noisy_margin_cross_eval, predict_accuracy, solve_dual, weight_norm_sq)
from .wilcoxon_analysis import pairwise_wilcoxon, paired_wilcoxon, wilcoxon_by_level

__version__ = "0.1.0"
