#!/usr/bin/env python
"""
Example demonstrating sequential vs parallel kernel construction.
"""

import time

import numpy as np

from qklab import CircuitConfig, QuantumKernel
from qklab.datasets import make_gaussian_blobs, pca_scale


def create_example_features(n_samples=400, n_qubits=2, seed=7):
    """Two Gaussian blobs reduced to one [0, pi] feature per qubit."""
    raw = make_gaussian_blobs(n_samples, cluster_std=3.0, seed=seed)
    features, _ = pca_scale(raw.features, n_qubits)
    return features


def time_kernel(qk, features, model, p):
    start_time = time.time()
    kernel = qk.kernel_matrix(features, model, p)
    return kernel, time.time() - start_time


def main():
    features = create_example_features()
    config = CircuitConfig(n_qubits=2, n_layers=2)

    print(f"Building a {len(features)} x {len(features)} kernel with local noise p = 0.1...")
    sequential_kernel, sequential_time = time_kernel(QuantumKernel(config), features, 'local', 0.1)
    print(f"Sequential construction completed in {sequential_time:.4f} seconds")

    parallel_kernel, parallel_time = time_kernel(QuantumKernel(config, parallel=True),
                                                 features, 'local', 0.1)
    print(f"Parallel construction completed in {parallel_time:.4f} seconds")

    difference = np.max(np.abs(sequential_kernel.entries - parallel_kernel.entries))
    print("\nComparison:")
    print(f"Sequential time: {sequential_time:.4f} seconds")
    print(f"Parallel time:   {parallel_time:.4f} seconds")
    print(f"Speedup:         {sequential_time / parallel_time:.2f}x")
    print(f"Largest entry difference: {difference:.3e}")

    print("\nBuilding the same kernel with 2 processes...")
    _, parallel_time_2 = time_kernel(QuantumKernel(config, parallel=True, n_processes=2),
                                     features, 'local', 0.1)
    print(f"Parallel construction (2 processes) completed in {parallel_time_2:.4f} seconds")
    print(f"Speedup compared to sequential: {sequential_time / parallel_time_2:.2f}x")


if __name__ == "__main__":
    main()
