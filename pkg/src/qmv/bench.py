"""Solver benchmark harness: wall time and accuracy across qubit counts.

For each qubit count a set of random time-dependent chain Hamiltonians is
generated; every method computes the full propagator repeatedly for timing,
and its accuracy is measured against the adaptive solver at its reference
tolerance.  Memory is reported analytically (dominant buffer counts times the
dense matrix size), since absolute OS numbers are machine noise.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .instances import chain_region_hamiltonian
from .propagator import ode_propagate, trotter_propagate

CSV_COLUMNS = [
    "method", "qubits", "repetitions", "min_wall_seconds", "mean_wall_seconds",
    "error_vs_reference", "peak_matrix_bytes",
]

REFERENCE_TOL = 1e-12

# Dominant simultaneously-live dense buffers per method: the propagator plus
# workspace (slice exponential and eigenvector matrix for the product formula,
# stage slopes for the Runge-Kutta pair).
_BUFFER_COUNTS = {"trotter": 4, "rk4": 7, "dp5": 11}


@dataclass
class BenchSettings:
    qubit_counts: list = field(default_factory=lambda: [2, 3, 4, 5])
    repetitions: int = 100
    instances: int = 5
    horizon: float = 1.0
    g: float = 1.0
    trotter_steps: int = 30
    rk4_steps: int = 100
    dp5_tol: float = 1e-12
    seed: int = 0


def _run_method(method: str, ham_a, settings: BenchSettings):
    if method == "trotter":
        return trotter_propagate(ham_a, settings.horizon, settings.trotter_steps)
    if method == "rk4":
        return ode_propagate(ham_a, settings.horizon, method="rk4",
                             steps=settings.rk4_steps)
    if method == "dp5":
        return ode_propagate(ham_a, settings.horizon, method="dp5",
                             tol=settings.dp5_tol)
    raise ValueError(f"unknown benchmark method {method!r}")


def peak_matrix_bytes(method: str, n_qubits: int) -> int:
    dim = 1 << n_qubits
    return _BUFFER_COUNTS[method] * dim * dim * 16


def run_benchmark(methods, settings: BenchSettings) -> list[dict]:
    """Benchmark the requested methods; returns one row dict per data point."""
    for method in methods:
        if method not in _BUFFER_COUNTS:
            raise ValueError(f"unknown benchmark method {method!r}")

    rows = []
    for n in settings.qubit_counts:
        rng = np.random.default_rng(settings.seed + n)
        hams = [chain_region_hamiltonian(n, rng, settings.g)
                for _ in range(settings.instances)]
        references = [ode_propagate(h, settings.horizon, method="dp5",
                                    tol=REFERENCE_TOL).matrix for h in hams]

        for method in methods:
            walls = []
            worst_error = 0.0
            reps_per_instance = max(1, settings.repetitions // settings.instances)
            for ham_a, ref in zip(hams, references):
                result = None
                for _ in range(reps_per_instance):
                    t0 = time.perf_counter()
                    result = _run_method(method, ham_a, settings)
                    walls.append(time.perf_counter() - t0)
                if method == "dp5" and settings.dp5_tol == REFERENCE_TOL:
                    error = 0.0  # this run is the reference by convention
                else:
                    error = float(np.linalg.norm(result.matrix - ref, 2))
                worst_error = max(worst_error, error)
            rows.append({
                "method": method,
                "qubits": n,
                "repetitions": len(walls),
                "min_wall_seconds": min(walls),
                "mean_wall_seconds": sum(walls) / len(walls),
                "error_vs_reference": worst_error,
                "peak_matrix_bytes": peak_matrix_bytes(method, n),
            })
    return rows


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
