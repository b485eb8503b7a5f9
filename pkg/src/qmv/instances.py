"""Random instance generators used by the benchmark harness and the tests.

The Hamiltonians are normalised so the per-edge coupling bound lands at a
requested g, which keeps lightcone radii (and therefore runtimes) predictable
on small machines.
"""

from __future__ import annotations

import numpy as np

from .hamiltonian import Constant, Harmonic, Hamiltonian, PiecewiseLinear, TwoSiteTerm
from .lattice import Lattice
from .meanvalue import Observable


def random_two_site_term(rng: np.random.Generator, norm: float = 1.0) -> TwoSiteTerm:
    raw = TwoSiteTerm.from_array(rng.uniform(-0.5, 0.5, (4, 4)))
    return TwoSiteTerm.from_array(np.asarray(raw.coeffs) * (norm / raw.opnorm()))


def _random_schedule(rng: np.random.Generator, kind: str, horizon: float,
                     frequency_range: tuple):
    """Returns (schedule, sup_bound) for one edge."""
    if kind == "constant":
        value = rng.uniform(0.4, 1.0) * rng.choice([-1.0, 1.0])
        return Constant(value), abs(value)
    if kind == "harmonic":
        offset = rng.uniform(0.2, 0.5)
        amplitude = rng.uniform(0.3, 0.8)
        sched = Harmonic(offset, amplitude, rng.uniform(*frequency_range),
                         rng.uniform(0, 2 * np.pi))
        return sched, offset + amplitude
    if kind == "piecewise":
        times = np.linspace(0.0, max(horizon, 1e-6), 4)
        values = rng.uniform(0.3, 1.0, 4) * rng.choice([-1.0, 1.0], 4)
        sched = PiecewiseLinear(tuple(zip(times, values)))
        return sched, float(np.max(np.abs(values)))
    raise ValueError(f"unknown schedule kind {kind!r}")


def random_hamiltonian(lattice: Lattice, rng: np.random.Generator, g: float,
                       time_dependent: bool = True,
                       frequency_range: tuple = (0.5, 3.0),
                       schedule_kinds: tuple = None,
                       horizon: float = 1.0) -> Hamiltonian:
    """Random edge terms with coupling bound exactly g on every edge."""
    if schedule_kinds is None:
        schedule_kinds = ("harmonic",) if time_dependent else ("constant",)
    entries = []
    for edge in lattice.edges():
        kind = schedule_kinds[rng.integers(len(schedule_kinds))]
        sched, sup = _random_schedule(rng, kind, horizon, frequency_range)
        entries.append((edge, sched, random_two_site_term(rng, g / sup)))
    return Hamiltonian.from_terms(lattice, entries)


def random_observable(lattice: Lattice, rng: np.random.Generator,
                      z_bias: float = 0.9) -> Observable:
    """Mostly-Z product observable with unit-norm factors.

    A bias towards Z keeps the product mean value away from zero at short
    times (|0..0> is a Z eigenstate), so estimator errors stay visible.
    """
    rows = []
    spread = 1.0 - z_bias
    for _ in range(lattice.n_sites):
        v = rng.uniform(-1.0, 1.0, 4)
        direction = np.array([spread * v[0], 2 * spread * v[1],
                              2 * spread * v[2], 1.0 + 3 * spread * v[3]])
        norm = abs(direction[0]) + np.linalg.norm(direction[1:])
        rows.append(direction / norm)
    return Observable(lattice, np.array(rows))


def chain_region_hamiltonian(n_qubits: int, rng: np.random.Generator,
                             g: float = 1.0, time_dependent: bool = True):
    """Full-region Hamiltonian of a random 1 x n chain, for solver benchmarks."""
    from .hamiltonian import full_region_hamiltonian

    lattice = Lattice(n_qubits, 1)
    ham = random_hamiltonian(lattice, rng, g, time_dependent=time_dependent)
    return full_region_hamiltonian(ham)
