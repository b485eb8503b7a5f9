"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criterion 6 names a 6x6 lattice, whose brute-force oracle would need a
2^36-amplitude statevector (~1.1 TB); the oracle's own qubit cap rejects it.
The radius-scan property is therefore exercised on the largest oracle-feasible
lattice of the same width (6x3), and the literal 6x6 variant is kept as a
strict xfail documenting the infeasibility.
"""

import math
import time

import numpy as np
import pytest

from qmv.bench import BenchSettings, run_benchmark
from qmv.errors import CapacityError
from qmv.hamiltonian import assemble, full_region_hamiltonian
from qmv.instances import (
    chain_region_hamiltonian,
    random_hamiltonian,
    random_observable,
)
from qmv.lattice import Lattice
from qmv.lightcone import lr_error
from qmv.meanvalue import (
    BackendSpec,
    Observable,
    Problem,
    SolverSpec,
    mean_value,
    oracle_mean_value,
)
from qmv.propagator import (
    conjugate,
    ode_propagate,
    trotter_error_bound,
    trotter_propagate,
    unitarity_defect,
)


def _report(criterion: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] {criterion}: {status}{'  ' + detail if detail else ''}")


def _random_unit_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (a + a.conj().T) / 2
    return h / np.linalg.norm(h, 2)


# ---------------------------------------------------------------------------
# Criterion 1: oracle envelope on random 4x4 instances
# ---------------------------------------------------------------------------

def _envelope_instance(seed: int) -> Problem:
    rng = np.random.default_rng(seed)
    lattice = Lattice(4, 4)
    if seed == 0:
        # One instance pushed past radius 1.  Constant schedules make the
        # sliced propagator exact, so the rigorous slice bound is zero and
        # only the truncation error is at play.
        ham = random_hamiltonian(lattice, rng, g=0.015, time_dependent=False)
        horizon = 0.3
        solver = SolverSpec("trotter")
    else:
        # Time-dependent schedules: the adaptive solver keeps the actual
        # propagator error ~1e-10, which the imaginary-residue contract of
        # the pipeline needs; the budget-minimal slice count would honour
        # the certified bound but leak ~1e-7 into the imaginary part.
        horizon = float(rng.uniform(0.15, 0.3))
        g = float(rng.uniform(0.8e-4, 2.8e-4)) / horizon
        ham = random_hamiltonian(
            lattice, rng, g,
            schedule_kinds=("harmonic", "harmonic", "piecewise"),
            horizon=horizon)
        solver = SolverSpec("dp5")
    return Problem(ham, random_observable(lattice, rng), horizon=horizon,
                   delta=0.1, solver=solver,
                   backend=BackendSpec(lightcone_cap=13))


def test_criterion_1_oracle_envelope():
    ok = False
    worst_ratio = 0.0
    radii = set()
    started = time.perf_counter()
    try:
        for seed in range(20):
            problem = _envelope_instance(seed)
            report = mean_value(problem)
            oracle = oracle_mean_value(problem)
            err = abs(report["mu_estimate"] - oracle["mu_exact"])
            bound = report["budget"]["lr"] + report["budget"]["cs"]
            if problem.solver.method == "trotter":
                assert report["budget"]["cs_is_rigorous"]
            assert err <= bound, f"seed {seed}: error {err:g} above bound {bound:g}"
            assert bound <= problem.delta, f"seed {seed}: bound {bound:g} above delta"
            assert err <= problem.delta
            radii.add(report["lightcone_radius"])
            worst_ratio = max(worst_ratio, err / bound if bound else 0.0)
        elapsed = time.perf_counter() - started
        assert elapsed <= 300.0, f"runtime {elapsed:.1f}s exceeds the 5 minute gate"
        assert radii >= {1, 2}, "instances did not exercise both radii"
        ok = True
    finally:
        _report("criterion 1 (oracle envelope, 20 x 4x4)", ok,
                f"worst err/bound {worst_ratio:.2e}, radii {sorted(radii)}, "
                f"{time.perf_counter() - started:.0f}s")


# ---------------------------------------------------------------------------
# Criterion 2: product-formula error bound and 1/N convergence
# ---------------------------------------------------------------------------

def test_criterion_2_trotter_bound():
    ok = False
    slopes = []
    worst_margin = 0.0
    try:
        rng = np.random.default_rng(2024)
        for k in range(100):
            n = 2 + int(k % 2)
            ham_a = chain_region_hamiltonian(n, rng, g=1.0)
            horizon = float(rng.uniform(0.4, 1.0))
            obs = _random_unit_hermitian(rng, 1 << n)
            ref = ode_propagate(ham_a, horizon, method="dp5", tol=1e-12).matrix
            ref_obs = ref.conj().T @ obs @ ref
            errors = []
            for steps in (10, 30, 100):
                w = trotter_propagate(ham_a, horizon, steps)
                measured = float(np.linalg.norm(conjugate(w, obs) - ref_obs, 2))
                bound = trotter_error_bound(ham_a, 1.0, horizon, steps)
                assert measured <= bound, (
                    f"instance {k}, N={steps}: {measured:g} above bound {bound:g}")
                worst_margin = max(worst_margin, measured / bound)
                errors.append(measured)
            slopes.append(np.polyfit(np.log([10, 30, 100]), np.log(errors), 1)[0])
        mean_slope = float(np.mean(slopes))
        assert abs(mean_slope + 1.0) <= 0.2, f"mean slope {mean_slope:.3f}"
        ok = True
    finally:
        _report("criterion 2 (product-formula bound, 100 instances)", ok,
                f"mean slope {np.mean(slopes):+.3f}, worst measured/bound "
                f"{worst_margin:.2e}")


# ---------------------------------------------------------------------------
# Criterion 3: solver comparison (accuracy ordering at matched instances)
# ---------------------------------------------------------------------------

def test_criterion_3_solver_comparison():
    ok = False
    detail = ""
    try:
        settings = BenchSettings(qubit_counts=[2, 3, 4, 5], repetitions=100,
                                 instances=2, horizon=1.0, g=1.0,
                                 trotter_steps=30, rk4_steps=100, dp5_tol=1e-12)
        rows = run_benchmark(["trotter", "rk4", "dp5"], settings)
        by_method = {}
        for row in rows:
            assert row["repetitions"] >= 100
            by_method.setdefault(row["method"], []).append(row["error_vs_reference"])
        # Fig-2-style ordering: the product formula is the least accurate.
        assert max(by_method["rk4"]) < min(by_method["trotter"])
        assert all(err == 0.0 for err in by_method["dp5"])  # reference by convention

        # Accuracy ratio against an independent finer reference.
        worst_ratio = 0.0
        rng = np.random.default_rng(77)
        for n in settings.qubit_counts:
            for _ in range(3):
                ham_a = chain_region_hamiltonian(n, rng, g=1.0)
                ref = ode_propagate(ham_a, 1.0, method="dp5", tol=1e-13).matrix
                err_dp5 = float(np.linalg.norm(
                    ode_propagate(ham_a, 1.0, method="dp5", tol=1e-12).matrix - ref, 2))
                err_rk4 = float(np.linalg.norm(
                    ode_propagate(ham_a, 1.0, method="rk4", steps=100).matrix - ref, 2))
                err_trotter = float(np.linalg.norm(
                    trotter_propagate(ham_a, 1.0, 30).matrix - ref, 2))
                assert err_dp5 <= 1e-6 * err_trotter, (
                    f"{n} qubits: dp5 {err_dp5:g} vs trotter {err_trotter:g}")
                assert err_rk4 < err_trotter and err_dp5 <= err_rk4
                worst_ratio = max(worst_ratio, err_dp5 / err_trotter)
        detail = f"worst dp5/trotter error ratio {worst_ratio:.2e}"
        ok = True
    finally:
        _report("criterion 3 (solver accuracy ordering)", ok, detail)


# ---------------------------------------------------------------------------
# Criterion 4: truncation-error formula fidelity
# ---------------------------------------------------------------------------

def test_criterion_4_lr_formula_fidelity():
    ok = False
    try:
        reference = math.sqrt(2.0 / math.pi) / 512.0  # 1.5583...e-3
        got = lr_error(4, 1.0, 0.25, 2, 1, 1.0)  # 4 g T (degree-1) = 1
        assert abs(got - reference) <= 1e-12 * reference

        rng = np.random.default_rng(4)
        for _ in range(1000):
            radius = int(rng.integers(1, 14))
            horizon = float(rng.uniform(0.01, 2.0))
            g = float(rng.uniform(0.01, 2.0))
            degree = int(rng.integers(2, 6))
            size = int(rng.integers(1, 5))
            norm = float(rng.uniform(0.05, 1.0))
            x = 4.0 * g * horizon * (degree - 1)
            independent = (math.sqrt(2.0 / math.pi) * size * norm
                           * (x / radius) ** radius / math.sqrt(radius))
            got = lr_error(radius, horizon, g, degree, size, norm)
            assert abs(got - independent) <= 1e-12 * independent
        ok = True
    finally:
        _report("criterion 4 (truncation formula, 1000-point grid)", ok)


# ---------------------------------------------------------------------------
# Criterion 5: invariant suite
# ---------------------------------------------------------------------------

def test_criterion_5_invariants():
    ok = False
    checks = []
    try:
        # Identity observable: exact unity whatever the Hamiltonian.
        lattice = Lattice(4, 4)
        rng = np.random.default_rng(50)
        strong = random_hamiltonian(lattice, rng, 0.9)
        report = mean_value(Problem(strong, Observable.uniform(lattice, "I"),
                                    horizon=0.3, delta=0.1))
        assert abs(report["mu_estimate"] - 1.0) <= 1e-10
        checks.append("identity")

        # T = 0: the product of vacuum expectations, exactly.
        obs = random_observable(lattice, rng)
        report = mean_value(Problem(strong, obs, horizon=0.0, delta=0.1))
        want = float(np.prod(obs.coeffs[:, 0] + obs.coeffs[:, 3]))
        assert abs(report["mu_estimate"] - want) <= 1e-12
        checks.append("t=0 product")

        # Unitarity defect post-projection and spectrum preservation.
        for k in range(6):
            ham_a = chain_region_hamiltonian(2 + k % 2, rng, g=1.0)
            props = [
                trotter_propagate(ham_a, 0.7, 9),
                ode_propagate(ham_a, 0.7, method="rk4", steps=40),
                ode_propagate(ham_a, 0.7, method="dp5", tol=1e-9),
            ]
            for prop in props:
                assert unitarity_defect(prop.matrix) <= 1e-10
                h = _random_unit_hermitian(rng, prop.dim)
                got = np.sort(np.linalg.eigvalsh(conjugate(prop, h)))
                want = np.sort(np.linalg.eigvalsh(h))
                assert np.max(np.abs(got - want)) <= 1e-10
        checks.append("unitarity+spectrum")

        # Dense and MPS pipelines agree on 4x4 and 8x4 instances.
        for nx, ny, g in ((4, 4, 1.1e-3), (8, 4, 5.4e-4)):
            lat = Lattice(nx, ny)
            rng_i = np.random.default_rng(nx * 100 + ny)
            ham = random_hamiltonian(lat, rng_i, g)
            obs_i = random_observable(lat, rng_i)
            values = {}
            for contraction in ("dense", "mps"):
                problem = Problem(ham, obs_i, horizon=0.25, delta=0.1,
                                  solver=SolverSpec("dp5"),
                                  backend=BackendSpec(contraction=contraction))
                values[contraction] = mean_value(problem)["mu_estimate"]
            assert abs(values["dense"] - values["mps"]) <= 1e-8, (nx, ny)
        checks.append("dense=mps on 4x4, 8x4")

        # Hamiltonian term order cannot matter.
        lat = Lattice(3, 3)
        rng_t = np.random.default_rng(51)
        ham = random_hamiltonian(lat, rng_t, 1.5e-3)
        obs_t = random_observable(lat, rng_t)
        from qmv.hamiltonian import Hamiltonian
        shuffled = Hamiltonian(lat, tuple(
            ham.couplings[i] for i in rng_t.permutation(len(ham.couplings))))
        a = mean_value(Problem(ham, obs_t, 0.25, 0.1))["mu_estimate"]
        b = mean_value(Problem(shuffled, obs_t, 0.25, 0.1))["mu_estimate"]
        assert abs(a - b) <= 1e-12
        checks.append("term order")
        ok = True
    finally:
        _report("criterion 5 (invariant suite)", ok, ", ".join(checks))


# ---------------------------------------------------------------------------
# Criterion 6: radius scan with a certified, decreasing envelope
# ---------------------------------------------------------------------------

def _radius_scan_problem(nx: int, ny: int) -> Problem:
    rng = np.random.default_rng(6)
    lattice = Lattice(nx, ny)
    ham = random_hamiltonian(lattice, rng, g=5e-4, time_dependent=False)
    return Problem(ham, Observable.uniform(lattice, "Z"), horizon=0.3,
                   delta=0.1, solver=SolverSpec("trotter"))


def test_criterion_6_radius_scan():
    ok = False
    detail = ""
    try:
        problem = _radius_scan_problem(6, 3)
        oracle = oracle_mean_value(problem)["mu_exact"]
        bounds, errors = [], []
        for radius in (1, 2):
            report = mean_value(problem, radius=radius)
            bounds.append(report["budget"]["lr"] + report["budget"]["cs"])
            errors.append(abs(report["mu_estimate"] - oracle))
        assert bounds[1] < bounds[0], f"bound did not decrease: {bounds}"
        assert errors[0] <= bounds[0], f"L=1: {errors[0]:g} above {bounds[0]:g}"
        assert errors[1] <= bounds[1], f"L=2: {errors[1]:g} above {bounds[1]:g}"
        detail = (f"bounds {bounds[0]:.3e} -> {bounds[1]:.3e}, "
                  f"errors {errors[0]:.3e} -> {errors[1]:.3e} (6x3 stand-in)")
        ok = True
    finally:
        _report("criterion 6 (radius scan, 6x3 oracle-feasible stand-in)", ok, detail)


@pytest.mark.xfail(
    strict=True,
    reason="6x6 lattice needs a 2^36-amplitude oracle statevector (~1.1 TB); "
           "the oracle cap rejects it, so the literal criterion cannot run",
)
def test_criterion_6_radius_scan_literal_6x6():
    problem = _radius_scan_problem(6, 6)
    try:
        oracle_mean_value(problem)  # raises CapacityError: 36 > 20-qubit cap
    except CapacityError as exc:
        _report("criterion 6 (literal 6x6)", False, f"infeasible: {exc}")
        raise
