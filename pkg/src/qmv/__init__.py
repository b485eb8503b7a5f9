"""Lightcone-restricted classical estimation of quantum mean values.

Estimates <psi(T)| O_1 (x) ... (x) O_n |psi(T)> for short evolutions of
time-dependent nearest-neighbour Hamiltonians on 2D grids.  Each site factor
is Heisenberg-evolved inside a graph-distance lightcone whose radius comes
from a rigorous truncation bound, and the resulting operators are contracted
through an offset strip decomposition, either densely or as column MPS.
"""

from .errors import CapacityError, ConfigError, InfeasibleError
from .lattice import (
    Lattice,
    Region,
    StripDecomposition,
    ball,
    l_boundary,
    strip_partition,
    super_sites,
)
from .hamiltonian import (
    Constant,
    Harmonic,
    Hamiltonian,
    PiecewiseLinear,
    RegionHamiltonian,
    Schedule,
    TwoSiteTerm,
    assemble,
    coupling_bound,
    derivative_bound,
    restrict,
)
from .lightcone import ErrorBudget, lr_error, min_radius, split_budget
from .propagator import (
    PropagatorResult,
    conjugate,
    ode_propagate,
    trotter_error_bound,
    trotter_propagate,
)
from .meanvalue import (
    BackendSpec,
    EvolvedObservable,
    Observable,
    Problem,
    SolverSpec,
    StripState,
    contract,
    evolved_observable,
    mean_value,
    oracle_mean_value,
    strip_state,
)
from .config import load_problem, problem_from_dict

__all__ = [
    "BackendSpec", "CapacityError", "ConfigError", "Constant", "ErrorBudget",
    "EvolvedObservable", "Hamiltonian", "Harmonic", "InfeasibleError",
    "Lattice", "Observable", "PiecewiseLinear", "Problem", "PropagatorResult",
    "Region", "RegionHamiltonian", "Schedule", "SolverSpec",
    "StripDecomposition", "StripState", "TwoSiteTerm", "assemble", "ball",
    "conjugate", "contract", "coupling_bound", "derivative_bound",
    "evolved_observable", "l_boundary", "load_problem", "lr_error",
    "mean_value", "min_radius", "ode_propagate", "oracle_mean_value",
    "problem_from_dict", "restrict", "split_budget", "strip_partition",
    "strip_state", "super_sites", "trotter_error_bound", "trotter_propagate",
]

__version__ = "0.1.0"
