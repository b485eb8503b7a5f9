"""JSON configuration schema: loading, validation and Problem construction.

Every validation failure raises ConfigError with a message naming the
offending field.  The accepted document layout (all optional blocks may be
omitted) is described in the README.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .hamiltonian import Constant, Harmonic, Hamiltonian, PiecewiseLinear, Schedule, TwoSiteTerm
from .lattice import Lattice, canonical_edge, is_lattice_edge
from .meanvalue import BackendSpec, Observable, Problem, SolverSpec

_SOLVER_METHODS = ("trotter", "rk4", "dp5")
_BACKENDS = ("dense", "mps")


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise ConfigError(f"{field}: {message}")


def _get_number(doc: dict, field: str, path: str, *, positive=False,
                non_negative=False, default=None):
    if field not in doc:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{field}: required field is missing")
    value = doc[field]
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{path}.{field}", f"expected a number, got {value!r}")
    if positive:
        _require(value > 0, f"{path}.{field}", f"must be positive, got {value}")
    if non_negative:
        _require(value >= 0, f"{path}.{field}", f"must be non-negative, got {value}")
    return value


def _parse_site(raw, lattice: Lattice, path: str) -> tuple[int, int]:
    _require(isinstance(raw, (list, tuple)) and len(raw) == 2
             and all(isinstance(v, int) for v in raw),
             path, f"expected a [x, y] pair of integers, got {raw!r}")
    site = (raw[0], raw[1])
    _require(lattice.contains(site), path,
             f"site {site} outside the {lattice.nx}x{lattice.ny} lattice")
    return site


def _parse_schedule(raw, path: str) -> Schedule:
    if raw is None:
        return Constant(1.0)
    _require(isinstance(raw, dict), path, f"expected an object, got {raw!r}")
    kind = raw.get("type")
    if kind == "constant":
        return Constant(_get_number(raw, "value", path))
    if kind == "harmonic":
        return Harmonic(
            _get_number(raw, "offset", path, default=0.0),
            _get_number(raw, "amplitude", path),
            _get_number(raw, "frequency", path, non_negative=True),
            _get_number(raw, "phase", path, default=0.0),
        )
    if kind == "piecewise_linear":
        knots = raw.get("knots")
        _require(isinstance(knots, list) and len(knots) >= 1,
                 f"{path}.knots", "expected a non-empty list of [t, value] pairs")
        parsed = []
        for i, knot in enumerate(knots):
            _require(isinstance(knot, (list, tuple)) and len(knot) == 2,
                     f"{path}.knots[{i}]", f"expected [t, value], got {knot!r}")
            parsed.append((float(knot[0]), float(knot[1])))
        try:
            return PiecewiseLinear(tuple(parsed))
        except ValueError as exc:
            raise ConfigError(f"{path}.knots: {exc}") from exc
    raise ConfigError(
        f"{path}.type: expected constant|harmonic|piecewise_linear, got {kind!r}")


def _parse_term_coeffs(raw, path: str) -> TwoSiteTerm:
    _require(isinstance(raw, dict) and raw, path,
             "expected a non-empty mapping of two-letter Pauli labels to numbers")
    try:
        return TwoSiteTerm.from_labels({str(k): float(v) for k, v in raw.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_hamiltonian(doc: dict, lattice: Lattice) -> Hamiltonian:
    raw = doc.get("hamiltonian")
    _require(isinstance(raw, dict), "hamiltonian", "required object is missing")
    entries = []
    listed_edges = set()
    terms = raw.get("terms", [])
    _require(isinstance(terms, list), "hamiltonian.terms", "expected a list")
    for i, item in enumerate(terms):
        path = f"hamiltonian.terms[{i}]"
        _require(isinstance(item, dict), path, f"expected an object, got {item!r}")
        edge_raw = item.get("edge")
        _require(isinstance(edge_raw, (list, tuple)) and len(edge_raw) == 2,
                 f"{path}.edge", f"expected [[x,y],[x,y]], got {edge_raw!r}")
        a = _parse_site(edge_raw[0], lattice, f"{path}.edge[0]")
        b = _parse_site(edge_raw[1], lattice, f"{path}.edge[1]")
        _require(is_lattice_edge(lattice, a, b), f"{path}.edge",
                 f"{a} and {b} are not nearest neighbours")
        edge = canonical_edge(a, b)
        listed_edges.add(edge)
        term = _parse_term_coeffs(item.get("coefficients"), f"{path}.coefficients")
        sched = _parse_schedule(item.get("schedule"), f"{path}.schedule")
        entries.append((edge, sched, term))

    default = raw.get("default_term")
    if default is not None:
        _require(isinstance(default, dict), "hamiltonian.default_term",
                 f"expected an object, got {default!r}")
        term = _parse_term_coeffs(default.get("coefficients"),
                                  "hamiltonian.default_term.coefficients")
        sched = _parse_schedule(default.get("schedule"),
                                "hamiltonian.default_term.schedule")
        for edge in lattice.edges():
            if edge not in listed_edges:
                entries.append((edge, sched, term))
    return Hamiltonian.from_terms(lattice, entries)


def _parse_observable(doc: dict, lattice: Lattice) -> Observable:
    raw = doc.get("observable", {"default": "I"})
    _require(isinstance(raw, dict), "observable", "expected an object")

    def parse_factor(value, path):
        if isinstance(value, str):
            _require(value in "IXYZ" and len(value) == 1, path,
                     f"expected one of I/X/Y/Z, got {value!r}")
            row = np.zeros(4)
            row["IXYZ".index(value)] = 1.0
            return row
        if isinstance(value, (list, tuple)) and len(value) == 4:
            return np.array([float(v) for v in value])
        raise ConfigError(f"{path}: expected a Pauli letter or [cI,cX,cY,cZ], got {value!r}")

    default_row = parse_factor(raw.get("default", "I"), "observable.default")
    coeffs = np.tile(default_row, (lattice.n_sites, 1))
    for i, override in enumerate(raw.get("sites", [])):
        path = f"observable.sites[{i}]"
        _require(isinstance(override, dict), path, f"expected an object, got {override!r}")
        site = _parse_site(override.get("site"), lattice, f"{path}.site")
        key = "pauli" if "pauli" in override else "coefficients"
        _require(key in override, path, "needs a 'pauli' or 'coefficients' entry")
        coeffs[lattice.site_index(site)] = parse_factor(override[key], f"{path}.{key}")
    try:
        return Observable(lattice, coeffs)
    except ValueError as exc:
        raise ConfigError(f"observable: {exc}") from exc


def _parse_solver(doc: dict) -> SolverSpec:
    raw = doc.get("solver", {})
    _require(isinstance(raw, dict), "solver", "expected an object")
    method = raw.get("method", "trotter")
    _require(method in _SOLVER_METHODS, "solver.method",
             f"expected one of {'|'.join(_SOLVER_METHODS)}, got {method!r}")
    steps = raw.get("steps")
    if steps is not None:
        _require(isinstance(steps, int) and steps >= 1, "solver.steps",
                 f"expected a positive integer, got {steps!r}")
    tol = _get_number(raw, "tol", "solver", positive=True, default=1e-12)
    return SolverSpec(method=method, steps=steps, tol=tol)


def _parse_backend(doc: dict) -> BackendSpec:
    raw = doc.get("backend", {})
    _require(isinstance(raw, dict), "backend", "expected an object")
    contraction = raw.get("contraction", "dense")
    _require(contraction in _BACKENDS, "backend.contraction",
             f"expected one of {'|'.join(_BACKENDS)}, got {contraction!r}")
    caps = raw.get("caps", {})
    _require(isinstance(caps, dict), "backend.caps", "expected an object")
    lr_fraction = _get_number(raw, "lr_fraction", "backend", positive=True, default=0.5)
    _require(lr_fraction < 1.0, "backend.lr_fraction",
             f"must be strictly below 1, got {lr_fraction}")
    spec = BackendSpec(
        contraction=contraction,
        lightcone_cap=int(_get_number(caps, "lightcone_qubits", "backend.caps",
                                      positive=True, default=14)),
        dense_cap=int(_get_number(caps, "dense_qubits", "backend.caps",
                                  positive=True, default=20)),
        oracle_cap=int(_get_number(caps, "oracle_qubits", "backend.caps",
                                   positive=True, default=20)),
        lr_fraction=lr_fraction,
        mps_threshold=_get_number(raw, "mps_threshold", "backend",
                                  positive=True, default=1e-12),
    )
    return spec


def problem_from_dict(doc: dict) -> Problem:
    """Validate a parsed configuration document and build the Problem."""
    _require(isinstance(doc, dict), "config", "top level must be an object")
    lat_raw = doc.get("lattice")
    _require(isinstance(lat_raw, dict), "lattice", "required object is missing")
    nx = _get_number(lat_raw, "nx", "lattice", positive=True)
    ny = _get_number(lat_raw, "ny", "lattice", positive=True)
    _require(isinstance(nx, int) and isinstance(ny, int), "lattice",
             "nx and ny must be integers")
    lattice = Lattice(nx, ny)

    horizon = _get_number(doc, "time", "config", non_negative=True)
    delta = _get_number(doc, "delta", "config", positive=True)

    ham = _parse_hamiltonian(doc, lattice)
    obs = _parse_observable(doc, lattice)
    solver = _parse_solver(doc)
    backend = _parse_backend(doc)
    return Problem(hamiltonian=ham, observable=obs, horizon=float(horizon),
                   delta=float(delta), solver=solver, backend=backend)


def load_problem(path) -> Problem:
    """Read a JSON configuration file and build the Problem."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config: file {p} does not exist")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {p} is not valid JSON ({exc})") from exc
    return problem_from_dict(doc)
