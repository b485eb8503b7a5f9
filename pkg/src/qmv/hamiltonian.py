"""Time-dependent edge-local Hamiltonians on the grid.

A Hamiltonian is a sum over lattice edges of ``u_e(t) * h_e`` where ``u_e``
is a scalar schedule and ``h_e`` a two-qubit Hermitian term given by real
Pauli coefficients.  Everything works in natural units (hbar = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .lattice import Edge, Lattice, Region, Site, canonical_edge, grown_region, is_lattice_edge

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = "IXYZ"

DEFAULT_LIGHTCONE_CAP = 14


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------

class Schedule:
    """Scalar coefficient u(t) with closed-form sup and slope bounds."""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def sup_bound(self) -> float:
        """Upper bound on |u(t)| over the evolution window."""
        raise NotImplementedError

    def slope_bound(self) -> float:
        """Upper bound on |u'(t)| wherever u is differentiable."""
        raise NotImplementedError

    def shifted(self, dt: float) -> "Schedule":
        """The schedule t -> u(t + dt)."""
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        """Times where u is not smooth; adaptive integrators split there."""
        return ()


@dataclass(frozen=True)
class Constant(Schedule):
    a: float

    def value(self, t):
        return self.a

    def sup_bound(self):
        return abs(self.a)

    def slope_bound(self):
        return 0.0

    def shifted(self, dt):
        return self


@dataclass(frozen=True)
class Harmonic(Schedule):
    """u(t) = a + b cos(omega t + phi)."""

    a: float
    b: float
    omega: float
    phi: float = 0.0

    def value(self, t):
        return self.a + self.b * math.cos(self.omega * t + self.phi)

    def sup_bound(self):
        # Triangle bound; an upper bound, not necessarily attained on [0, T].
        return abs(self.a) + abs(self.b)

    def slope_bound(self):
        return abs(self.b * self.omega)

    def shifted(self, dt):
        return Harmonic(self.a, self.b, self.omega, self.phi + self.omega * dt)


@dataclass(frozen=True)
class PiecewiseLinear(Schedule):
    """Linear interpolation through sorted (t, value) knots; clamped outside."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.knots) < 1:
            raise ValueError("piecewise-linear schedule needs at least one knot")
        ts = [t for t, _ in self.knots]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("piecewise-linear knots must have strictly increasing times")

    def value(self, t):
        ks = self.knots
        if t <= ks[0][0]:
            return ks[0][1]
        if t >= ks[-1][0]:
            return ks[-1][1]
        for (t0, v0), (t1, v1) in zip(ks, ks[1:]):
            if t <= t1:
                w = (t - t0) / (t1 - t0)
                return v0 + w * (v1 - v0)
        return ks[-1][1]

    def sup_bound(self):
        # Piecewise linear: extremes sit at knots (clamping adds nothing new).
        return max(abs(v) for _, v in self.knots)

    def slope_bound(self):
        if len(self.knots) == 1:
            return 0.0
        return max(
            abs(v1 - v0) / (t1 - t0)
            for (t0, v0), (t1, v1) in zip(self.knots, self.knots[1:])
        )

    def shifted(self, dt):
        return PiecewiseLinear(tuple((t - dt, v) for t, v in self.knots))

    def breakpoints(self):
        return tuple(t for t, _ in self.knots)


# ---------------------------------------------------------------------------
# Two-site terms and edge couplings
# ---------------------------------------------------------------------------

def _pauli_kron_basis():
    basis = {}
    for i, p in enumerate(PAULI_LABELS):
        for j, q in enumerate(PAULI_LABELS):
            basis[(i, j)] = np.kron(PAULI[p], PAULI[q])
    return basis


_KRON_BASIS = _pauli_kron_basis()


@dataclass(frozen=True)
class TwoSiteTerm:
    """A two-qubit Hermitian operator as 16 real Pauli coefficients.

    ``coeffs[i, j]`` multiplies ``sigma_i (x) sigma_j`` with the IXYZ index
    order; the first factor acts on the edge's first site.
    """

    coeffs: tuple  # 4x4 nested tuple of floats

    @staticmethod
    def from_array(arr) -> "TwoSiteTerm":
        a = np.asarray(arr, dtype=float)
        if a.shape != (4, 4):
            raise ValueError(f"expected 4x4 Pauli coefficients, got shape {a.shape}")
        return TwoSiteTerm(tuple(map(tuple, a.tolist())))

    @staticmethod
    def from_labels(coeffs: dict) -> "TwoSiteTerm":
        """Build from a {'XX': 1.0, 'ZI': 0.5, ...} mapping."""
        a = np.zeros((4, 4))
        for label, value in coeffs.items():
            if len(label) != 2 or any(c not in PAULI_LABELS for c in label):
                raise ValueError(f"bad Pauli label {label!r}; expected two of I,X,Y,Z")
            a[PAULI_LABELS.index(label[0]), PAULI_LABELS.index(label[1])] += float(value)
        return TwoSiteTerm.from_array(a)

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        for (i, j), mat in _KRON_BASIS.items():
            c = self.coeffs[i][j]
            if c != 0.0:
                m += c * mat
        return m

    def opnorm(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix()))))


@dataclass(frozen=True)
class EdgeCoupling:
    """All terms sharing one edge: sum_k u_k(t) h_k.

    Entries loaded on the same edge are merged into one coupling with every
    (schedule, term) pair retained, so "at most one coupling per edge" holds
    while the norm bounds stay valid via the triangle inequality.
    """

    edge: Edge
    parts: tuple  # tuple of (Schedule, TwoSiteTerm)

    def matrix(self, t: float) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        for sched, term in self.parts:
            m += sched.value(t) * term.matrix()
        return m

    def norm_bound(self) -> float:
        return sum(s.sup_bound() * h.opnorm() for s, h in self.parts)

    def slope_norm_bound(self) -> float:
        return sum(s.slope_bound() * h.opnorm() for s, h in self.parts)

    def shifted(self, dt: float) -> "EdgeCoupling":
        return EdgeCoupling(self.edge, tuple((s.shifted(dt), h) for s, h in self.parts))


def merge_couplings(entries) -> tuple:
    """Group raw (edge, schedule, term) entries into one coupling per edge."""
    grouped: dict[Edge, list] = {}
    order: list[Edge] = []
    for edge, sched, term in entries:
        edge = canonical_edge(*edge)
        if edge not in grouped:
            grouped[edge] = []
            order.append(edge)
        grouped[edge].append((sched, term))
    return tuple(EdgeCoupling(e, tuple(grouped[e])) for e in order)


@dataclass(frozen=True)
class Hamiltonian:
    """Edge-local time-dependent Hamiltonian on a lattice."""

    lattice: Lattice
    couplings: tuple  # tuple of EdgeCoupling

    def __post_init__(self):
        seen = set()
        for c in self.couplings:
            a, b = c.edge
            if not is_lattice_edge(self.lattice, a, b):
                raise ValueError(f"{c.edge} is not a nearest-neighbour edge of the lattice")
            if c.edge in seen:
                raise ValueError(f"duplicate coupling for edge {c.edge}; merge entries first")
            seen.add(c.edge)

    @staticmethod
    def from_terms(lattice: Lattice, entries) -> "Hamiltonian":
        """Build from raw (edge, schedule, term) triples, merging per edge."""
        return Hamiltonian(lattice, merge_couplings(entries))

    def shifted(self, dt: float) -> "Hamiltonian":
        return Hamiltonian(self.lattice, tuple(c.shifted(dt) for c in self.couplings))


@dataclass(frozen=True)
class RegionHamiltonian:
    """The terms of a Hamiltonian whose edges fit inside one region."""

    region: Region
    couplings: tuple

    @property
    def n_qubits(self) -> int:
        return len(self.region)

    def shifted(self, dt: float) -> "RegionHamiltonian":
        return RegionHamiltonian(self.region, tuple(c.shifted(dt) for c in self.couplings))

    def qubit_pairs(self) -> list[tuple[int, int]]:
        return [
            (self.region.index_of(c.edge[0]), self.region.index_of(c.edge[1]))
            for c in self.couplings
        ]

    def breakpoints(self, horizon: float) -> tuple:
        """Schedule kink times strictly inside (0, horizon), sorted."""
        times = set()
        for coupling in self.couplings:
            for sched, _ in coupling.parts:
                times.update(t for t in sched.breakpoints() if 0.0 < t < horizon)
        return tuple(sorted(times))

    def apply(self, t: float, state: np.ndarray) -> np.ndarray:
        """H(t) @ state for a (2^m,) vector or (2^m, k) matrix, term by term.

        Avoids assembling the dense Hamiltonian; cost is linear in the number
        of couplings instead of quadratic in the Hilbert dimension.
        """
        m = self.n_qubits
        extra = state.shape[1:]
        work = state.reshape((2,) * m + extra)
        out = np.zeros_like(work)
        for coupling, (p, q) in zip(self.couplings, self.qubit_pairs()):
            op = coupling.matrix(t).reshape(2, 2, 2, 2)
            term = np.tensordot(op, work, axes=([2, 3], [p, q]))
            out += np.moveaxis(term, (0, 1), (p, q))
        return out.reshape(state.shape)


def restrict(ham: Hamiltonian, core: Region, depth: int) -> RegionHamiltonian:
    """Terms reachable from ``core`` within graph distance ``depth``.

    The resulting region is ``core`` plus its depth-boundary; exactly the
    couplings with both endpoints inside that region are retained.
    """
    if len(core) == 0:
        raise ValueError("cannot restrict to an empty region")
    if not all(ham.lattice.contains(s) for s in core.sites):
        raise ValueError("region extends outside the lattice")
    region = grown_region(ham.lattice, core, depth)
    kept = tuple(
        c for c in ham.couplings
        if c.edge[0] in region and c.edge[1] in region
    )
    return RegionHamiltonian(region, kept)


def full_region_hamiltonian(ham: Hamiltonian) -> RegionHamiltonian:
    """The Hamiltonian viewed on the whole lattice as one region."""
    return RegionHamiltonian(Region(tuple(ham.lattice.sites())), ham.couplings)


def assemble(ham_a: RegionHamiltonian, t: float,
             cap: int = DEFAULT_LIGHTCONE_CAP) -> np.ndarray:
    """Dense 2^m x 2^m Hermitian matrix of the region Hamiltonian at time t."""
    m = ham_a.n_qubits
    if m > cap:
        raise CapacityError(f"lightcone too large: {m} qubits exceeds cap {cap}")
    dim = 1 << m
    h = np.zeros((dim, dim), dtype=complex)
    for coupling, (p, q) in zip(ham_a.couplings, ham_a.qubit_pairs()):
        h += embed_two_site(coupling.matrix(t), p, q, m)
    return h


def embed_two_site(op4: np.ndarray, p: int, q: int, m: int) -> np.ndarray:
    """Embed a 4x4 operator on qubits (p, q) of an m-qubit register."""
    dim = 1 << m
    eye = np.eye(dim, dtype=complex).reshape((2,) * m + (dim,))
    out = np.tensordot(op4.reshape(2, 2, 2, 2), eye, axes=([2, 3], [p, q]))
    out = np.moveaxis(out, (0, 1), (p, q))
    return out.reshape(dim, dim)


def embed_single_site(op2: np.ndarray, p: int, m: int) -> np.ndarray:
    """Embed a 2x2 operator on qubit p of an m-qubit register."""
    dim = 1 << m
    eye = np.eye(dim, dtype=complex).reshape((2,) * m + (dim,))
    out = np.tensordot(op2, eye, axes=([1], [p]))
    out = np.moveaxis(out, 0, p)
    return out.reshape(dim, dim)


def coupling_bound(ham: Hamiltonian) -> float:
    """g = max over edges of an upper bound on ||u_e(t) h_e||."""
    if not ham.couplings:
        return 0.0
    return max(c.norm_bound() for c in ham.couplings)


def derivative_bound(ham_a: RegionHamiltonian, horizon: float) -> float:
    """Upper bound on max_t ||dH_A/dt|| via the triangle inequality.

    The horizon argument is kept for symmetry with the sup-norm convention;
    the closed-form slope bounds are global, so it does not enter.
    """
    del horizon
    return sum(c.slope_norm_bound() for c in ham_a.couplings)
