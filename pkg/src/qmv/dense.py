"""Dense statevector utilities shared by the pipeline and its oracles.

Conventions: a vector over an ordered qubit list [q_0 .. q_{m-1}] reshapes to
(2,)*m with axis k belonging to qubit q_k, i.e. q_0 is the most significant
bit and index 0 is the all-zeros state.
"""

from __future__ import annotations

import numpy as np

from .lattice import Lattice, Region


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_operator(state: np.ndarray, op: np.ndarray, positions, n_qubits: int) -> np.ndarray:
    """Apply a dense 2^k x 2^k operator on the given qubit positions."""
    k = len(positions)
    if op.shape != (1 << k, 1 << k):
        raise ValueError(f"operator shape {op.shape} does not match {k} positions")
    work = state.reshape((2,) * n_qubits)
    work = np.moveaxis(work, positions, range(k))
    shape = work.shape
    work = op @ work.reshape(1 << k, -1)
    work = np.moveaxis(work.reshape(shape), range(k), positions)
    return work.reshape(state.shape)


def permute_qubits(state: np.ndarray, perm, n_qubits: int) -> np.ndarray:
    """Reorder qubits so new axis j is old axis perm[j]."""
    return state.reshape((2,) * n_qubits).transpose(perm).reshape(state.shape)


def permute_operator_qubits(op: np.ndarray, perm, n_qubits: int) -> np.ndarray:
    """Apply the same qubit reordering to both sides of a dense operator."""
    full = list(perm) + [p + n_qubits for p in perm]
    return op.reshape((2,) * (2 * n_qubits)).transpose(full).reshape(op.shape)


def region_to_column_order_perm(region: Region) -> list[int]:
    """Permutation taking the region's row-major order to column-grouped order.

    Entry j of the result is the row-major position of the j-th site in
    (x, y)-sorted order.
    """
    by_column = sorted(region.sites, key=lambda s: (s[0], s[1]))
    return [region.index_of(s) for s in by_column]


def expand_to_lattice(states, lattice: Lattice) -> np.ndarray:
    """Tensor disjoint region states together into the full row-major vector."""
    full = np.ones(1, dtype=complex)
    qubit_order: list = []
    for region, vec in states:
        full = np.kron(full, vec)
        qubit_order.extend(region.sites)
    target = lattice.sites()
    if sorted(qubit_order) != sorted(target):
        raise ValueError("strip regions do not tile the lattice")
    pos = {site: k for k, site in enumerate(qubit_order)}
    perm = [pos[site] for site in target]
    return permute_qubits(full, perm, len(target))


def _column_tensor(region: Region, vec: np.ndarray, ny: int) -> np.ndarray:
    """Reshape a strip vector into one axis of size 2^ny per lattice column."""
    q = len(region)
    if q % ny:
        raise ValueError("strip does not consist of full lattice columns")
    perm = region_to_column_order_perm(region)
    by_cols = permute_qubits(vec, perm, q)
    return by_cols.reshape((1 << ny,) * (q // ny))


def sweep_contract(states_a, states_b, lattice: Lattice) -> complex:
    """<B|A> for two families of column-strip states, one column at a time.

    Both families must tile the lattice columns.  The running boundary couples
    the not-yet-consumed columns of the currently open A strip with those of
    the open B strip, so memory stays bounded by per-strip sizes instead of
    the full lattice dimension.
    """
    d = 1 << lattice.ny

    def prepared(states):
        out = []
        for region, vec in sorted(states, key=lambda sv: sv[0].columns()[0]):
            c0, c1 = region.columns()
            out.append((c0, c1 + 1, _column_tensor(region, vec, lattice.ny)))
        cols = [c for c0, c1, _ in out for c in range(c0, c1)]
        if cols != list(range(lattice.nx)):
            raise ValueError("strip regions do not tile the lattice columns")
        return out

    side_a = prepared(states_a)
    side_b = prepared([(r, v.conj()) for r, v in states_b])

    boundary = np.ones((1, 1), dtype=complex)
    ia = ib = 0
    rem_a = rem_b = 0  # columns of the open strip still unconsumed

    for c in range(lattice.nx):
        opening_a = side_a[ia][0] == c
        opening_b = side_b[ib][0] == c
        width_a = side_a[ia][1] - side_a[ia][0]
        width_b = side_b[ib][1] - side_b[ib][0]
        rest_a = d ** (width_a - 1 if opening_a else rem_a - 1)
        rest_b = d ** (width_b - 1 if opening_b else rem_b - 1)

        if opening_a and opening_b:
            ta = side_a[ia][2].reshape(d, rest_a)
            tb = side_b[ib][2].reshape(d, rest_b)
            boundary = np.einsum("sa,sb->ab", ta, tb) * boundary[0, 0]
        elif opening_a:
            ta = side_a[ia][2].reshape(d, rest_a)
            mb = boundary.reshape(d, rest_b)
            boundary = np.einsum("sa,sb->ab", ta, mb)
        elif opening_b:
            tb = side_b[ib][2].reshape(d, rest_b)
            ma = boundary.reshape(d, rest_a)
            boundary = np.einsum("sa,sb->ab", ma, tb)
        else:
            boundary = np.einsum(
                "sasb->ab", boundary.reshape(d, rest_a, d, rest_b))

        rem_a = (width_a if opening_a else rem_a) - 1
        rem_b = (width_b if opening_b else rem_b) - 1
        if rem_a == 0 and ia + 1 < len(side_a):
            ia += 1
        if rem_b == 0 and ib + 1 < len(side_b):
            ib += 1

    if boundary.shape != (1, 1):
        raise AssertionError("sweep did not close all strips")
    return complex(boundary[0, 0])
