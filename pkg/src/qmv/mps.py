"""Column matrix-product states and operators for strip contraction.

A strip state is stored as an MPS whose physical sites are the lattice
columns inside the strip (physical dimension 2^ny).  Evolved observables
arrive as dense matrices on a graph ball; they are factorised into an MPO
over the ball's columns by sequential SVD, padded with identities on the
rows the ball does not touch, and applied column by column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dense import permute_operator_qubits, region_to_column_order_perm
from .lattice import Region

TRUNCATION_THRESHOLD = 1e-12


@dataclass
class ColumnMPS:
    """Open-boundary MPS over consecutive lattice columns.

    ``tensors[k]`` has shape (left bond, 2^ny, right bond) and covers lattice
    column ``col_start + k``; within a column, qubits are ordered by
    increasing row with row 0 most significant.
    """

    col_start: int
    phys_dim: int
    tensors: list = field(default_factory=list)

    @property
    def n_cols(self) -> int:
        return len(self.tensors)

    @staticmethod
    def all_zeros(col_start: int, n_cols: int, phys_dim: int) -> "ColumnMPS":
        tensors = []
        for _ in range(n_cols):
            t = np.zeros((1, phys_dim, 1), dtype=complex)
            t[0, 0, 0] = 1.0
            tensors.append(t)
        return ColumnMPS(col_start, phys_dim, tensors)

    def scale(self, factor: complex) -> None:
        self.tensors[0] = self.tensors[0] * factor

    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    def to_dense(self) -> np.ndarray:
        """Full vector in column-grouped qubit order (leftmost column first)."""
        v = self.tensors[0].reshape(self.tensors[0].shape[0] * self.phys_dim, -1)
        if self.tensors[0].shape[0] != 1:
            raise ValueError("cannot densify an MPS with an open left bond")
        for t in self.tensors[1:]:
            v = np.tensordot(v, t, axes=(1, 0))
            v = v.reshape(-1, t.shape[2])
        if v.shape[1] != 1:
            raise ValueError("cannot densify an MPS with an open right bond")
        return v[:, 0]

    def apply_mpo(self, mpo: "ColumnMPO", threshold: float = TRUNCATION_THRESHOLD) -> None:
        """Apply an MPO covering a sub-range of columns, then recompress."""
        offset = mpo.col_start - self.col_start
        if offset < 0 or offset + mpo.n_cols > self.n_cols:
            raise ValueError("operator columns fall outside the strip")
        for k, w in enumerate(mpo.tensors):
            t = self.tensors[offset + k]
            # (m, o, i, n) x (l, i, r) -> (l m, o, r n)
            new = np.einsum("moin,lir->lmorn", w, t)
            lm = t.shape[0] * w.shape[0]
            rn = t.shape[2] * w.shape[3]
            self.tensors[offset + k] = new.reshape(lm, self.phys_dim, rn)
        self.compress(threshold)

    def compress(self, threshold: float = TRUNCATION_THRESHOLD) -> None:
        """Two-sweep canonicalisation with relative singular-value truncation."""
        ts = self.tensors
        n = len(ts)
        for k in range(n - 1):
            l, d, r = ts[k].shape
            q, rr = np.linalg.qr(ts[k].reshape(l * d, r))
            ts[k] = q.reshape(l, d, -1)
            ts[k + 1] = np.tensordot(rr, ts[k + 1], axes=(1, 0))
        for k in range(n - 1, 0, -1):
            l, d, r = ts[k].shape
            u, s, vh = np.linalg.svd(ts[k].reshape(l, d * r), full_matrices=False)
            keep = max(1, int(np.sum(s > threshold * s[0]))) if s.size else 1
            ts[k] = vh[:keep].reshape(keep, d, r)
            ts[k - 1] = np.tensordot(ts[k - 1], u[:, :keep] * s[:keep], axes=(2, 0))


@dataclass
class ColumnMPO:
    """MPO over consecutive columns; tensors shaped (left, out, in, right)."""

    col_start: int
    tensors: list

    @property
    def n_cols(self) -> int:
        return len(self.tensors)


def mpo_from_ball_operator(op: np.ndarray, region: Region, ny: int,
                           threshold: float = TRUNCATION_THRESHOLD) -> ColumnMPO:
    """Factorise a dense operator on a ball region into a column MPO.

    The operator arrives with the region's row-major qubit order.  It is
    re-ordered column by column, split by sequential SVD (near-lossless
    threshold), and each factor is padded with identities on the rows of the
    column that the ball does not contain.
    """
    m = len(region)
    if op.shape != (1 << m, 1 << m):
        raise ValueError("operator dimension does not match the region")

    by_column = sorted(region.sites, key=lambda s: (s[0], s[1]))
    cols = sorted({s[0] for s in region.sites})
    if cols != list(range(cols[0], cols[-1] + 1)):
        raise ValueError("ball region must span contiguous columns")
    rows_per_col = {c: sorted(s[1] for s in region.sites if s[0] == c) for c in cols}
    for c in cols:
        rows = rows_per_col[c]
        if rows != list(range(rows[0], rows[-1] + 1)):
            raise ValueError("ball rows must be contiguous within each column")

    perm = region_to_column_order_perm(region)
    op_cols = permute_operator_qubits(op, perm, m)

    # Interleave (out_k, in_k) per column and split sequentially.
    qubit_counts = [len(rows_per_col[c]) for c in cols]
    dims = [1 << q for q in qubit_counts]
    shape = tuple(dims) + tuple(dims)
    t = op_cols.reshape(shape)
    k = len(dims)
    t = t.transpose([ax for pair in zip(range(k), range(k, 2 * k)) for ax in pair])
    t = t.reshape([d * d for d in dims])

    raw_tensors = []
    chi = 1
    rest = t.reshape(chi * dims[0] * dims[0], -1)
    for idx in range(k - 1):
        u, s, vh = np.linalg.svd(rest, full_matrices=False)
        keep = max(1, int(np.sum(s > threshold * s[0]))) if s.size else 1
        raw_tensors.append(u[:, :keep].reshape(chi, dims[idx], dims[idx], keep))
        chi = keep
        carry = (s[:keep, None] * vh[:keep])
        if idx + 1 < k - 1:
            rest = carry.reshape(chi * dims[idx + 1] * dims[idx + 1], -1)
        else:
            rest = carry
    raw_tensors.append(rest.reshape(chi, dims[-1], dims[-1], 1))

    padded = []
    for c, tensor in zip(cols, raw_tensors):
        rows = rows_per_col[c]
        above = rows[0]
        below = ny - 1 - rows[-1]
        padded.append(_pad_with_identity(tensor, 1 << above, 1 << below))
    return ColumnMPO(cols[0], padded)


def _pad_with_identity(tensor: np.ndarray, dim_above: int, dim_below: int) -> np.ndarray:
    """Extend a column MPO tensor with identity action on untouched rows."""
    if dim_above == 1 and dim_below == 1:
        return tensor
    eye_above = np.eye(dim_above, dtype=complex)
    eye_below = np.eye(dim_below, dtype=complex)
    out = np.einsum("lbcr,uv,wx->lubwvcxr", tensor, eye_above, eye_below)
    l, r = tensor.shape[0], tensor.shape[3]
    d = dim_above * tensor.shape[1] * dim_below
    return out.reshape(l, d, d, r)


def concatenate(strips: list[ColumnMPS]) -> ColumnMPS:
    """Join strip MPSs (sorted by column) into one full-width MPS."""
    strips = sorted(strips, key=lambda s: s.col_start)
    expected = strips[0].col_start
    tensors = []
    for s in strips:
        if s.col_start != expected:
            raise ValueError("strips do not tile the columns contiguously")
        tensors.extend(s.tensors)
        expected += s.n_cols
    return ColumnMPS(strips[0].col_start, strips[0].phys_dim, tensors)


def overlap(ket: ColumnMPS, bra: ColumnMPS) -> complex:
    """<bra|ket> by a single left-to-right transfer sweep."""
    if ket.n_cols != bra.n_cols or ket.phys_dim != bra.phys_dim:
        raise ValueError("overlap requires matching geometry")
    env = np.ones((1, 1), dtype=complex)
    for a, b in zip(ket.tensors, bra.tensors):
        env = np.einsum("ab,aoc,bod->cd", env, a, b.conj())
    if env.shape != (1, 1):
        raise AssertionError("overlap sweep left open bonds")
    return complex(env[0, 0])
