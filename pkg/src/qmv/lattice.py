"""2D grid geometry: sites, edges, graph-distance balls and strip partitions.

Sites are ``(x, y)`` pairs with ``0 <= x < nx`` and ``0 <= y < ny``.  The
canonical ("row-major") ordering used for qubit indexing everywhere in this
package sorts sites by ``(y, x)``, i.e. row by row.  Edges connect nearest
neighbours with open boundary conditions, so the graph distance between two
sites equals their Manhattan distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InfeasibleError

Site = tuple[int, int]
Edge = tuple[Site, Site]


@dataclass(frozen=True)
class Lattice:
    """An ``nx`` x ``ny`` rectangular grid of qubits."""

    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"lattice dimensions must be positive, got {self.nx}x{self.ny}")

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    def sites(self) -> list[Site]:
        """All sites in canonical row-major order."""
        return [(x, y) for y in range(self.ny) for x in range(self.nx)]

    def edges(self) -> list[Edge]:
        """Nearest-neighbour edges, open boundary, canonically oriented."""
        out: list[Edge] = []
        for y in range(self.ny):
            for x in range(self.nx):
                if x + 1 < self.nx:
                    out.append(((x, y), (x + 1, y)))
                if y + 1 < self.ny:
                    out.append(((x, y), (x, y + 1)))
        return out

    def contains(self, site: Site) -> bool:
        x, y = site
        return 0 <= x < self.nx and 0 <= y < self.ny

    def max_degree(self) -> int:
        """Maximum vertex degree of the grid graph (4 once nx, ny >= 3)."""
        return min(self.nx - 1, 2) + min(self.ny - 1, 2)

    def site_index(self, site: Site) -> int:
        if not self.contains(site):
            raise ValueError(f"site {site} outside {self.nx}x{self.ny} lattice")
        x, y = site
        return y * self.nx + x


def canonical_edge(a: Site, b: Site) -> Edge:
    """Normalise an edge so the lexicographically (y, x)-smaller site is first."""
    return (a, b) if (a[1], a[0]) <= (b[1], b[0]) else (b, a)


def is_lattice_edge(lattice: Lattice, a: Site, b: Site) -> bool:
    if not (lattice.contains(a) and lattice.contains(b)):
        return False
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


@dataclass(frozen=True)
class Region:
    """An ordered set of sites; order defines the qubit <-> tensor slot map."""

    sites: tuple[Site, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        ordered = tuple(sorted(set(self.sites), key=lambda s: (s[1], s[0])))
        object.__setattr__(self, "sites", ordered)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.sites)

    def __contains__(self, site: Site) -> bool:
        return site in self._index

    def __iter__(self):
        return iter(self.sites)

    def index_of(self, site: Site) -> int:
        return self._index[site]

    def issubset(self, other: "Region") -> bool:
        return all(s in other for s in self.sites)

    def columns(self) -> tuple[int, int]:
        """(min, max) column index spanned by the region."""
        xs = [s[0] for s in self.sites]
        return min(xs), max(xs)


def manhattan(a: Site, b: Site) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def ball(lattice: Lattice, j: Site, radius: int) -> Region:
    """All lattice sites within graph distance ``radius`` of site ``j``.

    On the open-boundary grid the graph distance equals the Manhattan
    distance, so the ball is the (lattice-clipped) diamond around ``j``.
    """
    if not lattice.contains(j):
        raise ValueError(f"site {j} outside {lattice.nx}x{lattice.ny} lattice")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    x0, y0 = j
    sites = [
        (x, y)
        for y in range(max(0, y0 - radius), min(lattice.ny, y0 + radius + 1))
        for x in range(max(0, x0 - radius), min(lattice.nx, x0 + radius + 1))
        if abs(x - x0) + abs(y - y0) <= radius
    ]
    return Region(tuple(sites))


def l_boundary(lattice: Lattice, region: Region, depth: int) -> Region:
    """Sites at graph distance 1..depth from ``region``, excluding the region."""
    if len(region) == 0:
        raise ValueError("boundary of an empty region is undefined")
    if depth < 1:
        raise ValueError("boundary depth must be >= 1")
    out = []
    for site in lattice.sites():
        if site in region:
            continue
        if min(manhattan(site, a) for a in region.sites) <= depth:
            out.append(site)
    return Region(tuple(out))


def grown_region(lattice: Lattice, region: Region, depth: int) -> Region:
    """``region`` together with its depth-boundary."""
    if depth == 0:
        return region
    return Region(region.sites + l_boundary(lattice, region, depth).sites)


def _column_region(lattice: Lattice, c0: int, c1: int) -> Region:
    """All sites with column index in [c0, c1)."""
    return Region(tuple((x, y) for y in range(lattice.ny) for x in range(c0, c1)))


@dataclass(frozen=True)
class Strip:
    """A contiguous column range of the lattice with its central column range."""

    col_start: int
    col_stop: int
    center_start: int
    center_stop: int
    region: Region
    center: Region


@dataclass(frozen=True)
class StripDecomposition:
    """Two offset partitions of the lattice into full-height column strips.

    The central column ranges of the two partitions together tile the lattice
    exactly once, and every site of a central range keeps all of its
    radius-``radius`` ball inside the owning strip.
    """

    lattice: Lattice
    radius: int
    strips_a: tuple[Strip, ...]
    strips_b: tuple[Strip, ...]
    assignment: dict  # site -> ("A" | "B", strip index)

    def owning_strip(self, site: Site) -> Strip:
        part, idx = self.assignment[site]
        return (self.strips_a if part == "A" else self.strips_b)[idx]


def _build_strips(lattice: Lattice, bounds: list[int], radius: int,
                  center_ranges: list[tuple[int, int]]) -> tuple[Strip, ...]:
    strips = []
    for (c0, c1), (m0, m1) in zip(zip(bounds[:-1], bounds[1:]), center_ranges):
        strips.append(Strip(c0, c1, m0, m1,
                            _column_region(lattice, c0, c1),
                            _column_region(lattice, m0, m1)))
    return tuple(strips)


def strip_partition(lattice: Lattice, radius: int) -> StripDecomposition:
    """Decompose the lattice into two offset families of width-4L strips.

    Partition A starts at column 0; partition B is shifted by 2L and gains a
    narrow leading strip.  The last strip of each partition absorbs any
    remainder columns, and every column lands in exactly one central range.
    The margin property (ball(s, L) inside the owning strip for every central
    site s) is re-verified on construction for the padded edge strips.
    """
    if radius < 1:
        raise ValueError("strip radius must be >= 1")
    nx, width = lattice.nx, 4 * radius
    if width > nx:
        raise InfeasibleError(
            f"lattice too narrow for this radius: need 4*{radius} <= nx={nx}")

    # Partition A: [0, 4L), [4L, 8L), ...; last strip absorbs the remainder.
    n_a = nx // width
    bounds_a = [k * width for k in range(n_a)] + [nx]
    centers_a = [(c0 + radius, c0 + 3 * radius) for c0 in bounds_a[:-1]]

    # Partition B: narrow [0, 2L) edge strip, then width-4L strips offset by
    # 2L; the final strip absorbs the remainder so every non-A-central column
    # keeps an L margin inside its B strip.
    half = 2 * radius
    bounds_b = [0] + [half + k * width for k in range(n_a)] + [nx]
    # B centers are the complement of the A centers, split at the B bounds.
    a_center_cols = set()
    for m0, m1 in centers_a:
        a_center_cols.update(range(m0, m1))
    centers_b = []
    for c0, c1 in zip(bounds_b[:-1], bounds_b[1:]):
        cols = [c for c in range(c0, c1) if c not in a_center_cols]
        if cols:
            if max(cols) - min(cols) + 1 != len(cols):
                raise AssertionError("B central columns are not contiguous")
            centers_b.append((min(cols), max(cols) + 1))
        else:
            centers_b.append((c0, c0))

    strips_a = _build_strips(lattice, bounds_a, radius, centers_a)
    strips_b = _build_strips(lattice, bounds_b, radius, centers_b)

    assignment: dict = {}
    for part, strips in (("A", strips_a), ("B", strips_b)):
        for idx, strip in enumerate(strips):
            for site in strip.center.sites:
                if site in assignment:
                    raise AssertionError(f"site {site} assigned twice")
                assignment[site] = (part, idx)
    if len(assignment) != lattice.n_sites:
        raise AssertionError("central regions do not tile the lattice")

    # Margin check for all strips, padded edge strips included.
    for part, strips in (("A", strips_a), ("B", strips_b)):
        for strip in strips:
            for site in strip.center.sites:
                if not ball(lattice, site, radius).issubset(strip.region):
                    raise AssertionError(
                        f"margin violated at {site} in {part} strip "
                        f"[{strip.col_start},{strip.col_stop})")

    return StripDecomposition(lattice, radius, strips_a, strips_b, assignment)


def single_strip_decomposition(lattice: Lattice) -> StripDecomposition:
    """Degenerate decomposition: the whole lattice as one A strip.

    Used when 4L exceeds the lattice width, where no genuine strip partition
    exists; the B partition is one operator-free strip so the two-sided
    contraction contract still applies.
    """
    whole = _column_region(lattice, 0, lattice.nx)
    empty = Region(())
    strip_a = Strip(0, lattice.nx, 0, lattice.nx, whole, whole)
    strip_b = Strip(0, lattice.nx, 0, 0, whole, empty)
    assignment = {site: ("A", 0) for site in whole.sites}
    return StripDecomposition(lattice, 0, (strip_a,), (strip_b,), assignment)


def super_sites(lattice: Lattice, radius: int) -> list[Region]:
    """Disjoint 2L x 2L blocks covering the lattice; edge blocks truncated."""
    if radius < 1:
        raise ValueError("super-site radius must be >= 1")
    side = 2 * radius
    blocks = []
    for by in range(0, lattice.ny, side):
        for bx in range(0, lattice.nx, side):
            blocks.append(Region(tuple(
                (x, y)
                for y in range(by, min(by + side, lattice.ny))
                for x in range(bx, min(bx + side, lattice.nx)))))
    return blocks
