"""U-Matrix computation and threshold segmentation.

The U-Matrix doubles the map raster: unit cells keep their grid
positions at even coordinates, and the cells between adjacent units hold
the Euclidean distance between their codebook vectors.  Tight clusters
show up as basins of small values walled off by ridges of large ones.
Segmentation cuts every ridge at or above a threshold and reads the
remaining connected components as regions.
"""

from dataclasses import dataclass

import numpy as np

from .somcore import RECT, GridTopology, SomMap
from .util import format_real


@dataclass
class UMatrixGrid:
    """Expanded (2*xsize-1) x (2*ysize-1) raster of inter-unit distances.

    ``values[y, x]``; unit cells sit at even (x, y), the cell between two
    adjacent units at the sum of their (col, row) coordinates.
    """

    width: int
    height: int
    values: np.ndarray
    lattice: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.height, self.width):
            raise ValueError("values must be (height, width)")

    @property
    def xsize(self) -> int:
        return (self.width + 1) // 2

    @property
    def ysize(self) -> int:
        return (self.height + 1) // 2

    def topology(self) -> GridTopology:
        return GridTopology(self.xsize, self.ysize, self.lattice)

    def boundary_value(self, unit_a: int, unit_b: int) -> float:
        """Value of the cell between two adjacent units."""
        topo = self.topology()
        ca, ra = topo.unit_coords(unit_a)
        cb, rb = topo.unit_coords(unit_b)
        return float(self.values[ra + rb, ca + cb])


@dataclass
class RegionLabeling:
    """Partition of map units into regions below a boundary threshold."""

    threshold: float
    region_of: dict[int, int]
    regions: list[list[int]]


def compute_umatrix(som: SomMap) -> UMatrixGrid:
    """Expand *som* into its U-Matrix.

    Each pair of lattice-adjacent units contributes one boundary cell
    holding their codebook distance.  Unit cells take the median of the
    boundary cells around them (0 for a single-unit map).  On
    rectangular lattices the leftover diagonal cells average the two
    crossing diagonal distances, which fills the raster completely; the
    hexagonal placement fills it by construction.
    """
    topo = som.topology
    xs, ys = topo.xsize, topo.ysize
    width, height = 2 * xs - 1, 2 * ys - 1
    values = np.zeros((height, width))
    codebook = som.codebook

    def dist(a: int, b: int) -> float:
        return float(np.linalg.norm(codebook[a] - codebook[b]))

    for u in range(topo.n_units):
        cu, ru = topo.unit_coords(u)
        for v in topo.neighbors(u):
            if v <= u:
                continue
            cv, rv = topo.unit_coords(v)
            values[ru + rv, cu + cv] = dist(u, v)

    if topo.lattice == RECT:
        for r in range(ys - 1):
            for c in range(xs - 1):
                nw, ne = r * xs + c, r * xs + c + 1
                sw, se = (r + 1) * xs + c, (r + 1) * xs + c + 1
                values[2 * r + 1, 2 * c + 1] = 0.5 * (dist(nw, se) + dist(ne, sw))

    for u in range(topo.n_units):
        cu, ru = topo.unit_coords(u)
        around = [
            values[ru + rv, cu + cv]
            for cv, rv in (topo.unit_coords(v) for v in topo.neighbors(u))
        ]
        values[2 * ru, 2 * cu] = float(np.median(around)) if around else 0.0

    return UMatrixGrid(width=width, height=height, values=values, lattice=topo.lattice)


def segment_regions(grid: UMatrixGrid, threshold: float | None = None) -> RegionLabeling:
    """Split the map into regions of units joined by low boundaries.

    Two adjacent units belong to the same region when the boundary cell
    between them is below the threshold; a zero boundary (identical
    codebook vectors) always joins, so a degenerate all-zero map is a
    single region whatever the threshold.  ``threshold=None`` picks the
    median of all boundary cells.  Every unit lands in exactly one
    region; units whose boundaries all reach the threshold become
    singletons.  Region ids count up in order of each region's lowest
    unit index.
    """
    topo = grid.topology()
    n = topo.n_units
    pairs = [
        (u, v) for u in range(n) for v in topo.neighbors(u) if v > u
    ]
    if threshold is None:
        threshold = (
            float(np.median([grid.boundary_value(u, v) for u, v in pairs]))
            if pairs
            else 0.0
        )

    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in pairs:
        b = grid.boundary_value(u, v)
        if b < threshold or b == 0.0:
            ra, rb = find(u), find(v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    members: dict[int, list[int]] = {}
    for u in range(n):
        members.setdefault(find(u), []).append(u)
    regions = [members[root] for root in sorted(members)]
    region_of = {
        u: region_id for region_id, units in enumerate(regions) for u in units
    }
    return RegionLabeling(threshold=float(threshold), region_of=region_of, regions=regions)


def grid_to_csv(grid: UMatrixGrid) -> str:
    """Raw grid values as CSV, row-major, one raster row per line."""
    return "\n".join(
        ",".join(format_real(x) for x in row) for row in grid.values
    ) + "\n"
