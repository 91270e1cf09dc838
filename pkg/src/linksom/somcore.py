"""Self-organizing map: topology, training, and calibration.

The map is a 2-D grid of codebook vectors.  Training is online: one
randomly drawn input per step, a best-matching-unit search, and a
neighborhood update whose learning factor and radius decay linearly
within each of two phases (a coarse ordering phase and a long
fine-tuning phase).  Everything is deterministic given the seed; see
``rng`` for the generator contract.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .linkgraph import DataSet
from .rng import SplitMix64
from .util import ParseError, content_lines, format_real

HEXA = "hexa"
RECT = "rect"
BUBBLE = "bubble"
GAUSSIAN = "gaussian"

_LATTICES = (HEXA, RECT)
_NEIGHBORHOODS = (BUBBLE, GAUSSIAN)

# Table of training defaults: 9x7 hexagonal bubble map, a 2000-step
# ordering phase (radius 9, factor 0.1), a 10000-step fine-tuning phase
# (radius 1, factor 0.02), best of 30 random restarts.
DEFAULT_XSIZE = 9
DEFAULT_YSIZE = 7
DEFAULT_PHASE1 = (2000, 9.0, 0.1)
DEFAULT_PHASE2 = (10000, 1.0, 0.02)
DEFAULT_RESTARTS = 30
DEFAULT_SEED = 1


@dataclass(frozen=True)
class GridTopology:
    """Map grid: xsize columns by ysize rows, hexagonal or rectangular.

    Unit u sits at column u % xsize, row u // xsize.
    """

    xsize: int
    ysize: int
    lattice: str = HEXA

    def __post_init__(self):
        if self.xsize < 1 or self.ysize < 1:
            raise ValueError("grid sides must be positive")
        if self.lattice not in _LATTICES:
            raise ValueError("lattice must be one of %s" % (_LATTICES,))

    @property
    def n_units(self) -> int:
        return self.xsize * self.ysize

    def unit_coords(self, unit: int) -> tuple[int, int]:
        """(column, row) of *unit*."""
        if not 0 <= unit < self.n_units:
            raise IndexError("unit %d outside %dx%d grid" % (unit, self.xsize, self.ysize))
        return unit % self.xsize, unit // self.xsize

    def positions(self) -> np.ndarray:
        """(n_units, 2) array of geometric grid positions."""
        cols = np.arange(self.n_units) % self.xsize
        rows = np.arange(self.n_units) // self.xsize
        if self.lattice == HEXA:
            x = cols + 0.5 * (rows % 2)
            y = rows * (math.sqrt(3.0) / 2.0)
        else:
            x = cols.astype(float)
            y = rows.astype(float)
        return np.stack([x, y], axis=1)

    def unit_distances(self) -> np.ndarray:
        """(n_units, n_units) matrix of Euclidean grid distances."""
        pos = self.positions()
        diff = pos[:, None, :] - pos[None, :, :]
        return np.sqrt((diff**2).sum(axis=2))

    def neighbors(self, unit: int) -> list[int]:
        """Lattice-adjacent units (6 for hexa, 4 lateral for rect)."""
        col, row = self.unit_coords(unit)
        if self.lattice == RECT:
            offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)]
        elif row % 2 == 0:
            offsets = [(-1, 0), (1, 0), (-1, -1), (0, -1), (-1, 1), (0, 1)]
        else:
            offsets = [(-1, 0), (1, 0), (0, -1), (1, -1), (0, 1), (1, 1)]
        result = []
        for dc, dr in offsets:
            c, r = col + dc, row + dr
            if 0 <= c < self.xsize and 0 <= r < self.ysize:
                result.append(r * self.xsize + c)
        return result


def grid_position(topology: GridTopology, unit: int) -> tuple[float, float]:
    """Geometric position of *unit*; grid distance is Euclidean on these.

    Rectangular lattices use (col, row).  Hexagonal lattices shift odd
    rows half a cell right and pack rows sqrt(3)/2 apart, so all six
    hex neighbors are at distance 1.
    """
    col, row = topology.unit_coords(unit)
    if topology.lattice == HEXA:
        return col + (0.5 if row % 2 else 0.0), row * (math.sqrt(3.0) / 2.0)
    return float(col), float(row)


@dataclass(frozen=True)
class PhaseParams:
    """One training phase: step count, initial radius/factor, update shape."""

    length: int
    radius0: float
    alpha0: float
    neighborhood: str = BUBBLE

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("phase length must be >= 1")
        if self.radius0 < 1:
            raise ValueError("initial radius must be >= 1")
        if not 0 < self.alpha0 <= 1:
            raise ValueError("training constant must be in (0, 1]")
        if self.neighborhood not in _NEIGHBORHOODS:
            raise ValueError("neighborhood must be one of %s" % (_NEIGHBORHOODS,))

    def alpha(self, t: int, total: int | None = None) -> float:
        """Learning factor at step t: linear decay from alpha0 toward 0."""
        total = self.length if total is None else total
        return self.alpha0 * (1.0 - t / total)

    def radius(self, t: int, total: int | None = None) -> float:
        """Neighborhood radius at step t: linear decay from radius0 to 1."""
        total = self.length if total is None else total
        return 1.0 + (self.radius0 - 1.0) * (1.0 - t / total)


def _default_topology() -> GridTopology:
    return GridTopology(DEFAULT_XSIZE, DEFAULT_YSIZE, HEXA)


def _default_phase1() -> PhaseParams:
    return PhaseParams(*DEFAULT_PHASE1, neighborhood=BUBBLE)


def _default_phase2() -> PhaseParams:
    return PhaseParams(*DEFAULT_PHASE2, neighborhood=BUBBLE)


@dataclass(frozen=True)
class SomConfig:
    """Complete training recipe; the zero-argument form is the default table."""

    topology: GridTopology = field(default_factory=_default_topology)
    phase1: PhaseParams = field(default_factory=_default_phase1)
    phase2: PhaseParams = field(default_factory=_default_phase2)
    restarts: int = DEFAULT_RESTARTS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class SomMap:
    """A trained (or initialized) map: topology plus codebook matrix.

    ``codebook`` has one row per unit, in unit-index order.
    """

    topology: GridTopology
    dimension: int
    codebook: np.ndarray

    def __post_init__(self):
        self.codebook = np.asarray(self.codebook, dtype=float)
        expected = (self.topology.n_units, self.dimension)
        if self.codebook.shape != expected:
            raise ValueError(
                "codebook must be %r, got %r" % (expected, self.codebook.shape)
            )


@dataclass
class Calibration:
    """Assignment of labelled records to their best-matching units.

    ``per_unit`` covers every unit of the map, empty lists included, with
    member lists in dataset order.
    """

    assignments: dict[str, int]
    per_unit: dict[int, list[str]]


def init_map(config: SomConfig, dataset: DataSet, rng: SplitMix64) -> SomMap:
    """Random initial codebook, uniform per component within data bounds.

    Draw order is fixed (units outermost, components innermost) so a
    given rng state always produces the same map.
    """
    if len(dataset) == 0:
        raise ValueError("cannot initialize from an empty dataset")
    lows = dataset.vectors.min(axis=0)
    highs = dataset.vectors.max(axis=0)
    n_units = config.topology.n_units
    dim = dataset.dimension
    flat = np.fromiter(
        (rng.next_unit() for _ in range(n_units * dim)),
        dtype=float,
        count=n_units * dim,
    )
    codebook = lows + flat.reshape(n_units, dim) * (highs - lows)
    return SomMap(topology=config.topology, dimension=dim, codebook=codebook)


def find_bmu(som: SomMap, vector: np.ndarray) -> tuple[int, float]:
    """Best-matching unit: index and Euclidean distance of the winner.

    Ties go to the lowest unit index.
    """
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (som.dimension,):
        raise ValueError(
            "vector has dimension %r, map wants %d" % (vector.shape, som.dimension)
        )
    diff = som.codebook - vector
    d2 = np.einsum("ij,ij->i", diff, diff)
    unit = int(np.argmin(d2))
    return unit, math.sqrt(float(d2[unit]))


def _update_codebook(
    codebook: np.ndarray,
    dist_row: np.ndarray,
    x: np.ndarray,
    alpha: float,
    radius: float,
    neighborhood: str,
):
    """Move units near the winner toward x, in place.

    ``dist_row`` holds grid distances from the winning unit.  Bubble
    applies the full factor inside the radius and nothing outside;
    gaussian weights every unit by exp(-d^2 / (2 r^2)).
    """
    if neighborhood == BUBBLE:
        mask = dist_row <= radius
        sel = codebook[mask]
        codebook[mask] = sel + alpha * (x - sel)
    else:
        factors = alpha * np.exp(dist_row**2 / (-2.0 * radius * radius))
        codebook += factors[:, None] * (x - codebook)


def train_step(
    som: SomMap,
    x: np.ndarray,
    t: int,
    phase: PhaseParams,
    total: int | None = None,
) -> SomMap:
    """One training update at step *t* of a phase of *total* steps.

    Returns a new map; the input map is untouched.
    """
    total = phase.length if total is None else total
    if not 0 <= t < total:
        raise ValueError("step %d outside phase of length %d" % (t, total))
    x = np.asarray(x, dtype=float)
    bmu, _ = find_bmu(som, x)
    codebook = som.codebook.copy()
    dist_row = som.topology.unit_distances()[bmu]
    _update_codebook(
        codebook, dist_row, x, phase.alpha(t, total), phase.radius(t, total),
        phase.neighborhood,
    )
    return replace(som, codebook=codebook)


def train(
    config: SomConfig,
    dataset: DataSet,
    seed: int | None = None,
    on_step=None,
) -> SomMap:
    """Train a map on *dataset*: random init, then both phases in order.

    Each step draws one record uniformly at random, finds its winner and
    applies the neighborhood update.  ``on_step``, when given, is called
    after every update as ``on_step(phase_index, t, alpha, radius)`` --
    handy for instrumentation.  With the same (config, dataset, seed)
    the result is bit-identical run to run.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    rng = SplitMix64(config.seed if seed is None else seed)
    som = init_map(config, dataset, rng)
    codebook = som.codebook
    dists = config.topology.unit_distances()
    vectors = dataset.vectors
    n = len(dataset)
    for phase_index, phase in enumerate((config.phase1, config.phase2)):
        total = phase.length
        neighborhood = phase.neighborhood
        for t in range(total):
            x = vectors[rng.next_index(n)]
            diff = codebook - x
            d2 = np.einsum("ij,ij->i", diff, diff)
            bmu = int(np.argmin(d2))
            alpha = phase.alpha(t, total)
            radius = phase.radius(t, total)
            _update_codebook(codebook, dists[bmu], x, alpha, radius, neighborhood)
            if on_step is not None:
                on_step(phase_index, t, alpha, radius)
    return som


def quantization_error(som: SomMap, dataset: DataSet) -> float:
    """Mean squared Euclidean distance from each record to its winner."""
    if len(dataset) == 0:
        raise ValueError("quantization error of an empty dataset is undefined")
    if dataset.dimension != som.dimension:
        raise ValueError("dataset and map dimensions differ")
    total = 0.0
    for vector in dataset.vectors:
        diff = som.codebook - vector
        d2 = np.einsum("ij,ij->i", diff, diff)
        total += float(d2.min())
    return total / len(dataset)


def multi_restart(config: SomConfig, dataset: DataSet) -> tuple[SomMap, list[float]]:
    """Train ``config.restarts`` maps from seeds seed, seed+1, ...

    Returns the map with the smallest quantization error (ties favor the
    earliest seed) together with every run's error, in seed order.
    """
    best_som = None
    best_error = math.inf
    errors = []
    for i in range(config.restarts):
        som = train(config, dataset, seed=config.seed + i)
        err = quantization_error(som, dataset)
        errors.append(err)
        if err < best_error:
            best_som, best_error = som, err
    return best_som, errors


def calibrate(som: SomMap, dataset: DataSet) -> Calibration:
    """Assign every labelled record to its best-matching unit.

    Unlabelled records are rejected, as are duplicate labels: the
    assignment is keyed by label.
    """
    if dataset.dimension != som.dimension:
        raise ValueError("dataset and map dimensions differ")
    assignments: dict[str, int] = {}
    per_unit: dict[int, list[str]] = {u: [] for u in range(som.topology.n_units)}
    for label, vector in dataset.records:
        if label is None:
            raise ValueError("calibration needs labelled records")
        if label in assignments:
            raise ValueError("duplicate label %r in dataset" % label)
        unit, _ = find_bmu(som, vector)
        assignments[label] = unit
        per_unit[unit].append(label)
    return Calibration(assignments=assignments, per_unit=per_unit)


def write_sompak_cod(som: SomMap, neighborhood: str = BUBBLE) -> str:
    """Serialize a map in SOM_PAK ``.cod`` form.

    Header is ``dimension lattice xsize ysize neighborhood``; then one
    codebook vector per line in unit-index order, printed so parsing is
    bit-exact.
    """
    if neighborhood not in _NEIGHBORHOODS:
        raise ValueError("neighborhood must be one of %s" % (_NEIGHBORHOODS,))
    topo = som.topology
    lines = [
        "%d %s %d %d %s" % (som.dimension, topo.lattice, topo.xsize, topo.ysize, neighborhood)
    ]
    for row in som.codebook:
        lines.append(" ".join(format_real(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_sompak_cod(text: str) -> tuple[SomMap, str]:
    """Parse ``.cod`` text; returns the map and the recorded neighborhood."""
    header = None
    rows = []
    for lineno, line in content_lines(text):
        fields = line.split()
        if header is None:
            if len(fields) != 5:
                raise ParseError(
                    "header must be 'dim lattice xsize ysize neighborhood'",
                    line=lineno,
                )
            try:
                dimension = int(fields[0])
                xsize = int(fields[2])
                ysize = int(fields[3])
            except ValueError:
                raise ParseError("non-integer size in header", line=lineno) from None
            lattice, neighborhood = fields[1], fields[4]
            if lattice not in _LATTICES:
                raise ParseError("unknown lattice %r" % lattice, line=lineno)
            if neighborhood not in _NEIGHBORHOODS:
                raise ParseError("unknown neighborhood %r" % neighborhood, line=lineno)
            header = (dimension, lattice, xsize, ysize, neighborhood)
            continue
        if len(fields) != header[0]:
            raise ParseError(
                "expected %d components, got %d" % (header[0], len(fields)),
                line=lineno,
            )
        try:
            rows.append([float(tok) for tok in fields])
        except ValueError:
            raise ParseError("non-numeric component in %r" % line, line=lineno) from None
    if header is None:
        raise ParseError("missing codebook header")
    dimension, lattice, xsize, ysize, neighborhood = header
    topo = GridTopology(xsize, ysize, lattice)
    if len(rows) != topo.n_units:
        raise ParseError(
            "expected %d codebook vectors, got %d" % (topo.n_units, len(rows))
        )
    som = SomMap(topology=topo, dimension=dimension, codebook=np.array(rows))
    return som, neighborhood
