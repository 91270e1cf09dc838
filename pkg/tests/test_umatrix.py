import numpy as np

from linksom import (
    GridTopology,
    SomMap,
    compute_umatrix,
    grid_to_csv,
    segment_regions,
)
from linksom.rng import SplitMix64

from helpers import random_map


def make_map(codebook, xsize, ysize, lattice="rect"):
    codebook = np.asarray(codebook, dtype=float)
    return SomMap(GridTopology(xsize, ysize, lattice), codebook.shape[1], codebook)


def test_one_by_two_fixture():
    grid = compute_umatrix(make_map([[0.0], [3.0]], 1, 2))
    assert grid.width == 1 and grid.height == 3
    assert abs(grid.values[1, 0] - 3.0) < 1e-12  # boundary
    assert abs(grid.values[0, 0] - 3.0) < 1e-12  # unit: median of one neighbor
    assert abs(grid.values[2, 0] - 3.0) < 1e-12


def test_two_by_one_hex_fixture():
    grid = compute_umatrix(make_map([[0.0, 0.0], [3.0, 4.0]], 2, 1, "hexa"))
    assert grid.width == 3 and grid.height == 1
    assert abs(grid.values[0, 1] - 5.0) < 1e-12


def test_single_unit_map():
    grid = compute_umatrix(make_map([[7.0]], 1, 1))
    assert grid.values.shape == (1, 1)
    assert grid.values[0, 0] == 0.0


def test_flat_codebook_gives_zero_grid():
    som = make_map([[2.0, 2.0]] * 6, 3, 2)
    grid = compute_umatrix(som)
    assert np.all(grid.values == 0.0)


def test_rect_values_against_direct_recomputation():
    rng = SplitMix64(1)
    som = random_map(rng, 3, 3, 4)
    grid = compute_umatrix(som)
    topo = som.topology
    cb = som.codebook

    def d(a, b):
        return float(np.linalg.norm(cb[a] - cb[b]))

    # lateral boundaries
    assert abs(grid.values[0, 1] - d(0, 1)) < 1e-12
    assert abs(grid.values[1, 0] - d(0, 3)) < 1e-12
    # diagonal cell averages the two crossing distances
    expected = 0.5 * (d(0, 4) + d(1, 3))
    assert abs(grid.values[1, 1] - expected) < 1e-12
    # unit cell is the median of its incident boundaries
    center = 4
    incident = [d(center, v) for v in topo.neighbors(center)]
    assert abs(grid.values[2, 2] - float(np.median(incident))) < 1e-12


def test_hex_grid_is_fully_populated_and_consistent():
    rng = SplitMix64(2)
    som = random_map(rng, 4, 3, 3, lattice="hexa")
    grid = compute_umatrix(som)
    topo = som.topology
    cb = som.codebook
    for u in range(topo.n_units):
        cu, ru = topo.unit_coords(u)
        for v in topo.neighbors(u):
            cv, rv = topo.unit_coords(v)
            expected = float(np.linalg.norm(cb[u] - cb[v]))
            assert abs(grid.values[ru + rv, cu + cv] - expected) < 1e-12
    assert np.all(grid.values >= 0.0)


def test_translation_invariance_and_scale_equivariance():
    rng = SplitMix64(3)
    for _ in range(20):
        lattice = "hexa" if rng.next_unit() < 0.5 else "rect"
        som = random_map(rng, 2 + rng.next_index(4), 2 + rng.next_index(4), 3,
                         lattice=lattice)
        base = compute_umatrix(som).values
        shift = som.codebook + np.array([10.0, -4.0, 0.25])
        shifted = compute_umatrix(
            SomMap(som.topology, som.dimension, shift)
        ).values
        assert np.allclose(shifted, base, rtol=1e-9, atol=1e-12)
        scaled = compute_umatrix(
            SomMap(som.topology, som.dimension, som.codebook * 3.5)
        ).values
        assert np.allclose(scaled, base * 3.5, rtol=1e-9, atol=1e-12)


def test_rect_lateral_boundary_cell_count():
    for xs, ys in ((3, 3), (4, 2), (5, 1)):
        topo = GridTopology(xs, ys, "rect")
        cells = set()
        for u in range(topo.n_units):
            cu, ru = topo.unit_coords(u)
            for v in topo.neighbors(u):
                if v <= u:
                    continue
                cv, rv = topo.unit_coords(v)
                cells.add((ru + rv, cu + cv))
        assert len(cells) == xs * (ys - 1) + ys * (xs - 1)
        assert all((x % 2) + (y % 2) == 1 for y, x in cells)


# --- segmentation -----------------------------------------------------


def test_all_zero_grid_is_one_region():
    som = make_map([[1.0]] * 4, 2, 2)
    grid = compute_umatrix(som)
    for threshold in (5.0, 0.0, None):
        labeling = segment_regions(grid, threshold)
        assert labeling.regions == [[0, 1, 2, 3]]
        assert all(labeling.region_of[u] == 0 for u in range(4))


def test_boundary_above_threshold_separates():
    grid = compute_umatrix(make_map([[0.0], [3.0]], 1, 2))
    labeling = segment_regions(grid, 2.0)
    assert labeling.regions == [[0], [1]]
    assert labeling.region_of == {0: 0, 1: 1}


def test_three_unit_chain():
    grid = compute_umatrix(make_map([[0.0], [0.1], [5.1]], 1, 3))
    labeling = segment_regions(grid, 1.0)
    assert labeling.regions == [[0, 1], [2]]


def test_auto_threshold_is_median_boundary():
    som = make_map([[0.0], [1.0], [4.0]], 3, 1)
    grid = compute_umatrix(som)
    labeling = segment_regions(grid)
    assert labeling.threshold == 2.0  # median of boundaries {1, 3}
    assert labeling.regions == [[0, 1], [2]]


def test_partition_property_and_ids():
    rng = SplitMix64(4)
    for _ in range(20):
        som = random_map(rng, 2 + rng.next_index(4), 2 + rng.next_index(4), 2)
        grid = compute_umatrix(som)
        labeling = segment_regions(grid)
        seen = sorted(u for region in labeling.regions for u in region)
        assert seen == list(range(som.topology.n_units))
        mins = [min(region) for region in labeling.regions]
        assert mins == sorted(mins)


def test_raising_threshold_never_splits():
    rng = SplitMix64(5)
    for _ in range(10):
        som = random_map(rng, 3, 3, 2)
        grid = compute_umatrix(som)
        thresholds = [0.0, 0.2, 0.5, 1.0, 2.0, 5.0]
        counts = [len(segment_regions(grid, t).regions) for t in thresholds]
        assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_grid_csv_round_trip():
    som = make_map([[0.0], [0.5], [4.0], [1.0]], 2, 2)
    grid = compute_umatrix(som)
    text = grid_to_csv(grid)
    rows = [
        [float(tok) for tok in line.split(",")] for line in text.splitlines()
    ]
    assert np.array_equal(np.array(rows), grid.values)
