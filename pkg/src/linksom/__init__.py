"""linksom: community mapping for weighted directed link networks.

Pipeline: parse an edge list into a weighted digraph, turn each node
into its outgoing (or incoming) link vector, train a self-organizing map
on those vectors, then read communities and overlays off the trained
map: U-Matrix cluster structure, shared-unit communities, faction color
blends, and closeness shading.
"""

__version__ = "0.1.0"

from .analysis import (
    CentralityScores,
    ColorGrid,
    CommunityAssignment,
    FactionTable,
    LinkProfile,
    closeness,
    communities_from_calibration,
    default_palette,
    factions_kmeans,
    link_profile,
    overlay_factions,
    overlay_metric,
    parse_factions,
)
from .linkgraph import (
    INCOMING,
    OUTGOING,
    RAW,
    RELATIVE_L1,
    DataSet,
    LinkGraph,
    extract_vectors,
    parse_edge_list,
    parse_sompak_dat,
    write_edge_list,
    write_sompak_dat,
)
from .rng import SplitMix64
from .somcore import (
    BUBBLE,
    GAUSSIAN,
    HEXA,
    RECT,
    Calibration,
    GridTopology,
    PhaseParams,
    SomConfig,
    SomMap,
    calibrate,
    find_bmu,
    grid_position,
    init_map,
    multi_restart,
    parse_sompak_cod,
    quantization_error,
    train,
    train_step,
    write_sompak_cod,
)
from .umatrix import (
    RegionLabeling,
    UMatrixGrid,
    compute_umatrix,
    grid_to_csv,
    segment_regions,
)
from .util import ParseError
