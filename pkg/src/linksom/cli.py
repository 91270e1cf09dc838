"""Command-line pipeline: ingest -> train -> umatrix / communities / overlays.

Every stage reads and writes plain-text artifacts (edge lists, .dat
datasets, .cod maps, CSV tables) plus deterministic images, and drops a
``<output>.manifest`` of key=value pairs next to its output so any
artifact can be regenerated from the recorded inputs and flags.

Exit codes: 0 success, 1 usage error, 2 unreadable/malformed data,
3 internal error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    closeness,
    communities_from_calibration,
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
    extract_vectors,
    parse_edge_list,
    parse_sompak_dat,
    write_sompak_dat,
)
from .render import PGM, PPM, SVG, ImageSpec, render_color, render_gray, render_profile, text_report, units_to_grid
from .somcore import (
    BUBBLE,
    GAUSSIAN,
    HEXA,
    RECT,
    GridTopology,
    PhaseParams,
    SomConfig,
    calibrate,
    multi_restart,
    parse_sompak_cod,
    quantization_error,
    write_sompak_cod,
)
from .umatrix import compute_umatrix, grid_to_csv, segment_regions
from .util import ParseError, format_real


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems by default; the contract says 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _threshold(text: str):
    if text == "auto":
        return None
    return float(text)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _write_manifest(out_path: str, command: str, entries: list[tuple[str, str]]):
    pairs = [
        ("tool", "linksom"),
        ("version", __version__),
        ("command", command),
        ("outdir", str(Path(out_path).resolve().parent)),
    ]
    pairs.extend(entries)
    _write_text(str(out_path) + ".manifest", "".join("%s=%s\n" % kv for kv in pairs))


def _load_map(path: str):
    som, neighborhood = parse_sompak_cod(_read_text(path))
    return som, neighborhood


def _image_format(path: str, allowed: tuple[str, ...]) -> str:
    suffix = Path(path).suffix.lstrip(".").lower()
    if suffix not in allowed:
        raise ValueError(
            "output %r must use one of: %s" % (path, ", ".join("." + a for a in allowed))
        )
    return suffix


def cmd_ingest(args) -> int:
    graph = parse_edge_list(_read_text(args.edgelist))
    dataset = extract_vectors(graph, args.direction, args.normalization)
    _write_text(args.out, write_sompak_dat(dataset))
    _write_manifest(args.out, "ingest", [
        ("input", args.edgelist),
        ("output", args.out),
        ("direction", args.direction),
        ("normalization", args.normalization),
        ("nodes", str(len(graph))),
    ])
    return 0


def cmd_train(args) -> int:
    dataset = parse_sompak_dat(_read_text(args.data))
    config = SomConfig(
        topology=GridTopology(args.x, args.y, args.lattice),
        phase1=PhaseParams(args.len1, args.rad1, args.alpha1, args.neigh),
        phase2=PhaseParams(args.len2, args.rad2, args.alpha2, args.neigh),
        restarts=args.restarts,
        seed=args.seed,
    )
    best, errors = multi_restart(config, dataset)
    _write_text(args.out, write_sompak_cod(best, neighborhood=args.neigh))
    _write_manifest(args.out, "train", [
        ("input", args.data),
        ("output", args.out),
        ("xsize", str(args.x)),
        ("ysize", str(args.y)),
        ("lattice", args.lattice),
        ("neighborhood", args.neigh),
        ("len1", str(args.len1)),
        ("rad1", format_real(args.rad1)),
        ("alpha1", format_real(args.alpha1)),
        ("len2", str(args.len2)),
        ("rad2", format_real(args.rad2)),
        ("alpha2", format_real(args.alpha2)),
        ("restarts", str(args.restarts)),
        ("seed", str(args.seed)),
        ("best_error", format_real(min(errors))),
    ])
    return 0


def cmd_umatrix(args) -> int:
    som, _ = _load_map(args.map)
    grid = compute_umatrix(som)
    suffix = _image_format(args.out, (PGM, SVG, "csv"))
    if suffix == "csv":
        _write_text(args.out, grid_to_csv(grid))
    else:
        spec = ImageSpec(cell_px=args.cell_px, format=suffix, lattice=grid.lattice)
        mask = np.ones_like(grid.values, dtype=bool)
        Path(args.out).write_bytes(render_gray(grid.values, mask, spec, invert=True))
    entries = [
        ("input", args.map),
        ("output", args.out),
        ("cell_px", str(args.cell_px)),
    ]
    if args.regions:
        labeling = segment_regions(grid, args.threshold)
        lines = ["unit,x,y,region"]
        topo = grid.topology()
        for unit in range(topo.n_units):
            col, row = topo.unit_coords(unit)
            lines.append("%d,%d,%d,%d" % (unit, col, row, labeling.region_of[unit]))
        _write_text(args.regions, "\n".join(lines) + "\n")
        entries.append(("regions", args.regions))
        entries.append(("threshold", format_real(labeling.threshold)))
    _write_manifest(args.out, "umatrix", entries)
    return 0


def cmd_communities(args) -> int:
    som, _ = _load_map(args.map)
    dataset = parse_sompak_dat(_read_text(args.data))
    cal = calibrate(som, dataset)
    assignment = communities_from_calibration(cal)
    lines = ["unit,x,y,label"]
    for unit, members in assignment.communities:
        col, row = som.topology.unit_coords(unit)
        for label in members:
            lines.append("%d,%d,%d,%s" % (unit, col, row, label))
    _write_text(args.out, "\n".join(lines) + "\n")
    _write_manifest(args.out, "communities", [
        ("map", args.map),
        ("data", args.data),
        ("output", args.out),
        ("communities", str(len(assignment.communities))),
        ("quantization_error", format_real(quantization_error(som, dataset))),
    ])
    return 0


def cmd_overlay(args) -> int:
    som, _ = _load_map(args.map)
    dataset = parse_sompak_dat(_read_text(args.data))
    cal = calibrate(som, dataset)
    topo = som.topology
    entries = [("map", args.map), ("data", args.data), ("output", args.out)]
    if args.factions:
        suffix = _image_format(args.out, (PPM, SVG))
        spec = ImageSpec(cell_px=args.cell_px, format=suffix, lattice=topo.lattice)
        table = parse_factions(_read_text(args.factions))
        grid = overlay_factions(cal, table)
        Path(args.out).write_bytes(render_color(grid, topo, spec))
        entries.append(("factions", args.factions))
        entries.append(("k", str(table.k)))
    else:
        suffix = _image_format(args.out, (PGM, SVG))
        spec = ImageSpec(cell_px=args.cell_px, format=suffix, lattice=topo.lattice)
        graph = parse_edge_list(_read_text(args.closeness))
        scores = closeness(graph)
        values = overlay_metric(cal, scores)
        cells, mask = units_to_grid(values, topo)
        Path(args.out).write_bytes(render_gray(cells, mask, spec, invert=False))
        _write_text(str(args.out) + ".txt", text_report(cells, mask))
        entries.append(("closeness", args.closeness))
        if args.scores_csv:
            lines = ["label,score"]
            lines.extend(
                "%s,%s" % (label, format_real(scores.score_of[label]))
                for label in graph.nodes
            )
            _write_text(args.scores_csv, "\n".join(lines) + "\n")
            entries.append(("scores_csv", args.scores_csv))
    entries.append(("cell_px", str(args.cell_px)))
    _write_manifest(args.out, "overlay", entries)
    return 0


def cmd_profile(args) -> int:
    dataset = parse_sompak_dat(_read_text(args.data))
    labels = [token for token in args.labels.split(",") if token]
    profile = link_profile(dataset, labels)
    spec = ImageSpec(cell_px=args.cell_px, format=SVG)
    _image_format(args.out, (SVG,))
    Path(args.out).write_bytes(render_profile(profile, spec))
    _write_manifest(args.out, "profile", [
        ("data", args.data),
        ("output", args.out),
        ("labels", args.labels),
        ("cell_px", str(args.cell_px)),
    ])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="linksom",
        description="Map communities in a weighted directed link network "
        "with a self-organizing map.",
    )
    parser.add_argument("--version", action="version", version="linksom " + __version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="edge list -> .dat dataset")
    p.add_argument("edgelist", help="tab-separated edge list (source, target, count)")
    p.add_argument("out", help="output .dat path")
    p.add_argument("--direction", choices=(OUTGOING, INCOMING), default=OUTGOING,
                   help="link direction for the vectors (default: %(default)s)")
    p.add_argument("--normalization", choices=(RAW, RELATIVE_L1), default=RAW,
                   help="vector normalization (default: %(default)s)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help=".dat dataset -> trained .cod map")
    p.add_argument("data", help="input .dat path")
    p.add_argument("out", help="output .cod path")
    p.add_argument("--x", type=_positive_int, default=9,
                   help="map x size (default: 9)")
    p.add_argument("--y", type=_positive_int, default=7,
                   help="map y size (default: 7)")
    p.add_argument("--lattice", choices=(HEXA, RECT), default=HEXA,
                   help="grid lattice (default: hexa)")
    p.add_argument("--neigh", choices=(BUBBLE, GAUSSIAN), default=BUBBLE,
                   help="neighborhood function (default: bubble)")
    p.add_argument("--len1", type=_positive_int, default=2000,
                   help="first training period length (default: 2000)")
    p.add_argument("--rad1", type=_positive_float, default=9.0,
                   help="first period neighborhood radius (default: 9)")
    p.add_argument("--alpha1", type=_positive_float, default=0.1,
                   help="first period training constant (default: 0.1)")
    p.add_argument("--len2", type=_positive_int, default=10000,
                   help="second training period length (default: 10000)")
    p.add_argument("--rad2", type=_positive_float, default=1.0,
                   help="second period neighborhood radius (default: 1)")
    p.add_argument("--alpha2", type=_positive_float, default=0.02,
                   help="second period training constant (default: 0.02)")
    p.add_argument("--restarts", type=_positive_int, default=30,
                   help="independent runs; the lowest-error map wins (default: 30)")
    p.add_argument("--seed", type=int, default=1,
                   help="base seed; run i uses seed+i (default: 1)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("umatrix", help=".cod map -> U-Matrix image or CSV")
    p.add_argument("map", help="input .cod path")
    p.add_argument("out", help="output path (.pgm, .svg, or .csv)")
    p.add_argument("--threshold", type=_threshold, default=None, metavar="T|auto",
                   help="region boundary threshold (default: auto = median boundary)")
    p.add_argument("--regions", help="also write a unit,x,y,region CSV here")
    p.add_argument("--cell-px", type=_positive_int, default=24, dest="cell_px",
                   help="cell edge in pixels (default: 24)")
    p.set_defaults(func=cmd_umatrix)

    p = sub.add_parser("communities", help="map + dataset -> community CSV")
    p.add_argument("map", help="input .cod path")
    p.add_argument("data", help="input .dat path")
    p.add_argument("out", help="output CSV path (unit,x,y,label)")
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("overlay", help="color factions or shade closeness on the map")
    p.add_argument("map", help="input .cod path")
    p.add_argument("data", help="input .dat path")
    p.add_argument("out", help="output image path (.ppm/.svg for factions, .pgm/.svg for closeness)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--factions", help="label<TAB>faction_id table")
    group.add_argument("--closeness", help="edge list to compute closeness from")
    p.add_argument("--scores-csv", dest="scores_csv",
                   help="with --closeness, also write label,score CSV here")
    p.add_argument("--cell-px", type=_positive_int, default=24, dest="cell_px",
                   help="cell edge in pixels (default: 24)")
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("profile", help="relative link profiles -> SVG bar chart")
    p.add_argument("data", help="input .dat path")
    p.add_argument("out", help="output .svg path")
    p.add_argument("--labels", required=True,
                   help="comma-separated record labels to plot")
    p.add_argument("--cell-px", type=_positive_int, default=24, dest="cell_px",
                   help="bar slot width in pixels (default: 24)")
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print("linksom: error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print("linksom: internal error: %r" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
