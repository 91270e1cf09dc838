"""Community structure and map overlays.

A calibrated map induces communities directly: all network nodes that
share a best-matching unit form one community.  On top of that sit the
overlays used to read the map: blending group colors per unit, averaging
a per-node metric (closeness centrality) per unit, and per-node link
profiles that show where a community's links actually point.
"""

import colorsys
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .linkgraph import DataSet, LinkGraph
from .rng import SplitMix64
from .somcore import Calibration
from .util import ParseError, content_lines


@dataclass
class CommunityAssignment:
    """One community per occupied map unit."""

    communities: list[tuple[int, list[str]]]
    unassigned_units: list[int]


@dataclass
class FactionTable:
    """K-way node partition, faction ids 1..k."""

    faction_of: dict[str, int]
    k: int


@dataclass
class ColorGrid:
    """Per-unit RGB triples; None marks units with nothing mapped to them."""

    colors: list[tuple[int, int, int] | None]


@dataclass
class CentralityScores:
    """Per-node centrality values in [0, 1]."""

    score_of: dict[str, float]


@dataclass
class LinkProfile:
    """Relative link strengths for a selection of nodes.

    Each row is (label, vector); vectors are L1-normalized so components
    read as fractions of that node's links.  ``component_labels`` names
    the vector components, ``direction`` tells whether they are link
    targets (outgoing) or sources (incoming).
    """

    direction: str
    component_labels: list[str]
    rows: list[tuple[str, np.ndarray]]


def communities_from_calibration(cal: Calibration) -> CommunityAssignment:
    """Read the calibration as a partition: one community per occupied unit."""
    communities = []
    unassigned = []
    for unit in sorted(cal.per_unit):
        members = cal.per_unit[unit]
        if members:
            communities.append((unit, list(members)))
        else:
            unassigned.append(unit)
    return CommunityAssignment(communities=communities, unassigned_units=unassigned)


def parse_factions(text: str) -> FactionTable:
    """Parse ``label<TAB>faction_id`` lines ('#' comments allowed).

    Faction ids are positive integers; k is the largest id seen.
    Duplicate labels and an empty body are errors.
    """
    faction_of: dict[str, int] = {}
    k = 0
    for lineno, line in content_lines(text):
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 2:
            raise ParseError(
                "expected 'label<TAB>faction_id', got %d field(s)" % len(fields),
                line=lineno,
            )
        label, id_text = fields
        if not label.strip():
            raise ParseError("empty label", line=lineno)
        try:
            faction_id = int(id_text.strip())
        except ValueError:
            raise ParseError(
                "faction id must be an integer, got %r" % id_text, line=lineno
            ) from None
        if faction_id < 1:
            raise ParseError("faction id must be positive, got %d" % faction_id, line=lineno)
        if label in faction_of:
            raise ParseError("duplicate label %r" % label, line=lineno)
        faction_of[label] = faction_id
        k = max(k, faction_id)
    if not faction_of:
        raise ParseError("faction table is empty")
    return FactionTable(faction_of=faction_of, k=k)


def default_palette(k: int) -> list[tuple[int, int, int]]:
    """k distinct colors: red, green, blue for k <= 3, then spaced hues."""
    if k < 1:
        raise ValueError("palette needs k >= 1")
    palette = []
    for i in range(k):
        r, g, b = colorsys.hsv_to_rgb(i / k, 1.0, 1.0)
        palette.append((round(r * 255), round(g * 255), round(b * 255)))
    return palette


def overlay_factions(
    cal: Calibration,
    factions: FactionTable,
    palette: list[tuple[int, int, int]] | None = None,
) -> ColorGrid:
    """Blend faction colors per unit by member share.

    A unit whose members all belong to faction f gets palette[f-1]
    exactly; mixed units get the member-weighted average, rounded half
    up per channel.  Units with no members stay uncolored.
    """
    if palette is None:
        palette = default_palette(factions.k)
    if factions.k > len(palette):
        raise ValueError(
            "%d factions but only %d palette colors" % (factions.k, len(palette))
        )
    colors: list[tuple[int, int, int] | None] = []
    for unit in sorted(cal.per_unit):
        members = cal.per_unit[unit]
        if not members:
            colors.append(None)
            continue
        mix = [0.0, 0.0, 0.0]
        for label in members:
            faction = factions.faction_of.get(label)
            if faction is None:
                raise ValueError("label %r has no faction assignment" % label)
            color = palette[faction - 1]
            for ch in range(3):
                mix[ch] += color[ch] / len(members)
        colors.append(tuple(int(math.floor(c + 0.5)) for c in mix))
    return ColorGrid(colors=colors)


def closeness(graph: LinkGraph) -> CentralityScores:
    """Closeness centrality on the unweighted digraph of *graph*.

    An arc exists wherever the link count is positive; self-links are
    ignored.  With R the set of nodes reachable from i (i excluded) and
    d the hop-count distance, the score is

        (|R| / (n - 1)) * (|R| / sum of d(i, j) over R),

    the reachability-corrected closeness that stays meaningful on
    disconnected digraphs.  Nodes reaching nothing score 0.
    """
    n = len(graph)
    if n == 0:
        raise ValueError("graph has no nodes")
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for source, target, weight in graph.edges:
        si, ti = graph.node_index(source), graph.node_index(target)
        if weight > 0 and si != ti:
            adjacency[si].append(ti)

    score_of: dict[str, float] = {}
    for i, label in enumerate(graph.nodes):
        dist = [-1] * n
        dist[i] = 0
        queue = deque([i])
        reached = 0
        total = 0
        while queue:
            a = queue.popleft()
            for b in adjacency[a]:
                if dist[b] < 0:
                    dist[b] = dist[a] + 1
                    reached += 1
                    total += dist[b]
                    queue.append(b)
        if reached == 0:
            score_of[label] = 0.0
        else:
            score_of[label] = (reached / (n - 1)) * (reached / total)
    return CentralityScores(score_of=score_of)


def overlay_metric(cal: Calibration, scores: CentralityScores) -> list[float | None]:
    """Per-unit mean of the members' scores; None for empty units."""
    values: list[float | None] = []
    for unit in sorted(cal.per_unit):
        members = cal.per_unit[unit]
        if not members:
            values.append(None)
            continue
        total = 0.0
        for label in members:
            if label not in scores.score_of:
                raise ValueError("label %r has no score" % label)
            total += scores.score_of[label]
        values.append(total / len(members))
    return values


def link_profile(dataset: DataSet, labels) -> LinkProfile:
    """L1-normalized link vectors for the selected labels.

    Rows follow dataset order.  Component labels reuse the record labels
    when the dataset is square (one component per node, as produced from
    a link graph); otherwise components are named by position.
    """
    wanted = set(labels)
    known = {label for label in dataset.labels if label is not None}
    unknown = wanted - known
    if unknown:
        raise ValueError("unknown label(s): %s" % ", ".join(sorted(unknown)))
    if len(dataset) == dataset.dimension and None not in dataset.labels:
        component_labels = [str(lab) for lab in dataset.labels]
    else:
        component_labels = [str(i) for i in range(dataset.dimension)]
    rows = []
    for label, vector in dataset.records:
        if label not in wanted:
            continue
        total = float(vector.sum())
        profile = vector / total if total != 0 else vector.copy()
        rows.append((label, profile))
    return LinkProfile(
        direction=dataset.direction,
        component_labels=component_labels,
        rows=rows,
    )


def factions_kmeans(dataset: DataSet, k: int, seed: int) -> FactionTable:
    """Baseline k-means partition of the dataset vectors.

    Centers start at k distinct records drawn with the portable
    generator; Lloyd iterations run until centers move less than 1e-9 or
    100 rounds.  Cluster ids become faction ids 1..k ordered by each
    cluster's lowest record index, so the result is deterministic for a
    given seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(dataset)
    if k > n:
        raise ValueError("k=%d exceeds the %d records" % (k, n))
    if None in dataset.labels:
        raise ValueError("k-means factions need labelled records")

    rng = SplitMix64(seed)
    chosen: list[int] = []
    while len(chosen) < k:
        i = rng.next_index(n)
        if i not in chosen:
            chosen.append(i)
    vectors = dataset.vectors
    centers = vectors[chosen].copy()

    assign = np.zeros(n, dtype=int)
    for _ in range(100):
        d2 = ((vectors[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        moved = 0.0
        for j in range(k):
            members = vectors[assign == j]
            if len(members) == 0:
                continue
            new_center = members.mean(axis=0)
            moved = max(moved, float(np.linalg.norm(new_center - centers[j])))
            centers[j] = new_center
        if moved < 1e-9:
            break
    d2 = ((vectors[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    assign = d2.argmin(axis=1)

    first_member = {}
    for i, cluster in enumerate(assign):
        first_member.setdefault(int(cluster), i)
    ordered = sorted(first_member, key=first_member.get)
    faction_id = {cluster: rank + 1 for rank, cluster in enumerate(ordered)}
    faction_of = {
        dataset.labels[i]: faction_id[int(assign[i])] for i in range(n)
    }
    return FactionTable(faction_of=faction_of, k=len(ordered))
