"""Weighted directed link graphs and their vector representations.

A link network is ingested from a tab-separated edge list, kept as a
weighted digraph over labelled nodes, and turned into one real vector per
node: the row of the weight matrix (outgoing links) or the column
(incoming links).  Datasets round-trip through the SOM_PAK ``.dat``
format so they can be exchanged with other SOM tooling.
"""

from dataclasses import dataclass

import numpy as np

from .util import ParseError, comment_lines, content_lines, format_real

OUTGOING = "outgoing"
INCOMING = "incoming"
RAW = "raw"
RELATIVE_L1 = "relative_l1"

_DIRECTIONS = (OUTGOING, INCOMING)
_NORMALIZATIONS = (RAW, RELATIVE_L1)


class LinkGraph:
    """Weighted directed multigraph with string-labelled nodes.

    Nodes keep first-registration order.  Repeated (source, target)
    insertions accumulate into a single edge record whose weight is the
    sum of the inserted counts; self-edges are allowed.
    """

    def __init__(self):
        self.nodes: list[str] = []
        self._index: dict[str, int] = {}
        self._weights: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def node_index(self, label: str) -> int:
        return self._index[label]

    def add_node(self, label: str) -> int:
        """Register *label* if new; return its index."""
        if not label or not label.strip():
            raise ValueError("node labels must be non-empty")
        idx = self._index.get(label)
        if idx is None:
            idx = len(self.nodes)
            self._index[label] = idx
            self.nodes.append(label)
        return idx

    def add_edge(self, source: str, target: str, weight: int):
        """Add *weight* parallel links from *source* to *target*.

        Endpoints are registered on first sight, source before target.
        """
        if weight < 0:
            raise ValueError("edge weight must be non-negative, got %d" % weight)
        si = self.add_node(source)
        ti = self.add_node(target)
        key = (si, ti)
        self._weights[key] = self._weights.get(key, 0) + int(weight)

    def weight(self, source: str, target: str) -> int:
        """Link count from *source* to *target* (0 when absent)."""
        key = (self._index[source], self._index[target])
        return self._weights.get(key, 0)

    @property
    def edges(self) -> list[tuple[str, str, int]]:
        """Edge records as (source, target, weight), insertion-ordered."""
        return [
            (self.nodes[s], self.nodes[t], w)
            for (s, t), w in self._weights.items()
        ]

    def weight_matrix(self) -> np.ndarray:
        """Dense matrix W with W[i, j] = weight of edge i -> j."""
        n = len(self.nodes)
        w = np.zeros((n, n))
        for (s, t), count in self._weights.items():
            w[s, t] = count
        return w


@dataclass
class DataSet:
    """Ordered collection of labelled real vectors.

    ``vectors`` is an (n_records, dimension) float array; ``labels[i]``
    names row i (None for unlabelled rows read from external files).
    ``direction`` and ``normalization`` record how the vectors were
    derived from a link graph.
    """

    dimension: int
    labels: list[str | None]
    vectors: np.ndarray
    direction: str = OUTGOING
    normalization: str = RAW

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dimension:
            raise ValueError(
                "vectors must be (n, %d), got %r" % (self.dimension, self.vectors.shape)
            )
        if len(self.labels) != self.vectors.shape[0]:
            raise ValueError("one label per vector required")
        if self.direction not in _DIRECTIONS:
            raise ValueError("unknown direction %r" % self.direction)
        if self.normalization not in _NORMALIZATIONS:
            raise ValueError("unknown normalization %r" % self.normalization)
        if self.normalization == RELATIVE_L1:
            sums = self.vectors.sum(axis=1)
            nonzero = np.any(self.vectors != 0, axis=1)
            if not np.allclose(sums[nonzero], 1.0, rtol=0, atol=1e-9):
                raise ValueError("relative_l1 vectors must sum to 1")

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def records(self) -> list[tuple[str | None, np.ndarray]]:
        return list(zip(self.labels, self.vectors))

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError("unknown label %r" % label) from None


def parse_edge_list(text: str) -> LinkGraph:
    """Parse a tab-separated edge list into a LinkGraph.

    Each line is ``source<TAB>target<TAB>count``; blank lines and lines
    starting with '#' are skipped.  Duplicate (source, target) lines sum
    their counts.  An isolated node is declared by ``label`` alone or
    ``label<TAB>`` with nothing after the tab.  Tabs separate fields, so
    labels may contain spaces.

    Raises ParseError (with line number) for malformed lines, and for
    input that declares no nodes at all.
    """
    graph = LinkGraph()
    for lineno, line in content_lines(text):
        fields = line.rstrip("\r\n").split("\t")
        try:
            if len(fields) == 1 or (len(fields) == 2 and fields[1] == ""):
                graph.add_node(fields[0])
            elif len(fields) == 3:
                source, target, count_text = fields
                try:
                    count = int(count_text.strip())
                except ValueError:
                    raise ValueError(
                        "link count must be an integer, got %r" % count_text
                    ) from None
                graph.add_edge(source, target, count)
            else:
                raise ValueError(
                    "expected 'source<TAB>target<TAB>count', got %d field(s)"
                    % len(fields)
                )
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if not graph.nodes:
        raise ParseError("empty edge list: no nodes declared")
    return graph


def write_edge_list(graph: LinkGraph) -> str:
    """Serialize a LinkGraph in the edge-list format.

    Every node is declared up front so that re-parsing reproduces the
    node order exactly, even for nodes that first appear as targets.
    """
    lines = ["%s\t" % label for label in graph.nodes]
    lines.extend(
        "%s\t%s\t%d" % (s, t, w) for s, t, w in graph.edges
    )
    return "\n".join(lines) + "\n"


def extract_vectors(
    graph: LinkGraph, direction: str = OUTGOING, normalization: str = RAW
) -> DataSet:
    """Build the per-node link vectors of *graph*.

    Vector dimension equals the node count.  For ``outgoing``, record i
    holds the weights of edges i -> j; for ``incoming``, the weights of
    edges j -> i (the transpose).  Self-links sit on the diagonal in both
    cases.  ``relative_l1`` divides each non-zero vector by its component
    sum, so it expresses each node's link budget as fractions.
    """
    if len(graph) == 0:
        raise ValueError("graph has no nodes")
    if direction not in _DIRECTIONS:
        raise ValueError("unknown direction %r" % direction)
    if normalization not in _NORMALIZATIONS:
        raise ValueError("unknown normalization %r" % normalization)
    matrix = graph.weight_matrix()
    if direction == INCOMING:
        matrix = matrix.T.copy()
    if normalization == RELATIVE_L1:
        sums = matrix.sum(axis=1)
        nonzero = sums != 0
        matrix[nonzero] = matrix[nonzero] / sums[nonzero, None]
    return DataSet(
        dimension=len(graph),
        labels=list(graph.nodes),
        vectors=matrix,
        direction=direction,
        normalization=normalization,
    )


def write_sompak_dat(dataset: DataSet) -> str:
    """Serialize a DataSet in SOM_PAK ``.dat`` form.

    First content line is the vector dimension; each record line holds
    the components followed by the record label.  Values are printed so
    that parsing recovers them bit-exactly.  Direction and normalization
    travel in a comment header.
    """
    if len(dataset) == 0:
        raise ValueError("refusing to write an empty dataset")
    lines = [
        "# direction=%s normalization=%s" % (dataset.direction, dataset.normalization),
        str(dataset.dimension),
    ]
    for label, vector in dataset.records:
        parts = [format_real(x) for x in vector]
        if label is not None:
            if not label or label.split() != [label]:
                raise ValueError(
                    "label %r cannot be written: .dat labels are single "
                    "whitespace-free tokens" % label
                )
            parts.append(label)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_sompak_dat(text: str) -> DataSet:
    """Parse SOM_PAK ``.dat`` text into a DataSet.

    The first non-comment line must be the integer dimension.  Every
    following line carries exactly ``dimension`` reals plus an optional
    label token.  A ``# direction=... normalization=...`` comment, when
    present, restores the metadata; otherwise outgoing/raw is assumed.
    """
    direction, normalization = OUTGOING, RAW
    for comment in comment_lines(text):
        tokens = dict(
            part.split("=", 1) for part in comment.split() if "=" in part
        )
        if "direction" in tokens or "normalization" in tokens:
            direction = tokens.get("direction", direction)
            normalization = tokens.get("normalization", normalization)
            break

    dimension = None
    labels: list[str | None] = []
    rows: list[list[float]] = []
    for lineno, line in content_lines(text):
        fields = line.split()
        if dimension is None:
            if len(fields) != 1:
                raise ParseError(
                    "expected the dimension header, got %r" % line.strip(),
                    line=lineno,
                )
            try:
                dimension = int(fields[0])
            except ValueError:
                raise ParseError(
                    "dimension must be an integer, got %r" % fields[0], line=lineno
                ) from None
            if dimension < 1:
                raise ParseError("dimension must be positive", line=lineno)
            continue
        label: str | None = None
        if len(fields) == dimension + 1:
            label = fields[-1]
            fields = fields[:-1]
        if len(fields) != dimension:
            raise ParseError(
                "expected %d components, got %d" % (dimension, len(fields)),
                line=lineno,
            )
        try:
            rows.append([float(tok) for tok in fields])
        except ValueError:
            raise ParseError("non-numeric component in %r" % line, line=lineno) from None
        labels.append(label)

    if dimension is None:
        raise ParseError("missing dimension header")
    vectors = np.array(rows, dtype=float).reshape(len(rows), dimension)
    return DataSet(
        dimension=dimension,
        labels=labels,
        vectors=vectors,
        direction=direction,
        normalization=normalization,
    )
