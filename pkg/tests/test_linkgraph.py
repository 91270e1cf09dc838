import numpy as np
import pytest

from linksom import (
    DataSet,
    ParseError,
    extract_vectors,
    parse_edge_list,
    parse_sompak_dat,
    write_edge_list,
    write_sompak_dat,
)
from linksom.rng import SplitMix64

from helpers import random_graph


def test_single_edge():
    graph = parse_edge_list("fernand0\tatalaya\t7\n")
    assert graph.nodes == ["fernand0", "atalaya"]
    assert graph.edges == [("fernand0", "atalaya", 7)]
    assert graph.weight("fernand0", "atalaya") == 7


def test_duplicate_edges_sum():
    graph = parse_edge_list("a\tb\t3\na\tb\t2\n")
    assert graph.edges == [("a", "b", 5)]


def test_negative_count_is_parse_error_with_line():
    with pytest.raises(ParseError, match="line 1"):
        parse_edge_list("a\tb\t-1\n")


def test_non_integer_count():
    with pytest.raises(ParseError, match="line 2"):
        parse_edge_list("a\tb\t3\na\tb\tx\n")


def test_wrong_field_count():
    with pytest.raises(ParseError, match="line 1"):
        parse_edge_list("a\tb\t3\textra\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_edge_list("a\tb\n")


def test_comments_and_blanks_skipped():
    graph = parse_edge_list("# heading\n\na\tb\t1\n   \n# trailing\n")
    assert graph.edges == [("a", "b", 1)]


def test_isolated_node_declarations():
    graph = parse_edge_list("solo\t\nother\na\tb\t2\n")
    assert graph.nodes == ["solo", "other", "a", "b"]


def test_labels_with_spaces():
    graph = parse_edge_list("my blog\tyour blog\t4\n")
    assert graph.nodes == ["my blog", "your blog"]
    again = parse_edge_list(write_edge_list(graph))
    assert again.nodes == graph.nodes and again.edges == graph.edges


def test_empty_input_is_error():
    with pytest.raises(ParseError):
        parse_edge_list("")
    with pytest.raises(ParseError):
        parse_edge_list("# only comments\n\n")


def test_node_order_is_first_appearance():
    graph = parse_edge_list("c\ta\t1\nb\tc\t2\n")
    assert graph.nodes == ["c", "a", "b"]


def test_self_edges_allowed():
    graph = parse_edge_list("pawley\tpawley\t6\n")
    assert graph.weight("pawley", "pawley") == 6


def test_reserialization_is_idempotent():
    rng = SplitMix64(11)
    for _ in range(20):
        graph = random_graph(rng, 2 + rng.next_index(8))
        text = write_edge_list(graph)
        again = parse_edge_list(text)
        assert again.nodes == graph.nodes
        assert again.edges == graph.edges
        assert write_edge_list(again) == text


def test_extract_outgoing_and_incoming():
    graph = parse_edge_list("a\tb\t7\n")
    out = extract_vectors(graph, "outgoing", "raw")
    assert out.dimension == 2
    assert out.labels == ["a", "b"]
    assert np.array_equal(out.vectors, [[0.0, 7.0], [0.0, 0.0]])
    inc = extract_vectors(graph, "incoming", "raw")
    assert np.array_equal(inc.vectors, [[0.0, 0.0], [7.0, 0.0]])


def test_extract_relative_l1():
    graph = parse_edge_list("a\ta\t1\na\tb\t3\n")
    rel = extract_vectors(graph, "outgoing", "relative_l1")
    assert np.allclose(rel.vectors[0], [0.25, 0.75], atol=1e-12)
    # zero vectors stay zero
    assert np.array_equal(rel.vectors[1], [0.0, 0.0])


def test_outgoing_is_transpose_of_incoming():
    rng = SplitMix64(22)
    for _ in range(25):
        graph = random_graph(rng, 2 + rng.next_index(10))
        out = extract_vectors(graph, "outgoing", "raw")
        inc = extract_vectors(graph, "incoming", "raw")
        assert np.array_equal(out.vectors, inc.vectors.T)


def test_total_weight_preserved():
    rng = SplitMix64(33)
    for _ in range(10):
        graph = random_graph(rng, 2 + rng.next_index(10))
        out = extract_vectors(graph, "outgoing", "raw")
        assert out.vectors.sum() == sum(w for _, _, w in graph.edges)


def test_non_linking_node_has_zero_vector():
    graph = parse_edge_list("a\tb\t2\nmute\t\n")
    out = extract_vectors(graph, "outgoing", "raw")
    assert np.array_equal(out.vectors[graph.node_index("mute")], [0.0, 0.0, 0.0])


def test_dat_write_format():
    ds = DataSet(dimension=2, labels=["a"], vectors=[[0.0, 7.0]])
    text = write_sompak_dat(ds)
    body = "\n".join(
        line for line in text.splitlines() if not line.startswith("#")
    ) + "\n"
    assert body == "2\n0 7 a\n"
    assert "# direction=outgoing normalization=raw" in text


def test_dat_round_trip_bit_exact():
    rng = SplitMix64(44)
    for _ in range(20):
        graph = random_graph(rng, 2 + rng.next_index(8))
        direction = "incoming" if rng.next_unit() < 0.5 else "outgoing"
        norm = "relative_l1" if rng.next_unit() < 0.5 else "raw"
        ds = extract_vectors(graph, direction, norm)
        back = parse_sompak_dat(write_sompak_dat(ds))
        assert back.dimension == ds.dimension
        assert back.labels == ds.labels
        assert np.array_equal(back.vectors, ds.vectors)
        assert back.direction == direction
        assert back.normalization == norm


def test_dat_parse_basics():
    ds = parse_sompak_dat("2\n1 2 x\n3 4 y\n")
    assert ds.dimension == 2
    assert ds.labels == ["x", "y"]
    assert np.array_equal(ds.vectors, [[1.0, 2.0], [3.0, 4.0]])
    assert ds.direction == "outgoing" and ds.normalization == "raw"


def test_dat_parse_without_labels():
    ds = parse_sompak_dat("2\n1 2\n3 4\n")
    assert ds.labels == [None, None]


def test_dat_arity_error_names_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_sompak_dat("2\n1 x\n")
    with pytest.raises(ParseError, match="line 3"):
        parse_sompak_dat("2\n1 2 x\n1 2 3 4 y\n")


def test_dat_missing_header():
    with pytest.raises(ParseError):
        parse_sompak_dat("# nothing here\n")


def test_dat_write_rejects_empty_and_bad_labels():
    ds = DataSet(dimension=1, labels=["a b"], vectors=[[1.0]])
    with pytest.raises(ValueError):
        write_sompak_dat(ds)
    empty = DataSet(dimension=1, labels=[], vectors=np.zeros((0, 1)))
    with pytest.raises(ValueError):
        write_sompak_dat(empty)


def test_dataset_validation():
    with pytest.raises(ValueError):
        DataSet(dimension=2, labels=["a"], vectors=[[1.0]])
    with pytest.raises(ValueError):
        DataSet(dimension=1, labels=["a", "b"], vectors=[[1.0]])
    with pytest.raises(ValueError):
        DataSet(dimension=1, labels=["a"], vectors=[[0.7]], normalization="relative_l1")


def test_extract_rejects_bad_arguments():
    graph = parse_edge_list("a\tb\t1\n")
    with pytest.raises(ValueError):
        extract_vectors(graph, "sideways", "raw")
    with pytest.raises(ValueError):
        extract_vectors(graph, "outgoing", "l2")
