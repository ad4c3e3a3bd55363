import pytest
from pydantic import ValidationError as PydanticValidationError

from app.gallai_covers.config.models import Graph, PathCover, RunRecord
from app.gallai_covers.services.graph_service import (
    degree_profile,
    dump_cover,
    dump_graph,
    dump_stacking,
    endpoint_lower_bound,
    load_cover,
    load_graph,
    load_stacking,
    parse_graph,
    parse_stacking,
    verify_cover,
)
from app.gallai_covers.utils.validators import GraphValidationError


def test_triangle_two_paths_are_valid(triangle):
    report = verify_cover(triangle, PathCover(paths=((0, 1, 2), (2, 0))))
    assert report.valid
    assert report.size == 2


def test_missing_edge_is_reported(triangle):
    report = verify_cover(triangle, PathCover(paths=((0, 1, 2),)))
    assert not report.valid
    assert "0-2 is not covered" in report.violation


def test_repeated_vertex_is_not_a_path(triangle):
    report = verify_cover(triangle, PathCover(paths=((0, 1, 2, 0),)))
    assert not report.valid
    assert "repeats a vertex" in report.violation


def test_edge_covered_twice(triangle):
    report = verify_cover(triangle, PathCover(paths=((0, 1, 2), (2, 0), (1, 0))))
    assert not report.valid
    assert "covered twice" in report.violation


def test_non_edge_is_rejected():
    path = Graph(n=3, edges=((0, 1), (1, 2)))
    report = verify_cover(path, PathCover(paths=((0, 2),)))
    assert not report.valid
    assert "not an edge" in report.violation


def test_verification_ignores_path_order(diamond):
    paths = ((0, 1, 3, 2), (3, 0, 2))
    forward = verify_cover(diamond, PathCover(paths=paths))
    backward = verify_cover(diamond, PathCover(paths=paths[::-1]))
    assert forward.valid and backward.valid
    assert forward.size == backward.size == 2


def test_degree_profile_and_lower_bound(k4, triangle):
    profile = degree_profile(k4)
    assert (profile.n_odd, profile.n_even) == (4, 0)
    assert endpoint_lower_bound(k4) == 2
    assert endpoint_lower_bound(triangle) == 1


def test_lower_bound_needs_an_edge():
    with pytest.raises(GraphValidationError):
        endpoint_lower_bound(Graph(n=1))


def test_graph_edges_are_canonical():
    g = Graph(n=3, edges=((2, 1), (1, 0)))
    assert g.edges == ((0, 1), (1, 2))
    assert g.has_edge(2, 1)
    assert g.degree(1) == 2


@pytest.mark.parametrize("document", [
    {"n": 2, "edges": [[0, 0]]},
    {"n": 2, "edges": [[0, 1], [1, 0]]},
    {"n": 2, "edges": [[0, 2]]},
    {"n": 2, "edges": [[0, 1]], "terminals": [1, 1]},
])
def test_malformed_graphs_are_rejected(document):
    with pytest.raises(GraphValidationError):
        parse_graph(document)


def test_disconnected_graph_is_rejected():
    with pytest.raises(GraphValidationError, match="disconnected"):
        parse_graph({"n": 4, "edges": [[0, 1], [2, 3]]})


def test_stacking_document_checks_vertex_order():
    assert parse_stacking({"ops": [[3, [0, 1, 2]], [4, [0, 1, 3]]]}).n == 5
    with pytest.raises(GraphValidationError):
        parse_stacking({"ops": [[4, [0, 1, 2]]]})
    with pytest.raises(GraphValidationError):
        parse_stacking({"ops": [[3, [0, 1, 1]]]})
    with pytest.raises(GraphValidationError):
        parse_stacking({"ops": [[3, [0, 1, 5]]]})


def test_graph_and_cover_files(tmp_path, diamond):
    graph_path, cover_path = str(tmp_path / "g.json"), str(tmp_path / "c.json")
    dump_graph(diamond, graph_path)
    dump_cover(PathCover(paths=((0, 1, 3), (0, 2, 3), (3, 0))), cover_path)
    loaded = load_graph(graph_path)
    assert loaded == diamond
    assert load_cover(cover_path).paths == ((0, 1, 3), (0, 2, 3), (3, 0))


def test_run_record_violations():
    record = RunRecord(family="sp", n=4, m=5, algorithm="sp", size=3, bound=2, lower_bound=1, oracle=2)
    assert record.violations() == ["size 3 exceeds bound 2"]
    below = record.model_copy(update={"size": 1, "bound": 3})
    assert "below oracle minimum 2" in below.violations()[0]
    assert record.as_row()[-2] == "2"


def test_stacking_file(tmp_path, k4_stacking):
    path = str(tmp_path / "s.json")
    dump_stacking(k4_stacking, path)
    assert load_stacking(path) == k4_stacking


def test_out_of_range_vertex_fails_validation():
    with pytest.raises(PydanticValidationError, match="out of range"):
        Graph.model_validate({"n": 2, "edges": [[0, 2]]})
