import pytest

from app.gallai_covers.config.models import Graph
from app.gallai_covers.services.graph_service import verify_cover
from app.gallai_covers.services.oracle_service import min_path_cover
from app.gallai_covers.utils.validators import BudgetExceeded, GraphValidationError, OracleCapExceeded


@pytest.mark.parametrize("graph, expected", [
    (Graph(n=2, edges=((0, 1),)), 1),
    (Graph(n=3, edges=((0, 1), (1, 2), (0, 2))), 2),
    (Graph(n=4, edges=((0, 1), (1, 2), (2, 3))), 1),
    (Graph(n=4, edges=((0, 1), (0, 2), (0, 3))), 2),
    (Graph(n=4, edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))), 2),
    (Graph(n=4, edges=((0, 1), (1, 2), (2, 3), (0, 3))), 2),
])
def test_small_minimums(graph, expected):
    result = min_path_cover(graph)
    assert result.min_size == expected
    assert result.witness.size == expected
    assert verify_cover(graph, result.witness).valid
    assert result.nodes_explored > 0


def test_edge_cap():
    k6 = Graph(n=6, edges=tuple((u, v) for u in range(6) for v in range(u + 1, 6)))
    with pytest.raises(OracleCapExceeded):
        min_path_cover(k6, edge_cap=14)


def test_node_limit():
    k4 = Graph(n=4, edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
    with pytest.raises(BudgetExceeded):
        min_path_cover(k4, node_limit=1)


def test_disconnected_graph_is_rejected():
    g = Graph(n=4, edges=((0, 1), (2, 3)))
    with pytest.raises(GraphValidationError, match="connected"):
        min_path_cover(g)
