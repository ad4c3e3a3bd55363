# ============================================================================
# app/gallai_covers/services/graph_service.py
# ============================================================================
from typing import Any, Dict, Set

from pydantic import ValidationError as PydanticValidationError

from ..config.models import DegreeProfile, Graph, PathCover, StackingSequence, VerificationReport
from ..utils.helpers import get_logger, load_json_data, save_json_data
from ..utils.validators import GraphValidationError

logger = get_logger(__name__)


def verify_cover(g: Graph, pc: PathCover) -> VerificationReport:
    """
    Check that pc partitions the edges of g into simple paths.

    Violations are reported, never raised. The valid flag and size do not
    depend on the order of the paths.
    """
    used: Set[tuple] = set()
    edge_set = g.edge_set

    for index, path in enumerate(pc.paths):
        if len(path) < 2:
            return VerificationReport(valid=False, size=pc.size,
                                      violation=f"path {index} has fewer than 2 vertices")
        if len(set(path)) != len(path):
            return VerificationReport(valid=False, size=pc.size,
                                      violation=f"path {index} repeats a vertex (not a simple path)")
        for u, v in zip(path, path[1:]):
            edge = (u, v) if u < v else (v, u)
            if edge not in edge_set:
                return VerificationReport(valid=False, size=pc.size,
                                          violation=f"path {index} uses {u}-{v}, which is not an edge")
            if edge in used:
                return VerificationReport(valid=False, size=pc.size,
                                          violation=f"edge {edge[0]}-{edge[1]} is covered twice")
            used.add(edge)

    if len(used) != g.m:
        missing = next(e for e in g.edges if e not in used)
        return VerificationReport(valid=False, size=pc.size,
                                  violation=f"edge {missing[0]}-{missing[1]} is not covered")

    return VerificationReport(valid=True, size=pc.size)


def degree_profile(g: Graph) -> DegreeProfile:
    """Count odd- and even-degree vertices"""
    n_odd = sum(1 for v in range(g.n) if g.degree(v) % 2)
    return DegreeProfile(n_odd=n_odd, n_even=g.n - n_odd)


def endpoint_lower_bound(g: Graph) -> int:
    """max(1, n_odd/2): every odd-degree vertex is an endpoint of some path"""
    if g.m == 0:
        raise GraphValidationError("a graph without edges has no path cover to bound")
    return max(1, degree_profile(g).n_odd // 2)


def parse_graph(document: Dict[str, Any], require_connected: bool = True) -> Graph:
    """Build a Graph from its JSON document and check connectivity"""
    try:
        graph = Graph.model_validate(document)
    except PydanticValidationError as e:
        raise GraphValidationError(f"invalid graph document: {e.errors()[0]['msg']}") from e

    if require_connected and not graph.is_connected():
        raise GraphValidationError("graph is disconnected; only connected graphs are covered")
    return graph


def load_graph(file_path: str, require_connected: bool = True) -> Graph:
    """Load a graph JSON file"""
    logger.debug(f"Loading graph from {file_path}")
    return parse_graph(load_json_data(file_path), require_connected)


def dump_graph(g: Graph, file_path: str) -> None:
    save_json_data(g.to_document(), file_path)


def load_cover(file_path: str) -> PathCover:
    """Load a path cover JSON file"""
    try:
        return PathCover.model_validate(load_json_data(file_path))
    except PydanticValidationError as e:
        raise GraphValidationError(f"invalid cover document: {e.errors()[0]['msg']}") from e


def dump_cover(pc: PathCover, file_path: str) -> None:
    save_json_data(pc.to_document(), file_path)


def parse_stacking(document: Dict[str, Any]) -> StackingSequence:
    """Build a StackingSequence from its JSON document"""
    try:
        return StackingSequence.model_validate(document)
    except PydanticValidationError as e:
        raise GraphValidationError(f"invalid stacking document: {e.errors()[0]['msg']}") from e


def load_stacking(file_path: str) -> StackingSequence:
    return parse_stacking(load_json_data(file_path))


def dump_stacking(seq: StackingSequence, file_path: str) -> None:
    save_json_data(seq.to_document(), file_path)
