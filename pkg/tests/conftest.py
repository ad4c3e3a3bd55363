import json

import pytest

from app.gallai_covers.config.models import Graph, StackingSequence


@pytest.fixture
def triangle() -> Graph:
    return Graph(n=3, edges=((0, 1), (1, 2), (0, 2)))


@pytest.fixture
def diamond() -> Graph:
    """K4 minus the edge 1-2, terminals on the two degree-3 vertices"""
    return Graph(n=4, edges=((0, 1), (1, 3), (0, 2), (2, 3), (0, 3)), terminals=(0, 3))


@pytest.fixture
def k4() -> Graph:
    return Graph(n=4, edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), terminals=(0, 1))


@pytest.fixture
def k4_stacking() -> StackingSequence:
    return StackingSequence(ops=((3, (0, 1, 2)),))


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document under tmp_path and return its path as a string"""
    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)
    return _write
