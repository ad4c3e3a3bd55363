# ============================================================================
# app/gallai_covers/services/oracle_service.py
# ============================================================================
from collections import deque
from typing import Deque, List, Optional, Tuple

from ..config.models import Graph, OracleResult, PathCover
from ..config.settings import settings
from ..utils.helpers import get_logger
from ..utils.validators import BudgetExceeded, GraphValidationError, OracleCapExceeded
from .graph_service import endpoint_lower_bound

logger = get_logger(__name__)


class _Search:
    """Backtracking over at most k simple paths for a fixed k"""

    def __init__(self, g: Graph, node_limit: int):
        self.edges = list(g.edges)
        self.incident: List[List[Tuple[int, int]]] = [[] for _ in range(g.n)]
        for index, (u, v) in enumerate(self.edges):
            self.incident[u].append((v, index))
            self.incident[v].append((u, index))
        self.covered = [False] * len(self.edges)
        self.degree = [len(nbrs) for nbrs in self.incident]
        self.odd = sum(d % 2 for d in self.degree)
        self.remaining = len(self.edges)
        self.node_limit = node_limit
        self.nodes = 0
        self.k = 0
        self.closed: List[Tuple[int, ...]] = []

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExceeded(f"oracle explored more than {self.node_limit} nodes")

    def _take(self, index: int) -> None:
        self.covered[index] = True
        self.remaining -= 1
        for w in self.edges[index]:
            self.degree[w] -= 1
            self.odd += 1 if self.degree[w] % 2 else -1

    def _give(self, index: int) -> None:
        self.covered[index] = False
        self.remaining += 1
        for w in self.edges[index]:
            self.degree[w] += 1
            self.odd += 1 if self.degree[w] % 2 else -1

    def run(self, k: int) -> bool:
        self.k = k
        self.closed = []
        return self._start()

    def _start(self) -> bool:
        """No path is open: start one with the lowest uncovered edge"""
        self._tick()
        if self.remaining == 0:
            return True
        if len(self.closed) + max(1, self.odd // 2) > self.k:
            return False
        index = self.covered.index(False)
        a, b = self.edges[index]
        self._take(index)
        path: Deque[int] = deque((a, b))
        found = self._grow(path, {a, b}, tail_open=True)
        self._give(index)
        return found

    def _grow(self, path: Deque[int], visited: set, tail_open: bool) -> bool:
        """Extend the tail until it stops, then the head, then close the path"""
        self._tick()
        open_ends = 2 if tail_open else 1
        if len(self.closed) + 1 + max(0, self.odd // 2 - open_ends) > self.k:
            return False

        end = path[-1] if tail_open else path[0]
        for w, index in self.incident[end]:
            if self.covered[index] or w in visited:
                continue
            self._take(index)
            visited.add(w)
            if tail_open:
                path.append(w)
            else:
                path.appendleft(w)
            if self._grow(path, visited, tail_open):
                return True
            if tail_open:
                path.pop()
            else:
                path.popleft()
            visited.discard(w)
            self._give(index)

        if tail_open:
            return self._grow(path, visited, tail_open=False)

        self.closed.append(tuple(path))
        if self._start():
            return True
        self.closed.pop()
        return False


def min_path_cover(g: Graph, node_limit: Optional[int] = None, edge_cap: Optional[int] = None) -> OracleResult:
    """
    Exact minimum path cover by iterative deepening on the number of paths,
    starting at the endpoint lower bound.
    """
    node_limit = settings.ORACLE_NODE_LIMIT if node_limit is None else node_limit
    edge_cap = settings.ORACLE_EDGE_CAP if edge_cap is None else edge_cap
    if g.m > edge_cap:
        raise OracleCapExceeded(f"graph has {g.m} edges; the oracle accepts at most {edge_cap}")
    if not g.is_connected():
        raise GraphValidationError("the oracle needs a connected graph")

    search = _Search(g, node_limit)
    k = endpoint_lower_bound(g)
    while not search.run(k):
        k += 1

    witness = PathCover(paths=tuple(search.closed), host=g)
    logger.debug(f"Oracle: minimum {k} paths for n={g.n}, m={g.m} after {search.nodes} nodes")
    return OracleResult(min_size=k, witness=witness, nodes_explored=search.nodes)
