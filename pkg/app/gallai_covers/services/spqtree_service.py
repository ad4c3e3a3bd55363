# ============================================================================
# app/gallai_covers/services/spqtree_service.py
# ============================================================================
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import graphviz

from ..config.models import Edge, Graph
from ..utils.helpers import get_logger
from ..utils.validators import GraphValidationError, MultiEdge, NotSeriesParallel

logger = get_logger(__name__)

NO_CHILD = -1


class NodeKind(str, Enum):
    Q = "Q"
    S = "S"
    P = "P"


class SpqNode(NamedTuple):
    """Q: the edge source-sink. S/P: ordered (left, right) children."""
    kind: NodeKind
    left: int
    right: int
    source: int
    sink: int


class SpqTree:
    """
    Ordered binary SPQ-tree stored as a node arena.

    Children always have smaller ids than their parent, so ascending id order
    is a valid bottom-up order. Only nodes reachable from root belong to the
    represented graph.
    """

    def __init__(self, nodes: Sequence[SpqNode], root: int):
        self.nodes: Tuple[SpqNode, ...] = tuple(nodes)
        self.root = root

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        root = self.nodes[self.root]
        return f"SpqTree(root={root.kind.value}, source={root.source}, sink={root.sink}, nodes={len(self.nodes)})"

    @property
    def terminals(self) -> Tuple[int, int]:
        root = self.nodes[self.root]
        return root.source, root.sink

    def kind(self, node: int) -> NodeKind:
        return self.nodes[node].kind

    def postorder(self, start: Optional[int] = None) -> List[int]:
        """Reachable node ids, children before parents, left before right"""
        start = self.root if start is None else start
        order: List[int] = []
        stack = [start]
        while stack:
            x = stack.pop()
            order.append(x)
            node = self.nodes[x]
            if node.kind is not NodeKind.Q:
                stack.append(node.left)
                stack.append(node.right)
        order.reverse()
        return order

    def preorder(self) -> List[int]:
        order: List[int] = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            order.append(x)
            node = self.nodes[x]
            if node.kind is not NodeKind.Q:
                stack.append(node.right)
                stack.append(node.left)
        return order

    def q_count(self) -> int:
        return sum(1 for x in self.postorder() if self.nodes[x].kind is NodeKind.Q)

    def in_order_edges(self, node: Optional[int] = None) -> List[Edge]:
        """Q-node edges of a subtree, left to right"""
        return [(self.nodes[x].source, self.nodes[x].sink)
                for x in self.postorder(node) if self.nodes[x].kind is NodeKind.Q]

    def vertex_counts(self) -> Dict[int, int]:
        """Vertices of each represented subgraph: Q=2, S=n1+n2-1, P=n1+n2-2"""
        counts: Dict[int, int] = {}
        for x in self.postorder():
            node = self.nodes[x]
            if node.kind is NodeKind.Q:
                counts[x] = 2
            elif node.kind is NodeKind.S:
                counts[x] = counts[node.left] + counts[node.right] - 1
            else:
                counts[x] = counts[node.left] + counts[node.right] - 2
        return counts

    def shape(self, node: Optional[int] = None) -> tuple:
        """Nested-tuple form, for structural comparisons"""
        built: Dict[int, tuple] = {}
        for x in self.postorder(node):
            n = self.nodes[x]
            if n.kind is NodeKind.Q:
                built[x] = ("Q", n.source, n.sink)
            else:
                built[x] = (n.kind.value, built.pop(n.left), built.pop(n.right))
        return built[self.root if node is None else node]

    def check(self) -> None:
        """Raise ValueError if series/parallel semantics are violated anywhere"""
        for x in self.postorder():
            node = self.nodes[x]
            if node.kind is NodeKind.Q:
                continue
            left, right = self.nodes[node.left], self.nodes[node.right]
            if node.left >= x or node.right >= x:
                raise ValueError(f"node {x} has a child with a larger id")
            if node.kind is NodeKind.S:
                if left.sink != right.source or (node.source, node.sink) != (left.source, right.sink):
                    raise ValueError(f"S-node {x} does not compose its children in series")
            else:
                if (left.source, left.sink) != (right.source, right.sink) or \
                        (node.source, node.sink) != (left.source, left.sink):
                    raise ValueError(f"P-node {x} does not compose its children in parallel")


class SpqTreeBuilder:
    """Bottom-up construction of SPQ-trees with composition checks"""

    def __init__(self):
        self.nodes: List[SpqNode] = []

    def q(self, source: int, sink: int) -> int:
        self.nodes.append(SpqNode(NodeKind.Q, NO_CHILD, NO_CHILD, source, sink))
        return len(self.nodes) - 1

    def series(self, left: int, right: int) -> int:
        a, b = self.nodes[left], self.nodes[right]
        if a.sink != b.source:
            raise ValueError(f"series composition needs sink {a.sink} == source {b.source}")
        self.nodes.append(SpqNode(NodeKind.S, left, right, a.source, b.sink))
        return len(self.nodes) - 1

    def parallel(self, left: int, right: int) -> int:
        a, b = self.nodes[left], self.nodes[right]
        if (a.source, a.sink) != (b.source, b.sink):
            raise ValueError("parallel composition needs identical terminals")
        if a.kind is NodeKind.Q and b.kind is NodeKind.Q:
            raise MultiEdge(f"two Q-nodes in parallel between {a.source} and {a.sink}")
        self.nodes.append(SpqNode(NodeKind.P, left, right, a.source, a.sink))
        return len(self.nodes) - 1

    def build(self, root: int) -> SpqTree:
        return SpqTree(self.nodes, root)


def recognize_and_build(g: Graph) -> SpqTree:
    """
    Build an SPQ-tree of g by series reductions (contract a degree-2
    non-terminal) and parallel merges (two edges between the same pair).

    Without terminals, nothing is protected and the endpoints of the last
    remaining edge become (s, t), smaller id first.
    """
    if g.m == 0:
        raise GraphValidationError("graph has no edges")
    if not g.is_connected():
        raise GraphValidationError("graph is disconnected")

    protected = set(g.terminals) if g.terminals is not None else set()

    # raw arena: children are always created before parents
    kinds: List[NodeKind] = []
    lefts: List[int] = []
    rights: List[int] = []
    ends: List[Tuple[int, int]] = []
    middles: List[int] = []

    def new_node(kind: NodeKind, left: int, right: int, a: int, b: int, middle: int = NO_CHILD) -> int:
        kinds.append(kind)
        lefts.append(left)
        rights.append(right)
        ends.append((a, b))
        middles.append(middle)
        return len(kinds) - 1

    adj: List[Dict[int, int]] = [dict() for _ in range(g.n)]
    for u, v in g.edges:
        e = new_node(NodeKind.Q, NO_CHILD, NO_CHILD, u, v)
        adj[u][v] = e
        adj[v][u] = e

    removed = [False] * g.n
    alive = g.n
    stack = [v for v in range(g.n) if len(adj[v]) == 2 and v not in protected]

    while stack:
        v = stack.pop()
        if removed[v] or len(adj[v]) != 2:
            continue
        (a, ea), (b, eb) = adj[v].items()
        series = new_node(NodeKind.S, ea, eb, a, b, middle=v)
        del adj[a][v]
        del adj[b][v]
        adj[v].clear()
        removed[v] = True
        alive -= 1

        existing = adj[a].get(b)
        if existing is None:
            adj[a][b] = series
            adj[b][a] = series
        else:
            merged = new_node(NodeKind.P, existing, series, a, b)
            adj[a][b] = merged
            adj[b][a] = merged
            for x in (a, b):
                if len(adj[x]) == 2 and x not in protected:
                    stack.append(x)

    remaining = [v for v in range(g.n) if not removed[v]]
    if alive != 2 or len(adj[remaining[0]]) != 1:
        raise NotSeriesParallel(
            f"reduction stopped with {alive} vertices left; graph is not two-terminal series-parallel"
            + (f" for terminals {g.terminals}" if g.terminals is not None else ""))

    if g.terminals is not None:
        s, t = g.terminals
    else:
        s, t = remaining
    root = adj[s][t]

    # orient top-down and fix the order of S-children
    source = [0] * len(kinds)
    sink = [0] * len(kinds)
    ordered: List[Tuple[int, int]] = [(lefts[i], rights[i]) for i in range(len(kinds))]
    source[root], sink[root] = s, t
    todo = [root]
    while todo:
        x = todo.pop()
        kind = kinds[x]
        if kind is NodeKind.Q:
            continue
        left, right = lefts[x], rights[x]
        if kind is NodeKind.S:
            a, _ = ends[x]
            # left raw child joins end a with the middle vertex
            if source[x] != a:
                left, right = right, left
            ordered[x] = (left, right)
            source[left], sink[left] = source[x], middles[x]
            source[right], sink[right] = middles[x], sink[x]
        else:
            for child in (left, right):
                source[child], sink[child] = source[x], sink[x]
        todo.append(left)
        todo.append(right)

    nodes = [SpqNode(kinds[i], ordered[i][0], ordered[i][1], source[i], sink[i]) for i in range(len(kinds))]
    tree = SpqTree(nodes, root)
    logger.debug(f"Built SPQ-tree with {len(nodes)} nodes for n={g.n}, m={g.m}, terminals=({s}, {t})")
    return tree


def _components_postorder(tree: SpqTree) -> List[Tuple[int, bool]]:
    """Postorder of (node, tops its S- or P-component); Q-nodes count as tops"""
    order: List[Tuple[int, bool]] = []
    stack: List[Tuple[int, Optional[NodeKind]]] = [(tree.root, None)]
    while stack:
        x, parent_kind = stack.pop()
        node = tree.nodes[x]
        order.append((x, node.kind is not parent_kind))
        if node.kind is not NodeKind.Q:
            stack.append((node.left, node.kind))
            stack.append((node.right, node.kind))
    order.reverse()
    return order


def _operands(tree: SpqTree, start: int, kind: NodeKind) -> List[int]:
    """Non-`kind` children of the `kind`-component rooted at start, in order"""
    out: List[int] = []
    stack = [start]
    while stack:
        x = stack.pop()
        node = tree.nodes[x]
        if node.kind is kind:
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append(x)
    return out


def is_normalized(tree: SpqTree) -> bool:
    """No S-node has an S-node as left child; every P-node has an S-node as left child"""
    for x in tree.postorder():
        node = tree.nodes[x]
        if node.kind is NodeKind.S and tree.nodes[node.left].kind is NodeKind.S:
            return False
        if node.kind is NodeKind.P and tree.nodes[node.left].kind is not NodeKind.S:
            return False
    return True


def normalize(tree: SpqTree) -> SpqTree:
    """
    Rebuild every S- and P-component as a path of right edges in one
    bottom-up pass. Series operands keep their order; a Q-operand of a
    P-component goes last so every left child of a P-node is an S-node.
    An already normalized tree is returned as is.
    """
    if is_normalized(tree):
        return tree

    builder = SpqTreeBuilder()
    new_id: Dict[int, int] = {}
    for x, top in _components_postorder(tree):
        if not top:
            continue
        node = tree.nodes[x]
        if node.kind is NodeKind.Q:
            new_id[x] = builder.q(node.source, node.sink)
            continue
        operands = [new_id[o] for o in _operands(tree, x, node.kind)]
        if node.kind is NodeKind.S:
            compose = builder.series
        else:
            operands.sort(key=lambda o: builder.nodes[o].kind is NodeKind.Q)
            compose = builder.parallel
        acc = operands[-1]
        for operand in reversed(operands[:-1]):
            acc = compose(operand, acc)
        new_id[x] = acc

    result = builder.build(new_id[tree.root])
    logger.debug(f"Normalized SPQ-tree ({len(result)} nodes)")
    return result


def expand(tree: SpqTree) -> Graph:
    """The represented graph with its terminals"""
    edges = tree.in_order_edges()
    n = 1 + max(max(u, v) for u, v in edges)
    return Graph(n=n, edges=tuple(edges), terminals=tree.terminals)


def to_dot(tree: SpqTree, name: str = "spq") -> graphviz.Digraph:
    """DOT rendering: one box per node labelled Q/S/P with its terminals"""
    dot = graphviz.Digraph(name=name)
    dot.attr("node", shape="box", fontname="Helvetica")
    for x in tree.preorder():
        node = tree.nodes[x]
        label = f"{node.kind.value} {node.source}-{node.sink}"
        dot.node(str(x), label=label, shape="ellipse" if node.kind is NodeKind.Q else "box")
        if node.kind is not NodeKind.Q:
            dot.edge(str(x), str(node.left), label="L")
            dot.edge(str(x), str(node.right), label="R")
    return dot
