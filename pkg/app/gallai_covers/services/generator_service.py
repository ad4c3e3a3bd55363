# ============================================================================
# app/gallai_covers/services/generator_service.py
# ============================================================================
import random
from typing import Dict, List, Optional, Set, Tuple

from ..config.models import Edge, Face, GenSpec, Graph, StackingSequence
from ..config.settings import settings
from ..utils.helpers import canonical_edge, get_logger
from ..utils.validators import GraphValidationError, validate_tree_size
from .spqtree_service import NodeKind, SpqTree, SpqTreeBuilder, expand

logger = get_logger(__name__)


def instance_rng(family: str, size: int, seed: int) -> random.Random:
    """One PRNG stream per (family, size, seed)"""
    return random.Random(f"{family}:{size}:{seed}")


class _GrowingTree:
    """Mutable SPQ-tree used while growing a random series-parallel graph"""

    def __init__(self):
        self.kind: List[NodeKind] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.source: List[int] = []
        self.sink: List[int] = []
        self.parent: List[int] = []
        self.root = self._add(NodeKind.Q, -1, -1, 0, 1)
        self.vertices = 2
        self.edges: Set[Edge] = {(0, 1)}
        self.q_nodes: List[int] = [self.root]
        self.s_nodes: List[int] = []

    def _add(self, kind: NodeKind, left: int, right: int, source: int, sink: int) -> int:
        self.kind.append(kind)
        self.left.append(left)
        self.right.append(right)
        self.source.append(source)
        self.sink.append(sink)
        self.parent.append(-1)
        x = len(self.kind) - 1
        for child in (left, right):
            if child >= 0:
                self.parent[child] = x
        return x

    def _path_through(self, a: int, b: int) -> int:
        x = self.vertices
        self.vertices += 1
        first = self._add(NodeKind.Q, -1, -1, a, x)
        second = self._add(NodeKind.Q, -1, -1, x, b)
        self.q_nodes.extend((first, second))
        self.edges.update((canonical_edge(a, x), canonical_edge(x, b)))
        series = self._add(NodeKind.S, first, second, a, b)
        self.s_nodes.append(series)
        return series

    def subdivide(self, i: int) -> None:
        """Replace the i-th live Q-node by a two-edge path"""
        q = self.q_nodes[i]
        self.q_nodes[i] = self.q_nodes[-1]
        self.q_nodes.pop()
        a, b = self.source[q], self.sink[q]
        self.edges.discard(canonical_edge(a, b))
        parent = self.parent[q]
        self._hang(parent, q, self._path_through(a, b))

    def parallel_path(self, q: int) -> None:
        a, b = self.source[q], self.sink[q]
        parent = self.parent[q]
        series = self._path_through(a, b)
        self._hang(parent, q, self._add(NodeKind.P, series, q, a, b))

    def chord(self, s: int) -> bool:
        a, b = self.source[s], self.sink[s]
        if canonical_edge(a, b) in self.edges:
            return False
        parent = self.parent[s]
        q = self._add(NodeKind.Q, -1, -1, a, b)
        self.q_nodes.append(q)
        self.edges.add(canonical_edge(a, b))
        self._hang(parent, s, self._add(NodeKind.P, s, q, a, b))
        return True

    def _hang(self, parent: int, old: int, new: int) -> None:
        """Put `new` in the slot of `parent` that held `old`"""
        self.parent[new] = parent
        if parent < 0:
            self.root = new
        elif self.left[parent] == old:
            self.left[parent] = new
        else:
            self.right[parent] = new

    def freeze(self) -> SpqTree:
        builder = SpqTreeBuilder()
        built: Dict[int, int] = {}
        stack = [(self.root, False)]
        while stack:
            x, expanded = stack.pop()
            if self.kind[x] is NodeKind.Q:
                built[x] = builder.q(self.source[x], self.sink[x])
            elif not expanded:
                stack.append((x, True))
                stack.append((self.right[x], False))
                stack.append((self.left[x], False))
            elif self.kind[x] is NodeKind.S:
                built[x] = builder.series(built.pop(self.left[x]), built.pop(self.right[x]))
            else:
                built[x] = builder.parallel(built.pop(self.left[x]), built.pop(self.right[x]))
        return builder.build(built[self.root])


def random_sp_tree(n: int, seed: int, series_bias: Optional[float] = None,
                   chord_rate: Optional[float] = None) -> SpqTree:
    """
    Grow a random SPQ-tree over exactly n vertices: each step subdivides a
    random edge (series) or adds a two-edge path beside it (parallel);
    between steps a chord may close an S-node whose terminals are not yet
    adjacent. Vertex ids are not relabelled.
    """
    if n < 2:
        raise GraphValidationError("a series-parallel graph needs at least 2 vertices")
    series_bias = settings.SP_SERIES_BIAS if series_bias is None else series_bias
    chord_rate = settings.SP_CHORD_RATE if chord_rate is None else chord_rate
    rng = instance_rng("sp", n, seed)

    tree = _GrowingTree()
    while tree.vertices < n:
        if tree.s_nodes and rng.random() < chord_rate:
            tree.chord(rng.choice(tree.s_nodes))
        i = rng.randrange(len(tree.q_nodes))
        if rng.random() < series_bias:
            tree.subdivide(i)
        else:
            tree.parallel_path(tree.q_nodes[i])
    return tree.freeze()


def gen_sp_random(n: int, seed: int) -> Graph:
    """Connected simple two-terminal series-parallel graph on exactly n vertices"""
    grown = expand(random_sp_tree(n, seed))
    rng = instance_rng("sp-labels", n, seed)
    labels = list(range(n))
    rng.shuffle(labels)
    edges = tuple((labels[u], labels[v]) for u, v in grown.edges)
    s, t = grown.terminals
    return Graph(n=n, edges=edges, terminals=(labels[s], labels[t]))


def gen_triangle_chain(n: int) -> Graph:
    """Triangles (2i, 2i+1, 2i+2) glued at shared vertices; terminals are the two chain ends"""
    if n < 3 or n % 2 == 0:
        raise GraphValidationError("a triangle chain needs an odd n >= 3")
    edges: List[Edge] = []
    for i in range((n - 1) // 2):
        a, b, c = 2 * i, 2 * i + 1, 2 * i + 2
        edges.extend(((a, b), (b, c), (a, c)))
    return Graph(n=n, edges=tuple(edges), terminals=(0, n - 1))


def _child_faces(v: int, face: Face) -> List[Face]:
    a, b, c = face
    return [tuple(sorted((v, a, b))), tuple(sorted((v, a, c))), tuple(sorted((v, b, c)))]


def gen_3tree(kind: str, size: int, seed: int) -> StackingSequence:
    """
    Stacking sequence of a planar 3-tree with `size` vertices.

    random: uniform choice among the current faces. full: breadth-first,
    every stacked vertex receives three children. serpentine: always a face
    the previous vertex just created. all_type_II: a chain of cherries whose
    group partition has only type II groups.
    """
    is_valid, error_msg = validate_tree_size(kind, size)
    if not is_valid:
        raise GraphValidationError(error_msg)

    rng = instance_rng(f"3tree-{kind}", size, seed)
    ops: List[Tuple[int, Face]] = []
    root_face: Face = (0, 1, 2)

    def stack(face: Face) -> int:
        v = 3 + len(ops)
        ops.append((v, face))
        return v

    count = size - 3
    if kind == "random":
        faces: List[Face] = [root_face]
        for _ in range(count):
            i = rng.randrange(len(faces))
            face = faces[i]
            faces[i] = faces[-1]
            faces.pop()
            faces.extend(_child_faces(stack(face), face))

    elif kind == "full":
        queue = [(stack(root_face), root_face)]
        head = 0
        while len(ops) < count:
            v, face = queue[head]
            head += 1
            for child_face in _child_faces(v, face):
                queue.append((stack(child_face), child_face))

    elif kind == "serpentine":
        face = root_face
        for _ in range(count):
            v = stack(face)
            face = rng.choice(_child_faces(v, face))

    else:
        face = root_face
        for _ in range(count // 3):
            p = stack(face)
            first, second = rng.sample(_child_faces(p, face), 2)
            leaf = stack(first)
            stack(second)
            face = rng.choice(_child_faces(leaf, first))

    logger.debug(f"Generated {kind} planar 3-tree with {size} vertices (seed={seed})")
    return StackingSequence(ops=tuple(ops))


def generate(spec: GenSpec):
    """Instance for a GenSpec: a Graph for series-parallel families, a StackingSequence for 3-trees"""
    if spec.family == "sp":
        return gen_sp_random(spec.size, spec.seed)
    if spec.family == "triangle-chain":
        return gen_triangle_chain(spec.size)
    kind = {"3tree-random": "random", "3tree-full": "full", "3tree-serpentine": "serpentine",
            "3tree-all-type-ii": "all_type_II"}.get(spec.family)
    if kind is None:
        raise GraphValidationError(f"unknown family '{spec.family}'")
    return gen_3tree(kind, spec.size, spec.seed)
