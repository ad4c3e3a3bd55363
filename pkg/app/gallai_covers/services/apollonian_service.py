# ============================================================================
# app/gallai_covers/services/apollonian_service.py
# ============================================================================
from collections import defaultdict
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Set, Tuple

from ..config.models import BoundReport, Edge, Face, Graph, GroupStats, PathCover, StackingSequence
from ..config.settings import settings
from ..utils.helpers import canonical_edge, ceil_half, ceil_third, get_logger
from ..utils.validators import CoverConsistencyError, InvalidFace
from .graph_service import degree_profile, verify_cover
from .path_links import PathLinks

logger = get_logger(__name__)

INITIAL_FACE: Face = (0, 1, 2)


def _key(a: int, b: int, c: int) -> Face:
    return tuple(sorted((a, b, c)))


def replay(seq: StackingSequence) -> Iterator[Tuple[int, Face, Optional[int]]]:
    """
    Replay the stacking operations against a face table keyed by sorted
    triples. Yields (vertex, face, creator of that face); the initial
    triangle has no creator. Raises InvalidFace for a face that is not
    (or no longer) present.
    """
    faces: Dict[Face, Optional[int]] = {INITIAL_FACE: None}
    for v, face in seq.ops:
        key = _key(*face)
        if key not in faces:
            raise InvalidFace(f"vertex {v} is stacked into {key}, which is not a face at that point")
        creator = faces.pop(key)
        a, b, c = key
        faces[_key(v, a, b)] = v
        faces[_key(v, a, c)] = v
        faces[_key(v, b, c)] = v
        yield v, key, creator


def face_table(seq: StackingSequence) -> Dict[Face, Optional[int]]:
    """Interior faces after all operations, mapped to the vertex that created them"""
    faces: Dict[Face, Optional[int]] = {INITIAL_FACE: None}
    for v, key, _ in replay(seq):
        del faces[key]
        a, b, c = key
        for face in (_key(v, a, b), _key(v, a, c), _key(v, b, c)):
            faces[face] = v
    return faces


def build_graph(seq: StackingSequence) -> Graph:
    """The planar 3-tree of a stacking sequence: K3 plus three edges per operation"""
    edges: List[Edge] = [(0, 1), (0, 2), (1, 2)]
    for v, (a, b, c), _ in replay(seq):
        edges.extend(((a, v), (b, v), (c, v)))
    return Graph(n=seq.n, edges=tuple(edges))


class StackingTree:
    """Stacked vertices, each a child of the vertex that created its face"""

    def __init__(self, parent: Dict[int, Optional[int]], face_map: Dict[int, Face]):
        self.parent = parent
        self.face_map = face_map
        self.nodes: List[int] = sorted(parent)
        self.root: Optional[int] = self.nodes[0] if self.nodes else None
        self._children: Dict[int, List[int]] = defaultdict(list)
        self._depth: Dict[int, int] = {}
        for v in self.nodes:
            p = parent[v]
            if p is None:
                self._depth[v] = 0
            else:
                self._children[p].append(v)
                self._depth[v] = self._depth[p] + 1

    def __len__(self) -> int:
        return len(self.nodes)

    def children(self, v: int) -> List[int]:
        return self._children.get(v, [])

    def depth(self, v: int) -> int:
        return self._depth[v]

    def height(self) -> int:
        return max(self._depth.values(), default=-1)

    def leaves(self) -> List[int]:
        return [v for v in self.nodes if not self._children.get(v)]

    def is_path(self) -> bool:
        return all(len(self.children(v)) <= 1 for v in self.nodes)

    def is_proper_ternary(self) -> bool:
        return all(len(self.children(v)) in (0, 3) for v in self.nodes)


def stacking_tree(seq: StackingSequence) -> StackingTree:
    parent: Dict[int, Optional[int]] = {}
    face_map: Dict[int, Face] = {}
    for v, face, creator in replay(seq):
        parent[v] = creator
        face_map[v] = face
    return StackingTree(parent, face_map)


class Group(NamedTuple):
    """
    kind: "first", "I", "II" or "III".
    nodes: I (parent, child); II (parent, child, child); III three siblings;
    first: () or (root,). parent: tree parent of the group's top node.
    """
    kind: str
    nodes: Tuple[int, ...]
    parent: Optional[int]


class GroupPartition(NamedTuple):
    groups: List[Group]
    alpha: int
    beta: int
    gamma: int

    def sizes_ok(self, n: int) -> bool:
        """n - 3 equals |g_1| + 2 alpha + 3 beta + 3 gamma"""
        first = len(self.groups[0].nodes)
        return first in (0, 1) and n - 3 == first + 2 * self.alpha + 3 * self.beta + 3 * self.gamma

    def stats(self) -> GroupStats:
        return GroupStats(alpha=self.alpha, beta=self.beta, gamma=self.gamma,
                          bound=2 + self.alpha + 2 * self.beta + self.gamma)


def group_partition(tree: StackingTree) -> GroupPartition:
    """
    Repeatedly group a deepest remaining leaf (smallest id first): alone under
    its parent gives type I, with one sibling type II, with two siblings
    type III. What remains at the end (nothing or the root) is the first
    group. Groups are returned first to last, the reverse of creation order.
    """
    by_depth: Dict[int, List[int]] = defaultdict(list)
    for v in tree.nodes:
        by_depth[tree.depth(v)].append(v)

    remaining: Dict[int, Set[int]] = {v: set(tree.children(v)) for v in tree.nodes}
    removed: Set[int] = set()
    created: List[Group] = []
    counts = {"I": 0, "II": 0, "III": 0}

    for depth in range(tree.height(), 0, -1):
        for v in by_depth[depth]:
            if v in removed:
                continue
            p = tree.parent[v]
            siblings = sorted(remaining[p] - {v})
            if not siblings:
                group = Group("I", (p, v), tree.parent[p])
                members = (p, v)
            elif len(siblings) == 1:
                group = Group("II", (p,) + tuple(sorted((v, siblings[0]))), tree.parent[p])
                members = group.nodes
            else:
                group = Group("III", tuple(sorted([v] + siblings)), p)
                members = group.nodes
            counts[group.kind] += 1
            created.append(group)
            for x in members:
                removed.add(x)
                parent = tree.parent[x]
                if parent is not None:
                    remaining[parent].discard(x)

    if tree.root is not None and tree.root not in removed:
        first = Group("first", (tree.root,), None)
    else:
        first = Group("first", (), None)
    groups = [first] + created[::-1]
    return GroupPartition(groups=groups, alpha=counts["I"], beta=counts["II"], gamma=counts["III"])


def _edge_towards_corner(x: int, y: int, c: int) -> Tuple[int, int]:
    """Of the edges x-c and y-c pick the lexicographically smaller; returns (its other end, c)"""
    return (x, c) if canonical_edge(x, c) <= canonical_edge(y, c) else (y, c)


class _Stacker:
    """Incremental cover of G_1, G_2, ... on linked occurrences"""

    def __init__(self, tree: StackingTree):
        self.tree = tree
        self.links = PathLinks()
        self.next_tag = 0

    def new_path(self, vertices) -> None:
        self.links.add_path(vertices, self.next_tag)
        self.next_tag += 1

    def base(self, first: Group) -> None:
        if not first.nodes:
            self.new_path((0, 1, 2))
            self.new_path((2, 0))
        else:
            r = first.nodes[0]
            self.new_path((0, 1, 2, r))
            self.new_path((2, 0, r, 1))

    def type_one(self, u: int, v: int) -> Tuple[int, int, int]:
        """Stack u and its child v; returns (x, y, c) with c the corner of u's face away from v"""
        a, b, c0 = self.tree.face_map[u]
        x, y = (w for w in self.tree.face_map[v] if w != u)
        c = next(w for w in (a, b, c0) if w not in (x, y))
        x, _ = _edge_towards_corner(x, y, c)
        y = next(w for w in (a, b, c0) if w not in (x, c))
        self.links.subdivide(x, c, (v, u))
        self.new_path((c, x, u, y, v))
        return x, y, c

    def type_two(self, u: int, v: int, w: int) -> None:
        x, y, c = self.type_one(u, v)
        face = self.tree.face_map[w]
        if u not in face or c not in face:
            raise CoverConsistencyError(f"vertex {w} is not stacked into a face of {u} at corner {c}")
        p = next(z for z in face if z not in (u, c))
        self.links.extend(self.links.occurrence(c, x), (w,))
        self.new_path((u, w, p))

    def type_three(self, q: int, siblings: Tuple[int, ...]) -> None:
        ends = self.links.ends_at(q)
        if not ends:
            raise CoverConsistencyError(f"no path ends in the leaf {q}")
        end = min(ends, key=lambda occ: (self.links.tag(occ), occ))
        r = self.links.next_vertex(end)
        r1, r2 = (z for z in self.tree.face_map[q] if z != r)

        slot = {}
        for child in siblings:
            corners = frozenset(self.tree.face_map[child]) - {q}
            slot[corners] = child
        u = slot[frozenset((r, r1))]
        v = slot[frozenset((r, r2))]
        w = slot[frozenset((r1, r2))]

        self.links.subdivide(r, q, (u,))
        self.links.extend(end, (w,))
        self.links.subdivide(r2, q, (v,))
        self.new_path((v, r, q, r2, w, r1, u))

    def add(self, group: Group) -> None:
        if group.kind == "I":
            self.type_one(*group.nodes)
        elif group.kind == "II":
            self.type_two(*group.nodes)
        else:
            self.type_three(group.parent, group.nodes)


def _partial_graph(seq: StackingSequence, present: Set[int]) -> Graph:
    edges = [(0, 1), (0, 2), (1, 2)]
    for v, (a, b, c) in seq.ops:
        if v in present:
            edges.extend(((a, v), (b, v), (c, v)))
    return Graph(n=seq.n, edges=tuple(edges))


def cover_3tree(seq: StackingSequence,
                checkpoint: Optional[Callable[[Graph, PathCover], None]] = None,
                check_invariants: Optional[bool] = None,
                graph: Optional[Graph] = None) -> Tuple[PathCover, GroupStats]:
    """
    Cover a planar 3-tree with exactly 2 + alpha + 2 beta + gamma paths by
    adding the groups of its partition one by one (2 paths for K3 or K4,
    then +1 per type I or III group and +2 per type II group).

    checkpoint(graph_i, cover_i) is called after every group. A graph already
    built from seq can be passed in to skip rebuilding it.
    """
    if check_invariants is None:
        check_invariants = settings.CHECK_INVARIANTS
    if graph is None:
        graph = build_graph(seq)
    tree = stacking_tree(seq)
    partition = group_partition(tree)
    stats = partition.stats()

    stacker = _Stacker(tree)
    present: Set[int] = set()
    for i, group in enumerate(partition.groups):
        if i == 0:
            stacker.base(group)
        else:
            stacker.add(group)
        present.update(group.nodes)
        if checkpoint is not None or check_invariants:
            partial = PathCover(paths=tuple(stacker.links.paths()))
            graph_i = _partial_graph(seq, present)
            if check_invariants:
                report = verify_cover(graph_i, partial)
                if not report.valid:
                    raise CoverConsistencyError(f"after group {i + 1} ({group.kind}): {report.violation}")
            if checkpoint is not None:
                checkpoint(graph_i, partial)

    pc = PathCover.model_construct(paths=tuple(stacker.links.paths()), host=graph)
    if pc.size != stats.bound:
        raise CoverConsistencyError(f"cover has {pc.size} paths, expected exactly {stats.bound}")
    report = verify_cover(graph, pc)
    if not report.valid:
        logger.error(f"Planar 3-tree cover failed verification: {report.violation}")
        raise CoverConsistencyError(report.violation)

    logger.info(f"Covered planar 3-tree n={graph.n} with {pc.size} paths "
                f"(alpha={stats.alpha}, beta={stats.beta}, gamma={stats.gamma})")
    return pc, stats


def bound_report(seq: StackingSequence) -> BoundReport:
    """Constructive bound, its regime, and the reference bounds it is compared with"""
    graph = build_graph(seq)
    tree = stacking_tree(seq)
    partition = group_partition(tree)
    profile = degree_profile(graph)
    n = graph.n
    alpha, beta, gamma = partition.alpha, partition.beta, partition.gamma
    leaf_count = len(tree.leaves())
    regime = 4 * beta <= n - 4

    if len(tree) == 0:
        leaf_witness = None
        dk_hypothesis = None
    else:
        leaf_witness = profile.n_odd >= leaf_count >= beta + 1
        dk_hypothesis = None if regime else profile.n_odd >= beta + 1 and 4 * (beta + 1) > n

    return BoundReport(
        n=n, alpha=alpha, beta=beta, gamma=gamma,
        constructive_bound=2 + alpha + 2 * beta + gamma,
        regime_holds=regime,
        five_eighths=5 * n // 8,
        half_ceiling=ceil_half(n),
        third_ceiling=ceil_third(n),
        n_odd=profile.n_odd,
        n_even=profile.n_even,
        dk_bound=profile.n_odd // 2 + (2 * profile.n_even) // 3,
        leaf_count=leaf_count,
        leaf_witness=leaf_witness,
        dk_hypothesis=dk_hypothesis,
    )
