# ============================================================================
# app/gallai_covers/services/sp_cover_service.py
# ============================================================================
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import islice
from typing import Deque, Dict, List, NamedTuple, Optional, Tuple

from ..config.models import Edge, Graph, PathCover
from ..config.settings import settings
from ..utils.helpers import ceil_half, get_logger
from ..utils.validators import CoverConsistencyError
from .graph_service import verify_cover
from .path_links import PathLinks
from .spqtree_service import NodeKind, SpqTree, normalize, recognize_and_build

logger = get_logger(__name__)


class CoverType(str, Enum):
    I_P = "I_P"
    I_S = "I_S"
    O = "O"
    L = "L"
    GAMMA = "Γ"

    def budget(self, n: int) -> int:
        """Maximum number of paths minus braces, in half-units"""
        return n + _BUDGET_OFFSET[self.value]

    @property
    def cover_class(self) -> str:
        return "Π" if self in (CoverType.I_P, CoverType.O) else "Σ"


_BUDGET_OFFSET = {"I_P": 0, "I_S": -1, "O": 1, "L": 0, "Γ": 0}


@dataclass
class Brace:
    """Three interior-disjoint u-v pieces: full paths p1, p2 and the u-v part of p3"""
    u: int
    v: int
    p1: int
    p2: int
    p3: int
    split_vertex: int
    creation_index: int
    node: int
    node_order: int
    p3_edge: Edge
    p1_length: int
    p2_length: int


@dataclass
class CoverTrace:
    """What happened at one SPQ-tree node"""
    node: int
    kind: NodeKind
    case: str
    type: CoverType
    n: int
    paths: int
    rho: int
    created: int = 0
    merges: int = 0

    def within_budget(self) -> bool:
        return 2 * self.paths <= self.type.budget(self.n) + 2 * self.rho


@dataclass
class TypedCover:
    """A path cover of the whole tree with its type, designated paths and braces"""
    cover: PathCover
    type: CoverType
    st_path: int
    second_path: Optional[int]
    braces: List[Brace]
    rho: int
    n: int
    path_ids: Tuple[int, ...]
    _by_id: Dict[int, Tuple[int, ...]] = field(default_factory=dict, repr=False)

    def path(self, path_id: int) -> Tuple[int, ...]:
        if not self._by_id:
            self._by_id = dict(zip(self.path_ids, self.cover.paths))
        return self._by_id[path_id]


class _Partial(NamedTuple):
    type: CoverType
    st: int
    second: Optional[int]
    rho: int
    count: int
    n: int
    z: Optional[int]


class _CoverBuilder:
    """Path store with merge-at-endpoint; merged ids stay resolvable"""

    def __init__(self):
        self.paths: Dict[int, Deque[int]] = {}
        self.alias: Dict[int, int] = {}
        self.next_id = 0

    def new_path(self, u: int, v: int) -> int:
        pid = self.next_id
        self.next_id += 1
        self.paths[pid] = deque((u, v))
        return pid

    def resolve(self, pid: int) -> int:
        root = pid
        while root in self.alias:
            root = self.alias[root]
        while pid != root:
            self.alias[pid], pid = root, self.alias[pid]
        return root

    def merge(self, a: int, b: int, at: int) -> int:
        """Concatenate two paths that both end in `at`; the longer one keeps its id"""
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            raise CoverConsistencyError(f"path {a} would be merged with itself at {at}")
        big, small = (a, b) if len(self.paths[a]) >= len(self.paths[b]) else (b, a)
        target, other = self.paths[big], self.paths[small]
        if other[0] == at:
            outward = islice(other, 1, None)
        elif other[-1] == at:
            outward = islice(reversed(other), 1, None)
        else:
            raise CoverConsistencyError(f"path {small} does not end in {at}")
        if target[-1] == at:
            target.extend(outward)
        elif target[0] == at:
            target.extendleft(outward)
        else:
            raise CoverConsistencyError(f"path {big} does not end in {at}")
        del self.paths[small]
        self.alias[small] = big
        return big

    def ends(self, pid: int) -> Tuple[int, int]:
        path = self.paths[self.resolve(pid)]
        return path[0], path[-1]


def _interior(path) -> set:
    return set(islice(path, 1, len(path) - 1))


def _check_structure(builder: _CoverBuilder, node: int, part: _Partial, s: int, t: int) -> None:
    if 2 * part.count > part.type.budget(part.n) + 2 * part.rho:
        raise CoverConsistencyError(
            f"node {node}: {part.count} paths exceed the {part.type.value} budget for n={part.n}, rho={part.rho}")
    if set(builder.ends(part.st)) != {s, t}:
        raise CoverConsistencyError(f"node {node}: designated path is not an {s}-{t} path")
    if part.type is CoverType.O:
        if set(builder.ends(part.second)) != {s, t}:
            raise CoverConsistencyError(f"node {node}: second O path is not an {s}-{t} path")
        first = builder.paths[builder.resolve(part.st)]
        second = builder.paths[builder.resolve(part.second)]
        if _interior(first) & _interior(second):
            raise CoverConsistencyError(f"node {node}: O paths share an interior vertex")
    elif part.type in (CoverType.L, CoverType.GAMMA):
        start, avoid = (s, t) if part.type is CoverType.L else (t, s)
        path = builder.paths[builder.resolve(part.second)]
        if start not in (path[0], path[-1]) or avoid in path:
            raise CoverConsistencyError(f"node {node}: {part.type.value} path must start in {start} and avoid {avoid}")


def _check_brace(builder: _CoverBuilder, brace: Brace) -> None:
    p1, p2, p3 = (builder.paths[builder.resolve(p)] for p in (brace.p1, brace.p2, brace.p3))
    i1, i2, i3 = _interior(p1), _interior(p2), _interior(p3)
    if i1 & i2 or i1 & i3 or i2 & i3:
        raise CoverConsistencyError(f"brace {brace.creation_index} paths are not interior-disjoint")
    if brace.split_vertex not in i1 and brace.split_vertex not in i2:
        raise CoverConsistencyError(f"split vertex {brace.split_vertex} is not interior to p1 or p2")


def typed_cover(tree: SpqTree, check_invariants: Optional[bool] = None,
                trace: Optional[List[CoverTrace]] = None) -> TypedCover:
    """
    Build a typed path cover bottom-up over a normalized SPQ-tree.

    The root kind fixes the class of the result: Q gives I_P, P a type in
    {I_P, O}, S a type in {I_S, L, Γ}. Paths are only created (at Q-nodes) or
    merged, never split. With check_invariants the budget, the designated
    path structure and every new brace are checked at each node.
    """
    if check_invariants is None:
        check_invariants = settings.CHECK_INVARIANTS

    builder = _CoverBuilder()
    braces: List[Brace] = []
    preorder_index = {x: i for i, x in enumerate(tree.preorder())}
    done: Dict[int, _Partial] = {}

    for x in tree.postorder():
        node = tree.nodes[x]
        s, t = node.source, node.sink
        merges = 0
        if node.kind is not NodeKind.Q and (tree.nodes[node.left].kind is NodeKind.S) != (node.kind is NodeKind.P):
            raise ValueError(f"typed_cover needs a normalized SPQ-tree (node {x})")

        if node.kind is NodeKind.Q:
            part = _Partial(CoverType.I_P, builder.new_path(s, t), None, 0, 1, 2, None)
            case = "Q"

        elif node.kind is NodeKind.S:
            g1, g2 = done.pop(node.left), done.pop(node.right)
            m = tree.nodes[node.left].sink
            n = g1.n + g2.n - 1
            rho = g1.rho + g2.rho
            if g1.type is CoverType.I_P and g2.type is not CoverType.O:
                case = "s-IX"
                st = builder.merge(g1.st, g2.st, m)
                part = _Partial(CoverType.I_S, st, None, rho, g1.count + g2.count - 1, n, m)
                merges = 1
            elif g1.type is CoverType.I_P:
                case = "s-IO"
                st = builder.merge(g1.st, g2.st, m)
                part = _Partial(CoverType.GAMMA, st, g2.second, rho, g1.count + g2.count - 1, n, m)
                merges = 1
            elif g1.type is CoverType.O and g2.type is not CoverType.O:
                case = "s-OX"
                st = builder.merge(g1.st, g2.st, m)
                part = _Partial(CoverType.L, st, g1.second, rho, g1.count + g2.count - 1, n, m)
                merges = 1
            elif g1.type is CoverType.O:
                case = "s-OO"
                st = builder.merge(g1.st, g2.st, m)
                builder.merge(g1.second, g2.second, m)
                part = _Partial(CoverType.I_S, st, None, rho, g1.count + g2.count - 2, n, m)
                merges = 2
            else:
                raise CoverConsistencyError(f"S-node {x}: left child has type {g1.type.value}, expected I_P or O")

        else:
            g1, g2 = done.pop(node.left), done.pop(node.right)
            n = g1.n + g2.n - 2
            rho = g1.rho + g2.rho
            count = g1.count + g2.count
            sided = (CoverType.L, CoverType.GAMMA)
            if g1.type.cover_class != "Σ":
                raise CoverConsistencyError(f"P-node {x}: left child has type {g1.type.value}, expected I_S, L or Γ")
            if g1.type is CoverType.I_S and g2.type in (CoverType.I_S, CoverType.I_P):
                case = "p-II"
                part = _Partial(CoverType.O, g1.st, g2.st, rho, count, n, g1.z)
            elif g1.type is CoverType.I_S and g2.type is CoverType.O:
                case = "p-IO"
                if g2.z is None:
                    raise CoverConsistencyError(f"P-node {x}: O-type child has no potential split vertex")
                p3 = builder.paths[builder.resolve(g1.st)]
                p3_next = p3[1] if p3[0] == s else p3[-2]
                o1, o2 = builder.resolve(g2.st), builder.resolve(g2.second)
                brace = Brace(u=s, v=t, p1=o1, p2=o2, p3=builder.resolve(g1.st), split_vertex=g2.z,
                              creation_index=len(braces), node=x, node_order=preorder_index[x],
                              p3_edge=(s, p3_next), p1_length=len(builder.paths[o1]),
                              p2_length=len(builder.paths[o2]))
                braces.append(brace)
                if check_invariants:
                    _check_brace(builder, brace)
                part = _Partial(CoverType.I_P, g1.st, None, rho + 1, count, n, g1.z)
            elif g2.type in sided:
                case = "p-IL"
                at = s if g2.type is CoverType.L else t
                builder.merge(g1.st, g2.second, at)
                part = _Partial(CoverType.I_P, g2.st, None, rho, count - 1, n, g1.z)
                merges = 1
            elif g2.type in (CoverType.I_S, CoverType.I_P):
                case = "p-LI"
                at = s if g1.type is CoverType.L else t
                builder.merge(g1.second, g2.st, at)
                part = _Partial(CoverType.I_P, g1.st, None, rho, count - 1, n, g1.z)
                merges = 1
            else:
                case = "p-LO"
                at = s if g1.type is CoverType.L else t
                builder.merge(g1.second, g2.st, at)
                part = _Partial(CoverType.O, g2.second, g1.st, rho, count - 1, n, g1.z)
                merges = 1

        if check_invariants:
            _check_structure(builder, x, part, s, t)
        if trace is not None:
            trace.append(CoverTrace(node=x, kind=node.kind, case=case, type=part.type, n=part.n,
                                    paths=part.count, rho=part.rho,
                                    created=1 if node.kind is NodeKind.Q else 0, merges=merges))
        done[x] = part

    root = done[tree.root]
    if root.count != len(builder.paths):
        raise CoverConsistencyError(f"tracked {root.count} paths but {len(builder.paths)} are alive")

    for brace in braces:
        brace.p3 = builder.resolve(brace.p3)

    path_ids = tuple(sorted(builder.paths))
    cover = PathCover.model_construct(paths=tuple(tuple(builder.paths[pid]) for pid in path_ids))
    second = None if root.second is None else builder.resolve(root.second)
    logger.debug(f"Typed cover {root.type.value}: {root.count} paths, {len(braces)} braces, n={root.n}")
    return TypedCover(cover=cover, type=root.type, st_path=builder.resolve(root.st), second_path=second,
                      braces=braces, rho=root.rho, n=root.n, path_ids=path_ids)


class _BraceEnds(NamedTuple):
    """Edges that locate a brace's pieces in the linked cover"""
    u: int
    v: int
    split: int
    x_u: int
    x_v: int
    y_u: int
    y_v: int
    split_to_u: int
    p3_next: int


def _brace_ends(tc: TypedCover, brace: Brace) -> _BraceEnds:
    u, v = brace.u, brace.v
    oriented = []
    for pid, length in ((brace.p1, brace.p1_length), (brace.p2, brace.p2_length)):
        path = tc.path(pid)
        if len(path) != length or {path[0], path[-1]} != {u, v}:
            raise CoverConsistencyError(f"brace {brace.creation_index}: path {pid} was modified after creation")
        oriented.append(path if path[0] == u else path[::-1])

    x, y = oriented
    if brace.split_vertex not in x[1:-1]:
        x, y = y, x
        if brace.split_vertex not in x[1:-1]:
            raise CoverConsistencyError(f"brace {brace.creation_index}: split vertex lies on neither path")
    i = x.index(brace.split_vertex)
    return _BraceEnds(u=u, v=v, split=brace.split_vertex, x_u=x[1], x_v=x[-2], y_u=y[1], y_v=y[-2],
                      split_to_u=x[i - 1], p3_next=brace.p3_edge[1])


def _remove_single(links: PathLinks, b: _BraceEnds) -> None:
    """
    Split the path through p3 at u into P (away from v) and P' (towards v),
    then P' + split path up to the split vertex, and P + unsplit path + the
    rest of the split path.
    """
    before = links.occurrence(b.u, b.p3_next)
    p_rest = None if links.is_end(before) else before
    p_prime = links.cut(b.u, b.p3_next)
    links.cut(b.split, b.split_to_u)
    links.join(p_prime, links.occurrence(b.u, b.x_u))
    if p_rest is not None:
        links.join(p_rest, links.occurrence(b.u, b.y_u))
    links.join(links.occurrence(b.v, b.y_v), links.occurrence(b.v, b.x_v))


def _remove_pair(links: PathLinks, b: _BraceEnds, c: _BraceEnds) -> None:
    """
    Two parallel braces: split both split paths, then
    split(b) to v + unsplit(c) to u + split(c), and
    split(b) to u + unsplit(b) to v + split(c).
    """
    links.cut(b.split, b.split_to_u)
    links.cut(c.split, c.split_to_u)
    links.join(links.occurrence(b.v, b.x_v), links.occurrence(c.v, c.y_v))
    links.join(links.occurrence(c.u, c.y_u), links.occurrence(c.u, c.x_u))
    links.join(links.occurrence(b.u, b.x_u), links.occurrence(b.u, b.y_u))
    links.join(links.occurrence(b.v, b.y_v), links.occurrence(c.v, c.x_v))


def brace_classes(braces: List[Brace]) -> List[List[Brace]]:
    """
    Parallel classes (same u, v), outermost first: a class is placed by the
    pre-order position of its first creating node. Within a class, creation order.
    """
    classes: Dict[Tuple[int, int], List[Brace]] = defaultdict(list)
    for brace in braces:
        classes[(brace.u, brace.v)].append(brace)
    ordered = sorted(classes.values(), key=lambda group: min(b.node_order for b in group))
    return [sorted(group, key=lambda b: b.creation_index) for group in ordered]


def remove_braces(tc: TypedCover) -> PathCover:
    """Rewire the cover around every brace, saving one path per brace"""
    if tc.rho == 0:
        return tc.cover

    classes = brace_classes(tc.braces)
    ends = {brace.creation_index: _brace_ends(tc, brace) for brace in tc.braces}
    # only paths holding a brace piece are rewired
    touched = sorted({pid for brace in tc.braces for pid in (brace.p1, brace.p2, brace.p3)})
    links = PathLinks.from_paths((tc.path(pid) for pid in touched), tags=touched)

    for group in classes:
        i = 0
        while len(group) - i >= 2:
            _remove_pair(links, ends[group[i].creation_index], ends[group[i + 1].creation_index])
            i += 2
        if i < len(group):
            _remove_single(links, ends[group[i].creation_index])

    kept = set(touched)
    paths = [p for pid, p in zip(tc.path_ids, tc.cover.paths) if pid not in kept] + links.paths()
    if len(paths) != tc.cover.size - tc.rho:
        raise CoverConsistencyError(f"brace removal left {len(paths)} paths, expected {tc.cover.size - tc.rho}")
    logger.debug(f"Removed {tc.rho} braces in {len(classes)} classes: {tc.cover.size} -> {len(paths)} paths")
    return PathCover.model_construct(paths=tuple(paths), host=tc.cover.host)


def sp_path_cover(g: Graph, check_invariants: Optional[bool] = None) -> PathCover:
    """Path cover of a connected two-terminal series-parallel graph with at most ceil(n/2) paths"""
    tree = normalize(recognize_and_build(g))
    tc = typed_cover(tree, check_invariants=check_invariants)
    pc = remove_braces(tc).model_copy(update={"host": g})

    report = verify_cover(g, pc)
    if not report.valid:
        logger.error(f"Series-parallel cover failed verification: {report.violation}")
        raise CoverConsistencyError(report.violation)
    if pc.size > ceil_half(g.n):
        raise CoverConsistencyError(f"cover has {pc.size} paths, above ceil(n/2) = {ceil_half(g.n)}")

    logger.info(f"Covered series-parallel graph n={g.n}, m={g.m} with {pc.size} paths "
                f"({tc.cover.size} before removing {tc.rho} braces)")
    return pc
