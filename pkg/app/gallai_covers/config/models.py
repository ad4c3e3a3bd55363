# app/gallai_covers/config/models.py
from collections import deque
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationInfo, field_validator, model_validator

Edge = Tuple[int, int]
Path = Tuple[int, ...]
Face = Tuple[int, int, int]


class Graph(BaseModel):
    """Simple undirected graph on vertex ids 0..n-1 with optional terminals (s, t)"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    edges: Tuple[Edge, ...] = ()
    terminals: Optional[Tuple[int, int]] = None

    _adjacency: List[List[int]] = PrivateAttr(default_factory=list)
    _edge_set: frozenset = PrivateAttr(default_factory=frozenset)

    @field_validator("edges")
    @classmethod
    def canonical_edges(cls, edges: Tuple[Edge, ...], info: ValidationInfo) -> Tuple[Edge, ...]:
        canonical = sorted((u, v) if u < v else (v, u) for u, v in edges)
        n = info.data.get("n")
        if canonical and n is not None:
            largest = max(v for _, v in canonical)
            if largest >= n:
                raise ValueError(f"vertex id {largest} out of range for n={n}")
        for i, (u, v) in enumerate(canonical):
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u < 0:
                raise ValueError(f"negative vertex id {u}")
            if i and canonical[i - 1] == (u, v):
                raise ValueError(f"duplicate edge {u}-{v}")
        return tuple(canonical)

    @model_validator(mode="after")
    def check_terminals(self) -> "Graph":
        if self.terminals is not None:
            s, t = self.terminals
            if s == t:
                raise ValueError("terminals must be distinct")
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise ValueError("terminal id out of range")
        return self

    def model_post_init(self, __context) -> None:
        adjacency: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        self._adjacency = adjacency
        self._edge_set = frozenset(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> List[List[int]]:
        return self._adjacency

    @property
    def edge_set(self) -> frozenset:
        return self._edge_set

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def is_connected(self) -> bool:
        """True when every vertex 0..n-1 is reachable from vertex 0"""
        if self.n <= 1:
            return True
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        reached = 1
        while queue:
            v = queue.popleft()
            for w in self._adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    reached += 1
                    queue.append(w)
        return reached == self.n

    def to_document(self) -> Dict:
        document = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.terminals is not None:
            document["terminals"] = list(self.terminals)
        return document


class PathCover(BaseModel):
    """Collection of simple paths (vertex sequences) meant to partition the host's edges"""
    model_config = ConfigDict(frozen=True)

    paths: Tuple[Path, ...] = ()
    host: Optional[Graph] = Field(default=None, exclude=True, repr=False)

    @property
    def size(self) -> int:
        return len(self.paths)

    def to_document(self) -> Dict:
        return {"paths": [list(p) for p in self.paths]}


class VerificationReport(BaseModel):
    """Outcome of verify_cover"""
    valid: bool
    size: int
    violation: Optional[str] = None


class DegreeProfile(BaseModel):
    """Odd/even degree counts"""
    n_odd: int
    n_even: int


class StackingSequence(BaseModel):
    """Initial triangle {0,1,2} plus stacking operations (vertex, face)"""
    model_config = ConfigDict(frozen=True)

    ops: Tuple[Tuple[int, Face], ...] = ()

    @field_validator("ops")
    @classmethod
    def check_ops(cls, ops: Tuple[Tuple[int, Face], ...]) -> Tuple[Tuple[int, Face], ...]:
        for i, (v, face) in enumerate(ops):
            if v != 3 + i:
                raise ValueError(f"operation {i} must stack vertex {3 + i}, got {v}")
            if len(set(face)) != 3:
                raise ValueError(f"operation {i} names a degenerate face {face}")
            if any(x < 0 or x >= v for x in face):
                raise ValueError(f"operation {i} names a vertex that does not exist yet")
        return ops

    @property
    def n(self) -> int:
        return 3 + len(self.ops)

    def to_document(self) -> Dict:
        return {"ops": [[v, list(face)] for v, face in self.ops]}


class GroupStats(BaseModel):
    """Group counters of a partition and the resulting constructive bound"""
    alpha: int
    beta: int
    gamma: int
    bound: int


class BoundReport(BaseModel):
    """Size bounds for a planar 3-tree"""
    n: int
    alpha: int
    beta: int
    gamma: int
    constructive_bound: int
    regime_holds: bool = Field(description="beta <= n/4 - 1")
    five_eighths: int
    half_ceiling: int
    third_ceiling: int
    n_odd: int
    n_even: int
    dk_bound: int
    leaf_count: int
    leaf_witness: Optional[bool] = None
    dk_hypothesis: Optional[bool] = None


class OracleResult(BaseModel):
    """Exact minimum path cover of a small graph"""
    min_size: int
    witness: PathCover
    nodes_explored: int


class GenSpec(BaseModel):
    """Instance descriptor: family, size parameter and seed"""
    model_config = ConfigDict(frozen=True)

    family: str
    size: int = Field(ge=2)
    seed: int = 0

    def label(self) -> str:
        return f"{self.family}:n={self.size}:seed={self.seed}"


CSV_COLUMNS = ["family", "n", "m", "algorithm", "size", "bound", "lower_bound", "oracle", "ms"]


class RunRecord(BaseModel):
    """One pipeline run; CSV columns are fixed by CSV_COLUMNS"""
    family: str
    n: int
    m: int
    algorithm: str
    size: int
    bound: int
    lower_bound: int
    oracle: Optional[int] = None
    ms: float = 0.0

    def as_row(self) -> List[str]:
        oracle = "" if self.oracle is None else str(self.oracle)
        return [self.family, str(self.n), str(self.m), self.algorithm, str(self.size),
                str(self.bound), str(self.lower_bound), oracle, f"{self.ms:.3f}"]

    def violations(self) -> List[str]:
        problems = []
        if self.size > self.bound:
            problems.append(f"size {self.size} exceeds bound {self.bound}")
        if self.size < self.lower_bound:
            problems.append(f"size {self.size} below lower bound {self.lower_bound}")
        if self.oracle is not None and self.size < self.oracle:
            problems.append(f"size {self.size} below oracle minimum {self.oracle}")
        return problems
