# ============================================================================
# app/gallai_covers/services/path_links.py
# ============================================================================
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..config.models import Path
from ..utils.validators import CoverConsistencyError


class PathLinks:
    """
    A path cover stored as linked vertex occurrences.

    Every occurrence has at most two neighbouring occurrences; an occurrence
    with one neighbour is a path endpoint. The occurrence of w used by the
    cover edge w-y is found with occurrence(w, y), so rewiring can be
    addressed by edges even after earlier cuts and joins moved paths around.
    All operations are O(1) except materialising the paths.
    """

    def __init__(self):
        self._vertex: List[int] = []
        self._nbrs: List[List[int]] = []
        self._tag: List[int] = []
        self._at: Dict[Tuple[int, int], int] = {}
        self._occurrences: Dict[int, List[int]] = defaultdict(list)
        self._count = 0

    @classmethod
    def from_paths(cls, paths: Iterable[Sequence[int]], tags: Optional[Iterable[int]] = None) -> "PathLinks":
        links = cls()
        paths = list(paths)
        tags = range(len(paths)) if tags is None else tags
        for path, tag in zip(paths, tags):
            links.add_path(path, tag)
        return links

    def __len__(self) -> int:
        return self._count

    def _new(self, w: int, tag: int) -> int:
        self._vertex.append(w)
        self._nbrs.append([])
        self._tag.append(tag)
        occ = len(self._vertex) - 1
        self._occurrences[w].append(occ)
        return occ

    def _link(self, a: int, b: int) -> None:
        self._nbrs[a].append(b)
        self._nbrs[b].append(a)
        self._at[(self._vertex[a], self._vertex[b])] = a
        self._at[(self._vertex[b], self._vertex[a])] = b

    def _unlink(self, a: int, b: int) -> None:
        self._nbrs[a].remove(b)
        self._nbrs[b].remove(a)

    def add_path(self, vertices: Sequence[int], tag: int) -> None:
        if len(vertices) < 2:
            raise CoverConsistencyError("a path needs at least two vertices")
        prev = self._new(vertices[0], tag)
        for w in vertices[1:]:
            occ = self._new(w, tag)
            self._link(prev, occ)
            prev = occ
        self._count += 1

    def occurrence(self, w: int, y: int) -> int:
        """Occurrence of w that carries the cover edge w-y"""
        try:
            return self._at[(w, y)]
        except KeyError:
            raise CoverConsistencyError(f"edge {w}-{y} is not in the cover") from None

    def vertex(self, occ: int) -> int:
        return self._vertex[occ]

    def tag(self, occ: int) -> int:
        return self._tag[occ]

    def next_vertex(self, end: int) -> int:
        """Vertex next to a path endpoint occurrence"""
        (other,) = self._nbrs[end]
        return self._vertex[other]

    def is_end(self, occ: int) -> bool:
        return len(self._nbrs[occ]) == 1

    def ends_at(self, w: int) -> List[int]:
        """Endpoint occurrences of w"""
        return [occ for occ in self._occurrences[w] if len(self._nbrs[occ]) == 1]

    def cut(self, w: int, toward: int) -> int:
        """
        Detach the cover edge w-toward at w. Returns the occurrence of w that
        now ends the piece holding that edge (unchanged if w already ended it).
        """
        occ = self.occurrence(w, toward)
        if len(self._nbrs[occ]) == 1:
            return occ
        other = next(x for x in self._nbrs[occ] if self._vertex[x] == toward)
        self._unlink(occ, other)
        fresh = self._new(w, self._tag[occ])
        self._link(fresh, other)
        self._count += 1
        return fresh

    def join(self, a: int, b: int) -> int:
        """Glue two path endpoints that are occurrences of the same vertex"""
        if a == b or self._vertex[a] != self._vertex[b]:
            raise CoverConsistencyError(f"cannot join occurrences of {self._vertex[a]} and {self._vertex[b]}")
        if len(self._nbrs[a]) != 1 or len(self._nbrs[b]) != 1:
            raise CoverConsistencyError(f"vertex {self._vertex[a]} is not an endpoint on both sides of a join")
        (other,) = self._nbrs[b]
        self._unlink(b, other)
        self._link(a, other)
        self._occurrences[self._vertex[b]].remove(b)
        self._count -= 1
        return a

    def subdivide(self, x: int, y: int, inner: Sequence[int]) -> None:
        """Replace the cover edge x-y by the walk x, *inner, y"""
        ox, oy = self.occurrence(x, y), self.occurrence(y, x)
        tag = self._tag[ox]
        self._unlink(ox, oy)
        del self._at[(x, y)], self._at[(y, x)]
        prev = ox
        for w in inner:
            occ = self._new(w, tag)
            self._link(prev, occ)
            prev = occ
        self._link(prev, oy)

    def extend(self, end: int, vertices: Sequence[int]) -> int:
        """Continue a path beyond its endpoint occurrence; returns the new endpoint"""
        if len(self._nbrs[end]) != 1:
            raise CoverConsistencyError(f"vertex {self._vertex[end]} does not end a path here")
        prev = end
        for w in vertices:
            occ = self._new(w, self._tag[end])
            self._link(prev, occ)
            prev = occ
        return prev

    def paths(self) -> List[Path]:
        """Materialise all paths, ordered by tag and then by first endpoint"""
        vertex, nbrs = self._vertex, self._nbrs
        seen = set()
        found: List[Tuple[int, int, Path]] = []
        for start in range(len(vertex)):
            if len(nbrs[start]) != 1 or start in seen:
                continue
            walk = [vertex[start]]
            prev, cur = start, nbrs[start][0]
            while True:
                walk.append(vertex[cur])
                ahead = nbrs[cur]
                if len(ahead) == 1:
                    break
                prev, cur = cur, ahead[1] if ahead[0] == prev else ahead[0]
            seen.add(cur)
            found.append((self._tag[start], start, tuple(walk)))
        live = sum(1 for x in nbrs if x)
        if sum(len(walk) for _, _, walk in found) != live:
            raise CoverConsistencyError("a rewiring closed a cycle")
        if len(found) != self._count:
            raise CoverConsistencyError(f"expected {self._count} paths, found {len(found)}")
        found.sort(key=lambda item: (item[0], item[1]))
        return [walk for _, _, walk in found]
