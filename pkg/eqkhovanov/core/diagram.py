"""Link diagrams from planar diagram (PD) codes.

A crossing is a 4-tuple of arc labels listed counterclockwise, starting at
the incoming under-strand. Endpoints are addressed as (crossing index,
position). Arc orientation is stored explicitly as the endpoint each arc
leaves from.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from eqkhovanov.domain.models import InputError, ScopeError

logger = logging.getLogger(__name__)

Endpoint = Tuple[int, int]
Vertex = Tuple[int, ...]


class PDParseError(InputError):
    """PD text could not be parsed"""
    pass


class DiagramError(InputError):
    """PD data does not describe a valid oriented planar diagram"""
    pass


class BasepointError(ScopeError):
    """Basepoint missing or not an arc of the diagram"""
    pass


class _UnionFind:
    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class LinkDiagram:
    """An oriented link diagram: PD crossings, arc orientation and free loops."""

    def __init__(
        self,
        crossings: Sequence[Sequence[int]],
        tails: Dict[int, Endpoint],
        free_loops: int = 0,
        basepoint: Optional[int] = None,
        name: str = "",
    ):
        self.crossings: Tuple[Tuple[int, int, int, int], ...] = tuple(
            tuple(int(a) for a in x) for x in crossings
        )
        self.tails: Dict[int, Endpoint] = dict(tails)
        self.free_loops = int(free_loops)
        self.name = name
        if self.free_loops < 0:
            raise DiagramError("free_loops must be non-negative")
        self._endpoints = self._collect_endpoints()
        self._validate_orientation()
        self.basepoint = None
        if basepoint is not None:
            self.basepoint = self._check_basepoint(basepoint)

    # ------------------------------------------------------------------
    # Construction checks
    # ------------------------------------------------------------------

    def _collect_endpoints(self) -> Dict[int, List[Endpoint]]:
        endpoints: Dict[int, List[Endpoint]] = {}
        for c, x in enumerate(self.crossings):
            if len(x) != 4:
                raise DiagramError(f"Crossing {c} has {len(x)} entries, expected 4")
            for p, a in enumerate(x):
                if a <= 0:
                    raise DiagramError(f"Arc labels must be positive integers, got {a}")
                endpoints.setdefault(a, []).append((c, p))
        for a, ends in endpoints.items():
            if len(ends) != 2:
                raise DiagramError(f"Arc {a} occurs {len(ends)} times, expected exactly 2")
        return endpoints

    def _validate_orientation(self):
        if set(self.tails) != set(self._endpoints):
            raise DiagramError("Orientation must be given for every arc")
        for a, tail in self.tails.items():
            if tail not in self._endpoints[a]:
                raise DiagramError(f"Tail {tail} of arc {a} is not one of its endpoints")
        for c in range(len(self.crossings)):
            if self.is_tail((c, 0)) or not self.is_tail((c, 2)):
                raise DiagramError(f"Under-strand of crossing {c} is not oriented from position 0 to 2")
            if self.is_tail((c, 1)) == self.is_tail((c, 3)):
                raise DiagramError(f"Over-strand of crossing {c} is inconsistently oriented")

    def _check_basepoint(self, arc: int) -> int:
        if arc not in self.all_arcs:
            raise BasepointError(f"Basepoint {arc} is not an arc of the diagram")
        return arc

    def with_basepoint(self, arc: Optional[int]) -> "LinkDiagram":
        return LinkDiagram(self.crossings, self.tails, self.free_loops, arc, self.name)

    def renamed(self, name: str) -> "LinkDiagram":
        return LinkDiagram(self.crossings, self.tails, self.free_loops, self.basepoint, name)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"LinkDiagram{label}({self.to_pd()}, free_loops={self.free_loops})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinkDiagram)
            and self.crossings == other.crossings
            and self.tails == other.tails
            and self.free_loops == other.free_loops
        )

    def __hash__(self) -> int:
        return hash((self.crossings, self.free_loops))

    # ------------------------------------------------------------------
    # Basic data
    # ------------------------------------------------------------------

    def label_at(self, e: Endpoint) -> int:
        return self.crossings[e[0]][e[1]]

    def endpoints(self, arc: int) -> List[Endpoint]:
        return list(self._endpoints[arc])

    def other_end(self, arc: int, e: Endpoint) -> Endpoint:
        a, b = self._endpoints[arc]
        return b if a == e else a

    def is_tail(self, e: Endpoint) -> bool:
        return self.tails[self.label_at(e)] == e

    def head(self, arc: int) -> Endpoint:
        return self.other_end(arc, self.tails[arc])

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def max_label(self) -> int:
        return max(self._endpoints, default=0)

    @property
    def pd_arcs(self) -> List[int]:
        return sorted(self._endpoints)

    @property
    def free_loop_labels(self) -> List[int]:
        top = self.max_label
        return [top + k + 1 for k in range(self.free_loops)]

    @property
    def all_arcs(self) -> List[int]:
        return self.pd_arcs + self.free_loop_labels

    @property
    def is_empty(self) -> bool:
        return not self.crossings and not self.free_loops

    @cached_property
    def signs(self) -> Tuple[int, ...]:
        """+1 where the over-strand enters at position 3, else -1."""
        return tuple(1 if not self.is_tail((c, 3)) else -1 for c in range(self.n))

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return self.n - self.n_plus

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def oriented_vertex(self) -> Vertex:
        """Cube vertex of the oriented (Seifert) resolution."""
        return tuple(0 if s > 0 else 1 for s in self.signs)

    @cached_property
    def components(self) -> List[List[int]]:
        """Link components as arc sequences in orientation order."""
        seen = set()
        out: List[List[int]] = []
        for start in self.pd_arcs:
            if start in seen:
                continue
            walk = []
            a = start
            while a not in seen:
                seen.add(a)
                walk.append(a)
                c, p = self.head(a)
                a = self.label_at((c, (p + 2) % 4))
            out.append(walk)
        out.extend([[label] for label in self.free_loop_labels])
        return out

    @property
    def num_components(self) -> int:
        return len(self.components)

    @cached_property
    def projection_components(self) -> List[Tuple[List[int], List[int]]]:
        """Connected components of the projection as (crossings, arcs)."""
        uf = _UnionFind(range(self.n))
        for a, ((c1, _), (c2, _)) in self._endpoints.items():
            uf.union(c1, c2)
        groups: Dict[int, List[int]] = {}
        for c in range(self.n):
            groups.setdefault(uf.find(c), []).append(c)
        out = []
        for cs in sorted(groups.values()):
            arcs = sorted({a for c in cs for a in self.crossings[c]})
            out.append((cs, arcs))
        return out

    def to_pd(self) -> str:
        body = ",".join(f"X[{a},{b},{c},{d}]" for a, b, c, d in self.crossings)
        return f"PD[{body}]"

    # ------------------------------------------------------------------
    # Faces of the planar embedding
    # ------------------------------------------------------------------

    @cached_property
    def faces(self) -> Tuple[Dict[Endpoint, int], List[List[Endpoint]]]:
        """Face of every half-edge, and the half-edges of every face.

        The half-edge leaving (c, p) runs along its arc to (c', p') and is
        followed by the half-edge leaving (c', p' - 1). Each face lies on the
        left of its half-edges.

        Raises:
            DiagramError: if a connected component is not planar
        """
        face_of: Dict[Endpoint, int] = {}
        faces: List[List[Endpoint]] = []
        for c in range(self.n):
            for p in range(4):
                start = (c, p)
                if start in face_of:
                    continue
                idx = len(faces)
                boundary = []
                h = start
                while h not in face_of:
                    face_of[h] = idx
                    boundary.append(h)
                    c2, p2 = self.other_end(self.label_at(h), h)
                    h = (c2, (p2 - 1) % 4)
                faces.append(boundary)
        for cs, arcs in self.projection_components:
            fs = {face_of[(c, p)] for c in cs for p in range(4)}
            euler = len(cs) - len(arcs) + len(fs)
            if euler != 2:
                raise DiagramError(f"Component with crossings {cs} has Euler characteristic {euler}, not 2")
        return face_of, faces

    def face_arcs(self, face: int) -> Tuple[int, ...]:
        return tuple(sorted(self.label_at(h) for h in self.faces[1][face]))

    def corner_face(self, c: int, k: int) -> int:
        """Face in the corner between positions k and k + 1 of crossing c."""
        return self.faces[0][(c, k % 4)]

    def outer_face(self, component: int) -> int:
        """Outer face of a projection component.

        Of the two faces along the component's smallest arc, the one with more
        boundary edges; ties go to the smaller sorted tuple of boundary arcs.
        """
        face_of, faces = self.faces
        _, arcs = self.projection_components[component]
        a = arcs[0]
        candidates = sorted({face_of[e] for e in self._endpoints[a]})
        return min(candidates, key=lambda f: (-len(faces[f]), self.face_arcs(f), f))


# ----------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------

_CROSSING = re.compile(r"X\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]")
_PD = re.compile(r"PD\[\s*(.*?)\s*\]\s*", re.S)


def _parse_crossings(text: str) -> List[Tuple[int, int, int, int]]:
    stripped = text.strip()
    if not stripped:
        raise PDParseError("Empty PD input")
    if stripped.lower() == "unknot":
        return []
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise PDParseError(f"Invalid JSON PD array: {exc}") from None
        if not isinstance(data, list) or not all(
            isinstance(x, list) and len(x) == 4 and all(isinstance(a, int) for a in x) for x in data
        ):
            raise PDParseError("JSON PD must be a list of 4-element integer lists")
        return [tuple(x) for x in data]
    match = _PD.fullmatch(stripped)
    if not match:
        raise PDParseError(f"Expected PD[X[a,b,c,d],...], got {stripped[:60]!r}")
    body = match.group(1)
    crossings = []
    pos = 0
    while pos < len(body):
        m = _CROSSING.match(body, pos)
        if not m:
            raise PDParseError(f"Malformed crossing near {body[pos:pos + 20]!r}")
        crossings.append(tuple(int(g) for g in m.groups()))
        pos = m.end()
        rest = body[pos:].lstrip()
        if rest.startswith(","):
            rest = rest[1:].lstrip()
            if not rest:
                raise PDParseError("Trailing comma in PD code")
        pos = len(body) - len(rest)
    return crossings


def _infer_tails(crossings: Sequence[Tuple[int, int, int, int]]) -> Dict[int, Endpoint]:
    """Orient every component from its under-crossings.

    A component without under-crossings runs its lowest arc from its first
    occurrence to its second.
    """
    endpoints: Dict[int, List[Endpoint]] = {}
    for c, x in enumerate(crossings):
        for p, a in enumerate(x):
            endpoints.setdefault(a, []).append((c, p))
    for a, ends in endpoints.items():
        if len(ends) != 2:
            raise DiagramError(f"Arc {a} occurs {len(ends)} times, expected exactly 2")

    def other(a, e):
        x, y = endpoints[a]
        return y if x == e else x

    tails: Dict[int, Endpoint] = {}
    for start in sorted(endpoints):
        if start in tails:
            continue
        walk: List[Tuple[int, Endpoint]] = []
        a, tail = start, min(endpoints[start])
        while True:
            walk.append((a, tail))
            c, p = other(a, tail)
            tail = (c, (p + 2) % 4)
            a = crossings[c][tail[1]]
            if a == start and tail == walk[0][1]:
                break
            if len(walk) > len(endpoints):
                raise DiagramError(f"Strand through arc {start} does not close up")
        votes = set()
        for a, tail in walk:
            head = other(a, tail)
            if tail[1] == 2 or head[1] == 0:
                votes.add(True)
            if tail[1] == 0 or head[1] == 2:
                votes.add(False)
        if len(votes) > 1:
            raise DiagramError(f"Inconsistent orientation along the component of arc {start}")
        forward = votes.pop() if votes else True
        for a, tail in walk:
            tails[a] = tail if forward else other(a, tail)
    return tails


def parse_pd(text: str, name: str = "", basepoint: Optional[int] = None) -> LinkDiagram:
    """Parse ``PD[X[a,b,c,d],...]``, a JSON array of 4-tuples, or ``unknot``.

    ``PD[]`` and ``unknot`` give the crossingless unknot.

    Raises:
        PDParseError: if the text is empty or malformed
        DiagramError: if arcs are not used exactly twice or orientation is inconsistent
    """
    crossings = _parse_crossings(text)
    if not crossings:
        d = LinkDiagram([], {}, free_loops=1, basepoint=basepoint, name=name)
    else:
        d = LinkDiagram(crossings, _infer_tails(crossings), basepoint=basepoint, name=name)
    logger.debug(f"Parsed {name or 'diagram'}: n={d.n}, w={d.writhe}, components={d.num_components}")
    return d


def diagram_from_dict(data: dict) -> LinkDiagram:
    """Rebuild a diagram written by ``diagram_to_dict``."""
    tails = {int(a): tuple(e) for a, e in data.get("tails", {}).items()}
    crossings = [tuple(x) for x in data["crossings"]]
    if not tails and crossings:
        tails = _infer_tails(crossings)
    return LinkDiagram(crossings, tails, data.get("free_loops", 0), data.get("basepoint"), data.get("name", ""))


def diagram_to_dict(d: LinkDiagram) -> dict:
    return {
        "name": d.name,
        "crossings": [list(x) for x in d.crossings],
        "tails": {str(a): list(e) for a, e in sorted(d.tails.items())},
        "free_loops": d.free_loops,
        "basepoint": d.basepoint,
    }


# ----------------------------------------------------------------------
# Resolutions
# ----------------------------------------------------------------------

_SMOOTHING = {0: ((0, 1), (2, 3)), 1: ((0, 3), (1, 2))}


@dataclass(frozen=True)
class Resolution:
    """Circles of one cube vertex, ordered by their smallest arc label."""
    vertex: Vertex
    circles: Tuple[Tuple[int, ...], ...]
    arc_to_circle: Dict[int, int] = field(hash=False, compare=False)
    basepoint_circle: Optional[int] = None

    @property
    def num_circles(self) -> int:
        return len(self.circles)


def resolve(d: LinkDiagram, v: Sequence[int]) -> Resolution:
    """Smooth every crossing of ``d`` according to ``v`` and collect circles."""
    v = tuple(int(b) for b in v)
    if len(v) != d.n or any(b not in (0, 1) for b in v):
        raise ValueError(f"Vertex {v} does not match {d.n} crossings")
    uf = _UnionFind(d.pd_arcs)
    for c, bit in enumerate(v):
        x = d.crossings[c]
        for p, q in _SMOOTHING[bit]:
            uf.union(x[p], x[q])
    groups: Dict[int, List[int]] = {}
    for a in d.pd_arcs:
        groups.setdefault(uf.find(a), []).append(a)
    circles = sorted(tuple(sorted(g)) for g in groups.values())
    circles.extend((label,) for label in d.free_loop_labels)
    arc_to_circle = {a: i for i, circle in enumerate(circles) for a in circle}
    bp = arc_to_circle[d.basepoint] if d.basepoint is not None else None
    return Resolution(v, tuple(circles), arc_to_circle, bp)


@dataclass(frozen=True)
class SeifertData:
    """Seifert circles with nesting depth, winding and the Lee coloring."""
    circles: Tuple[Tuple[int, ...], ...]
    depths: Tuple[int, ...]
    counterclockwise: Tuple[bool, ...]
    writhe: int
    r: int
    # True where the circle is colored X, False for Y
    lee_x: Tuple[bool, ...]
    resolution: Resolution = field(compare=False)


def seifert_data(d: LinkDiagram) -> SeifertData:
    """Oriented resolution with nesting read off the planar embedding.

    Diagram faces are merged across each smoothed crossing into regions of
    the circle arrangement; the regions form a tree rooted at the outer
    face. A circle is colored X when depth plus [clockwise] is even.

    Raises:
        DiagramError: if the circle arrangement is not a tree of regions
    """
    if d.is_empty:
        raise DiagramError("seifert_data needs a nonempty diagram")
    res = resolve(d, d.oriented_vertex)
    face_of, faces = d.faces if d.n else ({}, [])
    uf = _UnionFind(range(len(faces)))
    for c, bit in enumerate(res.vertex):
        k = 1 if bit == 0 else 0
        uf.union(d.corner_face(c, k), d.corner_face(c, k + 2))

    depths = [0] * res.num_circles
    ccw = [True] * res.num_circles
    for comp, (cs, arcs) in enumerate(d.projection_components):
        circle_ids = sorted({res.arc_to_circle[a] for a in arcs})
        edges = {}
        for i in circle_ids:
            a = res.circles[i][0]
            left = uf.find(face_of[d.tails[a]])
            right = uf.find(face_of[d.head(a)])
            if left == right:
                raise DiagramError(f"Seifert circle {res.circles[i]} does not separate regions")
            edges[i] = (left, right)
        regions = {r for pair in edges.values() for r in pair}
        if len(regions) != len(circle_ids) + 1:
            raise DiagramError(f"Regions of component {comp} do not form a tree")
        root = uf.find(d.outer_face(comp))
        depth = {root: 0}
        frontier = [root]
        while frontier:
            nxt = []
            for region in frontier:
                for left, right in edges.values():
                    for here, there in ((left, right), (right, left)):
                        if here == region and there not in depth:
                            depth[there] = depth[region] + 1
                            nxt.append(there)
            frontier = nxt
        if len(depth) != len(regions):
            raise DiagramError(f"Regions of component {comp} are not connected")
        for i, (left, right) in edges.items():
            depths[i] = min(depth[left], depth[right])
            ccw[i] = depth[left] > depth[right]

    lee_x = tuple((dep + (0 if turn else 1)) % 2 == 0 for dep, turn in zip(depths, ccw))
    return SeifertData(
        circles=res.circles,
        depths=tuple(depths),
        counterclockwise=tuple(ccw),
        writhe=d.writhe,
        r=res.num_circles,
        lee_x=lee_x,
        resolution=res,
    )


# ----------------------------------------------------------------------
# Diagram operations
# ----------------------------------------------------------------------

def mirror(d: LinkDiagram) -> LinkDiagram:
    """Switch over and under at every crossing; orientation is kept."""
    starts = [3 if s > 0 else 1 for s in d.signs]
    crossings = [tuple(x[(s + k) % 4] for k in range(4)) for x, s in zip(d.crossings, starts)]
    tails = {a: (c, (p - starts[c]) % 4) for a, (c, p) in d.tails.items()}
    return LinkDiagram(crossings, tails, d.free_loops, d.basepoint, _derived(d.name, "mirror"))


def reverse(d: LinkDiagram) -> LinkDiagram:
    """Reverse the orientation of every component."""
    crossings = [tuple(x[(2 + k) % 4] for k in range(4)) for x in d.crossings]
    tails = {}
    for a in d.tails:
        c, p = d.head(a)
        tails[a] = (c, (p - 2) % 4)
    return LinkDiagram(crossings, tails, d.free_loops, d.basepoint, _derived(d.name, "reverse"))


def _derived(name: str, op: str) -> str:
    return f"{op}({name})" if name else ""


def parse_braid(word) -> List[int]:
    """'1,-2,1' or '1 -2 1' or a list of non-zero ints."""
    if isinstance(word, str):
        tokens = [t for t in re.split(r"[\s,]+", word.strip()) if t]
        try:
            letters = [int(t) for t in tokens]
        except ValueError:
            raise PDParseError(f"Braid word must be integers, got {word!r}") from None
    else:
        letters = [int(t) for t in word]
    if not letters or any(a == 0 for a in letters):
        raise PDParseError(f"Braid word needs non-zero letters, got {word!r}")
    return letters


def braid_closure(word, strands: Optional[int] = None, name: str = "") -> LinkDiagram:
    """Closure of a braid word; letter i > 0 is a positive crossing of strands i, i+1.

    Raises:
        PDParseError: if the word is malformed or exceeds ``strands``
    """
    letters = parse_braid(word)
    k = max(abs(a) for a in letters) + 1
    if strands is not None:
        if strands < k:
            raise PDParseError(f"Braid word needs {k} strands, got {strands}")
        k = strands
    cur = list(range(1, k + 1))
    nxt = k + 1
    crossings = []
    for letter in letters:
        p = abs(letter) - 1
        x, y = cur[p], cur[p + 1]
        x2, y2 = nxt, nxt + 1
        nxt += 2
        crossings.append([y, x2, y2, x] if letter > 0 else [x, y, x2, y2])
        cur[p], cur[p + 1] = y2, x2
    relabel = {final: j + 1 for j, final in enumerate(cur)}
    used = {a for x in crossings for a in x}
    free = sum(1 for j in range(k) if (j + 1) not in used)
    crossings = [tuple(relabel.get(a, a) for a in x) for x in crossings]
    crossings = _compact_labels(crossings)
    if not crossings:
        return LinkDiagram([], {}, free_loops=free, name=name)
    return LinkDiagram(crossings, _infer_tails(crossings), free_loops=free, name=name)


def _compact_labels(crossings) -> List[Tuple[int, ...]]:
    labels = sorted({a for x in crossings for a in x})
    index = {a: i + 1 for i, a in enumerate(labels)}
    return [tuple(index[a] for a in x) for x in crossings]


def disjoint_union(d1: LinkDiagram, d2: LinkDiagram) -> LinkDiagram:
    """Juxtapose two diagrams; arcs of ``d2`` are shifted past those of ``d1``.

    Free loops of ``d1`` are re-created after all PD arcs, so the basepoint of
    ``d1`` is kept only when it is a PD arc.
    """
    shift = d1.max_label
    offset = len(d1.crossings)
    crossings = list(d1.crossings) + [tuple(a + shift for a in x) for x in d2.crossings]
    tails = dict(d1.tails)
    for a, (c, p) in d2.tails.items():
        tails[a + shift] = (c + offset, p)
    bp = d1.basepoint if d1.basepoint in d1.pd_arcs else None
    name = f"{d1.name}+{d2.name}" if d1.name or d2.name else ""
    return LinkDiagram(crossings, tails, d1.free_loops + d2.free_loops, bp, name)
