"""Workspace model: undirected graphs, grid maps, and conversions.

Vertices are opaque string tokens; grid cells use the canonical form
"r<row>c<col>" so grid and abstract pipelines share one vertex type.
Waiting is always allowed: ``has_edge(u, u)`` is true for every vertex
even though no self-loop edges are stored.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from .errors import MapParseError, UnknownVertexError

Coord = tuple[int, int]

_CELL_RE = re.compile(r"^r(\d+)c(\d+)$")

OBSTACLE_CHARS = frozenset("@T")
FREE_CHAR = "."


def cell_name(row: int, col: int) -> str:
    return f"r{row}c{col}"


def parse_cell(name: str) -> Coord | None:
    """Return (row, col) for a canonical grid vertex name, else None."""
    m = _CELL_RE.match(name)
    if m is None:
        return None
    return int(m.group(1)), int(m.group(2))


@dataclass(frozen=True)
class GridMap:
    """Rectangular grid with a set of blocked (row, col) cells."""

    height: int
    width: int
    blocked: frozenset[Coord]

    def __post_init__(self):
        for r, c in self.blocked:
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise ValueError(f"blocked cell ({r},{c}) outside {self.height}x{self.width} map")

    def is_free(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width and (row, col) not in self.blocked

    def free_cells(self) -> list[Coord]:
        """All free cells in row-major order."""
        return [
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if (r, c) not in self.blocked
        ]

    def to_text(self) -> str:
        rows = []
        for r in range(self.height):
            rows.append("".join("@" if (r, c) in self.blocked else FREE_CHAR for c in range(self.width)))
        header = f"type octile\nheight {self.height}\nwidth {self.width}\nmap\n"
        return header + "\n".join(rows) + "\n"


def load_map(text: str) -> GridMap:
    """Parse a map file: octile header then '.'/'@'/'T' rows."""
    lines = text.splitlines()
    if len(lines) < 4:
        raise MapParseError("expected at least 4 header lines", len(lines) + 1)
    if lines[0].strip() != "type octile":
        raise MapParseError(f"expected 'type octile', got {lines[0]!r}", 1)
    m = re.match(r"^height (\d+)$", lines[1].strip())
    if m is None:
        raise MapParseError(f"expected 'height H', got {lines[1]!r}", 2)
    height = int(m.group(1))
    m = re.match(r"^width (\d+)$", lines[2].strip())
    if m is None:
        raise MapParseError(f"expected 'width W', got {lines[2]!r}", 3)
    width = int(m.group(1))
    if lines[3].strip() != "map":
        raise MapParseError(f"expected 'map', got {lines[3]!r}", 4)
    rows = [ln for ln in lines[4:] if ln.strip() != ""]
    if len(rows) != height:
        raise MapParseError(f"expected {height} map rows, found {len(rows)}", 5 + len(rows))
    blocked = set()
    for r, row in enumerate(rows):
        line_no = 5 + r
        if len(row) != width:
            raise MapParseError(f"row has {len(row)} cells, expected {width}", line_no)
        for c, ch in enumerate(row):
            if ch in OBSTACLE_CHARS:
                blocked.add((r, c))
            elif ch != FREE_CHAR:
                raise MapParseError(f"unknown cell character {ch!r}", line_no)
    return GridMap(height, width, frozenset(blocked))


class Graph:
    """Undirected graph over string vertices.

    Vertex and edge insertion order is preserved (reductions and JSON
    round-trips depend on it); membership checks use sets. Edges are
    stored once per unordered pair, in the orientation they were given.
    """

    __slots__ = ("_vertices", "_vertex_set", "_edges", "_edge_set", "_adj")

    def __init__(self, vertices, edges):
        self._vertices: tuple[str, ...] = ()
        self._vertex_set: set[str] = set()
        self._adj: dict[str, set[str]] = {}
        ordered = []
        for v in vertices:
            if not isinstance(v, str) or v == "":
                raise ValueError(f"invalid vertex id {v!r}")
            if v not in self._vertex_set:
                self._vertex_set.add(v)
                self._adj[v] = set()
                ordered.append(v)
        self._vertices = tuple(ordered)
        edge_list = []
        edge_set = set()
        for u, v in edges:
            if u not in self._vertex_set:
                raise UnknownVertexError(u)
            if v not in self._vertex_set:
                raise UnknownVertexError(v)
            if u == v:
                raise ValueError(f"explicit self-loop on {u!r}; waiting is implicit")
            key = (u, v) if u <= v else (v, u)
            if key in edge_set:
                continue
            edge_set.add(key)
            edge_list.append((u, v))
            self._adj[u].add(v)
            self._adj[v].add(u)
        self._edges = tuple(edge_list)
        self._edge_set = edge_set

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self._edges

    def __contains__(self, v: str) -> bool:
        return v in self._vertex_set

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertex_set == other._vertex_set and self._edge_set == other._edge_set

    def __hash__(self):
        return hash((frozenset(self._vertex_set), frozenset(self._edge_set)))

    def require(self, v: str) -> None:
        if v not in self._vertex_set:
            raise UnknownVertexError(v)

    def neighbors(self, v: str) -> list[str]:
        self.require(v)
        return sorted(self._adj[v])

    def has_edge(self, u: str, v: str) -> bool:
        """True iff u == v (implicit wait) or {u, v} is an edge."""
        self.require(u)
        self.require(v)
        if u == v:
            return True
        key = (u, v) if u <= v else (v, u)
        return key in self._edge_set

    def bfs_distances(self, source: str) -> dict[str, int]:
        """Hop distance from source to every reachable vertex."""
        self.require(source)
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            d = dist[u] + 1
            for w in self._adj[u]:
                if w not in dist:
                    dist[w] = d
                    queue.append(w)
        return dist

    def to_json_dict(self) -> dict:
        return {"vertices": list(self._vertices), "edges": [[u, v] for u, v in self._edges]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Graph":
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise ValueError("graph JSON needs 'vertices' and 'edges'")
        return cls(data["vertices"], [tuple(e) for e in data["edges"]])


def grid_to_graph(m: GridMap) -> Graph:
    """4-connected graph over the free cells of a grid map."""
    free = m.free_cells()
    vertices = [cell_name(r, c) for r, c in free]
    edges = []
    for r, c in free:
        if m.is_free(r, c + 1):
            edges.append((cell_name(r, c), cell_name(r, c + 1)))
        if m.is_free(r + 1, c):
            edges.append((cell_name(r, c), cell_name(r + 1, c)))
    return Graph(vertices, edges)


def derive_grid(g: Graph) -> GridMap | None:
    """Reconstruct a GridMap from canonical cell names, if possible.

    Cells that are not vertices count as blocked. Returns None when any
    vertex does not parse as "r<row>c<col>".
    """
    coords = []
    for v in g.vertices:
        rc = parse_cell(v)
        if rc is None:
            return None
        coords.append(rc)
    if not coords:
        return None
    height = max(r for r, _ in coords) + 1
    width = max(c for _, c in coords) + 1
    free = set(coords)
    blocked = frozenset(
        (r, c) for r in range(height) for c in range(width) if (r, c) not in free
    )
    return GridMap(height, width, blocked)
