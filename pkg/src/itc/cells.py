"""Cubic cell complexes on the 3-torus, the slab T^2 x I and the cube.

Axes are numbered 0, 1, 2 (front/back, top/bottom, left/right). Every cell
is keyed by ``(axis, x, y, z)`` where ``(x, y, z)`` is its lowest corner:
an edge runs along ``axis``, a face is normal to ``axis``; vertices and
cubes use ``axis = -1``. Within each dimension cells are numbered in
lexicographic order of that key, so ids are reproducible.

Boundary planes (only in open directions):

* axis 2 at 0: trivial boundary, at L: intertwined boundary (slab, cube)
* axis 1 at 0 and L: e-condensed (cube)
* axis 0 at 0 and L: m-condensed (cube)

Edges host qubits unless they lie in an e-condensed plane. Faces host
qubits unless they lie in a trivial, intertwined or e-condensed plane.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

BULK = "bulk"
TRIVIAL = "trivial"
INTERTWINED = "intertwined"
E_CONDENSED = "e_condensed"
M_CONDENSED = "m_condensed"

OPEN_AXIS = 2


class Kind(str, enum.Enum):
    TORUS3 = "torus3"
    SLAB = "slab"
    CUBE = "cube"


@dataclass(frozen=True)
class Geometry:
    kind: Kind
    L: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"lattice size must be an integer >= 2, got {self.L!r}")

    @property
    def periodic(self) -> tuple[bool, bool, bool]:
        if self.kind is Kind.TORUS3:
            return (True, True, True)
        if self.kind is Kind.SLAB:
            return (True, True, False)
        return (False, False, False)

    @property
    def vertex_extent(self) -> tuple[int, int, int]:
        """Number of vertex positions along each axis."""
        return tuple(self.L if per else self.L + 1 for per in self.periodic)

    @property
    def cube_extent(self) -> tuple[int, int, int]:
        return (self.L, self.L, self.L)


def _plane_roles(geometry: Geometry) -> dict[tuple[int, int], str]:
    L = geometry.L
    if geometry.kind is Kind.TORUS3:
        return {}
    roles = {(OPEN_AXIS, 0): TRIVIAL, (OPEN_AXIS, L): INTERTWINED}
    if geometry.kind is Kind.CUBE:
        roles.update({(1, 0): E_CONDENSED, (1, L): E_CONDENSED})
        roles.update({(0, 0): M_CONDENSED, (0, L): M_CONDENSED})
    return roles


@dataclass(frozen=True)
class CellComplex:
    geometry: Geometry
    vertices: list[tuple[int, int, int]]
    edges: list[tuple[int, int, int, int]]
    faces: list[tuple[int, int, int, int]]
    cubes: list[tuple[int, int, int]]
    edge_vertices: list[tuple[int, int]]
    face_edges: list[tuple[int, ...]]
    cube_faces: list[tuple[int, ...]]
    vertex_tags: list[frozenset[str]]
    edge_tags: list[frozenset[str]]
    face_tags: list[frozenset[str]]
    cube_tags: list[frozenset[str]]
    index: dict[tuple, int] = field(repr=False)

    # coboundaries --------------------------------------------------------

    @cached_property
    def vertex_edges(self) -> list[tuple[int, ...]]:
        return _invert(self.edge_vertices, len(self.vertices))

    @cached_property
    def edge_faces(self) -> list[tuple[int, ...]]:
        return _invert(self.face_edges, len(self.edges))

    @cached_property
    def face_cubes(self) -> list[tuple[int, ...]]:
        return _invert(self.cube_faces, len(self.faces))

    # qubit hosting -------------------------------------------------------

    @cached_property
    def edge_hosts_qubit(self) -> np.ndarray:
        return np.array([E_CONDENSED not in t for t in self.edge_tags], dtype=bool)

    @cached_property
    def face_hosts_qubit(self) -> np.ndarray:
        blocked = {TRIVIAL, INTERTWINED, E_CONDENSED}
        return np.array([not (blocked & t) for t in self.face_tags], dtype=bool)

    @property
    def num_qubit_edges(self) -> int:
        return int(self.edge_hosts_qubit.sum())

    @property
    def num_qubit_faces(self) -> int:
        return int(self.face_hosts_qubit.sum())

    # lookups -------------------------------------------------------------

    def vertex_id(self, coords) -> int:
        return self.index[("v", *self._wrap(coords, self.geometry.vertex_extent))]

    def cube_id(self, coords) -> int:
        return self.index[("c", *self._wrap(coords, self.geometry.cube_extent))]

    def edge_id(self, axis: int, coords) -> int:
        return self.index[("e", axis, *self._wrap(coords, self.geometry.vertex_extent))]

    def face_id(self, axis: int, coords) -> int:
        return self.index[("f", axis, *self._wrap(coords, self.geometry.vertex_extent))]

    def _wrap(self, coords, extent) -> tuple[int, int, int]:
        return tuple(
            int(c) % n if per else int(c)
            for c, n, per in zip(coords, extent, self.geometry.periodic)
        )

    # incidence matrices (rows: lower-dimensional cells) ------------------

    def incidence(self, kind: str) -> np.ndarray:
        """Dense 0/1 incidence matrix: "ve" (vertex x edge), "ef", "fc"."""
        if kind == "ve":
            rows, cols, table = len(self.vertices), len(self.edges), self.edge_vertices
        elif kind == "ef":
            rows, cols, table = len(self.edges), len(self.faces), self.face_edges
        elif kind == "fc":
            rows, cols, table = len(self.faces), len(self.cubes), self.cube_faces
        else:
            raise ValueError(f"unknown incidence kind {kind!r}")
        mat = np.zeros((rows, cols), dtype=np.uint8)
        for j, members in enumerate(table):
            mat[list(members), j] = 1
        return mat

    def dump(self) -> str:
        """Line-oriented incidence dump for diffing."""
        lines = []
        tables = [
            ("vertex", self.vertices, [-1] * len(self.vertices), self.vertex_tags, None),
            ("edge", [e[1:] for e in self.edges], [e[0] for e in self.edges], self.edge_tags, self.edge_vertices),
            ("face", [f[1:] for f in self.faces], [f[0] for f in self.faces], self.face_tags, self.face_edges),
            ("cube", self.cubes, [-1] * len(self.cubes), self.cube_tags, self.cube_faces),
        ]
        for kind, coords, axes, tags, bnd in tables:
            for i, (c, a, t) in enumerate(zip(coords, axes, tags)):
                lines.append(f"CELL {kind} {i} {','.join(map(str, c))} {a} {','.join(sorted(t))}")
                if bnd is not None:
                    lines.append(f"BND {i}: {','.join(map(str, bnd[i]))}")
        return "\n".join(lines) + "\n"


def _invert(table: list[tuple[int, ...]], size: int) -> list[tuple[int, ...]]:
    out: list[list[int]] = [[] for _ in range(size)]
    for j, members in enumerate(table):
        for i in members:
            out[i].append(j)
    return [tuple(sorted(x)) for x in out]


def _unit(axis: int) -> np.ndarray:
    u = np.zeros(3, dtype=int)
    u[axis] = 1
    return u


def build_complex(geometry: Geometry) -> CellComplex:
    ext = geometry.vertex_extent
    per = geometry.periodic
    L = geometry.L
    roles = _plane_roles(geometry)

    def fits(p) -> bool:
        return all(per[a] or 0 <= p[a] < ext[a] for a in range(3))

    def wrap(p) -> tuple[int, int, int]:
        return tuple(int(p[a]) % ext[a] if per[a] else int(p[a]) for a in range(3))

    def tags_for(corners) -> frozenset[str]:
        found = {
            role
            for (axis, value), role in roles.items()
            if all(c[axis] == value for c in corners)
        }
        return frozenset(found or {BULK})

    vertices = [p for p in itertools.product(*(range(n) for n in ext))]
    index: dict[tuple, int] = {("v", *p): i for i, p in enumerate(vertices)}

    edges = []
    for axis in range(3):
        for p in vertices:
            if fits(np.add(p, _unit(axis))):
                edges.append((axis, *p))
    for i, e in enumerate(edges):
        index[("e", *e)] = i
    edge_vertices = [
        (index[("v", *e[1:])], index[("v", *wrap(np.add(e[1:], _unit(e[0]))))]) for e in edges
    ]

    faces = []
    for axis in range(3):
        b, c = [a for a in range(3) if a != axis]
        for p in vertices:
            if fits(np.add(p, _unit(b) + _unit(c))):
                faces.append((axis, *p))
    for i, f in enumerate(faces):
        index[("f", *f)] = i
    face_edges = []
    for f in faces:
        axis, p = f[0], np.array(f[1:])
        b, c = [a for a in range(3) if a != axis]
        members = [
            index[("e", b, *wrap(p))],
            index[("e", b, *wrap(p + _unit(c)))],
            index[("e", c, *wrap(p))],
            index[("e", c, *wrap(p + _unit(b)))],
        ]
        face_edges.append(tuple(sorted(set(members))))

    cubes = [p for p in itertools.product(*(range(L) for _ in range(3)))]
    for i, p in enumerate(cubes):
        index[("c", *p)] = i
    cube_faces = []
    for p in cubes:
        members = []
        for axis in range(3):
            members.append(index[("f", axis, *wrap(p))])
            members.append(index[("f", axis, *wrap(np.add(p, _unit(axis))))])
        cube_faces.append(tuple(sorted(set(members))))

    def edge_corners(e):
        p = np.array(e[1:])
        return [p, p + _unit(e[0])]

    def face_corners(f):
        p = np.array(f[1:])
        b, c = [a for a in range(3) if a != f[0]]
        return [p, p + _unit(b), p + _unit(c), p + _unit(b) + _unit(c)]

    vertex_tags = [tags_for([np.array(p)]) for p in vertices]
    edge_tags = [tags_for(edge_corners(e)) for e in edges]
    face_tags = [tags_for(face_corners(f)) for f in faces]
    cube_tags = []
    for c, members in enumerate(cube_faces):
        touching = set().union(*(face_tags[f] for f in members)) - {BULK}
        cube_tags.append(frozenset(touching or {BULK}))

    return CellComplex(
        geometry=geometry,
        vertices=vertices,
        edges=edges,
        faces=faces,
        cubes=cubes,
        edge_vertices=edge_vertices,
        face_edges=face_edges,
        cube_faces=cube_faces,
        vertex_tags=vertex_tags,
        edge_tags=edge_tags,
        face_tags=face_tags,
        cube_tags=cube_tags,
        index=index,
    )


def _lattice_distance(a, b, extent, periodic, wrap: bool) -> int:
    total = 0
    for x, y, n, per in zip(a, b, extent, periodic):
        d = abs(int(x) - int(y))
        if per and wrap:
            d = min(d, n - d)
        total += d
    return total


def graph_distance(complex: CellComplex, v1: int, v2: int, wrap: bool = True) -> int:
    """Shortest edge-path length between two vertices.

    With ``wrap=False`` periodic directions are treated as if cut open.
    """
    g = complex.geometry
    return _lattice_distance(
        complex.vertices[v1], complex.vertices[v2], g.vertex_extent, g.periodic, wrap
    )


def dual_graph_distance(complex: CellComplex, c1: int, c2: int, wrap: bool = True) -> int:
    """Shortest path length between cubes through shared faces."""
    g = complex.geometry
    return _lattice_distance(
        complex.cubes[c1], complex.cubes[c2], g.cube_extent, g.periodic, wrap
    )


def bfs_distances(adjacency: list[list[int]], source: int) -> list[int]:
    """Plain BFS; used as the independent oracle for the closed forms above."""
    dist = [-1] * len(adjacency)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def vertex_adjacency(complex: CellComplex) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in complex.vertices]
    for a, b in complex.edge_vertices:
        adj[a].append(b)
        adj[b].append(a)
    return adj


def cube_adjacency(complex: CellComplex) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in complex.cubes]
    for cubes in complex.face_cubes:
        if len(cubes) == 2:
            a, b = cubes
            adj[a].append(b)
            adj[b].append(a)
    return adj
