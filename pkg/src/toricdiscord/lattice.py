"""Geometry of the L x L torus carrying one spin per edge.

Vertices are indexed row-major, ``v = r * L + c``.  Every vertex owns two
edges: the horizontal edge ``2 * v`` joining (r, c) to (r, c + 1) and the
vertical edge ``2 * v + 1`` joining (r, c) to (r + 1, c), all coordinates
taken modulo L.  Plaquette ``p = r * L + c`` is the face whose top-left
corner is vertex (r, c).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class SpinPairKind(enum.Enum):
    """Two ways of picking a pair of neighbouring edge spins."""

    VertexSharing = "vertex_sharing"
    PlaquetteParallel = "plaquette_parallel"


class EdgePair(NamedTuple):
    i: int
    j: int
    kind: SpinPairKind
    degenerate: bool


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TorusLattice:
    L: int
    edge_endpoints: np.ndarray  # (2L^2, 2)
    star_edges: np.ndarray  # (L^2, 4)
    plaquette_edges: np.ndarray  # (L^2, 4)
    z_loops: tuple[tuple[int, ...], ...]

    @property
    def n_vertices(self) -> int:
        return self.L * self.L

    @property
    def n_edges(self) -> int:
        return 2 * self.L * self.L

    @property
    def n_plaquettes(self) -> int:
        return self.L * self.L

    @property
    def doubled_bonds(self) -> bool:
        """True when two distinct edges join the same vertex pair (L = 2)."""
        return self.L == 2

    def vertex(self, r: int, c: int) -> int:
        return (r % self.L) * self.L + (c % self.L)

    def horizontal_edge(self, r: int, c: int) -> int:
        return 2 * self.vertex(r, c)

    def vertical_edge(self, r: int, c: int) -> int:
        return 2 * self.vertex(r, c) + 1

    def star_mask(self, s: int) -> int:
        """Bit mask over edges flipped by the star operator at vertex ``s``."""
        return _mask(self.star_edges[s])

    def plaquette_mask(self, p: int) -> int:
        return _mask(self.plaquette_edges[p])

    def check_edges(self, edges: Iterable[int]) -> list[int]:
        out = []
        for e in edges:
            e = int(e)
            if not 0 <= e < self.n_edges:
                raise ValueError(f"edge index {e} outside [0, {self.n_edges})")
            out.append(e)
        return out


def _mask(edges: Iterable[int]) -> int:
    m = 0
    for e in edges:
        m ^= 1 << int(e)
    return m


def build_lattice(L: int) -> TorusLattice:
    if int(L) != L or L < 2:
        raise ValueError(f"lattice size must be an integer >= 2, got {L!r}")
    L = int(L)

    def v(r, c):
        return (r % L) * L + (c % L)

    endpoints = np.empty((2 * L * L, 2), dtype=np.int64)
    for r in range(L):
        for c in range(L):
            endpoints[2 * v(r, c)] = (v(r, c), v(r, c + 1))
            endpoints[2 * v(r, c) + 1] = (v(r, c), v(r + 1, c))

    stars = np.empty((L * L, 4), dtype=np.int64)
    plaquettes = np.empty((L * L, 4), dtype=np.int64)
    for r in range(L):
        for c in range(L):
            stars[v(r, c)] = (
                2 * v(r, c),
                2 * v(r, c) + 1,
                2 * v(r, c - 1),
                2 * v(r - 1, c) + 1,
            )
            plaquettes[v(r, c)] = (
                2 * v(r, c),
                2 * v(r + 1, c),
                2 * v(r, c) + 1,
                2 * v(r, c + 1) + 1,
            )

    rows = tuple(tuple(2 * v(r, c) for c in range(L)) for r in range(L))
    cols = tuple(tuple(2 * v(r, c) + 1 for r in range(L)) for c in range(L))

    return TorusLattice(
        L=L,
        edge_endpoints=_frozen(endpoints),
        star_edges=_frozen(stars),
        plaquette_edges=_frozen(plaquettes),
        z_loops=rows + cols,
    )


def edges_to_vertex_support(lattice: TorusLattice, edges: Iterable[int]) -> frozenset[int]:
    """Vertices whose Ising spin product equals the product of the edge spins.

    Each edge spin is the product of its two endpoint spins, and a squared
    vertex spin is 1, so only vertices met an odd number of times survive.
    """
    support: set[int] = set()
    for e in lattice.check_edges(edges):
        for s in lattice.edge_endpoints[e]:
            support ^= {int(s)}
    return frozenset(support)


def resolve_pair(lattice: TorusLattice, kind: SpinPairKind) -> EdgePair:
    """Canonical representative edge pair of the given kind.

    VertexSharing: the horizontal and vertical edges leaving vertex 0.
    PlaquetteParallel: the top and bottom edges of plaquette 0.
    """
    kind = SpinPairKind(kind)
    if kind is SpinPairKind.VertexSharing:
        i, j = lattice.horizontal_edge(0, 0), lattice.vertical_edge(0, 0)
    else:
        i, j = lattice.horizontal_edge(0, 0), lattice.horizontal_edge(1, 0)
    return EdgePair(i, j, kind, lattice.doubled_bonds)


def is_closed_cycle(lattice: TorusLattice, edges: Iterable[int]) -> bool:
    """Every vertex touched by ``edges`` has even degree within the set."""
    degree = np.zeros(lattice.n_vertices, dtype=np.int64)
    for e in lattice.check_edges(edges):
        a, b = lattice.edge_endpoints[e]
        degree[a] += 1
        degree[b] += 1
    return bool(np.all(degree % 2 == 0))


def winding(lattice: TorusLattice, edges: Iterable[int]) -> tuple[int, int]:
    """Net (horizontal, vertical) winding parity of a closed edge set.

    A cycle winds horizontally an odd number of times exactly when it crosses
    the vertical cut between columns L-1 and 0 an odd number of times.
    """
    L = lattice.L
    h = v = 0
    for e in lattice.check_edges(edges):
        vert = e // 2
        r, c = divmod(vert, L)
        if e % 2 == 0 and c == L - 1:
            h ^= 1
        if e % 2 == 1 and r == L - 1:
            v ^= 1
    return h, v
