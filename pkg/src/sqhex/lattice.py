"""Square-hexagon lattices on a contracting trapezoid.

The graph is drawn inside the square lattice rotated by 45 degrees, so every
edge is a diagonal.  Coordinates are stored doubled: a vertex with abscissa
``i`` on row ``k`` (ordinate ``k / 2``) has ``X = 2 i`` and ``Y = k``, and
``X + Y`` is always even.  Odd rows hold white vertices, even rows black ones.

Row ``2s - 1`` to row ``2s`` is a square row when ``a_s = 0`` (each white has a
NW and a NE black neighbour, the NE edge carries ``y_s``) and a hexagon row when
``a_s = 1`` (each white has a single NW neighbour, drawn as the "vertical" edge
of the hexagon).  Row ``2s`` to row ``2s + 1`` always has both diagonals, the NE
one carrying ``x_s``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ValidationError

NE_SW = "NE-SW"
NW_SE = "NW-SE"
VERTICAL = "vertical"


@dataclass(frozen=True)
class PeriodicWeights:
    """Edge weights repeating with period ``n``.

    ``x[i - 1]`` is ``x_i``; ``y`` maps each ``i`` in ``1..n`` with ``a_i = 0``
    to ``y_i``.
    """

    x: tuple[float, ...]
    y: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        x = tuple(float(v) for v in self.x)
        y = {int(k): float(v) for k, v in dict(self.y).items()}
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if not x:
            raise ValidationError("weights need at least one x value")
        for v in x:
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"x weights must be positive and finite, got {v}")
        for i, v in y.items():
            if not 1 <= i <= len(x):
                raise ValidationError(f"y index {i} outside 1..{len(x)}")
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"y weights must be positive and finite, got {v}")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def r(self) -> int:
        """Number of hexagon rows per period."""
        return self.n - len(self.y)

    def x_at(self, i: int) -> float:
        return self.x[(i - 1) % self.n]

    def y_at(self, i: int) -> float:
        return self.y[(i - 1) % self.n + 1]

    def a_pattern(self) -> tuple[int, ...]:
        return tuple(0 if i in self.y else 1 for i in range(1, self.n + 1))

    def gammas(self) -> list[tuple[float, int]]:
        """Distinct values of ``1 / y_i`` with their multiplicities."""
        counts: dict[float, int] = {}
        for v in self.y.values():
            g = 1.0 / v
            counts[g] = counts.get(g, 0) + 1
        return sorted(counts.items())

    @classmethod
    def uniform(cls, a_pattern: Sequence[int]) -> PeriodicWeights:
        n = len(a_pattern)
        return cls(x=(1.0,) * n, y={i + 1: 1.0 for i, a in enumerate(a_pattern) if a == 0})


@dataclass(frozen=True)
class LatticeSpec:
    """Boundary row ``Omega``, row types and weights of a trapezoid."""

    N: int
    Omega: tuple[int, ...]
    a_pattern: tuple[int, ...]
    weights: PeriodicWeights

    def __post_init__(self) -> None:
        omega = tuple(int(v) for v in self.Omega)
        pattern = tuple(int(v) for v in self.a_pattern)
        object.__setattr__(self, "Omega", omega)
        object.__setattr__(self, "a_pattern", pattern)
        if self.N < 1:
            raise ValidationError("N must be positive")
        if len(omega) != self.N:
            raise ValidationError(f"Omega has {len(omega)} entries, expected N={self.N}")
        if omega[0] != 1:
            raise ValidationError("Omega must start at 1")
        if any(b <= a for a, b in zip(omega, omega[1:])):
            raise ValidationError("Omega must be strictly increasing")
        if not pattern or any(a not in (0, 1) for a in pattern):
            raise ValidationError("a_pattern must be a non-empty 0/1 sequence")
        if len(pattern) != self.weights.n:
            raise ValidationError(
                f"a_pattern period {len(pattern)} differs from weight period {self.weights.n}"
            )
        if self.weights.a_pattern() != pattern:
            raise ValidationError("y weights must be given exactly on the square rows of a period")

    def a(self, i: int) -> int:
        return self.a_pattern[(i - 1) % len(self.a_pattern)]

    @property
    def I2(self) -> list[int]:
        return [i for i in range(1, self.N + 1) if self.a(i) == 0]

    @property
    def omega(self) -> tuple[int, ...]:
        """Signature of the boundary row, ``omega_i = Omega_{N-i+1} - N + i - 1``."""
        n = self.N
        return tuple(self.Omega[n - i] - n + i - 1 for i in range(1, n + 1))

    @classmethod
    def from_segments(
        cls,
        N: int,
        segments: Sequence[tuple[float, float]],
        a_pattern: Sequence[int],
        weights: PeriodicWeights | None = None,
    ) -> LatticeSpec:
        """Boundary row made of runs of consecutive positions.

        ``segments`` are ``(a_i, b_i)`` in rescaled units with total length 1;
        run ``i`` covers positions ``round(a_i N) + 1 .. round(b_i N)``.
        """
        omega: list[int] = []
        for a, b in segments:
            lo, hi = round(a * N) + 1, round(b * N)
            omega.extend(range(lo, hi + 1))
        if len(omega) != N:
            raise ValidationError(f"segments give {len(omega)} positions, expected {N}")
        w = weights or PeriodicWeights.uniform(a_pattern)
        return cls(N, tuple(omega), tuple(a_pattern), w)

    @classmethod
    def staircase(
        cls, N: int, M: int, a_pattern: Sequence[int], weights: PeriodicWeights | None = None
    ) -> LatticeSpec:
        """Boundary row ``1, 1 + M, 1 + 2M, ...``."""
        w = weights or PeriodicWeights.uniform(a_pattern)
        return cls(N, tuple(1 + M * k for k in range(N)), tuple(a_pattern), w)


@dataclass(frozen=True)
class Vertex:
    id: int
    X: int  # doubled abscissa
    row: int
    color: str  # "white" on odd rows, "black" on even rows
    virtual: bool = False

    @property
    def position(self) -> tuple[float, float]:
        return self.X / 2, self.row / 2


@dataclass(frozen=True)
class Edge:
    id: int
    white: int
    black: int
    direction: str
    weight: float
    lower: int  # id of the endpoint on the lower row
    upper: int


@dataclass
class Graph:
    spec: LatticeSpec
    vertices: list[Vertex]
    edges: list[Edge]
    faces: list[tuple[int, ...]]
    rows: list[list[int]]  # rows[k] lists vertex ids of row k left to right, virtual included

    @cached_property
    def _edge_lookup(self) -> dict[tuple[int, int], int]:
        out = {}
        for e in self.edges:
            out[(e.white, e.black)] = e.id
            out[(e.black, e.white)] = e.id
        return out

    @cached_property
    def _coord_lookup(self) -> dict[tuple[int, int], int]:
        return {(v.X, v.row): v.id for v in self.vertices}

    @cached_property
    def incident(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            out[e.white].append(e.id)
            out[e.black].append(e.id)
        return out

    def edge_between(self, u: int, v: int) -> int | None:
        return self._edge_lookup.get((u, v))

    def vertex_at(self, X: int, row: int) -> int | None:
        return self._coord_lookup.get((X, row))

    @property
    def real_vertices(self) -> list[Vertex]:
        return [v for v in self.vertices if not v.virtual]

    @property
    def whites(self) -> list[int]:
        return [v.id for v in self.vertices if v.color == "white" and not v.virtual]

    @property
    def blacks(self) -> list[int]:
        return [v.id for v in self.vertices if v.color == "black"]

    @property
    def num_rows(self) -> int:
        return len(self.rows) - 1


def row_extents(spec: LatticeSpec) -> list[tuple[int, int]]:
    """Doubled abscissa range ``(left, right)`` of every row, index 0 unused."""
    N = spec.N
    ext = [(0, -1)] * (2 * N + 2)
    right = 2 * spec.Omega[-1] - 1
    ext[1] = (1, right)
    for s in range(1, N + 1):
        right = right + 1 if spec.a(s) == 0 else right - 1
        ext[2 * s] = (0, right)
        right -= 1
        ext[2 * s + 1] = (1, right)
    return ext


def build_lattice(spec: LatticeSpec) -> Graph:
    """Graph on the trapezoid with bottom boundary ``spec.Omega``."""
    N = spec.N
    ext = row_extents(spec)
    real_bottom = {2 * p - 1 for p in spec.Omega}
    vertices: list[Vertex] = []
    rows: list[list[int]] = [[]]
    coord: dict[tuple[int, int], int] = {}
    for k in range(1, 2 * N + 2):
        lo, hi = ext[k]
        color = "white" if k % 2 else "black"
        ids = []
        for X in range(lo, hi + 1, 2):
            vid = len(vertices)
            virtual = k == 1 and X not in real_bottom
            vertices.append(Vertex(vid, X, k, color, virtual))
            coord[(X, k)] = vid
            ids.append(vid)
        rows.append(ids)

    raw: list[tuple[int, int, str, float]] = []  # (lower, upper, direction, weight)
    for s in range(1, N + 1):
        lower, upper = 2 * s - 1, 2 * s
        for vid in rows[lower]:
            v = vertices[vid]
            if v.virtual:
                continue
            if spec.a(s) == 1:
                b = coord.get((v.X - 1, upper))
                if b is not None:
                    raw.append((vid, b, VERTICAL, 1.0))
            else:
                b = coord.get((v.X - 1, upper))
                if b is not None:
                    raw.append((vid, b, NW_SE, 1.0))
                b = coord.get((v.X + 1, upper))
                if b is not None:
                    raw.append((vid, b, NE_SW, spec.weights.y_at(s)))
        lower, upper = 2 * s, 2 * s + 1
        for vid in rows[lower]:
            v = vertices[vid]
            w = coord.get((v.X - 1, upper))
            if w is not None:
                raw.append((vid, w, NW_SE, 1.0))
            w = coord.get((v.X + 1, upper))
            if w is not None:
                raw.append((vid, w, NE_SW, spec.weights.x_at(s)))

    raw.sort(key=lambda t: (vertices[t[0]].row, vertices[t[0]].X, vertices[t[1]].X))
    edges = []
    for eid, (lo_id, up_id, direction, weight) in enumerate(raw):
        if vertices[lo_id].color == "white":
            white, black = lo_id, up_id
        else:
            white, black = up_id, lo_id
        edges.append(Edge(eid, white, black, direction, weight, lo_id, up_id))

    g = Graph(spec, vertices, edges, [], rows)
    g.faces = _bounded_faces(g)
    return g


def _bounded_faces(g: Graph) -> list[tuple[int, ...]]:
    """Diamonds, and hexagons where a hexagon row removes the shared diagonal.

    Each face is listed as a cycle of vertex ids, counter-clockwise starting
    from its left corner.
    """
    faces = []
    at = g.vertex_at
    edge = g.edge_between
    spec = g.spec
    seen_hex: set[tuple[int, ...]] = set()
    for v in g.vertices:
        if v.virtual:
            continue
        # v is the left corner of a diamond centred at (X + 1, row)
        X, Y = v.X, v.row
        L, R = v.id, at(X + 2, Y)
        B, T = at(X + 1, Y - 1), at(X + 1, Y + 1)
        if R is None or T is None:
            continue
        if B is not None and not g.vertices[B].virtual:
            if all(edge(p, q) is not None for p, q in ((L, B), (B, R), (R, T), (T, L))):
                faces.append((L, B, R, T))
                continue
        # hexagon: black middle row sitting on a hexagon row, B-R diagonal absent
        if Y % 2 == 0 and spec.a(Y // 2) == 1:
            P = at(X + 3, Y - 1)
            Q = at(X + 2, Y - 2)
            if None in (B, P, Q) or g.vertices[B].virtual or g.vertices[P].virtual:
                continue
            cyc = (L, B, Q, P, R, T)
            if all(edge(cyc[i], cyc[(i + 1) % 6]) is not None for i in range(6)):
                key = tuple(sorted(cyc))
                if key not in seen_hex:
                    seen_hex.add(key)
                    faces.append(cyc)
    return faces


def row_to_chain_index(k: int, N: int) -> tuple[str, int]:
    """Chain element read off row ``k``: ``("mu", j)`` or ``("nu", j)``.

    Row ``2i - 1`` carries ``mu^(N - i + 1)``, row ``2i`` carries
    ``nu^(N - i + 1)``.
    """
    if not 1 <= k <= 2 * N + 1:
        raise ValidationError(f"row {k} outside 1..{2 * N + 1}")
    i = (k + 1) // 2
    return ("mu" if k % 2 else "nu", N - i + 1)


def chain_position(k: int) -> int:
    """Index of row ``k`` in a chain listed top-down from ``mu^(N)``."""
    return k - 1
