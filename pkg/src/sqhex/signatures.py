"""Signatures, interlacing, Maya diagrams and the matching/chain bijection."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

from .errors import ValidationError
from .lattice import NE_SW, Graph

Signature = tuple[int, ...]


def signature(parts: Iterable[int]) -> Signature:
    sig = tuple(int(p) for p in parts)
    if any(p < 0 for p in sig) or any(a < b for a, b in zip(sig, sig[1:])):
        raise ValidationError(f"not a non-increasing non-negative sequence: {sig}")
    return sig


def size(lam: Sequence[int]) -> int:
    return sum(lam)


def interlaces(lam: Sequence[int], nu: Sequence[int]) -> bool:
    """``lam < nu``: nu_1 >= lam_1 >= nu_2 >= ... with len(lam) in {len(nu), len(nu) - 1}."""
    n = len(nu)
    if len(lam) not in (n, n - 1):
        return False
    for i, v in enumerate(lam):
        if v > nu[i]:
            return False
        if i + 1 < n and v < nu[i + 1]:
            return False
        if v < 0:
            return False
    return True


def cointerlaces(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """``lam <' mu``: same length and ``0 <= mu_i - lam_i <= 1`` for every row."""
    if len(lam) != len(mu):
        return False
    return all(0 <= m - l <= 1 for l, m in zip(lam, mu))


@dataclass(frozen=True)
class MayaDiagram:
    """Row of particles: ``True`` is a filled cell, ``False`` an empty one."""

    cells: tuple[bool, ...]

    @property
    def particles(self) -> int:
        return sum(self.cells)

    @property
    def origin(self) -> int:
        """Cut with as many cells on its left as there are particles."""
        return self.particles

    def __str__(self) -> str:
        return "".join("■" if c else "□" for c in self.cells)


def signature_to_maya(lam: Sequence[int], m: int) -> MayaDiagram:
    """Maya diagram of length ``len(lam) + m``; the k-th particle from the left sits at ``lam_{n-k} + k``."""
    n = len(lam)
    if n and (lam[0] > m or lam[-1] < 0):
        raise ValidationError(f"signature {tuple(lam)} does not fit in {m} empty cells")
    cells = [False] * (n + m)
    for k in range(n):
        cells[lam[n - 1 - k] + k] = True
    return MayaDiagram(tuple(cells))


def maya_to_signature(d: MayaDiagram) -> Signature:
    pos = [i for i, c in enumerate(d.cells) if c]
    n = len(pos)
    return tuple(pos[n - 1 - j] - (n - 1 - j) for j in range(n))


def interlacing_range(nu: Sequence[int]) -> Iterator[Signature]:
    """All ``lam`` of length ``len(nu) - 1`` with ``lam < nu``."""
    n = len(nu)

    def rec(i: int, acc: list[int]) -> Iterator[Signature]:
        if i == n - 1:
            yield tuple(acc)
            return
        for v in range(nu[i + 1], nu[i] + 1):
            acc.append(v)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


def vertical_strip_range(mu: Sequence[int]) -> Iterator[Signature]:
    """All ``lam`` with ``mu <' lam``."""
    n = len(mu)

    def rec(i: int, acc: list[int]) -> Iterator[Signature]:
        if i == n:
            yield tuple(acc)
            return
        for d in (0, 1):
            v = mu[i] + d
            if i and v > acc[-1]:
                continue
            acc.append(v)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


def is_v_vertex(g: Graph, vid: int, matched_edge: int) -> bool:
    """V-vertices are odd-row vertices matched upward and even-row vertices matched downward."""
    e = g.edges[matched_edge]
    v = g.vertices[vid]
    return (v.row % 2 == 1) == (e.lower == vid)


def row_maya(g: Graph, k: int, partner: dict[int, int]) -> MayaDiagram:
    """Maya diagram of row ``k`` under a matching given as vertex -> edge."""
    cells = []
    for vid in g.rows[k]:
        v = g.vertices[vid]
        if v.virtual:
            cells.append(False)
            continue
        cells.append(is_v_vertex(g, vid, partner[vid]))
    return MayaDiagram(tuple(cells))


def matching_to_chain(g: Graph, matching: Iterable[int]) -> list[Signature]:
    """Signatures of rows ``1 .. 2N + 1`` listed top-down from ``mu^(N)`` to ``mu^(0)``."""
    partner: dict[int, int] = {}
    for eid in matching:
        e = g.edges[eid]
        for vid in (e.white, e.black):
            if vid in partner:
                raise ValidationError(f"vertex {vid} matched twice")
            partner[vid] = eid
    missing = [v.id for v in g.real_vertices if v.id not in partner]
    if missing:
        raise ValidationError(f"{len(missing)} vertices left unmatched")
    return [maya_to_signature(row_maya(g, k, partner)) for k in range(1, g.num_rows + 1)]


def chain_to_matching(g: Graph, chain: Sequence[Sequence[int]]) -> frozenset[int]:
    """Inverse of :func:`matching_to_chain`."""
    if len(chain) != g.num_rows:
        raise ValidationError(f"chain has {len(chain)} rows, graph has {g.num_rows}")
    status = []
    for k in range(1, g.num_rows + 1):
        ids = g.rows[k]
        lam = chain[k - 1]
        m = len(ids) - len(lam)
        if m < 0:
            raise ValidationError(f"row {k} cannot hold {len(lam)} particles")
        d = signature_to_maya(lam, m)
        for vid, c in zip(ids, d.cells):
            if g.vertices[vid].virtual and c:
                raise ValidationError(f"row {k} puts a particle on a missing boundary vertex")
        status.append(d.cells)
    edges = []
    for k in range(1, g.num_rows):
        lower_ids, upper_ids = g.rows[k], g.rows[k + 1]
        # odd -> even rows are joined by V-vertices, even -> odd rows by the rest
        want = k % 2 == 1
        lo = [v for v, c in zip(lower_ids, status[k - 1]) if c == want and not g.vertices[v].virtual]
        up = [v for v, c in zip(upper_ids, status[k]) if c == want]
        if len(lo) != len(up):
            raise ValidationError(f"rows {k} and {k + 1} do not pair up")
        for u, v in zip(lo, up):
            eid = g.edge_between(u, v)
            if eid is None:
                raise ValidationError(f"rows {k} and {k + 1}: vertices {u} and {v} are not adjacent")
            edges.append(eid)
    return frozenset(edges)


def chain_is_valid(chain: Sequence[Sequence[int]], a_of, N: int) -> bool:
    """Check the interlacing pattern of a top-down chain ``mu^(N), nu^(N), mu^(N-1), ...``."""
    for i in range(1, N + 1):
        mu, nu, below = chain[2 * i - 2], chain[2 * i - 1], chain[2 * i]
        if a_of(i) == 0:
            if not cointerlaces(mu, nu):
                return False
        elif tuple(nu) != tuple(mu):
            return False
        if len(below) != len(nu) - 1 or not interlaces(below, nu):
            return False
    return True


def ne_sw_by_gap(g: Graph, matching: Iterable[int]) -> dict[int, int]:
    """Number of NE-SW dimers between rows ``k`` and ``k + 1``, keyed by ``k``."""
    out = {k: 0 for k in range(1, g.num_rows)}
    for eid in matching:
        e = g.edges[eid]
        if e.direction == NE_SW:
            out[g.vertices[e.lower].row] += 1
    return out


def expected_ne_sw_by_gap(chain: Sequence[Sequence[int]]) -> dict[int, int]:
    """NE-SW counts predicted by signature sizes.

    Between an even row and the odd row above, the count is the size drop;
    between an odd row and the even row above it is the size gain (zero when
    the two rows carry the same signature).
    """
    sz = [size(lam) for lam in chain]
    return {k: (sz[k - 1] - sz[k]) if k % 2 == 0 else (sz[k] - sz[k - 1]) for k in range(1, len(sz))}


def signed_ne_sw_total(by_gap: dict[int, int]) -> int:
    """Even-gap NE-SW count minus odd-gap NE-SW count; telescopes to ``|omega|``."""
    return sum(v if k % 2 == 0 else -v for k, v in by_gap.items())
