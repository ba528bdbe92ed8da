"""Kasteleyn matrix, partition function, brute-force enumeration and exact sampling."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import KasteleynSignError, NoPerfectMatchingError, ValidationError
from .lattice import NW_SE, VERTICAL, Graph
from .rng import replica_rng

# probabilities within this distance of 0 or 1 are snapped
PROB_CLAMP = 1e-9
# refresh the conditioned inverse from scratch after this many rank-one updates
REFACTOR_EVERY = 64


def default_signs(g: Graph) -> dict[int, int]:
    """-1 on NW-SE diagonals (hexagon verticals included) whose lower end is white.

    Every diamond then has sign product -1, and a hexagon, being two diamonds
    glued along a missing edge, gets +1.
    """
    signs = {}
    for e in g.edges:
        low_white = g.vertices[e.lower].color == "white"
        signs[e.id] = -1 if e.direction in (NW_SE, VERTICAL) and low_white else 1
    return signs


@dataclass
class KasteleynMatrix:
    graph: Graph
    matrix: np.ndarray  # rows indexed by whites, columns by blacks
    white_index: dict[int, int]
    black_index: dict[int, int]
    signs: dict[int, int] = field(repr=False)

    @property
    def whites(self) -> list[int]:
        return list(self.white_index)

    @property
    def blacks(self) -> list[int]:
        return list(self.black_index)


def check_face_signs(g: Graph, signs: dict[int, int]) -> None:
    for face in g.faces:
        prod = 1
        for i in range(len(face)):
            eid = g.edge_between(face[i], face[(i + 1) % len(face)])
            if eid is None:
                raise KasteleynSignError(f"face {face} is not a cycle of the graph")
            prod *= signs[eid]
        want = -1 if (len(face) // 2) % 2 == 0 else 1
        if prod != want:
            raise KasteleynSignError(f"face {face} of degree {len(face)} has sign product {prod}")


def build_kasteleyn(g: Graph, signs: dict[int, int] | None = None) -> KasteleynMatrix:
    signs = default_signs(g) if signs is None else dict(signs)
    check_face_signs(g, signs)
    whites, blacks = g.whites, g.blacks
    if len(whites) != len(blacks):
        raise NoPerfectMatchingError(f"{len(whites)} white vs {len(blacks)} black vertices")
    wi = {w: i for i, w in enumerate(whites)}
    bi = {b: i for i, b in enumerate(blacks)}
    K = np.zeros((len(whites), len(blacks)))
    for e in g.edges:
        K[wi[e.white], bi[e.black]] = signs[e.id] * e.weight
    return KasteleynMatrix(g, K, wi, bi, signs)


def log_partition_function_kasteleyn(k: KasteleynMatrix) -> float:
    sign, logdet = np.linalg.slogdet(k.matrix)
    if sign == 0 or not np.isfinite(logdet):
        raise NoPerfectMatchingError("Kasteleyn matrix is singular")
    return float(logdet)


def partition_function_kasteleyn(k: KasteleynMatrix) -> float:
    return float(np.exp(log_partition_function_kasteleyn(k)))


def matching_weight(g: Graph, matching) -> float:
    w = 1.0
    for eid in matching:
        w *= g.edges[eid].weight
    return w


def _white_options(g: Graph) -> tuple[list[int], list[list[tuple[int, int]]]]:
    whites = g.whites
    opts = []
    for w in whites:
        opts.append([(e, g.edges[e].black) for e in g.incident[w]])
    return whites, opts


def count_matchings(g: Graph) -> int:
    whites, opts = _white_options(g)
    if len(whites) != len(g.blacks):
        return 0
    bit = {b: 1 << i for i, b in enumerate(g.blacks)}

    @lru_cache(maxsize=None)
    def count(i: int, used: int) -> int:
        if i == len(whites):
            return 1
        total = 0
        for _, b in opts[i]:
            if not used & bit[b]:
                total += count(i + 1, used | bit[b])
        return total

    return count(0, 0)


def enumerate_matchings(g: Graph, cap: int = 10**6) -> Iterator[frozenset[int]]:
    """Every perfect matching, in lexicographic order of white choices."""
    whites, opts = _white_options(g)
    if len(whites) != len(g.blacks):
        return
    bit = {b: 1 << i for i, b in enumerate(g.blacks)}

    @lru_cache(maxsize=None)
    def count(i: int, used: int) -> int:
        if i == len(whites):
            return 1
        return sum(count(i + 1, used | bit[b]) for _, b in opts[i] if not used & bit[b])

    total = count(0, 0)
    if total > cap:
        raise ValidationError(f"graph has {total} matchings, above the cap {cap}")
    chosen: list[int] = []

    def rec(i: int, used: int) -> Iterator[frozenset[int]]:
        if i == len(whites):
            yield frozenset(chosen)
            return
        for e, b in opts[i]:
            if not used & bit[b] and count(i + 1, used | bit[b]):
                chosen.append(e)
                yield from rec(i + 1, used | bit[b])
                chosen.pop()

    yield from rec(0, 0)


class KasteleynSampler:
    """Exact sampler conditioning one white vertex at a time.

    The white vertices are processed in id order.  For the current white ``w``
    the probability of each incident edge ``(w, b)`` is ``K[w, b] Kinv[b, w]``
    in the conditioned graph; choosing it deletes both endpoints, which is a
    rank-one update of the inverse.  Conditional laws are cached by the
    prefix of choices, so repeated sampling of a small graph is cheap.
    """

    def __init__(self, k: KasteleynMatrix, cache: bool = True):
        self.k = k
        self.cache: dict[tuple[int, ...], tuple[list[int], np.ndarray]] | None = {} if cache else None
        self._whites, self._opts = _white_options(k.graph)
        if np.linalg.slogdet(k.matrix)[0] == 0:
            raise NoPerfectMatchingError("Kasteleyn matrix is singular")

    def _conditional(self, prefix: tuple[int, ...], state) -> tuple[list[int], np.ndarray]:
        if self.cache is not None and prefix in self.cache:
            return self.cache[prefix]
        Kinv, rows, cols, _ = state
        i = len(prefix)
        w = self._whites[i]
        edges, probs = [], []
        for e, b in self._opts[i]:
            if b not in cols:
                continue
            r, c = rows[w], cols[b]
            edges.append(e)
            probs.append(self.k.matrix[self.k.white_index[w], self.k.black_index[b]] * Kinv[c, r])
        p = np.asarray(probs, dtype=float)
        p[np.abs(p) < PROB_CLAMP] = 0.0
        if np.any(p < -1e-6) or abs(p.sum() - 1.0) > 1e-6:
            raise KasteleynSignError(f"conditional edge law {p} is not a probability vector")
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        out = (edges, p)
        if self.cache is not None:
            self.cache[prefix] = out
        return out

    def _fresh_state(self, removed_w: list[int], removed_b: list[int]):
        kw = [w for w in self._whites if w not in set(removed_w)]
        kb = [b for b in self.k.blacks if b not in set(removed_b)]
        sub = self.k.matrix[np.ix_([self.k.white_index[w] for w in kw], [self.k.black_index[b] for b in kb])]
        Kinv = sla.inv(sub)  # rows: blacks, columns: whites
        return [Kinv, {w: i for i, w in enumerate(kw)}, {b: i for i, b in enumerate(kb)}, 0]

    def sample(self, rng: np.random.Generator) -> frozenset[int]:
        g = self.k.graph
        prefix: list[int] = []
        state = None
        used_w: list[int] = []
        used_b: list[int] = []
        for i, w in enumerate(self._whites):
            key = tuple(prefix)
            if self.cache is None or key not in self.cache:
                if state is None:
                    state = self._fresh_state(used_w, used_b)
            edges, p = self._conditional(key, state)
            j = int(rng.choice(len(edges), p=p)) if len(edges) > 1 else 0
            e = edges[j]
            b = g.edges[e].black
            prefix.append(j)
            used_w.append(w)
            used_b.append(b)
            if state is not None:
                state = self._condition(state, w, b, used_w, used_b)
        return frozenset(self._decode(prefix))

    def _decode(self, prefix: list[int]) -> list[int]:
        out = []
        used: set[int] = set()
        for i, j in enumerate(prefix):
            avail = [(e, b) for e, b in self._opts[i] if b not in used]
            e, b = avail[j]
            used.add(b)
            out.append(e)
        return out

    def _condition(self, state, w: int, b: int, used_w: list[int], used_b: list[int]):
        Kinv, rows, cols, n_updates = state
        if n_updates + 1 >= REFACTOR_EVERY or len(rows) <= 1:
            return self._fresh_state(used_w, used_b) if len(rows) > 1 else None
        r, c = rows[w], cols[b]
        # inverse of K with row w and column b deleted
        upd = Kinv - np.outer(Kinv[:, r], Kinv[c, :]) / Kinv[c, r]
        keep_c = [i for i in range(Kinv.shape[0]) if i != c]
        keep_r = [i for i in range(Kinv.shape[1]) if i != r]
        Kinv = upd[np.ix_(keep_c, keep_r)]
        rows = {v: (i if i < r else i - 1) for v, i in rows.items() if v != w}
        cols = {v: (i if i < c else i - 1) for v, i in cols.items() if v != b}
        return [Kinv, rows, cols, n_updates + 1]


def sample_exact(k: KasteleynMatrix, seed: int, replica: int = 0) -> frozenset[int]:
    return KasteleynSampler(k, cache=False).sample(replica_rng(seed, replica))


def sample_many(k: KasteleynMatrix, count: int, seed: int) -> list[frozenset[int]]:
    sampler = KasteleynSampler(k, cache=True)
    return [sampler.sample(replica_rng(seed, i)) for i in range(count)]
