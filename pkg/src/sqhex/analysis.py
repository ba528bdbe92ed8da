"""Statistics of sampled matchings: heights, row measures, moments and corner fluctuations."""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .errors import SqhexError, ValidationError
from .lattice import Graph, LatticeSpec, row_extents
from .limitshape import BoundaryMeasureSpec, limit_height, moments
from .signatures import Signature, signature_to_maya

# ---------------------------------------------------------------------------
# height function


def row_lengths(spec: LatticeSpec) -> list[int]:
    """Number of cells (virtual ones included) in rows ``1 .. 2N + 1``; index 0 unused."""
    return [0] + [(hi - lo) // 2 + 1 for lo, hi in row_extents(spec)[1 : 2 * spec.N + 2]]


def row_heights(lam: Sequence[int], k: int, length: int) -> np.ndarray:
    """Heights at the ``length + 1`` cuts of row ``k``.

    Cut ``c`` sits left of cell ``c``; the value is ``k - 1`` at the left end
    and moves by ``+2`` over a particle and ``-2`` over a hole.
    """
    cells = np.array(signature_to_maya(lam, length - len(lam)).cells, dtype=int)
    steps = 4 * cells - 2
    return (k - 1) + np.concatenate([[0], np.cumsum(steps)])


@dataclass
class HeightField:
    """Integer heights at the cuts ``(row, c)`` of every row."""

    rows: list[np.ndarray]  # rows[k][c], index 0 unused
    N: int

    def at(self, k: int, c: int) -> int:
        return int(self.rows[k][c])

    def rescaled(self, chi: float, kappa: float) -> float:
        """``h / N`` at the cut nearest to ``(chi N, kappa N)`` on an odd row."""
        k = 2 * int(math.floor(kappa * self.N)) + 1
        c = int(math.floor(chi * self.N))
        r = self.rows[k]
        c = min(max(c, 0), len(r) - 1)
        return float(r[c]) / self.N


def height_from_chain(chain: Sequence[Sequence[int]], spec: LatticeSpec) -> HeightField:
    lengths = row_lengths(spec)
    rows: list[np.ndarray] = [np.zeros(0, dtype=int)]
    for k in range(1, 2 * spec.N + 2):
        rows.append(row_heights(chain[k - 1], k, lengths[k]))
    return HeightField(rows, spec.N)


def _square_cells(g: Graph) -> list[tuple[tuple[int, int, int, int], tuple[int, int]]]:
    """Unit squares of the square-lattice embedding with the row cut each one contains.

    A hexagon ``(L, B, Q, P, R, T)`` is the union of the squares ``(L, B, R, T)``
    and ``(B, Q, P, R)``, glued along the removed diagonal ``B R``.
    """
    pos = {vid: (k, c) for k in range(1, g.num_rows + 1) for c, vid in enumerate(g.rows[k])}
    out = []
    for face in g.faces:
        if len(face) == 4:
            out.append((face, pos[face[2]]))
        else:
            L, B, Q, P, R, T = face
            out.append(((L, B, R, T), pos[R]))
            out.append(((B, Q, P, R), pos[P]))
    return out


def local_heights(g: Graph, matching: Iterable[int]) -> dict[tuple[int, int], float]:
    """Heights at the row cuts inside bounded faces, from the local crossing rule.

    Every edge of the square-lattice embedding carries the reference flow
    ``1/4``; the diagonals removed inside hexagons count as edges that are
    never matched.  Crossing an edge with its black end on the left adds
    ``4 (1_M(e) - 1/4)``.  The first square gets height 0.
    """
    cells = _square_cells(g)
    if not cells:
        return {}
    chosen = {frozenset((g.edges[e].white, g.edges[e].black)) for e in matching}
    by_pair: dict[frozenset, list[int]] = {}
    for ci, (cyc, _) in enumerate(cells):
        for i in range(4):
            by_pair.setdefault(frozenset((cyc[i], cyc[(i + 1) % 4])), []).append(ci)
    pts = {v.id: np.array([v.X, v.row], dtype=float) for v in g.vertices}
    centres = [np.mean([pts[v] for v in cyc], axis=0) for cyc, _ in cells]
    h = {0: 0.0}
    queue = deque([0])
    while queue:
        ci = queue.popleft()
        cyc = cells[ci][0]
        for i in range(4):
            u, v = cyc[i], cyc[(i + 1) % 4]
            pair = frozenset((u, v))
            black = u if g.vertices[u].color == "black" else v
            step = 4 * ((pair in chosen) - 0.25)
            for cj in by_pair[pair]:
                if cj == ci:
                    continue
                d = centres[cj] - centres[ci]
                rel = pts[black] - 0.5 * (pts[u] + pts[v])
                val = h[ci] + (step if d[0] * rel[1] - d[1] * rel[0] > 0 else -step)
                if cj in h:
                    if abs(h[cj] - val) > 1e-9:
                        raise SqhexError("local height rule is inconsistent around a vertex")
                    continue
                h[cj] = val
                queue.append(cj)
    return {cells[ci][1]: val for ci, val in h.items()}


def height_field(g: Graph, matching: Iterable[int]) -> HeightField:
    """Height field of a matching, checked against the local crossing rule."""
    from .signatures import matching_to_chain

    matching = frozenset(matching)
    hf = height_from_chain(matching_to_chain(g, matching), g.spec)
    offset = None
    for (k, c), val in local_heights(g, matching).items():
        diff = hf.at(k, c) - val
        if offset is None:
            offset = diff
        elif abs(diff - offset) > 1e-9:
            raise SqhexError(f"row formula and local rule disagree at row {k}, cut {c}")
    return hf


# ---------------------------------------------------------------------------
# row measures


def counting_measure(lam: Sequence[int]) -> np.ndarray:
    """Atoms ``(lam_i + n - i) / n`` of the counting measure, each of mass ``1/n``."""
    n = len(lam)
    if n == 0:
        return np.zeros(0)
    return np.array([(lam[i] + n - 1 - i) / n for i in range(n)], dtype=float)


def row_for_kappa(kappa: float, N: int) -> int:
    """Odd row ``2 [kappa N] + 1``; it carries a signature of length ``N - [kappa N]``."""
    return 2 * int(math.floor(kappa * N)) + 1


def empirical_row_measure(chain: Sequence[Sequence[int]], k: int) -> np.ndarray:
    return counting_measure(chain[k - 1])


def row_moment(chain: Sequence[Sequence[int]], k: int, j: int) -> float:
    atoms = empirical_row_measure(chain, k)
    return float(np.mean(atoms**j))


@dataclass
class MomentReport:
    kappa: float
    j: int
    theory: float
    empirical: float
    stderr: float

    @property
    def rel_error(self) -> float:
        return abs(self.empirical - self.theory) / abs(self.theory)


def moment_comparison(
    chains: Sequence[Sequence[Signature]],
    N: int,
    bspec: BoundaryMeasureSpec,
    weights,
    kappas: Sequence[float],
    js: Sequence[int] = (1, 2),
) -> list[MomentReport]:
    out = []
    for kappa in kappas:
        k = row_for_kappa(kappa, N)
        for j in js:
            vals = np.array([row_moment(ch, k, j) for ch in chains])
            se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan
            out.append(MomentReport(kappa, j, moments(kappa, j, bspec, weights), float(vals.mean()), se))
    return out


# ---------------------------------------------------------------------------
# law of large numbers for the height


@dataclass
class HeightLLNReport:
    grid: list[tuple[float, float]]
    theory: np.ndarray
    empirical: np.ndarray  # samples x grid points
    sup_errors: np.ndarray = field(init=False)
    l1_errors: np.ndarray = field(init=False)
    mean_sup: float = field(init=False)

    def __post_init__(self) -> None:
        err = np.abs(self.empirical - self.theory[None, :])
        self.sup_errors = err.max(axis=1)
        self.l1_errors = err.mean(axis=1)
        # sup error of the sample-averaged field
        self.mean_sup = float(np.max(np.abs(self.empirical.mean(axis=0) - self.theory)))


def interior_grid(
    bspec: BoundaryMeasureSpec,
    weights,
    rows: int = 9,
    cols: int = 9,
    margin: float = 0.05,
    N: int | None = None,
) -> list[tuple[float, float]]:
    """Points strictly inside the rescaled trapezoid ``0 < chi < b_max - (r/n) kappa``.

    With ``N`` given, each point is moved down to the lattice ``(Z / N)^2`` so
    that ``[chi N]`` and ``[kappa N]`` carry no rounding.
    """
    slope = weights.r / weights.n
    pts = []
    for kappa in np.linspace(margin, 1 - margin, rows):
        right = max(bspec.b) - slope * kappa
        for chi in np.linspace(margin, right - margin, cols):
            c, k = float(chi), float(kappa)
            if N is not None:
                c, k = math.floor(c * N) / N, math.floor(k * N) / N
            if 0 < c < max(bspec.b) - slope * k:
                pts.append((c, k))
    return pts


def height_lln_test(
    chains: Sequence[Sequence[Signature]],
    spec: LatticeSpec,
    bspec: BoundaryMeasureSpec,
    weights,
    grid: Sequence[tuple[float, float]] | None = None,
) -> HeightLLNReport:
    """Compare ``h([chi N], [kappa N] + 1/2) / N`` with the limit height on a grid."""
    grid = list(grid) if grid is not None else interior_grid(bspec, weights)
    theory = np.array([limit_height(c, k, bspec, weights) for c, k in grid])
    emp = np.array([[height_from_chain(ch, spec).rescaled(c, k) for c, k in grid] for ch in chains])
    return HeightLLNReport(grid, theory, emp)


# ---------------------------------------------------------------------------
# corner fluctuations


def boundary_psi(omega: Sequence[int]) -> tuple[float, float]:
    """First two moments of the boundary counting measure with each atom spread over its cell.

    An atom at ``p / N`` becomes the uniform law on ``[p / N, (p + 1) / N]``,
    which is the finite-``N`` version of a density-one measure.
    """
    N = len(omega)
    p = np.array([omega[i] + N - 1 - i for i in range(N)], dtype=float)
    psi1 = float(np.mean((p + 0.5) / N))
    psi2 = float(np.mean(((p + 1) ** 3 - p**3) / (3 * N**2)))
    return psi1, psi2


def corner_constants(psi1: float, psi2: float, weights) -> tuple[float, float]:
    """Centering ``A`` and variance constant ``B`` of the corner fluctuations."""
    ys = list(weights.y.values())
    n = weights.n
    A = psi1 - 0.5 + sum(y / (1 + y) for y in ys) / n
    B = psi2 - psi1**2 - 1.0 / 12 + sum(y / (1 + y) ** 2 for y in ys) / n
    return A, B


def corner_positions(chain: Sequence[Signature], k: int, N: int) -> np.ndarray:
    """``b_{kl} = lam_l + k - l`` for the length-``k`` signature ``mu^(k)``."""
    lam = chain[2 * (N - k)]
    if len(lam) != k:
        raise ValidationError(f"chain level {k} has length {len(lam)}")
    return np.array([lam[l] + k - 1 - l for l in range(k)], dtype=float)


def rescale_corners(b: np.ndarray, N: int, A: float, B: float, scale: str = "sqrtB") -> np.ndarray:
    """``(b / sqrt(N) - sqrt(N) A) / sqrt(B)``; ``scale="B"`` divides by ``B`` instead."""
    if B <= 0:
        raise ValidationError(f"variance constant B = {B} is not positive")
    centred = b / math.sqrt(N) - math.sqrt(N) * A
    return centred / (math.sqrt(B) if scale == "sqrtB" else B)


def gue_spacing_cdf(s: np.ndarray) -> np.ndarray:
    """CDF of ``e_1 - e_2`` for the 2x2 ensemble with weight ``(e_1 - e_2)^2 exp(-(e_1^2 + e_2^2) / 2)``.

    The gap has density ``s^2 exp(-s^2 / 4) / (2 sqrt(pi))`` on ``s > 0``.
    """
    s = np.maximum(np.asarray(s, dtype=float), 0.0)
    return special.erf(s / 2) - s / math.sqrt(math.pi) * np.exp(-(s**2) / 4)


def gue_spacing_pdf(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, s**2 * np.exp(-(s**2) / 4) / (2 * math.sqrt(math.pi)), 0.0)


@dataclass
class GUEReport:
    N: int
    replicas: int
    A: float
    B: float
    mean1: float
    var1: float
    ks1: float
    ks1_pvalue: float
    mean2: list[float]
    cov2: list[list[float]]
    ks_spacing: float
    ks_spacing_pvalue: float
    small_gap: dict[str, dict[str, float]]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def gue_corner_test(
    chains: Sequence[Sequence[Signature]],
    N: int,
    omega: Sequence[int],
    weights,
    thresholds: Sequence[float] = (0.1, 0.5),
    scale: str = "sqrtB",
) -> GUEReport:
    """Levels one and two against the Gaussian unitary ensembles with weight ``exp(-Tr P^2 / 2)``.

    Level one is then standard normal.  Small gaps of level two are compared
    with two independent standard normals, whose difference is ``N(0, 2)``.
    """
    if len(chains) < 10:
        raise ValidationError("need at least 10 replicas")
    psi1, psi2 = boundary_psi(omega)
    A, B = corner_constants(psi1, psi2, weights)
    lvl1 = np.array([rescale_corners(corner_positions(c, 1, N), N, A, B, scale)[0] for c in chains])
    lvl2 = np.array([rescale_corners(corner_positions(c, 2, N), N, A, B, scale) for c in chains])
    ks1 = stats.kstest(lvl1, stats.norm().cdf)
    gaps = lvl2[:, 0] - lvl2[:, 1]
    ks2 = stats.kstest(gaps, gue_spacing_cdf)
    small = {}
    R = len(chains)
    for s0 in thresholds:
        emp = float(np.mean(np.abs(gaps) < s0))
        indep = float(special.erf(s0 / 2))
        sigma = math.sqrt(indep * (1 - indep) / R)
        small[f"{s0:g}"] = {
            "empirical": emp,
            "independent": indep,
            "gue": float(gue_spacing_cdf(np.array([s0]))[0]),
            "z": (indep - emp) / sigma if sigma > 0 else math.inf,
        }
    return GUEReport(
        N=N,
        replicas=R,
        A=A,
        B=B,
        mean1=float(lvl1.mean()),
        var1=float(lvl1.var(ddof=1)),
        ks1=float(ks1.statistic),
        ks1_pvalue=float(ks1.pvalue),
        mean2=[float(v) for v in lvl2.mean(axis=0)],
        cov2=np.cov(lvl2.T).tolist(),
        ks_spacing=float(ks2.statistic),
        ks_spacing_pvalue=float(ks2.pvalue),
        small_gap=small,
    )


# ---------------------------------------------------------------------------
# free energy


def free_energy_sequence(weights, M: int, Ns: Sequence[int], a_pattern: Sequence[int]) -> list[tuple[int, float]]:
    """``(N, log Z_N / N^2)`` for staircase boundary rows."""
    from .schur import log_partition_function_staircase

    out = []
    for N in Ns:
        spec = LatticeSpec.staircase(N, M, a_pattern, weights)
        out.append((N, log_partition_function_staircase(spec, M) / N**2))
    return out
