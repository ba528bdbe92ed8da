"""Exact sampling of signature chains, one transition at a time.

A transition ``nu -> lam`` of the chain has probability proportional to a
product ``det[f_k(b_j)] det[g_i(b_j)]`` in the shifted coordinates
``b_j = lam_j - j``: the first factor is the Schur polynomial of the new
signature (times a geometric weight) and the second is the strip
constraint.  Such a measure is a determinantal point process on the candidate
positions, with kernel ``F (G^T F)^{-1} G^T`` for any bases ``F``, ``G`` of the
two function spaces.  The kernel is only defined up to conjugation by a
diagonal matrix, and a naive polynomial basis puts it in a gauge with
exponentially large entries; see :func:`transition_kernel` for the
well-conditioned choice.  The configuration is then drawn site by site.

Cost per transition is ``O(S^3)`` in the number ``S`` of candidate positions,
so a whole chain costs ``O(N^4)``, against ``O(V^3) = O(N^6)`` for conditioning
a Kasteleyn matrix.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .errors import NumericalError
from .lattice import LatticeSpec
from .rng import replica_rng
from .signatures import Signature

# tolerance on conditional inclusion probabilities before they count as invalid
PROB_TOL = 1e-6
# inclusion probabilities this close to 0 or 1 are snapped
SNAP = 1e-12


def _orthonormal_polynomials(sites: np.ndarray, d: int) -> np.ndarray:
    """Columns spanning polynomials of degree ``< d`` restricted to ``sites``.

    Stieltjes/Lanczos recurrence on the multiplication operator with full
    reorthogonalisation, which avoids the monomial Vandermonde matrix.
    """
    S = len(sites)
    Q = np.zeros((S, d))
    if d == 0:
        return Q
    lo, hi = float(sites.min()), float(sites.max())
    t = (sites - 0.5 * (lo + hi)) / max(0.5 * (hi - lo), 1.0)
    v = np.full(S, 1.0 / math.sqrt(S))
    Q[:, 0] = v
    for k in range(1, d):
        w = t * Q[:, k - 1]
        for _ in range(2):
            w -= Q[:, :k] @ (Q[:, :k].T @ w)
        nrm = np.linalg.norm(w)
        if nrm < 1e-13:
            raise NumericalError("polynomial space collapsed; too few candidate sites")
        Q[:, k] = w / nrm
    return Q


def _function_space(sites: np.ndarray, ratios: Sequence[tuple[float, int]]) -> np.ndarray:
    """Orthonormal basis of ``span{rho^x x^k : k < mult}`` over the given ratios."""
    blocks = []
    for rho, mult in ratios:
        P = _orthonormal_polynomials(sites, mult)
        if rho != 1.0:
            ref = sites.max() if rho > 1 else sites.min()
            P = P * np.exp((sites - ref) * math.log(rho))[:, None]
        blocks.append(P)
    F = np.hstack(blocks)
    if len(ratios) == 1 and ratios[0][0] == 1.0:
        return F
    Q, R = np.linalg.qr(F)
    if np.min(np.abs(np.diag(R))) < 1e-13 * np.max(np.abs(np.diag(R))):
        raise NumericalError("weight function space is numerically degenerate")
    return Q


def _ratio_multiplicities(values: Sequence[float], scale: float) -> list[tuple[float, int]]:
    counts: dict[float, int] = {}
    for v in values:
        r = v / scale
        counts[r] = counts.get(r, 0) + 1
    return sorted(counts.items())


def _gauge_weights(sites: np.ndarray, nodes: np.ndarray, log_q: float) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log-modulus of ``q^x prod_i (x - e_i)`` on the sites."""
    diff = sites[:, None] - nodes[None, :]
    return np.sign(diff).prod(axis=1), np.log(np.abs(diff)).sum(axis=1) + sites * log_q


def _range_matrix(sites: np.ndarray, ranges: Sequence[Sequence[int]], logw: np.ndarray) -> np.ndarray:
    """Columns ``w(x) 1_{R_i}(x)``, each scaled to unit maximum."""
    index = {int(s): j for j, s in enumerate(sites)}
    G = np.zeros((len(sites), len(ranges)))
    for i, rg in enumerate(ranges):
        rows = [index[int(s)] for s in rg]
        lw = logw[rows]
        G[rows, i] = np.exp(lw - lw.max())
    return G


def transition_kernel(
    sites: np.ndarray,
    ratios: Sequence[tuple[float, int]],
    ranges: Sequence[Sequence[int]],
    nodes: Sequence[float] | None = None,
) -> np.ndarray:
    """Kernel on ``sites`` of the process with one particle per constraint range.

    ``ranges[i]`` lists the positions allowed by the ``i``-th strip constraint.
    When a single ratio ``q`` is present the first space is ``q^x`` times
    polynomials of degree ``< len(ranges)``; dividing by ``q^x prod(x - e_i)``
    over half-integer ``nodes`` (one more node than ranges when the space must
    lose a degree) turns it into Cauchy functions ``1 / (x - e_i)`` and gives a
    kernel with entries of order one.  Other weights fall back on an
    orthonormal basis, which is only accurate for short rows.
    """
    sites = np.asarray(sites, dtype=float)
    d = len(ranges)
    if len(ratios) == 1 and nodes is not None:
        q = ratios[0][0]
        e = np.asarray(nodes, dtype=float)
        sign, logw = _gauge_weights(sites, e, math.log(q))
        F = sign[:, None] / (sites[:, None] - e[None, :])
        if len(e) == d + 1:
            basis = np.linalg.svd(np.ones((1, d + 1)))[2][1:].T
            F = F @ basis
        elif len(e) != d:
            raise ValueError("need len(ranges) or len(ranges) + 1 nodes")
        F, _ = np.linalg.qr(F)
        G = _range_matrix(sites, ranges, logw)
    else:
        F = _function_space(sites, ratios)
        G = _range_matrix(sites, ranges, np.zeros(len(sites)))
        if any((G > 0).sum(axis=1) > 1):
            G, _ = np.linalg.qr(G)
        else:
            G /= np.linalg.norm(G, axis=0)[None, :]
    A = G.T @ F
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e8:
        raise NumericalError(f"transition kernel is ill-conditioned (cond {cond:.3g})")
    return F @ np.linalg.solve(A, G.T)


def sample_dpp(K: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw from the determinantal process with kernel ``K``, deciding sites in order."""
    K = np.array(K, dtype=float, copy=True)
    S = K.shape[0]
    u = rng.random(S)
    chosen = np.zeros(S, dtype=bool)
    for i in range(S):
        p = K[i, i]
        if p < -PROB_TOL or p > 1 + PROB_TOL:
            raise NumericalError(f"conditional inclusion probability {p:.3g} outside [0, 1]")
        p = min(max(p, 0.0), 1.0)
        if p < SNAP:
            p = 0.0
        elif p > 1 - SNAP:
            p = 1.0
        take = u[i] < p
        chosen[i] = take
        if i + 1 == S or p == 0.0 or p == 1.0:
            # a certain outcome leaves the remaining correlations unchanged
            continue
        denom = K[i, i] if take else K[i, i] - 1.0
        K[i + 1 :, i + 1 :] -= np.outer(K[i + 1 :, i], K[i, i + 1 :]) / denom
    return chosen


def _pr_setup(nu: Sequence[int], beta: Sequence[float]):
    n = len(nu)
    a = [nu[j] - (j + 1) for j in range(n)]
    sites = np.arange(a[-1] + 1, a[0] + 1)
    ranges = [range(a[j + 1] + 1, a[j] + 1) for j in range(n - 1)]
    ratios = _ratio_multiplicities(beta[1:], beta[0])
    nodes = [v + 0.5 for v in a]
    return sites, ranges, ratios, nodes


def _st_setup(mu: Sequence[int], beta: Sequence[float]):
    n = len(mu)
    a = [mu[j] - (j + 1) for j in range(n)]
    sites = np.array(sorted({v for j in range(n) for v in (a[j], a[j] + 1)}))
    ranges = [(a[j], a[j] + 1) for j in range(n)]
    ratios = _ratio_multiplicities(beta, 1.0)
    nodes = [v + 0.5 for v in a]
    return sites, ranges, ratios, nodes


def _positions_to_signature(positions: np.ndarray) -> Signature:
    b = sorted((int(p) for p in positions), reverse=True)
    return tuple(v + j + 1 for j, v in enumerate(b))


def pr_kernel(nu: Sequence[int], beta: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    sites, ranges, ratios, nodes = _pr_setup(nu, beta)
    return sites, transition_kernel(sites, ratios, ranges, nodes)


def st_kernel(mu: Sequence[int], beta: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    sites, ranges, ratios, nodes = _st_setup(mu, beta)
    return sites, transition_kernel(sites, ratios, ranges, nodes)


def sample_pr(nu: Sequence[int], beta: Sequence[float], rng: np.random.Generator) -> Signature:
    """Draw ``lam < nu`` with probability proportional to ``beta_1^{-|lam|} s_lam(beta_2, ...)``."""
    n = len(nu)
    if n == 1:
        return ()
    sites, K = pr_kernel(nu, beta)
    if len(sites) == n - 1:
        return tuple(nu[1:])
    pick = sites[sample_dpp(K, rng)]
    lam = _positions_to_signature(pick)
    if len(lam) != n - 1 or any(not (nu[j + 1] <= lam[j] <= nu[j]) for j in range(n - 1)):
        raise NumericalError(f"transition draw {lam} does not interlace {tuple(nu)}")
    return lam


def sample_st(mu: Sequence[int], beta: Sequence[float], rng: np.random.Generator) -> Signature:
    """Draw ``lam`` with ``mu <' lam`` with probability proportional to ``s_lam(beta)``."""
    sites, K = st_kernel(mu, beta)
    pick = sites[sample_dpp(K, rng)]
    lam = _positions_to_signature(pick)
    if len(lam) != len(mu) or any(not (0 <= l - m <= 1) for l, m in zip(lam, mu)):
        raise NumericalError(f"transition draw {lam} is not a vertical strip over {tuple(mu)}")
    return lam


def sample_chain(spec: LatticeSpec, rng: np.random.Generator) -> list[Signature]:
    """Top-down chain ``mu^(N), nu^(N), mu^(N-1), ..., mu^(0)`` of a random matching."""
    N = spec.N
    w = spec.weights
    xs = [w.x_at(t) for t in range(1, N + 1)]
    mu: Signature = spec.omega
    chain = [mu]
    for i in range(1, N + 1):
        C = xs[i - 1 :]
        if spec.a(i) == 0:
            y = w.y_at(i)
            nu = sample_st(mu, [y * c for c in C], rng)
        else:
            nu = mu
        mu = sample_pr(nu, C, rng)
        chain.extend([nu, mu])
    return chain


def sample_chains(spec: LatticeSpec, count: int, seed: int, first_replica: int = 0) -> list[list[Signature]]:
    return [sample_chain(spec, replica_rng(seed, first_replica + r)) for r in range(count)]
