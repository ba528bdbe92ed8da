"""Schur polynomials, transition weights and the closed-form partition function."""

from __future__ import annotations

import math
from functools import lru_cache
from collections.abc import Sequence
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import ValidationError
from .lattice import LatticeSpec, PeriodicWeights
from .signatures import cointerlaces, interlaces, interlacing_range

Number = Union[float, complex, Fraction]

# relative gap below which two variables count as repeated for the bialternant
REPEAT_TOL = 1e-6
# the pattern sum is preferred while s_lam(1, ..., 1) stays below this
BRANCHING_MAX_PATTERNS = 20000


def _padded(lam: Sequence[int], n: int) -> list[int] | None:
    lam = [int(v) for v in lam]
    if any(v != 0 for v in lam[n:]):
        return None
    return lam[:n] + [0] * max(0, n - len(lam))


def complete_homogeneous(u: Sequence[Number], kmax: int) -> list:
    """``h_0 .. h_kmax`` of the variables ``u`` via ``h_k(u_1..u_i) = h_k(..u_{i-1}) + u_i h_{k-1}(..u_i)``."""
    one = u[0] ** 0 if len(u) else 1
    h = [one] + [0 * one] * kmax
    for x in u:
        for k in range(1, kmax + 1):
            h[k] = h[k] + x * h[k - 1]
    return h


def _det_exact(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def _hmax(lam: Sequence[int]) -> int:
    return (max(lam) + len(lam)) if len(lam) else 0


def _jacobi_trudi_matrix(lam: list[int], h: list) -> list[list]:
    lam = [v for v in lam if v > 0]
    ell = len(lam)
    zero = h[0] * 0
    return [
        [h[lam[i] - i + j] if lam[i] - i + j >= 0 else zero for j in range(ell)] for i in range(ell)
    ]


def _log_dimension(lam: Sequence[int]) -> float:
    """``log s_lam(1, ..., 1)`` by the Weyl product over pairs of parts."""
    n = len(lam)
    out = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            out += math.log(lam[i] - lam[j] + j - i) - math.log(j - i)
    return out


@lru_cache(maxsize=1 << 16)
def _branching(lam: tuple[int, ...], u: tuple) -> Number:
    """Sum over Gelfand-Tsetlin patterns, peeling off the last variable.

    Every term is a monomial, so for positive variables nothing cancels.
    Sub-results are cached, which makes sums of transition weights over a
    common set of variables cheap.
    """
    if not u:
        return 1
    if len(lam) == 1:
        return sum(u) ** 0 * _h1(lam[0], u)
    x = u[-1]
    size = sum(lam)
    return sum(x ** (size - sum(mu)) * _branching(mu, u[:-1]) for mu in interlacing_range(lam))


def _h1(k: int, u: tuple) -> Number:
    """``h_k`` of the variables ``u``, the Schur function of a one-row partition."""
    return complete_homogeneous(list(u), k)[k]


def schur_eval(lam: Sequence[int], u: Sequence[Number], backend: str = "auto") -> Number:
    """``s_lam(u)`` for a partition ``lam`` and variables ``u``.

    Backends: ``"bialternant"`` (distinct variables), ``"jacobi_trudi"``
    (``det h_{lam_i - i + j}``, any variables), ``"branching"`` (pattern sum,
    any variables, few patterns), ``"exact"`` (rational arithmetic) and
    ``"auto"``.  Auto takes the pattern sum when there are at most
    ``BRANCHING_MAX_PATTERNS`` patterns, the bialternant when the variables
    are separated by more than ``REPEAT_TOL`` and Jacobi-Trudi otherwise.
    """
    n = len(u)
    lam_p = _padded(lam, n)
    if lam_p is None:
        return 0
    if any(a < b for a, b in zip(lam_p, lam_p[1:])) or (lam_p and lam_p[-1] < 0):
        raise ValidationError(f"not a partition: {tuple(lam)}")
    if n == 0:
        return 1
    if backend == "exact":
        uq = [Fraction(v) for v in u]
        h = complete_homogeneous(uq, _hmax(lam_p))
        m = _jacobi_trudi_matrix(lam_p, h)
        return _det_exact(m) if m else Fraction(1)
    if backend == "auto":
        arr = np.asarray(u)
        scale = max(1.0, float(np.max(np.abs(arr))))
        diffs = np.abs(arr[:, None] - arr[None, :]) + np.eye(n) * scale
        if _log_dimension(lam_p) <= math.log(BRANCHING_MAX_PATTERNS):
            backend = "branching"
        elif np.min(diffs) > REPEAT_TOL * scale:
            backend = "bialternant"
        else:
            backend = "jacobi_trudi"
    if backend == "branching":
        return _branching(tuple(lam_p), tuple(u))
    if backend == "bialternant":
        arr = np.asarray(u, dtype=complex if np.iscomplexobj(u) else float)
        exps = np.array([lam_p[j] + n - 1 - j for j in range(n)])
        num = np.linalg.det(arr[:, None] ** exps[None, :])
        den = np.prod([arr[i] - arr[j] for i in range(n) for j in range(i + 1, n)])
        return num / den
    if backend == "jacobi_trudi":
        dtype = complex if np.iscomplexobj(u) else float
        arr = np.asarray(u, dtype=dtype)
        h = complete_homogeneous(list(arr), _hmax(lam_p))
        m = _jacobi_trudi_matrix(lam_p, h)
        return np.linalg.det(np.array(m, dtype=dtype)) if m else dtype(1)
    raise ValidationError(f"unknown backend {backend!r}")


def pr_weight(nu: Sequence[int], lam: Sequence[int], beta: Sequence[Number], backend: str = "auto") -> Number:
    """``beta_1^{|nu| - |lam|} s_lam(beta_2..) / s_nu(beta)`` when ``lam < nu``, else 0."""
    if len(beta) != len(nu):
        raise ValidationError("beta must have one entry per part of nu")
    if not interlaces(lam, nu) or len(lam) != len(nu) - 1:
        return 0
    return beta[0] ** (sum(nu) - sum(lam)) * schur_eval(lam, beta[1:], backend) / schur_eval(nu, beta, backend)


def st_weight(mu: Sequence[int], lam: Sequence[int], beta: Sequence[Number], backend: str = "auto") -> Number:
    """``s_lam(beta) / (s_mu(beta) prod(1 + beta_j))`` when ``mu <' lam``, else 0."""
    if len(beta) != len(mu):
        raise ValidationError("beta must have one entry per part of mu")
    if not cointerlaces(mu, lam):
        return 0
    den = schur_eval(mu, beta, backend)
    for b in beta:
        den = den * (1 + b)
    return schur_eval(lam, beta, backend) / den


def x_vector(spec: LatticeSpec, i: int = 1, exact: bool = False) -> list:
    """``C_i = (x_i, ..., x_N)``."""
    conv = Fraction if exact else float
    return [conv(spec.weights.x_at(t)) for t in range(i, spec.N + 1)]


def gamma_factor(i: int, spec: LatticeSpec, exact: bool = False) -> Number:
    """``prod_{t=i}^{N} (1 + y_i x_t)`` for a square row ``i``."""
    if spec.a(i) != 0:
        raise ValidationError(f"row {i} is a hexagon row")
    conv = Fraction if exact else float
    y = conv(spec.weights.y_at(i))
    out = conv(1)
    for x in x_vector(spec, i, exact):
        out *= 1 + y * x
    return out


def partition_function_schur(spec: LatticeSpec, backend: str = "auto") -> Number:
    exact = backend == "exact"
    z = schur_eval(spec.omega, x_vector(spec, 1, exact), backend)
    for i in spec.I2:
        z *= gamma_factor(i, spec, exact)
    return z


def log_partition_function_schur(spec: LatticeSpec) -> float:
    """Log of the partition function through a scaled Jacobi-Trudi determinant."""
    x = np.array(x_vector(spec))
    s = float(np.max(x))
    h = complete_homogeneous(list(x / s), _hmax(spec.omega))
    m = _jacobi_trudi_matrix(list(spec.omega), h)
    logz = 0.0
    if m:
        sign, logdet = np.linalg.slogdet(np.array(m, dtype=float))
        if sign <= 0:
            raise ValidationError("Schur determinant is not positive; use the exact backend")
        logz = logdet + sum(spec.omega) * math.log(s)
    for i in spec.I2:
        y = spec.weights.y_at(i)
        logz += sum(math.log1p(y * spec.weights.x_at(t)) for t in range(i, spec.N + 1))
    return float(logz)


def chain_probability(chain: Sequence[Sequence[int]], spec: LatticeSpec, backend: str = "auto") -> Number:
    """Probability of a top-down chain ``mu^(N), nu^(N), ..., mu^(0)`` as a product of transitions."""
    N = spec.N
    exact = backend == "exact"
    if tuple(chain[0]) != spec.omega:
        return 0
    p = Fraction(1) if exact else 1.0
    for i in range(1, N + 1):
        mu, nu, below = chain[2 * i - 2], chain[2 * i - 1], chain[2 * i]
        C = x_vector(spec, i, exact)
        if spec.a(i) == 0:
            y = Fraction(spec.weights.y_at(i)) if exact else spec.weights.y_at(i)
            p *= st_weight(mu, nu, [y * c for c in C], backend)
        elif tuple(mu) != tuple(nu):
            return 0
        p *= pr_weight(nu, below, C, backend)
        if p == 0:
            return p
    return p


def _pair_log(a: float, b: float, M: int) -> float:
    """``log((a^M - b^M) / (a - b))``, continuous across ``a = b``."""
    if a == b:
        return math.log(M) + (M - 1) * math.log(a)
    return math.log(sum(a ** (M - 1 - k) * b**k for k in range(M)))


def schur_staircase(N: int, M: int, x: Sequence[float]) -> float:
    """``s_lam(x)`` for ``lam = ((M-1)(N-1), ..., M-1, 0)`` by the product formula."""
    return math.exp(log_schur_staircase(N, M, x))


def log_schur_staircase(N: int, M: int, x: Sequence[float]) -> float:
    if len(x) != N:
        raise ValidationError("need N variables")
    return sum(_pair_log(x[i], x[j], M) for i in range(N) for j in range(i + 1, N))


def log_partition_function_staircase(spec: LatticeSpec, M: int) -> float:
    """Exact ``log Z`` for the boundary row ``1, 1 + M, 1 + 2M, ...``."""
    if spec.Omega != tuple(1 + M * k for k in range(spec.N)):
        raise ValidationError("boundary row is not a staircase with this step")
    logz = log_schur_staircase(spec.N, M, x_vector(spec))
    for i in spec.I2:
        y = spec.weights.y_at(i)
        logz += sum(math.log1p(y * spec.weights.x_at(t)) for t in range(i, spec.N + 1))
    return logz


def free_energy_staircase(weights: PeriodicWeights, M: int) -> float:
    """Limit of ``log Z / N^2`` for staircase boundary rows with periodic weights."""
    n = weights.n
    x = weights.x
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += _pair_log(x[i], x[j], M)
    total += 0.5 * sum(_pair_log(v, v, M) for v in x)
    for i, y in weights.y.items():
        total += 0.5 * sum(math.log1p(y * v) for v in x)
    return total / n**2
