"""Limit shape: densities of the rescaled row measures, frozen boundary, height.

Positions are rescaled by ``N``: ``chi`` is the horizontal and ``kappa`` the
vertical coordinate, and the row at height ``kappa`` is described by a
probability measure ``m^kappa`` on ``[0, x_max]`` in the variable
``x = chi / (1 - kappa)``.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import NumericalError, ValidationError
from .lattice import PeriodicWeights

# imaginary parts below this (relative to |z|) count as real
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryMeasureSpec:
    """Limit of the bottom-row counting measure: density ``density`` on each interval."""

    intervals: tuple[tuple[float, float], ...]
    density: float = 1.0
    normalised: bool = True  # False skips the unit-mass check (plots of J only)

    def __post_init__(self) -> None:
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", iv)
        if not iv:
            raise ValidationError("need at least one interval")
        for (a, b), nxt in zip(iv, iv[1:] + ((math.inf, math.inf),)):
            if not a < b:
                raise ValidationError(f"empty interval ({a}, {b})")
            if b > nxt[0]:
                raise ValidationError("intervals must be disjoint and sorted")
        L = 1.0 / self.density
        if abs(L - round(L)) > 1e-9 or round(L) < 1:
            raise ValidationError("density must be 1/L for a positive integer L")
        mass = self.density * sum(b - a for a, b in iv)
        if self.normalised and abs(mass - 1.0) > 1e-9:
            raise ValidationError(f"total mass {mass} differs from 1")

    @property
    def L(self) -> int:
        return round(1.0 / self.density)

    @property
    def a(self) -> list[float]:
        return [a for a, _ in self.intervals]

    @property
    def b(self) -> list[float]:
        return [b for _, b in self.intervals]

    @classmethod
    def staircase(cls, M: int) -> BoundaryMeasureSpec:
        return cls(((0.0, float(M)),), 1.0 / M)

    @classmethod
    def from_omega(cls, Omega: Sequence[int]) -> BoundaryMeasureSpec:
        """Runs of consecutive positions of ``Omega``, rescaled by its length."""
        N = len(Omega)
        runs = []
        start = prev = Omega[0]
        for v in list(Omega[1:]) + [None]:
            if v is not None and v == prev + 1:
                prev = v
                continue
            runs.append(((start - 1) / N, prev / N))
            if v is not None:
                start = prev = v
        return cls(tuple(runs))

    def stieltjes(self, t: complex) -> complex:
        return self.density * sum(np.log((t - a) / (t - b)) for a, b in self.intervals)

    def dstieltjes(self, t: complex) -> complex:
        return self.density * sum(1 / (t - a) - 1 / (t - b) for a, b in self.intervals)

    def phi(self, t: complex) -> complex:
        """``exp`` of the Stieltjes transform, principal branch."""
        if self.L == 1:
            return np.prod([(t - a) / (t - b) for a, b in self.intervals])
        return np.prod([(t - a) / (t - b) for a, b in self.intervals]) ** self.density

    def moment(self, j: int) -> float:
        return self.density * sum((b ** (j + 1) - a ** (j + 1)) / (j + 1) for a, b in self.intervals)


@dataclass(frozen=True)
class _Params:
    n: int
    r: int
    gammas: tuple[tuple[float, int], ...]

    @classmethod
    def of(cls, w: PeriodicWeights) -> _Params:
        if any(abs(v - w.x[0]) > 1e-12 for v in w.x):
            raise ValidationError("this routine needs equal x weights; use the general staircase variant")
        # equal x weights c rescale to x = 1 with y replaced by c y
        c = w.x[0]
        return cls(w.n, w.r, tuple((g / c, m) for g, m in w.gammas()))


def _J(phi, p: _Params):
    return p.r / p.n + 1 / (phi - 1) + sum(m * g / (phi + g) for g, m in p.gammas) / p.n


def _dJ_dphi(phi, p: _Params):
    return -1 / (phi - 1) ** 2 - sum(m * g / (phi + g) ** 2 for g, m in p.gammas) / p.n


def h_field(z: complex, x: float, y: float, kappa: float, weights: PeriodicWeights) -> complex:
    """``K + kappa (1/(z - 1) + (1/n) sum_j n_j gamma_j / (z + gamma_j))`` with ``K = x(1 - kappa) - y + kappa r/n``."""
    n, r = weights.n, weights.r
    gam = weights.gammas()
    if z == 1 or any(z == -g for g, _ in gam):
        raise ValidationError(f"z = {z} is a pole")
    K = x * (1 - kappa) - y + kappa * r / n
    return K + kappa * (1 / (z - 1) + sum(m * g / (z + g) for g, m in gam) / n)


class _DensityEquation:
    """Polynomial form of ``z^L = prod_i H(z; x, a_i) / H(z; x, b_i)``."""

    def __init__(self, spec: BoundaryMeasureSpec, weights: PeriodicWeights):
        self.spec = spec
        self.p = _Params.of(weights)
        D = np.array([-1.0, 1.0])
        for g, _ in self.p.gammas:
            D = P.polymul(D, [g, 1.0])
        E = np.array([1.0])
        for g, _ in self.p.gammas:
            E = P.polymul(E, [g, 1.0])
        for j, (g, m) in enumerate(self.p.gammas):
            term = np.array([-1.0, 1.0]) * (m * g / self.p.n)
            for l, (g2, _) in enumerate(self.p.gammas):
                if l != j:
                    term = P.polymul(term, [g2, 1.0])
            E = P.polyadd(E, term)
        self.D, self.E = D, E

    def coeffs(self, x: complex, kappa: float) -> np.ndarray:
        c = x * (1 - kappa) + kappa * self.p.r / self.p.n
        lhs = np.zeros(self.spec.L + 1, dtype=complex)
        lhs[-1] = 1.0
        rhs = np.array([1.0 + 0j])
        for a, b in self.spec.intervals:
            lhs = P.polymul(lhs, P.polyadd((c - b) * self.D, kappa * self.E))
            rhs = P.polymul(rhs, P.polyadd((c - a) * self.D, kappa * self.E))
        return P.polysub(lhs, rhs)

    def start_guesses(self, w: complex) -> list[complex]:
        return [1 + 1 / w]


def _roots(coeffs: np.ndarray) -> np.ndarray:
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if len(c) < 2:
        return np.array([], dtype=complex)
    scale = np.max(np.abs(c))
    c = c / scale
    r = P.polyroots(c)
    dc = P.polyder(c)
    for _ in range(2):
        f, df = P.polyval(r, c), P.polyval(r, dc)
        ok = np.abs(df) > 1e-300
        r[ok] = r[ok] - f[ok] / df[ok]
    return r


def _upper_roots(roots: np.ndarray) -> np.ndarray:
    tol = IMAG_TOL * np.maximum(1.0, np.abs(roots))
    return roots[roots.imag > tol]


def _track(build, x: float, guesses: list[complex], scale: float) -> list[complex]:
    """Follow the roots starting near ``guesses`` from ``x + i T`` down to ``x + i 0``."""
    taus = np.geomspace(50.0 * max(1.0, abs(x), scale), 1e-10, 90)
    current = None
    for tau in taus:
        w = x + 1j * tau
        roots = _roots(build(w))
        if current is None:
            current = [complex(guess(w)) for guess in guesses]
        nxt = []
        for z in current:
            k = int(np.argmin(np.abs(roots - z)))
            nxt.append(roots[k])
        current = nxt
    return current


def _frozen_value(args: Sequence[complex]) -> float:
    val = -sum(np.angle(z) for z in args) / math.pi
    val = abs(val)
    return 1.0 if val > 0.5 else 0.0


def density_x(x: float, kappa: float, spec: BoundaryMeasureSpec, weights: PeriodicWeights) -> float:
    """Density of ``m^kappa`` at ``x``."""
    eq = _DensityEquation(spec, weights)
    return _density_from_equation(eq, x, kappa)


def _density_from_equation(eq: _DensityEquation, x: float, kappa: float) -> float:
    up = _upper_roots(_roots(eq.coeffs(x, kappa)))
    if len(up):
        if len(up) > 1 and np.sort(up.imag)[-2] > 1e-6:
            warnings.warn(f"several non-real roots at x={x}, kappa={kappa}", RuntimeWarning, stacklevel=3)
        z = up[np.argmax(up.imag)]
        return float(np.angle(z) / math.pi)
    guesses = [lambda w: 1 + 1 / w]
    tracked = _track(lambda w: eq.coeffs(w, kappa), x, guesses, max(eq.spec.b))
    return _frozen_value(tracked)


def density_at(chi: float, kappa: float, spec: BoundaryMeasureSpec, weights: PeriodicWeights) -> float:
    """Density of the limit row measure at ``(chi, kappa)``."""
    if not 0 < kappa < 1:
        raise ValidationError("kappa must lie in (0, 1)")
    return density_x(chi / (1 - kappa), kappa, spec, weights)


def x_max(kappa: float, spec: BoundaryMeasureSpec, weights: PeriodicWeights) -> float:
    """Right end of the support of ``m^kappa``."""
    return (max(spec.b) - weights.r / weights.n * kappa) / (1 - kappa)


@dataclass
class RowProfile:
    """Liquid intervals of ``m^kappa`` and the frozen value between them."""

    kappa: float
    xmax: float
    pieces: list[tuple[float, float, float | None]] = field(default_factory=list)  # (lo, hi, value or None if liquid)


def row_profile(
    kappa: float, spec: BoundaryMeasureSpec, weights: PeriodicWeights, grid: int = 800
) -> RowProfile:
    eq = _DensityEquation(spec, weights)
    xm = x_max(kappa, spec, weights)
    xs = np.linspace(0.0, xm, grid + 1)

    def liquid(x: float) -> bool:
        return len(_upper_roots(_roots(eq.coeffs(x, kappa)))) > 0

    flags = [liquid(x) for x in xs]
    cuts = [0.0]
    for i in range(grid):
        if flags[i] != flags[i + 1]:
            lo, hi = xs[i], xs[i + 1]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if liquid(mid) == flags[i]:
                    lo = mid
                else:
                    hi = mid
            cuts.append(0.5 * (lo + hi))
    cuts.append(xm)
    prof = RowProfile(kappa, xm)
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo <= 0:
            continue
        mid = 0.5 * (lo + hi)
        if liquid(mid):
            prof.pieces.append((lo, hi, None))
        else:
            prof.pieces.append((lo, hi, _density_from_equation(eq, mid, kappa)))
    return prof


def _integrate_profile(prof: RowProfile, f, eq: _DensityEquation, upto: float | None = None) -> float:
    total = 0.0
    for lo, hi, val in prof.pieces:
        if upto is not None:
            if lo >= upto:
                break
            hi = min(hi, upto)
        if val is not None:
            total += val * integrate.quad(f, lo, hi)[0] if val else 0.0
        else:
            g = lambda x: f(x) * _density_from_equation(eq, x, prof.kappa)  # noqa: E731
            total += integrate.quad(g, lo, hi, limit=200, epsabs=1e-11, epsrel=1e-10)[0]
    return total


def moments(kappa: float, j: int, spec: BoundaryMeasureSpec, weights: PeriodicWeights) -> float:
    """``int x^j dm^kappa(x)`` by quadrature of the density."""
    if kappa == 0:
        return spec.moment(j)
    prof = row_profile(kappa, spec, weights)
    eq = _DensityEquation(spec, weights)
    return _integrate_profile(prof, lambda x: x**j, eq)


def moments_contour(
    kappa: float, j: int, spec: BoundaryMeasureSpec, weights: PeriodicWeights, points: int = 4096
) -> float:
    """``int x^j dm^kappa(x)`` as a residue at ``t = infinity``.

    With ``z = exp(St(t))`` the row moments are the ``1/t`` coefficients of
    ``St'(t) F(z, t)^{j+1} / (j + 1)``, read off a large circle by the
    trapezoidal rule.
    """
    p = _Params.of(weights)
    sing = [abs(v) for v in spec.a + spec.b]
    R = 4.0 * max(sing + [1.0]) + 4.0
    theta = 2 * np.pi * (np.arange(points) + 0.5) / points
    t = R * np.exp(1j * theta)
    z = np.array([spec.phi(v) for v in t])
    dst = np.array([spec.dstieltjes(v) for v in t])
    yz = sum(m / (g + z) for g, m in p.gammas)
    F = (z / (1 - kappa)) * (t / z - 1 / (z - 1) + kappa / p.n * yz) + z / (z - 1)
    integrand = dst * F ** (j + 1)
    # (1 / 2 pi i) oint g dt over |t| = R equals the mean of g(t) t
    res = np.mean(integrand * t)
    return float((-res / (j + 1)).real)


def limit_height(chi: float, kappa: float, spec: BoundaryMeasureSpec, weights: PeriodicWeights) -> float:
    """Rescaled height ``2 kappa - 2 chi + 4 (1 - kappa) m^kappa([0, chi / (1 - kappa)])``."""
    prof = row_profile(kappa, spec, weights)
    eq = _DensityEquation(spec, weights)
    mass = _integrate_profile(prof, lambda x: 1.0, eq, upto=chi / (1 - kappa))
    return 2 * kappa - 2 * chi + 4 * (1 - kappa) * mass


@dataclass
class FrozenBoundary:
    t: np.ndarray
    chi: np.ndarray
    kappa: np.ndarray
    tangency: list[tuple[str, float, float]]
    rank: int

    def segments(self) -> list[tuple[np.ndarray, np.ndarray]]:
        ok = np.isfinite(self.chi) & np.isfinite(self.kappa)
        out, start = [], None
        for i, flag in enumerate(list(ok) + [False]):
            if flag and start is None:
                start = i
            elif not flag and start is not None:
                if i - start > 1:
                    out.append((self.chi[start:i], self.kappa[start:i]))
                start = None
        return out


def _phi_minus_one(t: float, spec: BoundaryMeasureSpec) -> tuple[float, float] | None:
    """``Phi(t)`` and ``Phi(t) - 1`` at real ``t``, accurate for large ``|t|``; ``None`` off the real branch."""
    ratios = [1 + (b - a) / (t - b) for a, b in spec.intervals]
    prod = float(np.prod(ratios))
    if prod > 0:
        st = spec.density * sum(math.log1p((b - a) / (t - b)) for a, b in spec.intervals)
        w = math.expm1(st)
        return 1 + w, w
    if spec.L == 1:
        return prod, prod - 1
    return None


def _curve_point(t: float, spec: BoundaryMeasureSpec, p: _Params) -> tuple[float, float]:
    if any(t == v for v in spec.a + spec.b):
        return math.nan, math.nan
    pw = _phi_minus_one(t, spec)
    if pw is None:
        return math.nan, math.nan
    phi, w = pw
    if w == 0 or any(phi + g == 0 for g, _ in p.gammas):
        return math.nan, math.nan
    J = p.r / p.n + 1 / w + sum(m * g / (phi + g) for g, m in p.gammas) / p.n
    dJ_dphi = -1 / w**2 - sum(m * g / (phi + g) ** 2 for g, m in p.gammas) / p.n
    dst = spec.density * sum((a - b) / ((t - a) * (t - b)) for a, b in spec.intervals)
    dJ = dJ_dphi * phi * dst
    if dJ == 0 or not np.isfinite(dJ):
        return math.nan, math.nan
    return t - J / dJ, 1.0 / dJ


def frozen_boundary(
    spec: BoundaryMeasureSpec, weights: PeriodicWeights, points: int = 6000
) -> FrozenBoundary:
    """Frozen boundary ``chi = t - J/J'``, ``kappa = 1/J'`` over real ``t``."""
    p = _Params.of(weights)
    lo, hi = min(spec.a), max(spec.b)
    centre, width = 0.5 * (lo + hi), max(1.0, hi - lo)
    theta = np.linspace(-np.pi / 2, np.pi / 2, points + 2)[1:-1]
    t = np.sort(np.concatenate([centre + width * np.tan(theta), _refinement(spec, p)]))
    chi = np.full(len(t), math.nan)
    kap = np.full(len(t), math.nan)
    for i, tv in enumerate(t):
        c, k = _curve_point(tv, spec, p)
        if np.isfinite(k) and -1e-9 <= k <= 1 + 1e-9:
            chi[i], kap[i] = c, k
    tang = _tangency_points(spec, p)
    rank = (len(p.gammas) + 1) * len(spec.intervals)
    return FrozenBoundary(t, chi, kap, tang, rank)


def _bottom_tangency_parameters(spec: BoundaryMeasureSpec, p: _Params) -> list[float]:
    """Real ``t`` with ``(Phi(t) - 1) prod_j (Phi(t) + gamma_j) = 0``."""
    A = np.array([1.0])
    B = np.array([1.0])
    for a, b in spec.intervals:
        A = P.polymul(A, [-a, 1.0])
        B = P.polymul(B, [-b, 1.0])
    targets = [1.0] + [-g for g, _ in p.gammas]
    out = []
    for target in targets:
        # Phi^L = A / B, so Phi = target needs A - target^L B = 0 on the right branch
        roots = _roots(P.polysub(A, target**spec.L * B))
        for r in roots:
            if abs(r.imag) > 1e-9 * max(1.0, abs(r)):
                continue
            tv = r.real
            ph = spec.phi(complex(tv))
            if abs(ph - target) < 1e-6 * max(1.0, abs(target)):
                out.append(tv)
    return sorted(out)


def _refinement(spec: BoundaryMeasureSpec, p: _Params) -> np.ndarray:
    """Extra parameter values clustered near the special points of the curve."""
    pts = spec.a + spec.b + _bottom_tangency_parameters(spec, p)
    offs = np.concatenate([-np.geomspace(1e-6, 0.2, 60), np.geomspace(1e-6, 0.2, 60)])
    return np.array([q + o for q in pts for o in offs])


def _limit_point(spec: BoundaryMeasureSpec, p: _Params, t0: float) -> tuple[float, float] | None:
    best = None
    for delta in (1e-9, -1e-9):
        c, k = _curve_point(t0 + delta * max(1.0, abs(t0)), spec, p)
        if np.isfinite(k) and -1e-6 <= k <= 1 + 1e-6:
            best = (c, k)
            break
    return best


def _tangency_points(spec: BoundaryMeasureSpec, p: _Params) -> list[tuple[str, float, float]]:
    out: list[tuple[str, float, float]] = []
    for t0 in _bottom_tangency_parameters(spec, p):
        out.append(("kappa=0", t0, 0.0))
    sides = [(f"chi={a:g}", a) for a in spec.a] + [(f"chi+{p.r}/{p.n}*kappa={b:g}", b) for b in spec.b]
    for label, t0 in sides:
        if spec.L > 1:
            # Phi has a branch point there, so J' blows up and the contact is on kappa = 0
            out.append((label, t0, 0.0))
            continue
        pt = _limit_point(spec, p, t0)
        if pt:
            out.append((label, pt[0], pt[1]))
    # t -> infinity, with the O(1/t) error removed by one Richardson step
    T = 1e4 * max(1.0, max(abs(v) for v in spec.a + spec.b))
    for sgn in (1, -1):
        c1, k1 = _curve_point(sgn * T, spec, p)
        c2, k2 = _curve_point(2 * sgn * T, spec, p)
        if np.isfinite(k1) and np.isfinite(k2):
            out.append(("kappa=1", 2 * c2 - c1, 2 * k2 - k1))
            break
    return out


def j_graph(spec: BoundaryMeasureSpec, weights: PeriodicWeights, t: np.ndarray) -> np.ndarray:
    """``J(t)`` at real ``t``, NaN where ``Phi(t)`` is not real or ``J`` has a pole."""
    p = _Params.of(weights)
    out = np.full(len(t), math.nan)
    for i, tv in enumerate(np.asarray(t, dtype=float)):
        if any(tv == v for v in spec.a + spec.b):
            continue
        pw = _phi_minus_one(tv, spec)
        if pw is None or pw[1] == 0 or any(pw[0] + g == 0 for g, _ in p.gammas):
            continue
        phi, w = pw
        out[i] = p.r / p.n + 1 / w + sum(m * g / (phi + g) for g, m in p.gammas) / p.n
    return out


def dual_curve(spec: BoundaryMeasureSpec, weights: PeriodicWeights, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Points ``(-1/t, -J(t)/t)`` of the dual curve; ``J(b_i) = r/n`` since ``Phi`` has a pole there."""
    p = _Params.of(weights)
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise ValidationError("t = 0 has no dual point")
    J = np.empty(len(t), dtype=complex)
    for i, v in enumerate(t):
        J[i] = p.r / p.n if v in spec.b else _J(spec.phi(complex(v)), p)
    return -1 / t, (-J / t).real


# ---------------------------------------------------------------------------
# staircase boundary rows with arbitrary periodic weights


class _StaircaseEquation:
    """Numerator of ``F_{kappa,M}(z) - w`` for the staircase boundary row."""

    def __init__(self, weights: PeriodicWeights, M: int):
        self.w = weights
        self.M = M
        xs: dict[float, int] = {}
        for v in weights.x:
            xs[v] = xs.get(v, 0) + 1
        ys: dict[float, int] = {}
        for v in weights.y.values():
            ys[v] = ys.get(v, 0) + 1
        self.xs = sorted(xs.items())
        self.ys = sorted(ys.items())

    def _terms(self, kappa: float):
        """List of (numerator, denominator) polynomials whose sum is ``F``."""
        n, M = self.w.n, self.M
        z = np.array([0.0, 1.0])
        terms = []
        for y, m in self.ys:
            terms.append((kappa / (n * (1 - kappa)) * m * y * z, np.array([1.0, y])))
        for x, m in self.xs:
            terms.append((m / n * z, np.array([-x, 1.0])))
            if M > 1:
                # sum over the non-trivial M-th roots of unity of z / (z - zeta x) = z Q'/Q
                Q = np.array([x ** (M - 1 - k) for k in range(M)], dtype=float)
                terms.append((m / (n * (1 - kappa)) * P.polymul(z, P.polyder(Q)), Q))
        return terms

    def coeffs(self, w: complex, kappa: float) -> np.ndarray:
        terms = self._terms(kappa)
        den = np.array([1.0 + 0j])
        for _, d in terms:
            den = P.polymul(den, d)
        num = -w * den
        for i, (a, _) in enumerate(terms):
            prod = np.asarray(a, dtype=complex)
            for j, (_, d) in enumerate(terms):
                if j != i:
                    prod = P.polymul(prod, d)
            num = P.polyadd(num, prod)
        return num

    def guesses(self):
        n = self.w.n
        return [(lambda w, x=x, m=m: x + m * x / (n * w)) for x, m in self.xs]


def staircase_roots(chi: float, kappa: float, weights: PeriodicWeights, M: int) -> np.ndarray:
    """All roots of ``F_{kappa,M}(z) = chi / (1 - kappa)``."""
    eq = _StaircaseEquation(weights, M)
    return _roots(eq.coeffs(chi / (1 - kappa), kappa))


def density_at_general(chi: float, kappa: float, weights: PeriodicWeights, M: int) -> float:
    """Density for the staircase boundary row with arbitrary periodic weights.

    Returns ``nan`` (with a warning) when ``M >= 3`` produces more than one
    pair of non-real roots; for ``M <= 2`` that situation is an error.
    """
    if not 0 < kappa < 1:
        raise ValidationError("kappa must lie in (0, 1)")
    x = chi / (1 - kappa)
    eq = _StaircaseEquation(weights, M)
    roots = _roots(eq.coeffs(x, kappa))
    up = _upper_roots(roots)
    if len(up) > 1:
        if M <= 2:
            raise NumericalError(f"{len(up)} non-real root pairs at ({chi}, {kappa})")
        warnings.warn(f"{len(up)} non-real root pairs at ({chi}, {kappa}) for M={M}", RuntimeWarning, stacklevel=2)
        return math.nan
    if len(up) == 1:
        return float(np.angle(up[0]) / math.pi)
    tracked = _track(lambda w: eq.coeffs(w, kappa), x, eq.guesses(), max(v for v, _ in eq.xs) * M)
    return _frozen_value(tracked)


@dataclass
class GeneralFrozenBoundary:
    z: np.ndarray
    chi: np.ndarray
    kappa: np.ndarray
    tangency: list[tuple[str, float, float]]


def _uvw(z: np.ndarray, weights: PeriodicWeights):
    n = weights.n
    U = sum(z * y / (1 + y * z) for y in weights.y.values()) / n
    V = sum(z / (z - x) for x in weights.x) / n
    W = sum(z / (z + x) for x in weights.x) / n
    dU = sum(y / (1 + y * z) ** 2 for y in weights.y.values()) / n
    dV = sum(-x / (z - x) ** 2 for x in weights.x) / n
    dW = sum(x / (z + x) ** 2 for x in weights.x) / n
    return U, V, W, dU, dV, dW


def frozen_boundary_general(weights: PeriodicWeights, M: int, points: int = 6000) -> GeneralFrozenBoundary:
    """Frozen boundary for staircase rows with ``M`` in ``{1, 2}``, parametrised by real ``z``."""
    if M not in (1, 2):
        raise ValidationError("closed-form parametrisation exists for M = 1 and M = 2 only")
    poles = sorted({x for x in weights.x} | {-x for x in weights.x} | {-1 / y for y in weights.y.values()})
    scale = max(1.0, max(abs(v) for v in poles))
    theta = np.linspace(-np.pi / 2, np.pi / 2, points + 2)[1:-1]
    z = np.concatenate([scale * np.tan(theta)] + [q + np.concatenate([-np.geomspace(1e-7, 0.3, 80), np.geomspace(1e-7, 0.3, 80)]) for q in poles])
    z = np.sort(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        U, V, W, dU, dV, dW = _uvw(z, weights)
        if M == 1:
            kap = dV / (dV - dU)
            chi = (U * dV - dU * V) / (dV - dU)
        else:
            kap = (dV + dW) / (dV - dU)
            chi = (dW * U + dV * U - dU * V - dW * V) / (dV - dU) + W
    bad = ~np.isfinite(kap) | (kap < -1e-9) | (kap > 1 + 1e-9)
    chi[bad] = math.nan
    kap[bad] = math.nan
    tang: list[tuple[str, float, float]] = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for y in sorted(set(weights.y.values())):
            U0, V0, W0, *_ = _uvw(np.array([-1 / y]), weights)
            c0 = float(V0[0] + (W0[0] if M == 2 else 0.0))
            # for M = 2 a weight with 1/y equal to some x_j sends this point to infinity
            if np.isfinite(c0):
                tang.append(("kappa=0", c0, 0.0))
        for x in sorted(set(weights.x)):
            U0, V0, W0, *_ = _uvw(np.array([x]), weights)
            tang.append(("kappa=1", float(U0[0] + (W0[0] if M == 2 else 0.0)), 1.0))
    return GeneralFrozenBoundary(z, chi, kap, tang)
