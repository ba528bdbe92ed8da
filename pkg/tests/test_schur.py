import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sh_spec
from sqhex.kasteleyn import enumerate_matchings, matching_weight
from sqhex.lattice import LatticeSpec, PeriodicWeights, build_lattice
from sqhex.schur import (
    chain_probability,
    free_energy_staircase,
    gamma_factor,
    log_partition_function_schur,
    partition_function_schur,
    pr_weight,
    schur_eval,
    schur_staircase,
    st_weight,
)
from sqhex.signatures import interlacing_range, matching_to_chain, vertical_strip_range

partitions = st.lists(st.integers(0, 5), min_size=1, max_size=5).map(lambda v: tuple(sorted(v, reverse=True)))


def ssyt_schur(lam, u):
    """Sum over semistandard tableaux, built row by row as interlacing sequences."""
    n = len(u)
    lam = tuple(lam) + (0,) * (n - len(lam))

    def rec(nu, k):
        # nu has k parts and uses variables u_1..u_k
        if k == 0:
            return 1
        total = 0
        for mu in interlacing_range(nu):
            total += u[k - 1] ** (sum(nu) - sum(mu)) * rec(mu, k - 1)
        return total

    return rec(lam, n)


def test_small_values():
    assert schur_eval((3, 1, 0), [1, 1, 1], "exact") == 15
    assert schur_eval((2, 1, 0), [1, 2, 3]) == pytest.approx(60)
    assert schur_staircase(3, 2, [1.0, 2.0, 3.0]) == pytest.approx(3 * 4 * 5)


@settings(max_examples=40, deadline=None)
@given(partitions, st.lists(st.floats(0.2, 3.0), min_size=5, max_size=5))
def test_backends_match_tableaux(lam, u):
    u = u[: len(lam)]
    ref = ssyt_schur(lam, u)
    assert schur_eval(lam, u) == pytest.approx(ref, rel=1e-9)
    exact = schur_eval(lam, [Fraction(v) for v in u], "exact")
    assert float(exact) == pytest.approx(ref, rel=1e-12)


def test_repeated_variables():
    # equal variables fall back to a route that tolerates them
    assert schur_eval((4, 2, 1), [1.3, 1.3, 1.3]) == pytest.approx(ssyt_schur((4, 2, 1), [1.3] * 3), rel=1e-10)


def test_pr_and_st_simple_cases():
    assert pr_weight((1, 0), (0,), (1, 1)) == pytest.approx(0.5)
    assert pr_weight((1, 0), (1,), (1, 1)) == pytest.approx(0.5)
    assert st_weight((0,), (0,), (1,)) == pytest.approx(0.5)
    assert st_weight((0,), (1,), (1,)) == pytest.approx(0.5)
    assert pr_weight((1, 0), (2,), (1, 1)) == 0


@settings(max_examples=50, deadline=None)
@given(partitions, st.lists(st.floats(0.1, 5.0), min_size=5, max_size=5))
def test_pr_normalised(nu, beta):
    beta = beta[: len(nu)]
    assert sum(pr_weight(nu, lam, beta) for lam in interlacing_range(nu)) == pytest.approx(1, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(partitions, st.lists(st.floats(0.1, 5.0), min_size=5, max_size=5))
def test_st_normalised(mu, beta):
    beta = beta[: len(mu)]
    assert sum(st_weight(mu, lam, beta) for lam in vertical_strip_range(mu)) == pytest.approx(1, abs=1e-12)


def test_gamma_square_pair():
    # two parts at zero: the four vertical strips sum to (1 + b1)(1 + b2) s_0
    b = (0.7 * 1.3, 0.7 * 2.1)
    raw = sum(schur_eval(nu, b) for nu in vertical_strip_range((0, 0)))
    assert raw == pytest.approx((1 + b[0]) * (1 + b[1]))


def test_sh_closed_form():
    rng = np.random.default_rng(7)
    for _ in range(5):
        x1, x2, x3 = rng.uniform(0.3, 2.5, 3)
        y = rng.uniform(0.3, 2.5)
        s = sh_spec((x1, x2, x3), y)
        bracket = (
            x1**3 * x2 + x1**3 * x3 + x1 * x2**3 + x1 * x3**3 + x2**3 * x3 + x2 * x3**3
            + x1**2 * x2**2 + x1**2 * x3**2 + x2**2 * x3**2 + 2 * x1 * x2 * x3 * (x1 + x2 + x3)
        )
        assert gamma_factor(2, s) == pytest.approx((1 + y * x2) * (1 + y * x3))
        assert partition_function_schur(s) == pytest.approx((1 + y * x2) * (1 + y * x3) * bracket, rel=1e-12)


def test_unit_weights_sixty(sh):
    assert partition_function_schur(sh, "exact") == 60
    assert math.exp(log_partition_function_schur(sh)) == pytest.approx(60, rel=1e-12)


def test_hexagon_and_square_specialisations():
    x = (1.2, 0.7, 1.9)
    hexa = LatticeSpec(3, (1, 3, 6), (1, 1, 1), PeriodicWeights(x, {}))
    assert partition_function_schur(hexa) == pytest.approx(schur_eval((3, 1, 0), x))
    y = {1: 0.4, 2: 1.5, 3: 0.8}
    sq = LatticeSpec(3, (1, 3, 6), (0, 0, 0), PeriodicWeights(x, y))
    pref = 1.0
    for i in range(1, 4):
        for j in range(i, 4):
            pref *= 1 + y[i] * x[j - 1]
    assert partition_function_schur(sq) == pytest.approx(pref * schur_eval((3, 1, 0), x))


def test_chain_probability_matches_weights():
    s = sh_spec((1.3, 0.6, 2.2), 0.9)
    g = build_lattice(s)
    Z = partition_function_schur(s)
    total = 0.0
    for m in enumerate_matchings(g):
        p = chain_probability(matching_to_chain(g, m), s)
        assert p == pytest.approx(matching_weight(g, m) / Z, rel=1e-12)
        total += p
    assert total == pytest.approx(1, abs=1e-12)


def test_free_energy_unit_staircase():
    w = PeriodicWeights((1.0, 1.0), {})
    assert free_energy_staircase(w, 2) == pytest.approx(math.log(2) / 2)


def test_ssyt_oracle_sanity():
    # s_(1)(u) = sum u ; s_(1,1)(u1,u2) = u1 u2
    assert ssyt_schur((1, 0), [2, 3]) == 5
    assert ssyt_schur((1, 1), [2, 3]) == 6
    assert sum(1 for _ in product(range(2), repeat=0)) == 1
