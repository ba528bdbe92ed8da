from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SMALL, small_spec, sh_spec
from sqhex.errors import ValidationError
from sqhex.kasteleyn import enumerate_matchings
from sqhex.lattice import NE_SW, build_lattice
from sqhex.signatures import (
    chain_is_valid,
    chain_to_matching,
    cointerlaces,
    expected_ne_sw_by_gap,
    interlaces,
    interlacing_range,
    matching_to_chain,
    maya_to_signature,
    ne_sw_by_gap,
    signature,
    signature_to_maya,
    signed_ne_sw_total,
    size,
    vertical_strip_range,
)

partitions = st.lists(st.integers(0, 6), min_size=1, max_size=6).map(lambda v: tuple(sorted(v, reverse=True)))


def test_maya_of_boundary_signature():
    d = signature_to_maya((3, 1, 0), 3)
    assert [i for i, c in enumerate(d.cells) if c] == [0, 2, 5]
    assert str(d) == "■□■□□■"


def test_maya_figure_example():
    d = signature_to_maya((5, 4, 4, 4, 2, 0), 6)
    assert len(d.cells) == 12
    assert str(d) == "■□□■□□■■■□■□"


@settings(max_examples=100)
@given(partitions, st.integers(0, 4))
def test_maya_round_trip(lam, extra):
    m = (lam[0] if lam else 0) + extra
    d = signature_to_maya(lam, m)
    assert sum(d.cells) == len(lam)
    assert maya_to_signature(d) == lam


def test_signature_rejects_increasing():
    with pytest.raises(ValidationError):
        signature((1, 2))
    with pytest.raises(ValidationError):
        signature((2, -1))


@settings(max_examples=60)
@given(partitions)
def test_interlacing_range(nu):
    lams = list(interlacing_range(nu))
    assert len(set(lams)) == len(lams)
    for lam in lams:
        assert len(lam) == len(nu) - 1 and interlaces(lam, nu)
    # brute-force count of interlacing sequences
    count = 1
    for a, b in zip(nu, nu[1:]):
        count *= a - b + 1
    assert len(lams) == count


@settings(max_examples=60)
@given(partitions)
def test_vertical_strips(mu):
    nus = list(vertical_strip_range(mu))
    brute = {
        nu
        for nu in (tuple(p + e for p, e in zip(mu, bits)) for bits in product((0, 1), repeat=len(mu)))
        if all(a >= b for a, b in zip(nu, nu[1:]))
    }
    assert set(nus) == brute and len(nus) == len(brute)
    for nu in nus:
        assert cointerlaces(mu, nu)
        assert all(0 <= a - b <= 1 for a, b in zip(nu, mu))


def test_sh_round_trip_and_validity(sh_graph, sh):
    for m in enumerate_matchings(sh_graph):
        ch = matching_to_chain(sh_graph, m)
        assert ch[0] == (3, 1, 0)
        assert ch[-1] == ()
        assert chain_is_valid(ch, sh.a, sh.N)
        assert chain_to_matching(sh_graph, ch) == m


@pytest.mark.parametrize("Omega, a", SMALL)
def test_per_gap_ne_sw_counts(Omega, a):
    s = small_spec(Omega, a)
    g = build_lattice(s)
    for m in enumerate_matchings(g):
        ch = matching_to_chain(g, m)
        by_gap = ne_sw_by_gap(g, m)
        assert by_gap == expected_ne_sw_by_gap(ch)
        assert signed_ne_sw_total(by_gap) == size(s.omega)


def test_x_exponents():
    # distinct primes make every exponent readable off the edge list
    x = (2.0, 3.0, 5.0)
    s = sh_spec(x=x, y2=7.0)
    g = build_lattice(s)
    for m in enumerate_matchings(g):
        ch = matching_to_chain(g, m)
        for j in range(1, 4):
            hits = sum(1 for e in m if g.edges[e].direction == NE_SW and g.edges[e].weight == x[j - 1])
            assert hits == size(ch[2 * j - 1]) - size(ch[2 * j])


def test_chain_to_matching_rejects_bad_chain(sh_graph):
    with pytest.raises(ValidationError):
        chain_to_matching(sh_graph, [(3, 1, 0)])
