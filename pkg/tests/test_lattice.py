from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqhex.errors import ValidationError
from sqhex.lattice import NE_SW, LatticeSpec, PeriodicWeights, build_lattice


def test_sh_graph_shape(sh, sh_graph):
    g = sh_graph
    assert g.num_rows == 7
    assert sh.I2 == [2]
    sizes = Counter(len(f) for f in g.faces)
    assert sizes[6] == 4
    # each bounded hexagon wraps two vertical edges across a hexagon-row gap
    for f in (f for f in g.faces if len(f) == 6):
        rows = sorted(g.vertices[v].row for v in f)
        assert rows == [4, 5, 5, 6, 6, 7]
    squares = {min(g.vertices[v].row for v in f) for f in g.faces if len(f) == 4}
    assert squares == {2, 3}


def test_aztec_rectangle_is_all_squares():
    s = LatticeSpec(4, (1, 3, 5, 6), (0,), PeriodicWeights.uniform((0,)))
    g = build_lattice(s)
    assert s.I2 == [1, 2, 3, 4]
    assert {len(f) for f in g.faces} == {4}


@pytest.mark.parametrize("a, I2", [((1, 0, 1), [2]), ((0,), [1, 2, 3]), ((1,), [])])
def test_square_rows(a, I2):
    assert LatticeSpec(3, (1, 3, 6), a, PeriodicWeights.uniform(a)).I2 == I2


def test_bottom_row_abscissae(sh, sh_graph):
    # doubled coordinates: Omega_k - 1/2 becomes 2 Omega_k - 1
    bottom = [sh_graph.vertices[v] for v in sh_graph.rows[1] if not sh_graph.vertices[v].virtual]
    assert sorted(v.X for v in bottom) == [2 * w - 1 for w in sh.Omega]


def test_ne_sw_weights(sh_graph):
    w = PeriodicWeights((2.0, 3.0, 5.0), {2: 7.0})
    g = build_lattice(LatticeSpec(3, (1, 3, 6), (1, 0, 1), w))
    found = {e.weight for e in g.edges if e.direction == NE_SW}
    assert found <= {2.0, 3.0, 5.0, 7.0}
    assert all(e.weight == 1.0 for e in g.edges if e.direction != NE_SW)


def test_omega():
    assert LatticeSpec(3, (1, 3, 6), (1,), PeriodicWeights.uniform((1,))).omega == (3, 1, 0)


@pytest.mark.parametrize(
    "Omega", [(0, 2, 3), (1, 1, 3), (1, 3, 2)]
)
def test_bad_boundary(Omega):
    with pytest.raises(ValidationError):
        LatticeSpec(3, Omega, (1,), PeriodicWeights.uniform((1,)))


def test_bad_weights():
    with pytest.raises(ValidationError):
        PeriodicWeights((1.0, -1.0), {})


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.integers(1, 3), min_size=1, max_size=4),
    st.lists(st.integers(0, 1), min_size=1, max_size=3),
)
def test_bipartite_and_row_count(gaps, a):
    Omega = [1]
    for d in gaps:
        Omega.append(Omega[-1] + d)
    s = LatticeSpec(len(Omega), tuple(Omega), tuple(a), PeriodicWeights.uniform(tuple(a)))
    g = build_lattice(s)
    assert g.num_rows == 2 * s.N + 1
    for e in g.edges:
        assert g.vertices[e.white].color == "white" and g.vertices[e.black].color == "black"
        assert abs(g.vertices[e.white].row - g.vertices[e.black].row) == 1
    assert {len(f) for f in g.faces} <= {4, 6}
