import numpy as np
import pytest
from scipy import stats

from conftest import SMALL, sh_spec, small_spec
from sqhex.errors import KasteleynSignError
from sqhex.kasteleyn import (
    KasteleynSampler,
    build_kasteleyn,
    check_face_signs,
    count_matchings,
    default_signs,
    enumerate_matchings,
    matching_weight,
    partition_function_kasteleyn,
    sample_exact,
    sample_many,
)
from sqhex.lattice import LatticeSpec, PeriodicWeights, build_lattice
from sqhex.rng import replica_rng
from sqhex.schur import partition_function_schur


def test_determinant_matches_schur():
    rng = np.random.default_rng(11)
    for _ in range(5):
        s = sh_spec(tuple(rng.uniform(0.3, 3, 3)), rng.uniform(0.3, 3))
        k = build_kasteleyn(build_lattice(s))
        assert partition_function_kasteleyn(k) == pytest.approx(partition_function_schur(s), rel=1e-10)


@pytest.mark.parametrize("Omega, a", SMALL)
def test_signs_and_counts(Omega, a):
    g = build_lattice(small_spec(Omega, a))
    check_face_signs(g, default_signs(g))
    k = build_kasteleyn(g)
    n = count_matchings(g)
    assert n == round(partition_function_kasteleyn(k))
    assert n == sum(1 for _ in enumerate_matchings(g))


def test_sh_enumeration(sh_graph, sh):
    ms = list(enumerate_matchings(sh_graph))
    assert len(ms) == 60 == len(set(ms))
    assert sum(matching_weight(sh_graph, m) for m in ms) == pytest.approx(60)


def test_aztec_two_by_two():
    g = build_lattice(LatticeSpec(2, (1, 2), (0,), PeriodicWeights.uniform((0,))))
    assert count_matchings(g) == round(partition_function_kasteleyn(build_kasteleyn(g)))


def test_wrong_signs_are_caught(sh_graph):
    signs = {e: 1 for e in default_signs(sh_graph)}
    with pytest.raises(KasteleynSignError):
        check_face_signs(sh_graph, signs)


def test_sampler_is_seeded(sh_graph):
    k = build_kasteleyn(sh_graph)
    assert sample_exact(k, 5, 3) == sample_exact(k, 5, 3)
    assert sample_many(k, 20, 9) == sample_many(k, 20, 9)


def test_sampler_law_and_marginal():
    s = sh_spec((1.4, 0.8, 2.0), 0.6)
    g = build_lattice(s)
    law = {m: matching_weight(g, m) for m in enumerate_matchings(g)}
    Z = sum(law.values())
    sampler = KasteleynSampler(build_kasteleyn(g))
    n = 20000
    counts = dict.fromkeys(law, 0)
    for r in range(n):
        counts[sampler.sample(replica_rng(123, r))] += 1
    keys = list(law)
    obs = np.array([counts[m] for m in keys])
    exp = np.array([n * law[m] / Z for m in keys])
    assert stats.chisquare(obs, exp).pvalue > 1e-3
    # inclusion frequency of one NE-SW edge
    ne_sw = [e.id for e in g.edges if e.direction == "NE-SW"]
    share = {e: sum(w for m, w in law.items() if e in m) / Z for e in ne_sw}
    e = min(ne_sw, key=lambda e: abs(share[e] - 0.5))
    p = share[e]
    f = sum(c for m, c in counts.items() if e in m) / n
    assert abs(f - p) < 4 * np.sqrt(p * (1 - p) / n)
