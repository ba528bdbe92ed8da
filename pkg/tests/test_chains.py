import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import sh_spec
from sqhex.chains import pr_kernel, sample_chain, sample_chains, sample_dpp, sample_pr, sample_st
from sqhex.lattice import LatticeSpec, PeriodicWeights
from sqhex.rng import replica_rng
from sqhex.schur import chain_probability, pr_weight, st_weight
from sqhex.signatures import chain_is_valid, interlacing_range, vertical_strip_range

partitions = st.lists(st.integers(0, 4), min_size=1, max_size=4).map(lambda v: tuple(sorted(v, reverse=True)))


def _chi2(draws, law):
    keys = list(law)
    obs = np.array([draws.count(k) for k in keys])
    exp = np.array([len(draws) * law[k] for k in keys])
    assert obs.sum() == len(draws)
    return stats.chisquare(obs, exp).pvalue


def test_pr_sampler_law():
    nu, beta = (3, 1, 1, 0), (0.7, 1.6, 1.1, 2.3)
    law = {lam: pr_weight(nu, lam, beta) for lam in interlacing_range(nu)}
    rng = replica_rng(4)
    draws = [sample_pr(nu, beta, rng) for _ in range(6000)]
    assert _chi2(draws, law) > 1e-3


def test_st_sampler_law():
    mu, beta = (2, 1, 1, 0), (0.4, 1.9, 0.8, 1.2)
    law = {lam: st_weight(mu, lam, beta) for lam in vertical_strip_range(mu)}
    rng = replica_rng(5)
    draws = [sample_st(mu, beta, rng) for _ in range(6000)]
    assert _chi2(draws, law) > 1e-3


def test_chain_law_on_sh_graph():
    from sqhex.kasteleyn import enumerate_matchings
    from sqhex.lattice import build_lattice
    from sqhex.signatures import matching_to_chain

    s = sh_spec((1.4, 0.8, 2.0), 0.6)
    g = build_lattice(s)
    law = {tuple(map(tuple, matching_to_chain(g, m))): None for m in enumerate_matchings(g)}
    law = {ch: chain_probability(ch, s) for ch in law}
    draws = [tuple(map(tuple, c)) for c in sample_chains(s, 8000, seed=17)]
    assert _chi2(draws, law) > 1e-3


@settings(max_examples=25, deadline=None)
@given(partitions.filter(lambda v: len(v) > 1), st.lists(st.floats(0.2, 4.0), min_size=4, max_size=4))
def test_pr_kernel_trace(nu, beta):
    sites, K = pr_kernel(nu, beta[: len(nu)])
    # the trace counts the particles of the next row
    assert np.trace(K) == pytest.approx(len(nu) - 1, abs=1e-8)


def test_dpp_trivial_kernels():
    rng = replica_rng(0)
    assert sample_dpp(np.eye(3), rng).sum() == 3
    assert sample_dpp(np.zeros((3, 3)), rng).sum() == 0


@pytest.mark.parametrize("a", [(1,), (0,), (1, 0), (0, 1, 1)])
def test_sampled_chains_are_valid(a):
    Omega = tuple(range(1, 18, 2))
    s = LatticeSpec(len(Omega), Omega, a, PeriodicWeights.uniform(a))
    for r in range(5):
        ch = sample_chain(s, replica_rng(3, r))
        assert tuple(ch[0]) == s.omega and tuple(ch[-1]) == ()
        assert chain_is_valid(ch, s.a, s.N)


def test_replicas_are_reproducible():
    s = sh_spec()
    assert sample_chains(s, 5, seed=8) == sample_chains(s, 5, seed=8)
    assert sample_chains(s, 3, seed=8, first_replica=2) == sample_chains(s, 5, seed=8)[2:]
