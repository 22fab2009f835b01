import random

import pytest

from secluster import domsets, udg
from secluster.domsets import (
    AdjacencyGraph,
    GreedyVariant,
    SetKind,
    greedy_cds_baseline,
    is_cds,
    is_dominating,
    is_wcds,
    min_set_exhaustive,
    star_of,
)

P6 = AdjacencyGraph.path(6)
C6 = AdjacencyGraph.cycle(6)
K15 = AdjacencyGraph.star(5)


def random_connected_udg(seed, n_max=10):
    """Small connected unit-disk graphs for property checks."""
    rng = random.Random(seed)
    n = rng.randrange(4, n_max + 1)
    g = udg.generate_uniform(n, 10, 10, 4.5, seed)
    return g if udg.is_connected(g) else None


# -- verifiers ---------------------------------------------------------------

def test_star_center_dominates():
    assert is_dominating(K15, {0})
    assert is_cds(K15, {0})
    assert is_wcds(K15, {0})


def test_path_domination():
    assert is_dominating(P6, {1, 4})
    # node 5 is adjacent only to node 4
    assert not is_dominating(P6, {0, 3})


def test_path_cds():
    assert not is_cds(P6, {1, 4})  # induced subgraph has no edges
    assert is_cds(P6, {1, 2, 3, 4})


def test_path_wcds_split():
    # edge (2,3) has no endpoint in {1,4}, so the weakly induced graph
    # splits into {0,1,2} and {3,4,5}
    assert not is_wcds(P6, {1, 4})


def test_cycle_wcds():
    # every edge of C6 has an endpoint in the alternating set
    assert is_wcds(C6, {0, 2, 4})


def test_empty_set_never_dominates_nonempty_graph():
    assert not is_dominating(P6, set())
    assert not is_cds(P6, set())
    assert not is_wcds(P6, set())


def test_invalid_member_rejected():
    with pytest.raises(ValueError):
        is_dominating(P6, {6})


def test_star_of():
    lone = AdjacencyGraph(1, [])
    assert star_of(lone, 0) == {0}
    assert star_of(K15, 0) == {0, 1, 2, 3, 4, 5}
    assert star_of(P6, 2) == {1, 2, 3}


# -- exhaustive oracle -------------------------------------------------------

def test_c6_minimum_sizes():
    assert len(min_set_exhaustive(C6, SetKind.DS)) == 2
    assert len(min_set_exhaustive(C6, SetKind.WCDS)) == 3
    assert len(min_set_exhaustive(C6, SetKind.CDS)) == 4


def test_star_minimum_is_center():
    for kind in SetKind:
        assert min_set_exhaustive(K15, kind) == {0}


def test_p4_minimums_and_tiebreak():
    p4 = AdjacencyGraph.path(4)
    assert min_set_exhaustive(p4, SetKind.DS) == {0, 2}
    assert min_set_exhaustive(p4, SetKind.CDS) == {1, 2}


def test_size_guard():
    big = AdjacencyGraph.path(21)
    with pytest.raises(ValueError):
        min_set_exhaustive(big, SetKind.DS)


def test_disconnected_graph_has_no_cds_or_wcds():
    g = AdjacencyGraph(4, [(0, 1), (2, 3)])
    assert min_set_exhaustive(g, SetKind.CDS) is None
    assert min_set_exhaustive(g, SetKind.WCDS) is None
    assert min_set_exhaustive(g, SetKind.DS) == {0, 2}


def test_oracle_results_pass_their_own_verifier():
    verifiers = {SetKind.DS: is_dominating, SetKind.CDS: is_cds,
                 SetKind.WCDS: is_wcds}
    found = 0
    seed = 0
    while found < 40:
        g = random_connected_udg(seed)
        seed += 1
        if g is None:
            continue
        found += 1
        for kind, verify in verifiers.items():
            s = min_set_exhaustive(g, kind)
            assert s is not None
            assert verify(g, s)


def test_size_ladder_on_random_graphs():
    """|min DS| <= |min WCDS| <= |min CDS| on connected graphs."""
    found = 0
    seed = 1000
    while found < 60:
        g = random_connected_udg(seed)
        seed += 1
        if g is None:
            continue
        found += 1
        ds = min_set_exhaustive(g, SetKind.DS)
        wcds = min_set_exhaustive(g, SetKind.WCDS)
        cds = min_set_exhaustive(g, SetKind.CDS)
        assert len(ds) <= len(wcds) <= len(cds)


def test_cds_implies_wcds_implies_ds():
    found = 0
    seed = 5000
    rng = random.Random(99)
    while found < 40:
        g = random_connected_udg(seed)
        seed += 1
        if g is None:
            continue
        found += 1
        members = frozenset(v for v in range(g.n) if rng.random() < 0.5)
        if not members:
            continue
        if is_cds(g, members):
            assert is_wcds(g, members)
        if is_wcds(g, members):
            assert is_dominating(g, members)


# -- greedy baselines --------------------------------------------------------

def test_greedy_star_is_center():
    for var in GreedyVariant:
        assert greedy_cds_baseline(K15, var) == {0}


def test_greedy_path_satisfies_cds():
    for var in GreedyVariant:
        s = greedy_cds_baseline(P6, var)
        assert is_cds(P6, s)


def test_greedy_on_random_udg_contract():
    g = udg.generate_uniform(50, 100, 100,
                             udg.radius_for_expected_degree(50, 100, 100, 6),
                             seed=42)
    for var in GreedyVariant:
        s = greedy_cds_baseline(g, var)
        assert len(s) <= g.n
        # is_cds must hold per connected component
        for comp in udg.connected_components(g):
            sub, relabel = domsets.induced_subgraph(g, comp)
            assert is_cds(sub, {relabel[v] for v in s if v in comp})


def test_greedy_handles_disconnected_graph():
    g = AdjacencyGraph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    for var in GreedyVariant:
        s = greedy_cds_baseline(g, var)
        assert s & {0, 1, 2}
        assert s & {3, 4, 5}


def test_greedy_is_deterministic():
    g = udg.generate_uniform(80, 200, 200,
                             udg.radius_for_expected_degree(80, 200, 200, 6),
                             seed=7)
    for var in GreedyVariant:
        assert greedy_cds_baseline(g, var) == greedy_cds_baseline(g, var)
