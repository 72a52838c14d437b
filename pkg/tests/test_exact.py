import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwmvc.errors import CapacityError
from qwmvc.exact import (
    _bits,
    adjacency_masks,
    bnb_mvc,
    brute_force_mvc,
    clique_cover_bound,
    matching_bound,
)
from qwmvc.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    generate_ba,
    generate_er,
    generate_regular,
    is_connected,
    petersen_graph,
    star_graph,
)
from qwmvc.heuristics import SOLVERS, solve, validate_cover


def connected_small_graphs(count, seed, max_n=10):
    """Connected ER/BA/REG graphs with 2..max_n vertices, cycling through families."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, max_n + 1))
        s = int(rng.integers(2**32))
        family = len(out) % 3
        if family == 0:
            g = generate_er(n, float(rng.uniform(0.2, 0.9)), s)
        elif family == 1:
            g = generate_ba(n, int(rng.integers(1, n)), s)
        else:
            if n < 3:
                continue
            k = int(rng.integers(2, n))
            if (n * k) % 2:
                k -= 1
            g = generate_regular(n, k, s)
        if is_connected(g):
            out.append(g)
    return out


def induced(g: Graph, mask: int) -> Graph:
    keep = list(_bits(mask))
    index = {v: i for i, v in enumerate(keep)}
    return Graph(len(keep), tuple((index[u], index[v]) for u, v in g.edges
                                  if u in index and v in index))


@pytest.mark.parametrize("g,size", [
    (complete_graph(4), 3),
    (cycle_graph(5), 3),
    (petersen_graph(), 6),
    (star_graph(4), 1),
    (complete_graph(3), 2),
    (Graph(5), 0),
])
def test_known_optima(g, size):
    bf = brute_force_mvc(g)
    bb = bnb_mvc(g)
    assert bf.size == bb.size == size
    assert bf.proven_optimal and bb.proven_optimal
    assert validate_cover(g, bf.cover) and validate_cover(g, bb.cover)


def test_brute_force_lexicographic():
    assert brute_force_mvc(complete_graph(3)).cover == frozenset({0, 1})
    assert brute_force_mvc(cycle_graph(4)).cover == frozenset({0, 2})


def test_brute_force_capacity():
    with pytest.raises(CapacityError):
        brute_force_mvc(Graph(25))


def test_star_solved_by_reduction():
    res = bnb_mvc(star_graph(8), incumbent=frozenset(range(8)))
    assert res.size == 1 and res.nodes_explored == 1


def test_bnb_matches_brute_force_on_200_graphs():
    mismatches = [(g.n, g.edges) for g in connected_small_graphs(200, seed=11)
                  if bnb_mvc(g).size != brute_force_mvc(g).size]
    assert mismatches == []


def test_bnb_without_good_incumbent():
    # starting from the trivial cover forces the search to do the work
    for g in connected_small_graphs(60, seed=12, max_n=14):
        res = bnb_mvc(g, incumbent=frozenset(range(g.n)))
        assert res.proven_optimal
        assert res.size == brute_force_mvc(g).size
        assert validate_cover(g, res.cover)


def test_lower_bounds_sound_at_every_node():
    audited = 0
    for g in connected_small_graphs(40, seed=13, max_n=16):
        adj = adjacency_masks(g)

        def check(live, lb, g=g, adj=adj):
            nonlocal audited
            if live.bit_count() > 12:
                return
            opt = brute_force_mvc(induced(g, live)).size
            assert matching_bound(adj, live) <= opt
            assert clique_cover_bound(adj, live) <= opt
            assert lb <= opt
            audited += 1

        bnb_mvc(g, on_node=check, incumbent=frozenset(range(g.n)))
    assert audited > 50


def test_bounds_on_known_graphs():
    full = lambda g: (1 << g.n) - 1  # noqa: E731
    k5 = complete_graph(5)
    assert clique_cover_bound(adjacency_masks(k5), full(k5)) == 4
    assert matching_bound(adjacency_masks(k5), full(k5)) == 2
    c6 = cycle_graph(6)
    assert matching_bound(adjacency_masks(c6), full(c6)) == 3


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 14), st.floats(0.1, 0.8), st.integers(0, 2**32), st.data())
def test_monotone_under_edge_addition(n, p, seed, data):
    g = generate_er(n, p, seed)
    missing = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in set(g.edges)]
    if not missing:
        return
    e = data.draw(st.sampled_from(missing))
    h = Graph(n, g.edges + (e,))
    assert bnb_mvc(h).size >= bnb_mvc(g).size


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_exact_never_beaten_by_heuristics(seed):
    rng = np.random.default_rng(seed)
    g = generate_er(int(rng.integers(4, 30)), float(rng.uniform(0.1, 0.7)), seed)
    exact = bnb_mvc(g)
    assert exact.proven_optimal
    for solver in SOLVERS:
        assert solve(g, solver, seed=seed).size >= exact.size


def test_budget_exhaustion_is_reported():
    g = generate_er(40, 0.5, 3)
    res = bnb_mvc(g, budget=3, incumbent=frozenset(range(g.n)))
    assert not res.proven_optimal
    assert res.nodes_explored <= 3
    assert validate_cover(g, res.cover)


def test_desk_scale_dense_instance_proves():
    g = generate_er(60, 0.5, 2024)
    res = bnb_mvc(g)
    assert res.proven_optimal and validate_cover(g, res.cover)
