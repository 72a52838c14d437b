import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwmvc.ctqw import t_opt, transition_profile
from qwmvc.errors import ParameterError
from qwmvc.exact import brute_force_mvc
from qwmvc.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    generate_ba,
    generate_er,
    generate_regular,
    path_graph,
    star_graph,
)
from qwmvc.heuristics import (
    SOLVERS,
    FastVcParams,
    SaParams,
    _greedy_cover,
    _matching_cover,
    fastvc_mvc,
    quantum_mvc,
    sa_mvc,
    solve,
    two_approx_mvc,
    validate_cover,
)


def random_graph(rng, max_n=40):
    n = int(rng.integers(2, max_n + 1))
    kind = rng.integers(3)
    seed = int(rng.integers(2**32))
    if kind == 0:
        return generate_er(n, float(rng.uniform(0.05, 0.9)), seed)
    if kind == 1:
        return generate_ba(n, int(rng.integers(1, min(5, n - 1) + 1)), seed)
    k = int(rng.integers(0, min(6, n - 1) + 1))
    return generate_regular(n, k - (n * k) % 2, seed)


# -- validate_cover ------------------------------------------------------------

def test_validate_cover_examples():
    k3 = complete_graph(3)
    assert validate_cover(k3, {0, 1})
    assert not validate_cover(k3, {0})
    assert validate_cover(Graph(0), set())
    with pytest.raises(ParameterError):
        validate_cover(k3, {3})


# -- quantum -------------------------------------------------------------------

def test_quantum_edgeless():
    res = quantum_mvc(Graph(5))
    assert res.cover == frozenset() and res.iterations == 0 and res.valid


def test_quantum_star_picks_centre():
    res = quantum_mvc(star_graph(4))
    assert res.sorted_cover() == [0] and res.iterations == 1


def test_quantum_path3_picks_middle():
    res = quantum_mvc(path_graph(3))
    assert res.sorted_cover() == [1] and res.iterations == 1


def test_quantum_k3_lowest_ids():
    res = quantum_mvc(complete_graph(3))
    assert res.sorted_cover() == [0, 1] and res.iterations == 2
    assert [s.vertex for s in res.trace] == [0, 1]
    assert [s.remaining_edges for s in res.trace] == [1, 0]


def test_quantum_trace_times():
    g = generate_er(10, 0.5, 3)
    first = quantum_mvc(g).trace[0]
    assert first.time == pytest.approx(t_opt(int(np.count_nonzero(g.degrees()))))
    fixed = quantum_mvc(g, time_mode="fixed001")
    assert all(s.time == 0.01 for s in fixed.trace)
    with pytest.raises(ParameterError):
        quantum_mvc(g, time_mode="bogus")


@pytest.mark.parametrize("g", [cycle_graph(5), cycle_graph(8), complete_graph(4),
                               complete_graph(6)], ids=["C5", "C8", "K4", "K6"])
def test_quantum_tie_break_orbit(g):
    # vertex-transitive: every score ties, so the first pick must be vertex 0
    res = quantum_mvc(g)
    assert res.trace[0].vertex == 0
    # later picks: the lowest id among score-maximal candidates
    current = g
    for step in res.trace:
        prof = transition_profile(current, step.time)
        deg = current.degrees()
        best = max(prof.prob_out[v] for v in range(g.n) if deg[v])
        ties = [v for v in range(g.n) if deg[v] and prof.prob_out[v] >= best - 1e-10]
        assert step.vertex == min(ties)
        current = current.without_vertex_edges(step.vertex)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_quantum_iteration_contract(seed):
    g = random_graph(np.random.default_rng(seed), max_n=25)
    res = quantum_mvc(g)
    assert res.size == res.iterations <= g.n
    remaining = [g.num_edges] + [s.remaining_edges for s in res.trace]
    assert all(b < a for a, b in zip(remaining, remaining[1:]))
    assert remaining[-1] == 0


def test_quantum_deterministic():
    g = generate_er(30, 0.3, 77)
    a, b = quantum_mvc(g), quantum_mvc(g)
    assert a.cover == b.cover and a.trace == b.trace


# -- 2-approx ------------------------------------------------------------------

def test_two_approx_examples():
    assert two_approx_mvc(complete_graph(3)).size == 2
    assert two_approx_mvc(star_graph(4)).size == 2
    assert two_approx_mvc(Graph(4)).cover == frozenset()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_two_approx_bound(gseed, seed):
    g = random_graph(np.random.default_rng(gseed), max_n=20)
    res = two_approx_mvc(g, seed)
    assert res.size % 2 == 0
    assert res.size <= 2 * brute_force_mvc(g).size


# -- FastVC --------------------------------------------------------------------

def test_fastvc_examples():
    assert fastvc_mvc(star_graph(4)).sorted_cover() == [0]
    assert fastvc_mvc(complete_graph(3)).size == 2
    assert fastvc_mvc(Graph(3)).cover == frozenset()


def test_fastvc_params_validation():
    with pytest.raises(ParameterError):
        FastVcParams(bms_k=0)
    with pytest.raises(ParameterError):
        FastVcParams(cutoff_iters=-1)


def test_fastvc_zero_budget_returns_greedy():
    g = generate_er(20, 0.3, 4)
    res = fastvc_mvc(g, FastVcParams(cutoff_iters=0))
    assert res.cover == frozenset(np.flatnonzero(_greedy_cover(g)).tolist())


def test_fastvc_petersen_reaches_optimum():
    from qwmvc.graph import petersen_graph
    assert fastvc_mvc(petersen_graph()).size == 6


# -- simulated annealing -------------------------------------------------------

def test_sa_edgeless():
    assert sa_mvc(Graph(6)).cover == frozenset()


def test_sa_k3_over_seeds():
    hits = sum(sa_mvc(complete_graph(3), SaParams(seed=s)).size == 2 for s in range(1, 11))
    assert hits >= 9


def test_sa_star10_over_seeds():
    hits = sum(sa_mvc(star_graph(10), SaParams(seed=s)).sorted_cover() == [0]
               for s in range(1, 11))
    assert hits >= 9


def test_sa_params_validation():
    with pytest.raises(ParameterError):
        SaParams(cooling=1.0)
    with pytest.raises(ParameterError):
        SaParams(penalty_lambda=1.0)
    with pytest.raises(ParameterError):
        SaParams(initial_temp=0)
    assert SaParams().temperature_levels() == 342


# -- all solvers ---------------------------------------------------------------

def test_all_solvers_valid_on_500_graphs():
    rng = np.random.default_rng(2024)
    failures = []
    for i in range(500):
        g = random_graph(rng)
        for solver in SOLVERS:
            res = solve(g, solver, seed=i)
            if not (res.valid and validate_cover(g, res.cover)):
                failures.append((i, solver))
    assert failures == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 1000))
def test_local_search_never_worse_than_start(gseed, seed):
    g = random_graph(np.random.default_rng(gseed), max_n=30)
    assert fastvc_mvc(g, FastVcParams(seed=seed)).size <= int(_greedy_cover(g).sum())
    assert sa_mvc(g, SaParams(seed=seed)).size <= len(_matching_cover(g, seed))


@pytest.mark.parametrize("solver", SOLVERS)
def test_stochastic_solvers_deterministic(solver):
    g = generate_ba(35, 2, 9)
    a, b = solve(g, solver, seed=5), solve(g, solver, seed=5)
    assert a.cover == b.cover and a.iterations == b.iterations


def test_solve_unknown_solver():
    with pytest.raises(ParameterError):
        solve(complete_graph(3), "qaoa")
