"""Exact minimum vertex cover: enumeration and branch-and-bound.

Vertex sets are Python ints used as bitsets, so graphs of any size work,
though the search is only practical for desk-scale instances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

from .errors import CapacityError
from .graph import Graph
from .heuristics import FastVcParams, fastvc_mvc

BRUTE_FORCE_MAX_N = 24
DEFAULT_BUDGET = 50_000_000


@dataclass(frozen=True)
class ExactResult:
    cover: frozenset[int]
    size: int
    proven_optimal: bool
    nodes_explored: int
    wall_time: float


def brute_force_mvc(g: Graph) -> ExactResult:
    """Smallest cover by enumerating subsets in increasing size.

    Within a size, subsets are tried in lexicographic order, so the result
    is the lexicographically first minimum cover.
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {g.n}")
    start = time.perf_counter()
    edge_masks = [(1 << u) | (1 << v) for u, v in g.edges]
    checked = 0
    for size in range(g.n + 1):
        for subset in combinations(range(g.n), size):
            checked += 1
            mask = 0
            for v in subset:
                mask |= 1 << v
            if all(mask & e for e in edge_masks):
                return ExactResult(frozenset(subset), size, True, checked,
                                   time.perf_counter() - start)
    raise AssertionError("the full vertex set is always a cover")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def adjacency_masks(g: Graph) -> list[int]:
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def matching_bound(adj: list[int], live: int) -> int:
    """Size of a greedy maximal matching inside ``live``."""
    free = live
    size = 0
    for v in _bits(live):
        if not (free >> v) & 1:
            continue
        nb = adj[v] & free
        if nb:
            u = (nb & -nb).bit_length() - 1
            free &= ~((1 << v) | (1 << u))
            size += 1
    return size


def clique_cover_bound(adj: list[int], live: int) -> int:
    """|live| minus the number of cliques in a greedy clique partition.

    An independent set meets each clique at most once, so it has at most
    that many vertices, and every cover needs the rest.
    """
    cliques: list[int] = []
    for v in _bits(live):
        for i, joinable in enumerate(cliques):
            if (joinable >> v) & 1:
                cliques[i] = joinable & adj[v]
                break
        else:
            cliques.append(adj[v] & live)
    return live.bit_count() - len(cliques)


def lower_bound(adj: list[int], live: int) -> int:
    """Admissible bound on the cover size of the subgraph induced by ``live``."""
    return max(matching_bound(adj, live), clique_cover_bound(adj, live))


class _BudgetExhausted(Exception):
    pass


class _Search:
    def __init__(self, adj, budget, on_node):
        self.adj = adj
        self.budget = budget
        self.on_node = on_node
        self.nodes = 0
        self.best_size = None
        self.best_mask = 0

    def reduce(self, live, chosen, size):
        adj = self.adj
        changed = True
        while changed:
            changed = False
            for v in _bits(live):
                if not (live >> v) & 1:
                    continue
                nb = adj[v] & live
                if not nb:
                    live &= ~(1 << v)
                    changed = True
                elif not nb & (nb - 1):
                    # a degree-1 vertex: taking its neighbour is never worse
                    live &= ~((1 << v) | nb)
                    chosen |= nb
                    size += 1
                    changed = True
        return live, chosen, size

    def search(self, live, chosen, size):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExhausted
        live, chosen, size = self.reduce(live, chosen, size)
        if size >= self.best_size:
            return
        if not live:
            self.best_size, self.best_mask = size, chosen
            return
        lb = lower_bound(self.adj, live)
        if self.on_node is not None:
            self.on_node(live, lb)
        if size + lb >= self.best_size:
            return
        adj = self.adj
        v, best_deg = -1, -1
        for u in _bits(live):
            d = (adj[u] & live).bit_count()
            if d > best_deg:
                v, best_deg = u, d
        nb = adj[v] & live
        bit = 1 << v
        self.search(live & ~bit, chosen | bit, size + 1)
        self.search(live & ~(bit | nb), chosen | nb, size + best_deg)


def bnb_mvc(g: Graph, budget: int = DEFAULT_BUDGET, on_node=None,
            incumbent: frozenset[int] | None = None) -> ExactResult:
    """Branch and bound on the max-degree vertex: take it, or take all its neighbours.

    Degree-0 and degree-1 reductions run at every node and subtrees are
    pruned with ``lower_bound``. The search starts from a FastVC cover (or
    ``incumbent``). ``on_node(live_mask, bound)`` is called at every
    bounded node, which lets tests audit the bound. When more than
    ``budget`` nodes would be expanded the incumbent is returned unproven.
    """
    start = time.perf_counter()
    if incumbent is None:
        incumbent = fastvc_mvc(g, FastVcParams(seed=0)).cover
    s = _Search(adjacency_masks(g), budget, on_node)
    s.best_size = len(incumbent)
    s.best_mask = sum(1 << v for v in incumbent)
    proven = True
    try:
        s.search((1 << g.n) - 1, 0, 0)
    except _BudgetExhausted:
        proven = False
    cover = frozenset(_bits(s.best_mask))
    return ExactResult(cover, len(cover), proven, min(s.nodes, budget),
                       time.perf_counter() - start)
