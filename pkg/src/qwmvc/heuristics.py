"""Vertex-cover heuristics: the quantum-walk selector and classical baselines."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .ctqw import decouple, t_opt, transition_profile
from .errors import ParameterError
from .graph import Graph

SOLVERS = ("quantum", "fastvc", "sa", "2approx")
TIME_MODES = ("topt", "fixed001")
FIXED_TIME = 0.01


@dataclass(frozen=True)
class TraceStep:
    vertex: int
    score: float
    time: float
    remaining_edges: int

    def as_dict(self) -> dict:
        return {"vertex": self.vertex, "score": self.score, "time": self.time,
                "remaining_edges": self.remaining_edges}


@dataclass(frozen=True)
class CoverResult:
    cover: frozenset[int]
    solver: str
    valid: bool
    iterations: int = 0
    trace: tuple[TraceStep, ...] = ()
    wall_time: float = 0.0

    @property
    def size(self) -> int:
        return len(self.cover)

    def sorted_cover(self) -> list[int]:
        return sorted(self.cover)


def validate_cover(g: Graph, cover) -> bool:
    """True iff every edge of ``g`` has an endpoint in ``cover``."""
    cover = set(cover)
    for v in cover:
        if not 0 <= v < g.n:
            raise ParameterError(f"cover vertex {v} out of range for n={g.n}")
    return all(u in cover or v in cover for u, v in g.edges)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


# -- quantum walk selector ---------------------------------------------------

def quantum_mvc(g: Graph, time_mode: str = "topt", per_iteration: bool = True) -> CoverResult:
    """Greedy cover driven by quantum-walk out-probabilities.

    Each round scores every vertex by P(v -> out) on the current graph,
    takes the best vertex that still has an uncovered edge (lowest id on
    ties) and cuts all its edges. With ``time_mode="topt"`` the evolution
    time is t_opt of the non-isolated vertex count (or of ``g.n`` when
    ``per_iteration`` is false); ``"fixed001"`` uses t = 0.01 throughout.
    """
    if time_mode not in TIME_MODES:
        raise ParameterError(f"unknown time mode {time_mode!r}")
    start = time.perf_counter()
    cover: list[int] = []
    trace: list[TraceStep] = []
    current = g
    while current.num_edges:
        deg = current.degrees()
        if time_mode == "fixed001":
            t = FIXED_TIME
        elif per_iteration:
            t = t_opt(int(np.count_nonzero(deg)))
        else:
            t = t_opt(g.n)
        profile = transition_profile(current, t)
        v = profile.argmax(candidates=deg > 0)
        cover.append(v)
        current = decouple(current, v)
        trace.append(TraceStep(v, float(profile.prob_out[v]), t, current.num_edges))
    return CoverResult(frozenset(cover), "quantum", validate_cover(g, cover),
                       len(cover), tuple(trace), time.perf_counter() - start)


# -- maximal matching --------------------------------------------------------

def _matching_cover(g: Graph, seed: int) -> list[int]:
    order = _rng(seed).permutation(g.num_edges)
    matched = [False] * g.n
    cover = []
    for i in order:
        u, v = g.edges[i]
        if not matched[u] and not matched[v]:
            matched[u] = matched[v] = True
            cover += (u, v)
    return cover


def two_approx_mvc(g: Graph, seed: int = 0) -> CoverResult:
    """Both endpoints of a maximal matching built over a shuffled edge order."""
    start = time.perf_counter()
    cover = _matching_cover(g, seed)
    return CoverResult(frozenset(cover), "2approx", validate_cover(g, cover),
                       len(cover) // 2, (), time.perf_counter() - start)


# -- FastVC ------------------------------------------------------------------

@dataclass(frozen=True)
class FastVcParams:
    cutoff_iters: int | None = None
    """Exchange steps; ``None`` means 100 * n."""
    bms_k: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.bms_k < 1:
            raise ParameterError("bms_k must be >= 1")
        if self.cutoff_iters is not None and self.cutoff_iters < 0:
            raise ParameterError("cutoff_iters must be >= 0")


def _csr(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Neighbour lists in CSR form plus the edge id behind every entry."""
    deg = g.degrees()
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int64)
    edge_ids = np.empty(indptr[-1], dtype=np.int64)
    fill = indptr[:-1].copy()
    for e, (u, v) in enumerate(g.edges):
        indices[fill[u]], edge_ids[fill[u]] = v, e
        fill[u] += 1
        indices[fill[v]], edge_ids[fill[v]] = u, e
        fill[v] += 1
    return indptr, indices, edge_ids


def _greedy_cover(g: Graph) -> np.ndarray:
    """Max-uncovered-degree greedy cover with redundant vertices pruned."""
    n = g.n
    in_cover = np.zeros(n, dtype=bool)
    uncovered_deg = g.degrees().copy()
    remaining = g.num_edges
    while remaining:
        v = int(np.argmax(uncovered_deg))
        in_cover[v] = True
        for u in g.neighbors[v]:
            if not in_cover[u]:
                uncovered_deg[u] -= 1
                remaining -= 1
        uncovered_deg[v] = 0
    # a cover vertex is redundant when all its neighbours are in the cover
    for v in range(n):
        if in_cover[v] and all(in_cover[u] for u in g.neighbors[v]):
            in_cover[v] = False
    return in_cover


@njit(cache=True)
def _fastvc_kernel(indptr, indices, edge_of, eu, ev, in_cover, iters, bms_k, draws):
    n = indptr.size - 1
    m = eu.size
    # loss: edges covered only by v (v in C); gain: uncovered edges at v (v not in C)
    score = np.zeros(n, dtype=np.int64)
    age = np.zeros(n, dtype=np.int64)
    unc_pos = -np.ones(m, dtype=np.int64)
    unc = np.empty(m, dtype=np.int64)
    n_unc = 0
    cover_list = np.empty(n, dtype=np.int64)
    cover_pos = -np.ones(n, dtype=np.int64)
    n_cov = 0
    for v in range(n):
        if in_cover[v]:
            cover_pos[v] = n_cov
            cover_list[n_cov] = v
            n_cov += 1
    for e in range(m):
        a, b = eu[e], ev[e]
        if in_cover[a] and not in_cover[b]:
            score[a] += 1
        elif in_cover[b] and not in_cover[a]:
            score[b] += 1
    best = in_cover.copy()
    best_size = n_cov
    d = 0

    for step in range(iters):
        was_valid = n_unc == 0
        if was_valid:
            if n_cov < best_size:
                best_size = n_cov
                best[:] = in_cover
            if n_cov == 0:
                break
            # drop a minimum-loss vertex outright
            w = cover_list[0]
            for i in range(1, n_cov):
                c = cover_list[i]
                if score[c] < score[w] or (score[c] == score[w] and age[c] < age[w]):
                    w = c
        elif n_cov == 0:
            w = -1
        else:
            w = cover_list[draws[d] % n_cov]
            d += 1
            for _ in range(bms_k - 1):
                c = cover_list[draws[d] % n_cov]
                d += 1
                if score[c] < score[w] or (score[c] == score[w] and age[c] < age[w]):
                    w = c
        if w >= 0:
            in_cover[w] = False
            age[w] = step
            i = cover_pos[w]
            last = cover_list[n_cov - 1]
            cover_list[i] = last
            cover_pos[last] = i
            cover_pos[w] = -1
            n_cov -= 1
            score[w] = 0
            for p in range(indptr[w], indptr[w + 1]):
                u = indices[p]
                if in_cover[u]:
                    score[u] += 1
                else:
                    score[w] += 1
                    score[u] += 1
                    e = edge_of[p]
                    unc_pos[e] = n_unc
                    unc[n_unc] = e
                    n_unc += 1
        if was_valid or n_unc == 0:
            continue
        # add the higher-gain endpoint of a random uncovered edge
        e = unc[draws[d] % n_unc]
        d += 1
        a, b = eu[e], ev[e]
        if score[a] > score[b] or (score[a] == score[b] and age[a] <= age[b]):
            v = a
        else:
            v = b
        in_cover[v] = True
        age[v] = step
        cover_pos[v] = n_cov
        cover_list[n_cov] = v
        n_cov += 1
        score[v] = 0
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if in_cover[u]:
                score[u] -= 1
            else:
                score[v] += 1
                score[u] -= 1
                e2 = edge_of[p]
                i = unc_pos[e2]
                last_e = unc[n_unc - 1]
                unc[i] = last_e
                unc_pos[last_e] = i
                unc_pos[e2] = -1
                n_unc -= 1
    if n_unc == 0 and n_cov < best_size:
        best[:] = in_cover
    return best


def fastvc_mvc(g: Graph, params: FastVcParams = FastVcParams()) -> CoverResult:
    """Greedy construction followed by FastVC exchange steps.

    Each step removes a low-loss cover vertex picked by best-from-multiple
    selection, then adds the higher-gain endpoint of a random uncovered
    edge. Whenever the cover is complete it is saved and its minimum-loss
    vertex is dropped. The smallest complete cover seen is returned.
    """
    start = time.perf_counter()
    init = _greedy_cover(g)
    iters = 100 * g.n if params.cutoff_iters is None else params.cutoff_iters
    if g.num_edges == 0 or iters == 0:
        best = init
    else:
        indptr, indices, edge_ids = _csr(g)
        edges = np.array(g.edges, dtype=np.int64)
        draws = _rng(params.seed).integers(0, 2**62, size=iters * (params.bms_k + 1))
        best = _fastvc_kernel(indptr, indices, edge_ids, edges[:, 0].copy(), edges[:, 1].copy(),
                              init.copy(), iters, params.bms_k, draws)
    cover = np.flatnonzero(best).tolist()
    return CoverResult(frozenset(cover), "fastvc", validate_cover(g, cover), iters, (),
                       time.perf_counter() - start)


# -- simulated annealing -----------------------------------------------------

@dataclass(frozen=True)
class SaParams:
    initial_temp: float = 1.0
    cooling: float = 0.98
    steps_per_temp: int | None = None
    """Proposals per temperature; ``None`` means 50 * n."""
    min_temp: float = 1e-3
    penalty_lambda: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not self.initial_temp > 0 or not self.min_temp > 0:
            raise ParameterError("temperatures must be positive")
        if not 0.0 < self.cooling < 1.0:
            raise ParameterError("cooling must lie in (0, 1)")
        if not self.penalty_lambda > 1.0:
            raise ParameterError("penalty_lambda must exceed 1")
        if self.steps_per_temp is not None and self.steps_per_temp < 1:
            raise ParameterError("steps_per_temp must be >= 1")

    def temperature_levels(self) -> int:
        if self.initial_temp < self.min_temp:
            return 0
        return int(math.floor(math.log(self.min_temp / self.initial_temp)
                              / math.log(self.cooling))) + 1


@njit(cache=True)
def _sa_kernel(indptr, indices, state, n_uncovered, t0, cooling, levels, steps,
               lam, flips, uniforms):
    best = state.copy()
    size = 0
    for v in range(state.size):
        if state[v]:
            size += 1
    best_size = size if n_uncovered == 0 else state.size + 1
    temp = t0
    k = 0
    for _ in range(levels):
        for _ in range(steps):
            v = flips[k]
            u_draw = uniforms[k]
            k += 1
            free = 0
            for p in range(indptr[v], indptr[v + 1]):
                if not state[indices[p]]:
                    free += 1
            # edges to uncovered neighbours change coverage when v flips
            if state[v]:
                delta = -1.0 + lam * free
            else:
                delta = 1.0 - lam * free
            if delta <= 0.0 or u_draw < math.exp(-delta / temp):
                if state[v]:
                    state[v] = False
                    size -= 1
                    n_uncovered += free
                else:
                    state[v] = True
                    size += 1
                    n_uncovered -= free
                if n_uncovered == 0 and size < best_size:
                    best_size = size
                    best[:] = state
        temp *= cooling
    return best


def sa_mvc(g: Graph, params: SaParams = SaParams()) -> CoverResult:
    """Single-flip annealing on |S| + lambda * (uncovered edges), from the 2-approx cover."""
    start = time.perf_counter()
    init = _matching_cover(g, params.seed)
    state = np.zeros(g.n, dtype=np.bool_)
    state[init] = True
    levels = params.temperature_levels()
    steps = 50 * g.n if params.steps_per_temp is None else params.steps_per_temp
    if g.n == 0 or levels == 0:
        best = state
    else:
        rng = _rng(params.seed)
        total = levels * steps
        flips = rng.integers(0, g.n, size=total)
        uniforms = rng.random(total)
        indptr, indices, _ = _csr(g)
        best = _sa_kernel(indptr, indices, state, 0, params.initial_temp, params.cooling,
                          levels, steps, params.penalty_lambda, flips, uniforms)
    cover = np.flatnonzero(best).tolist()
    return CoverResult(frozenset(cover), "sa", validate_cover(g, cover), levels, (),
                       time.perf_counter() - start)


def solve(g: Graph, solver: str, seed: int = 0, time_mode: str = "topt",
          sa_params: SaParams | None = None,
          fastvc_params: FastVcParams | None = None) -> CoverResult:
    """Dispatch to a heuristic by name. ``seed`` overrides the params' seed."""
    if solver == "quantum":
        return quantum_mvc(g, time_mode=time_mode)
    if solver == "2approx":
        return two_approx_mvc(g, seed)
    if solver == "fastvc":
        p = fastvc_params or FastVcParams()
        return fastvc_mvc(g, FastVcParams(p.cutoff_iters, p.bms_k, seed))
    if solver == "sa":
        p = sa_params or SaParams()
        return sa_mvc(g, SaParams(p.initial_temp, p.cooling, p.steps_per_temp,
                                  p.min_temp, p.penalty_lambda, seed))
    raise ParameterError(f"unknown solver {solver!r}")
