"""Undirected simple graphs, random ensembles and Laplacian constructions.

Graphs are small (a few hundred vertices at most), so adjacency is kept as
neighbour sets and the dense matrix view is built on demand.
"""

from __future__ import annotations

import hashlib
import io
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import GenerationError, GraphParseError, ParameterError

FAMILIES = ("ER", "BA", "REG", "WS")
RETRY_BUDGET = 100


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with unit edge weights.

    ``edges`` is stored canonically: each pair as ``(u, v)`` with ``u < v``,
    the whole tuple sorted.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"vertex count must be >= 0, got {self.n}")
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ParameterError(f"edge ({u}, {v}) out of range for n={self.n}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise ParameterError(f"duplicate edge {e}")
            canon.add(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, silently dropping repeated edges."""
        seen = {(min(u, v), max(u, v)) for u, v in edges}
        return cls(n, tuple(seen))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(s) for s in adj)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self.neighbors], dtype=np.int64)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.edges:
            idx = np.array(self.edges)
            a[idx[:, 0], idx[:, 1]] = 1.0
            a[idx[:, 1], idx[:, 0]] = 1.0
        return a

    def relabel(self, perm) -> "Graph":
        """Return the graph with vertex ``v`` renamed ``perm[v]``."""
        return Graph(self.n, tuple((perm[u], perm[v]) for u, v in self.edges))

    def without_vertex_edges(self, v: int) -> "Graph":
        if not 0 <= v < self.n:
            raise ParameterError(f"vertex {v} out of range for n={self.n}")
        return Graph(self.n, tuple(e for e in self.edges if v not in e))


@dataclass(frozen=True)
class EnsembleSpec:
    """One random-graph draw: family, size, family parameter and seed.

    For WS, ``param`` is the ring degree and ``beta`` the rewiring probability.
    """

    family: str
    n: int
    param: float
    seed: int
    beta: float = 0.1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.family == "ER":
            _check_er(self.n, self.param)
        elif self.family == "BA":
            _check_ba(self.n, self.param)
        elif self.family == "REG":
            _check_regular(self.n, self.param)
        else:
            _check_ws(self.n, self.param, self.beta)

    def generate(self) -> Graph:
        if self.family == "ER":
            return generate_er(self.n, self.param, self.seed)
        if self.family == "BA":
            return generate_ba(self.n, int(self.param), self.seed)
        if self.family == "REG":
            return generate_regular(self.n, int(self.param), self.seed)
        return generate_ws(self.n, int(self.param), self.beta, self.seed)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _check_er(n, p):
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"ER edge probability must lie in (0, 1], got {p}")


def _check_ba(n, m):
    if m != int(m) or m < 1:
        raise ParameterError(f"BA attachment count must be a positive integer, got {m}")
    if m >= n:
        raise ParameterError(f"BA requires m < n, got m={m}, n={n}")


def _check_regular(n, k):
    if k != int(k) or not 0 <= k < n:
        raise ParameterError(f"regular degree must satisfy 0 <= k < n, got k={k}, n={n}")
    if (n * int(k)) % 2:
        raise ParameterError(f"n*k must be even, got n={n}, k={k}")


def _check_ws(n, ring_k, beta):
    if ring_k != int(ring_k) or ring_k < 0 or int(ring_k) % 2 or ring_k >= n:
        raise ParameterError(f"WS ring degree must be even and < n, got {ring_k}")
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"WS rewiring probability must lie in [0, 1], got {beta}")


def generate_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p): every vertex pair is an edge independently with probability p."""
    _check_er(n, p)
    rng = _rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment grown from a path on ``m + 1`` vertices.

    Each new vertex draws targets proportionally to degree, rejecting
    repeats, until it has ``m`` distinct neighbours.
    """
    _check_ba(n, m)
    m = int(m)
    rng = _rng(seed)
    core = m + 1
    edges = [(i, i + 1) for i in range(core - 1)]
    # one entry per edge endpoint: uniform draws from it are degree-proportional
    ends = [v for e in edges for v in e]
    for v in range(core, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(ends[int(rng.integers(len(ends)))])
        for u in sorted(targets):
            edges.append((u, v))
            ends.extend((u, v))
    return Graph(n, tuple(edges))


def _pairing_attempt(n, k, rng):
    edges: set[tuple[int, int]] = set()
    stubs = [v for v in range(n) for _ in range(k)]
    while stubs:
        leftover: dict[int, int] = {}
        perm = rng.permutation(len(stubs))
        shuffled = [stubs[i] for i in perm]
        for u, v in zip(shuffled[::2], shuffled[1::2]):
            e = (u, v) if u < v else (v, u)
            if u == v or e in edges:
                leftover[u] = leftover.get(u, 0) + 1
                leftover[v] = leftover.get(v, 0) + 1
            else:
                edges.add(e)
        # restart when every remaining stub pair would be a loop or multi-edge
        open_vertices = sorted(leftover)
        if leftover and not any(
            (a, b) not in edges
            for i, a in enumerate(open_vertices)
            for b in open_vertices[i + 1:]
        ):
            return None
        stubs = [v for v in open_vertices for _ in range(leftover[v])]
    return edges


def generate_regular(n: int, k: int, seed: int, max_tries: int = RETRY_BUDGET) -> Graph:
    """Uniform-degree graph from the stub-pairing model.

    Pairs that would create a loop or a multi-edge are rejected and their
    stubs re-paired; a stuck pairing restarts from scratch. Degrees above
    (n - 1) / 2 are built as the complement of an (n - 1 - k)-regular graph.
    """
    _check_regular(n, k)
    k = int(k)
    if 2 * k > n - 1:
        sparse = generate_regular(n, n - 1 - k, seed, max_tries)
        return Graph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)
                              if v not in sparse.neighbors[u]))
    rng = _rng(seed)
    for _ in range(max_tries):
        edges = _pairing_attempt(n, k, rng)
        if edges is not None:
            return Graph(n, tuple(edges))
    raise GenerationError(f"no simple {k}-regular graph on {n} vertices after {max_tries} tries")


def _ws_once(n, ring_k, beta, rng):
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, ring_k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, ring_k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if v not in adj[u] or rng.random() >= beta:
                continue
            if len(adj[u]) >= n - 1:
                continue
            w = int(rng.integers(n))
            while w == u or w in adj[u]:
                w = int(rng.integers(n))
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in adj[u] if u < v))


def generate_ws(n: int, ring_k: int, beta: float, seed: int,
                max_tries: int = RETRY_BUDGET) -> Graph:
    """Watts-Strogatz ring with rewiring, regenerated until connected.

    Attempt ``i`` uses seed ``seed + i``.
    """
    _check_ws(n, ring_k, beta)
    ring_k = int(ring_k)
    for attempt in range(max_tries):
        g = _ws_once(n, ring_k, beta, _rng(seed + attempt))
        if is_connected(g):
            return g
    raise GenerationError(f"no connected WS graph (n={n}, k={ring_k}, beta={beta}) "
                          f"after {max_tries} tries")


def ws_substitute_params(n: int, p: float) -> tuple[int, float]:
    """Ring degree and rewiring probability used in place of a disconnected G(n, p)."""
    ring_k = 2 * round(p * (n - 1) / 2)
    largest = n - 1 if (n - 1) % 2 == 0 else n - 2
    return max(2, min(ring_k, largest)), 0.1


def regular_degree(n: int, target: float) -> int:
    """Realise an approximate degree target as a feasible regular degree."""
    k = int(round(target))
    if (n * k) % 2:
        k += 1
    return max(2, min(k, n - 1))


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == g.n


def _digest(s: str) -> str:
    return hashlib.blake2b(s.encode(), digest_size=16).hexdigest()


def wl_hash(g: Graph, rounds: int = 3) -> str:
    """Weisfeiler-Lehman colour-refinement digest.

    Isomorphic graphs always collide; non-isomorphic graphs usually do not,
    but WL-equivalent pairs (e.g. C6 and two disjoint triangles) also collide.
    """
    if rounds < 1:
        raise ParameterError("rounds must be >= 1")
    colors = [str(len(nb)) for nb in g.neighbors]
    for _ in range(rounds):
        colors = [
            _digest(colors[v] + "|" + ",".join(sorted(colors[u] for u in g.neighbors[v])))
            for v in range(g.n)
        ]
    return _digest(f"{g.n}:" + ",".join(sorted(colors)))


def to_networkx(g: Graph):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def is_isomorphic(g: Graph, h: Graph) -> bool:
    """Exact isomorphism test (VF2++), for settling WL-hash collisions."""
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    if sorted(g.degrees().tolist()) != sorted(h.degrees().tolist()):
        return False
    import networkx as nx

    return nx.vf2pp_is_isomorphic(to_networkx(g), to_networkx(h))


def normalized_gamma(g: Graph) -> np.ndarray:
    """D^-1/2 A D^-1/2 with zero rows and columns at isolated vertices."""
    a = g.adjacency()
    d = a.sum(axis=1)
    inv = np.zeros_like(d)
    np.divide(1.0, np.sqrt(d), out=inv, where=d > 0)
    return inv[:, None] * a * inv[None, :]


def laplacians(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Combinatorial Laplacian D - A and normalised Laplacian I - Gamma.

    Isolated vertices get a zero diagonal in the normalised Laplacian.
    """
    a = g.adjacency()
    d = a.sum(axis=1)
    lap = np.diag(d) - a
    lsym = np.diag((d > 0).astype(float)) - normalized_gamma(g)
    return lap, lsym


def qubit_encoding(g: Graph) -> tuple[int, dict[int, str]]:
    """Binary basis-state label of every vertex, using ceil(log2 n) qubits."""
    if g.n < 1:
        raise ParameterError("encoding needs at least one vertex")
    width = (g.n - 1).bit_length()
    labels = {v: format(v, f"0{width}b") if width else "" for v in range(g.n)}
    return width, labels


# -- edge-list files ---------------------------------------------------------

def format_edgelist(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_text(format_edgelist(g))


def parse_edgelist(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines of ``u v``; ``#`` starts a comment."""
    header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"expected two integers, got {line!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise GraphParseError("negative count in header", lineno)
            header = (a, b)
            continue
        n = header[0]
        if a == b:
            raise GraphParseError(f"self-loop at vertex {a}", lineno)
        if not (0 <= a < n and 0 <= b < n):
            raise GraphParseError(f"vertex out of range for n={n}: {line!r}", lineno)
        e = (min(a, b), max(a, b))
        if e in seen:
            raise GraphParseError(f"duplicate edge {e}", lineno)
        seen.add(e)
        edges.append(e)
    if header is None:
        raise GraphParseError("missing 'n m' header")
    if len(edges) != header[1]:
        raise GraphParseError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph(header[0], tuple(edges))


def read_edgelist(path) -> Graph:
    return parse_edgelist(Path(path).read_text())


# -- named small graphs, used by tests and the CLI examples ------------------

def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star_graph(n: int) -> Graph:
    """Star on ``n`` vertices with centre 0."""
    return Graph(n, tuple((0, v) for v in range(1, n)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, tuple(outer + spokes + inner))
