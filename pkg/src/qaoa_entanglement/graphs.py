"""MaxCut problem instances: generators, JSON round-trip and exact oracles.

Three ensembles are supported:

* ``linear``   -- open chain, weights i.i.d. uniform on [0, 1]
* ``regular3`` -- simple connected 3-regular graph, unit weights
* ``complete`` -- all-to-all, weights i.i.d. uniform on [0, 1]

Every generator is a pure function of ``(n, seed)``.
"""

from collections import deque
from dataclasses import dataclass
import json

import numpy as np

from .errors import ConnectivityError, InvalidSizeError
from .rng import make_rng

KINDS = ("linear", "regular3", "complete")

MAX_BRUTEFORCE_N = 30
_CHUNK_BITS = 16


@dataclass(frozen=True)
class Graph:
    """Weighted undirected graph with edges stored as ``(i, j, w)``, ``i < j``."""

    n_vertices: int
    edges: tuple
    kind: str

    @property
    def n(self):
        return self.n_vertices

    def edge_array(self):
        """Edges as ``(pairs, weights)`` arrays of shape ``(m, 2)`` and ``(m,)``."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64), np.zeros(0)
        pairs = np.array([(i, j) for i, j, _ in self.edges], dtype=np.int64)
        weights = np.array([w for _, _, w in self.edges], dtype=float)
        return pairs, weights

    def degrees(self):
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def adjacency_list(self):
        adj = [[] for _ in range(self.n_vertices)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def cost(self, spins):
        """MaxCut cost ``sum_ij w_ij s_i s_j`` of a +/-1 configuration."""
        s = np.asarray(spins, dtype=float)
        if s.shape != (self.n_vertices,):
            raise InvalidSizeError(
                f"configuration has length {s.size}, graph has {self.n_vertices} vertices")
        pairs, weights = self.edge_array()
        return float(np.sum(weights * s[pairs[:, 0]] * s[pairs[:, 1]]))

    def to_dict(self):
        return {"n": self.n_vertices, "kind": self.kind,
                "edges": [[i, j, w] for i, j, w in self.edges]}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        edges = tuple(sorted((min(int(i), int(j)), max(int(i), int(j)), float(w))
                             for i, j, w in data["edges"]))
        return cls(int(data["n"]), edges, str(data["kind"]))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def gen_linear(n, seed):
    """Open chain 0-1-...-(n-1) with uniform random weights."""
    if n < 2:
        raise InvalidSizeError(f"linear graph needs n >= 2, got {n}")
    w = make_rng(seed).uniform(0.0, 1.0, size=n - 1)
    return Graph(n, tuple((i, i + 1, float(w[i])) for i in range(n - 1)), "linear")


def gen_complete(n, seed):
    """Complete graph with uniform random weights, edges in lexicographic order."""
    if n < 2:
        raise InvalidSizeError(f"complete graph needs n >= 2, got {n}")
    rng = make_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    w = rng.uniform(0.0, 1.0, size=len(pairs))
    return Graph(n, tuple((i, j, float(x)) for (i, j), x in zip(pairs, w)), "complete")


def _pairing_attempt(n, rng):
    """One configuration-model draw; ``None`` if it has a loop or multi-edge."""
    stubs = np.repeat(np.arange(n), 3)
    rng.shuffle(stubs)
    ends = stubs.reshape(-1, 2)
    lo = ends.min(axis=1)
    hi = ends.max(axis=1)
    if np.any(lo == hi):
        return None
    edges = set(zip(lo.tolist(), hi.tolist()))
    if len(edges) != len(lo):
        return None
    return sorted(edges)


def gen_regular3(n, seed, max_attempts=100_000):
    """Uniform-weight simple connected 3-regular graph.

    Samples the pairing (configuration) model and rejects any draw containing
    a self-loop, a parallel edge, or more than one connected component.
    """
    if n < 4 or n % 2:
        raise InvalidSizeError(f"3-regular graph needs even n >= 4, got {n}")
    rng = make_rng(seed)
    for _ in range(max_attempts):
        edges = _pairing_attempt(n, rng)
        if edges is None:
            continue
        g = Graph(n, tuple((i, j, 1.0) for i, j in edges), "regular3")
        if is_connected(g):
            return g
    raise RuntimeError(f"no simple connected 3-regular graph after {max_attempts} draws")


_GENERATORS = {"linear": gen_linear, "regular3": gen_regular3, "complete": gen_complete}


def generate(kind, n, seed):
    """Dispatch to the generator for ``kind``."""
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown graph kind {kind!r}; expected one of {KINDS}") from None
    return gen(n, seed)


def _bfs_distances(adj, source):
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_connected(g):
    if g.n_vertices <= 1:
        return True
    return min(_bfs_distances(g.adjacency_list(), 0)) >= 0


def avg_shortest_path(g):
    """Mean hop-count distance over all unordered vertex pairs (BFS from every vertex)."""
    adj = g.adjacency_list()
    n = g.n_vertices
    if n < 2:
        raise InvalidSizeError("need at least two vertices")
    total = 0
    for src in range(n):
        dist = _bfs_distances(adj, src)
        if min(dist) < 0:
            raise ConnectivityError("graph is disconnected")
        total += sum(dist)
    # every pair counted twice
    return total / (n * (n - 1))


def maxcut_bruteforce(g, atol=1e-12):
    """Exhaustive minimum of the MaxCut cost over all 2**n spin configurations.

    Returns
    -------
    min_cost : float
    argmin : list of tuple
        Every configuration (entries +1/-1, vertex 0 first) whose cost is
        within ``atol`` of the minimum. The list is closed under global flip.
    """
    n = g.n_vertices
    if n > MAX_BRUTEFORCE_N:
        raise InvalidSizeError(f"brute force limited to n <= {MAX_BRUTEFORCE_N}, got {n}")
    pairs, weights = g.edge_array()
    chunk = 1 << min(n, _CHUNK_BITS)
    shifts = np.arange(n, dtype=np.int64)

    def chunk_costs(start):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        spins = 1 - 2 * ((idx[:, None] >> shifts[None, :]) & 1)
        return idx, (spins[:, pairs[:, 0]] * spins[:, pairs[:, 1]]) @ weights

    best = np.inf
    for start in range(0, 1 << n, chunk):
        _, costs = chunk_costs(start)
        best = min(best, float(costs.min()))
    argmin = []
    for start in range(0, 1 << n, chunk):
        idx, costs = chunk_costs(start)
        for b in idx[np.abs(costs - best) <= atol]:
            argmin.append(tuple(int(1 - 2 * ((b >> i) & 1)) for i in range(n)))
    return best, argmin
