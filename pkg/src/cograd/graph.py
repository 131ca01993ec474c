"""Undirected weighted graphs in CSR form, plus file I/O, generators and sampling.

Every other module consumes the :class:`Graph` type defined here. Graphs are
immutable after construction: node count, a canonical edge list (u < v, sorted),
a compressed sparse row adjacency, and the weighted degree vector.
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "ObservedSample",
    "GsetFormatError",
    "parse_gset",
    "write_gset",
    "load_gset",
    "generate_d_regular",
    "generate_erdos_renyi",
    "sample_observed_subgraph",
    "renormalized_adjacency",
]


class GsetFormatError(ValueError):
    """Raised for malformed Gset-format input; the message names the line."""


class Graph:
    """Immutable undirected weighted graph.

    Parameters
    ----------
    n : int
        Number of nodes, labeled 0..n-1. Isolated nodes are legal.
    edges : iterable of (u, v) or (u, v, w)
        Undirected edges with 0-based endpoints; weight defaults to 1.0.
        Self-loops and duplicate undirected edges are rejected.

    Attributes
    ----------
    n : int
    edge_u, edge_v : int64 arrays, shape (m,)
        Canonical endpoints with edge_u < edge_v, sorted lexicographically.
    edge_w : float64 array, shape (m,)
    indptr, indices, weights : CSR adjacency over both edge directions.
    degree : float64 array, shape (n,)
        Weighted degree: sum of incident edge weights per node.
    """

    def __init__(self, n: int, edges: Iterable[Sequence[float]] = ()):
        if n < 0:
            raise ValueError("node count must be nonnegative")
        us, vs, ws = [], [], []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if u > v:
                u, v = v, u
            us.append(u)
            vs.append(v)
            ws.append(float(w))

        edge_u = np.asarray(us, dtype=np.int64)
        edge_v = np.asarray(vs, dtype=np.int64)
        edge_w = np.asarray(ws, dtype=np.float64)
        order = np.lexsort((edge_v, edge_u))
        edge_u, edge_v, edge_w = edge_u[order], edge_v[order], edge_w[order]
        key = edge_u * max(n, 1) + edge_v
        if len(key) > 1 and np.any(np.diff(key) == 0):
            i = int(np.nonzero(np.diff(key) == 0)[0][0])
            raise ValueError(f"duplicate edge ({edge_u[i + 1]},{edge_v[i + 1]})")

        self.n = n
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.edge_w = edge_w

        # CSR over both directions, neighbor lists sorted per row.
        src = np.concatenate([edge_u, edge_v])
        dst = np.concatenate([edge_v, edge_u])
        wts = np.concatenate([edge_w, edge_w])
        order = np.lexsort((dst, src))
        src, dst, wts = src[order], dst[order], wts[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        self.indices = dst
        self.weights = wts
        self.degree = np.zeros(n, dtype=np.float64)
        np.add.at(self.degree, src, wts)

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return len(self.edge_u)

    @cached_property
    def edges(self) -> tuple[tuple[int, int, float], ...]:
        """Canonical edge list as (u, v, w) tuples with u < v, sorted."""
        return tuple(
            (int(u), int(v), float(w))
            for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w)
        )

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor indices of node v (read-only view)."""
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def neighbor_weights(self, v: int) -> np.ndarray:
        """Weights aligned with :meth:`neighbors`."""
        return self.weights[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def adjacency(self) -> sp.csr_array:
        """Symmetric weighted adjacency as a scipy CSR array."""
        src = np.concatenate([self.edge_u, self.edge_v])
        dst = np.concatenate([self.edge_v, self.edge_u])
        wts = np.concatenate([self.edge_w, self.edge_w])
        return sp.csr_array((wts, (src, dst)), shape=(self.n, self.n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.edge_w, other.edge_w)
        )

    def __hash__(self):
        return hash((self.n, self.edge_u.tobytes(), self.edge_v.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class ObservedSample:
    """A node-induced subgraph drawn from a larger graph.

    ``kept_nodes`` are the retained original indices, strictly increasing.
    ``observed_graph`` is relabeled to 0..k-1 in kept order, so
    ``kept_nodes[i]`` is the original index of observed node i.
    """

    kept_nodes: np.ndarray
    observed_graph: Graph
    original_n: int

    @property
    def node_map(self) -> np.ndarray:
        """Observed index -> original index (alias for ``kept_nodes``)."""
        return self.kept_nodes


def _format_weight(w: float) -> str:
    if w == int(w):
        return str(int(w))
    return repr(float(w))


def parse_gset(text: str | bytes) -> Graph:
    """Parse Gset-format text: a header line ``n m`` then m lines ``i j w``.

    Node indices in the file are 1-based; the returned graph is 0-based.
    The weight token may be any integer (negative weights occur in the wild)
    or a decimal; a missing weight defaults to 1.

    Raises
    ------
    GsetFormatError
        On malformed lines, out-of-range indices, self-loops or duplicate
        edges; the message names the 1-based line number.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.splitlines()
    if not lines:
        raise GsetFormatError("line 1: missing 'n m' header")
    header = lines[0].split()
    if len(header) != 2:
        raise GsetFormatError(f"line 1: expected 'n m', got {lines[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GsetFormatError(f"line 1: expected 'n m', got {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise GsetFormatError("line 1: n and m must be nonnegative")

    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    lineno = 1
    for raw in lines[1:]:
        lineno += 1
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) not in (2, 3):
            raise GsetFormatError(f"line {lineno}: expected 'i j w', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GsetFormatError(
                f"line {lineno}: expected 'i j w', got {raw!r}"
            ) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise GsetFormatError(f"line {lineno}: node index out of range 1..{n}")
        if i == j:
            raise GsetFormatError(f"line {lineno}: self-loop at node {i}")
        u, v = (i - 1, j - 1) if i < j else (j - 1, i - 1)
        if (u, v) in seen:
            raise GsetFormatError(f"line {lineno}: duplicate edge ({i},{j})")
        seen.add((u, v))
        edges.append((u, v, w))
    if len(edges) != m:
        raise GsetFormatError(
            f"line {lineno}: header declares {m} edges, found {len(edges)}"
        )
    return Graph(n, edges)


def write_gset(g: Graph) -> str:
    """Serialize a graph to Gset format with canonical (u < v, sorted) edges.

    Round trip: ``parse_gset(write_gset(g)) == g`` for any valid graph.
    """
    out = [f"{g.n} {g.m}"]
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        out.append(f"{u + 1} {v + 1} {_format_weight(w)}")
    return "\n".join(out) + "\n"


def load_gset(path: str | Path) -> Graph:
    """Read a Gset file; transparently gunzips when the name ends in ``.gz``."""
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return parse_gset(f.read())
    return parse_gset(path.read_text())


def generate_d_regular(n: int, d: int, seed: int) -> Graph:
    """Uniform-ish random simple d-regular graph via the pairing model.

    Stubs are shuffled and paired; any self-loop or duplicate edge discards
    the whole pairing and restarts. Deterministic for fixed (n, d, seed).
    Restart counts grow sharply as d approaches n, so the generator suits
    sparse regular graphs (the d = 3, 5 benchmark regime) and tiny dense
    ones; it is not meant for dense d at large n.

    Raises
    ------
    ValueError
        If n*d is odd (no such graph exists) or d >= n.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if d >= n:
        raise ValueError(f"degree d={d} requires more than {n} nodes")
    if d < 0:
        raise ValueError("d must be nonnegative")
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d = {n * d} is odd; no {d}-regular graph on {n} nodes")
    if d == 0:
        return Graph(n)

    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    while True:
        rng.shuffle(stubs)
        u = np.minimum(stubs[0::2], stubs[1::2])
        v = np.maximum(stubs[0::2], stubs[1::2])
        if np.any(u == v):
            continue
        key = u * n + v
        if len(np.unique(key)) < len(key):
            continue
        return Graph(n, zip(u, v))


def generate_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Seeded G(n, p) random graph with unit weights."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must be in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    return Graph(n, zip(iu[mask], iv[mask]))


def sample_observed_subgraph(g: Graph, fraction: float, seed: int) -> ObservedSample:
    """Keep round(fraction * n) uniformly sampled nodes and induce their edges.

    Sampling is a seeded shuffle followed by a prefix take, so the same seed
    reproduces the same sample bit-for-bit. The observed edge set is exactly
    the edges of g with both endpoints kept.

    Raises
    ------
    ValueError
        If the fraction is outside (0, 1] or rounds to zero kept nodes.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    k = int(np.floor(fraction * g.n + 0.5))
    if k == 0:
        raise ValueError(f"fraction {fraction} keeps zero of {g.n} nodes")
    rng = np.random.default_rng(seed)
    kept = np.sort(rng.permutation(g.n)[:k])
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[kept] = np.arange(k)
    both = (pos[g.edge_u] >= 0) & (pos[g.edge_v] >= 0)
    induced = zip(pos[g.edge_u[both]], pos[g.edge_v[both]], g.edge_w[both])
    return ObservedSample(
        kept_nodes=kept,
        observed_graph=Graph(k, induced),
        original_n=g.n,
    )


def renormalized_adjacency(g: Graph) -> sp.csr_array:
    """Self-loop-augmented, symmetrically normalized adjacency.

    Returns the sparse matrix with entries (A + I)_ij / sqrt(dh_i * dh_j),
    where dh is the row sum of A + I. The added identity keeps isolated
    nodes well defined (dh = 1).

    Raises
    ------
    ValueError
        If negative edge weights push some augmented row sum to <= 0, making
        the normalization undefined.
    """
    dh = g.degree + 1.0
    if np.any(dh <= 0.0):
        bad = int(np.argmin(dh))
        raise ValueError(
            f"augmented degree of node {bad} is {dh[bad]:g}; "
            "normalization needs positive row sums"
        )
    inv_sqrt = 1.0 / np.sqrt(dh)
    a = g.adjacency().tolil()
    a.setdiag(1.0)
    a = a.tocsr()
    scale = sp.dia_array((inv_sqrt[None, :], [0]), shape=(g.n, g.n)).tocsr()
    return scale @ a @ scale
