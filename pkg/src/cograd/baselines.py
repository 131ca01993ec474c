"""Classical baselines: degree-based greedy placement and 1-flip local search.

Both are deterministic, always return feasible assignments, and share the
tie-breaking rules documented on :func:`dga`.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph
from .qubo import BinaryAssignment, ProblemKind, is_feasible

__all__ = ["dga", "one_flip_local_search"]


def dga(kind: ProblemKind, g: Graph) -> BinaryAssignment:
    """Degree-based greedy assignment.

    MaxCut: nodes are visited in descending weighted degree (ties to the
    smaller index); each is placed on the side that cuts more weight against
    already-placed neighbors, ties landing in the selected set.
    MIS: repeatedly take the node of minimum residual degree (ties to the
    smaller index) and delete it together with its neighbors.
    MVC: repeatedly take the node of maximum residual degree (ties to the
    smaller index) and delete its incident edges until none remain.
    """
    kind = ProblemKind(kind)
    if kind is ProblemKind.MAXCUT:
        return _dga_maxcut(g)
    if kind is ProblemKind.MIS:
        return _dga_mis(g)
    return _dga_mvc(g)


def _dga_maxcut(g: Graph) -> np.ndarray:
    x = np.zeros(g.n, dtype=np.int64)
    placed = np.zeros(g.n, dtype=bool)
    order = np.lexsort((np.arange(g.n), -g.degree))
    for v in order:
        nbrs = g.neighbors(v)
        wts = g.neighbor_weights(v)
        seen = placed[nbrs]
        gain_in = float(np.sum(wts[seen & (x[nbrs] == 0)]))
        gain_out = float(np.sum(wts[seen & (x[nbrs] == 1)]))
        x[v] = 1 if gain_in >= gain_out else 0
        placed[v] = True
    return x


def _residual_degrees(g: Graph, alive: np.ndarray) -> np.ndarray:
    deg = np.zeros(g.n, dtype=np.int64)
    live = alive[g.edge_u] & alive[g.edge_v]
    np.add.at(deg, g.edge_u[live], 1)
    np.add.at(deg, g.edge_v[live], 1)
    return deg


def _dga_mis(g: Graph) -> np.ndarray:
    x = np.zeros(g.n, dtype=np.int64)
    alive = np.ones(g.n, dtype=bool)
    while np.any(alive):
        deg = _residual_degrees(g, alive)
        deg = np.where(alive, deg, np.iinfo(np.int64).max)
        v = int(np.argmin(deg))
        x[v] = 1
        alive[v] = False
        alive[g.neighbors(v)] = False
    return x


def _dga_mvc(g: Graph) -> np.ndarray:
    x = np.zeros(g.n, dtype=np.int64)
    covered = np.zeros(g.m, dtype=bool)
    while not np.all(covered):
        deg = np.zeros(g.n, dtype=np.int64)
        np.add.at(deg, g.edge_u[~covered], 1)
        np.add.at(deg, g.edge_v[~covered], 1)
        v = int(np.argmax(deg))
        x[v] = 1
        covered |= (g.edge_u == v) | (g.edge_v == v)
    return x


def one_flip_local_search(
    kind: ProblemKind, g: Graph, x0: BinaryAssignment
) -> BinaryAssignment:
    """First-improvement single-bit local search from a feasible start.

    Scans nodes in ascending index, applying any flip that preserves
    feasibility and strictly improves the objective, until a full scan finds
    none. Every accepted flip strictly improves a bounded objective, so the
    search terminates.

    Raises
    ------
    ValueError
        If x0 is infeasible for the given problem.
    """
    kind = ProblemKind(kind)
    x = np.asarray(x0, dtype=np.int64).copy()
    if not is_feasible(kind, g, x):
        raise ValueError(f"local search requires a feasible start for {kind.value}")
    improved = True
    while improved:
        improved = False
        for v in range(g.n):
            if _flip_improves(kind, g, x, v):
                x[v] = 1 - x[v]
                improved = True
    return x


def _flip_improves(kind: ProblemKind, g: Graph, x: np.ndarray, v: int) -> bool:
    nbrs = g.neighbors(v)
    if kind is ProblemKind.MAXCUT:
        wts = g.neighbor_weights(v)
        cut_now = x[nbrs] != x[v]
        # flipping v toggles the cut status of every incident edge
        return float(np.sum(wts[~cut_now]) - np.sum(wts[cut_now])) > 0.0
    if kind is ProblemKind.MIS:
        # only additions improve; admissible iff no neighbor is selected
        return x[v] == 0 and not np.any(x[nbrs] == 1)
    # MVC: only removals improve; admissible iff all neighbors stay covering
    return x[v] == 1 and bool(np.all(x[nbrs] == 1))
