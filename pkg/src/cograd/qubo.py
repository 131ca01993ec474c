"""QUBO encodings of MaxCut / MIS / MVC and exact small-instance optimization.

All three problems are cast as minimization of a quadratic Hamiltonian
H(x) = sum_ij x_i Q_ij x_j + offset over binary x, with constraints folded in
as penalty terms. Diagonal entries carry the linear coefficients (x_i^2 = x_i
on binaries); when H is evaluated on a relaxed vector p in [0,1]^n the
diagonal is applied linearly, so H stays the multilinear extension of its
binary values.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .graph import Graph

__all__ = [
    "BinaryAssignment",
    "ProblemKind",
    "QuboMatrix",
    "build_qubo",
    "eval_hamiltonian",
    "objective",
    "is_feasible",
    "brute_force_optimum",
    "export_coordinate_text",
]

_ENUM_LIMIT = 24

# Length-n integer array over {0, 1}; one decision per node.
BinaryAssignment = np.ndarray


class ProblemKind(str, Enum):
    """The three supported node-decision problems."""

    MAXCUT = "maxcut"
    MIS = "mis"
    MVC = "mvc"

    @property
    def maximize(self) -> bool:
        """True when larger objectives are better (MaxCut, MIS)."""
        return self is not ProblemKind.MVC


class QuboMatrix:
    """Sparse symmetric quadratic form plus a constant offset.

    ``entries`` maps canonical index pairs (i <= j) to the symmetric matrix
    coefficient Q_ij; the monomial x_i * x_j therefore enters H with
    coefficient 2 * Q_ij for i < j and the diagonal enters linearly.
    ``penalty`` records the constraint coefficient used at build time
    (0 for MaxCut).
    """

    def __init__(
        self,
        n: int,
        entries: dict[tuple[int, int], float],
        offset: float = 0.0,
        penalty: float = 0.0,
    ):
        self.n = n
        self.offset = float(offset)
        self.penalty = float(penalty)
        self.entries: dict[tuple[int, int], float] = {}
        diag = np.zeros(n, dtype=np.float64)
        rows, cols, vals = [], [], []
        for (i, j), c in entries.items():
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"entry ({i},{j}) out of range for n={n}")
            if i > j:
                i, j = j, i
            key = (i, j)
            self.entries[key] = self.entries.get(key, 0.0) + float(c)
        for (i, j), c in self.entries.items():
            if i == j:
                diag[i] = c
            else:
                rows.append(i)
                cols.append(j)
                vals.append(c)
        self._diag = diag
        self._rows = np.asarray(rows, dtype=np.int64)
        self._cols = np.asarray(cols, dtype=np.int64)
        self._vals = np.asarray(vals, dtype=np.float64)
        # Full symmetric off-diagonal matrix, used by value and gradient.
        self._offdiag = sp.csr_array(
            (
                np.concatenate([self._vals, self._vals]),
                (
                    np.concatenate([self._rows, self._cols]),
                    np.concatenate([self._cols, self._rows]),
                ),
            ),
            shape=(n, n),
        )

    def value(self, x: np.ndarray) -> float:
        """H(x) for binary or relaxed x (diagonal applied linearly)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"assignment has shape {x.shape}, expected ({self.n},)")
        return float(x @ (self._offdiag @ x) + self._diag @ x + self.offset)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """dH/dx = 2 * Q_offdiag @ x + diag."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"assignment has shape {x.shape}, expected ({self.n},)")
        return 2.0 * (self._offdiag @ x) + self._diag

    def __repr__(self) -> str:
        return f"QuboMatrix(n={self.n}, nnz={len(self.entries)}, offset={self.offset:g})"


def build_qubo(kind: ProblemKind, g: Graph, penalty: float = 2.0) -> QuboMatrix:
    """Encode a problem on g as a Hamiltonian to minimize.

    Encodings (w is the edge weight; constraints scale with it so that soft
    predicted adjacencies plug in as real weights):

    * MaxCut:  H = sum_E w (2 x_u x_v - x_u - x_v), so -H(x) is the cut weight.
    * MIS:     H = -sum_i x_i + P sum_E w x_u x_v.
    * MVC:     H =  sum_i x_i + P sum_E w (1 - x_u)(1 - x_v).

    The constant from the MVC expansion lives in the offset, keeping the
    matrix purely linear/quadratic while H(x) stays exact. For MIS/MVC any
    penalty P > 1 makes constraint violations strictly unprofitable at unit
    weights; P <= 1 is rejected.
    """
    kind = ProblemKind(kind)
    entries: dict[tuple[int, int], float] = {}
    offset = 0.0

    def add(i: int, j: int, c: float) -> None:
        key = (i, j) if i <= j else (j, i)
        entries[key] = entries.get(key, 0.0) + c

    if kind is ProblemKind.MAXCUT:
        penalty = 0.0
        for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
            add(int(u), int(v), w)
            add(int(u), int(u), -w)
            add(int(v), int(v), -w)
    else:
        if penalty <= 1.0:
            raise ValueError(f"penalty must exceed 1 for {kind.value}, got {penalty}")
        sign = -1.0 if kind is ProblemKind.MIS else 1.0
        for i in range(g.n):
            add(i, i, sign)
        for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
            pw = penalty * w
            add(int(u), int(v), pw / 2.0)
            if kind is ProblemKind.MVC:
                add(int(u), int(u), -pw)
                add(int(v), int(v), -pw)
                offset += pw

    q = QuboMatrix(g.n, entries, offset=offset, penalty=penalty)
    return q


def eval_hamiltonian(q: QuboMatrix, x: Iterable[float]) -> float:
    """Quadratic-form value of x plus the stored offset.

    Accepts binary assignments and relaxed vectors alike; a binary x cast to
    reals evaluates identically bit for bit.
    """
    return q.value(np.asarray(list(x) if not hasattr(x, "__len__") else x))


def objective(kind: ProblemKind, g: Graph, x: Iterable[float]) -> float:
    """Problem objective of a binary assignment, feasible or not.

    MaxCut: total weight of edges with endpoints on opposite sides.
    MIS / MVC: number of selected nodes.
    """
    kind = ProblemKind(kind)
    xa = _as_binary(x, g.n)
    if kind is ProblemKind.MAXCUT:
        cut = xa[g.edge_u] != xa[g.edge_v]
        return float(np.sum(g.edge_w[cut]))
    return float(np.sum(xa))


def is_feasible(kind: ProblemKind, g: Graph, x: Iterable[float]) -> bool:
    """Check the edge constraints: none for MaxCut, x_u + x_v <= 1 on every
    edge for MIS, x_u + x_v >= 1 for MVC."""
    kind = ProblemKind(kind)
    xa = _as_binary(x, g.n)
    if kind is ProblemKind.MAXCUT:
        return True
    su, sv = xa[g.edge_u] == 1, xa[g.edge_v] == 1
    if kind is ProblemKind.MIS:
        return not bool(np.any(su & sv))
    return bool(np.all(su | sv))


def brute_force_optimum(kind: ProblemKind, g: Graph) -> tuple[np.ndarray, float]:
    """Exhaustive optimum over all feasible binary assignments.

    Ties resolve to the lexicographically smallest bit string
    (x_0 most significant). Guarded to n <= 24; runtime is O(2^n * m).
    """
    kind = ProblemKind(kind)
    n = g.n
    if n > _ENUM_LIMIT:
        raise ValueError(f"n={n} exceeds the enumeration limit {_ENUM_LIMIT}")
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0.0

    # Bit i of the mask holds x_i at significance n-1-i, so ascending mask
    # order is lexicographic order of bit strings and first-best wins ties.
    shifts = (n - 1 - np.arange(n)).astype(np.int64)
    best_val = -np.inf if kind.maximize else np.inf
    best_bits: np.ndarray | None = None
    chunk = 1 << min(n, 16)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.int8)
        if kind is ProblemKind.MAXCUT:
            cut = bits[:, g.edge_u] != bits[:, g.edge_v]
            vals = cut @ g.edge_w
        else:
            sizes = bits.sum(axis=1, dtype=np.int64).astype(np.float64)
            su = bits[:, g.edge_u] == 1
            sv = bits[:, g.edge_v] == 1
            if kind is ProblemKind.MIS:
                ok = ~np.any(su & sv, axis=1)
                vals = np.where(ok, sizes, -np.inf)
            else:
                ok = np.all(su | sv, axis=1)
                vals = np.where(ok, sizes, np.inf)
        i = int(np.argmax(vals)) if kind.maximize else int(np.argmin(vals))
        v = float(vals[i])
        if (kind.maximize and v > best_val) or (not kind.maximize and v < best_val):
            best_val = v
            best_bits = bits[i].astype(np.int64)
    assert best_bits is not None
    return best_bits, best_val


def export_coordinate_text(q: QuboMatrix) -> str:
    """Coordinate-list text form: header ``n offset`` then ``i j coeff`` lines
    for the canonically stored (i <= j) entries, sorted."""
    lines = [f"{q.n} {_fmt(q.offset)}"]
    for (i, j) in sorted(q.entries):
        lines.append(f"{i} {j} {_fmt(q.entries[(i, j)])}")
    return "\n".join(lines) + "\n"


def _fmt(c: float) -> str:
    if c == int(c):
        return str(int(c))
    return repr(c)


def _as_binary(x: Iterable[float], n: int) -> np.ndarray:
    xa = np.asarray(x)
    if xa.shape != (n,):
        raise ValueError(f"assignment has shape {xa.shape}, expected ({n},)")
    return xa.astype(np.int64)
