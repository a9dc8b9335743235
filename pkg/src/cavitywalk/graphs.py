"""Network topologies for coupled cavity arrays.

Vertices of the built-in families live on an ``n1 x n2`` grid with 1-based
coordinates ``(i1, i2)``. Every module uses the same flattening

    k = (i1 - 1) * n2 + (i2 - 1)

so the cavity amplitudes, atomic amplitudes and classical probabilities all
share one basis ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    AsymmetryError,
    DimensionTooSmallError,
    EdgeListParseError,
    InvalidCouplingError,
    NegativeWeightError,
    OutOfBoundsError,
    SelfLoopError,
)

__all__ = [
    "NodeCoord",
    "NetworkGraph",
    "build_torus",
    "build_moebius",
    "load_custom",
    "coupling_matrix",
]


class NodeCoord(NamedTuple):
    i1: int
    i2: int

    def linear_index(self, n1: int, n2: int) -> int:
        if not (1 <= self.i1 <= n1 and 1 <= self.i2 <= n2):
            raise OutOfBoundsError(
                f"node ({self.i1}, {self.i2}) outside {n1}x{n2} grid"
            )
        return (self.i1 - 1) * n2 + (self.i2 - 1)

    @classmethod
    def from_linear(cls, k: int, n1: int, n2: int) -> "NodeCoord":
        if not 0 <= k < n1 * n2:
            raise OutOfBoundsError(f"linear index {k} outside [0, {n1 * n2})")
        return cls(k // n2 + 1, k % n2 + 1)


@dataclass(frozen=True)
class NetworkGraph:
    """Immutable undirected graph with a uniform coupling strength ``kappa``.

    ``adjacency`` may carry real weights for custom graphs; the built-in
    families are 0/1. The array is made read-only on construction.
    """

    n1: int
    n2: int
    adjacency: np.ndarray
    kappa: float
    name: str = field(default="custom")

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise AsymmetryError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] != self.n1 * self.n2:
            raise AsymmetryError(
                f"adjacency size {adj.shape[0]} != n1*n2 = {self.n1 * self.n2}"
            )
        if not np.isfinite(self.kappa) or self.kappa <= 0:
            raise InvalidCouplingError(f"kappa must be > 0, got {self.kappa}")
        if np.any(np.diag(adj) != 0):
            raise SelfLoopError("adjacency has non-zero diagonal (self-coupling)")
        if np.any(adj < 0):
            raise NegativeWeightError("adjacency has negative entries")
        if not np.array_equal(adj, adj.T):
            raise AsymmetryError("adjacency is not symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    def degrees(self) -> np.ndarray:
        """Weighted vertex degrees (row sums of the adjacency)."""
        return self.adjacency.sum(axis=0)

    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency)))

    def index(self, node) -> int:
        return NodeCoord(*node).linear_index(self.n1, self.n2)

    def coord(self, k: int) -> NodeCoord:
        return NodeCoord.from_linear(k, self.n1, self.n2)

    def neighbors(self, node) -> set[NodeCoord]:
        k = self.index(node)
        return {self.coord(int(j)) for j in np.flatnonzero(self.adjacency[k])}

    def is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            k = stack.pop()
            for j in np.flatnonzero(self.adjacency[k]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        return bool(seen.all())


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa <= 0:
        raise InvalidCouplingError(f"kappa must be > 0, got {kappa}")
    return kappa


def _grid_coords(n1: int, n2: int) -> tuple[np.ndarray, np.ndarray]:
    # 0-based coordinates of every vertex in linear-index order
    k = np.arange(n1 * n2)
    return k // n2, k % n2


def build_torus(n1: int, n2: int, kappa: float = 1.0) -> NetworkGraph:
    """Grid with periodic boundaries in both directions.

    ``A[(i1,i2),(j1,j2)] = 1`` iff the first coordinates differ by +-1 mod n1
    with equal second coordinates, or vice versa. Both dimensions must be at
    least 3; for size 2 the +1 and -1 neighbours coincide.
    """
    kappa = _check_kappa(kappa)
    if n1 < 3 or n2 < 3:
        raise DimensionTooSmallError(f"torus needs n1, n2 >= 3, got ({n1}, {n2})")
    a1, a2 = _grid_coords(n1, n2)
    i1, j1 = a1[:, None], a1[None, :]
    i2, j2 = a2[:, None], a2[None, :]
    same1 = i1 == j1
    same2 = i2 == j2
    adj = (
        ((i1 == (j1 + 1) % n1) & same2).astype(float)
        + ((i1 == (j1 - 1) % n1) & same2)
        + (same1 & (i2 == (j2 + 1) % n2))
        + (same1 & (i2 == (j2 - 1) % n2))
    )
    return NetworkGraph(n1, n2, adj, kappa, name="torus")


def build_moebius(n1: int, n2: int, kappa: float = 1.0) -> NetworkGraph:
    """Open grid whose first-coordinate ends are glued with a flip.

    Edges are the open-grid nearest neighbours plus the seam
    ``(1, i2) <-> (n1, n2 + 1 - i2)``.
    """
    kappa = _check_kappa(kappa)
    if n1 < 3 or n2 < 2:
        raise DimensionTooSmallError(
            f"Moebius strip needs n1 >= 3 and n2 >= 2, got ({n1}, {n2})"
        )
    a1, a2 = _grid_coords(n1, n2)
    i1, j1 = a1[:, None], a1[None, :]
    i2, j2 = a2[:, None], a2[None, :]
    same1 = i1 == j1
    same2 = i2 == j2
    # 0-based: i2 + j2 == n2 - 1 is the 1-based condition i2 + j2 == n2 + 1
    flipped = i2 + j2 == n2 - 1
    adj = (
        ((i1 == j1 + 1) & same2).astype(float)
        + ((i1 == j1 - 1) & same2)
        + (same1 & (i2 == j2 + 1))
        + (same1 & (i2 == j2 - 1))
        + ((i1 == 0) & (j1 == n1 - 1) & flipped)
        + ((i1 == n1 - 1) & (j1 == 0) & flipped)
    )
    return NetworkGraph(n1, n2, adj, kappa, name="moebius")


def load_custom(path, kappa: float = 1.0, n_vertices: int | None = None) -> NetworkGraph:
    """Read an undirected weighted edge list.

    One edge per line as ``<k_from> <k_to> [weight]`` with 0-based indices;
    ``#`` starts a comment. Each edge is listed once and mirrored here.
    Listing both directions is accepted only if the weights agree. The vertex
    count is one more than the largest index seen (or ``n_vertices`` when
    given, to allow trailing isolated vertices), laid out as an ``n x 1`` grid.
    An empty file describes a single isolated vertex.
    """
    kappa = _check_kappa(kappa)
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise EdgeListParseError(f"{path}: not valid UTF-8") from exc

    edges: dict[tuple[int, int], float] = {}
    n = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(f"{path}:{lineno}: expected 2 or 3 fields, got {len(parts)}")
        try:
            a, b = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise EdgeListParseError(f"{path}:{lineno}: {exc}") from exc
        if a < 0 or b < 0:
            raise EdgeListParseError(f"{path}:{lineno}: negative vertex index")
        if not np.isfinite(w):
            raise EdgeListParseError(f"{path}:{lineno}: non-finite weight")
        if a == b:
            raise SelfLoopError(f"{path}:{lineno}: self-loop on vertex {a}")
        if w < 0:
            raise NegativeWeightError(f"{path}:{lineno}: negative weight {w}")
        if (b, a) in edges and edges[(b, a)] != w:
            raise AsymmetryError(
                f"{path}:{lineno}: edge ({a}, {b}) weight {w} conflicts with "
                f"reverse weight {edges[(b, a)]}"
            )
        if (a, b) in edges and edges[(a, b)] != w:
            raise EdgeListParseError(f"{path}:{lineno}: duplicate edge ({a}, {b})")
        edges[(a, b)] = w
        n = max(n, a + 1, b + 1)

    if n_vertices is not None:
        if n_vertices < n:
            raise EdgeListParseError(f"{path}: edge index {n - 1} >= n_vertices={n_vertices}")
        n = n_vertices
    n = max(n, 1)
    adj = np.zeros((n, n))
    for (a, b), w in edges.items():
        adj[a, b] = w
        adj[b, a] = w
    return NetworkGraph(n, 1, adj, kappa, name=path.stem)


def coupling_matrix(graph: NetworkGraph) -> np.ndarray:
    """``K = kappa * A`` as a real symmetric array."""
    return graph.kappa * np.array(graph.adjacency)
