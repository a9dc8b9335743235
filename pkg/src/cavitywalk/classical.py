"""Classical random walks on the same graphs, for comparison with the quantum walk."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, IsolatedVertexError
from .graphs import NetworkGraph, NodeCoord

__all__ = [
    "ProbabilityDistribution",
    "rw_transition_matrix",
    "rw_step",
    "delta_distribution",
    "stationary_distribution",
]

MODES = ("discrete", "continuous")


@dataclass(frozen=True)
class ProbabilityDistribution:
    p: np.ndarray
    time_step: int = 0

    def __post_init__(self):
        p = np.asarray(self.p)
        if np.iscomplexobj(p):
            raise TypeError("classical distributions are real; complex input rejected")
        p = p.astype(float)
        if p.ndim != 1:
            raise DimensionMismatchError(f"distribution must be a vector, got {p.shape}")
        if np.any(p < -1e-15):
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {p.sum()!r}")
        object.__setattr__(self, "p", p)


def rw_transition_matrix(
    graph: NetworkGraph, mode: str = "discrete", rate: float = 1.0, dt: float = 1.0
) -> np.ndarray:
    """Column-stochastic one-step map ``p(t + 1) = T @ p(t)``.

    ``discrete``: hop to a uniformly chosen neighbour, ``T[i, j] = A[i, j] / deg(j)``.
    ``continuous``: the rate equation ``dp/dt = rate * (A - D) p`` integrated
    over one step ``dt``, i.e. ``T = expm(rate * (A - D) * dt)``.
    """
    A = np.asarray(graph.adjacency, dtype=float)
    deg = A.sum(axis=0)
    if not graph.is_connected():
        warnings.warn(f"graph {graph.name!r} is disconnected; the walk has no unique stationary state",
                      RuntimeWarning, stacklevel=2)
    if mode == "discrete":
        if np.any(deg == 0):
            isolated = np.flatnonzero(deg == 0).tolist()
            raise IsolatedVertexError(f"vertices {isolated} have degree 0")
        return A / deg[None, :]
    if mode == "continuous":
        if rate <= 0 or dt <= 0:
            raise ValueError(f"rate and dt must be > 0, got rate={rate}, dt={dt}")
        G = rate * (A - np.diag(deg))
        T = scipy.linalg.expm(G * dt)
        T = np.clip(T, 0.0, None)
        return T / T.sum(axis=0, keepdims=True)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def rw_step(dist: ProbabilityDistribution, T: np.ndarray) -> ProbabilityDistribution:
    T = np.asarray(T)
    if np.iscomplexobj(T):
        raise TypeError("transition matrix must be real")
    if T.shape != (dist.p.size, dist.p.size):
        raise DimensionMismatchError(
            f"transition matrix {T.shape} does not match distribution of size {dist.p.size}"
        )
    p = T @ dist.p
    return ProbabilityDistribution(p / p.sum(), dist.time_step + 1)


def delta_distribution(graph: NetworkGraph, node) -> ProbabilityDistribution:
    p = np.zeros(graph.n)
    p[NodeCoord(*node).linear_index(graph.n1, graph.n2)] = 1.0
    return ProbabilityDistribution(p, 0)


def stationary_distribution(graph: NetworkGraph) -> np.ndarray:
    """Degree-proportional stationary state of the discrete walk (uniform if regular)."""
    deg = graph.degrees()
    return deg / deg.sum()
