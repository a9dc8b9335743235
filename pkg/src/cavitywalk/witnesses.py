"""Witness-based entanglement quantifiers for single-excitation network states.

Each quantifier compares the expectation ``<L>`` of a rank-one projector with
its largest value over separable states ``g_max``:

    E = 0                              if <L> <= g_max
    E = (<L> - g_max) / (1 - g_max)    otherwise.

The three multipartite kinds project onto a phased W state whose phases
follow the state's own amplitudes; the bipartite kind projects onto the
normalised no-jump state and uses its largest Schmidt coefficient as the
bound. The vacuum part of the ensemble never overlaps a single-excitation
projector, so every value can be computed from the amplitudes alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .dynamics import AmplitudeState, DensityState

__all__ = [
    "WitnessKind",
    "EntanglementReport",
    "w_expectation_cavities",
    "w_expectation_atoms",
    "w_expectation_full",
    "w_separable_bound",
    "bipartite_report",
    "report",
    "all_reports",
    "verify_bound_numerically",
    "quantifier",
]

LAMBDA_MAX = 1.0
DETECTION_TOL = 1e-12


class WitnessKind(enum.Enum):
    FULL = "full"
    CAVITIES = "cavities"
    ATOMS = "atoms"
    BIPARTITE = "bipartite"


@dataclass(frozen=True)
class EntanglementReport:
    kind: WitnessKind
    expectation: float
    g_max: float
    E: float
    time: float
    lambda_max: float = LAMBDA_MAX


def _amps(state) -> AmplitudeState:
    return state.amps if isinstance(state, DensityState) else state


def quantifier(expectation: float, g_max: float, lambda_max: float = LAMBDA_MAX) -> float:
    if expectation - g_max < DETECTION_TOL:
        return 0.0
    return min(1.0, (expectation - g_max) / (lambda_max - g_max))


def _w_overlap(amplitudes: np.ndarray) -> float:
    # phases of the W state set to arg(amplitude); zero amplitudes take phase 0
    return float(np.sum(np.abs(amplitudes)) ** 2 / amplitudes.size)


def w_expectation_cavities(state) -> float:
    """``(sum_k |alpha_k|)^2 / n``: overlap of the cavity state with the best phased W state."""
    amps = _amps(state)
    if amps.n < 2:
        raise ValueError("cavity-only entanglement needs at least 2 nodes")
    return _w_overlap(amps.alpha)


def w_expectation_atoms(state) -> float:
    amps = _amps(state)
    if amps.n < 2:
        raise ValueError("atom-only entanglement needs at least 2 nodes")
    return _w_overlap(amps.beta)


def w_expectation_full(state) -> float:
    """``[sum_k (|alpha_k| + |beta_k|)]^2 / (2n)`` over all cavities and atoms."""
    amps = _amps(state)
    if amps.n < 1:
        raise ValueError("empty state")
    return _w_overlap(amps.vector)


def w_separable_bound(parties: int) -> float:
    """Largest W-state overlap reachable by a product of ``parties`` qubits."""
    if parties < 2:
        raise ValueError(f"need at least 2 parties, got {parties}")
    return ((parties - 1) / parties) ** (parties - 1)


def bipartite_report(state) -> EntanglementReport:
    amps = _amps(state)
    wa, wb = amps.cavity_weight, amps.atom_weight
    total = wa + wb
    if total <= 0:
        raise ValueError("bipartite bound undefined for a state with zero norm")
    g_max = max(wa, wb) / total
    return EntanglementReport(WitnessKind.BIPARTITE, total, g_max, quantifier(total, g_max), amps.time)


def report(state, kind: WitnessKind) -> EntanglementReport:
    kind = WitnessKind(kind)
    amps = _amps(state)
    if kind is WitnessKind.BIPARTITE:
        return bipartite_report(amps)
    if kind is WitnessKind.FULL:
        L, g_max = w_expectation_full(amps), w_separable_bound(2 * amps.n)
    elif kind is WitnessKind.CAVITIES:
        L, g_max = w_expectation_cavities(amps), w_separable_bound(amps.n)
    else:
        L, g_max = w_expectation_atoms(amps), w_separable_bound(amps.n)
    return EntanglementReport(kind, L, g_max, quantifier(L, g_max), amps.time)


def all_reports(state) -> dict[WitnessKind, EntanglementReport]:
    return {kind: report(state, kind) for kind in WitnessKind}


def _w_vector(parties: int) -> np.ndarray:
    w = np.zeros(2**parties)
    for k in range(parties):
        # qubit k excited, ordered most-significant first
        w[1 << (parties - 1 - k)] = 1.0
    return w / np.sqrt(parties)


def _product_state(params: np.ndarray) -> np.ndarray:
    theta, phi = params[0::2], params[1::2]
    psi = np.ones(1, dtype=complex)
    for th, ph in zip(theta, phi):
        psi = np.kron(psi, [np.cos(th), np.exp(1j * ph) * np.sin(th)])
    return psi


def verify_bound_numerically(parties: int, trials: int = 20, seed=None) -> float:
    """Maximise ``|<W|psi_1 x ... x psi_p>|^2`` over product qubit states.

    Works on the explicit ``2**parties`` state vector, independent of the
    closed-form bound. Multi-start L-BFGS over Bloch angles; returns the best
    overlap found.
    """
    if not 2 <= parties <= 8:
        raise ValueError(f"numerical verification supports 2..8 parties, got {parties}")
    if trials < 1:
        raise ValueError("need at least one trial")
    w = _w_vector(parties)
    rng = np.random.default_rng(seed)

    def neg_overlap(x):
        return -abs(np.vdot(w, _product_state(x))) ** 2

    best = 0.0
    for _ in range(trials):
        x0 = np.empty(2 * parties)
        x0[0::2] = rng.uniform(0, np.pi / 2, parties)
        x0[1::2] = rng.uniform(0, 2 * np.pi, parties)
        res = scipy.optimize.minimize(neg_overlap, x0, method="L-BFGS-B",
                                      options={"ftol": 1e-15, "gtol": 1e-12})
        best = max(best, -float(res.fun))
    return best
