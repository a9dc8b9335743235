"""Single-excitation dynamics of a lossy atom-cavity network.

The no-jump state is ``sum_k alpha_k |1_k^C> + beta_k |1_k^A>`` and evolves
under ``i d/dt [alpha; beta] = eta [alpha; beta]`` with

    eta = [[(w_c - i G_c/2) 1 + K,  g* 1             ],
           [g 1,                    (w_a - i G_a/2) 1 ]].

A jump sends the state to the network vacuum, so the trajectory ensemble is
``rho = |psi><psi| + (1 - <psi|psi>) |vac><vac|`` exactly. Units: hbar = 1 and,
in configs, every frequency is expressed in units of the cavity coupling.

Two propagator backends are provided: a closed form that diagonalises ``K``
once and assembles ``exp(-i t eta)`` from scalar functions of its eigenvalues,
and a generic dense matrix exponential used as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NonHermitianError, NumericalInvariantError
from .graphs import NetworkGraph, NodeCoord

__all__ = [
    "SystemParams",
    "AmplitudeState",
    "DensityState",
    "EvolutionMatrix",
    "ClosedFormFactors",
    "assemble_eta",
    "closed_form_factors",
    "propagator_closed_form",
    "propagator_generic",
    "StepPropagator",
    "step_propagator",
    "step",
    "propagate",
    "density_state",
    "initial_excitation",
]

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Node frequencies, light-matter coupling and loss rates (rad/s, hbar = 1)."""

    omega_c: float
    omega_a: float
    g: complex
    gamma_c: float = 0.0
    gamma_a: float = 0.0

    def __post_init__(self):
        if self.gamma_c < 0 or self.gamma_a < 0:
            raise ValueError(
                f"loss rates must be non-negative, got gamma_c={self.gamma_c}, "
                f"gamma_a={self.gamma_a}"
            )

    @property
    def lossless(self) -> bool:
        return self.gamma_c == 0 and self.gamma_a == 0

    @property
    def cavity_eigenvalue(self) -> complex:
        return self.omega_c - 0.5j * self.gamma_c

    @property
    def atom_eigenvalue(self) -> complex:
        return self.omega_a - 0.5j * self.gamma_a

    @property
    def omega_bar(self) -> complex:
        return self.cavity_eigenvalue - self.atom_eigenvalue

    @property
    def nu_bar(self) -> complex:
        return self.cavity_eigenvalue + self.atom_eigenvalue


@dataclass(frozen=True)
class AmplitudeState:
    """Cavity amplitudes ``alpha`` and atomic amplitudes ``beta`` at ``time``."""

    alpha: np.ndarray
    beta: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=complex)
        beta = np.asarray(self.beta, dtype=complex)
        if alpha.ndim != 1 or alpha.shape != beta.shape:
            raise DimensionMismatchError(
                f"alpha and beta must be equal-length vectors, got {alpha.shape} "
                f"and {beta.shape}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_vector(cls, vec, time: float = 0.0) -> "AmplitudeState":
        vec = np.asarray(vec, dtype=complex)
        if vec.ndim != 1 or vec.size % 2:
            raise DimensionMismatchError(f"need a vector of even length, got {vec.shape}")
        n = vec.size // 2
        return cls(vec[:n].copy(), vec[n:].copy(), time)

    @property
    def n(self) -> int:
        return self.alpha.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.beta])

    @property
    def cavity_weight(self) -> float:
        return float(np.vdot(self.alpha, self.alpha).real)

    @property
    def atom_weight(self) -> float:
        return float(np.vdot(self.beta, self.beta).real)

    @property
    def norm2(self) -> float:
        return self.cavity_weight + self.atom_weight


@dataclass(frozen=True)
class DensityState:
    """Ensemble state: the no-jump branch plus the vacuum left by a jump."""

    amps: AmplitudeState
    vacuum_weight: float

    @property
    def time(self) -> float:
        return self.amps.time

    def matrix(self) -> np.ndarray:
        """Density matrix in the basis ``[vac, 1^C_0..1^C_{n-1}, 1^A_0..1^A_{n-1}]``."""
        psi = np.concatenate([[0.0], self.amps.vector])
        rho = np.outer(psi, psi.conj())
        rho[0, 0] += self.vacuum_weight
        return rho


@dataclass(frozen=True)
class EvolutionMatrix:
    """The ``2n x 2n`` generator of the amplitude dynamics, basis ``[alpha; beta]``."""

    eta: np.ndarray
    params: SystemParams
    coupling: np.ndarray

    @property
    def n(self) -> int:
        return self.coupling.shape[0]

    def is_hermitian(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.eta, self.eta.conj().T, rtol=0.0, atol=atol))


def _as_hermitian(K) -> np.ndarray:
    if isinstance(K, NetworkGraph):
        K = K.kappa * np.asarray(K.adjacency)
    K = np.atleast_2d(np.asarray(K))
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 1:
        raise DimensionMismatchError(f"coupling matrix must be square, got {K.shape}")
    scale = max(1.0, float(np.max(np.abs(K))))
    if np.max(np.abs(K - K.conj().T)) > HERMITIAN_TOL * scale:
        raise NonHermitianError("coupling matrix K is not Hermitian")
    if np.max(np.abs(np.diag(K))) > HERMITIAN_TOL * scale:
        raise NonHermitianError("coupling matrix K has self-coupling on the diagonal")
    return K


def assemble_eta(params: SystemParams, K) -> EvolutionMatrix:
    K = _as_hermitian(K)
    n = K.shape[0]
    eye = np.eye(n)
    eta = np.block(
        [
            [params.cavity_eigenvalue * eye + K, np.conj(params.g) * eye],
            [params.g * eye, params.atom_eigenvalue * eye],
        ]
    ).astype(complex)
    return EvolutionMatrix(eta, params, K)


@dataclass(frozen=True)
class ClosedFormFactors:
    """Time-independent pieces of the closed-form propagator.

    All factors are functions of ``K`` and therefore diagonal in its
    eigenbasis; they are stored as eigenvalue vectors next to the orthonormal
    eigenvectors ``basis`` (``K = basis @ diag(k_eigvals) @ basis^H``).
    """

    k_eigvals: np.ndarray
    basis: np.ndarray
    delta_eigvals: np.ndarray
    omega_eigvals: np.ndarray
    omega_bar: complex
    nu_bar: complex

    @property
    def n(self) -> int:
        return self.k_eigvals.size

    def _from_eigvals(self, vals) -> np.ndarray:
        return (self.basis * vals) @ self.basis.conj().T

    @property
    def coupling(self) -> np.ndarray:
        return self._from_eigvals(self.k_eigvals)

    @property
    def delta(self) -> np.ndarray:
        return self._from_eigvals(self.delta_eigvals)

    @property
    def omega(self) -> np.ndarray:
        return self._from_eigvals(self.omega_eigvals)

    def phase_factor(self, t: float) -> np.ndarray:
        """``exp(-i t nu_bar / 2) exp(-i t K / 2)``."""
        return self._from_eigvals(self._phase_eigvals(t))

    def _phase_eigvals(self, t: float) -> np.ndarray:
        return np.exp(-0.5j * t * (self.nu_bar + self.k_eigvals))


def closed_form_factors(params: SystemParams, K) -> ClosedFormFactors:
    K = _as_hermitian(K)
    k_eigvals, basis = np.linalg.eigh(K)
    delta = 0.5 * (params.omega_bar + k_eigvals)
    # principal root; only even functions of omega enter the propagator
    omega = np.sqrt(delta.astype(complex) ** 2 + abs(params.g) ** 2)
    return ClosedFormFactors(
        k_eigvals=k_eigvals,
        basis=basis.astype(complex),
        delta_eigvals=delta.astype(complex),
        omega_eigvals=omega,
        omega_bar=complex(params.omega_bar),
        nu_bar=complex(params.nu_bar),
    )


def _sinc(z: np.ndarray) -> np.ndarray:
    """Unnormalised ``sin(z)/z`` for complex ``z`` with the removable point filled."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    small = np.abs(z) < 1e-4
    zs = z[small] ** 2
    out[small] = 1.0 - zs / 6.0 + zs * zs / 120.0
    big = ~small
    out[big] = np.sin(z[big]) / z[big]
    return out


def _check_time(t: float) -> float:
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"propagation time must be finite and >= 0, got {t}")
    return t


def _modal_blocks(factors: ClosedFormFactors, g: complex, t: float) -> tuple[np.ndarray, ...]:
    """Per-eigenmode 2x2 blocks ``(cc, ca, ac, aa)`` of ``exp(-i t eta)``."""
    e = factors._phase_eigvals(t)
    c = np.cos(t * factors.omega_eigvals)
    s = t * _sinc(t * factors.omega_eigvals)  # Omega^{-1} sin(t Omega)
    d = factors.delta_eigvals
    return (
        e * (c - 1j * s * d),
        e * (-1j * s * np.conj(g)),
        e * (-1j * s * g),
        e * (c + 1j * s * d),
    )


def propagator_closed_form(factors: ClosedFormFactors, g: complex, t: float) -> np.ndarray:
    """``exp(-i t eta)`` from the cos / sin decomposition in the eigenbasis of ``K``.

    With ``M = [[Delta, g* 1], [g 1, -Delta]]`` one has ``M^2 = Omega^2``, so
    ``exp(-i t M) = cos(t Omega) - i Omega^{-1} sin(t Omega) M``; the remaining
    part of ``eta`` is ``(nu_bar + K)/2`` on both blocks and commutes with ``M``.
    """
    t = _check_time(t)
    if t == 0.0:
        return np.eye(2 * factors.n, dtype=complex)
    V = factors.basis
    Vh = V.conj().T
    cc, ca, ac, aa = ((V * b) @ Vh for b in _modal_blocks(factors, g, t))
    return np.block([[cc, ca], [ac, aa]])


def propagator_generic(eta: EvolutionMatrix, t: float) -> np.ndarray:
    """``exp(-i t eta)`` by dense scaling-and-squaring Pade (scipy)."""
    t = _check_time(t)
    return scipy.linalg.expm(-1j * t * eta.eta)


@dataclass(frozen=True)
class StepPropagator:
    """A fixed-step propagator ``S = exp(-i dt eta)`` and its step ``dt``.

    The closed-form backend also keeps ``S`` in factorised form: the
    eigenbasis of ``K`` plus one 2x2 block per eigenmode.
    """

    matrix: np.ndarray
    dt: float
    basis: np.ndarray | None = None
    modal_blocks: tuple[np.ndarray, ...] | None = None


def step_propagator(
    params: SystemParams, K, dt: float, backend: str = "closed_form"
) -> StepPropagator:
    dt = _check_time(dt)
    if backend == "closed_form":
        factors = closed_form_factors(params, K)
        S = propagator_closed_form(factors, params.g, dt)
        return StepPropagator(S, dt, factors.basis, _modal_blocks(factors, params.g, dt))
    if backend == "generic":
        return StepPropagator(propagator_generic(assemble_eta(params, K), dt), dt)
    raise ValueError(f"unknown backend {backend!r}")


def step(state: AmplitudeState, propagator_dt: StepPropagator) -> AmplitudeState:
    """Advance ``state`` by one fixed time step."""
    S = propagator_dt.matrix
    if S.shape != (2 * state.n, 2 * state.n):
        raise DimensionMismatchError(
            f"propagator shape {S.shape} does not match state with n={state.n}"
        )
    vec = S @ state.vector
    return AmplitudeState(vec[: state.n], vec[state.n :], state.time + propagator_dt.dt)


def propagate(state: AmplitudeState, propagator_dt: StepPropagator, steps: int) -> list[AmplitudeState]:
    """Apply ``S`` repeatedly; returns the states at steps ``0..steps``.

    With a factorised propagator the iteration runs in the eigenbasis of
    ``K``, where ``S`` is block-diagonal; the state is rotated back only for
    output. Rounding then no longer accumulates through a dense ``2n x 2n``
    product every step, which keeps the lossless norm at 1 to ~1e-15.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if propagator_dt.matrix.shape != (2 * state.n, 2 * state.n):
        raise DimensionMismatchError(
            f"propagator shape {propagator_dt.matrix.shape} does not match state with n={state.n}"
        )
    out = [state]
    if propagator_dt.modal_blocks is None:
        for _ in range(steps):
            state = step(state, propagator_dt)
            out.append(state)
        return out
    V = propagator_dt.basis
    Vh = V.conj().T
    cc, ca, ac, aa = propagator_dt.modal_blocks
    x, y = Vh @ state.alpha, Vh @ state.beta
    t0 = state.time
    for m in range(1, steps + 1):
        x, y = cc * x + ca * y, ac * x + aa * y
        out.append(AmplitudeState(V @ x, V @ y, t0 + m * propagator_dt.dt))
    return out


def density_state(state: AmplitudeState) -> DensityState:
    norm2 = state.norm2
    if norm2 > 1.0 + NORM_TOL:
        raise NumericalInvariantError(
            f"squared norm {norm2!r} exceeds 1 at t={state.time}; propagation is not contractive"
        )
    vacuum = 1.0 - norm2
    if vacuum < 0.0:
        vacuum = 0.0
    elif vacuum > 1.0:
        vacuum = 1.0
    return DensityState(state, vacuum)


def initial_excitation(graph: NetworkGraph, node, kind: str = "cavity") -> AmplitudeState:
    """Unit excitation of the cavity (or atom) at grid node ``(i1, i2)``."""
    k = NodeCoord(*node).linear_index(graph.n1, graph.n2)
    alpha = np.zeros(graph.n, dtype=complex)
    beta = np.zeros(graph.n, dtype=complex)
    if kind == "cavity":
        alpha[k] = 1.0
    elif kind == "atom":
        beta[k] = 1.0
    else:
        raise ValueError(f"kind must be 'cavity' or 'atom', got {kind!r}")
    return AmplitudeState(alpha, beta, 0.0)
