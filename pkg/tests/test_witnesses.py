import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavitywalk.dynamics import (
    AmplitudeState,
    SystemParams,
    density_state,
    initial_excitation,
    propagate,
    step_propagator,
)
from cavitywalk.graphs import build_torus, coupling_matrix
from cavitywalk.witnesses import (
    WitnessKind,
    all_reports,
    bipartite_report,
    quantifier,
    report,
    verify_bound_numerically,
    w_expectation_atoms,
    w_expectation_cavities,
    w_expectation_full,
    w_separable_bound,
)
from oracles import (
    full_hilbert_state,
    reduced_cavity_rho,
    w_vector,
    witness_expectations_bruteforce,
)


def random_state(rng, n, norm2=1.0):
    v = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    v *= math.sqrt(norm2) / np.linalg.norm(v)
    return AmplitudeState(v[:n], v[n:])


def fig3_state(step_count=40):
    g = build_torus(5, 5)
    prop = step_propagator(SystemParams(0.9, 1.0, 1e5), coupling_matrix(g), 1.0)
    return propagate(initial_excitation(g, (3, 3)), prop, step_count)[-1]


def test_kinds():
    assert {k.value for k in WitnessKind} == {"full", "cavities", "atoms", "bipartite"}


class TestExpectations:
    def test_single_cavity(self):
        psi = AmplitudeState([1, 0, 0, 0], [0, 0, 0, 0])
        assert w_expectation_cavities(psi) == 0.25
        assert w_expectation_full(psi) == 0.125
        assert w_expectation_atoms(psi) == 0.0

    def test_phased_w(self):
        rng = np.random.default_rng(0)
        n = 7
        psi = AmplitudeState(np.exp(1j * rng.uniform(0, 2 * np.pi, n)) / np.sqrt(n), np.zeros(n))
        assert w_expectation_cavities(psi) == pytest.approx(1.0, abs=1e-14)
        psi = AmplitudeState(np.zeros(n), np.full(n, 1 / np.sqrt(n)))
        assert w_expectation_atoms(psi) == pytest.approx(1.0, abs=1e-14)
        amp = 1 / np.sqrt(2 * n)
        psi = AmplitudeState(np.full(n, amp), -1j * np.full(n, amp))
        assert w_expectation_full(psi) == pytest.approx(1.0, abs=1e-14)

    def test_too_few_nodes(self):
        psi = AmplitudeState([1.0], [0.0])
        with pytest.raises(ValueError):
            w_expectation_cavities(psi)
        with pytest.raises(ValueError):
            w_expectation_atoms(psi)
        assert w_expectation_full(psi) == 0.5

    def test_fig3_state_against_oracle(self):
        psi = fig3_state()
        ref = witness_expectations_bruteforce(psi.alpha, psi.beta)
        assert abs(w_expectation_cavities(psi) - ref["cavities"]) < 1e-12
        assert abs(w_expectation_atoms(psi) - ref["atoms"]) < 1e-12
        assert abs(w_expectation_full(psi) - ref["full"]) < 1e-12
        assert 0 <= w_expectation_full(psi) <= 1

    @pytest.mark.parametrize("seed", range(10))
    def test_random_against_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 12))
        psi = random_state(rng, n, rng.uniform(0.05, 1.0))
        rho = density_state(psi)
        ref = witness_expectations_bruteforce(psi.alpha, psi.beta, rho.vacuum_weight)
        got = {k.value: r.expectation for k, r in all_reports(rho).items()}
        for key in ref:
            assert abs(got[key] - ref[key]) < 1e-12, key

    @pytest.mark.parametrize("seed", range(5))
    def test_full_hilbert_space_partial_trace(self, seed):
        # n = 3 nodes: 6 qubits, 64-dimensional space, explicit partial trace over atoms
        rng = np.random.default_rng(100 + seed)
        n = 3
        psi = random_state(rng, n, rng.uniform(0.2, 1.0))
        vac = 1 - psi.norm2
        full = full_hilbert_state(psi.alpha, psi.beta)
        rho_c = reduced_cavity_rho(full, vac, n)
        w = w_vector(psi.alpha)
        assert abs(np.real(w.conj() @ rho_c @ w) - w_expectation_cavities(psi)) < 1e-12
        # full-system W: order the 2n amplitudes as the qubits are ordered
        interleaved = np.ravel(np.column_stack([psi.alpha, psi.beta]))
        w_full = w_vector(interleaved)
        rho = np.outer(full, full.conj())
        rho[0, 0] += vac
        assert abs(np.real(w_full.conj() @ rho @ w_full) - w_expectation_full(psi)) < 1e-12


class TestReports:
    def test_product_state(self):
        r = bipartite_report(AmplitudeState([0.6, 0.8j], [0, 0]))
        assert r.g_max == 1.0 and r.E == 0.0

    def test_maximal_bipartite(self):
        r = bipartite_report(AmplitudeState([np.sqrt(0.5), 0], [0, np.sqrt(0.5)]))
        assert r.g_max == pytest.approx(0.5)
        assert r.expectation == pytest.approx(1.0)
        assert r.E == pytest.approx(1.0, abs=1e-12)

    def test_zero_state(self):
        with pytest.raises(ValueError):
            bipartite_report(AmplitudeState([0, 0], [0, 0]))

    def test_lossless_bipartite_plateau(self):
        g = build_torus(5, 5)
        prop = step_propagator(SystemParams(0.9, 1.0, 1e5), coupling_matrix(g), 1.0)
        states = propagate(initial_excitation(g, (3, 3)), prop, 100)
        assert report(states[0], WitnessKind.BIPARTITE).E == 0.0
        for psi in states[1:]:
            assert abs(report(psi, "bipartite").E - 1.0) < 1e-9

    def test_initial_state_is_separable(self):
        psi = initial_excitation(build_torus(5, 5), (3, 3))
        for kind, r in all_reports(psi).items():
            assert r.E == 0.0, kind

    def test_quantifier_branches(self):
        assert quantifier(0.3, 0.375) == 0.0
        assert quantifier(1.0, w_separable_bound(10)) == 1.0
        assert quantifier(0.5 + 5e-13, 0.5) == 0.0
        assert quantifier(0.75, 0.5) == pytest.approx(0.5)

    def test_report_dispatch_bounds(self):
        psi = fig3_state(10)
        n = 25
        assert report(psi, WitnessKind.FULL).g_max == w_separable_bound(2 * n)
        assert report(psi, WitnessKind.CAVITIES).g_max == w_separable_bound(n)
        assert report(psi, WitnessKind.ATOMS).g_max == w_separable_bound(n)
        for r in all_reports(psi).values():
            assert r.lambda_max == 1.0
            assert 0.0 <= r.E <= 1.0
            assert 0.0 <= r.expectation <= 1.0 + 1e-12

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10), norm2=st.floats(0.01, 1.0))
    def test_phase_invariance(self, seed, n, norm2):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, n, norm2)
        rotated = AmplitudeState(psi.alpha * np.exp(1j * rng.uniform(0, 7, n)),
                                 psi.beta * np.exp(1j * rng.uniform(0, 7, n)))
        for kind in WitnessKind:
            a, b = report(psi, kind), report(rotated, kind)
            assert abs(a.expectation - b.expectation) < 1e-12
            assert abs(a.E - b.E) < 1e-9
            assert 0.0 <= a.E <= 1.0

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8), norm2=st.floats(0.01, 1.0))
    def test_vacuum_immunity(self, seed, n, norm2):
        psi = random_state(np.random.default_rng(seed), n, norm2)
        assert all_reports(psi) == all_reports(density_state(psi))


class TestSeparableBound:
    @pytest.mark.parametrize("parties", [2, 3, 5, 25, 50])
    def test_formula_high_precision(self, parties):
        mpmath.mp.dps = 40
        ref = float((mpmath.mpf(parties - 1) / parties) ** (parties - 1))
        assert w_separable_bound(parties) == pytest.approx(ref, rel=1e-14)

    def test_known_values(self):
        assert w_separable_bound(2) == 0.5
        assert w_separable_bound(3) == pytest.approx(4 / 9)
        assert w_separable_bound(25) == pytest.approx(0.3754132467, abs=1e-10)
        assert w_separable_bound(50) == pytest.approx(0.3716017144, abs=1e-10)

    def test_monotone_and_limit(self):
        vals = [w_separable_bound(p) for p in range(2, 200)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert abs(w_separable_bound(1000) - 1 / math.e) < 1e-3

    def test_too_few_parties(self):
        with pytest.raises(ValueError):
            w_separable_bound(1)

    @pytest.mark.parametrize("parties,expected", [(2, 0.5), (3, 4 / 9), (5, 0.4096)])
    def test_numerical_maximisation(self, parties, expected):
        best = verify_bound_numerically(parties, trials=8, seed=1)
        assert abs(best - expected) < 1e-4
        assert best <= expected + 1e-6

    def test_numerical_range(self):
        with pytest.raises(ValueError):
            verify_bound_numerically(9, 1, 0)
        with pytest.raises(ValueError):
            verify_bound_numerically(1, 1, 0)
