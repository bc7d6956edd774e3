"""Witness protocol: P, C, F, counting statistics, characterization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heraldghz.analysis import (
    COHERENCE_ANGLES,
    AnalysisResult,
    CountRecord,
    MeasurementSetting,
    characterize_circuit,
    coherence,
    estimate_from_counts,
    expectation_M,
    fidelity_pc,
    m_theta_operator,
    outcome_probabilities,
    population,
    project_dual_rail,
    regauge,
    simulate_counts,
)
from heraldghz.circuits import CircuitSpec, beam_splitter, compile_circuit
from heraldghz.errors import DegenerateInputError
from heraldghz.fock import DualRailRegister, enumerate_basis, ghz_state, logical_state, occ


def ghz_phi_matrix(phi):
    """(|000> + e^{i phi}|111>)/sqrt(2) as an 8x8 qubit matrix."""
    vec = np.zeros(8, dtype=complex)
    vec[0] = 1 / math.sqrt(2)
    vec[7] = np.exp(1j * phi) / math.sqrt(2)
    return np.outer(vec, vec.conj())


def mixed_qubit():
    return np.eye(8) / 8.0


class TestProjection:
    def test_ghz_subspace_weight_one(self):
        qmat, w = project_dual_rail(ghz_state().density())
        assert w == pytest.approx(1.0, abs=1e-12)
        assert qmat[0, 0] == pytest.approx(0.5)
        assert qmat[7, 0] == pytest.approx(0.5)

    def test_off_register_component_projected(self):
        basis = enumerate_basis(3, 6)
        vec = np.zeros(len(basis), dtype=complex)
        idx = {b: i for i, b in enumerate(basis)}
        vec[idx[occ(1, 0, 1, 0, 1, 0)]] = math.sqrt(0.5)
        vec[idx[occ(3, 0, 0, 0, 0, 0)]] = math.sqrt(0.5)
        from heraldghz.fock import PureState

        rho = PureState(basis, vec).density()
        qmat, w = project_dual_rail(rho)
        assert w == pytest.approx(0.5)
        assert qmat[0, 0] == pytest.approx(1.0)

    def test_zero_weight_degenerate(self):
        basis = enumerate_basis(3, 6)
        vec = np.zeros(len(basis), dtype=complex)
        idx = {b: i for i, b in enumerate(basis)}
        vec[idx[occ(3, 0, 0, 0, 0, 0)]] = 1.0
        from heraldghz.fock import PureState

        with pytest.raises(DegenerateInputError):
            project_dual_rail(PureState(basis, vec).density())


class TestWitnessQuantities:
    def test_ideal_ghz(self):
        rho = ghz_state().density()
        assert population(rho) == pytest.approx(1.0, abs=1e-9)
        assert coherence(rho) == pytest.approx(1.0, abs=1e-9)
        res = fidelity_pc(rho)
        assert res.fidelity == pytest.approx(1.0, abs=1e-9)
        assert res.entangled

    def test_maximally_mixed(self):
        assert population(mixed_qubit()) == pytest.approx(0.25)
        assert coherence(mixed_qubit()) == pytest.approx(0.0, abs=1e-12)
        res = fidelity_pc(mixed_qubit())
        assert res.fidelity == pytest.approx(0.125)
        assert not res.entangled

    def test_dephased_ghz_on_boundary(self):
        dephased = 0.5 * ghz_phi_matrix(0.0) + 0.5 * ghz_phi_matrix(math.pi)
        res = fidelity_pc(dephased)
        assert res.population == pytest.approx(1.0)
        assert res.coherence == pytest.approx(0.0, abs=1e-12)
        assert res.fidelity == pytest.approx(0.5)
        assert not res.entangled  # strict inequality

    def test_000_population_only(self):
        rho = logical_state({"000": 1.0}, DualRailRegister(), 6).density()
        assert population(rho) == pytest.approx(1.0)
        assert coherence(rho) == pytest.approx(0.0, abs=1e-12)

    def test_cos3theta_stabilizer_grid(self):
        rho = ghz_state().density()
        for theta in np.linspace(0.0, 2 * math.pi, 12, endpoint=False):
            assert expectation_M(rho, theta) == pytest.approx(
                math.cos(3 * theta), abs=1e-9
            )

    @given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 2 * math.pi))
    @settings(max_examples=40)
    def test_rotated_ghz_family(self, phi, theta):
        val = float(np.trace(ghz_phi_matrix(phi) @ m_theta_operator(theta)).real)
        assert val == pytest.approx(math.cos(3 * theta - phi), abs=1e-9)

    @given(st.integers(0, 10**9))
    @settings(max_examples=30)
    def test_coherence_equals_off_diagonal(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = m @ m.conj().T
        rho /= rho.trace().real
        assert coherence(rho) == pytest.approx(2 * rho[0, 7].real, abs=1e-9)

    @given(st.integers(0, 10**9))
    @settings(max_examples=30)
    def test_fidelity_bounds(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = m @ m.conj().T
        rho /= rho.trace().real
        res = fidelity_pc(rho)
        assert -1e-9 <= res.fidelity <= 1.0 + 1e-9


class TestOutcomeProbabilities:
    def test_computational_ghz(self):
        p = outcome_probabilities(
            ghz_state().density(), MeasurementSetting("computational")
        )
        assert p[0] == pytest.approx(0.5)
        assert p[7] == pytest.approx(0.5)
        assert p.sum() == pytest.approx(1.0)

    def test_equatorial_parity_matches_expectation(self):
        rho = ghz_state().density()
        for theta in COHERENCE_ANGLES:
            p = outcome_probabilities(rho, MeasurementSetting("equatorial", theta))
            signed = sum(
                ((-1) ** bin(out).count("1")) * p[out] for out in range(8)
            )
            assert signed == pytest.approx(expectation_M(rho, theta), abs=1e-9)


class TestSimulateCounts:
    def test_deterministic_under_seed(self):
        p = np.full(8, 1 / 8)
        a = simulate_counts(p, 1000.0, 42)
        b = simulate_counts(p, 1000.0, 42)
        assert a.counts == b.counts

    def test_support_respected(self):
        p = np.zeros(8)
        p[0] = 1.0
        rec = simulate_counts(p, 100.0, 0)
        assert rec.counts["000"] > 0
        assert all(v == 0 for k, v in rec.counts.items() if k != "000")

    def test_uniform_within_5_sigma(self):
        p = np.full(8, 1 / 8)
        rec = simulate_counts(p, 1e6, 20260826)
        mean = 125000.0
        for v in rec.counts.values():
            assert abs(v - mean) < 5 * math.sqrt(mean)

    def test_ghz_computational_concentrates(self):
        p = outcome_probabilities(
            ghz_state().density(), MeasurementSetting("computational")
        )
        rec = simulate_counts(p, 100.0, 1)
        assert sum(rec.counts.values()) == rec.counts["000"] + rec.counts["111"]

    def test_validation(self):
        with pytest.raises(ValueError):
            simulate_counts([-0.1, 1.1] + [0.0] * 6, 10.0, 0)
        with pytest.raises(ValueError):
            simulate_counts(np.full(8, 1 / 8), 0.0, 0)


def records_for(qmat, total, seed):
    recs = []
    s = MeasurementSetting("computational")
    recs.append(simulate_counts(outcome_probabilities(qmat, s), total, seed, s))
    for k, theta in enumerate(COHERENCE_ANGLES):
        s = MeasurementSetting("equatorial", theta)
        recs.append(
            simulate_counts(outcome_probabilities(qmat, s), total, seed + 1 + k, s)
        )
    return recs


class TestEstimation:
    def test_missing_setting_rejected(self):
        recs = records_for(mixed_qubit(), 1000.0, 0)
        with pytest.raises(ValueError):
            estimate_from_counts(recs[:-1])
        with pytest.raises(ValueError):
            estimate_from_counts(recs[1:])

    def test_degenerate_on_zero_counts(self):
        recs = records_for(mixed_qubit(), 1000.0, 0)
        recs[0] = CountRecord(recs[0].setting, {k: 0 for k in recs[0].counts})
        with pytest.raises(DegenerateInputError):
            estimate_from_counts(recs)

    def test_flat_equatorial_pinned_counts(self):
        comp = CountRecord(
            MeasurementSetting("computational"),
            {format(k, "03b"): (500 if k == 0 else 0) for k in range(8)},
        )
        recs = [comp]
        for theta in COHERENCE_ANGLES:
            recs.append(
                CountRecord(
                    MeasurementSetting("equatorial", theta),
                    {format(k, "03b"): 100 for k in range(8)},
                )
            )
        res = estimate_from_counts(recs)
        assert res.population == pytest.approx(1.0)
        assert res.coherence == pytest.approx(0.0)
        assert res.fidelity == pytest.approx(0.5)
        assert res.fidelity_sigma > 0.0

    def test_closed_loop_noisy_state(self):
        qmat = 0.7 * ghz_phi_matrix(0.0) + 0.3 * mixed_qubit()
        exact = fidelity_pc(qmat)
        res = estimate_from_counts(records_for(qmat, 1e6, 99))
        assert abs(res.fidelity - exact.fidelity) < 3 * res.fidelity_sigma

    def test_error_scales_as_inverse_sqrt(self):
        qmat = 0.7 * ghz_phi_matrix(0.0) + 0.3 * mixed_qubit()
        totals = [1e3, 1e4, 1e5]
        sigmas = []
        for k, t in enumerate(totals):
            res = estimate_from_counts(records_for(qmat, t, 7 + k))
            sigmas.append(res.fidelity_sigma)
        slope = np.polyfit(np.log(totals), np.log(sigmas), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.05)

    def test_paper_scale_error_magnitude(self):
        # tens of events per setting give errors of order a few 1e-2
        qmat = 0.65 * ghz_phi_matrix(0.0) + 0.35 * mixed_qubit()
        res = estimate_from_counts(records_for(qmat, 2000.0, 5))
        assert 0.005 < res.fidelity_sigma < 0.05


class TestCharacterization:
    def test_identity(self):
        amp, phase = characterize_circuit(np.eye(4), [1, 2, 3], [1, 2, 3])
        assert np.allclose(amp, np.eye(3))
        assert np.allclose(phase, 0.0)

    def test_balanced_splitter_embedded(self):
        # first mode untouched, so the gauge keeps the splitter's phases
        u = compile_circuit(CircuitSpec(3, (beam_splitter(0.5, 2, 3),)))
        amp, phase = characterize_circuit(u, [1, 2, 3], [1, 2, 3])
        assert np.allclose(amp[1:, 1:], 0.5)
        assert phase[1, 2] == pytest.approx(math.pi / 2)
        assert phase[2, 1] == pytest.approx(math.pi / 2)

    def test_two_mode_gauge_invariant_residue(self):
        u = compile_circuit(CircuitSpec(2, (beam_splitter(0.5, 1, 2),)))
        _, phase = characterize_circuit(u, [1, 2], [1, 2])
        # cross ratio arg(U11 U22 / U12 U21) survives any gauge
        assert abs(phase[1, 1]) == pytest.approx(math.pi)

    def test_regauge_idempotent(self):
        rng = np.random.default_rng(13)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        u, _ = np.linalg.qr(m)
        amp, phase = characterize_circuit(u, range(1, 7), range(1, 7))
        amp2, phase2 = regauge(amp, phase)
        assert np.array_equal(amp, amp2)
        assert np.array_equal(phase, phase2)

    def test_shapes(self):
        rng = np.random.default_rng(17)
        m = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        u, _ = np.linalg.qr(m)
        amp, phase = characterize_circuit(u, [1, 3, 4, 6, 8, 9], range(1, 10))
        assert amp.shape == phase.shape == (6, 9)
        assert np.allclose(amp.sum(axis=1), 1.0)
