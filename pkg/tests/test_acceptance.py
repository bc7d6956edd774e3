"""Acceptance gate: end-to-end behavioral criteria with stated tolerances.

Each test states its tolerance inline; together they pin down the shipped
GHZ preset, the simulation kernels, the fidelity-estimation protocol, the
imperfection model, the parameter search, and report determinism.
"""

import json
import math
import time

import numpy as np
import pytest

from heraldghz.analysis import (
    expectation_M,
    estimate_from_counts,
    fidelity_pc,
    m_theta_operator,
    outcome_probabilities,
    project_dual_rail,
    simulate_counts,
    MeasurementSetting,
)
from heraldghz.circuits import beam_splitter, compile_circuit, CircuitSpec, mzi
from heraldghz.cli import main
from heraldghz.evolution import (
    PhotonInput,
    SourceModel,
    evolve_distinguishable,
    evolve_pure,
    permanent,
    permanent_naive,
)
from heraldghz.fock import (
    DualRailRegister,
    OccupationVector,
    fidelity,
    ghz_state,
    occ,
)
from heraldghz.heralding import DetectorModel, HeraldRule, herald
from heraldghz.preset import ghz_herald_rule, ghz_preset
from heraldghz.search import objective, optimize, preset_problem

INPUT_MODES = (1, 3, 4, 6, 8, 9)
PAPER_VISIBILITIES = (0.883, 0.86, 0.86, 0.88, 0.87)
PAPER_G2 = 0.026


def ideal_herald_outcome():
    circuit = ghz_preset()
    rule = ghz_herald_rule()
    u = compile_circuit(circuit)
    state = evolve_distinguishable(u, SourceModel.ideal(INPUT_MODES))
    return herald(state, rule, DetectorModel()), rule


class TestCriterion1HeraldProbability:
    def test_each_pattern_1_over_108_and_total_1_over_54(self):
        t0 = time.monotonic()
        outcome, _ = ideal_herald_outcome()
        elapsed = time.monotonic() - t0
        assert len(outcome.per_pattern) == 2
        for p, _rho in outcome.per_pattern.values():
            assert abs(p - 1.0 / 108.0) < 1e-9
        assert abs(outcome.total_probability - 1.0 / 54.0) < 1e-9
        assert elapsed < 10.0


class TestCriterion2IdealHeraldedState:
    def test_fidelity_one_after_frozen_corrections_both_patterns(self):
        outcome, rule = ideal_herald_outcome()
        target = ghz_state(rule.register)
        for pattern, (p, rho) in outcome.per_pattern.items():
            assert rho is not None, pattern
            assert fidelity(rho, target) == pytest.approx(1.0, abs=1e-9)


class TestCriterion3WitnessClosure:
    def test_population_coherence_fidelity_all_one(self):
        outcome, rule = ideal_herald_outcome()
        for _pattern, (_p, rho) in outcome.per_pattern.items():
            q, w = project_dual_rail(rho, rule.register)
            assert w == pytest.approx(1.0, abs=1e-9)
            res = fidelity_pc(q)
            assert res.population == pytest.approx(1.0, abs=1e-9)
            assert res.coherence == pytest.approx(1.0, abs=1e-9)
            assert res.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_expectation_matches_cos_3theta_on_12_point_grid(self):
        outcome, rule = ideal_herald_outcome()
        _p, rho = next(iter(outcome.per_pattern.values()))
        q, _w = project_dual_rail(rho, rule.register)
        for theta in np.linspace(0.0, 2.0 * math.pi, 12, endpoint=False):
            assert expectation_M(q, theta) == pytest.approx(
                math.cos(3.0 * theta), abs=1e-9
            )


class TestCriterion4PermanentOracle:
    @pytest.mark.parametrize("n", range(2, 8))
    def test_ryser_matches_naive_200_seeded_matrices(self, n):
        rng = np.random.default_rng(1000 + n)
        for _ in range(200):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            a = permanent(m)
            b = permanent_naive(m)
            assert abs(a - b) <= 1e-10 * max(abs(b), 1.0)


class TestCriterion5UnitarityAndNormalization:
    def test_compiled_circuits_unitary(self):
        rng = np.random.default_rng(7)
        circuits = [ghz_preset()]
        for k in range(20):
            els = []
            for _ in range(8):
                i, j = sorted(rng.choice(10, size=2, replace=False) + 1)
                els.append(beam_splitter(float(rng.uniform(0, 1)), int(i), int(j)))
                i, j = sorted(rng.choice(10, size=2, replace=False) + 1)
                els.append(
                    mzi(float(rng.uniform(0, 2 * math.pi)),
                        float(rng.uniform(0, 2 * math.pi)), int(i), int(j))
                )
            circuits.append(CircuitSpec(10, tuple(els)))
        for circ in circuits:
            u = compile_circuit(circ)
            dev = np.max(np.abs(u.conj().T @ u - np.eye(circ.n_modes)))
            assert dev < 1e-10

    def test_evolved_norms_and_pattern_decomposition(self):
        u = compile_circuit(ghz_preset())
        state = evolve_pure(
            u, OccupationVector((1, 0, 1, 1, 0, 1, 0, 1, 1, 0))
        )
        assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-9)
        # exhaustive readout decomposition on the ancilla modes sums to one
        evolved = evolve_distinguishable(u, SourceModel.ideal(INPUT_MODES))
        det = DetectorModel()
        total = 0.0
        from heraldghz.fock import enumerate_basis

        patterns = {
            tuple(b)
            for n in range(7)
            for b in enumerate_basis(n, 4)
        }
        rule_all = HeraldRule(patterns=tuple(sorted(patterns)))
        outcome = herald(evolved, rule_all, det)
        total = outcome.total_probability
        assert total == pytest.approx(1.0, abs=1e-9)


class TestCriterion6HomLaw:
    @staticmethod
    def coincidence(overlap2):
        u = compile_circuit(CircuitSpec(2, (beam_splitter(0.5, 1, 2),)))
        v = math.sqrt(overlap2)
        src = SourceModel(
            (
                PhotonInput(1, (1.0, 0.0)),
                PhotonInput(2, (v, math.sqrt(1.0 - v * v))),
            )
        )
        dist = evolve_distinguishable(u, src).physical_distribution()
        return dist.get(occ(1, 1), 0.0)

    def test_coincidence_probability_follows_hom_law(self):
        for overlap2 in (0.0, 0.5, 0.883, 1.0):
            assert self.coincidence(overlap2) == pytest.approx(
                (1.0 - overlap2) / 2.0, abs=1e-12
            )

    def test_paper_visibility_point(self):
        assert self.coincidence(0.883) == pytest.approx(0.0585, abs=1e-12)


def heralded_qubit_state(sources_section):
    from heraldghz.cli import _heralded_qubit_state

    cfg = {"seed": 0, "circuit": {"preset": "ghz"}, "sources": sources_section}
    qmat, _outcome, _weight, _lam = _heralded_qubit_state(cfg)
    return qmat


class TestCriterion7ImperfectFidelityNotReproduced:
    """The measured F = 0.573(24) includes unmodeled hardware imperfections;
    the substituted property is strict degradation under the modeled ones."""

    def test_paper_inputs_give_fidelity_strictly_below_one(self):
        qmat = heralded_qubit_state(
            {"visibilities": list(PAPER_VISIBILITIES), "g2": PAPER_G2}
        )
        res = fidelity_pc(qmat)
        assert res.fidelity < 1.0 - 1e-6

    def test_fidelity_strictly_decreasing_in_visibility_sweep(self):
        fids = []
        for v in (1.0, 0.95, 0.9, 0.85):
            qmat = heralded_qubit_state({"uniform_visibility": v})
            fids.append(fidelity_pc(qmat).fidelity)
        assert fids[0] > fids[1] > fids[2] > fids[3]


class TestCriterion8EstimatorClosure:
    @staticmethod
    def known_state():
        g = np.zeros((8, 8), dtype=np.complex128)
        g[0, 0] = g[0, 7] = g[7, 0] = g[7, 7] = 0.5
        return 0.8 * g + 0.2 * np.eye(8) / 8.0

    def run_trial(self, qmat, expected_total, seed):
        settings = [MeasurementSetting("computational")] + [
            MeasurementSetting("equatorial", k * math.pi / 3.0) for k in range(3)
        ]
        records = [
            simulate_counts(
                outcome_probabilities(qmat, s), expected_total, seed + k, s
            )
            for k, s in enumerate(settings)
        ]
        return estimate_from_counts(records)

    def test_recovery_within_3_sigma_in_99_percent_of_trials(self):
        qmat = self.known_state()
        truth = fidelity_pc(qmat)
        hits = 0
        n_trials = 1000
        for trial in range(n_trials):
            est = self.run_trial(qmat, 1e5, seed=10_000 + 7 * trial)
            if abs(est.fidelity - truth.fidelity) <= 3.0 * est.fidelity_sigma:
                hits += 1
        assert hits >= 990

    def test_sigma_scales_as_inverse_sqrt_t(self):
        qmat = self.known_state()
        ts = [1e3, 1e4, 1e5]
        sigmas = []
        for t in ts:
            trials = [
                self.run_trial(qmat, t, seed=555 + 13 * k).fidelity_sigma
                for k in range(20)
            ]
            sigmas.append(float(np.mean(trials)))
        slope = np.polyfit(np.log(ts), np.log(sigmas), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.05)


class TestCriterion9SearchRecovery:
    def test_recovery_rate_at_least_90_percent(self):
        problem = preset_problem(ghz_preset(), ghz_herald_rule())
        assert objective(problem.natural_values(), problem) <= 1e-8
        successes = 0
        for seed in range(20):
            res = optimize(
                problem, budget=5000, seed=seed, n_restarts=1, perturbation=0.02
            )
            ok = res.heralded_fidelity > 0.99 and all(
                p >= 0.9 / 108.0 for p in res.per_pattern_probability.values()
            )
            successes += int(ok)
        assert successes >= 18


class TestCriterion10Determinism:
    def test_byte_identical_reports_for_identical_config_and_seed(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "seed": 31,
            "circuit": {"preset": "ghz"},
            "sources": {"uniform_visibility": 0.9, "g2": PAPER_G2},
            "measurement": {"sampled": True, "expected_total": 10000.0},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        blobs = []
        for d in ("run1", "run2"):
            rc = main(["analyze", "--config", str(path), "--out", str(tmp_path / d)])
            assert rc == 0
            blobs.append((tmp_path / d / "analyze_report.txt").read_bytes())
        assert blobs[0] == blobs[1]
