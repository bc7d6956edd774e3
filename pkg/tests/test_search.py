"""Tests for the parameter-search module.

Mechanism tests run on small hand-made topologies; recovery tests run on the
shipped GHZ preset (its transmissions are a global optimum of the objective).
"""

import math

import numpy as np
import pytest

from heraldghz.circuits import CircuitSpec, beam_splitter, mzi, phase_shifter
from heraldghz.search import (
    DEFAULT_INPUT,
    FreeParameter,
    SearchProblem,
    _FastHeraldScorer,
    objective,
    optimize,
    preset_problem,
)


def toy_topology() -> CircuitSpec:
    """A few beam splitters on the six input modes; no heralding power."""
    return CircuitSpec(
        10,
        (
            beam_splitter(0.5, 1, 2),
            beam_splitter(0.5, 3, 4),
            beam_splitter(0.5, 8, 9),
            phase_shifter(0.3, 5),
            mzi(0.1, 0.2, 6, 7),
        ),
        label="toy",
    )


def toy_problem() -> SearchProblem:
    topo = toy_topology()
    free = (
        FreeParameter(0, "transmission"),
        FreeParameter(1, "transmission"),
        FreeParameter(3, "phase"),
        FreeParameter(4, "theta"),
    )
    return SearchProblem(topo, free)


class TestProblemValidation:
    def test_no_free_parameters_rejected(self):
        with pytest.raises(ValueError):
            SearchProblem(toy_topology(), ())

    def test_bad_element_index_rejected(self):
        with pytest.raises(ValueError):
            SearchProblem(toy_topology(), (FreeParameter(99),))

    def test_slot_kind_mismatch_rejected(self):
        with pytest.raises(ValueError):
            SearchProblem(toy_topology(), (FreeParameter(3, "transmission"),))
        with pytest.raises(ValueError):
            SearchProblem(toy_topology(), (FreeParameter(0, "phase"),))

    def test_unknown_slot_rejected(self):
        with pytest.raises(ValueError):
            FreeParameter(0, "reflectivity")

    def test_bad_weights_rejected(self):
        with pytest.raises(ValueError):
            SearchProblem(toy_topology(), (FreeParameter(0),), w_f=-1.0)
        with pytest.raises(ValueError):
            SearchProblem(toy_topology(), (FreeParameter(0),), w_f=0.0, w_p=0.0)


class TestEncoding:
    def test_natural_values_read_topology(self):
        prob = toy_problem()
        vals = prob.natural_values()
        assert vals == pytest.approx([0.5, 0.5, 0.3, 0.1])

    def test_encode_decode_roundtrip(self):
        prob = toy_problem()
        natural = np.array([0.25, 0.9, 1.7, -0.3])
        back = prob.decode(prob.encode(natural))
        assert back == pytest.approx(natural, abs=1e-12)

    def test_decode_stays_in_unit_interval(self):
        prob = toy_problem()
        for x in (-50.0, -1.0, 0.0, 1.0, 50.0):
            vals = prob.decode(np.array([x, x, x, x]))
            # saturates to the closed interval; valid transmissions throughout
            assert 0.0 <= vals[0] <= 1.0
            assert 0.0 <= vals[1] <= 1.0
        for x in (-5.0, 0.0, 5.0):
            vals = prob.decode(np.array([x, x, x, x]))
            assert 0.0 < vals[0] < 1.0

    def test_circuit_with_replaces_parameters(self):
        prob = toy_problem()
        circ = prob.circuit_with(np.array([0.25, 0.75, 1.0, 2.0]))
        assert circ.elements[0].param == 0.25
        assert circ.elements[1].param == 0.75
        assert circ.elements[3].param == 1.0
        assert circ.elements[4].param[0] == 2.0
        # untouched slots keep their topology values
        assert circ.elements[2].param == 0.5
        assert circ.elements[4].param[1] == 0.2

    def test_circuit_with_rejects_bad_length(self):
        with pytest.raises(ValueError):
            toy_problem().circuit_with(np.array([0.5]))

    def test_circuit_with_rejects_out_of_range_transmission(self):
        with pytest.raises(ValueError):
            toy_problem().circuit_with(np.array([1.5, 0.5, 0.0, 0.0]))


class TestObjective:
    def test_toy_circuit_scores_poorly(self):
        prob = toy_problem()
        val = objective(prob.natural_values(), prob)
        # no heralding power: full fidelity penalty + full probability shortfall
        assert val > 1.0

    def test_objective_deterministic(self):
        prob = toy_problem()
        v1 = objective(prob.natural_values(), prob)
        v2 = objective(prob.natural_values(), prob)
        assert v1 == v2

    def test_scorer_matches_objective_components(self):
        prob = toy_problem()
        scorer = _FastHeraldScorer(prob)
        from heraldghz.circuits import compile_circuit

        scores = scorer.score(compile_circuit(prob.circuit_with(prob.natural_values())))
        assert set(scores) == set(prob.rule.patterns)
        for p, f in scores.values():
            assert 0.0 <= p <= 1.0
            assert 0.0 <= f <= 1.0 + 1e-12


class TestOptimize:
    def test_budget_must_be_positive(self):
        with pytest.raises(ValueError):
            optimize(toy_problem(), budget=0, seed=1)

    def test_deterministic_replay(self):
        prob = toy_problem()
        r1 = optimize(prob, budget=60, seed=7, n_restarts=2, perturbation=0.05)
        r2 = optimize(prob, budget=60, seed=7, n_restarts=2, perturbation=0.05)
        assert np.array_equal(r1.best_params, r2.best_params)
        assert r1.best_objective == r2.best_objective
        assert r1.trace == r2.trace
        assert r1.evaluations == r2.evaluations

    def test_seed_changes_restart_draws(self):
        prob = toy_problem()
        r1 = optimize(prob, budget=60, seed=1, n_restarts=2, perturbation=0.1)
        r2 = optimize(prob, budget=60, seed=2, n_restarts=2, perturbation=0.1)
        # different perturbation draws must show up somewhere in the traces
        assert r1.trace != r2.trace or not np.array_equal(r1.best_params, r2.best_params)

    def test_budget_respected(self):
        prob = toy_problem()
        res = optimize(prob, budget=40, seed=3)
        assert res.evaluations <= 41  # scipy may finish the simplex it started

    def test_trace_is_improving(self):
        prob = toy_problem()
        res = optimize(prob, budget=200, seed=5)
        vals = [v for _, v in res.trace]
        assert vals == sorted(vals, reverse=True)
        assert res.best_objective == pytest.approx(min(vals))
        evs = [i for i, _ in res.trace]
        assert evs == sorted(evs)

    def test_result_reports_best_point(self):
        prob = toy_problem()
        res = optimize(prob, budget=150, seed=11)
        assert objective(res.best_params, prob) == pytest.approx(
            res.best_objective, rel=1e-12
        )

    def test_trace_rows_format(self):
        res = optimize(toy_problem(), budget=30, seed=1)
        for row in res.trace_rows():
            i, v = row.split(",")
            int(i)
            float(v)


class TestPresetRecovery:
    """The shipped preset is a zero of the search objective."""

    @pytest.fixture()
    def problem(self):
        from heraldghz.preset import ghz_herald_rule, ghz_preset

        return preset_problem(ghz_preset(), ghz_herald_rule())

    def test_preset_problem_frees_twelve_transmissions(self, problem):
        assert len(problem.free) == 12
        assert all(fp.slot == "transmission" for fp in problem.free)

    def test_preset_is_global_optimum(self, problem):
        assert objective(problem.natural_values(), problem) <= 1e-8

    def test_perturbation_degrades_objective(self, problem):
        base = problem.natural_values()
        rng = np.random.default_rng(0)
        worse = objective(base + rng.uniform(0.01, 0.02, size=len(base)), problem)
        assert worse > 1e-4

    def test_recovery_from_small_perturbation(self, problem):
        res = optimize(
            problem, budget=5000, seed=123, n_restarts=3, perturbation=0.02
        )
        assert res.heralded_fidelity > 0.99
        assert all(
            p >= 0.9 / 108.0 for p in res.per_pattern_probability.values()
        )
