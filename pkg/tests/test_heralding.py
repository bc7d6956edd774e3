"""Detector models, herald conditioning, loss."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heraldghz.circuits import CircuitSpec, beam_splitter, compile_circuit
from heraldghz.errors import DegenerateInputError
from heraldghz.evolution import SourceModel, evolve_distinguishable, evolve_pure
from heraldghz.fock import (
    DualRailRegister,
    PureState,
    enumerate_basis,
    fidelity,
    ghz_state,
    occ,
)
from heraldghz.heralding import (
    DetectorModel,
    HeraldRule,
    apply_loss,
    herald,
    heralding_efficiency,
)

GHZ_INPUT = occ(1, 0, 1, 1, 0, 1, 0, 1, 1, 0)


def reference_unitary():
    """Unitary completion of the exact heralding isometry used as an oracle.

    The isometry (one orthonormal column per input photon) is a known exact
    solution of the heralding conditions; embedding it as six columns of a
    10x10 unitary gives a circuit-free reference for the herald contract.
    """
    path = Path(__file__).parent / "data" / "reference_isometry.json"
    v = np.array(json.loads(path.read_text()))
    u = np.zeros((10, 10))
    inputs = [0, 2, 3, 5, 7, 8]
    u[:, inputs] = v
    comp = np.eye(10) - v @ v.T
    uu, ss, _ = np.linalg.svd(comp)
    u[:, [c for c in range(10) if c not in inputs]] = uu[:, :4]
    assert np.max(np.abs(u.T @ u - np.eye(10))) < 1e-12
    return u


class TestDetectorModel:
    def test_ideal_reads_truth(self):
        det = DetectorModel()
        assert det.readout_probability(2, 2) == 1.0
        assert det.readout_probability(1, 2) == 0.0

    def test_efficiency_binomial(self):
        det = DetectorModel(efficiency=0.6)
        assert det.readout_probability(1, 2) == pytest.approx(2 * 0.6 * 0.4)
        assert det.readout_probability(0, 2) == pytest.approx(0.4**2)

    def test_pseudo_pnr_saturates(self):
        det = DetectorModel(kind="pseudo_pnr", max_resolvable=2)
        assert det.readout_probability(2, 3) == 1.0
        assert det.readout_probability(3, 3) == 0.0

    def test_pseudo_pnr_equals_ideal_below_cap(self):
        ideal = DetectorModel()
        pseudo = DetectorModel(kind="pseudo_pnr", max_resolvable=2)
        for readout in range(3):
            for photons in range(3):
                assert pseudo.readout_probability(
                    readout, photons
                ) == ideal.readout_probability(readout, photons)

    def test_threshold(self):
        det = DetectorModel(kind="threshold", efficiency=0.7)
        assert det.readout_probability(1, 2) == pytest.approx(1 - 0.3**2)
        assert det.readout_probability(0, 2) == pytest.approx(0.3**2)
        assert det.readout_probability(2, 5) == 0.0

    def test_dark_count_shifts(self):
        det = DetectorModel(dark_count=0.1)
        assert det.readout_probability(1, 0) == pytest.approx(0.1)
        assert det.readout_probability(0, 0) == pytest.approx(0.9)

    @given(st.integers(0, 4), st.floats(0.0, 1.0))
    @settings(max_examples=50)
    def test_readout_distribution_normalized(self, photons, eta):
        for kind in ("ideal_pnr", "pseudo_pnr", "threshold"):
            det = DetectorModel(kind=kind, efficiency=eta)
            total = sum(det.readout_probability(r, photons) for r in range(photons + 2))
            assert total == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            DetectorModel(efficiency=1.2)
        with pytest.raises(ValueError):
            DetectorModel(kind="magic")


class TestHeraldRule:
    def test_defaults(self):
        rule = HeraldRule()
        assert rule.ancilla_modes == (7, 8, 9, 10)
        assert rule.patterns == ((1, 1, 1, 0), (1, 1, 0, 1))
        assert rule.signal_modes(10) == (1, 2, 3, 4, 5, 6)

    def test_duplicate_patterns_rejected(self):
        with pytest.raises(ValueError):
            HeraldRule(patterns=((1, 1, 1, 0), (1, 1, 1, 0)))

    def test_serialization_roundtrip(self):
        rule = HeraldRule(corrections={(1, 1, 0, 1): (math.pi, 0.0, 0.5)})
        again = HeraldRule.from_dict(rule.to_dict())
        assert again == rule


class TestHeraldIdeal:
    def test_reference_probabilities(self):
        st_ = evolve_pure(reference_unitary(), GHZ_INPUT)
        out = herald(st_, HeraldRule())
        for pattern, (p, _) in out.per_pattern.items():
            assert p == pytest.approx(1 / 108, abs=1e-9)
        assert out.total_probability == pytest.approx(1 / 54, abs=1e-9)

    def test_reference_fidelity_after_phase_freedom(self):
        st_ = evolve_pure(reference_unitary(), GHZ_INPUT)
        out = herald(st_, HeraldRule())
        target = ghz_state()
        i000 = occ(1, 0, 1, 0, 1, 0)
        i111 = occ(0, 1, 0, 1, 0, 1)
        for pattern, (p, rho) in out.per_pattern.items():
            a = rho.element(i000, i000).real
            b = rho.element(i111, i111).real
            c = abs(rho.element(i000, i111))
            assert (a + b) / 2 + c == pytest.approx(1.0, abs=1e-9)

    def test_identity_circuit_pattern_impossible(self):
        # no routing: ancilla occupations stay (0, 1, 1, 0); pattern needs mode 7
        st_ = evolve_pure(np.eye(10), GHZ_INPUT)
        out = herald(st_, HeraldRule())
        assert out.per_pattern[(1, 1, 1, 0)] == (0.0, None)

    def test_pattern_exceeding_photons_rejected(self):
        st_ = evolve_pure(np.eye(4), occ(1, 0, 0, 0))
        rule = HeraldRule(ancilla_modes=(3, 4), patterns=((1, 1),))
        with pytest.raises(ValueError):
            herald(st_, rule)

    def test_all_pattern_probabilities_sum_to_one(self):
        # lossless ideal detectors: herald + non-herald patterns partition
        st_ = evolve_pure(reference_unitary(), GHZ_INPUT)
        anc_idx = [6, 7, 8, 9]
        patterns = {}
        for b, amp in zip(st_.basis, st_.amplitudes):
            key = tuple(b[i] for i in anc_idx)
            patterns[key] = patterns.get(key, 0.0) + abs(amp) ** 2
        assert sum(patterns.values()) == pytest.approx(1.0, abs=1e-9)
        rule = HeraldRule(patterns=tuple(sorted(patterns)))
        out = herald(st_, rule)
        assert out.total_probability == pytest.approx(1.0, abs=1e-9)

    def test_correction_preserves_probability(self):
        st_ = evolve_pure(reference_unitary(), GHZ_INPUT)
        plain = herald(st_, HeraldRule())
        corrected = herald(
            st_,
            HeraldRule(corrections={(1, 1, 1, 0): (0.3, 1.1, 2.9)}),
        )
        for pattern in plain.per_pattern:
            assert corrected.per_pattern[pattern][0] == pytest.approx(
                plain.per_pattern[pattern][0], abs=1e-12
            )

    def test_correction_rotates_coherence_phase(self):
        st_ = evolve_pure(reference_unitary(), GHZ_INPUT)
        i000 = occ(1, 0, 1, 0, 1, 0)
        i111 = occ(0, 1, 0, 1, 0, 1)
        pattern = (1, 1, 1, 0)
        base = herald(st_, HeraldRule()).state(pattern).element(i000, i111)
        phases = (0.4, 0.0, 0.0)
        rot = (
            herald(st_, HeraldRule(corrections={pattern: phases}))
            .state(pattern)
            .element(i000, i111)
        )
        # |000> unaffected, |111> picks up the phase on its second rails
        assert rot == pytest.approx(base * np.exp(-1j * 0.4), abs=1e-12)

    def test_pseudo_pnr_equals_ideal_on_low_occupancy(self):
        st_ = evolve_pure(reference_unitary(), GHZ_INPUT)
        a = herald(st_, HeraldRule(), DetectorModel())
        b = herald(st_, HeraldRule(), DetectorModel(kind="pseudo_pnr"))
        for pattern in a.per_pattern:
            pa, ra = a.per_pattern[pattern]
            pb, rb = b.per_pattern[pattern]
            assert pa == pytest.approx(pb, abs=1e-12)
            assert np.allclose(ra.matrix, rb.matrix, atol=1e-12)


class TestHeraldDistinguishable:
    def test_visibility_monotonicity(self):
        u = reference_unitary()
        rule = HeraldRule()
        target = ghz_state()
        i000 = occ(1, 0, 1, 0, 1, 0)
        i111 = occ(0, 1, 0, 1, 0, 1)
        fids = []
        for v in (1.0, 0.95, 0.9, 0.85):
            src = SourceModel.uniform_visibility((1, 3, 4, 6, 8, 9), v)
            out = herald(evolve_distinguishable(u, src), rule)
            p, rho = out.per_pattern[(1, 1, 1, 0)]
            a = rho.element(i000, i000).real
            b = rho.element(i111, i111).real
            c = abs(rho.element(i000, i111))
            fids.append((a + b) / 2 + c)
        assert fids[0] == pytest.approx(1.0, abs=1e-9)
        assert all(x > y for x, y in zip(fids, fids[1:]))

    def test_sector_probabilities_match_pure_at_v1(self):
        u = reference_unitary()
        src = SourceModel.uniform_visibility((1, 3, 4, 6, 8, 9), 1.0)
        out_d = herald(evolve_distinguishable(u, src), HeraldRule())
        out_p = herald(evolve_pure(u, GHZ_INPUT), HeraldRule())
        for pattern in out_p.per_pattern:
            assert out_d.per_pattern[pattern][0] == pytest.approx(
                out_p.per_pattern[pattern][0], abs=1e-12
            )


class TestApplyLoss:
    def test_unit_transmission_identity(self):
        st_ = evolve_pure(np.eye(3), occ(1, 1, 0))
        lossy = apply_loss(st_, [1.0, 1.0, 1.0])
        dist = lossy.physical_distribution()
        assert dist[occ(1, 1, 0)] == pytest.approx(1.0)

    def test_single_photon_half(self):
        basis = enumerate_basis(1, 1)
        st_ = PureState(basis, [1.0])
        lossy = apply_loss(st_, [0.5])
        dist = lossy.physical_distribution()
        assert dist[occ(1)] == pytest.approx(0.5)
        assert dist[occ(0)] == pytest.approx(0.5)

    def test_six_photon_survival(self):
        st_ = evolve_pure(np.eye(10), GHZ_INPUT)
        lossy = apply_loss(st_, [0.9] * 10)
        dist = lossy.physical_distribution()
        assert dist[GHZ_INPUT] == pytest.approx(0.9**6, abs=1e-12)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)

    def test_interference_survives_loss_on_other_modes(self):
        # photon superposed over modes 1,2; loss only on mode 3
        u = compile_circuit(CircuitSpec(3, (beam_splitter(0.5, 1, 2),)))
        st_ = evolve_pure(u, occ(1, 0, 0))
        lossy = apply_loss(st_, [1.0, 1.0, 0.5])
        sector = lossy.sectors[0]
        assert len(lossy.sectors) == 1
        (state,) = sector.label_states.values()
        assert abs(state.amplitude(occ(1, 0, 0))) == pytest.approx(1 / math.sqrt(2))


class TestHeraldingEfficiency:
    def test_ideal_is_one(self):
        src = SourceModel.ideal((1, 3, 4, 6, 8, 9))
        eff = heralding_efficiency(src, reference_unitary(), HeraldRule())
        assert eff == pytest.approx(1.0, abs=1e-9)

    def test_dead_detector_sentinel(self):
        src = SourceModel.ideal((1, 3, 4, 6, 8, 9))
        eff = heralding_efficiency(
            src, reference_unitary(), HeraldRule(), DetectorModel(efficiency=0.0)
        )
        assert eff == "no herald events"

    def test_loss_monotonicity(self):
        src = SourceModel.ideal((1, 3, 4, 6, 8, 9))
        u = reference_unitary()
        vals = []
        for eta in (1.0, 0.9, 0.8):
            loss = [eta] * 6 + [1.0] * 4  # lossy signal, lossless heralds
            vals.append(heralding_efficiency(src, u, HeraldRule(), loss=loss))
        assert vals[0] == pytest.approx(1.0, abs=1e-9)
        assert vals[0] > vals[1] > vals[2]
        assert all(0.0 < v <= 1.0 for v in vals)
