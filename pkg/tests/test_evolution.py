"""Permanent kernels, Fock evolution, partial distinguishability."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heraldghz.circuits import CircuitSpec, beam_splitter, compile_circuit
from heraldghz.errors import CapacityError
from heraldghz.evolution import (
    PhotonInput,
    SourceModel,
    _solve_p2_from_g2,
    evolve_distinguishable,
    evolve_pure,
    permanent,
    permanent_naive,
    transition_amplitude,
    transition_amplitudes_batch,
)
from heraldghz.fock import basis_array, enumerate_basis, occ


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


class TestPermanent:
    def test_empty_and_scalar(self):
        assert permanent(np.zeros((0, 0))) == 1.0 + 0j
        assert permanent(np.array([[3.5]])) == pytest.approx(3.5)

    def test_two_by_two_analytic(self):
        m = np.array([[1, 2], [3, 4]], dtype=complex)
        assert permanent(m) == pytest.approx(1 * 4 + 2 * 3)

    def test_matches_naive_oracle(self):
        # acceptance criterion: 200 seeded matrices per size n = 2..7
        rng = np.random.default_rng(20260826)
        for n in range(2, 8):
            for _ in range(200):
                m = random_complex(rng, n)
                fast = permanent(m)
                slow = permanent_naive(m)
                assert abs(fast - slow) <= 1e-10 * max(abs(slow), 1.0)

    def test_ones_matrix_factorial(self):
        for n in range(1, 8):
            assert permanent(np.ones((n, n))) == pytest.approx(math.factorial(n))

    def test_cap(self):
        with pytest.raises(CapacityError):
            permanent(np.eye(17))
        with pytest.raises(CapacityError):
            permanent_naive(np.eye(10))

    @given(st.integers(0, 10**9))
    @settings(max_examples=25)
    def test_row_scaling_linearity(self, seed):
        rng = np.random.default_rng(seed)
        m = random_complex(rng, 4)
        scaled = m.copy()
        scaled[2] *= 2.0
        assert permanent(scaled) == pytest.approx(2.0 * permanent(m))


class TestTransitionAmplitudes:
    def test_identity_circuit_diagonal(self):
        u = np.eye(3)
        s = occ(1, 1, 0)
        assert transition_amplitude(u, s, s) == pytest.approx(1.0)
        assert transition_amplitude(u, s, occ(1, 0, 1)) == pytest.approx(0.0)

    def test_hom_bunching(self):
        u = compile_circuit(CircuitSpec(2, (beam_splitter(0.5, 1, 2),)))
        # coincidence amplitude vanishes; bunched amplitudes are i/sqrt(2)
        assert abs(transition_amplitude(u, occ(1, 1), occ(1, 1))) < 1e-12
        assert abs(transition_amplitude(u, occ(1, 1), occ(2, 0))) == pytest.approx(
            1 / math.sqrt(2)
        )

    def test_batch_matches_single(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(m)
        s = occ(1, 0, 2, 0)
        basis = enumerate_basis(3, 4)
        batch = transition_amplitudes_batch(u, s, basis_array(basis))
        for b, amp in zip(basis, batch):
            assert amp == pytest.approx(transition_amplitude(u, s, b), abs=1e-12)

    def test_evolve_pure_norm(self):
        rng = np.random.default_rng(11)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        u, _ = np.linalg.qr(m)
        st_ = evolve_pure(u, occ(1, 0, 1, 0, 1, 0))
        assert np.linalg.norm(st_.amplitudes) == pytest.approx(1.0, abs=1e-9)


class TestHomLaw:
    @pytest.mark.parametrize("overlap2", [0.0, 0.5, 0.883, 1.0])
    def test_coincidence_law(self, overlap2):
        # P(coincidence) = (1 - |S|^2) / 2 on a balanced splitter
        u = compile_circuit(CircuitSpec(2, (beam_splitter(0.5, 1, 2),)))
        v = math.sqrt(overlap2)
        photons = (
            PhotonInput(1, (1.0, 0.0)),
            PhotonInput(2, (v, math.sqrt(1.0 - v * v))),
        )
        src = SourceModel(photons)
        dist = evolve_distinguishable(u, src).physical_distribution()
        p_cc = dist.get(occ(1, 1), 0.0)
        assert p_cc == pytest.approx((1.0 - overlap2) / 2.0, abs=1e-12)

    def test_paper_visibility_value(self):
        u = compile_circuit(CircuitSpec(2, (beam_splitter(0.5, 1, 2),)))
        src = SourceModel.uniform_visibility((1, 2), 0.883)
        dist = evolve_distinguishable(u, src).physical_distribution()
        assert dist.get(occ(1, 1), 0.0) == pytest.approx(0.0585, abs=1e-12)


class TestSourceModel:
    def test_ideal_gram_is_ones(self):
        src = SourceModel.ideal((1, 3, 4))
        assert np.allclose(src.gram(), np.ones((3, 3)))

    def test_uniform_visibility_gram(self):
        v = 0.9
        src = SourceModel.uniform_visibility((1, 2, 3), v)
        g = np.abs(src.gram()) ** 2
        off = g[~np.eye(3, dtype=bool)]
        assert np.allclose(off, v)

    def test_reference_visibilities(self):
        vis = [0.883, 0.86, 0.86, 0.88, 0.87]
        src = SourceModel.from_reference_visibilities((1, 3, 4, 6, 8, 9), vis)
        g = np.abs(src.gram()) ** 2
        for j, vj in enumerate(vis, start=1):
            assert g[0, j] == pytest.approx(vj)

    def test_g2_mixture_model(self):
        assert _solve_p2_from_g2(0.0) == 0.0
        g2 = 0.026
        p2 = _solve_p2_from_g2(g2)
        assert 2 * p2 / (1 + p2) ** 2 == pytest.approx(g2)
        with pytest.raises(ValueError):
            _solve_p2_from_g2(0.6)

    def test_sector_weights_sum_to_one(self):
        u = np.eye(3)
        src = SourceModel.uniform_visibility((1, 2, 3), 0.7)
        ev = evolve_distinguishable(u, src)
        assert sum(s.weight for s in ev.sectors) == pytest.approx(1.0)

    def test_distribution_normalized(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(m)
        src = SourceModel.uniform_visibility((1, 2, 4), 0.8)
        dist = evolve_distinguishable(u, src).physical_distribution()
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)

    def test_indistinguishable_limit_matches_pure(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(m)
        src = SourceModel.uniform_visibility((1, 3), 1.0)
        dist = evolve_distinguishable(u, src).physical_distribution()
        pure = evolve_pure(u, occ(1, 0, 1, 0))
        for b, amp in zip(pure.basis, pure.amplitudes):
            assert dist.get(b, 0.0) == pytest.approx(abs(amp) ** 2, abs=1e-9)
