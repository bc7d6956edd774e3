"""Fock-basis bookkeeping: bases, states, dual-rail coding."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heraldghz.errors import BasisMismatchError, CapacityError
from heraldghz.fock import (
    DensityOperator,
    DualRailRegister,
    OccupationVector,
    PureState,
    basis_size,
    dual_rail_decode,
    dual_rail_encode,
    enumerate_basis,
    fidelity,
    ghz_state,
    logical_state,
    occ,
)


class TestBasis:
    def test_counts_match_binomial(self):
        for n, m in [(0, 3), (1, 4), (3, 6), (6, 10)]:
            basis = enumerate_basis(n, m)
            assert len(basis) == basis_size(n, m) == math.comb(n + m - 1, n)

    def test_canonical_order_descending(self):
        basis = enumerate_basis(2, 3)
        tuples = [b.counts for b in basis]
        assert tuples == sorted(tuples, reverse=True)
        assert tuples[0] == (2, 0, 0)
        assert tuples[-1] == (0, 0, 2)

    def test_six_photons_ten_modes_size(self):
        assert basis_size(6, 10) == 5005

    def test_cap_enforced(self):
        with pytest.raises(CapacityError):
            enumerate_basis(20, 20, cap=1000)

    @given(st.integers(0, 5), st.integers(1, 5))
    def test_all_have_right_totals(self, n, m):
        basis = enumerate_basis(n, m)
        assert all(b.total_photons == n and b.n_modes == m for b in basis)
        assert len(set(basis)) == len(basis)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            occ(1, -1)


class TestPureState:
    def test_norm_enforced(self):
        basis = enumerate_basis(1, 2)
        with pytest.raises(ValueError):
            PureState(basis, [0.9, 0.0])
        st_ = PureState(basis, [0.9, 0.0], normalize=True)
        assert st_.amplitude(occ(1, 0)) == pytest.approx(1.0)

    def test_mixed_photon_number_rejected(self):
        with pytest.raises(BasisMismatchError):
            PureState([occ(1, 0), occ(1, 1)], [1.0, 0.0])

    def test_probabilities_sum_to_one(self):
        basis = enumerate_basis(2, 2)
        st_ = PureState(basis, np.ones(3) / math.sqrt(3))
        assert st_.probabilities().sum() == pytest.approx(1.0)


class TestDensityOperator:
    def test_pure_density_projector(self):
        rho = ghz_state().density()
        assert np.allclose(rho.matrix @ rho.matrix, rho.matrix)
        rho.check_physical()

    def test_hermiticity_enforced(self):
        basis = enumerate_basis(1, 2)
        with pytest.raises(ValueError):
            DensityOperator(basis, [[0.5, 1j], [2j, 0.5]])

    def test_trace_enforced(self):
        basis = enumerate_basis(1, 2)
        with pytest.raises(ValueError):
            DensityOperator(basis, np.eye(2))
        rho = DensityOperator(basis, np.eye(2), normalize=True)
        assert rho.matrix.trace() == pytest.approx(1.0)


class TestDualRail:
    def test_roundtrip_all_bitstrings(self):
        reg = DualRailRegister()
        for k in range(8):
            bits = format(k, "03b")
            v = dual_rail_encode(bits, reg, 6)
            assert dual_rail_decode(v, reg) == bits

    def test_non_register_states_decode_none(self):
        reg = DualRailRegister()
        assert dual_rail_decode(occ(2, 0, 1, 0, 1, 0), reg) is None
        assert dual_rail_decode(occ(1, 1, 1, 0, 0, 0), reg) is None

    def test_overlapping_pairs_rejected(self):
        with pytest.raises(ValueError):
            DualRailRegister(((1, 2), (2, 3)))

    def test_ghz_state_components(self):
        g = ghz_state()
        a0 = g.amplitude(occ(1, 0, 1, 0, 1, 0))
        a1 = g.amplitude(occ(0, 1, 0, 1, 0, 1))
        assert a0 == pytest.approx(1 / math.sqrt(2))
        assert a1 == pytest.approx(1 / math.sqrt(2))
        assert np.count_nonzero(g.amplitudes) == 2


class TestFidelity:
    def test_self_fidelity_one(self):
        g = ghz_state()
        assert fidelity(g.density(), g) == pytest.approx(1.0)

    def test_orthogonal_zero(self):
        reg = DualRailRegister()
        zero = logical_state({"000": 1.0}, reg, 6)
        one = logical_state({"111": 1.0}, reg, 6)
        assert fidelity(zero.density(), one) == pytest.approx(0.0)

    def test_ghz_vs_000_half(self):
        reg = DualRailRegister()
        zero = logical_state({"000": 1.0}, reg, 6)
        assert fidelity(zero.density(), ghz_state()) == pytest.approx(0.5)

    @given(st.integers(0, 10**9))
    def test_random_pure_state_bounds(self, seed):
        rng = np.random.default_rng(seed)
        basis = enumerate_basis(3, 6)
        v = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
        st_ = PureState(basis, v, normalize=True)
        f = fidelity(st_.density(), ghz_state())
        assert 0.0 <= f <= 1.0
