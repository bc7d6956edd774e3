"""Circuit elements, compilation conventions, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heraldghz.circuits import (
    CircuitSpec,
    Element,
    append_measurement,
    beam_splitter,
    compile_circuit,
    element_unitary,
    equatorial_mzi,
    mzi,
    phase_shifter,
    unitarity_deviation,
    validate_unitary,
)


def bs_matrix(t):
    return np.array(
        [[math.sqrt(t), 1j * math.sqrt(1 - t)], [1j * math.sqrt(1 - t), math.sqrt(t)]]
    )


class TestConventions:
    def test_balanced_splitter_moduli(self):
        u = compile_circuit(CircuitSpec(2, (beam_splitter(0.5, 1, 2),)))
        assert np.allclose(np.abs(u), 1 / math.sqrt(2))
        assert np.allclose(u, bs_matrix(0.5))

    def test_phase_shifter_diag(self):
        u = compile_circuit(CircuitSpec(2, (phase_shifter(math.pi, 2),)))
        assert np.allclose(u, np.diag([1.0, -1.0]))

    def test_bs_limits(self):
        assert np.allclose(
            compile_circuit(CircuitSpec(2, (beam_splitter(1.0, 1, 2),))), np.eye(2)
        )
        u0 = compile_circuit(CircuitSpec(2, (beam_splitter(0.0, 1, 2),)))
        assert np.allclose(u0, np.array([[0, 1j], [1j, 0]]))

    def test_mzi_zero_phases_is_double_bs(self):
        u = compile_circuit(CircuitSpec(2, (mzi(0.0, 0.0, 1, 2),)))
        assert np.allclose(u, bs_matrix(0.5) @ bs_matrix(0.5))

    def test_mzi_expansion_order(self):
        theta, phi = 0.7, 1.3
        expanded = CircuitSpec(
            2,
            (
                phase_shifter(phi, 2),
                beam_splitter(0.5, 1, 2),
                phase_shifter(theta, 2),
                beam_splitter(0.5, 1, 2),
            ),
        )
        single = CircuitSpec(2, (mzi(theta, phi, 1, 2),))
        assert np.allclose(compile_circuit(single), compile_circuit(expanded))

    def test_elements_listed_first_act_first(self):
        a = phase_shifter(0.4, 1)
        b = beam_splitter(0.3, 1, 2)
        u = compile_circuit(CircuitSpec(2, (a, b)))
        ua = element_unitary(a, 2)
        ub = element_unitary(b, 2)
        assert np.allclose(u, ub @ ua)

    def test_compile_homomorphic(self):
        first = CircuitSpec(3, (beam_splitter(0.25, 1, 2), phase_shifter(0.3, 3)))
        second = CircuitSpec(3, (beam_splitter(2 / 3, 2, 3), mzi(0.1, 0.2, 1, 3)))
        joint = CircuitSpec(3, first.elements + second.elements)
        prod = compile_circuit(second) @ compile_circuit(first)
        assert np.max(np.abs(compile_circuit(joint) - prod)) < 1e-12


class TestValidation:
    def test_identity_passes(self):
        rep = validate_unitary(np.eye(10))
        assert rep["passed"] and rep["deviation"] == 0.0

    def test_scaled_entry_fails(self):
        m = np.eye(4, dtype=complex)
        m[2, 2] = 1.001
        assert not validate_unitary(m)["passed"]

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            unitarity_deviation(np.ones((2, 3)))

    @given(
        st.lists(
            st.tuples(
                st.floats(0.0, 1.0), st.integers(1, 5), st.integers(1, 5)
            ).filter(lambda t: t[1] != t[2]),
            min_size=1,
            max_size=8,
        )
    )
    def test_random_circuits_unitary(self, specs):
        elements = tuple(beam_splitter(t, i, j) for t, i, j in specs)
        u = compile_circuit(CircuitSpec(5, elements))
        assert validate_unitary(u)["passed"]


class TestElementValidation:
    def test_bad_transmission(self):
        with pytest.raises(ValueError):
            beam_splitter(1.5, 1, 2)

    def test_same_mode_rejected(self):
        with pytest.raises(ValueError):
            beam_splitter(0.5, 2, 2)

    def test_mode_out_of_range(self):
        with pytest.raises(ValueError):
            CircuitSpec(2, (beam_splitter(0.5, 1, 3),))

    def test_phase_canonicalized(self):
        assert phase_shifter(2 * math.pi + 0.5, 1) == phase_shifter(0.5, 1)


class TestSerialization:
    def test_bit_exact_roundtrip(self):
        spec = CircuitSpec(
            4,
            (
                beam_splitter(1 / 3, 1, 4),
                phase_shifter(math.pi / 7, 2),
                mzi(0.123456789, 2.71828, 3, 4),
            ),
            label="roundtrip",
        )
        once = CircuitSpec.from_json(spec.to_json())
        assert once == spec
        assert once.to_json() == spec.to_json()


class TestMeasurementStage:
    def test_x_basis_on_logical_zero_is_balanced(self):
        # |0>_d = photon in first rail; X measurement gives 50/50
        u = compile_circuit(CircuitSpec(2, (equatorial_mzi(0.0, 1, 2),)))
        amps = u[:, 0]
        assert np.allclose(np.abs(amps) ** 2, [0.5, 0.5])

    def test_x_eigenstate_exits_plus_rail(self):
        u = compile_circuit(CircuitSpec(2, (equatorial_mzi(0.0, 1, 2),)))
        plus = np.array([1.0, 1.0]) / math.sqrt(2)
        out = u @ plus
        assert abs(out[0]) == pytest.approx(1.0)
        assert abs(out[1]) == pytest.approx(0.0, abs=1e-12)

    def test_theta_basis_projection(self):
        theta = math.pi / 3
        u = compile_circuit(CircuitSpec(2, (equatorial_mzi(theta, 1, 2),)))
        ket = np.array([1.0, np.exp(1j * theta)]) / math.sqrt(2)
        out = u @ ket
        assert abs(out[0]) == pytest.approx(1.0)

    def test_append_measurement_counts(self):
        base = CircuitSpec(6, ())
        spec = append_measurement(base, [(0.0, 0.0)] * 3)
        assert len(spec.elements) == 3
        with pytest.raises(ValueError):
            append_measurement(base, [(0.0, 0.0)] * 2)
