"""GHZ witness protocol: population P, coherence C, fidelity F = (P + C)/2.

The heralded state is projected onto the 8-dimensional dual-rail register
subspace and renormalized there (mirroring postselection on one photon per
pair); all witness quantities act on that 8x8 qubit density matrix with the
bitstring basis 000..111. Counting statistics are Poissonian with first-order
error propagation through the ratio estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError
from .fock import DensityOperator, DualRailRegister, dual_rail_decode

#: Reference values quoted by the source experiment; displayed in reports as
#: comparison lines only, never used as numerical targets.
REFERENCE_POPULATION = (0.758, 0.025)
REFERENCE_COHERENCE = (0.389, 0.040)
REFERENCE_FIDELITY = (0.573, 0.024)

#: Angles of the three-setting coherence measurement.
COHERENCE_ANGLES = (0.0, math.pi / 3.0, 2.0 * math.pi / 3.0)

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


@dataclass(frozen=True)
class MeasurementSetting:
    """One per-qubit measurement basis.

    ``computational`` measures Z on every qubit; ``equatorial`` measures
    M_theta = cos(theta) X + sin(theta) Y on every qubit.
    """

    basis_kind: str = "equatorial"
    theta: float = 0.0

    def __post_init__(self):
        if self.basis_kind not in ("computational", "equatorial"):
            raise ValueError(f"unknown basis kind {self.basis_kind!r}")
        object.__setattr__(self, "theta", float(self.theta) % (2.0 * math.pi))

    def key(self) -> str:
        if self.basis_kind == "computational":
            return "computational"
        return f"equatorial:{self.theta:.12f}"


@dataclass
class CountRecord:
    """Measured (or simulated) coincidence counts for one setting."""

    setting: MeasurementSetting
    counts: dict[str, int]
    duration_hours: float = 0.0

    def __post_init__(self):
        self.counts = {str(k): int(v) for k, v in self.counts.items()}
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class AnalysisResult:
    """Witness quantities with one-standard-deviation errors (0 when exact)."""

    population: float
    population_sigma: float
    coherence: float
    coherence_sigma: float
    fidelity: float
    fidelity_sigma: float
    expectations: dict[float, tuple[float, float]] = field(default_factory=dict)
    subspace_weight: float | None = None

    @property
    def entangled(self) -> bool:
        """Strict witness: F > 0.5 certifies GHZ-class entanglement."""
        return self.fidelity > 0.5

    @property
    def z_score(self) -> float | None:
        """Standard deviations by which F exceeds the 0.5 threshold."""
        if self.fidelity_sigma <= 0.0:
            return None
        return (self.fidelity - 0.5) / self.fidelity_sigma


def bitstrings(n_qubits: int = 3) -> list[str]:
    return [format(i, f"0{n_qubits}b") for i in range(2**n_qubits)]


def project_dual_rail(
    rho: DensityOperator, reg: DualRailRegister = DualRailRegister()
) -> tuple[np.ndarray, float]:
    """(renormalized 8x8 qubit matrix in bitstring order, subspace weight).

    Components with any photon outside the register pairs, or without exactly
    one photon per pair, are projected out; their total weight is
    1 - subspace_weight.
    """
    n = reg.n_qubits
    reg_modes = set(reg.modes)
    pos: dict[int, int] = {}
    for i, occ_vec in enumerate(rho.basis):
        off = any(
            occ_vec[m]
            for m in range(occ_vec.n_modes)
            if (m + 1) not in reg_modes
        )
        if off:
            continue
        bits = dual_rail_decode(occ_vec, reg)
        if bits is None:
            continue
        pos[i] = int(bits, 2)
    dim = 2**n
    qmat = np.zeros((dim, dim), dtype=np.complex128)
    for i, bi in pos.items():
        for j, bj in pos.items():
            qmat[bi, bj] = rho.matrix[i, j]
    weight = float(qmat.trace().real)
    if weight <= 0.0:
        raise DegenerateInputError("state has zero dual-rail subspace weight")
    return qmat / weight, weight


def _as_qubit_matrix(rho, reg: DualRailRegister) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        qmat, _ = project_dual_rail(rho, reg)
        return qmat
    qmat = np.asarray(rho, dtype=np.complex128)
    if qmat.shape != (8, 8):
        raise ValueError("expected an 8x8 qubit matrix or a DensityOperator")
    tr = float(qmat.trace().real)
    if tr <= 0.0:
        raise DegenerateInputError("qubit matrix has non-positive trace")
    return qmat / tr


def population(rho, reg: DualRailRegister = DualRailRegister()) -> float:
    """rho_{000,000} + rho_{111,111} of the subspace-renormalized state."""
    qmat = _as_qubit_matrix(rho, reg)
    return float(qmat[0, 0].real + qmat[7, 7].real)


def m_theta_operator(theta: float, n_qubits: int = 3) -> np.ndarray:
    """(cos theta X + sin theta Y)^{tensor n}."""
    single = math.cos(theta) * _PAULI_X + math.sin(theta) * _PAULI_Y
    op = single
    for _ in range(n_qubits - 1):
        op = np.kron(op, single)
    return op

def expectation_M(rho, theta: float, reg: DualRailRegister = DualRailRegister()) -> float:
    """Tr(rho M_theta^{tensor 3}) on the subspace-renormalized state."""
    qmat = _as_qubit_matrix(rho, reg)
    val = complex(np.trace(qmat @ m_theta_operator(theta)))
    return float(val.real)


def coherence(rho, reg: DualRailRegister = DualRailRegister()) -> float:
    """(1/3) sum_k (-1)^k <M_{k pi/3}>; equals 2 Re rho_{000,111} in-subspace."""
    total = 0.0
    for k, theta in enumerate(COHERENCE_ANGLES):
        total += (-1) ** k * expectation_M(rho, theta, reg)
    return total / 3.0


def fidelity_pc(rho, reg: DualRailRegister = DualRailRegister()) -> AnalysisResult:
    """Exact witness result F = (P + C)/2 (zero error bars)."""
    if isinstance(rho, DensityOperator):
        qmat, weight = project_dual_rail(rho, reg)
    else:
        qmat, weight = _as_qubit_matrix(rho, reg), None
    p = float(qmat[0, 0].real + qmat[7, 7].real)
    expectations = {}
    c = 0.0
    for k, theta in enumerate(COHERENCE_ANGLES):
        e = float(np.trace(qmat @ m_theta_operator(theta)).real)
        expectations[theta] = (e, 0.0)
        c += (-1) ** k * e
    c /= 3.0
    f = (p + c) / 2.0
    return AnalysisResult(p, 0.0, c, 0.0, f, 0.0, expectations, weight)


# --- measurement-outcome probabilities ---------------------------------------


def outcome_probabilities(rho, setting: MeasurementSetting,
                          reg: DualRailRegister = DualRailRegister()) -> np.ndarray:
    """Probabilities of the 8 outcome bitstrings under the setting.

    Computational outcomes are the Z-basis bitstrings. Equatorial outcomes
    are per-qubit signs of M_theta, encoded 0 = +1, 1 = -1 (the photon's exit
    rail in the analyzer).
    """
    qmat = _as_qubit_matrix(rho, reg)
    if setting.basis_kind == "computational":
        return np.abs(np.diag(qmat).real).clip(min=0.0)
    theta = setting.theta
    plus = np.array([1.0, np.exp(1j * theta)]) / math.sqrt(2.0)
    minus = np.array([1.0, -np.exp(1j * theta)]) / math.sqrt(2.0)
    probs = np.zeros(8)
    for out in range(8):
        vec = np.array([1.0 + 0j])
        for q in range(3):
            bit = (out >> (2 - q)) & 1
            vec = np.kron(vec, minus if bit else plus)
        probs[out] = max(0.0, float((vec.conj() @ qmat @ vec).real))
    return probs


def simulate_counts(
    probabilities, expected_total: float, seed, setting: MeasurementSetting | None = None,
    duration_hours: float = 0.0,
) -> CountRecord:
    """Independent Poisson counts with means expected_total * p_i."""
    p = np.asarray(probabilities, dtype=np.float64)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()}, expected 1")
    if not expected_total > 0:
        raise ValueError("expected_total must be positive")
    rng = np.random.default_rng(seed)
    counts = rng.poisson(expected_total * p)
    keys = bitstrings(int(round(math.log2(len(p)))))
    if len(keys) != len(p):
        raise ValueError("probability vector length must be a power of two")
    setting = setting if setting is not None else MeasurementSetting("computational")
    return CountRecord(setting, dict(zip(keys, counts.tolist())), duration_hours)


def _parity_sign(bits: str) -> float:
    return -1.0 if bits.count("1") % 2 else 1.0


def _population_estimate(record: CountRecord) -> tuple[float, float]:
    n = record.total
    if n == 0:
        raise DegenerateInputError("computational record has zero total counts")
    nq = len(next(iter(record.counts)))
    s = record.counts.get("0" * nq, 0) + record.counts.get("1" * nq, 0)
    p = s / n
    var = p * (1.0 - p) / n
    return p, math.sqrt(max(var, 0.0))


def _expectation_estimate(record: CountRecord) -> tuple[float, float]:
    n = record.total
    if n == 0:
        raise DegenerateInputError("equatorial record has zero total counts")
    signed = sum(_parity_sign(b) * c for b, c in record.counts.items())
    e = signed / n
    var = (1.0 - e * e) / n
    return e, math.sqrt(max(var, 0.0))


def estimate_from_counts(records: list[CountRecord]) -> AnalysisResult:
    """P, <M_theta>, C, F with first-order Poisson error propagation.

    Requires one computational record and equatorial records at
    theta in {0, pi/3, 2pi/3}.
    """
    comp = None
    equat: dict[float, CountRecord] = {}
    for rec in records:
        if rec.setting.basis_kind == "computational":
            comp = rec
        else:
            equat[rec.setting.theta] = rec
    if comp is None:
        raise ValueError("missing computational-basis record")
    for theta in COHERENCE_ANGLES:
        if not any(abs(t - theta) < 1e-9 for t in equat):
            raise ValueError(f"missing equatorial record at theta = {theta}")

    p, sigma_p = _population_estimate(comp)
    expectations = {}
    c = 0.0
    var_c = 0.0
    for k, theta in enumerate(COHERENCE_ANGLES):
        rec = next(r for t, r in equat.items() if abs(t - theta) < 1e-9)
        e, sigma_e = _expectation_estimate(rec)
        expectations[theta] = (e, sigma_e)
        c += (-1) ** k * e
        var_c += sigma_e**2
    c /= 3.0
    sigma_c = math.sqrt(var_c) / 3.0
    f = (p + c) / 2.0
    sigma_f = 0.5 * math.sqrt(sigma_p**2 + sigma_c**2)
    return AnalysisResult(p, sigma_p, c, sigma_c, f, sigma_f, expectations, None)


# --- interferometer characterization -----------------------------------------


def characterize_circuit(u: np.ndarray, used_inputs, observed_outputs):
    """(amplitude, phase) tables of the mode unitary, one row per input.

    Amplitudes are |U_oi|^2 renormalized across the observed outputs of each
    input. Phases are arg(U_oi) in the gauge where the first row and first
    column of the table are zero (absorbing input/output phase freedom).
    """
    u = np.asarray(u, dtype=np.complex128)
    ins = [int(m) - 1 for m in used_inputs]
    outs = [int(m) - 1 for m in observed_outputs]
    if any(not 0 <= m < u.shape[0] for m in ins + outs):
        raise ValueError("mode index outside the unitary's range")
    block = u[np.ix_(outs, ins)].T  # rows = inputs, cols = outputs
    power = np.abs(block) ** 2
    row_sums = power.sum(axis=1, keepdims=True)
    if np.any(row_sums == 0.0):
        raise DegenerateInputError("an input couples to none of the observed outputs")
    amplitude = power / row_sums
    phase = np.angle(block)
    return amplitude, _wrap_phase(_gauge_phase(phase))


def _gauge_phase(p: np.ndarray) -> np.ndarray:
    """Subtract the first row and column so gauged tables have exact zeros there."""
    col = p[:, 0:1] - p[0, 0]
    return p - p[0:1, :] - col


def _wrap_phase(p: np.ndarray) -> np.ndarray:
    """Wrap into [-pi, pi); bitwise identity on entries already in range."""
    wrapped = np.mod(p + math.pi, 2.0 * math.pi) - math.pi
    return np.where((p >= -math.pi) & (p < math.pi), p, wrapped)


def regauge(amplitude: np.ndarray, phase: np.ndarray):
    """Re-apply the table gauge; exact fixed point on already-gauged tables.

    Rows already normalized within 1e-12 are passed through bitwise, and the
    first-row/column phase fix maps an already-fixed table to itself exactly,
    so regauge(regauge(A, P)) == regauge(A, P) bit-for-bit.
    """
    amplitude = np.asarray(amplitude, dtype=np.float64)
    p = np.asarray(phase, dtype=np.float64)
    p = _wrap_phase(_gauge_phase(p))
    sums = amplitude.sum(axis=1, keepdims=True)
    if np.max(np.abs(sums - 1.0)) > 1e-12:
        amplitude = amplitude / sums
    return amplitude, p
