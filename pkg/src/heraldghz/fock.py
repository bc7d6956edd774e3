"""Fock-basis bookkeeping: occupation vectors, state containers, dual-rail qubits.

Mode indices are 1-based in every public interface (matching the usual
circuit-diagram labelling); the canonical basis order is lexicographic
descending on occupation tuples, so e.g. the one-photon/two-mode basis is
[(1,0), (0,1)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BasisMismatchError, CapacityError

#: Default hard cap on Fock-basis sizes (number of occupation vectors).
BASIS_SIZE_CAP = 10**7

#: Absolute tolerance used by the state-validity checks below.
HERMITICITY_TOL = 1e-9
NORM_TOL = 1e-9
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True, order=True)
class OccupationVector:
    """Photon count per optical mode; the Fock basis label.

    Immutable, hashable and ordered (tuple order, which together with the
    reverse sort in :func:`enumerate_basis` gives the canonical descending
    lexicographic basis order).
    """

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative photon count in {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def n_modes(self) -> int:
        return len(self.counts)

    @property
    def total_photons(self) -> int:
        return sum(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, mode_index):
        return self.counts[mode_index]

    def __iter__(self):
        return iter(self.counts)

    def __str__(self) -> str:
        return "|" + ",".join(str(c) for c in self.counts) + ">"


def occ(*counts: int) -> OccupationVector:
    """Shorthand constructor: ``occ(1, 0, 1) == OccupationVector((1, 0, 1))``."""
    return OccupationVector(tuple(counts))


def basis_size(n_photons: int, n_modes: int) -> int:
    """Number of n-photon occupation vectors on M modes: C(n+M-1, n)."""
    return math.comb(n_photons + n_modes - 1, n_photons)


def enumerate_basis(
    n_photons: int, n_modes: int, cap: int = BASIS_SIZE_CAP
) -> list[OccupationVector]:
    """All occupation vectors with the given photon number, in canonical order.

    Canonical order is lexicographic descending on the count tuples; the
    index of a vector in the returned list is its basis index everywhere in
    this package.
    """
    if n_photons < 0 or n_modes < 1:
        raise ValueError("need n_photons >= 0 and n_modes >= 1")
    size = basis_size(n_photons, n_modes)
    if size > cap:
        raise CapacityError(
            f"basis of {size} occupation vectors exceeds cap {cap}"
        )
    return [OccupationVector(t) for t in _enumerate_tuples(n_photons, n_modes)]


def _enumerate_tuples(n: int, m: int) -> list[tuple[int, ...]]:
    if m == 1:
        return [(n,)]
    out = []
    for first in range(n, -1, -1):
        out.extend((first, *rest) for rest in _enumerate_tuples(n - first, m - 1))
    return out


def basis_array(basis: list[OccupationVector]) -> np.ndarray:
    """Basis as an integer array of shape (len(basis), n_modes)."""
    return np.array([b.counts for b in basis], dtype=np.int64)


class PureState:
    """Complex amplitude vector over a fixed-photon-number Fock basis."""

    def __init__(self, basis, amplitudes, normalize: bool = False):
        basis = list(basis)
        if not basis:
            raise ValueError("empty basis")
        n = basis[0].total_photons
        m = basis[0].n_modes
        if any(b.total_photons != n or b.n_modes != m for b in basis):
            raise BasisMismatchError("basis mixes photon numbers or mode counts")
        amps = np.asarray(amplitudes, dtype=np.complex128).copy()
        if amps.shape != (len(basis),):
            raise ValueError("amplitude vector length does not match basis")
        norm = float(np.linalg.norm(amps))
        if normalize:
            if norm == 0.0:
                raise ValueError("cannot normalize the zero vector")
            amps /= norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        amps.setflags(write=False)
        self.basis = basis
        self.amplitudes = amps
        self.n_photons = n
        self.n_modes = m

    @cached_property
    def index(self) -> dict[OccupationVector, int]:
        return {b: i for i, b in enumerate(self.basis)}

    def amplitude(self, occ_vec: OccupationVector) -> complex:
        i = self.index.get(occ_vec)
        return 0j if i is None else complex(self.amplitudes[i])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density(self) -> "DensityOperator":
        mat = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(self.basis, mat)

    def __repr__(self) -> str:
        return f"PureState(n={self.n_photons}, modes={self.n_modes}, dim={len(self.basis)})"


class DensityOperator:
    """Hermitian, unit-trace operator over an ordered occupation basis."""

    def __init__(self, basis, matrix, normalize: bool = False):
        basis = list(basis)
        mat = np.asarray(matrix, dtype=np.complex128).copy()
        if mat.shape != (len(basis), len(basis)):
            raise ValueError("matrix shape does not match basis")
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        tr = float(mat.trace().real)
        if normalize:
            if tr <= 0.0:
                raise ValueError("cannot normalize: non-positive trace")
            mat /= tr
        elif abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {NORM_TOL}")
        mat.setflags(write=False)
        self.basis = basis
        self.matrix = mat

    @cached_property
    def index(self) -> dict[OccupationVector, int]:
        return {b: i for i, b in enumerate(self.basis)}

    def element(self, bra: OccupationVector, ket: OccupationVector) -> complex:
        i, j = self.index.get(bra), self.index.get(ket)
        if i is None or j is None:
            return 0j
        return complex(self.matrix[i, j])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def check_physical(self, tol: float = POSITIVITY_TOL) -> None:
        """Raise if the operator fails the positivity invariant."""
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise ValueError(f"negative eigenvalue {lo} below -{tol}")

    def __repr__(self) -> str:
        return f"DensityOperator(dim={len(self.basis)})"


@dataclass(frozen=True)
class DualRailRegister:
    """Dual-rail qubit layout: qubit k lives on the mode pair qubit_pairs[k].

    Mode indices are 1-based. A Fock state is a register state iff every
    pair holds exactly one photon in total; |0> = photon in the first rail,
    |1> = photon in the second rail.
    """

    qubit_pairs: tuple[tuple[int, int], ...] = ((1, 2), (3, 4), (5, 6))

    def __post_init__(self):
        flat = [m for pair in self.qubit_pairs for m in pair]
        if len(set(flat)) != len(flat):
            raise ValueError("dual-rail pairs must be disjoint")
        if any(m < 1 for m in flat):
            raise ValueError("mode indices are 1-based")

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_pairs)

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(m for pair in self.qubit_pairs for m in pair)


def dual_rail_decode(occ_vec: OccupationVector, reg: DualRailRegister) -> str | None:
    """Logical bitstring of a register state, or None if not a register state."""
    if any(m > occ_vec.n_modes for m in reg.modes):
        raise ValueError("register mode index out of range for this occupation vector")
    bits = []
    for a, b in reg.qubit_pairs:
        na, nb = occ_vec[a - 1], occ_vec[b - 1]
        if (na, nb) == (1, 0):
            bits.append("0")
        elif (na, nb) == (0, 1):
            bits.append("1")
        else:
            return None
    return "".join(bits)


def dual_rail_encode(bits: str, reg: DualRailRegister, n_modes: int) -> OccupationVector:
    """Occupation vector of the logical bitstring (zero photons off-register)."""
    if len(bits) != reg.n_qubits:
        raise ValueError("bitstring length does not match register size")
    counts = [0] * n_modes
    for bit, (a, b) in zip(bits, reg.qubit_pairs):
        counts[(a if bit == "0" else b) - 1] = 1
    return OccupationVector(tuple(counts))


def logical_state(
    amplitudes: dict[str, complex], reg: DualRailRegister, n_modes: int
) -> PureState:
    """Pure register state from a {bitstring: amplitude} map, normalized."""
    n = reg.n_qubits
    basis = enumerate_basis(n, n_modes)
    index = {b: i for i, b in enumerate(basis)}
    vec = np.zeros(len(basis), dtype=np.complex128)
    for bits, amp in amplitudes.items():
        vec[index[dual_rail_encode(bits, reg, n_modes)]] = amp
    return PureState(basis, vec, normalize=True)


def ghz_state(reg: DualRailRegister = DualRailRegister(), n_modes: int = 6) -> PureState:
    """(|00...0> + |11...1>)/sqrt(2) in the register's mode basis."""
    k = reg.n_qubits
    return logical_state({"0" * k: 1.0, "1" * k: 1.0}, reg, n_modes)


def fidelity(rho: DensityOperator, target: PureState) -> float:
    """State-overlap fidelity <target| rho |target> for a pure target.

    The bases may differ as long as every target component with nonzero
    amplitude exists in rho's basis (missing rho entries count as zero).
    """
    if rho.basis == target.basis:
        vec = target.amplitudes
        val = complex(vec.conj() @ rho.matrix @ vec)
    else:
        idx = []
        amps = []
        for b, a in zip(target.basis, target.amplitudes):
            if a == 0:
                continue
            i = rho.index.get(b)
            if i is None:
                raise BasisMismatchError(
                    f"target component {b} with nonzero amplitude missing from rho basis"
                )
            idx.append(i)
            amps.append(a)
        vec = np.array(amps, dtype=np.complex128)
        sub = rho.matrix[np.ix_(idx, idx)]
        val = complex(vec.conj() @ sub @ vec)
    if abs(val.imag) > 1e-9:
        raise ValueError(f"fidelity has imaginary residue {val.imag}")
    return float(min(max(val.real, 0.0), 1.0))
