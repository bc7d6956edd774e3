"""Multiphoton Fock evolution through a mode unitary via matrix permanents.

The transition amplitude between occupation vectors s (input) and t (output)
is Per(U[t-rows, s-cols]) / sqrt(prod(s!) * prod(t!)). Partially
distinguishable photons are handled by expanding every photon over a finite
orthonormal internal basis; photon groups carrying different internal labels
evolve independently and never interfere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError
from .fock import (
    BASIS_SIZE_CAP,
    OccupationVector,
    PureState,
    basis_array,
    basis_size,
    enumerate_basis,
)

#: Caps: Ryser kernel matrix size and naive-oracle matrix size.
PERMANENT_CAP = 16
NAIVE_CAP = 9


def permanent(matrix: np.ndarray, cap: int = PERMANENT_CAP) -> complex:
    """Matrix permanent by Ryser's formula with Gray-code subset updates.

    Deterministic summation order (subsets visited in Gray-code sequence),
    O(2^n * n) complex operations.
    """
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("permanent needs a square matrix")
    n = a.shape[0]
    if n > cap:
        raise CapacityError(f"matrix size {n} exceeds permanent cap {cap}")
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0j
    sign = -1.0 if n % 2 else 1.0  # (-1)^n prefactor folded into subset signs
    gray = 0
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        bit = new_gray ^ gray
        col = bit.bit_length() - 1
        if new_gray & bit:
            row_sums += a[:, col]
        else:
            row_sums -= a[:, col]
        gray = new_gray
        subset_sign = -1.0 if (new_gray.bit_count() % 2) else 1.0
        total += subset_sign * np.prod(row_sums)
    return complex(sign * total)


def permanent_naive(matrix: np.ndarray, cap: int = NAIVE_CAP) -> complex:
    """Test oracle: direct sum over all n! permutations."""
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("permanent needs a square matrix")
    n = a.shape[0]
    if n > cap:
        raise CapacityError(f"matrix size {n} exceeds naive-oracle cap {cap}")
    if n == 0:
        return 1.0 + 0j
    rows = np.arange(n)
    total = 0j
    for perm in itertools.permutations(range(n)):
        total += np.prod(a[rows, perm])
    return complex(total)


def _occupation_indices(occ_counts) -> list[int]:
    """Mode indices (0-based) repeated by occupation, e.g. (2,0,1) -> [0,0,2]."""
    out = []
    for m, c in enumerate(occ_counts):
        out.extend([m] * int(c))
    return out


def _fact_product(counts) -> float:
    p = 1.0
    for c in counts:
        p *= math.factorial(int(c))
    return p


def transition_amplitude(
    u: np.ndarray, s: OccupationVector, t: OccupationVector
) -> complex:
    """Amplitude <t| U_Fock |s> for fully indistinguishable photons."""
    if s.total_photons != t.total_photons:
        raise ValueError("input and output photon numbers differ")
    rows = _occupation_indices(t.counts)
    cols = _occupation_indices(s.counts)
    sub = np.asarray(u)[np.ix_(rows, cols)]
    norm = math.sqrt(_fact_product(s.counts) * _fact_product(t.counts))
    return permanent(sub) / norm


def _subset_masks(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Column-subset indicator matrix and per-subset signs for batched Ryser."""
    ks = np.arange(1, 1 << n, dtype=np.uint32)
    masks = ((ks[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(
        np.float64
    )
    parity = masks.sum(axis=1).astype(np.int64)
    signs = np.where(parity % 2 == 0, 1.0, -1.0) * (-1.0 if n % 2 else 1.0)
    return masks, signs


def transition_amplitudes_batch(
    u: np.ndarray, s: OccupationVector, t_array: np.ndarray
) -> np.ndarray:
    """Vectorized amplitudes from s to every occupation row of t_array.

    Same Ryser summation as :func:`permanent` up to re-association of the
    subset sum, used for whole-basis evolution where the per-element kernel
    would dominate runtime.
    """
    n = s.total_photons
    if n == 0:
        return np.ones(len(t_array), dtype=np.complex128)
    if n > PERMANENT_CAP:
        raise CapacityError(f"photon number {n} exceeds permanent cap {PERMANENT_CAP}")
    cols = _occupation_indices(s.counts)
    u = np.asarray(u, dtype=np.complex128)
    # rows of each submatrix: output modes repeated by occupation
    row_idx = np.array([_occupation_indices(t) for t in t_array], dtype=np.int64)
    subs = u[row_idx][:, :, cols]  # (B, n, n)
    masks, signs = _subset_masks(n)
    # row sums over each column subset: (B, n, n) @ (n, S) -> (B, n, S)
    sums = subs @ masks.T
    prods = np.prod(sums, axis=1)  # (B, S)
    perms = prods @ signs
    t_fact = np.array([_fact_product(t) for t in t_array])
    return perms / np.sqrt(_fact_product(s.counts) * t_fact)


def evolve_pure(
    u: np.ndarray, input_occ: OccupationVector, cap: int = BASIS_SIZE_CAP
) -> PureState:
    """Evolve a Fock input through the unitary; amplitudes over the full basis."""
    n, m = input_occ.total_photons, input_occ.n_modes
    if np.asarray(u).shape != (m, m):
        raise ValueError("unitary size does not match the input mode count")
    basis = enumerate_basis(n, m, cap=cap)
    amps = transition_amplitudes_batch(u, input_occ, basis_array(basis))
    return PureState(basis, amps)


# --- partial distinguishability -------------------------------------------


@dataclass(frozen=True)
class PhotonInput:
    """One injected photon: physical mode (1-based) and internal state vector."""

    mode: int
    internal: tuple[complex, ...]

    def __post_init__(self):
        v = np.asarray(self.internal, dtype=np.complex128)
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("internal state must be unit norm")
        object.__setattr__(self, "internal", tuple(v))


def _solve_p2_from_g2(g2: float) -> float:
    """Two-photon emission probability reproducing an HBT g2(0).

    Mixture model: with probability p2 the source emits one extra, fully
    distinguishable photon, so g2 = 2*p2 / (1 + p2)^2; the small root is the
    physical one.
    """
    if g2 < 0 or g2 >= 0.5:
        raise ValueError("g2 must lie in [0, 0.5) for the mixture model")
    if g2 == 0.0:
        return 0.0
    # g2*p^2 + (2*g2 - 2)*p + g2 = 0
    disc = math.sqrt((2.0 - 2.0 * g2) ** 2 - 4.0 * g2 * g2)
    return ((2.0 - 2.0 * g2) - disc) / (2.0 * g2)


@dataclass(frozen=True)
class SourceModel:
    """Input photons with internal (distinguishability) states and g2 contamination.

    ``photons[j].internal`` are coordinates in one shared orthonormal internal
    basis. ``p2`` is the per-source probability of emitting one extra photon
    that is fully distinguishable from everything else.
    """

    photons: tuple[PhotonInput, ...]
    p2: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p2 < 1.0:
            raise ValueError("p2 must lie in [0, 1)")
        dims = {len(p.internal) for p in self.photons}
        if len(dims) > 1:
            raise ValueError("all internal states must share one basis dimension")
        if dims and max(dims) > len(self.photons) + 1:
            raise ValueError("internal dimension exceeds photon count + 1")

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(p.mode for p in self.photons)

    def gram(self) -> np.ndarray:
        """Pairwise internal overlap matrix S_ij = <psi_i|psi_j>."""
        vecs = np.array([p.internal for p in self.photons])
        return vecs.conj() @ vecs.T

    @classmethod
    def ideal(cls, modes, n_modes: int | None = None) -> "SourceModel":
        return cls(tuple(PhotonInput(m, (1.0,)) for m in modes))

    @classmethod
    def from_reference_visibilities(
        cls,
        modes,
        visibilities,
        g2: float = 0.0,
        g2_corrected: bool = False,
    ) -> "SourceModel":
        """Source model calibrated from photon-1-referenced HOM visibilities.

        Photon i carries internal state sqrt(v_i)|common> + sqrt(1-v_i)|bad_i>
        with mutually orthogonal bad components, so the pairwise visibility is
        V_ij = v_i * v_j. Only V_1j (j >= 2) are measured; v_1 is fixed to the
        smallest value consistent with every v_j <= 1, i.e. v_1 = max_j V_1j.
        With ``g2_corrected`` the visibilities are first divided by the HOM
        reduction (1 - 2*p2) caused by contamination.
        """
        modes = tuple(modes)
        vis = list(visibilities)
        if len(vis) != len(modes) - 1:
            raise ValueError("need one visibility per photon beyond the reference")
        p2 = _solve_p2_from_g2(g2)
        if g2_corrected and p2 > 0.0:
            vis = [v / (1.0 - 2.0 * p2) for v in vis]
        if any(not 0.0 <= v <= 1.0 for v in vis):
            raise ValueError("visibilities must lie in [0, 1]")
        v1 = max(vis) if vis else 1.0
        vs = [v1] + [v / v1 if v1 > 0 else 0.0 for v in vis]
        dim = len(modes) + 1  # common label + one bad label per photon
        photons = []
        for j, (m, vj) in enumerate(zip(modes, vs)):
            vec = [0.0] * dim
            vec[0] = math.sqrt(vj)
            vec[1 + j] = math.sqrt(max(0.0, 1.0 - vj))
            photons.append(PhotonInput(m, tuple(vec)))
        return cls(tuple(photons), p2=p2)

    @classmethod
    def uniform_visibility(cls, modes, pairwise_visibility: float) -> "SourceModel":
        """All pairs share |<psi_i|psi_j>|^2 = pairwise_visibility."""
        if not 0.0 <= pairwise_visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")
        v = math.sqrt(pairwise_visibility)  # v_i = sqrt(V) for all i
        modes = tuple(modes)
        dim = len(modes) + 1
        photons = []
        for j, m in enumerate(modes):
            vec = [0.0] * dim
            vec[0] = math.sqrt(v)
            vec[1 + j] = math.sqrt(max(0.0, 1.0 - v))
            photons.append(PhotonInput(m, tuple(vec)))
        return cls(tuple(photons))


@dataclass
class Sector:
    """One internal-label sector of a distinguishable evolution.

    ``weight`` is the sector probability; ``label_states`` maps each internal
    label to the evolved PureState of the photons carrying that label.
    """

    weight: float
    label_states: dict[int, PureState]

    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.label_states))


@dataclass
class DistinguishableEvolution:
    """Sector-decomposed output of evolving a SourceModel through a unitary."""

    n_modes: int
    n_photons: int
    sectors: list[Sector]

    def physical_distribution(self) -> dict[OccupationVector, float]:
        """Probabilities of total (label-blind) output occupations."""
        total: dict[tuple, float] = {}
        for sector in self.sectors:
            dist = {(0,) * self.n_modes: 1.0}
            for state in sector.label_states.values():
                probs = state.probabilities()
                new: dict[tuple, float] = {}
                for b, p in zip(state.basis, probs):
                    if p == 0.0:
                        continue
                    for acc, q in dist.items():
                        key = tuple(a + c for a, c in zip(acc, b.counts))
                        new[key] = new.get(key, 0.0) + q * p
                dist = new
            for key, q in dist.items():
                total[key] = total.get(key, 0.0) + sector.weight * q
        return {OccupationVector(k): v for k, v in sorted(total.items(), reverse=True)}


def _label_assignments(source: SourceModel):
    """Group photon-label assignments by label multiset.

    Yields (labels_per_photon, coefficient) per assignment; assignments whose
    label multisets differ never interfere, and identical multisets are
    grouped by the caller.
    """
    supports = [
        [(b, c) for b, c in enumerate(p.internal) if c != 0] for p in source.photons
    ]
    for combo in itertools.product(*supports):
        labels = tuple(b for b, _ in combo)
        coeff = 1.0 + 0j
        for _, c in combo:
            coeff *= c
        yield labels, coeff


def evolve_distinguishable(
    u: np.ndarray, source: SourceModel, cap: int = BASIS_SIZE_CAP
) -> DistinguishableEvolution:
    """Evolve partially distinguishable photons through the unitary.

    Expands each photon over the internal basis; groups of photons sharing a
    label interfere coherently (evolved with :func:`evolve_pure`), different
    labels evolve independently. Assignments with the same label multiset are
    summed coherently; in the bad-label models built by SourceModel the
    multisets are all distinct so sectors are simple products.
    """
    gram = source.gram()
    eig = np.linalg.eigvalsh(gram)
    if eig[0] < -1e-9:
        raise ValueError("internal Gram matrix is not positive semidefinite")
    u = np.asarray(u, dtype=np.complex128)
    m = u.shape[0]

    # group assignments by label multiset
    groups: dict[tuple, list[tuple[tuple, complex]]] = {}
    for labels, coeff in _label_assignments(source):
        key = tuple(sorted(labels))
        groups.setdefault(key, []).append((labels, coeff))

    sectors = []
    for key, assignments in groups.items():
        if len(assignments) > 1:
            # identical multisets with photons distributed differently over
            # labels interfere; the bad-label models never produce this
            raise NotImplementedError(
                "coherent same-multiset label assignments are not supported"
            )
        labels, coeff = assignments[0]
        weight = float(abs(coeff) ** 2)
        if weight == 0.0:
            continue
        label_states: dict[int, PureState] = {}
        for b in sorted(set(labels)):
            counts = [0] * m
            for photon, lab in zip(source.photons, labels):
                if lab == b:
                    counts[photon.mode - 1] += 1
            label_states[b] = evolve_pure(u, OccupationVector(tuple(counts)), cap=cap)
        sectors.append(Sector(weight, label_states))
    total = sum(s.weight for s in sectors)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"sector weights sum to {total}, expected 1")
    return DistinguishableEvolution(m, len(source.photons), sectors)
