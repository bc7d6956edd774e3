"""Detector models and heralding: condition on ancilla patterns, keep the signal.

A herald rule names the ancilla modes, the accepted detector readouts on them,
and a frozen local Z-phase correction per readout. Conditioning a state on a
readout uses the detector POVM (diagonal in the ancilla occupation basis), so
different true ancilla occupations contribute incoherently while the signal
amplitudes attached to a single ancilla occupation stay coherent.

Partially distinguishable inputs arrive sector-decomposed (see evolution); the
heralded density operator keeps coherence exactly where a label-blind,
pair-local measurement can see it: between dual-rail components in which the
same internal label occupies the same qubit pair.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError
from .fock import (
    DensityOperator,
    DualRailRegister,
    OccupationVector,
    PureState,
    dual_rail_decode,
    enumerate_basis,
    fidelity,
    ghz_state,
)
from .evolution import DistinguishableEvolution, SourceModel, evolve_distinguishable

IDEAL_PNR = "ideal_pnr"
PSEUDO_PNR = "pseudo_pnr"
THRESHOLD = "threshold"

_DETECTOR_KINDS = (IDEAL_PNR, PSEUDO_PNR, THRESHOLD)

#: Readouts below this probability are reported as probability 0 with no state.
NULL_PATTERN_TOL = 1e-15


@dataclass(frozen=True)
class DetectorModel:
    """Per-ancilla-mode photon detector.

    kind selects the readout statistics: ideal_pnr reads the true photon
    number, pseudo_pnr saturates at max_resolvable, threshold reads click /
    no-click. ``efficiency`` is the per-photon detection probability (scalar,
    shared by every ancilla detector). ``dark_count`` is the probability of
    one spurious count per detector per window (0 disables it).
    """

    kind: str = IDEAL_PNR
    efficiency: float = 1.0
    max_resolvable: int = 2
    dark_count: float = 0.0

    def __post_init__(self):
        if self.kind not in _DETECTOR_KINDS:
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if not 0.0 <= self.dark_count < 1.0:
            raise ValueError("dark_count must lie in [0, 1)")
        if self.kind == PSEUDO_PNR and self.max_resolvable < 1:
            raise ValueError("max_resolvable must be >= 1")

    def readout_probability(self, readout: int, photons: int) -> float:
        """P(detector reads ``readout`` | ``photons`` photons arrive)."""
        if readout < 0 or photons < 0:
            raise ValueError("counts must be non-negative")
        eta = self.efficiency
        # detected photons ~ Binomial(photons, eta)
        detected = [
            math.comb(photons, d) * eta**d * (1.0 - eta) ** (photons - d)
            for d in range(photons + 1)
        ]
        if self.dark_count > 0.0:
            # one spurious count with probability dark_count
            shifted = [0.0] * (photons + 2)
            for d, p in enumerate(detected):
                shifted[d] += p * (1.0 - self.dark_count)
                shifted[d + 1] += p * self.dark_count
            detected = shifted
        if self.kind == IDEAL_PNR:
            return detected[readout] if readout < len(detected) else 0.0
        if self.kind == PSEUDO_PNR:
            cap = self.max_resolvable
            if readout > cap:
                return 0.0
            if readout < cap:
                return detected[readout] if readout < len(detected) else 0.0
            return float(sum(detected[cap:]))
        # threshold
        if readout > 1:
            return 0.0
        p_none = detected[0]
        return p_none if readout == 0 else 1.0 - p_none

    def pattern_probability(self, pattern, photons) -> float:
        """P(joint readout ``pattern`` | true per-mode ``photons``)."""
        if len(pattern) != len(photons):
            raise ValueError("pattern and occupation lengths differ")
        p = 1.0
        for r, n in zip(pattern, photons):
            p *= self.readout_probability(int(r), int(n))
            if p == 0.0:
                return 0.0
        return p

    def is_projective(self) -> bool:
        """True when conditioning reduces to exact occupation matching."""
        return (
            self.efficiency == 1.0
            and self.dark_count == 0.0
            and self.kind == IDEAL_PNR
        )


@dataclass(frozen=True)
class HeraldRule:
    """Accepted ancilla readouts and the frozen per-readout corrections.

    ``ancilla_modes`` are 1-based; every other mode is signal. Each accepted
    pattern is a readout tuple over the ancilla modes in order.
    ``corrections`` maps a pattern to one Z-phase per dual-rail qubit, applied
    to the heralded state (phase on the second rail of each pair).
    """

    ancilla_modes: tuple[int, ...] = (7, 8, 9, 10)
    patterns: tuple[tuple[int, ...], ...] = ((1, 1, 1, 0), (1, 1, 0, 1))
    corrections: dict[tuple[int, ...], tuple[float, ...]] = field(default_factory=dict)
    register: DualRailRegister = DualRailRegister()

    def __post_init__(self):
        anc = tuple(int(m) for m in self.ancilla_modes)
        pats = tuple(tuple(int(c) for c in p) for p in self.patterns)
        if len(set(anc)) != len(anc) or any(m < 1 for m in anc):
            raise ValueError("ancilla modes must be distinct and 1-based")
        if len(set(pats)) != len(pats):
            raise ValueError("accepted patterns must be distinct")
        for p in pats:
            if len(p) != len(anc):
                raise ValueError("pattern length must match ancilla mode count")
            if any(c < 0 for c in p):
                raise ValueError("pattern counts must be non-negative")
        corr = {
            tuple(int(c) for c in k): tuple(float(x) for x in v)
            for k, v in self.corrections.items()
        }
        for k, v in corr.items():
            if len(v) != self.register.n_qubits:
                raise ValueError("need one correction phase per qubit")
        object.__setattr__(self, "ancilla_modes", anc)
        object.__setattr__(self, "patterns", pats)
        object.__setattr__(self, "corrections", corr)

    def signal_modes(self, n_modes: int) -> tuple[int, ...]:
        anc = set(self.ancilla_modes)
        if any(m > n_modes for m in anc):
            raise ValueError("ancilla mode outside the state's mode range")
        return tuple(m for m in range(1, n_modes + 1) if m not in anc)

    def correction_for(self, pattern) -> tuple[float, ...]:
        return self.corrections.get(tuple(pattern), (0.0,) * self.register.n_qubits)

    def to_dict(self) -> dict:
        return {
            "ancilla_modes": list(self.ancilla_modes),
            "patterns": [list(p) for p in self.patterns],
            "corrections": {
                ",".join(map(str, k)): list(v) for k, v in self.corrections.items()
            },
            "qubit_pairs": [list(p) for p in self.register.qubit_pairs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HeraldRule":
        corr = {
            tuple(int(x) for x in k.split(",")): tuple(v)
            for k, v in d.get("corrections", {}).items()
        }
        reg = DualRailRegister(
            tuple(tuple(p) for p in d.get("qubit_pairs", [[1, 2], [3, 4], [5, 6]]))
        )
        return cls(
            tuple(d.get("ancilla_modes", (7, 8, 9, 10))),
            tuple(tuple(p) for p in d.get("patterns", ((1, 1, 1, 0), (1, 1, 0, 1)))),
            corr,
            reg,
        )


@dataclass
class HeraldOutcome:
    """Result of conditioning on the accepted readouts.

    ``per_pattern`` maps each accepted pattern to (probability, heralded
    density operator on the signal modes, or None when the probability is 0).
    ``heralding_efficiency`` is the conditional weight of the dual-rail
    register subspace given that some accepted pattern fired (None when no
    pattern fires).
    """

    per_pattern: dict[tuple[int, ...], tuple[float, DensityOperator | None]]
    total_probability: float
    heralding_efficiency: float | None

    def state(self, pattern) -> DensityOperator:
        prob, rho = self.per_pattern[tuple(pattern)]
        if rho is None:
            raise DegenerateInputError(f"pattern {pattern} has zero probability")
        return rho


def _correction_phases(rule: HeraldRule, pattern, signal_basis) -> np.ndarray:
    """Diagonal phase factors of the per-pattern local Z correction."""
    phases = rule.correction_for(pattern)
    diag = np.zeros(len(signal_basis), dtype=np.float64)
    for i, occ_vec in enumerate(signal_basis):
        total = 0.0
        for phi, (_, b) in zip(phases, rule.register.qubit_pairs):
            if b <= occ_vec.n_modes:
                total += phi * occ_vec[b - 1]
        diag[i] = total
    return np.exp(1j * diag)


def _split_components(state: PureState, anc_idx, sig_idx):
    """Group amplitudes by ancilla occupation.

    Returns {ancilla occupation tuple: {signal occupation tuple: amplitude}}.
    """
    groups: dict[tuple, dict[tuple, complex]] = {}
    for occ_vec, amp in zip(state.basis, state.amplitudes):
        if amp == 0:
            continue
        anc = tuple(occ_vec[i] for i in anc_idx)
        sig = tuple(occ_vec[i] for i in sig_idx)
        groups.setdefault(anc, {})[sig] = groups.setdefault(anc, {}).get(sig, 0j) + amp
    return groups


def _as_components(state, rule: HeraldRule):
    """Normalize input to a list of (weight, {label: 10-mode PureState})."""
    if isinstance(state, PureState):
        return state.n_modes, state.n_photons, [(1.0, {0: state})]
    if isinstance(state, DistinguishableEvolution):
        comps = [(s.weight, dict(s.label_states)) for s in state.sectors]
        return state.n_modes, state.n_photons, comps
    raise TypeError("herald expects a PureState or DistinguishableEvolution")


def herald(state, rule: HeraldRule, det: DetectorModel = DetectorModel()) -> HeraldOutcome:
    """Condition on each accepted ancilla readout; return signal-mode states.

    For each accepted pattern the ancilla modes are measured with the
    detector POVM, the ancillas are traced out, the per-pattern local Z
    correction is applied, and the renormalized signal density operator is
    reported with the pattern probability.
    """
    n_modes, n_photons, components = _as_components(state, rule)
    anc_modes = rule.ancilla_modes
    sig_modes = rule.signal_modes(n_modes)
    anc_idx = [m - 1 for m in anc_modes]
    sig_idx = [m - 1 for m in sig_modes]

    for pattern in rule.patterns:
        if sum(pattern) > n_photons:
            raise ValueError(
                f"pattern {pattern} needs more photons than the state carries"
            )

    # Split every label state of every component by ancilla occupation once.
    split_components = []
    for weight, label_states in components:
        split_components.append(
            (weight, {b: _split_components(st, anc_idx, sig_idx) for b, st in label_states.items()})
        )

    per_pattern = {}
    subspace_mass = 0.0
    for pattern in rule.patterns:
        prob, rho, sub = _herald_one_pattern(
            split_components, pattern, det, rule, len(sig_modes), n_photons
        )
        per_pattern[pattern] = (prob, rho)
        subspace_mass += sub
    total = float(sum(p for p, _ in per_pattern.values()))
    efficiency = (subspace_mass / total) if total > NULL_PATTERN_TOL else None
    return HeraldOutcome(per_pattern, total, efficiency)


def _herald_one_pattern(split_components, pattern, det, rule, n_sig_modes, n_photons):
    """Probability, heralded density operator and register-subspace mass."""
    reg = rule.register
    # Collect signal pure components: (weight, {label: {sig occ: amp}})
    # after conditioning each label's ancilla occupation on a split of the
    # true ancilla occupation, weighted by the detector readout probability.
    sig_components: list[tuple[float, dict[int, dict[tuple, complex]]]] = []
    projective = det.is_projective()
    for weight, label_groups in split_components:
        labels = sorted(label_groups)
        anc_options = [sorted(label_groups[b]) for b in labels]
        # every joint choice of per-label ancilla occupations is one true
        # total ancilla occupation; distinct choices are orthogonal after
        # tracing out the ancillas, so they contribute incoherently
        for choice in itertools.product(*anc_options):
            total_anc = tuple(int(sum(c[i] for c in choice)) for i in range(len(pattern)))
            if projective:
                p_read = 1.0 if total_anc == tuple(pattern) else 0.0
            else:
                p_read = det.pattern_probability(pattern, total_anc)
            if p_read == 0.0:
                continue
            label_sig = {
                b: label_groups[b][anc]
                for b, anc in zip(labels, choice)
            }
            sig_components.append((weight * p_read, label_sig))

    if not sig_components:
        return 0.0, None, 0.0

    # Basis: union of photon numbers present among total signal occupations.
    photon_numbers = {
        sum(sum(next(iter(d))) for d in label_sig.values())
        for _, label_sig in sig_components
    }
    basis = []
    for n in sorted(photon_numbers, reverse=True):
        basis.extend(enumerate_basis(n, n_sig_modes))
    index = {b.counts: i for i, b in enumerate(basis)}
    dim = len(basis)
    mat = np.zeros((dim, dim), dtype=np.complex128)

    prob = 0.0
    subspace_mass = 0.0
    pair_idx = [(a - 1, b - 1) for a, b in reg.qubit_pairs]
    for weight, label_sig in sig_components:
        prob_c, sub_c = _accumulate_component(
            mat, index, weight, label_sig, pair_idx, n_sig_modes
        )
        prob += prob_c
        subspace_mass += sub_c

    if prob <= NULL_PATTERN_TOL:
        return 0.0, None, 0.0

    # local Z correction, then renormalize
    phases = _correction_phases(rule, pattern, basis)
    mat = phases[:, None] * mat * phases[None, :].conj()
    mat /= prob
    mat = 0.5 * (mat + mat.conj().T)
    rho = DensityOperator(basis, mat, normalize=True)
    return float(prob), rho, float(subspace_mass)


def _accumulate_component(mat, index, weight, label_sig, pair_idx, n_sig_modes):
    """Add one pure-per-label component to the heralded matrix.

    Diagonal entries (probabilities of total signal occupations) are exact.
    Off-diagonal coherence is kept between dual-rail register components in
    which each qubit pair's photon carries the same internal label, which is
    exactly the coherence visible to label-blind pair-local measurements;
    all other off-diagonals dephase.
    """
    labels = sorted(label_sig)
    amp_maps = [label_sig[b] for b in labels]

    # --- exact diagonal: product distribution over labels -------------------
    dist: dict[tuple, float] = {(0,) * n_sig_modes: 1.0}
    for amps in amp_maps:
        new: dict[tuple, float] = {}
        for occ, a in amps.items():
            p = abs(a) ** 2
            if p == 0.0:
                continue
            for acc, q in dist.items():
                key = tuple(x + y for x, y in zip(acc, occ))
                new[key] = new.get(key, 0.0) + q * p
        dist = new
    prob = 0.0
    for occ, p in dist.items():
        i = index[occ]
        mat[i, i] += weight * p
        prob += weight * p

    # --- register-subspace coherences ---------------------------------------
    # Assignment: which label supplies the photon of each qubit pair. Valid
    # when per-label photon counts match. For each assignment, each label's
    # amplitudes restricted to (one photon in each of its pairs, rails free)
    # give a pure register vector; sum their tensor product coherently.
    n_pairs = len(pair_idx)
    counts = {b: sum(next(iter(label_sig[b]))) for b in labels}
    if sum(counts.values()) != n_pairs:
        return prob, 0.0

    pair_modes = [m for ij in pair_idx for m in ij]
    off_pair = [m for m in range(n_sig_modes) if m not in pair_modes]

    subspace_mass = 0.0
    dim_reg = 2**n_pairs
    for assignment in _assignments(labels, counts, n_pairs):
        vec = np.zeros(dim_reg, dtype=np.complex128)
        occs_by_bits = {}
        ok = True
        for bits in range(dim_reg):
            amp = 1.0 + 0j
            occ_total = [0] * n_sig_modes
            for b in labels:
                occ = [0] * n_sig_modes
                for k in range(n_pairs):
                    if assignment[k] != b:
                        continue
                    i, j = pair_idx[k]
                    occ[j if (bits >> k) & 1 else i] = 1
                a = label_sig[b].get(tuple(occ), 0j)
                amp *= a
                for m, c in enumerate(occ):
                    occ_total[m] += c
            if any(occ_total[m] for m in off_pair):
                ok = False
                break
            vec[bits] = amp
            occs_by_bits[bits] = tuple(occ_total)
        if not ok:
            continue
        norm2 = float(np.vdot(vec, vec).real)
        if norm2 == 0.0:
            continue
        subspace_mass += weight * norm2
        for b1 in range(dim_reg):
            if vec[b1] == 0:
                continue
            for b2 in range(dim_reg):
                if b2 == b1 or vec[b2] == 0:
                    continue
                mat[index[occs_by_bits[b1]], index[occs_by_bits[b2]]] += (
                    weight * vec[b1] * vec[b2].conjugate()
                )
    return prob, subspace_mass


def _assignments(labels, counts, n_pairs):
    """All maps pair -> label with the prescribed per-label multiplicities."""
    pool = [b for b in labels for _ in range(counts[b])]
    seen = set()
    for perm in itertools.permutations(pool, n_pairs):
        if perm in seen:
            continue
        seen.add(perm)
        yield perm


# --- loss ------------------------------------------------------------------


def apply_loss(state, transmissions) -> DistinguishableEvolution:
    """Beam-splitter loss: each mode keeps a photon with its transmission.

    Returns a sector decomposition in which each input component splits into
    per-mode binomial survival branches. Branches with different loss records
    are orthogonal on the (traced-out) loss modes, so they are separate
    sectors; within a branch, amplitudes between identical loss records stay
    coherent.
    """
    n_modes, n_photons, components = _as_components_any(state)
    trans = [float(t) for t in transmissions]
    if len(trans) != n_modes:
        raise ValueError("need one transmission per mode")
    if any(not 0.0 <= t <= 1.0 for t in trans):
        raise ValueError("transmissions must lie in [0, 1]")

    from .evolution import Sector  # local import to avoid cycle at module load

    sectors = []
    for weight, label_states in components:
        # Expand each label state over loss records; a loss record is the
        # per-label tuple of photons lost per mode.
        expanded: list[tuple[float, dict[int, dict[tuple, complex]]]] = [
            (weight, {})
        ]
        for b, st in sorted(label_states.items()):
            branched: dict[tuple, dict[tuple, complex]] = {}
            for occ_vec, amp in zip(st.basis, st.amplitudes):
                if amp == 0:
                    continue
                for lost in _loss_records(occ_vec.counts):
                    kept = tuple(n - l for n, l in zip(occ_vec.counts, lost))
                    coeff = amp
                    for n, l, t in zip(occ_vec.counts, lost, trans):
                        coeff *= math.sqrt(
                            math.comb(n, l) * (t**(n - l)) * ((1.0 - t) ** l)
                        )
                    if coeff == 0:
                        continue
                    branched.setdefault(lost, {})
                    branched[lost][kept] = branched[lost].get(kept, 0j) + coeff
            expanded = [
                (w, {**acc, (b, rec): amps})
                for w, acc in expanded
                for rec, amps in sorted(branched.items())
            ]
        for w, acc in expanded:
            label_states_out = {}
            total_w = w
            ok = True
            for key, amps in acc.items():
                norm2 = sum(abs(a) ** 2 for a in amps.values())
                if norm2 == 0.0:
                    ok = False
                    break
                total_w *= norm2
                occs = sorted(amps, reverse=True)
                n_kept = sum(occs[0])
                basis = enumerate_basis(n_kept, n_modes)
                idx = {bv.counts: i for i, bv in enumerate(basis)}
                vec = np.zeros(len(basis), dtype=np.complex128)
                for occ, a in amps.items():
                    vec[idx[occ]] = a / math.sqrt(norm2)
                label_states_out[len(label_states_out)] = PureState(basis, vec)
            if ok and total_w > 0.0:
                sectors.append(Sector(total_w, label_states_out))
    result = DistinguishableEvolution(n_modes, n_photons, sectors)
    total = sum(s.weight for s in sectors)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"loss sectors sum to {total}, expected 1")
    return result


def _loss_records(counts):
    """All per-mode loss tuples 0 <= lost_m <= n_m."""
    ranges = [range(c + 1) for c in counts]
    return itertools.product(*ranges)


def _as_components_any(state):
    if isinstance(state, PureState):
        return state.n_modes, state.n_photons, [(1.0, {0: state})]
    if isinstance(state, DistinguishableEvolution):
        return (
            state.n_modes,
            state.n_photons,
            [(s.weight, dict(s.label_states)) for s in state.sectors],
        )
    raise TypeError("expected a PureState or DistinguishableEvolution")


# --- heralding efficiency ---------------------------------------------------


def heralding_efficiency(
    src: SourceModel,
    circuit,
    rule: HeraldRule,
    det: DetectorModel = DetectorModel(),
    loss=None,
    fidelity_threshold: float | None = None,
):
    """P(signal modes hold a register state | an accepted readout fired).

    ``loss`` is a per-mode transmission vector applied after the circuit
    (None for lossless). Register membership means exactly one photon per
    dual-rail pair and no photon elsewhere on the signal modes; with
    ``fidelity_threshold`` set, the heralded state must additionally reach
    that fidelity to the GHZ target. Returns the sentinel string
    "no herald events" when no accepted readout has support.
    """
    from .circuits import CircuitSpec, compile_circuit

    u = compile_circuit(circuit) if isinstance(circuit, CircuitSpec) else np.asarray(circuit)
    evolved = evolve_distinguishable(u, src)
    state = evolved
    if loss is not None:
        state = apply_loss(evolved, loss)
    outcome = herald(state, rule, det)
    if outcome.total_probability <= NULL_PATTERN_TOL or outcome.heralding_efficiency is None:
        return "no herald events"
    eff = outcome.heralding_efficiency
    if fidelity_threshold is not None:
        target = ghz_state(rule.register, n_modes=len(rule.register.modes))
        ok = 0.0
        for pattern, (p, rho) in outcome.per_pattern.items():
            if rho is None:
                continue
            f = _register_fidelity(rho, rule.register, target)
            if f is not None and f >= fidelity_threshold:
                ok += p * _register_weight(rho, rule.register)
        eff = ok / outcome.total_probability
    return float(eff)


def _register_weight(rho: DensityOperator, reg: DualRailRegister) -> float:
    w = 0.0
    for i, occ_vec in enumerate(rho.basis):
        if dual_rail_decode(occ_vec, reg) is not None and not _off_register(occ_vec, reg):
            w += float(rho.matrix[i, i].real)
    return w


def _off_register(occ_vec, reg) -> bool:
    reg_modes = set(reg.modes)
    return any(
        occ_vec[m] for m in range(occ_vec.n_modes) if (m + 1) not in reg_modes
    )


def _register_fidelity(rho, reg, target) -> float | None:
    """Fidelity of the register-renormalized block to the target, or None."""
    idx = []
    t_amp = []
    for b, a in zip(target.basis, target.amplitudes):
        i = rho.index.get(b)
        if i is None:
            if a != 0:
                return None
            continue
        idx.append(i)
        t_amp.append(a)
    w = _register_weight(rho, reg)
    if w <= 0.0:
        return None
    vec = np.array(t_amp, dtype=np.complex128)
    val = complex(vec.conj() @ rho.matrix[np.ix_(idx, idx)] @ vec) / w
    return float(min(max(val.real, 0.0), 1.0))
