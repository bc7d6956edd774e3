"""Optical circuits as ordered element lists, and their compiled mode unitaries.

Conventions (fixed package-wide):

* beam splitter of transmission T on modes (i, j):
  [[sqrt(T), i*sqrt(1-T)], [i*sqrt(1-T), sqrt(T)]]  (symmetric, i on reflection)
* phase shifter of phase phi on mode i: multiplies that mode by exp(i*phi)
* MZI on (i, j) with internal theta and external phi applies, in order:
  phase(phi) on j, BS(1/2), phase(theta) on j, BS(1/2).

Elements listed earlier in a CircuitSpec act first, so the compiled matrix is
the left-multiplied product of the element unitaries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

UNITARITY_TOL = 1e-10

BEAM_SPLITTER = "beam_splitter"
PHASE_SHIFTER = "phase_shifter"
MZI = "mzi"

_KINDS = (BEAM_SPLITTER, PHASE_SHIFTER, MZI)


def _canon_phase(phi: float) -> float:
    return float(phi) % (2.0 * math.pi)


@dataclass(frozen=True)
class Element:
    """One optical element; ``modes`` are 1-based.

    ``param`` is the transmission for a beam splitter, the phase for a phase
    shifter, and the (theta, phi) pair for an MZI. Phases are reduced mod 2*pi
    so that equal elements compare equal.
    """

    kind: str
    modes: tuple[int, ...]
    param: float | tuple[float, float]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        modes = tuple(int(m) for m in self.modes)
        object.__setattr__(self, "modes", modes)
        if self.kind == PHASE_SHIFTER:
            if len(modes) != 1:
                raise ValueError("phase shifter acts on one mode")
            object.__setattr__(self, "param", _canon_phase(self.param))
        else:
            if len(modes) != 2 or modes[0] == modes[1]:
                raise ValueError("two-mode element needs two distinct modes")
            if self.kind == BEAM_SPLITTER:
                t = float(self.param)
                if not 0.0 <= t <= 1.0:
                    raise ValueError(f"transmission {t} outside [0, 1]")
                object.__setattr__(self, "param", t)
            else:
                theta, phi = self.param
                object.__setattr__(
                    self, "param", (_canon_phase(theta), _canon_phase(phi))
                )


def beam_splitter(transmission: float, i: int, j: int) -> Element:
    return Element(BEAM_SPLITTER, (i, j), transmission)


def phase_shifter(phase: float, i: int) -> Element:
    return Element(PHASE_SHIFTER, (i,), phase)


def mzi(theta: float, phi: float, i: int, j: int) -> Element:
    return Element(MZI, (i, j), (theta, phi))


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered element list on a fixed number of modes."""

    n_modes: int
    elements: tuple[Element, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            if any(not 1 <= m <= self.n_modes for m in el.modes):
                raise ValueError(f"element {el} has modes outside [1, {self.n_modes}]")

    def extended(self, more: list[Element], label: str | None = None) -> "CircuitSpec":
        return CircuitSpec(
            self.n_modes, self.elements + tuple(more), label if label is not None else self.label
        )

    # --- serialization (bit-exact round trip) ---

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "label": self.label,
            "elements": [
                {
                    "kind": el.kind,
                    "modes": list(el.modes),
                    "param": list(el.param) if isinstance(el.param, tuple) else el.param,
                }
                for el in self.elements
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CircuitSpec":
        els = [
            Element(
                e["kind"],
                tuple(e["modes"]),
                tuple(e["param"]) if isinstance(e["param"], list) else e["param"],
            )
            for e in d["elements"]
        ]
        return cls(int(d["n_modes"]), tuple(els), d.get("label", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CircuitSpec":
        return cls.from_dict(json.loads(text))


def element_unitary(el: Element, n_modes: int) -> np.ndarray:
    u = np.eye(n_modes, dtype=np.complex128)
    if el.kind == BEAM_SPLITTER:
        i, j = (m - 1 for m in el.modes)
        t = math.sqrt(el.param)
        r = 1j * math.sqrt(1.0 - el.param)
        u[i, i] = u[j, j] = t
        u[i, j] = u[j, i] = r
    elif el.kind == PHASE_SHIFTER:
        u[el.modes[0] - 1, el.modes[0] - 1] = np.exp(1j * el.param)
    else:  # MZI: phase(phi) on j, BS(1/2), phase(theta) on j, BS(1/2)
        theta, phi = el.param
        i, j = el.modes
        for sub in (
            phase_shifter(phi, j),
            beam_splitter(0.5, i, j),
            phase_shifter(theta, j),
            beam_splitter(0.5, i, j),
        ):
            u = element_unitary(sub, n_modes) @ u
    return u


def compile_circuit(spec: CircuitSpec) -> np.ndarray:
    """Mode unitary of the circuit; elements listed first act first."""
    u = np.eye(spec.n_modes, dtype=np.complex128)
    for el in spec.elements:
        u = element_unitary(el, spec.n_modes) @ u
    return u


def unitarity_deviation(matrix: np.ndarray) -> float:
    """Max-entry deviation of U†U from the identity."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    gram = matrix.conj().T @ matrix
    return float(np.max(np.abs(gram - np.eye(matrix.shape[0]))))


def validate_unitary(matrix: np.ndarray, tol: float = UNITARITY_TOL) -> dict:
    """Unitarity report: {'deviation': float, 'passed': bool, 'tolerance': tol}."""
    dev = unitarity_deviation(matrix)
    return {"deviation": dev, "passed": dev < tol, "tolerance": tol}


def equatorial_mzi(theta: float, i: int, j: int) -> Element:
    """MZI measuring qubit basis (|0> ± e^{i*theta}|1>)/sqrt(2) on rails (i, j).

    With the package conventions, internal pi/2 gives a balanced analyzer and
    external phase pi - theta orients it; the "+" outcome exits rail i.
    """
    return mzi(math.pi / 2.0, math.pi - theta, i, j)


def append_measurement(
    spec: CircuitSpec,
    settings: list[tuple[float, float]],
    pairs: tuple[tuple[int, int], ...] = ((1, 2), (3, 4), (5, 6)),
) -> CircuitSpec:
    """Append one measurement MZI per dual-rail pair.

    Each setting is (theta, phi): theta is the equatorial angle of the
    measured basis (|0> ± e^{i*theta}|1>)/sqrt(2), phi an extra internal
    detuning (0 keeps the measurement on the equator). The "+" outcome is a
    photon exiting the first rail of the pair.
    """
    if len(settings) != len(pairs):
        raise ValueError(f"expected {len(pairs)} settings, got {len(settings)}")
    added = [
        mzi(math.pi / 2.0 + phi, math.pi - theta, a, b)
        for (theta, phi), (a, b) in zip(settings, pairs)
    ]
    return spec.extended(added, label=spec.label + "+measurement")


def ghz_preset() -> CircuitSpec:
    """The shipped 10-mode GHZ-generation circuit (loaded from package data)."""
    from .preset import ghz_preset as _load

    return _load()
