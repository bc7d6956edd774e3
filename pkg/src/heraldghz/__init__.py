"""Desk-scale simulator for heralded dual-rail GHZ generation in linear optics."""

__version__ = "0.1.0"

from .circuits import (
    CircuitSpec,
    Element,
    append_measurement,
    beam_splitter,
    compile_circuit,
    ghz_preset,
    mzi,
    phase_shifter,
    validate_unitary,
)
from .errors import (
    BasisMismatchError,
    CapacityError,
    ConfigError,
    DegenerateInputError,
    HeraldghzError,
)
from .evolution import (
    PhotonInput,
    SourceModel,
    evolve_distinguishable,
    evolve_pure,
    permanent,
    transition_amplitude,
)
from .fock import (
    DensityOperator,
    DualRailRegister,
    OccupationVector,
    PureState,
    dual_rail_decode,
    dual_rail_encode,
    enumerate_basis,
    fidelity,
    ghz_state,
    occ,
)
from .heralding import (
    DetectorModel,
    HeraldOutcome,
    HeraldRule,
    apply_loss,
    herald,
    heralding_efficiency,
)
from .analysis import (
    AnalysisResult,
    CountRecord,
    MeasurementSetting,
    characterize_circuit,
    coherence,
    estimate_from_counts,
    expectation_M,
    fidelity_pc,
    outcome_probabilities,
    population,
    simulate_counts,
)
from .search import FreeParameter, SearchProblem, SearchResult, objective, optimize
from .preset import ghz_herald_rule, load_preset_bundle
