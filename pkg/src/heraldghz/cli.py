"""Configuration-driven command line: simulate | analyze | optimize | characterize.

One JSON config file describes the experiment; flags only override scalar
fields. Primary reports are byte-identical for identical (config, seed);
wall-clock metadata goes to a separate sidecar file. Exit codes: 0 success,
2 config error, 3 capacity exceeded, 4 degenerate input.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    COHERENCE_ANGLES,
    REFERENCE_COHERENCE,
    REFERENCE_FIDELITY,
    REFERENCE_POPULATION,
    MeasurementSetting,
    characterize_circuit,
    estimate_from_counts,
    fidelity_pc,
    outcome_probabilities,
    simulate_counts,
)
from .circuits import CircuitSpec, compile_circuit, validate_unitary
from .errors import CapacityError, ConfigError, DegenerateInputError
from .evolution import SourceModel, evolve_distinguishable, _solve_p2_from_g2
from .fock import DensityOperator, DualRailRegister
from .heralding import DetectorModel, HeraldRule, herald
from .search import SearchProblem, optimize, preset_problem

SCHEMA_VERSION = 1
DEFAULT_TOP_K = 200
DEFAULT_INPUT_MODES = (1, 3, 4, 6, 8, 9)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_DEGENERATE = 4


# --- config loading -----------------------------------------------------------


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"config:{path}: {message}")


def load_config(path: Path, seed_override: int | None = None) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise _fail(str(path), f"cannot read config file ({exc})") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"{path}:{exc.lineno}", f"invalid JSON: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise _fail(str(path), "top level must be an object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise _fail("schema_version", f"must be {SCHEMA_VERSION}")
    if seed_override is not None:
        cfg["seed"] = int(seed_override)
    if "seed" not in cfg or not isinstance(cfg["seed"], int):
        raise _fail("seed", "an integer seed is mandatory")
    cfg["_base_dir"] = str(path.parent)
    return cfg


def config_hash(cfg: dict) -> str:
    clean = {k: v for k, v in cfg.items() if not k.startswith("_")}
    blob = json.dumps(clean, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def build_circuit(cfg: dict) -> CircuitSpec:
    section = cfg.get("circuit", {"preset": "ghz"})
    if not isinstance(section, dict):
        raise _fail("circuit", "must be an object")
    if section.get("preset") == "ghz":
        from .preset import ghz_preset

        return ghz_preset()
    if "file" in section:
        p = Path(section["file"])
        if not p.is_absolute():
            p = Path(cfg["_base_dir"]) / p
        if not p.exists():
            raise _fail("circuit.file", f"file not found: {p}")
        try:
            return CircuitSpec.from_json(p.read_text())
        except (ValueError, KeyError) as exc:
            raise _fail("circuit.file", f"invalid circuit file: {exc}") from exc
    if "inline" in section:
        try:
            return CircuitSpec.from_dict(section["inline"])
        except (ValueError, KeyError, TypeError) as exc:
            raise _fail("circuit.inline", f"invalid circuit: {exc}") from exc
    raise _fail("circuit", "need one of: preset, file, inline")


def build_source(cfg: dict) -> SourceModel:
    section = cfg.get("sources", {})
    if not isinstance(section, dict):
        raise _fail("sources", "must be an object")
    modes = tuple(section.get("modes", DEFAULT_INPUT_MODES))
    try:
        if "visibilities" in section:
            return SourceModel.from_reference_visibilities(
                modes,
                section["visibilities"],
                g2=float(section.get("g2", 0.0)),
                g2_corrected=bool(section.get("g2_corrected", False)),
            )
        if "uniform_visibility" in section:
            src = SourceModel.uniform_visibility(
                modes, float(section["uniform_visibility"])
            )
            if section.get("g2", 0.0):
                src = SourceModel(src.photons, p2=_solve_p2_from_g2(float(section["g2"])))
            return src
        src = SourceModel.ideal(modes)
        if section.get("g2", 0.0):
            src = SourceModel(src.photons, p2=_solve_p2_from_g2(float(section["g2"])))
        return src
    except ValueError as exc:
        raise _fail("sources", str(exc)) from exc


def build_herald_rule(cfg: dict) -> HeraldRule:
    section = cfg.get("herald")
    if section is None:
        from .preset import ghz_herald_rule

        return ghz_herald_rule()
    if not isinstance(section, dict):
        raise _fail("herald", "must be an object")
    try:
        return HeraldRule.from_dict(section)
    except (ValueError, KeyError, TypeError) as exc:
        raise _fail("herald", str(exc)) from exc


def build_detector(cfg: dict) -> DetectorModel:
    section = cfg.get("detector", {})
    if not isinstance(section, dict):
        raise _fail("detector", "must be an object")
    try:
        return DetectorModel(
            kind=section.get("kind", "ideal_pnr"),
            efficiency=float(section.get("efficiency", 1.0)),
            max_resolvable=int(section.get("max_resolvable", 2)),
            dark_count=float(section.get("dark_count", 0.0)),
        )
    except ValueError as exc:
        raise _fail("detector", str(exc)) from exc


# --- report helpers -------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class Report:
    def __init__(self, command: str, cfg: dict):
        self.lines = [
            f"# heraldghz {command} report",
            f"artifact_version: {__version__}",
            f"schema_version: {SCHEMA_VERSION}",
            f"config_hash: {config_hash(cfg)}",
            f"seed: {cfg['seed']}",
            "",
        ]

    def add(self, *lines: str):
        self.lines.extend(lines)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def write_outputs(out_dir: Path, command: str, report: Report) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{command}_report.txt"
    report_path.write_text(report.text())
    sidecar = out_dir / f"{command}_meta.json"
    sidecar.write_text(
        json.dumps(
            {
                "written_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
                "report": report_path.name,
            },
            indent=2,
        )
        + "\n"
    )
    return report_path


# --- commands -------------------------------------------------------------------


def _heralded_qubit_state(cfg: dict):
    """Shared pipeline: evolve sources, herald, mix patterns, g2 noise.

    Returns (8x8 qubit density matrix, herald outcome, subspace weight,
    contamination fraction).
    """
    from .analysis import project_dual_rail

    circuit = build_circuit(cfg)
    source = build_source(cfg)
    rule = build_herald_rule(cfg)
    det = build_detector(cfg)
    u = compile_circuit(circuit)
    evolved = evolve_distinguishable(u, source)
    outcome = herald(evolved, rule, det)
    if outcome.total_probability <= 0.0:
        raise DegenerateInputError("no herald pattern has support")
    qmat = np.zeros((8, 8), dtype=np.complex128)
    weight = 0.0
    for pattern, (p, rho) in outcome.per_pattern.items():
        if rho is None:
            continue
        q, w = project_dual_rail(rho, rule.register)
        qmat += (p / outcome.total_probability) * w * q
        weight += (p / outcome.total_probability) * w
    if weight <= 0.0:
        raise DegenerateInputError("heralded state has zero dual-rail weight")
    qmat /= weight
    # multiphoton contamination: accepted events carrying an extra
    # distinguishable photon are modeled as white noise on the subspace
    lam = 1.0 - (1.0 - source.p2) ** len(source.photons)
    if lam > 0.0:
        qmat = (1.0 - lam) * qmat + lam * np.eye(8) / 8.0
    return qmat, outcome, weight, lam


def cmd_simulate(cfg: dict, out_dir: Path) -> Path:
    circuit = build_circuit(cfg)
    source = build_source(cfg)
    rule = build_herald_rule(cfg)
    det = build_detector(cfg)
    top_k = int(cfg.get("output", {}).get("top_k", DEFAULT_TOP_K))
    u = compile_circuit(circuit)
    unit = validate_unitary(u)
    evolved = evolve_distinguishable(u, source)
    dist = evolved.physical_distribution()
    total_mass = sum(dist.values())
    outcome = herald(evolved, rule, det)

    report = Report("simulate", cfg)
    report.add(
        f"circuit: {circuit.label or 'unlabeled'} ({circuit.n_modes} modes, "
        f"{len(circuit.elements)} elements)",
        f"unitarity_deviation: {_fmt(unit['deviation'])}",
        f"normalization_residual: {_fmt(abs(total_mass - 1.0))}",
        "",
        "## herald probabilities",
    )
    for pattern, (p, _) in sorted(outcome.per_pattern.items(), reverse=True):
        label = ",".join(map(str, pattern))
        report.add(f"pattern ({label}): {_fmt(p)}  (x108 = {_fmt(108 * p)})")
    report.add(
        f"total: {_fmt(outcome.total_probability)}  "
        f"(x54 = {_fmt(54 * outcome.total_probability)})",
        "",
        f"## output distribution (top {top_k})",
    )
    items = sorted(dist.items(), key=lambda kv: (-kv[1], kv[0].counts))
    shown = items[:top_k]
    for occ_vec, p in shown:
        report.add(f"{occ_vec}: {_fmt(p)}")
    tail = total_mass - sum(p for _, p in shown)
    report.add(f"tail_mass ({max(0, len(items) - top_k)} entries): {_fmt(max(tail, 0.0))}")
    return write_outputs(out_dir, "simulate", report)


def cmd_analyze(cfg: dict, out_dir: Path) -> Path:
    section = cfg.get("measurement", {})
    sampled = bool(section.get("sampled", False))
    expected_total = float(section.get("expected_total", 1e5))

    report = Report("analyze", cfg)

    sweep = cfg.get("sweep", {}).get("uniform_visibility")
    if sweep:
        report.add("## uniform-visibility sweep", "visibility,F")
        for v in sweep:
            sub = dict(cfg)
            sub["sources"] = dict(cfg.get("sources", {}))
            sub["sources"].pop("visibilities", None)
            sub["sources"]["uniform_visibility"] = float(v)
            qmat, _, _, _ = _heralded_qubit_state(sub)
            res = fidelity_pc(qmat)
            report.add(f"{_fmt(float(v))},{_fmt(res.fidelity)}")
        report.add("")

    qmat, outcome, weight, lam = _heralded_qubit_state(cfg)
    exact = fidelity_pc(qmat)
    report.add(
        f"subspace_weight: {_fmt(weight)}",
        f"herald_total_probability: {_fmt(outcome.total_probability)}",
        f"contamination_fraction: {_fmt(lam)}",
        "",
        "## exact model values",
        f"P: {_fmt(exact.population)}",
        f"C: {_fmt(exact.coherence)}",
        f"F: {_fmt(exact.fidelity)}",
        f"entangled (F > 0.5): {exact.entangled}",
    )

    if sampled:
        seed = int(cfg["seed"])
        records = []
        s = MeasurementSetting("computational")
        records.append(
            simulate_counts(outcome_probabilities(qmat, s), expected_total, seed, s)
        )
        for k, theta in enumerate(COHERENCE_ANGLES):
            s = MeasurementSetting("equatorial", theta)
            records.append(
                simulate_counts(
                    outcome_probabilities(qmat, s), expected_total, seed + k + 1, s
                )
            )
        est = estimate_from_counts(records)
        report.add(
            "",
            f"## sampled estimates (expected_total = {_fmt(expected_total)} per setting)",
            f"P: {_fmt(est.population)} +/- {_fmt(est.population_sigma)}",
            f"C: {_fmt(est.coherence)} +/- {_fmt(est.coherence_sigma)}",
            f"F: {_fmt(est.fidelity)} +/- {_fmt(est.fidelity_sigma)}",
            f"entangled (F > 0.5): {est.entangled}",
            f"z_score_vs_0.5: "
            + (_fmt(est.z_score) if est.z_score is not None else "n/a"),
        )
        for theta, (e, sig) in sorted(est.expectations.items()):
            report.add(f"<M_{_fmt(theta)}>: {_fmt(e)} +/- {_fmt(sig)}")

    report.add(
        "",
        "## reference values (experimental, comparison only — not targets)",
        f"P_ref: {REFERENCE_POPULATION[0]} +/- {REFERENCE_POPULATION[1]}",
        f"C_ref: {REFERENCE_COHERENCE[0]} +/- {REFERENCE_COHERENCE[1]}",
        f"F_ref: {REFERENCE_FIDELITY[0]} +/- {REFERENCE_FIDELITY[1]}",
    )
    return write_outputs(out_dir, "analyze", report)


def cmd_optimize(cfg: dict, out_dir: Path) -> Path:
    section = cfg.get("search", {})
    if not isinstance(section, dict):
        raise _fail("search", "must be an object")
    circuit = build_circuit(cfg)
    rule = build_herald_rule(cfg)
    problem = preset_problem(circuit, rule)
    if "weights" in section:
        w_f, w_p = section["weights"]
        problem = SearchProblem(
            problem.topology, problem.free, float(w_f), float(w_p), rule
        )
    budget = int(section.get("budget", 5000))
    restarts = int(section.get("restarts", 1))
    perturbation = float(section.get("perturbation", 0.0))
    seed = int(cfg["seed"])

    report = Report("optimize", cfg)
    if budget == 0:
        from .search import _FastHeraldScorer

        u = compile_circuit(circuit)
        scores = _FastHeraldScorer(problem).score(u)
        report.add(
            "status: no search performed (zero budget)",
            f"heralded_fidelity: "
            + _fmt(
                sum(p * f for p, f in scores.values())
                / max(sum(p for p, _ in scores.values()), 1e-300)
            ),
        )
        for pattern, (p, _) in sorted(scores.items(), reverse=True):
            report.add(f"pattern ({','.join(map(str, pattern))}): p = {_fmt(p)}")
        return write_outputs(out_dir, "optimize", report)

    result = optimize(
        problem, budget=budget, seed=seed, n_restarts=restarts, perturbation=perturbation
    )
    recovered = problem.circuit_with(result.best_params)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "recovered_circuit.json").write_text(recovered.to_json() + "\n")

    report.add(
        f"status: {result.message}",
        f"evaluations: {result.evaluations}",
        f"restarts: {result.restarts}",
        f"best_objective: {_fmt(result.best_objective)}",
        f"heralded_fidelity: {_fmt(result.heralded_fidelity)}",
    )
    for pattern, p in sorted(result.per_pattern_probability.items(), reverse=True):
        report.add(
            f"pattern ({','.join(map(str, pattern))}): p = {_fmt(p)} "
            f"(x108 = {_fmt(108 * p)})"
        )
    report.add(
        "best_params: " + ",".join(_fmt(v) for v in result.best_params),
        "recovered_circuit: recovered_circuit.json",
        "",
        "## trace (evaluation,best_objective)",
        *result.trace_rows(),
    )
    return write_outputs(out_dir, "optimize", report)


def cmd_characterize(cfg: dict, out_dir: Path) -> Path:
    section = cfg.get("characterize", {})
    circuit = build_circuit(cfg)
    u = compile_circuit(circuit)
    inputs = section.get("inputs", list(DEFAULT_INPUT_MODES))
    outputs = section.get("outputs", list(range(1, min(circuit.n_modes, 9) + 1)))
    amplitude, phase = characterize_circuit(u, inputs, outputs)

    report = Report("characterize", cfg)
    report.add(
        f"inputs: {','.join(map(str, inputs))}",
        f"outputs: {','.join(map(str, outputs))}",
        "",
        "## amplitude (row = input, normalized over observed outputs)",
    )
    for i, m in enumerate(inputs):
        report.add(f"in {m}: " + " ".join(_fmt(x) for x in amplitude[i]))
    report.add("", "## phase (radians, first row/column gauge-fixed to 0)")
    for i, m in enumerate(inputs):
        report.add(f"in {m}: " + " ".join(_fmt(x) for x in phase[i]))
    return write_outputs(out_dir, "characterize", report)


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "characterize": cmd_characterize,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heraldghz",
        description="Heralded dual-rail GHZ generation: simulation and analysis.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--out", type=Path, default=Path("out"))
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.seed)
        report_path = COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"error: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DegenerateInputError as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    print(report_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
