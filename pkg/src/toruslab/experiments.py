"""Named experiments, config validation, and reproducible result persistence.

An experiment is a pure function of (parameters, seed); the harness
validates the configuration against a JSON schema (unknown fields are
rejected), runs the experiment, writes CSV tables, JSON reports, and SVG
charts with deterministic bytes, and finishes with an atomically written
manifest.  Reruns with the same config and seed reproduce every CSV and SVG
byte for byte; the worker count only fans out independent work items and
never changes results.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .bounds import (
    BoundReport,
    BoxUnion,
    corollary512_sweep,
    tensor_verify,
    thm59_verify,
    wiener_gate,
)
from .errors import ConfigError, InvariantError
from .flat import (
    AnnealConfig,
    c0_anneal,
    c0_exhaustive,
    flatness_ratio,
    rudin_shapiro,
    rudin_shapiro_vector,
)
from .probes import (
    WitnessFunction,
    condition_iv_profile,
    exhaustion_index,
    brp_profile,
    sot_trajectory,
    wot_summability,
)
from .rearrange import Permutation, random_permutation
from .summation import SignSequence, fejer
from .svgplot import plot_csv
from .trig import TrigPoly

__all__ = ["ExperimentConfig", "RunManifest", "run", "EXPERIMENT_NAMES", "load_config"]

RS_CEILING_SLACK = 1e-6

_WITNESS_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["power_singularity", "trigpoly", "step_sum"]},
        "alpha": {"type": "number"},
        "degree": {"type": "integer", "minimum": 0},
        "intervals": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_SCHEMAS: dict[str, dict] = {
    "flat-rs": {
        "k_max": {"type": "integer", "minimum": 0, "maximum": 14, "default": 10},
        "grid_multiplier": {"type": "integer", "minimum": 4, "default": 4096},
    },
    "flat-exhaustive": {
        "N": {"type": "integer", "minimum": 0, "maximum": 24, "default": 10},
        "grid_multiplier": {"type": "integer", "minimum": 4, "default": 32},
    },
    "flat-anneal": {
        "N": {"type": "integer", "minimum": 0, "default": 48},
        "steps": {"type": "integer", "minimum": 1, "default": 200000},
        "t0": {"type": "number", "exclusiveMinimum": 0, "default": 0.1},
        "cooling": {"type": "number", "exclusiveMinimum": 0, "maximum": 1, "default": 0.9995},
        "restarts": {"type": "integer", "minimum": 1, "default": 4},
        "grid_multiplier": {"type": "integer", "minimum": 4, "default": 32},
        "warm_start_rs": {"type": "boolean", "default": False},
    },
    "bound-thm59": {
        "intervals": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "default": [[-0.05, 0.05]],
        },
        "delta": {"type": "number", "default": 1.0 / 3.0},
        "gamma0": {"type": "number", "default": 1e-6},
        "C0": {"type": "number", "default": math.sqrt(2.0)},
        "rs_k": {"type": "integer", "minimum": 0, "maximum": 20, "default": 8},
    },
    "bound-tensor": {
        "d": {"type": "integer", "minimum": 1, "maximum": 3, "default": 2},
        "half_width": {"type": "number", "exclusiveMinimum": 0, "default": 0.05},
        "delta": {"type": "number", "default": 1.0 / 3.0},
        "gamma0": {"type": "number", "default": 1e-6},
        "C0": {"type": "number", "default": math.sqrt(2.0)},
        "rs_k": {"type": "integer", "minimum": 0, "maximum": 20, "default": 8},
    },
    "bound-cor512": {
        "families": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
            "default": [
                [[-0.05, 0.05]],
                [[-0.01, 0.01]],
                [[-0.004, 0.004], [0.2, 0.3]],
            ],
        },
        "delta": {"type": "number", "default": 1.0 / 3.0},
        "gamma0": {"type": "number", "default": 1e-6},
        "C0": {"type": "number", "default": math.sqrt(2.0)},
    },
    "wiener-gate": {
        "count": {"type": "integer", "minimum": 1, "default": 25},
        "max_degree": {"type": "integer", "minimum": 0, "default": 64},
    },
    "probe-sot": {
        "degree": {"type": "integer", "minimum": 0, "default": 12},
        "N_max": {"type": "integer", "minimum": 0, "default": 24},
        "M": {"type": "integer", "minimum": 4, "default": 512},
        "witness": {**_WITNESS_SCHEMA, "default": {"kind": "power_singularity", "alpha": 0.2}},
    },
    "probe-iv": {
        "degree": {"type": "integer", "minimum": 0, "default": 12},
        "N_max": {"type": "integer", "minimum": 0, "default": 24},
        "M": {"type": "integer", "minimum": 4, "default": 512},
        "nonneg": {"type": "boolean", "default": False},
    },
    "probe-brp": {
        "degree": {"type": "integer", "minimum": 0, "default": 10},
        "M": {"type": "integer", "minimum": 4, "default": 512},
        "witness": {**_WITNESS_SCHEMA, "default": {"kind": "power_singularity", "alpha": 0.2}},
    },
    "probe-wot": {
        "rs_k": {"type": "integer", "minimum": 0, "maximum": 14, "default": 8},
        "alpha": {"type": "number", "default": 0.2},
        "N_max": {"type": "integer", "minimum": 1, "default": 512},
        "M": {"type": "integer", "minimum": 8, "default": 2048},
    },
    "kernel-dump": {
        "kind": {"enum": ["dirichlet", "fejer", "vallee_poussin"], "default": "dirichlet"},
        "N": {"type": "integer", "minimum": 0, "default": 16},
        "M": {"type": "integer", "minimum": 4, "default": 256},
    },
}

EXPERIMENT_NAMES = tuple(sorted(_SCHEMAS))

_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": list(EXPERIMENT_NAMES)},
        "parameters": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "workers": {"type": "integer", "minimum": 1},
        "output_dir": {"type": "string"},
    },
    "required": ["experiment"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: dict
    seed: int = 0
    workers: int = 1
    output_dir: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(data, _CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid config: {exc.message}") from exc
        experiment = data["experiment"]
        spec = _SCHEMAS[experiment]
        params_schema = {
            "type": "object",
            "properties": {k: {kk: vv for kk, vv in v.items() if kk != "default"} for k, v in spec.items()},
            "additionalProperties": False,
        }
        params = dict(data.get("parameters", {}))
        try:
            jsonschema.validate(params, params_schema)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid parameters for {experiment}: {exc.message}") from exc
        for key, field in spec.items():
            if key not in params and "default" in field:
                params[key] = field["default"]
        return cls(
            experiment=experiment,
            parameters=params,
            seed=int(data.get("seed", 0)),
            workers=int(data.get("workers", 1)),
            output_dir=data.get("output_dir"),
        )

    def canonical_json(self) -> str:
        return json.dumps(
            {
                "experiment": self.experiment,
                "parameters": self.parameters,
                "seed": self.seed,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(data)


@dataclass(frozen=True)
class RunManifest:
    config_hash: str
    artifact_version: str
    started_at: str
    finished_at: str
    outputs: tuple[str, ...]
    summary: dict

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config_hash": self.config_hash,
            "artifact_version": self.artifact_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": list(self.outputs),
            "summary": self.summary,
        }


# -- output helpers -------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> Path:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def _pmap(fn, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _child_seeds(seed: int, count: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _random_poly(rng, degree: int, dim: int = 1, nonneg: bool = False) -> TrigPoly:
    coeffs = {}
    for n in range(-degree, degree + 1):
        if nonneg:
            coeffs[n] = rng.uniform(0.1, 1.0)
        else:
            coeffs[n] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return TrigPoly(coeffs, dim=1)


def _witness_from_spec(spec: dict, M: int, rng) -> WitnessFunction:
    kind = spec["kind"]
    if kind == "power_singularity":
        return WitnessFunction.power_singularity(float(spec.get("alpha", 0.2)), M)
    if kind == "trigpoly":
        degree = int(spec.get("degree", 8))
        return WitnessFunction.trig_poly(_random_poly(rng, degree), M)
    if kind == "step_sum":
        intervals = spec.get("intervals", [[-0.05, 0.05], [0.1, 0.2]])
        levels = [BoxUnion.interval(lo, hi) for lo, hi in intervals]
        return WitnessFunction.step_sum(levels, M)
    raise ConfigError(f"unknown witness kind {kind!r}")


def _profile_outputs(outdir: Path, stem: str, poly: TrigPoly, M: int) -> list[Path]:
    samples = np.asarray(poly.to_grid(M).samples)
    rows = [
        (j / M, float(np.real(v)), float(np.imag(v)), float(np.abs(v)))
        for j, v in enumerate(samples)
    ]
    csv_path = _write_csv(outdir / f"{stem}_profile.csv", ["t", "re", "im", "abs"], rows)
    svg_path = plot_csv(csv_path, "t", "abs", outdir / f"{stem}_profile.svg")
    return [csv_path, svg_path]


def _flat_report_outputs(outdir: Path, stem: str, report) -> list[Path]:
    csv_path = _write_csv(
        outdir / f"{stem}.csv",
        ["N", "method", "seed", "ratio_lower", "ratio_upper", "signs"],
        [
            (
                report.N,
                report.method,
                -1 if report.seed is None else report.seed,
                report.ratio_lower,
                report.ratio_upper,
                report.signs_string,
            )
        ],
    )
    json_path = _write_json(outdir / f"{stem}.json", report.to_json_dict())
    poly = TrigPoly(
        {n: s for n, s in enumerate(report.signs.as_vector(report.N))}, dim=1
    )
    return [csv_path, json_path] + _profile_outputs(
        outdir, stem, poly, report.points_per_axis
    )


# -- experiment bodies ----------------------------------------------------------


def _run_flat_rs(params, seed, workers, outdir: Path):
    ceiling = math.sqrt(2.0) + RS_CEILING_SLACK

    def one(k: int):
        eps = rudin_shapiro_vector(k)
        N = eps.size - 1
        M = params["grid_multiplier"] * (N + 1)
        lo, up = flatness_ratio(eps, M)
        return (k, N, M, lo, up)

    rows = _pmap(one, range(params["k_max"] + 1), workers)
    csv_path = _write_csv(
        outdir / "flat_rs.csv", ["k", "N", "M", "ratio_lower", "ratio_upper"], rows
    )
    svg_path = plot_csv(csv_path, "k", "ratio_upper", outdir / "flat_rs.svg")
    worst = max(r[4] for r in rows)
    if worst > ceiling:
        raise InvariantError(f"certified ratio {worst} exceeds the sqrt(2) ceiling")
    summary = {"pass": True, "worst_upper": worst, "ceiling": ceiling}
    json_path = _write_json(outdir / "flat_rs.json", {"rows": rows, **summary})
    return [csv_path, json_path, svg_path], summary


def _run_flat_exhaustive(params, seed, workers, outdir: Path):
    N = params["N"]
    report = c0_exhaustive(N, M=params["grid_multiplier"] * (N + 1))
    outputs = _flat_report_outputs(outdir, "flat_exhaustive", report)
    summary = {"pass": True, "ratio_upper": report.ratio_upper}
    return outputs, summary


def _run_flat_anneal(params, seed, workers, outdir: Path):
    N = params["N"]
    schedule = AnnealConfig(
        steps=params["steps"],
        t0=params["t0"],
        cooling=params["cooling"],
        restarts=params["restarts"],
    )
    warm = rudin_shapiro(math.ceil(math.log2(N + 1))) if params["warm_start_rs"] else None
    report = c0_anneal(
        N, schedule, seed=seed, M=params["grid_multiplier"] * (N + 1), warm_start=warm
    )
    outputs = _flat_report_outputs(outdir, "flat_anneal", report)
    summary = {"pass": True, "ratio_upper": report.ratio_upper}
    return outputs, summary


def _bound_outputs(outdir: Path, stem: str, reports: list[BoundReport]):
    csv_path = _write_csv(
        outdir / f"{stem}.csv",
        ["d", "delta", "N", "C0", "computed", "bound", "margin", "pass"],
        [r.csv_row() for r in reports],
    )
    json_path = _write_json(
        outdir / f"{stem}.json", [r.to_json_dict() for r in reports]
    )
    svg_path = plot_csv(csv_path, "N", "margin", outdir / f"{stem}.svg", kind="scatter")
    return [csv_path, json_path, svg_path]


def _run_bound_thm59(params, seed, workers, outdir: Path):
    E = BoxUnion([(tuple([lo]), tuple([hi])) for lo, hi in params["intervals"]], dim=1)
    report = thm59_verify(
        E,
        delta=params["delta"],
        signs=rudin_shapiro(params["rs_k"]),
        gamma0=params["gamma0"],
        C0=params["C0"],
    )
    outputs = _bound_outputs(outdir, "bound_thm59", [report])
    scale = 1.0 / (params["C0"] * math.sqrt(report.N + 1.0))
    kernel = TrigPoly({n: scale for n in range(report.N + 1)}, dim=1)
    outputs += _profile_outputs(outdir, "bound_thm59_kernel", kernel, 64 * (report.N + 1))
    if not report.passed:
        raise InvariantError(f"margin {report.margin} fell below tolerance")
    return outputs, {"pass": True, "margin": report.margin, "N": report.N}


def _run_bound_tensor(params, seed, workers, outdir: Path):
    d = params["d"]
    E = BoxUnion.cube(params["half_width"], d)
    report = tensor_verify(
        d,
        E,
        delta=params["delta"],
        signs=rudin_shapiro(params["rs_k"]),
        gamma0=params["gamma0"],
        C0=params["C0"],
    )
    outputs = _bound_outputs(outdir, "bound_tensor", [report])
    if not report.passed:
        raise InvariantError(f"margin {report.margin} fell below tolerance")
    return outputs, {"pass": True, "margin": report.margin, "N": report.N, "d": d}


def _run_bound_cor512(params, seed, workers, outdir: Path):
    families = [
        BoxUnion([(tuple([lo]), tuple([hi])) for lo, hi in f], dim=1)
        for f in params["families"]
    ]

    def one(E: BoxUnion) -> BoundReport:
        return corollary512_sweep(
            [E], delta=params["delta"], gamma0=params["gamma0"], C0=params["C0"]
        )[0]

    reports = _pmap(one, families, workers)
    outputs = _bound_outputs(outdir, "bound_cor512", reports)
    if not all(r.passed for r in reports):
        raise InvariantError("a sweep member fell below the uniform constant")
    return outputs, {"pass": True, "count": len(reports)}


def _run_wiener_gate(params, seed, workers, outdir: Path):
    seeds = _child_seeds(seed, params["count"])

    def one(child_seed: int):
        rng = np.random.default_rng(child_seed)
        degree = int(rng.integers(0, params["max_degree"] + 1))
        f = _random_poly(rng, degree, nonneg=True)
        rep = wiener_gate(f)
        return (
            degree,
            rep.partial_sums_exact,
            rep.wiener_equals_value_at_zero,
            rep.sup_bound_excess,
            rep.monotone_excess,
            rep.passed,
        )

    rows = _pmap(one, seeds, workers)
    csv_path = _write_csv(
        outdir / "wiener_gate.csv",
        ["degree", "partial_sums_exact", "wiener_exact", "sup_excess", "monotone_excess", "pass"],
        rows,
    )
    svg_path = plot_csv(csv_path, "degree", "sup_excess", outdir / "wiener_gate.svg", kind="scatter")
    ok = all(r[5] for r in rows)
    json_path = _write_json(outdir / "wiener_gate.json", {"pass": ok, "count": len(rows)})
    if not ok:
        raise InvariantError("a nonnegative-coefficient polynomial failed the gate")
    return [csv_path, json_path, svg_path], {"pass": ok, "count": len(rows)}


def _trajectory_outputs(outdir: Path, stem: str, report):
    csv_path = _write_csv(
        outdir / f"{stem}.csv", ["N", "value"], list(zip(report.abscissa, report.values))
    )
    json_path = _write_json(outdir / f"{stem}.json", report.to_json_dict())
    svg_path = plot_csv(csv_path, "N", "value", outdir / f"{stem}.svg")
    return [csv_path, json_path, svg_path]


def _run_probe_sot(params, seed, workers, outdir: Path):
    rng = np.random.default_rng(seed)
    f = _random_poly(rng, params["degree"])
    sigma = random_permutation(range(-params["N_max"], params["N_max"] + 1), rng)
    witness = _witness_from_spec(params["witness"], params["M"], rng)
    report = sot_trajectory(f, witness, sigma, params["N_max"], params["M"])
    outputs = _trajectory_outputs(outdir, "probe_sot", report)
    summary = {"pass": True, "terminal": report.terminal, "verdict": report.verdict}
    return outputs, summary


def _run_probe_iv(params, seed, workers, outdir: Path):
    rng = np.random.default_rng(seed)
    f = _random_poly(rng, params["degree"], nonneg=params["nonneg"])
    sigma = random_permutation(range(-params["N_max"], params["N_max"] + 1), rng)
    uppers = condition_iv_profile(f, sigma, params["N_max"], params["M"])
    csv_path = _write_csv(
        outdir / "probe_iv.csv", ["N", "upper"], list(enumerate(uppers))
    )
    svg_path = plot_csv(csv_path, "N", "upper", outdir / "probe_iv.svg")
    summary = {"pass": True, "max_upper": max(uppers)}
    json_path = _write_json(outdir / "probe_iv.json", summary)
    return [csv_path, json_path, svg_path], summary


def _run_probe_brp(params, seed, workers, outdir: Path):
    rng = np.random.default_rng(seed)
    T = _random_poly(rng, params["degree"])
    sigma = random_permutation(range(-params["degree"], params["degree"] + 1), rng)
    witness = _witness_from_spec(params["witness"], params["M"], rng)
    n_star = exhaustion_index(T, sigma)
    sets = [
        frozenset((sigma.apply(n),) for n in range(-N, N + 1)) for N in range(n_star + 1)
    ]
    profile = brp_profile(T, witness, sets, params["M"])
    upper = T.sup_norm(params["M"]).upper
    ratio = max(profile) / upper
    csv_path = _write_csv(
        outdir / "probe_brp.csv", ["N", "value"], list(enumerate(profile))
    )
    svg_path = plot_csv(csv_path, "N", "value", outdir / "probe_brp.svg")
    summary = {"pass": True, "ratio": ratio, "sup_upper": upper}
    json_path = _write_json(outdir / "probe_brp.json", summary)
    return [csv_path, json_path, svg_path], summary


def _run_probe_wot(params, seed, workers, outdir: Path):
    eps = rudin_shapiro_vector(params["rs_k"])
    scale = 1.0 / (math.sqrt(2.0) * math.sqrt(float(eps.size)))
    f = TrigPoly({n: float(s) * scale for n, s in enumerate(eps)}, dim=1)
    witness = WitnessFunction.power_singularity(params["alpha"], params["M"])
    report = wot_summability(f, witness, witness, params["N_max"], params["M"])
    outputs = _trajectory_outputs(outdir, "probe_wot", report)
    summary = {"pass": True, "terminal": report.terminal, "verdict": report.verdict}
    return outputs, summary


def _run_kernel_dump(params, seed, workers, outdir: Path):
    from .summation import dirichlet_one_sided, vallee_poussin_mean

    N, M, kind = params["N"], params["M"], params["kind"]
    if kind == "dirichlet":
        poly = dirichlet_one_sided(N)
    elif kind == "fejer":
        poly = fejer(N)
    else:
        poly = fejer(2 * N + 1).scale(2.0) - fejer(N)
    if M < 2 * poly.degree + 1:
        M = 2 * poly.degree + 1
    outputs = _profile_outputs(outdir, f"kernel_{kind}", poly, M)
    outputs.append(_write_json(outdir / f"kernel_{kind}.json", poly.to_json_dict()))
    summary = {"pass": True, "kind": kind, "N": N, "wiener_norm": poly.wiener_norm()}
    return outputs, summary


_RUNNERS = {
    "flat-rs": _run_flat_rs,
    "flat-exhaustive": _run_flat_exhaustive,
    "flat-anneal": _run_flat_anneal,
    "bound-thm59": _run_bound_thm59,
    "bound-tensor": _run_bound_tensor,
    "bound-cor512": _run_bound_cor512,
    "wiener-gate": _run_wiener_gate,
    "probe-sot": _run_probe_sot,
    "probe-iv": _run_probe_iv,
    "probe-brp": _run_probe_brp,
    "probe-wot": _run_probe_wot,
    "kernel-dump": _run_kernel_dump,
}


def run(config: ExperimentConfig) -> RunManifest:
    """Execute one experiment and persist results plus an atomic manifest."""
    outdir = Path(config.output_dir or f"out-{config.experiment}")
    outdir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    outputs, summary = _RUNNERS[config.experiment](
        config.parameters, config.seed, config.workers, outdir
    )
    finished = datetime.now(timezone.utc).isoformat()
    manifest = RunManifest(
        config_hash=config.digest(),
        artifact_version=__version__,
        started_at=started,
        finished_at=finished,
        outputs=tuple(sorted(os.path.basename(str(p)) for p in outputs)),
        summary=summary,
    )
    tmp = outdir / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True) + "\n")
    os.replace(tmp, outdir / "manifest.json")
    return manifest
