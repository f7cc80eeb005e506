"""Experiment orchestration: config parsing, replication fan-out, file I/O.

An experiment is a JSON config (engine, model parameters, replication
plan, master seed), run deterministically: replicate r always gets the
stream derived from (master_seed, experiment label, r), so outputs are
byte-identical across reruns and across worker counts.

Outputs per experiment directory:
  samples.csv   one row per retained success
  ccdf.csv      pooled delay survival curve (columns x, survival)
  fit.json      log-log tail fit plus the analytic reference slope
  summary.json  config echo, versions, backend, runtime
"""
from __future__ import annotations

import csv
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from ._core import BACKEND
from .bounds import BoundKind, asymptotic_slope
from .distributions import (
    GeometricUsers,
    PacketDistribution,
    UserCountDistribution,
    packet_from_config,
    users_from_config,
)
from .errors import ConfigError, NumericError
from .finite import FiniteModelParams, Instrument, simulate_finite
from .rng import replicate_stream
from .slotted import sample_conditional_geometric, simulate_slotted, SlottedModelParams
from .tailfit import DEFAULT_WINDOW, TailFit, empirical_ccdf, fit_loglog_slope

_REFERENCE_KINDS = {
    "lower_n": BoundKind.LOWER_N,
    "upper_n": BoundKind.UPPER_N,
    "transient": BoundKind.TRANSIENT,
    "steady": BoundKind.STEADY,
    "slotted": BoundKind.SLOTTED,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment plan; ``raw`` is the canonical JSON echo."""

    engine: str
    replications: int
    stop_after: int
    warmup: int
    master_seed: int
    experiment: str
    workers: int | None
    fit_window: tuple[float, float]
    reference_kind: str | None
    # finite engine
    finite_params: FiniteModelParams | None
    instrument: Instrument
    # slotted engine
    slotted_params: SlottedModelParams | None
    sampler: str
    raw: dict


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config dict; raises ConfigError with a specific message."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")
    engine = raw.get("engine")
    if engine not in ("finite", "slotted"):
        raise ConfigError(f"engine must be 'finite' or 'slotted', got {engine!r}")

    def _require(key, typ):
        if key not in raw:
            raise ConfigError(f"config missing required field {key!r}")
        v = raw[key]
        if (typ is int and isinstance(v, bool)) or not isinstance(v, typ):
            raise ConfigError(f"config field {key!r} has wrong type: {v!r}")
        return v

    replications = _require("replications", int)
    stop_after = _require("stop_after", int)
    master_seed = _require("master_seed", int)
    warmup = raw.get("warmup", 0)
    if replications < 1:
        raise ConfigError(f"replications must be >= 1, got {replications}")
    if stop_after < 1:
        raise ConfigError(f"stop_after must be >= 1, got {stop_after}")
    if not isinstance(warmup, int) or not 0 <= warmup < stop_after:
        raise ConfigError(
            f"warmup must satisfy 0 <= warmup < stop_after={stop_after}, got {warmup}"
        )
    experiment = raw.get("experiment", engine)
    workers = raw.get("workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ConfigError(f"workers must be a positive int or null, got {workers!r}")
    window = tuple(raw.get("fit_window", DEFAULT_WINDOW))
    if len(window) != 2 or not (0.0 < window[1] < window[0] <= 1.0):
        raise ConfigError(f"fit_window must be [p_hi, p_lo] in (0,1], got {window}")

    reference_kind = None
    ref = raw.get("reference")
    if ref is not None:
        reference_kind = ref.get("kind") if isinstance(ref, dict) else ref
        if reference_kind not in _REFERENCE_KINDS:
            raise ConfigError(
                f"reference kind must be one of {sorted(_REFERENCE_KINDS)}, "
                f"got {reference_kind!r}"
            )

    finite_params = None
    slotted_params = None
    instrument = Instrument()
    sampler = "conditional"
    if engine == "finite":
        finite_params = FiniteModelParams(
            M=_require("M", int),
            lam=float(_require("lambda", (int, float))),
            nu=float(_require("nu", (int, float))),
            packet=packet_from_config(_require("packet", dict)),
        )
        inst = raw.get("instrument", {})
        if not isinstance(inst, dict):
            raise ConfigError(f"instrument must be an object, got {inst!r}")
        instrument = Instrument(
            nf=bool(inst.get("nf", False)),
            min_residual=bool(inst.get("min_residual", False)),
        )
        if (instrument.nf or instrument.min_residual) and finite_params.M < 2:
            raise ConfigError("instrumentation requires M >= 2")
    else:
        nu = float(_require("nu", (int, float)))
        lam = float(raw.get("lambda", nu))
        slotted_params = SlottedModelParams(
            nu=nu, lam=lam, users=users_from_config(_require("users", dict))
        )
        sampler = raw.get("sampler", "conditional")
        if sampler not in ("conditional", "slots"):
            raise ConfigError(
                f"sampler must be 'conditional' or 'slots', got {sampler!r}"
            )
        if sampler == "slots" and lam != nu:
            raise ConfigError("slot-by-slot sampler requires lambda == nu")

    return ExperimentConfig(
        engine=engine,
        replications=replications,
        stop_after=stop_after,
        warmup=warmup,
        master_seed=master_seed,
        experiment=experiment,
        workers=workers,
        fit_window=window,
        reference_kind=reference_kind,
        finite_params=finite_params,
        instrument=instrument,
        slotted_params=slotted_params,
        sampler=sampler,
        raw=raw,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}")
    return parse_config(raw)


def reference_slope_for(config: ExperimentConfig) -> float | None:
    """Analytic slope matching the configured reference kind, if any."""
    if config.reference_kind is None:
        return None
    kind = _REFERENCE_KINDS[config.reference_kind]
    if kind is BoundKind.SLOTTED:
        users = config.slotted_params.users
        if not isinstance(users, GeometricUsers):
            raise ConfigError(
                "slotted reference slope needs an untruncated geometric user law"
            )
        return asymptotic_slope(kind, alpha=users.alpha, nu=config.slotted_params.nu)
    p = config.finite_params
    mu = p.packet.tail_rate
    if not math.isfinite(mu):
        raise ConfigError("reference slope needs a packet law with a finite tail rate")
    return asymptotic_slope(kind, M=p.M, lam=p.lam, nu=p.nu, mu=mu)


# ---------------------------------------------------------------------------
# replication fan-out


def _finite_rows(config: ExperimentConfig, r: int) -> list[list]:
    stream = replicate_stream(config.master_seed, config.experiment, r)
    trace = simulate_finite(
        config.finite_params,
        stop_after=config.stop_after,
        seed=stream,
        instrument=config.instrument,
    )
    delays = trace.delays
    rows = []
    for m in range(config.warmup, len(trace)):
        row = [
            r,
            m + 1,
            int(trace.users[m]),
            float(delays[m]),
            int(trace.retx[m]),
        ]
        if config.instrument.nf:
            v = int(trace.nf[m])
            row.append(v if v >= 0 else None)
        if config.instrument.min_residual:
            v = float(trace.min_residual[m])
            row.append(v if not math.isnan(v) else None)
        rows.append(row)
    return rows


def _slotted_rows(config: ExperimentConfig, r: int) -> list[list]:
    stream = replicate_stream(config.master_seed, config.experiment, r)
    p = config.slotted_params
    if config.sampler == "slots":
        samples = simulate_slotted(p, config.stop_after, seed=stream)
    else:
        m_drawn = p.users.sample(stream)
        samples = [
            sample_conditional_geometric(m_drawn, p.nu, stream)
            for _ in range(config.stop_after)
        ]
    return [
        [r, m + 1, s.M_drawn, s.T, s.N]
        for m, s in enumerate(samples)
        if m >= config.warmup
    ]


def _run_chunk(raw: dict, lo: int, hi: int) -> list[list]:
    config = parse_config(raw)
    fn = _finite_rows if config.engine == "finite" else _slotted_rows
    out = []
    for r in range(lo, hi):
        out.extend(fn(config, r))
    return out


def _fan_out(config: ExperimentConfig, workers: int | None) -> list[list]:
    n = config.replications
    if workers is None:
        workers = config.workers or os.cpu_count() or 1
    workers = min(workers, n)
    if workers <= 1:
        return _run_chunk(config.raw, 0, n)
    # ascending replicate ranges; merge order is fixed, so the pooled
    # output does not depend on the worker count
    chunk = max(1, math.ceil(n / (workers * 4)))
    edges = list(range(0, n, chunk)) + [n]
    rows: list[list] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_chunk, config.raw, lo, hi)
            for lo, hi in zip(edges[:-1], edges[1:])
        ]
        for f in futures:
            rows.extend(f.result())
    return rows


# ---------------------------------------------------------------------------
# file writers (floats in shortest round-trip decimal)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_ccdf_csv(path: Path, x, survival) -> None:
    write_rows_csv(
        path, ["x", "survival"], ([float(a), float(s)] for a, s in zip(x, survival))
    )


def read_ccdf_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["x", "survival"]:
            raise ConfigError(f"{path}: expected header 'x,survival', got {header}")
        xs, ps = [], []
        for row in reader:
            if not row:
                continue
            xs.append(float(row[0]))
            ps.append(float(row[1]))
    return np.array(xs), np.array(ps)


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def fit_to_json(fit: TailFit | None, reference_slope, reference_kind) -> dict:
    if fit is None:
        return {
            "slope": None,
            "stderr": None,
            "window_hi": None,
            "window_lo": None,
            "points_used": 0,
            "reliable": False,
            "reference_slope": reference_slope,
            "reference_kind": reference_kind,
        }
    return {
        "slope": fit.slope,
        "stderr": fit.stderr,
        "window_hi": fit.window[0],
        "window_lo": fit.window[1],
        "points_used": fit.points_used,
        "reliable": fit.reliable,
        "reference_slope": reference_slope,
        "reference_kind": reference_kind,
    }


# ---------------------------------------------------------------------------
# driver


@dataclass(frozen=True)
class ExperimentResult:
    out_dir: Path
    samples_path: Path
    ccdf_path: Path
    fit_path: Path
    summary_path: Path
    fit: TailFit | None
    reference_slope: float | None
    n_samples: int
    delays: np.ndarray


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path,
    workers: int | None = None,
) -> ExperimentResult:
    """Run all replications, aggregate, and write the four output files."""
    t0 = time.monotonic()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = _fan_out(config, workers)

    if config.engine == "finite":
        header = ["replicate", "m", "user", "T", "N"]
        if config.instrument.nf:
            header.append("Nf")
        if config.instrument.min_residual:
            header.append("Lmin")
    else:
        header = ["replicate", "m", "M_drawn", "T", "N"]
    samples_path = out / "samples.csv"
    write_rows_csv(samples_path, header, rows)

    delays = np.array([row[3] for row in rows], dtype=float)
    points = empirical_ccdf(delays)
    ccdf_path = out / "ccdf.csv"
    write_ccdf_csv(ccdf_path, points.x, points.survival)

    fit = None
    fit_error = None
    try:
        fit = fit_loglog_slope(points, config.fit_window)
    except NumericError as exc:
        fit_error = str(exc)
    ref = reference_slope_for(config)
    fit_obj = fit_to_json(fit, ref, config.reference_kind)
    if fit_error is not None:
        fit_obj["error"] = fit_error
    fit_path = out / "fit.json"
    _write_json(fit_path, fit_obj)

    summary_path = out / "summary.json"
    _write_json(
        summary_path,
        {
            "config": config.raw,
            "engine": config.engine,
            "n_samples": len(delays),
            "fit": fit_obj,
            "backend": BACKEND,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "runtime_seconds": time.monotonic() - t0,
            "files": {
                "samples": samples_path.name,
                "ccdf": ccdf_path.name,
                "fit": fit_path.name,
            },
        },
    )
    return ExperimentResult(
        out_dir=out,
        samples_path=samples_path,
        ccdf_path=ccdf_path,
        fit_path=fit_path,
        summary_path=summary_path,
        fit=fit,
        reference_slope=ref,
        n_samples=len(delays),
        delays=delays,
    )


# ---------------------------------------------------------------------------
# preset reproductions

FIGURES = ("fig3", "fig4", "fig5")
SCALES = ("desk", "full")

_FIG5_CAPS = (6, 8, 10, 12, 14, None)


def preset_configs(figure: str, scale: str, master_seed: int = 20240501) -> dict:
    """Named config dicts for the three preset experiments.

    fig3: first-departure delay T_1 for M in {2,4,10,20}, exponential(1)
    packets, lambda = nu = 1.5.  fig4: M=3, lambda = nu = 2/3 starting
    (T_1) and steady-state runs.  fig5: slotted T with geometric(mean 3)
    users truncated at K in {6,...,14} plus untruncated.
    """
    if figure not in FIGURES:
        raise ConfigError(f"figure must be one of {FIGURES}, got {figure!r}")
    if scale not in SCALES:
        raise ConfigError(f"scale must be one of {SCALES}, got {scale!r}")
    configs = {}
    if figure == "fig3":
        for m in (2, 4, 10, 20):
            name = f"fig3-M{m}"
            configs[name] = {
                "engine": "finite",
                "M": m,
                "lambda": 1.5,
                "nu": 1.5,
                "packet": {"type": "exponential", "rate": 1.0},
                "replications": 100_000,
                "stop_after": 1,
                "warmup": 0,
                "master_seed": master_seed,
                "experiment": name,
                "reference": {"kind": "transient"},
            }
    elif figure == "fig4":
        configs["fig4-start"] = {
            "engine": "finite",
            "M": 3,
            "lambda": 2.0 / 3.0,
            "nu": 2.0 / 3.0,
            "packet": {"type": "exponential", "rate": 1.0},
            "replications": 100_000,
            "stop_after": 1,
            "warmup": 0,
            "master_seed": master_seed,
            "experiment": "fig4-start",
            "reference": {"kind": "transient"},
        }
        steady_stop = 1_000_000 if scale == "desk" else 10_000_000
        configs["fig4-steady"] = {
            "engine": "finite",
            "M": 3,
            "lambda": 2.0 / 3.0,
            "nu": 2.0 / 3.0,
            "packet": {"type": "exponential", "rate": 1.0},
            "replications": 1,
            "stop_after": steady_stop,
            "warmup": steady_stop // 100,
            "master_seed": master_seed,
            "experiment": "fig4-steady",
            "reference": {"kind": "steady"},
        }
    else:
        reps = 200_000 if scale == "desk" else 1_000_000
        for cap in _FIG5_CAPS:
            name = "fig5-Kinf" if cap is None else f"fig5-K{cap}"
            users = {"type": "geometric", "mean": 3}
            if cap is not None:
                users["cap"] = cap
            configs[name] = {
                "engine": "slotted",
                "nu": math.log(2.0),
                "users": users,
                "sampler": "conditional",
                "replications": reps,
                "stop_after": 1,
                "warmup": 0,
                "master_seed": master_seed,
                "experiment": name,
                "reference": None if cap is not None else {"kind": "slotted"},
            }
    return configs


def reproduce(
    figure: str,
    scale: str,
    out_root: str | Path,
    workers: int | None = None,
    master_seed: int = 20240501,
) -> dict[str, ExperimentResult]:
    """Run one figure's preset experiments under out_root/<name>/."""
    results = {}
    for name, raw in preset_configs(figure, scale, master_seed).items():
        config = parse_config(raw)
        results[name] = run_experiment(config, Path(out_root) / name, workers=workers)
    return results
