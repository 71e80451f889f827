"""Seeded robustness sweeps over systems and causality methods.

A sweep is a list of independent points. Each point regenerates its data and
runs one method, so points can execute in any order or in parallel; rows are
sorted by key before they are written.

Seeds are derived by hashing the master seed with the point's identity but
not with the swept value, so every value of a sweep sees the same data and
noise realisations (factor 1 and shift 0 reproduce the unswept baseline).
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .causality import CausalConfig, causal_decompose
from .emd import NoiseConfig, na_memd, orthogonality_index, separability_index
from .errors import InvalidArgumentError, NaCausalError
from .granger import granger_pairwise
from .signal import TimeSeries, decimate, format_float, lag_shift_pair
from .systems import AR_DEFAULT_BURN_IN, ar_stochastic, logistic_coupled, white_noise_pair

SYSTEMS = ("logistic", "ar", "noise")
METHODS = ("na-memd", "eemd", "granger")
SWEEPS = ("downsample", "shift", "length", "noise-level")
BASE_LENGTHS = {"logistic": 80, "ar": 100, "noise": 300}
DEFAULT_FACTORS = tuple(range(1, 11))
DEFAULT_SHIFTS = tuple(range(-20, 21))
DEFAULT_LENGTHS = (10, 25, 50, 100, 300, 500, 1000)
DEFAULT_LAMBDAS = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)

RESULT_COLUMNS = (
    "sweep", "system", "method", "parameter", "value", "repetition", "data_seed", "method_seed",
    "n_samples", "C_u1_to_u2", "C_u2_to_u1", "pair_index", "fallback",
    "granger_order", "granger_p_x_to_y", "granger_p_y_to_x", "granger_detected_x_to_y",
    "granger_detected_y_to_x", "error",
)
SUMMARY_COLUMNS = (
    "sweep", "system", "method", "parameter", "value", "count", "n_ok", "n_error",
    "mean_C_u1_to_u2", "std_C_u1_to_u2", "mean_C_u2_to_u1", "std_C_u2_to_u1",
    "detection_rate_x_to_y", "detection_rate_y_to_x",
)
NOISE_COLUMNS = ("noise_level", "channel", "n_imfs", "orthogonality", "separability", "error")


def point_seed(master_seed: int, *key) -> int:
    """Stable 63-bit seed for a tuple of identifiers."""
    text = json.dumps([int(master_seed), *[str(k) for k in key]])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


@dataclass(frozen=True)
class SweepConfig:
    """Shared settings for a sweep.

    ``causal`` supplies everything except the noise seed, which is replaced
    per point.
    """

    systems: tuple = ("logistic", "ar")
    methods: tuple = ("na-memd", "eemd", "granger")
    repetitions: int = 20
    master_seed: int = 0
    causal: CausalConfig = CausalConfig()
    granger_max_order: Optional[int] = None
    sample_rate: float = 1.0
    workers: int = 1

    def __post_init__(self):
        for s in self.systems:
            if s not in SYSTEMS and s != "user":
                raise InvalidArgumentError(f"unknown system {s!r}; expected one of {SYSTEMS}")
        for m in self.methods:
            if m not in METHODS:
                raise InvalidArgumentError(f"unknown method {m!r}; expected one of {METHODS}")
        if self.repetitions < 1:
            raise InvalidArgumentError("repetitions must be >= 1")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")


@dataclass(frozen=True)
class SweepPoint:
    sweep: str
    system: str
    method: str
    parameter: str
    value: float
    repetition: int
    length: int


@dataclass
class SweepResult:
    sweep: str
    rows: list
    summary: list
    timings: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def errors(self) -> list:
        return [r for r in self.rows if r["error"]]


# --- point evaluation ----------------------------------------------------------

def _system_data(system: str, length: int, seed: int, rate: float, user=None):
    if system == "logistic":
        return logistic_coupled(length, 0, rate)
    if system == "ar":
        return ar_stochastic(length, seed, AR_DEFAULT_BURN_IN, rate)
    if system == "noise":
        return white_noise_pair(length, seed, rate)
    if user is None:
        raise InvalidArgumentError("system 'user' needs a data pair")
    return user


def _transform(point: SweepPoint, x: TimeSeries, y: TimeSeries):
    if point.parameter == "factor":
        return decimate(x, int(point.value)), decimate(y, int(point.value))
    if point.parameter == "shift":
        return lag_shift_pair(x, y, int(point.value))
    return x, y


def evaluate_point(point: SweepPoint, config: SweepConfig, user=None) -> tuple:
    """Run one sweep point; returns (row dict, elapsed seconds)."""
    data_seed = point_seed(config.master_seed, "data", point.system, point.repetition)
    method_seed = point_seed(config.master_seed, "method", point.system, point.method, point.repetition)
    row = dict.fromkeys(RESULT_COLUMNS, "")
    row.update(sweep=point.sweep, system=point.system, method=point.method, parameter=point.parameter,
               value=point.value, repetition=point.repetition, data_seed=data_seed, method_seed=method_seed)
    start = time.perf_counter()
    try:
        length = point.value if point.parameter == "length" else point.length
        x, y = _system_data(point.system, int(length), data_seed, config.sample_rate, user)
        x, y = _transform(point, x, y)
        row["n_samples"] = len(x)
        if point.method == "granger":
            g = granger_pairwise(x, y, config.granger_max_order)
            row.update(granger_order=g.order, granger_p_x_to_y=g.p_x_to_y, granger_p_y_to_x=g.p_y_to_x,
                       granger_detected_x_to_y=int(g.detected_x_to_y),
                       granger_detected_y_to_x=int(g.detected_y_to_x))
        else:
            cfg = replace(config.causal, method=point.method,
                          noise=replace(config.causal.noise, seed=method_seed))
            r = causal_decompose(x, y, cfg)
            row.update(C_u1_to_u2=r.C_u1_to_u2, C_u2_to_u1=r.C_u2_to_u1, pair_index=r.pair.index,
                       fallback=int(r.pair.fallback))
    except (NaCausalError, ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
    return row, time.perf_counter() - start


def _run_points(points: Sequence[SweepPoint], config: SweepConfig, user=None) -> list:
    if config.workers == 1 or len(points) < 2:
        return [evaluate_point(p, config, user) for p in points]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(evaluate_point, points, [config] * len(points), [user] * len(points)))


def _row_key(row: dict) -> tuple:
    return (row["system"], row["method"], float(row["value"]), int(row["repetition"]))


def summarize(rows: Sequence[dict]) -> list:
    """Per (system, method, value) aggregates; std is the population std."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["sweep"], r["system"], r["method"], r["parameter"], r["value"]), []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: (k[1], k[2], float(k[4]))):
        members = groups[key]
        ok = [r for r in members if not r["error"]]
        s = dict(zip(("sweep", "system", "method", "parameter", "value"), key))
        s.update(count=len(members), n_ok=len(ok), n_error=len(members) - len(ok))
        c12 = np.array([r["C_u1_to_u2"] for r in ok if r["C_u1_to_u2"] != ""], dtype=float)
        c21 = np.array([r["C_u2_to_u1"] for r in ok if r["C_u2_to_u1"] != ""], dtype=float)
        dxy = [r["granger_detected_x_to_y"] for r in ok if r["granger_detected_x_to_y"] != ""]
        dyx = [r["granger_detected_y_to_x"] for r in ok if r["granger_detected_y_to_x"] != ""]
        s.update(
            mean_C_u1_to_u2=float(c12.mean()) if c12.size else "",
            std_C_u1_to_u2=float(c12.std()) if c12.size else "",
            mean_C_u2_to_u1=float(c21.mean()) if c21.size else "",
            std_C_u2_to_u1=float(c21.std()) if c21.size else "",
            detection_rate_x_to_y=float(np.mean(dxy)) if dxy else "",
            detection_rate_y_to_x=float(np.mean(dyx)) if dyx else "",
        )
        out.append(s)
    return out


def _sweep(name: str, parameter: str, values, config: SweepConfig, systems=None, user=None) -> SweepResult:
    systems = config.systems if systems is None else systems
    points = [
        SweepPoint(name, system, method, parameter, v, rep,
                   len(user[0]) if system == "user" else BASE_LENGTHS[system])
        for system in systems for method in config.methods
        for v in values for rep in range(config.repetitions)
    ]
    results = _run_points(points, config, user)
    rows = sorted((r for r, _ in results), key=_row_key)
    timings = sorted(({**{k: r[k] for k in ("system", "method", "value", "repetition")}, "elapsed_s": t}
                      for r, t in results), key=_row_key)
    manifest = {
        "sweep": name,
        "parameter": parameter,
        "values": list(values),
        "systems": list(systems),
        "config": _jsonable(asdict(config)),
        "master_seed": config.master_seed,
    }
    return SweepResult(name, rows, summarize(rows), timings, manifest)


def downsample_sweep(config: SweepConfig = SweepConfig(), factors=DEFAULT_FACTORS, user=None) -> SweepResult:
    """Decimate both channels by each factor and rerun every method."""
    return _sweep("downsample", "factor", [int(f) for f in factors], config, user=user)


def shift_sweep(config: SweepConfig = SweepConfig(), shifts=DEFAULT_SHIFTS, user=None) -> SweepResult:
    """Delay the first channel against the second by each shift (lag and lead)."""
    return _sweep("shift", "shift", [int(s) for s in shifts], config, user=user)


def length_sweep(config: SweepConfig = SweepConfig(methods=("na-memd", "eemd", "granger")),
                 lengths=DEFAULT_LENGTHS) -> SweepResult:
    """White-noise pairs of each length; the system list is ignored."""
    if min(lengths) < 1:
        raise InvalidArgumentError("lengths must be positive")
    return _sweep("length", "length", [int(n) for n in lengths], config, systems=("noise",))


def two_tone_pair(n: int = 500, sample_rate: float = 100.0) -> tuple:
    """Test pair for the noise-level sweep: 2 Hz and 11 Hz tones, the second
    channel phase-shifted and with a weaker fast tone."""
    t = np.arange(n) / sample_rate
    x = np.sin(2 * np.pi * 2 * t) + 0.5 * np.sin(2 * np.pi * 11 * t)
    y = np.sin(2 * np.pi * 2 * t + 0.7) + 0.3 * np.sin(2 * np.pi * 11 * t + 0.3)
    return TimeSeries(x, sample_rate, "tone_a"), TimeSeries(y, sample_rate, "tone_b")


def noise_level_sweep(pair=None, levels=DEFAULT_LAMBDAS, seed: int = 0, config: CausalConfig = CausalConfig()) -> dict:
    """Orthogonality and separability of the NA-MEMD IMFs per noise level.

    Returns a dict with ``rows`` (one per level and channel), ``best_level``
    (the level minimising the larger of the two channel-averaged indices) and
    ``config``.
    """
    if any(not lv > 0 for lv in levels):
        raise InvalidArgumentError("noise levels must be positive")
    u1, u2 = two_tone_pair() if pair is None else pair
    rows, scores = [], {}
    for lv in sorted(levels):
        noise = replace(config.noise, noise_level=float(lv), seed=seed)
        try:
            d = na_memd(u1, u2, noise, config.n_directions, config.emd)
            per = [(orthogonality_index(d, c), separability_index(d, c)) for c in range(2)]
        except (NaCausalError, ValueError) as exc:
            for c in range(2):
                rows.append({"noise_level": lv, "channel": c, "n_imfs": "", "orthogonality": "",
                             "separability": "", "error": f"{type(exc).__name__}: {exc}"})
            continue
        for c, (oi, si) in enumerate(per):
            rows.append({"noise_level": lv, "channel": c, "n_imfs": d.n_imfs, "orthogonality": oi,
                         "separability": si, "error": ""})
        scores[lv] = max(np.mean([p[0] for p in per]), np.mean([p[1] for p in per]))
    best = min(scores, key=scores.get) if scores else None
    return {"rows": rows, "best_level": best, "scores": scores,
            "config": {"levels": list(levels), "seed": seed, "causal": _jsonable(asdict(config))}}


# --- output --------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_table(path, rows: Sequence[dict], columns: Sequence[str]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])


def write_sweep(result: SweepResult, out_dir) -> dict:
    """Write results.csv, summary.csv, manifest.json and timings.csv.

    Everything except timings.csv is a pure function of the configuration.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in ("results.csv", "summary.csv", "manifest.json", "timings.csv")}
    write_table(paths["results.csv"], result.rows, RESULT_COLUMNS)
    write_table(paths["summary.csv"], result.summary, SUMMARY_COLUMNS)
    write_table(paths["timings.csv"], result.timings, ("system", "method", "value", "repetition", "elapsed_s"))
    manifest = dict(result.config, n_rows=len(result.rows), n_error_rows=len(result.errors()),
                    files=["results.csv", "summary.csv", "timings.csv"])
    paths["manifest.json"].write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return paths


def write_noise_sweep(result: dict, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"results.csv": out / "results.csv", "summary.csv": out / "summary.csv",
             "manifest.json": out / "manifest.json"}
    write_table(paths["results.csv"], result["rows"], NOISE_COLUMNS)
    summary = [{"noise_level": lv, "score": s, "best": int(lv == result["best_level"])}
               for lv, s in sorted(result["scores"].items())]
    write_table(paths["summary.csv"], summary, ("noise_level", "score", "best"))
    manifest = dict(result["config"], sweep="noise-level", best_level=result["best_level"],
                    files=["results.csv", "summary.csv"])
    paths["manifest.json"].write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return paths


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))
