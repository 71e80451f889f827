import csv
import json

import numpy as np
import pytest

from nacausal.causality import CausalConfig, causal_decompose
from nacausal.emd import NoiseConfig
from nacausal.errors import InvalidArgumentError
from nacausal.experiments import (
    RESULT_COLUMNS,
    SUMMARY_COLUMNS,
    SweepConfig,
    SweepPoint,
    downsample_sweep,
    evaluate_point,
    length_sweep,
    noise_level_sweep,
    point_seed,
    shift_sweep,
    summarize,
    two_tone_pair,
    write_noise_sweep,
    write_sweep,
)
from nacausal.systems import ar_stochastic

FAST = CausalConfig(n_directions=16, ensemble_size=5)


def small(**kw):
    base = dict(systems=("logistic", "ar"), methods=("na-memd", "granger"), repetitions=2, causal=FAST)
    base.update(kw)
    return SweepConfig(**base)


def test_point_seed_is_stable_and_distinct():
    assert point_seed(0, "a", 1) == point_seed(0, "a", 1)
    assert len({point_seed(0, "a", r) for r in range(100)}) == 100
    assert point_seed(1, "a", 1) != point_seed(0, "a", 1)
    assert 0 <= point_seed(5, "x") < 2**63


def test_factor_one_matches_unswept_baseline():
    cfg = small(methods=("na-memd",), systems=("ar",))
    rows = downsample_sweep(cfg, factors=(1, 2)).rows
    row = next(r for r in rows if r["value"] == 1 and r["repetition"] == 0)
    x, y = ar_stochastic(100, row["data_seed"])
    base = causal_decompose(x, y, CausalConfig(n_directions=16, ensemble_size=5,
                                               noise=NoiseConfig(seed=row["method_seed"])))
    assert row["C_u1_to_u2"] == base.C_u1_to_u2


def test_shift_zero_matches_factor_one():
    cfg = small()
    a = {(r["system"], r["method"], r["repetition"]): r for r in downsample_sweep(cfg, (1,)).rows}
    b = {(r["system"], r["method"], r["repetition"]): r for r in shift_sweep(cfg, (0,)).rows}
    for k in a:
        for col in ("C_u1_to_u2", "granger_p_x_to_y"):
            assert a[k][col] == b[k][col]


def test_short_decimation_gives_error_rows():
    res = downsample_sweep(small(systems=("logistic",)), factors=(10,))
    # 8 samples: decomposition still allowed, Granger is not
    errs = res.errors()
    assert errs and all(r["method"] == "granger" for r in errs)
    assert all(r["error"] == "" for r in res.rows if r["method"] == "na-memd")
    s = next(s for s in res.summary if s["method"] == "granger")
    assert s["count"] == 2 and s["n_error"] == 2


def test_rows_sorted_and_normalised():
    res = shift_sweep(small(), shifts=(-2, 0, 2))
    keys = [(r["system"], r["method"], r["value"], r["repetition"]) for r in res.rows]
    assert keys == sorted(keys)
    for r in res.rows:
        if r["method"] == "na-memd" and not r["error"]:
            assert abs(r["C_u1_to_u2"] + r["C_u2_to_u1"] - 1) <= 1e-12


def test_subset_in_any_order_gives_same_rows():
    cfg = small()
    points = [SweepPoint("shift", "ar", "na-memd", "shift", v, rep, 100) for v in (-1, 3) for rep in range(2)]
    forward = [evaluate_point(p, cfg)[0] for p in points]
    backward = [evaluate_point(p, cfg)[0] for p in reversed(points)][::-1]
    assert forward == backward


def test_summary_recomputes_from_rows():
    res = length_sweep(small(methods=("na-memd",)), lengths=(20, 40))
    for s in res.summary:
        vals = [r["C_u1_to_u2"] for r in res.rows if r["value"] == s["value"] and not r["error"]]
        assert s["mean_C_u1_to_u2"] == pytest.approx(np.mean(vals), abs=0)
        assert s["std_C_u1_to_u2"] == pytest.approx(np.std(vals), abs=0)
        assert s["count"] == 2
    assert summarize(res.rows) == res.summary


def test_length_sweep_marks_too_short_lengths():
    res = length_sweep(small(methods=("na-memd",)), lengths=(5, 10))
    assert all(r["error"].startswith("InvalidArgumentError") for r in res.rows if r["value"] == 5)
    assert all(r["error"] == "" for r in res.rows if r["value"] == 10)


def test_parallel_equals_serial(tmp_path):
    a = shift_sweep(small(workers=1), (-1, 1))
    b = shift_sweep(small(workers=2), (-1, 1))
    assert a.rows == b.rows
    write_sweep(a, tmp_path / "a")
    write_sweep(b, tmp_path / "b")
    for name in ("results.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_written_files(tmp_path):
    res = downsample_sweep(small(systems=("ar",)), (1, 3))
    paths = write_sweep(res, tmp_path)
    with open(paths["results.csv"]) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == RESULT_COLUMNS and len(rows) == 1 + len(res.rows)
    with open(paths["summary.csv"]) as fh:
        assert tuple(next(csv.reader(fh))) == SUMMARY_COLUMNS
    manifest = json.loads(paths["manifest.json"].read_text())
    assert manifest["master_seed"] == 0 and manifest["values"] == [1, 3]
    assert manifest["config"]["causal"]["noise"]["noise_level"] == 0.1
    # floats carry 17 significant digits
    c = next(r for r in rows[1:] if r[RESULT_COLUMNS.index("C_u1_to_u2")])[RESULT_COLUMNS.index("C_u1_to_u2")]
    assert float(c) == float(format(float(c), ".17g"))


def test_noise_level_sweep_reproducible(tmp_path):
    pair = two_tone_pair(200)
    a = noise_level_sweep(pair, (0.05, 0.1, 0.5), seed=1, config=FAST)
    b = noise_level_sweep(pair, (0.05, 0.1, 0.5), seed=1, config=FAST)
    assert a["rows"] == b["rows"]
    assert a["best_level"] in (0.05, 0.1, 0.5)
    assert a["best_level"] == min(a["scores"], key=a["scores"].get)
    assert len(a["rows"]) == 6
    write_noise_sweep(a, tmp_path)
    assert json.loads((tmp_path / "manifest.json").read_text())["best_level"] == a["best_level"]


def test_default_levels_include_point_one():
    from nacausal.experiments import DEFAULT_LAMBDAS

    assert 0.1 in DEFAULT_LAMBDAS


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        SweepConfig(methods=("ccm",))
    with pytest.raises(InvalidArgumentError):
        SweepConfig(repetitions=0)
    with pytest.raises(InvalidArgumentError):
        noise_level_sweep(levels=(0.0,))
