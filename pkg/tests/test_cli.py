import json
import subprocess
import sys

import numpy as np
import pytest

from nacausal.cli import build_parser, main
from nacausal.signal import read_csv

FAST = ["--directions", "16"]


@pytest.fixture
def ar_csv(tmp_path):
    path = tmp_path / "ar.csv"
    assert main(["synth", "ar", "--n", "300", "--seed", "3", "--out", str(path)]) == 0
    return path


@pytest.mark.parametrize("kind,n", [("logistic", 80), ("ar", 100), ("noise", 300)])
def test_synth_default_lengths(tmp_path, capsys, kind, n):
    out = tmp_path / f"{kind}.csv"
    assert main(["synth", kind, "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == f"{out} {n}"
    ch = read_csv(out)
    assert len(ch) == 2 and all(len(c) == n for c in ch)


def test_synth_with_time_column(tmp_path):
    out = tmp_path / "x.csv"
    main(["synth", "logistic", "--n", "10", "--with-time", "--sample-rate", "4", "--out", str(out)])
    header, first = out.read_text().splitlines()[:2]
    assert header.split(",")[0] == "time"
    ch = read_csv(out)
    assert ch[0].sample_rate == pytest.approx(4.0)
    assert ch[0].samples[1] == 0.6064


def test_decompose_two_tone(tmp_path, two_tone):
    from nacausal.signal import TimeSeries, write_csv

    t, x, fs = two_tone
    src = tmp_path / "tones.csv"
    write_csv(src, [TimeSeries(x, fs, "a"), TimeSeries(np.sin(2 * np.pi * 5 * t + 0.3), fs, "b")])
    out = tmp_path / "dec"
    assert main(["decompose", str(src), "--out", str(out), *FAST]) == 0
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["n_imfs"] >= 2
    assert diag["reconstruction_max_error"] <= 1e-8 * np.max(np.abs(x))
    lines = (out / "decomposition.csv").read_text().splitlines()
    assert len(lines) > 1


def test_single_channel_rejected(tmp_path, capsys):
    src = tmp_path / "one.csv"
    src.write_text("a\n" + "\n".join(str(v) for v in np.sin(np.arange(50))) + "\n")
    assert main(["causality", str(src)]) == 1
    err = capsys.readouterr().err
    assert "requires exactly 2 data channels" in err and err.count("\n") == 1


def test_malformed_csv_names_line(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("a,b\n1,2\n3,oops\n5,6\n")
    assert main(["causality", str(src)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_causality_swap(tmp_path, ar_csv, capsys):
    main(["causality", str(ar_csv), *FAST])
    ab = json.loads(capsys.readouterr().out)
    main(["causality", str(ar_csv), "--col-a", "1", "--col-b", "0", *FAST])
    ba = json.loads(capsys.readouterr().out)
    assert ab["C"]["u1_to_u2"] == ba["C"]["u2_to_u1"]
    assert ab["C"]["u2_to_u1"] == ba["C"]["u1_to_u2"]


def test_windowed_counts(ar_csv, capsys):
    assert main(["causality", str(ar_csv), "--window", "50", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["windows"]) == 6
    assert doc["E1"] + doc["E2"] == pytest.approx(6, abs=1e-9)
    assert doc["N1"] + doc["N2"] + doc["ties"] == 6


def test_window_too_long(ar_csv, capsys):
    assert main(["causality", str(ar_csv), "--window", "400"]) == 1
    assert "error" in capsys.readouterr().err


def test_granger_method(ar_csv, capsys):
    assert main(["causality", str(ar_csv), "--method", "granger"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["p"]["x_to_y"] < 0.01 and 1 <= doc["order"] <= 20


def test_per_imf_output(ar_csv, capsys):
    main(["causality", str(ar_csv), "--per-imf", *FAST])
    doc = json.loads(capsys.readouterr().out)
    entries = [e for e in doc["per_imf"] if e is not None]
    assert entries
    assert all(abs(e["u1_to_u2"] + e["u2_to_u1"] - 1) <= 1e-12 for e in entries)


def test_experiment_shift_small(tmp_path, capsys):
    out = tmp_path / "exp"
    assert main(["experiment", "shift", "--range", "1", "--reps", "2", "--methods", "na-memd,granger",
                 "--systems", "ar", "--workers", "1", "--out", str(out), *FAST]) == 0
    assert {p.name for p in out.iterdir()} == {"results.csv", "summary.csv", "timings.csv", "manifest.json"}
    assert len((out / "results.csv").read_text().splitlines()) == 1 + 3 * 2 * 2
    assert capsys.readouterr().out.rstrip().endswith(f"wrote {out}")


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["experiment", "--help"])
    text = capsys.readouterr().out
    assert "default: 20" in text and "--workers" in text


def test_unknown_method_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["causality", "x.csv", "--method", "ccm"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    out = tmp_path / "n.csv"
    proc = subprocess.run([sys.executable, "-m", "nacausal", "synth", "noise", "--n", "20", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and out.exists()


def _outputs(path):
    if path.is_dir():
        return {p.name: p.read_bytes() for p in sorted(path.iterdir()) if p.name != "timings.csv"}
    return {"file": path.read_bytes()}


def test_reruns_byte_identical(tmp_path, ar_csv):
    commands = {
        "synth": ["synth", "ar", "--seed", "9"],
        "decompose": ["decompose", str(ar_csv), *FAST],
        "causality": ["causality", str(ar_csv), "--per-imf", *FAST],
        "experiment": ["experiment", "length", "--lengths", "20,40", "--reps", "2", "--systems", "ar", *FAST],
    }
    for name, argv in commands.items():
        a, b = tmp_path / f"{name}-a", tmp_path / f"{name}-b"
        assert main([*argv, "--out", str(a)]) == 0
        assert main([*argv, "--out", str(b)]) == 0
        assert _outputs(a) == _outputs(b), name
