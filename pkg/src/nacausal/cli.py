"""Command-line interface: ``nacausal {synth,decompose,causality,experiment}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .causality import CausalConfig, PairSelectionConfig, causal_decompose, decompose_pair, windowed_causality
from .emd import EmdConfig, NoiseConfig, orthogonality_index, separability_index, write_decomposition_csv
from .errors import NaCausalError
from .experiments import (
    DEFAULT_LAMBDAS,
    DEFAULT_LENGTHS,
    SweepConfig,
    default_workers,
    downsample_sweep,
    length_sweep,
    noise_level_sweep,
    shift_sweep,
    write_noise_sweep,
    write_sweep,
)
from .granger import granger_pairwise
from .hilbert import EdgeTrim, analytic_signal, mean_frequency, mean_phase
from .signal import read_csv, select_channel, write_csv
from .systems import AR_DEFAULT_BURN_IN, ar_stochastic, logistic_coupled, white_noise_pair


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _fmt():
    return argparse.ArgumentDefaultsHelpFormatter


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="master RNG seed")
    g.add_argument("--workers", type=int, default=default_workers(), help="worker processes for sweeps")
    g.add_argument("--sample-rate", type=float, default=None,
                   help="sample rate in Hz; overrides the CSV time column (None: from data, else 1)")
    g.add_argument("--out", default=None, help="output path (None: subcommand-specific default, see above)")
    return p


def _analysis_options(p: argparse.ArgumentParser, methods) -> None:
    p.add_argument("input", help="input CSV with a header row")
    p.add_argument("--col-a", default=None, help="first channel, header label or 0-based index (None: first)")
    p.add_argument("--col-b", default=None, help="second channel, header label or 0-based index (None: second)")
    p.add_argument("--method", choices=methods, default="na-memd", help="decomposition or test method")
    p.add_argument("--noise-level", type=float, default=0.1, help="added noise std as a multiple of the data std")
    p.add_argument("--noise-channels", type=int, default=2, help="number of white-noise channels")
    p.add_argument("--directions", type=int, default=64, help="Hammersley direction count")
    p.add_argument("--ensemble-size", type=int, default=100, help="EEMD ensemble size")
    p.add_argument("--max-imfs", type=int, default=None, help="cap on the IMF count (None: no cap)")
    p.add_argument("--sift-iterations", type=int, default=15, help="maximum sifting iterations per IMF")
    p.add_argument("--sift-tolerance", type=float, default=0.2, help="SD stopping threshold for sifting")
    p.add_argument("--gamma", type=float, default=1.0, help="phase-ratio reference")
    p.add_argument("--delta", type=float, default=0.1, help="phase-ratio tolerance")
    p.add_argument("--trim", type=float, default=0.05, help="edge fraction excluded from time averages")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="nacausal", description="Noise-assisted causal decomposition of paired time series.",
                     formatter_class=_fmt())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common], formatter_class=_fmt(),
                       help="generate a benchmark pair as CSV",
                       description="Generate a benchmark pair. --out is a CSV file (default: <kind>.csv).")
    p.add_argument("kind", choices=("logistic", "ar", "noise"), help="system to generate")
    p.add_argument("--n", type=int, default=None, help="number of samples (None: 80 logistic, 100 ar, 300 noise)")
    p.add_argument("--burn-in", type=int, default=None,
                   help=f"samples discarded before recording (None: 0 logistic, {AR_DEFAULT_BURN_IN} ar)")
    p.add_argument("--with-time", action="store_true", help="write a leading time column")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decompose", parents=[common], formatter_class=_fmt(),
                       help="decompose two channels into aligned IMFs",
                       description="Decompose two channels. --out is a directory (default: decomposition) "
                                   "receiving decomposition.csv and diagnostics.json.")
    _analysis_options(p, ("na-memd", "eemd"))
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("causality", parents=[common], formatter_class=_fmt(),
                       help="causal strengths between two channels as JSON",
                       description="Causal analysis of two channels. --out is a JSON file (default: stdout).")
    _analysis_options(p, ("na-memd", "eemd", "granger"))
    p.add_argument("--window", type=int, default=None, help="window length for windowed analysis (None: whole record)")
    p.add_argument("--per-imf", action="store_true", help="also compute strengths for every scale")
    p.add_argument("--max-order", type=int, default=None, help="Granger maximum lag order (None: min(20, (n-11)//3))")
    p.set_defaults(func=cmd_causality)

    p = sub.add_parser("experiment", parents=[common], formatter_class=_fmt(),
                       help="run a robustness sweep",
                       description="Run a sweep. --out is a directory (default: experiment-<sweep>) receiving "
                                   "results.csv, summary.csv, manifest.json and timings.csv.")
    p.add_argument("sweep", choices=("downsample", "shift", "length", "noise-level"), help="sweep to run")
    p.add_argument("--reps", type=int, default=20, help="repetitions per sweep point")
    p.add_argument("--range", type=int, default=None, dest="range_",
                   help="factor range 1..R for downsample, shifts -R..R for shift (None: 10 and 20)")
    p.add_argument("--systems", default="logistic,ar", help="comma-separated systems for downsample/shift")
    p.add_argument("--methods", default="na-memd,eemd,granger", help="comma-separated methods")
    p.add_argument("--lengths", default=",".join(map(str, DEFAULT_LENGTHS)), help="comma-separated lengths")
    p.add_argument("--levels", default=",".join(map(str, DEFAULT_LAMBDAS)), help="comma-separated noise levels")
    p.add_argument("--input", default=None, help="CSV with a user pair, added as system 'user' (None: none)")
    p.add_argument("--directions", type=int, default=64, help="Hammersley direction count")
    p.add_argument("--ensemble-size", type=int, default=100, help="EEMD ensemble size")
    p.add_argument("--noise-level", type=float, default=0.1, help="noise level for decomposition methods")
    p.set_defaults(func=cmd_experiment)
    return parser


# --- helpers ---------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _dump(doc, out) -> None:
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _causal_config(args) -> CausalConfig:
    return CausalConfig(
        method=args.method if args.method != "granger" else "na-memd",
        noise=NoiseConfig(args.noise_channels, args.noise_level, args.seed),
        n_directions=args.directions,
        emd=EmdConfig(args.sift_iterations, args.sift_tolerance, args.max_imfs),
        selection=PairSelectionConfig(args.gamma, args.delta, EdgeTrim(args.trim)),
        ensemble_size=args.ensemble_size,
    )


def _load_pair(args):
    channels = read_csv(args.input, args.sample_rate)
    if len(channels) < 2 and (args.col_a is None or args.col_b is None):
        raise NaCausalError(f"{args.method} requires exactly 2 data channels; {args.input} has {len(channels)}")
    a = select_channel(channels, args.col_a if args.col_a is not None else "0")
    b = select_channel(channels, args.col_b if args.col_b is not None else "1")
    return a, b


# --- subcommands -----------------------------------------------------------------

def cmd_synth(args) -> int:
    n = args.n if args.n is not None else {"logistic": 80, "ar": 100, "noise": 300}[args.kind]
    rate = args.sample_rate or 1.0
    if args.kind == "logistic":
        pair = logistic_coupled(n, args.burn_in or 0, rate)
    elif args.kind == "ar":
        pair = ar_stochastic(n, args.seed, AR_DEFAULT_BURN_IN if args.burn_in is None else args.burn_in, rate)
    else:
        pair = white_noise_pair(n, args.seed, rate)
    out = args.out or f"{args.kind}.csv"
    rows = write_csv(out, pair, include_time=args.with_time)
    print(f"{out} {rows}")
    return 0


def cmd_decompose(args) -> int:
    a, b = _load_pair(args)
    cfg = _causal_config(args)
    d = decompose_pair(a, b, cfg)
    out = Path(args.out or "decomposition")
    out.mkdir(parents=True, exist_ok=True)
    write_decomposition_csv(out / "decomposition.csv", d)
    trim = cfg.selection.trim
    imfs = []
    for c in range(2):
        for k in range(d.n_imfs):
            entry = {"channel": c, "imf_index": k, "mean_phase": None, "mean_frequency": None}
            if np.any(d.imfs[c, k]):
                an = analytic_signal(d.imf(c, k))
                entry.update(mean_phase=mean_phase(an, trim), mean_frequency=mean_frequency(an, trim))
            imfs.append(entry)
    data = np.stack([a.samples, b.samples])
    doc = {
        "channels": [a.label, b.label],
        "sample_rate": a.sample_rate,
        "n_imfs": d.n_imfs,
        "imfs": imfs,
        "orthogonality": [orthogonality_index(d, c) for c in range(2)],
        "separability": [separability_index(d, c) for c in range(2)] if d.n_imfs >= 2 else None,
        "reconstruction_max_error": float(np.max(np.abs(d.imfs.sum(axis=1) + d.residual - data))),
        "config_echo": asdict(cfg),
        "seed": args.seed,
    }
    _dump(doc, out / "diagnostics.json")
    print(f"{out / 'decomposition.csv'} {out / 'diagnostics.json'} imfs={d.n_imfs}")
    return 0


def cmd_causality(args) -> int:
    a, b = _load_pair(args)
    if args.method == "granger":
        g = granger_pairwise(a, b, args.max_order)
        doc = dict(g.to_dict(), channels=[a.label, b.label], config_echo={"max_order": args.max_order},
                   seed=args.seed)
    else:
        cfg = _causal_config(args)
        if args.window is not None:
            doc = windowed_causality(a, b, args.window, cfg).to_dict()
            doc.update(config_echo=asdict(cfg), seed=args.seed)
        else:
            doc = causal_decompose(a, b, cfg, per_imf=args.per_imf).to_dict()
        doc["channels"] = [a.label, b.label]
    _dump(doc, args.out)
    return 0


def _split(text, cast=str):
    return tuple(cast(v.strip()) for v in text.split(",") if v.strip())


def cmd_experiment(args) -> int:
    causal = CausalConfig(noise=NoiseConfig(noise_level=args.noise_level), n_directions=args.directions,
                          ensemble_size=args.ensemble_size)
    out = Path(args.out or f"experiment-{args.sweep}")
    if args.sweep == "noise-level":
        pair = None
        if args.input:
            ch = read_csv(args.input, args.sample_rate)
            if len(ch) < 2:
                raise NaCausalError(f"noise-level sweep requires exactly 2 data channels; {args.input} has {len(ch)}")
            pair = (ch[0], ch[1])
        result = noise_level_sweep(pair, _split(args.levels, float), args.seed, causal)
        write_noise_sweep(result, out)
        print("noise_level,score")
        for lv, s in sorted(result["scores"].items()):
            print(f"{lv:g},{s:.6g}")
        print(f"best_level={result['best_level']}")
        return 0

    systems = _split(args.systems)
    user = None
    if args.input:
        ch = read_csv(args.input, args.sample_rate)
        if len(ch) < 2:
            raise NaCausalError(f"user pair requires exactly 2 data channels; {args.input} has {len(ch)}")
        user = (ch[0], ch[1])
        systems = systems + ("user",)
    config = SweepConfig(systems=systems, methods=_split(args.methods), repetitions=args.reps,
                         master_seed=args.seed, causal=causal, sample_rate=args.sample_rate or 1.0,
                         workers=args.workers)
    if args.sweep == "downsample":
        result = downsample_sweep(config, range(1, (args.range_ or 10) + 1), user=user)
    elif args.sweep == "shift":
        r = 20 if args.range_ is None else args.range_
        result = shift_sweep(config, range(-r, r + 1), user=user)
    else:
        result = length_sweep(config, _split(args.lengths, int))
    write_sweep(result, out)
    print("system,method,value,n_ok,n_error,mean_C_u1_to_u2,std_C_u1_to_u2,detection_rate_x_to_y,detection_rate_y_to_x")
    for s in result.summary:
        cells = [s["system"], s["method"], s["value"], s["n_ok"], s["n_error"], s["mean_C_u1_to_u2"],
                 s["std_C_u1_to_u2"], s["detection_rate_x_to_y"], s["detection_rate_y_to_x"]]
        print(",".join(f"{c:.4f}" if isinstance(c, float) else str(c) for c in cells))
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NaCausalError, OSError, ValueError, ArithmeticError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"nacausal {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
