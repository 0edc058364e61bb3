"""Command line interface: ``cdnf synth | run | eval | sweep``.

Model parameters come from built-in defaults, then an optional flat
``key=value`` config file (``--config``), then command-line flags.  The
default output directory is ``$CDNF_OUTPUT_DIR`` or ``./cdnf_out``.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .evaluation import read_labels, score_dataset, write_report
from .exceptions import ParameterError
from .field import SolverSettings
from .formats import load_frames, read_config, read_trace_csv, save_frames, write_json, write_trace_csv
from .model import ModelParams, run_sequence
from .stimuli import RainParams, StimulusSpec, add_rain, compute_snr, make_stimulus

log = logging.getLogger("cdnf")

OUTPUT_ENV = "CDNF_OUTPUT_DIR"

# config key -> (type, target) ; target "model", "solver", "spec", "rain"
_MODEL_KEYS = {
    "h": float, "sigma_c": float, "alpha_on": float, "alpha_off": float,
    "sigma1": float, "dog_radius": int, "epsilon": float, "integration_gate": str,
}
_SOLVER_KEYS = {"tol": float, "max_iters": int, "warm_start": "bool"}
_SPEC_KEYS = {
    "kind": str, "polarity": str, "res": "res", "frames": int, "fps": float,
    "size_start": float, "size_end": float, "expansion": str, "bar_width": int, "seed": int,
}
_RAIN_KEYS = {
    "droplets": int, "drop_length": int, "drop_width": int, "angle_jitter": float,
    "rain_gray": float, "rain_blur": float, "rain_weight": float, "rain_seed": int,
}
_RAIN_FIELDS = {
    "droplets": "droplets_per_frame", "drop_length": "length_px", "drop_width": "width_px",
    "angle_jitter": "angle_jitter", "rain_gray": "gray_value", "rain_blur": "blur_sigma",
    "rain_weight": "blend_weight", "rain_seed": "seed",
}


def _to_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    val = str(text).strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {text!r}")


def parse_resolution(text: str):
    try:
        rows, cols = (int(v) for v in str(text).lower().split("x"))
    except ValueError:
        raise ParameterError(f"resolution must look like 200x200, got {text!r}") from None
    return rows, cols


def _convert(kind, value):
    if kind == "bool":
        return _to_bool(value)
    if kind == "res":
        return parse_resolution(value) if isinstance(value, str) else tuple(value)
    return kind(value)


def _settings(args, keys: Dict[str, object]) -> Dict[str, object]:
    """Merge config-file values and explicit flags for ``keys``."""
    merged = {}
    config = getattr(args, "config_values", {})
    for key, kind in keys.items():
        if key in config:
            merged[key] = _convert(kind, config[key])
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = _convert(kind, flag)
    return merged


def model_params(args) -> ModelParams:
    model = _settings(args, _MODEL_KEYS)
    solver = _settings(args, _SOLVER_KEYS)
    return ModelParams(solver=SolverSettings(**solver), **model)


def stimulus_spec(args, **overrides) -> StimulusSpec:
    vals = _settings(args, _SPEC_KEYS)
    vals.update(overrides)
    mapping = {"res": "resolution", "frames": "duration"}
    return StimulusSpec(**{mapping.get(k, k): v for k, v in vals.items()})


def rain_params(args) -> RainParams:
    vals = _settings(args, _RAIN_KEYS)
    return RainParams(**{_RAIN_FIELDS[k]: v for k, v in vals.items()})


def output_dir(args) -> Path:
    out = args.out or os.environ.get(OUTPUT_ENV) or "cdnf_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# --------------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    spec = stimulus_spec(args)
    seq = make_stimulus(spec, args.coherence, seed=spec.seed)
    meta = dict(seq.meta)
    if args.rain:
        clean = seq
        seq = add_rain(clean, rain_params(args))
        meta = dict(seq.meta)
        meta["snr_db"] = compute_snr(clean, seq)
    out = output_dir(args)
    save_frames(seq, out, fmt=args.format)
    meta.update(n_frames=len(seq), fps=seq.fps, format=args.format)
    write_json(meta, out / "meta.json")
    line = f"wrote {len(seq)} frames to {out}"
    if meta.get("jump_frame") is not None:
        line += f" (jumped to final layout at frame {meta['jump_frame']})"
    if "snr_db" in meta:
        line += f"; SNR {meta['snr_db']:.2f} dB"
    print(line)
    return 0


# ----------------------------------------------------------------------- run

def _summary(name, trace, params: ModelParams, wall: float) -> dict:
    return {
        "clip": name,
        "n_frames": len(trace),
        "first_spike": trace.first_spike,
        "n_spikes": int(trace.spikes.sum()),
        "max_iv": float(trace.iv.max()),
        "i_thre": params.i_thre,
        "non_converged_frames": trace.non_converged_frames,
        "wall_time_s": round(wall, 3),
    }


def cmd_run(args) -> int:
    params = model_params(args)
    frames = load_frames(args.input)
    name = args.name or Path(args.input).stem or "clip"
    start = time.perf_counter()
    trace = run_sequence(frames, params, snapshots=args.snapshots)
    wall = time.perf_counter() - start
    out = output_dir(args)
    write_trace_csv(trace, out / f"{name}.csv")
    summary = _summary(name, trace, params, wall)
    write_json(summary, out / f"{name}.summary.json")
    if args.snapshots:
        import numpy as np

        np.savez_compressed(
            out / f"{name}.snapshots.npz",
            **{f"{key}_{t:05d}": snap[key] for t, snap in enumerate(trace.snapshots) for key in snap},
        )
    first = "none" if trace.first_spike is None else trace.first_spike
    print(f"{name}: {len(trace)} frames, first_spike={first}, max I_v={summary['max_iv']:.6f}, "
          f"non-converged={summary['non_converged_frames']}, {wall:.2f}s")
    return 0


# ---------------------------------------------------------------------- eval

def cmd_eval(args) -> int:
    labels = read_labels(args.labels)
    tdir = Path(args.traces)
    traces = {}
    for lab in labels:
        path = tdir / f"{lab.clip_id}.csv"
        if not path.exists():
            raise ParameterError(f"missing trace {path} for labeled clip {lab.clip_id!r}")
        traces[lab.clip_id] = read_trace_csv(path)
    score = score_dataset(traces, labels)
    out = output_dir(args)
    write_report(score, out)
    c = score.counts
    print(f"TP={c.tp} FP={c.fp} TN={c.tn} FN={c.fn} accuracy={score.accuracy:.2f}%")
    return 0


# --------------------------------------------------------------------- sweep

def _sweep_cell(job):
    spec, degree, seed, rain, params = job
    seq = make_stimulus(spec, degree, seed=seed)
    if rain is not None:
        seq = add_rain(seq, rain)
    trace = run_sequence(seq, params)
    return {
        "kind": spec.kind,
        "polarity": spec.polarity,
        "degree": degree,
        "spike": int(trace.first_spike is not None),
        "first_spike": "" if trace.first_spike is None else trace.first_spike,
        "max_iv": repr(float(trace.iv.max())),
        "jump_frame": "" if seq.meta.get("jump_frame") is None else seq.meta["jump_frame"],
    }


def _csv_list(text: str, kind=str) -> List:
    return [kind(v) for v in str(text).split(",") if v.strip()]


def cmd_sweep(args) -> int:
    params = model_params(args)
    rain = rain_params(args) if args.rain else None
    degrees = _csv_list(args.degrees, float)
    for d in degrees:
        if not 0 < d <= 100:
            raise ParameterError(f"coherence degree must lie in (0, 100], got {d}")
    jobs = []
    for kind in _csv_list(args.kinds):
        for pol in _csv_list(args.polarities):
            spec = stimulus_spec(args, kind=kind, polarity=pol)
            for d in degrees:
                jobs.append((spec, d, spec.seed, rain, params))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]
    out = output_dir(args)
    path = out / "sweep.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        first = r["first_spike"] if r["first_spike"] != "" else "-"
        print(f"{r['kind']:<12}{r['polarity']:<7}{r['degree']:>6.1f}%  spike={r['spike']}  first={first}")
    print(f"matrix written to {path}")
    return 0


# -------------------------------------------------------------------- parser

def _add_model_flags(p):
    g = p.add_argument_group("model")
    g.add_argument("--config", help="flat key=value file; flags override its entries")
    g.add_argument("--h", type=float)
    g.add_argument("--sigma-c", dest="sigma_c", type=float)
    g.add_argument("--alpha-on", dest="alpha_on", type=float)
    g.add_argument("--alpha-off", dest="alpha_off", type=float)
    g.add_argument("--sigma1", type=float)
    g.add_argument("--dog-radius", dest="dog_radius", type=int)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--gate", dest="integration_gate", choices=("positive", "above_h"))
    g.add_argument("--tol", type=float)
    g.add_argument("--max-iters", dest="max_iters", type=int)
    g.add_argument("--cold-start", dest="warm_start", action="store_const", const=False,
                   help="start every frame's solve from zero fields")


def _add_spec_flags(p, with_kind=True):
    g = p.add_argument_group("stimulus")
    if with_kind:
        g.add_argument("--kind", choices=("looming", "receding", "translating"))
        g.add_argument("--polarity", choices=("dark", "light", "dark_on_light", "light_on_dark"))
    g.add_argument("--res", help="resolution ROWSxCOLS, e.g. 200x200")
    g.add_argument("--frames", type=int)
    g.add_argument("--fps", type=float)
    g.add_argument("--size-start", dest="size_start", type=float)
    g.add_argument("--size-end", dest="size_end", type=float)
    g.add_argument("--expansion", choices=("hyperbolic", "linear"))
    g.add_argument("--bar-width", dest="bar_width", type=int)
    g.add_argument("--seed", type=int)


def _add_rain_flags(p):
    g = p.add_argument_group("rain")
    g.add_argument("--rain", action="store_true", help="overlay synthetic rain")
    g.add_argument("--droplets", type=int)
    g.add_argument("--drop-length", dest="drop_length", type=int)
    g.add_argument("--drop-width", dest="drop_width", type=int)
    g.add_argument("--angle-jitter", dest="angle_jitter", type=float)
    g.add_argument("--rain-gray", dest="rain_gray", type=float)
    g.add_argument("--rain-blur", dest="rain_blur", type=float)
    g.add_argument("--rain-weight", dest="rain_weight", type=float)
    g.add_argument("--rain-seed", dest="rain_seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdnf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic stimulus clip")
    _add_spec_flags(p)
    _add_rain_flags(p)
    p.add_argument("--config", help="flat key=value file; flags override its entries")
    p.add_argument("--coherence", type=float, default=100.0, help="percent of object pixels kept in place")
    p.add_argument("--format", choices=("pgm", "gry8"), default="pgm")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run the model over a clip")
    p.add_argument("input", help="directory of .pgm frames or a .gry8 file")
    _add_model_flags(p)
    p.add_argument("--name", help="basename of the outputs (default: input name)")
    p.add_argument("--snapshots", action="store_true", help="also save per-frame fields (.npz)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score trace CSVs against labels")
    p.add_argument("traces", help="directory holding <clip_id>.csv traces")
    p.add_argument("labels", help="CSV with clip_id,is_collision,t_start,t_end")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="spike matrix over kinds, polarities and coherence degrees")
    _add_model_flags(p)
    _add_spec_flags(p, with_kind=False)
    _add_rain_flags(p)
    p.add_argument("--kinds", default="looming,receding,translating")
    p.add_argument("--polarities", default="dark,light")
    p.add_argument("--degrees", default="100,75,60,50,20,5")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (one clip per task)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.config_values = read_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"cdnf {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
