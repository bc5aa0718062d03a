"""Command-line entry point: ``markov-jscd --snr-start 0 --snr-stop 2 ...``.

A ``--config`` file holds flat ``key = value`` lines using the flag names
(with or without the leading dashes); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .jscd_decoder import MODES
from .sim_harness import SimConfig, run_sweep
from .source_model import CorrelationParams, MarkovParams

log = logging.getLogger("markov_jscd")

DEFAULTS = {
    "alpha": 0.1, "beta": 0.1, "p": 0.01, "n": 1024, "rate": 0.5, "lambda": "A",
    "h1": None, "h2": None, "snr_start": 0.0, "snr_stop": 0.0, "snr_step": 0.5,
    "mode": "jscd", "max_local": 50, "max_global": 15, "min_frame_errors": 100,
    "max_frames": 10_000, "seed": 0, "peg_seed": None, "out": None, "trace": False,
    "error_llr": "log", "signed_error_llr": False, "cross_input": "posterior",
    "gap_ber": 1e-4,
}
TYPES = {"alpha": float, "beta": float, "p": float, "n": int, "rate": float,
         "snr_start": float, "snr_stop": float, "snr_step": float, "max_local": int,
         "max_global": int, "min_frame_errors": int, "max_frames": int, "seed": int,
         "peg_seed": int, "gap_ber": float}
FLAGS = {"trace", "signed_error_llr"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="markov-jscd", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="key=value file; command-line flags override it")
    ap.add_argument("--alpha", type=float, help="P(0 -> 1) of the Markov source")
    ap.add_argument("--beta", type=float, help="P(1 -> 0) of the Markov source")
    ap.add_argument("--p", type=float, help="crossover probability between the two sources")
    ap.add_argument("--n", type=int, help="code length")
    ap.add_argument("--rate", type=float, help="design code rate")
    ap.add_argument("--lambda", dest="lambda_", choices=["A", "B"], help="variable degree profile")
    ap.add_argument("--h1", help="alist file for channel 1 (overrides --n/--rate)")
    ap.add_argument("--h2", help="alist file for channel 2")
    ap.add_argument("--snr-start", type=float, help="first Eso/N0 point in dB")
    ap.add_argument("--snr-stop", type=float, help="last Eso/N0 point in dB (inclusive)")
    ap.add_argument("--snr-step", type=float, help="grid step in dB")
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--max-local", type=int)
    ap.add_argument("--max-global", type=int)
    ap.add_argument("--min-frame-errors", type=int)
    ap.add_argument("--max-frames", type=int)
    ap.add_argument("--seed", type=int, help="master seed for frames (and PEG unless --peg-seed)")
    ap.add_argument("--peg-seed", type=int)
    ap.add_argument("--out", help="CSV output path (stdout if omitted)")
    ap.add_argument("--trace", action="store_true", default=None,
                    help="log per-iteration decoder diagnostics to stderr")
    ap.add_argument("--error-llr", choices=["odds", "log"], help="weight-to-reliability form")
    ap.add_argument("--signed-error-llr", action="store_true", default=None,
                    help="sign the cross reliability by the estimated error bit")
    ap.add_argument("--cross-input", choices=["posterior", "extrinsic"])
    ap.add_argument("--gap-ber", type=float, help="BER at which the gap to the limit is reported")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise SystemExit(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise SystemExit(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in FLAGS:
                out[key] = _parse_bool(val)
            elif val.lower() in ("", "none"):
                out[key] = None
            else:
                out[key] = TYPES.get(key, str)(val)
        except ValueError as exc:
            raise SystemExit(f"{path}:{lineno}: {exc}")
    return out


def snr_grid(start: float, stop: float, step: float) -> tuple:
    if step <= 0:
        raise SystemExit("--snr-step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise SystemExit("--snr-stop is below --snr-start")
    return tuple(round(start + i * step, 10) for i in range(count))


def resolve(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(read_config_file(args.config))
    for key in DEFAULTS:
        val = getattr(args, "lambda_" if key == "lambda" else key)
        if val is not None:
            settings[key] = val
    return settings


def config_from_settings(s: dict) -> SimConfig:
    return SimConfig(
        markov=MarkovParams(s["alpha"], s["beta"]), corr=CorrelationParams(s["p"]),
        n=s["n"], rate=s["rate"], lam=s["lambda"], peg_seed=s["peg_seed"],
        h1=s["h1"], h2=s["h2"], snr_db=snr_grid(s["snr_start"], s["snr_stop"], s["snr_step"]),
        mode=s["mode"], max_local=s["max_local"], max_global=s["max_global"],
        min_frame_errors=s["min_frame_errors"], max_frames=s["max_frames"], seed=s["seed"],
        out=s["out"], trace=s["trace"], error_llr_form=s["error_llr"],
        signed_error_llr=s["signed_error_llr"], cross_input=s["cross_input"],
        gap_ber=s["gap_ber"])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if (args.verbose or args.trace) else logging.WARNING)
    try:
        config = config_from_settings(resolve(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    trace_sink = None
    if config.trace:
        def trace_sink(row):
            log.debug("trace %s", " ".join(f"{k}={v}" for k, v in row.items()))
    result = run_sweep(config, trace_sink=trace_sink)
    if config.out is None:
        sys.stdout.write(result.to_csv())
    else:
        log.info("wrote %s", config.out)
    for r in result.rows:
        if r.source == "either":
            log.info("%6.2f dB %-8s frames=%d FER=%.3g BER=%.3g", r.snr_db, r.mode,
                     r.frames, r.fer, r.ber)
    return 0
