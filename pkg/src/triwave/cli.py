"""``triwave`` command line: one subcommand per experiment preset.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .experiments import CACHE_ENV, PRESETS, RUNNERS, ExperimentConfig
from .open_system import ConfigError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="triwave", description=__doc__.splitlines()[0])
    p.add_argument("preset", choices=PRESETS)
    p.add_argument("--model", type=str, default=None, help="hardware model JSON (default: bundled transmon)")
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--tau", type=float, default=None, help="dimensionless step |g| dt")
    p.add_argument("--theta", type=float, default=np.pi / 2, help="coupling phase in radians")
    p.add_argument("--s", type=float, default=2.0, help="action eigenvalue s3 (three-level s)")
    p.add_argument("--s2", type=int, default=2, help="action eigenvalue s2 (evolve preset)")
    p.add_argument("--n", type=int, default=None, help="number of repetitions / steps")
    p.add_argument("--steps", type=int, default=1000, help="classical integrator steps")
    p.add_argument("--dt", type=float, default=1e-3, help="classical integrator step")
    p.add_argument("--amplitudes", type=_floats, default=(1.0, 1e-3, 1e-3), help="classical A1,A2,A3")
    p.add_argument("--T", type=float, default=None, dest="T_ns", help="pulse duration in ns")
    p.add_argument("--slice-ns", type=float, default=0.5, help="control slice duration in ns")
    p.add_argument("--s-list", type=_floats, default=(2, 3, 4, 8, 16, 64), help="fig3 s values")
    p.add_argument("--native-error", type=float, default=None, help="fig2 per-native-gate depolarizing error")
    p.add_argument("--parallel", action="store_true", help="run sweep points concurrently")
    p.add_argument("--cache-dir", default=None, help=f"pulse cache directory (env {CACHE_ENV})")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        amps = args.amplitudes
        if len(amps) != 3:
            raise ValueError("--amplitudes needs exactly three values")
        cfg = ExperimentConfig(
            preset=args.preset,
            output_path=args.out,
            model_path=args.model,
            tau=args.tau,
            theta=args.theta,
            s=args.s,
            s2=args.s2,
            N=args.n,
            steps=args.steps,
            dt=args.dt,
            T_ns=args.T_ns,
            slice_ns=args.slice_ns,
            s_list=args.s_list,
            amplitudes=tuple(amps),
            native_error=args.native_error,
            parallel=args.parallel,
            cache_dir=args.cache_dir,
            use_cache=not args.no_cache,
        )
        out = RUNNERS[args.preset](cfg)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"triwave: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"triwave: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
