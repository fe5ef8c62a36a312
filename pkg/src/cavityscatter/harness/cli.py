"""Command-line front end.

Subcommands: analytic, dg, compare, ricker, mesh.
Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
4 acceptance-threshold failure (compare --assert).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..dg.leapfrog import StabilityError
from . import compare as cmp
from . import io as hio
from . import run as runners
from .config import ConfigError, RunConfig, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_THRESHOLD = 4


def make_parser():
    p = argparse.ArgumentParser(
        prog="cavityscatter",
        description="Plane P-wave scattering by a spherical acoustic cavity: "
                    "analytic modal solver, DG spectral-element solver and "
                    "comparison harness.")
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analytic", help="frequency-sweep synthesis on the profiles")
    pdg = sub.add_parser("dg", help="full DG pipeline (mesh, assembly, leap-frog)")
    pdg.add_argument("--no-snapshots", action="store_true")
    pdg.add_argument("--progress", type=int, default=0,
                     help="print progress every N steps")
    pc = sub.add_parser("compare", help="misfit metrics between two seismogram CSVs")
    pc.add_argument("reference")
    pc.add_argument("test")
    pc.add_argument("--report", default=None)
    pc.add_argument("--window", default=None,
                    help="t_lo,t_hi comparison window (seconds)")
    pc.add_argument("--assert", dest="assert_max", type=float, default=None,
                    help="fail (exit 4) if any receiver rel-L2 exceeds this")
    sub.add_parser("ricker", help="wavelet and spectrum CSV")
    pm = sub.add_parser("mesh", help="build and export the run mesh")
    pm.add_argument("--vtk", action="store_true")
    return p


def _load(args):
    if args.config:
        return load_config(args.config)
    return RunConfig()


def cmd_compare(args):
    t_ref, ref, ids = hio.read_seismogram_csv(args.reference)
    t_test, test, _ = hio.read_seismogram_csv(args.test)
    if ref.shape[0] != test.shape[0]:
        print("error: receiver counts differ", file=sys.stderr)
        return EXIT_CONFIG
    # resample the test set onto the reference grid over the overlap
    t_hi = min(t_ref[-1], t_test[-1])
    mask = t_ref <= t_hi + 1e-12
    tr = t_ref[mask]
    resampled = np.stack([np.interp(tr, t_test, test[i]) for i in range(test.shape[0])])
    window = None
    if args.window:
        lo, hi = (float(v) for v in args.window.split(","))
        window = (lo, hi)
    report = cmp.compare_seismograms(ref[:, mask], resampled,
                                     dt=tr[1] - tr[0], window=window,
                                     receiver_ids=ids)
    out = args.report or (args.test.rsplit(".", 1)[0] + "_misfit.csv")
    cmp.write_misfit_csv(report, out)
    s = report.summary()
    print(f"median rel L2 {s['median_rel_l2']:.4f}, max {s['max_rel_l2']:.4f}, "
          f"median amp ratio {s['median_amp_ratio']:.4f}, "
          f"max |lag| {s['max_abs_lag']:.4e} s -> {out}")
    if args.assert_max is not None and s["max_rel_l2"] > args.assert_max:
        print(f"threshold failure: max rel L2 {s['max_rel_l2']:.4f} > "
              f"{args.assert_max}", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        if args.command == "compare":
            return cmd_compare(args)
        cfg = _load(args)
        if args.command == "analytic":
            outputs, _ = runners.cmd_analytic(cfg, args.out, threads=args.threads,
                                              verbose=args.verbose)
            print("\n".join(f"{k}: {v}" for k, v in outputs.items()))
        elif args.command == "dg":
            outputs, diag = runners.cmd_dg(cfg, args.out, verbose=args.verbose,
                                           snapshots=not args.no_snapshots,
                                           progress_every=args.progress)
            print("\n".join(f"{k}: {v}" for k, v in outputs.items()))
            print(f"dt = {diag['dt']:.4e}, {diag['n_steps']} steps, "
                  f"{diag['wall']:.1f} s wall")
        elif args.command == "ricker":
            outputs = runners.cmd_ricker(cfg, args.out)
            print("\n".join(f"{k}: {v}" for k, v in outputs.items()))
        elif args.command == "mesh":
            info = runners.cmd_mesh(cfg, args.out, vtk=args.vtk)
            print(f"mesh: {info['n_elements']} elements, hash {info['hash']}")
            print(f"face sets: {info['face_sets']}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StabilityError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
