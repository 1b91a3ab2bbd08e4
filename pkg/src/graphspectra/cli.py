"""Command-line interface.

Subcommands: sample, eig, esd, limit, oracle, exp, replay, report.
Exit codes: 0 success, 2 config error, 3 precondition error,
4 numeric error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .ensemble import EnsembleConfig, EntryLaw, build_laplacian, sample_adjacency
from .errors import GraphSpectraError
from .lab import (EXPERIMENT_DOC, ExperimentConfig, emit_histogram,
                  replay, run_experiment)
from .limit_laws import semicircle_grid, semicircle_normal_density
from .spectra import (eigenvalues_sym, normalize_adjacency_spectrum,
                      normalize_laplacian_spectrum)


def _law_from_args(args) -> EntryLaw:
    kind = args.law
    if kind == "bernoulli":
        return EntryLaw.bernoulli(args.p)
    if kind == "centered_bernoulli":
        return EntryLaw.centered_bernoulli(args.p)
    if kind == "sign_sparse":
        return EntryLaw.sign_sparse(args.p)
    if kind == "gaussian":
        return EntryLaw.gaussian(args.mu, args.sigma)
    if kind == "rademacher":
        return EntryLaw.rademacher()
    raise SystemExit(2)


def _add_law_flags(parser) -> None:
    parser.add_argument("--law", default="rademacher",
                        choices=["bernoulli", "centered_bernoulli",
                                 "sign_sparse", "gaussian", "rademacher"])
    parser.add_argument("--p", type=float, default=0.5,
                        help="probability parameter for bernoulli-family laws")
    parser.add_argument("--mu", type=float, default=0.0,
                        help="gaussian mean")
    parser.add_argument("--sigma", type=float, default=1.0,
                        help="gaussian standard deviation")


def _sample_matrix(args):
    cfg = EnsembleConfig(n=args.n, law=_law_from_args(args),
                         master_seed=args.seed, trial_index=args.trial)
    adj = sample_adjacency(cfg)
    return build_laplacian(adj) if args.laplacian else adj


def cmd_sample(args) -> int:
    matrix = _sample_matrix(args)
    np.savetxt(args.out, matrix.array, delimiter=",")
    print(f"wrote {matrix.kind} matrix n={matrix.n} to {args.out}")
    return 0


def cmd_eig(args) -> int:
    spectrum = eigenvalues_sym(_sample_matrix(args))
    np.savetxt(args.out, spectrum.eigenvalues, delimiter=",",
               header="eigenvalue (descending)")
    print(f"wrote {spectrum.n} eigenvalues to {args.out}")
    return 0


def cmd_esd(args) -> int:
    law = _law_from_args(args)
    matrix = _sample_matrix(args)
    spectrum = eigenvalues_sym(matrix)
    if args.laplacian:
        esd = normalize_laplacian_spectrum(spectrum, args.n, law.mean, law.sd)
    else:
        esd = normalize_adjacency_spectrum(spectrum, args.n, law.mean, law.sd)
    emit_histogram(esd, args.bins, args.out)
    print(f"wrote {args.bins}-bin histogram to {args.out}")
    if args.png:
        from .report import overlay_for, render_histogram
        overlay = overlay_for("laplacian" if args.laplacian else "adjacency")
        render_histogram(args.out, args.png, overlay=overlay)
        print(f"wrote figure to {args.png}")
    return 0


def cmd_limit(args) -> int:
    if args.family == "semicircle":
        grid = semicircle_grid(args.x_min, args.x_max, args.step)
    else:
        grid = semicircle_normal_density(args.x_min, args.x_max, args.step)
    grid.to_csv(args.out)
    print(f"wrote {args.family} grid ({grid.x.size} points) to {args.out}")
    if args.png:
        from .report import render_grid
        render_grid(args.out, args.png, title=args.family)
        print(f"wrote figure to {args.png}")
    return 0


def cmd_oracle(args) -> int:
    from .circuits import circuit_summary
    law = _law_from_args(args)
    summary = circuit_summary(args.n, args.r, law.moment_profile(args.r))
    print(f"n={summary['n']} r={summary['r']}")
    print(f"circuits:            {summary['circuit_count']}")
    print(f"vertex-matched:      {summary['vertex_matched_count']}")
    print(f"with order-3 match:  {summary['order3_match_count']}")
    print(f"E tr(L^r):           {summary['expected_trace_moment']}")
    return 0


def cmd_exp(args) -> int:
    with open(args.config) as fh:
        payload = json.load(fh)
    if args.trials is not None:
        payload["trials"] = args.trials
    if args.seed is not None:
        payload["master_seed"] = args.seed
    config = ExperimentConfig.from_dict(payload)
    record = run_experiment(config, workers=args.workers)
    out = args.out or f"{config.name}.json"
    record.save(out)
    print(f"experiment {config.name}: {len(record.rows)} rows, "
          f"{record.wall_time_s:.1f}s -> {out}")
    for flag in record.flags:
        print(f"flag: {flag}")
    for stat, by_n in record.summary.items():
        if not isinstance(by_n, dict):
            continue
        for n, agg in by_n.items():
            if isinstance(agg, dict) and "median" in agg:
                print(f"  {stat} n={n}: median={agg['median']:.6g} "
                      f"mean={agg['mean']:.6g} sd={agg['sd']:.3g}")
            else:
                print(f"  {stat} {n}: {agg}")
    return 0


def cmd_replay(args) -> int:
    report = replay(args.record)
    if report.version_warning:
        print(f"warning: {report.version_warning}")
    if report.matches:
        print(f"replay OK: {report.rows_compared} rows identical")
        return 0
    print(f"replay DIVERGED after {report.rows_compared} rows: "
          f"{report.divergence}")
    return 1


def cmd_report(args) -> int:
    from .report import render_record
    paths = render_record(args.record, args.out_dir)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _experiment_help() -> str:
    lines = ["experiment names and their statistics:"]
    for name, doc in EXPERIMENT_DOC.items():
        lines.append(f"  {name}:")
        lines.append(f"      {doc}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphspectra",
        description="spectral laboratory for random-graph matrices",
        epilog=_experiment_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, laplacian_flag=True):
        p.add_argument("--n", type=int, default=200)
        _add_law_flags(p)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--trial", type=int, default=0)
        if laplacian_flag:
            p.add_argument("--laplacian", action="store_true",
                           help="use the Laplacian instead of the adjacency matrix")

    p = sub.add_parser("sample", help="sample a matrix and write it as CSV")
    common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("eig", help="sample a matrix and write its spectrum")
    common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_eig)

    p = sub.add_parser("esd", help="write a normalized-ESD histogram CSV")
    common(p)
    p.add_argument("--bins", type=int, default=61)
    p.add_argument("--out", required=True)
    p.add_argument("--png", default=None,
                   help="also render the histogram with its limit-law overlay")
    p.set_defaults(fn=cmd_esd)

    p = sub.add_parser("limit", help="write a limit-law grid (x, pdf, cdf) CSV")
    p.add_argument("--family", default="semicircle",
                   choices=["semicircle", "semicircle-normal"])
    p.add_argument("--x-min", type=float, default=-8.0)
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.add_argument("--png", default=None)
    p.set_defaults(fn=cmd_limit)

    p = sub.add_parser("oracle", help="exact circuit-expansion trace moments")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--r", type=int, default=4)
    _add_law_flags(p)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("exp", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trials", type=int, default=None,
                   help="override the config's trial count")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's master seed")
    p.set_defaults(fn=cmd_exp)

    p = sub.add_parser("replay", help="re-run a record and verify bit-for-bit")
    p.add_argument("--record", required=True)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("report", help="render figures from an experiment record")
    p.add_argument("--record", required=True)
    p.add_argument("--out-dir", default="figures")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GraphSpectraError as err:
        print(f"error: {err}", file=sys.stderr)
        return getattr(err, "exit_code", 2)
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
