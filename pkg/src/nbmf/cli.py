"""Command-line entry point.

Subcommands: ``factorize`` runs the alternating solver and writes the
factors; ``benchmark`` runs the cumulative time-to-targets campaign;
``render`` produces feature-grid and reconstruction images; ``metrics``
prints comparison statistics against an NMF baseline.

Exit codes: 0 success, 2 usage or validation problems, 1 internal errors.
All randomness flows from ``--seed``; repeated runs rewrite byte-identical
artifacts except for recorded wall times.  Progress goes to stderr; the
only stdout output is the machine-readable summary of ``benchmark`` and
``metrics``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import io as nio
from .als import nbmf, nmf_baseline
from .bench import BenchConfig, run_campaign
from .core import FactorizationConfig, NbmfError, ValidationError, seeded_rng
from .metrics import default_zero_tol, error_ratio, sparsity, storage_report
from .samplers import SamplerBudget, SamplerSpec

K_GUARD = 35  # beyond the 35 logical variables studied on real hardware


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def _thread_cap() -> int:
    """NBMF_THREADS caps worker parallelism (0 = auto).  The current
    implementation runs column solves on one worker, which satisfies any
    cap; the variable is still validated so misconfiguration is caught."""
    raw = os.environ.get("NBMF_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"NBMF_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValidationError("NBMF_THREADS must be >= 0")
    return value


def _load_input(path: str, require_nonnegative: bool = True):
    """CSV file or directory of PGM images -> (matrix, image shape or None)."""
    if os.path.isdir(path):
        dataset = nio.load_pgm_directory(path)
        return dataset.matrix, (dataset.image_width, dataset.image_height)
    if not os.path.exists(path):
        raise ValidationError(f"input path {path} does not exist")
    return nio.load_csv_matrix(path, require_nonnegative=require_nonnegative), None


def _sampler_spec(name: str, reads: int, sweeps: int) -> SamplerSpec:
    return SamplerSpec(name, SamplerBudget(num_reads=reads, sweeps_per_read=sweeps))


def _factorization_config(args) -> FactorizationConfig:
    return FactorizationConfig(
        k=args.k,
        alpha=args.alpha,
        max_outer_iters=args.max_iters,
        rel_tol=args.rel_tol,
        seed=args.seed,
        sampler=_sampler_spec(args.sampler, args.reads, args.sweeps),
    )


def _write_factorization(out_dir: str, result, logs) -> None:
    os.makedirs(out_dir, exist_ok=True)
    nio.write_csv_matrix(result.W, os.path.join(out_dir, "W.csv"))
    nio.write_csv_matrix(result.H.astype(np.float64), os.path.join(out_dir, "H.csv"))
    with open(os.path.join(out_dir, "objective.csv"), "w", encoding="ascii") as fh:
        for value in result.objective_history:
            fh.write(repr(float(value)) + "\n")
    with open(os.path.join(out_dir, "solves.tsv"), "w", encoding="ascii") as fh:
        fh.write("#nbmf-solves v1\n")
        for log in logs:
            fh.write("\t".join((
                str(log.outer_iter),
                str(log.column_index),
                log.qubo_digest,
                repr(float(log.target_energy)),
                str(log.samples_used),
                "".join(str(int(b)) for b in log.bits),
                repr(float(log.wall_time_us)),   # timing column, last on purpose
            )) + "\n")


def cmd_factorize(args) -> int:
    _thread_cap()
    V, _ = _load_input(args.input)
    if args.k > K_GUARD:
        _progress(f"warning: k={args.k} exceeds the {K_GUARD}-variable "
                  "clique studied on hardware; embeddings would degrade")
    cfg = _factorization_config(args)
    _progress(f"factorizing {V.shape[0]}x{V.shape[1]} matrix at k={args.k} "
              f"with {args.sampler}")
    result, logs = nbmf(V, cfg)
    _write_factorization(args.out, result, logs)
    _progress(f"done in {result.outer_iters} outer iterations, "
              f"residual {result.objective_history[-1]:.6g}, "
              f"{result.qubo_solves} column solves -> {args.out}")
    return 0


def cmd_benchmark(args) -> int:
    _thread_cap()
    V, _ = _load_input(args.input)
    cfg = _factorization_config(args)
    challenger_names = [c for c in args.challengers.split(",") if c]
    if not challenger_names:
        raise ValidationError("at least one challenger is required")
    bench = BenchConfig(
        reference=_sampler_spec(args.reference, args.reads, args.sweeps),
        challengers=tuple(
            _sampler_spec(name, args.reads, args.sweeps) for name in challenger_names),
        cap_s=args.cap_s,
        anneal_counts=tuple(int(c) for c in args.anneal_counts.split(",")),
        per_read_us=args.per_read_us,
    )
    _progress(f"benchmark campaign: counts {bench.anneal_counts}, "
              f"reference {args.reference}, challengers {challenger_names}")
    records, summary = run_campaign(V, cfg, bench)
    os.makedirs(args.out, exist_ok=True)
    nio.write_records(records, os.path.join(args.out, "records.tsv"))
    summary_text = json.dumps(summary, indent=2, sort_keys=True)
    with open(os.path.join(args.out, "summary.json"), "w", encoding="ascii") as fh:
        fh.write(summary_text + "\n")
    print(summary_text)
    return 0


def cmd_render(args) -> int:
    W = nio.load_csv_matrix(args.w)
    os.makedirs(args.out, exist_ok=True)
    for mode in ("absolute", "rescaled"):
        pixels, meta = nio.render_feature_grid(
            W, args.image_width, args.image_height, args.grid_cols, contrast=mode)
        out = os.path.join(args.out, f"features_{mode}.pgm")
        comment = f"contrast={mode} scale={meta['scale']}"
        nio.write_pgm(pixels, out, comment=comment)
        _progress(f"wrote {out} ({pixels.shape[1]}x{pixels.shape[0]})")
    if args.input and args.h is not None:
        V, _ = _load_input(args.input, require_nonnegative=False)
        H = nio.load_csv_matrix(args.h)
        col = args.column
        if not 0 <= col < V.shape[1]:
            raise ValidationError(
                f"--column {col} out of range for {V.shape[1]} columns")
        original, recon, selected = nio.render_reconstruction(
            V[:, col], W, H[:, col], args.image_width, args.image_height)
        nio.write_pgm(original, os.path.join(args.out, f"original_{col}.pgm"))
        nio.write_pgm(recon, os.path.join(args.out, f"reconstruction_{col}.pgm"))
        with open(os.path.join(args.out, f"selected_{col}.json"), "w",
                  encoding="ascii") as fh:
            json.dump({"column": col, "selected_features": selected}, fh)
            fh.write("\n")
        _progress(f"reconstruction of column {col} uses features {selected}")
    return 0


def cmd_metrics(args) -> int:
    V, _ = _load_input(args.input)
    W = nio.load_csv_matrix(args.w)
    H = nio.load_csv_matrix(args.h)
    k = H.shape[0]
    rng = seeded_rng(args.seed)
    _progress(f"fitting NMF baseline at k={k} for {args.nmf_iters} iterations")
    W_nmf, H_nmf = nmf_baseline(V, k, args.nmf_iters, rng)
    residual_binary = float(np.linalg.norm(V - W @ H, "fro"))
    residual_nmf = float(np.linalg.norm(V - W_nmf @ H_nmf, "fro"))
    report = storage_report(W, H, float_bits=args.float_bits)
    nmf_h_tol = default_zero_tol(H_nmf)
    nmf_w_tol = default_zero_tol(W_nmf)
    payload = {
        "binary_factorization": {
            "residual": residual_binary,
            "h_sparsity": sparsity(H),
            "w_sparsity": sparsity(W, default_zero_tol(W)),
        },
        "nmf_baseline": {
            "residual": residual_nmf,
            "iterations": args.nmf_iters,
            "h_sparsity": sparsity(H_nmf, nmf_h_tol),
            "h_zero_tol": nmf_h_tol,
            "w_sparsity": sparsity(W_nmf, nmf_w_tol),
            "w_zero_tol": nmf_w_tol,
        },
        "error_ratio_nmf_vs_binary": error_ratio(V, W_nmf, H_nmf, W, H),
        "storage": {
            "binary_h_bits": report.binary_h_bits,
            "float_h_bits": report.float_h_bits,
            "w_bits": report.w_bits,
            "ratio": report.ratio,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbmf",
        description="Nonnegative/binary matrix factorization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_factorize_flags(p):
        p.add_argument("--input", required=True,
                       help="CSV matrix file or directory of PGM images")
        p.add_argument("--k", type=int, required=True, help="number of features")
        p.add_argument("--alpha", type=float, default=0.01,
                       help="ridge weight on W (default 0.01)")
        p.add_argument("--sampler", choices=("exhaustive", "sa", "tabu"),
                       default="sa")
        p.add_argument("--reads", type=int, default=10,
                       help="reads (anneals) per column solve")
        p.add_argument("--sweeps", type=int, default=50,
                       help="sweeps per annealing read")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-iters", type=int, default=50, dest="max_iters")
        p.add_argument("--rel-tol", type=float, default=1e-4, dest="rel_tol")

    p_fact = sub.add_parser("factorize", help="run the alternating solver")
    add_factorize_flags(p_fact)
    p_fact.add_argument("--out", required=True, help="output directory")
    p_fact.set_defaults(func=cmd_factorize)

    p_bench = sub.add_parser("benchmark", help="cumulative time-to-targets benchmark")
    add_factorize_flags(p_bench)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--anneal-counts", default="10,100,1000,10000",
                         dest="anneal_counts",
                         help="comma-separated reference read counts")
    p_bench.add_argument("--per-read-us", type=float, default=200.0,
                         dest="per_read_us",
                         help="modeled time per reference read, microseconds")
    p_bench.add_argument("--cap-s", type=float, default=10.0, dest="cap_s",
                         help="per-instance challenger time cap, seconds")
    p_bench.add_argument("--reference", choices=("exhaustive", "sa", "tabu"),
                         default="sa")
    p_bench.add_argument("--challengers", default="tabu,exhaustive",
                         help="comma-separated challenger samplers")
    p_bench.set_defaults(func=cmd_benchmark)

    p_render = sub.add_parser("render", help="render features and reconstructions")
    p_render.add_argument("--w", required=True, help="W.csv from factorize")
    p_render.add_argument("--image-width", type=int, required=True,
                          dest="image_width")
    p_render.add_argument("--image-height", type=int, required=True,
                          dest="image_height")
    p_render.add_argument("--grid-cols", type=int, default=5, dest="grid_cols")
    p_render.add_argument("--input", help="original data (for a reconstruction)")
    p_render.add_argument("--h", help="H.csv from factorize")
    p_render.add_argument("--column", type=int, default=0,
                          help="which data column to reconstruct")
    p_render.add_argument("--out", required=True)
    p_render.set_defaults(func=cmd_render)

    p_metrics = sub.add_parser("metrics", help="sparsity/error/storage statistics")
    p_metrics.add_argument("--input", required=True)
    p_metrics.add_argument("--w", required=True)
    p_metrics.add_argument("--h", required=True)
    p_metrics.add_argument("--nmf-iters", type=int, default=300, dest="nmf_iters")
    p_metrics.add_argument("--seed", type=int, default=0)
    p_metrics.add_argument("--float-bits", type=int, default=64, dest="float_bits")
    p_metrics.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NbmfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
