"""Command-line surface: cluster, evaluate, benchmark and mvec.

Exit codes: 0 ok, 2 input error (missing or malformed files), 3 parameter or
protocol error, 4 runtime failure inside an mvec run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import report as rpt
from .bench import ALGORITHMS, run_benchmark, run_mvec
from .cluster import (
    AgglomerativeConfig,
    KMeansConfig,
    agglomerate_features,
    kmeans_fit,
)
from .core import (
    FeatureIOError,
    ManifestError,
    l2_normalize,
    load_features,
    load_manifest,
)
from .ensemble import MvecConfig
from .metrics import NMI_NORMALIZATIONS, nmi, purity

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PARAM = 3
EXIT_RUNTIME = 4


class _Parser(argparse.ArgumentParser):
    # usage errors are parameter errors (exit 3), not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed")
    common.add_argument("--nmi-norm", choices=NMI_NORMALIZATIONS, default="geometric",
                        help="NMI normalization (default geometric)")
    common.add_argument("--linkage", choices=("ward", "average", "complete"),
                        default="ward", help="agglomerative linkage over features")
    common.add_argument("--normalize-features", action="store_true",
                        help="L2-normalize feature rows before clustering")
    common.add_argument("--per-problem", metavar="PATH", default=None,
                        help="write per-problem benchmark scores to PATH")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvclust", description=__doc__)
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", parents=[common], help="cluster a feature file")
    p.add_argument("features", help="FVEC or CSV feature file")
    p.add_argument("-k", "--clusters", type=int, required=True)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="agglomerative")
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--out", default=None, help="labels file (default <features>.labels)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", parents=[common], help="score labels against truth")
    p.add_argument("labels")
    p.add_argument("truth")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", parents=[common],
                       help="per-condition robustness protocol over sampled problems")
    p.add_argument("manifest")
    p.add_argument("--conditions", default=None,
                   help="comma-separated condition tags (default: all declared)")
    p.add_argument("--algorithms", default="agglomerative,kmeans")
    p.add_argument("--n-problems", type=int, default=1000)
    p.add_argument("--km-repeats", type=int, default=10)
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="reports")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("mvec", parents=[common],
                       help="multi-view consensus over one condition")
    p.add_argument("manifest")
    p.add_argument("--condition", default=None,
                   help="condition tag (default: the manifest's only one)")
    p.add_argument("-N", "--n-partitions", type=int, default=1000)
    p.add_argument("-k", "--clusters", type=int, default=None,
                   help="cluster count (default: number of ground-truth classes)")
    p.add_argument("--base", choices=ALGORITHMS, default="agglomerative")
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--consensus-linkage", choices=("average", "complete"), default="average")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="mvec_out")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_mvec)
    return parser


def cmd_cluster(args) -> int:
    x = load_features(args.features)
    if args.normalize_features:
        x = l2_normalize(x)
    k = args.clusters
    if args.algorithm == "kmeans":
        cfg = KMeansConfig(k=k, n_init=args.n_init, seed=args.seed)
        labels, inertia = kmeans_fit(x, cfg)
        print(f"inertia={inertia:.4f}")
    else:
        if not 1 <= k <= x.shape[0]:
            raise ValueError(f"k={k} out of range for n={x.shape[0]}")
        dend = agglomerate_features(x, args.linkage)
        labels = dend.cut(k)
        h = dend.heights()
        if h.size:
            print(
                f"merge_heights min={h.min():.4f} median={float(np.median(h)):.4f} "
                f"max={h.max():.4f}"
            )
        else:
            print("merge_heights none")
    out = args.out or f"{args.features}.labels"
    rpt.write_labels(out, labels)
    print(f"labels written to {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pred = rpt.read_labels(args.labels)
    truth = rpt.read_labels(args.truth)
    print(f"nmi={nmi(pred, truth, args.nmi_norm):.4f} purity={purity(pred, truth):.4f}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    ds = load_manifest(args.manifest)
    conditions = None
    if args.conditions:
        conditions = tuple(s.strip() for s in args.conditions.split(",") if s.strip())
    algorithms = tuple(s.strip() for s in args.algorithms.split(",") if s.strip())
    report = run_benchmark(
        ds,
        conditions=conditions,
        algorithms=algorithms,
        n_problems=args.n_problems,
        km_repeats=args.km_repeats,
        seed=args.seed,
        linkage=args.linkage,
        n_init=args.n_init,
        normalize_features=args.normalize_features,
        nmi_normalization=args.nmi_norm,
        workers=args.workers,
        keep_per_problem=args.per_problem is not None,
    )
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rpt.write_benchmark_csv(report, outdir / "report.csv")
    rpt.write_benchmark_markdown(report, outdir / "report.md")
    if args.per_problem:
        rpt.write_per_problem_csv(report.per_problem, args.per_problem)
    if not args.no_figures:
        rpt.render_benchmark_figures(report, outdir)
    for row in report.rows:
        print(
            f"{row.condition} {row.algorithm}: nmi={row.nmi_mean:.4f} "
            f"purity={row.purity_mean:.4f} ({row.n_problems} problems)"
        )
    print(f"report written to {outdir / 'report.csv'}")
    return EXIT_OK


def cmd_mvec(args) -> int:
    ds = load_manifest(args.manifest)
    condition = args.condition
    if condition is None:
        if len(ds.conditions) != 1:
            raise ValueError(
                "--condition is required when the manifest declares several conditions"
            )
        condition = ds.conditions[0]
    if condition not in ds.conditions:
        raise ValueError(f"condition {condition!r} not declared in manifest")
    k = args.clusters
    if k is None:
        if not ds.has_labels:
            raise ValueError("-k is required for a manifest without class labels")
        k = ds.n_classes()
    if not 1 <= k <= ds.n_objects:
        raise ValueError(f"k={k} out of range for {ds.n_objects} objects")
    if args.base == "kmeans":
        base = KMeansConfig(k=k, n_init=args.n_init, seed=0)
    else:
        base = AgglomerativeConfig(linkage=args.linkage)
    cfg = MvecConfig(
        k=k,
        n_partitions=args.n_partitions,
        base=base,
        consensus_linkage=args.consensus_linkage,
        seed=args.seed,
    )
    try:
        result, row = run_mvec(
            ds, condition, cfg, workers=args.workers,
            nmi_normalization=args.nmi_norm,
            normalize_features=args.normalize_features,
        )
    except Exception as e:  # propagated pipeline failure
        print(f"error: mvec run failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rpt.write_labels(outdir / "labels.txt", result.consensus)
    rpt.write_coassociation_csv(result.coassociation, outdir / "coassociation.csv")
    rpt.write_mvec_csv([row], outdir / "report.csv")
    rpt.write_mvec_markdown([row], outdir / "report.md")
    if not args.no_figures:
        rpt.render_mvec_figures(result, row, outdir)
    if row.nmi is not None:
        print(
            f"{condition} consensus: nmi={row.nmi:.4f} ({row.nmi_single_mean:.4f}) "
            f"purity={row.purity:.4f} ({row.purity_single_mean:.4f})"
        )
    print(f"outputs written to {outdir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FeatureIOError, ManifestError, FileNotFoundError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
