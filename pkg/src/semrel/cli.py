"""Command-line entry point.

Five subcommands cover the pipeline: metrics (bundle -> metric CSV),
saliency (image -> saliency map), evaluate (metric CSV + fixation CSV ->
report), validate (bundle -> defect report), and simulate (seed ->
synthetic corpus).  Exit codes: 0 success, 1 usage error, 2 data error.
Outputs are deterministic: fixed orderings, fixed numeric formatting, no
timestamps, and atomic writes.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .bundleio import (
    _write_text_atomic,
    read_bundle,
    read_fixations,
    read_metric_table,
    validate_bundle,
    write_fixations,
    write_metric_table,
)
from .errors import SemrelError
from .gammlite.compare import EvaluationConfig, evaluate_metrics, write_effect_csvs
from .gammlite.simulate import simulate_benchmark
from .lexicon import load_vec_file
from .records import ADJACENT_OVERLAP, ALL_OTHERS
from .relevance import compute_metric_table
from .saliency import SRParams, WORK_SIZES, load_gray, save_map_csv, save_map_p5, spectral_residual


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems by default; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="semrel",
                     description="contextual relevance metrics for captioned scenes")
    sub = parser.add_subparsers(dest="command", required=True)

    p_metrics = sub.add_parser("metrics", help="compute per-object metric rows for bundles")
    p_metrics.add_argument("--bundle", required=True,
                           help="bundle JSON file, or a directory of *.json bundles")
    p_metrics.add_argument("--wordvec", required=True, help="word-vector text file")
    p_metrics.add_argument("--conceptnet", default=None,
                           help="alternate word-vector store for concepts_semsim")
    p_metrics.add_argument("--out", required=True, help="metric CSV to write")
    p_metrics.add_argument("--vision-neighborhood", choices=(ADJACENT_OVERLAP, ALL_OTHERS),
                           default=ADJACENT_OVERLAP)
    p_metrics.add_argument("--language-neighborhood", choices=(ADJACENT_OVERLAP, ALL_OTHERS),
                           default=ALL_OTHERS)
    p_metrics.add_argument("--include-image-term", action="store_true",
                           help="fold the whole-image similarity into objs_vissim")
    p_metrics.add_argument("--saliency-reduce", choices=("mean", "max", "sum"), default="mean")
    _add_sr_flags(p_metrics)

    p_sal = sub.add_parser("saliency", help="spectral-residual saliency map for one image")
    p_sal.add_argument("--image", required=True, help="P2/P3/P5/P6 image file")
    p_sal.add_argument("--out-map", required=True, help="P5 map to write")
    p_sal.add_argument("--out-csv", default=None, help="also write the map as CSV")
    _add_sr_flags(p_sal)

    p_eval = sub.add_parser("evaluate", help="rank metrics by dAIC against fixations")
    p_eval.add_argument("--metrics", required=True, help="metric CSV")
    p_eval.add_argument("--fixations", required=True, help="fixation CSV")
    p_eval.add_argument("--response", choices=("duration", "count", "both"), default="both")
    p_eval.add_argument("--out", required=True, help="report file to write")
    p_eval.add_argument("--basis-size", type=int, default=10)

    p_val = sub.add_parser("validate", help="check a bundle, reporting every defect")
    p_val.add_argument("--bundle", required=True)

    p_sim = sub.add_parser("simulate", help="generate the synthetic benchmark corpus")
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--n-scenes", type=int, required=True)
    p_sim.add_argument("--out-metrics", required=True)
    p_sim.add_argument("--out-fixations", required=True)

    return parser


def _add_sr_flags(parser) -> None:
    parser.add_argument("--work-size", type=int, choices=WORK_SIZES, default=64,
                        help="square FFT working size")
    parser.add_argument("--sigma", type=float, default=2.0,
                        help="Gaussian smoothing sigma for the log spectrum")


def _worker_count() -> int:
    raw = os.environ.get("RELEVANCE_THREADS", "").strip()
    if not raw:
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise SemrelError(f"RELEVANCE_THREADS must be an integer, got {raw!r}") from None
    return max(value, 0)


def _bundle_paths(target: str) -> list:
    if os.path.isdir(target):
        names = sorted(name for name in os.listdir(target) if name.endswith(".json"))
        if not names:
            raise SemrelError(f"{target}: directory contains no .json bundles")
        return [os.path.join(target, name) for name in names]
    return [target]


def _cmd_metrics(args) -> int:
    if args.sigma <= 0:
        raise SemrelError(f"--sigma must be > 0, got {args.sigma}")
    store = load_vec_file(args.wordvec)
    concept_store = load_vec_file(args.conceptnet) if args.conceptnet else None
    params = SRParams(work_size=args.work_size, gaussian_sigma=args.sigma)
    paths = _bundle_paths(args.bundle)

    def one(path):
        bundle = read_bundle(path)
        return compute_metric_table(
            bundle, store=store, concept_store=concept_store,
            vision_policy=args.vision_neighborhood,
            language_policy=args.language_neighborhood,
            include_image_term=args.include_image_term,
            sr_params=params, saliency_reduce=args.saliency_reduce,
        )

    workers = _worker_count()
    if workers > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tables = list(pool.map(one, paths))
    else:
        tables = [one(path) for path in paths]

    rows = []
    counts: dict = {}
    for table in tables:
        rows.extend(table.rows)
        for key, value in table.diagnostics.items():
            counts[key] = counts.get(key, 0) + value
    write_metric_table(rows, args.out)
    sidecar = {
        "bundles": len(paths),
        "objects": len(rows),
        "vision_neighborhood": args.vision_neighborhood,
        "language_neighborhood": args.language_neighborhood,
        "include_image_term": args.include_image_term,
        "saliency_reduce": args.saliency_reduce,
        "work_size": args.work_size,
        "sigma": args.sigma,
        "counts": {key: counts[key] for key in sorted(counts)},
    }
    _write_text_atomic(args.out + ".diagnostics.json",
                       json.dumps(sidecar, indent=1, sort_keys=True) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_saliency(args) -> int:
    if args.sigma <= 0:
        raise SemrelError(f"--sigma must be > 0, got {args.sigma}")
    image = load_gray(args.image)
    smap = spectral_residual(image, SRParams(work_size=args.work_size,
                                             gaussian_sigma=args.sigma))
    save_map_p5(smap, args.out_map)
    if args.out_csv:
        save_map_csv(smap, args.out_csv)
    print(f"wrote {smap.width}x{smap.height} map to {args.out_map}")
    return 0


_RESPONSE_SETS = {
    "duration": ("total_duration",),
    "count": ("fixation_number",),
    "both": ("total_duration", "fixation_number"),
}


def _cmd_evaluate(args) -> int:
    rows = read_metric_table(args.metrics)
    fixations = read_fixations(args.fixations)
    config = EvaluationConfig(responses=_RESPONSE_SETS[args.response],
                              basis_size=args.basis_size)
    report = evaluate_metrics(rows, fixations, config)
    _write_text_atomic(args.out, report.to_text())
    effect_paths = write_effect_csvs(report, args.out + ".effects")
    print(f"wrote report to {args.out} and {len(effect_paths)} effect curves")
    return 0


def _cmd_validate(args) -> int:
    report = validate_bundle(args.bundle)
    print(report.summary())
    return 0 if report.ok else 2


def _cmd_simulate(args) -> int:
    if args.n_scenes < 0:
        raise SemrelError(f"--n-scenes must be >= 0, got {args.n_scenes}")
    rows, fixations = simulate_benchmark(args.seed, args.n_scenes)
    write_metric_table(rows, args.out_metrics)
    write_fixations(fixations, args.out_fixations)
    print(f"wrote {len(rows)} metric rows and {len(fixations)} fixation rows")
    return 0


_HANDLERS = {
    "metrics": _cmd_metrics,
    "saliency": _cmd_saliency,
    "evaluate": _cmd_evaluate,
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (SemrelError, OSError, ValueError) as exc:
        print(f"semrel {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
