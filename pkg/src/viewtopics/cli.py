"""Command-line driver for corpus statistics, sampler training, evaluation,
grouping, and the consistency sweep.

Every artifact embeds the resolved configuration and code version, so a
run is reproducible from its outputs alone.  Timestamps never enter the
deterministic files; they live in a sidecar .log next to the checkpoint.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .checkpoint import (
    Checkpoint,
    corpus_file_sha256,
    load_checkpoint,
    restore_corrlda2,
    restore_lda,
    save_checkpoint,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    config_from_dict,
    load_config,
)
from .corpus import (
    ParseError,
    PartitionScheme,
    apply_partition,
    build_unimodal,
    corpus_stats,
    load_annotated_corpus,
)
from .corrlda2 import CorrLda2Sampler
from .features import FeatureMode, build_feature_matrix
from .lda import LdaSampler, chain_seed
from .svm import cross_validate
from .viewpoints import analyze_sampler, consistency_sweep, render_group_report, write_sweep_csv

logger = logging.getLogger(__name__)

_SCHEME_CHOICES = [s.value for s in PartitionScheme]


def _config_echo(config: ExperimentConfig) -> dict:
    return {"code_version": __version__, **config.to_dict()}


def _config_from_echo(echo: dict) -> ExperimentConfig:
    return config_from_dict({k: v for k, v in echo.items() if k != "code_version"})


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
    elif args.corpus:
        config = ExperimentConfig(corpus_path=args.corpus)
    else:
        raise ConfigError("either --config or --corpus is required")
    overrides = {
        "corpus_path": args.corpus,
        "seed": args.seed,
        "scheme": PartitionScheme(args.scheme) if args.scheme else None,
        "n_topics": args.topics,
        "n_aspects": args.aspects,
        "model": args.model,
        "n_sweeps": args.sweeps,
        "output_dir": args.output,
        "min_count": args.min_count,
        "jobs": args.jobs,
    }
    return apply_overrides(config, **overrides)


def _require_corpus_file(config: ExperimentConfig) -> Path:
    path = Path(config.corpus_path)
    if not path.exists():
        raise ConfigError(f"corpus file not found: {path}")
    return path


def _run_prefix(config: ExperimentConfig) -> str:
    if config.model == "lda":
        return f"lda_T{config.n_topics}_seed{config.seed}"
    return (
        f"corrlda2_{config.scheme.value}_T{config.n_topics}"
        f"_A{config.n_aspects}_seed{config.seed}"
    )


def _build_sampler(config: ExperimentConfig, documents):
    if config.model == "lda":
        corpus = build_unimodal(documents, min_count=config.min_count)
        sampler = LdaSampler.from_corpus(
            corpus, n_topics=config.n_topics, hyper=config.hyperparams,
            seed=config.seed,
        )
    else:
        corpus = apply_partition(documents, config.scheme, min_count=config.min_count)
        sampler = CorrLda2Sampler.from_corpus(
            corpus, n_topics=config.n_topics, n_aspects=config.n_aspects,
            hyper=config.hyperparams, seed=config.seed,
        )
    return corpus, sampler


def _restore_from_checkpoint(checkpoint: Checkpoint):
    config = _config_from_echo(checkpoint.config)
    corpus_path = _require_corpus_file(config)
    actual_sha = corpus_file_sha256(corpus_path)
    if actual_sha != checkpoint.corpus_sha256:
        raise RuntimeError(
            f"corpus file {corpus_path} changed since training "
            f"(sha256 {actual_sha[:12]} != {checkpoint.corpus_sha256[:12]})"
        )
    documents = load_annotated_corpus(corpus_path)
    if checkpoint.kind == "lda":
        corpus = build_unimodal(documents, min_count=config.min_count)
        sampler = restore_lda(
            checkpoint, corpus, n_topics=config.n_topics,
            hyper=config.hyperparams, seed=config.seed,
        )
    else:
        corpus = apply_partition(documents, config.scheme, min_count=config.min_count)
        sampler = restore_corrlda2(
            checkpoint, corpus, n_topics=config.n_topics,
            n_aspects=config.n_aspects, hyper=config.hyperparams,
            seed=config.seed,
        )
    return config, corpus, sampler


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus_path = _require_corpus_file(config)
    sha = corpus_file_sha256(corpus_path)
    documents = load_annotated_corpus(corpus_path)
    _, sampler = _build_sampler(config, documents)

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = _run_prefix(config)
    started = time.time()
    trace = []
    n_sweeps = config.resolved_sweeps
    sweep_once = sampler.full_sweep if config.model == "corrlda2" else sampler.sweep
    for s in range(1, n_sweeps + 1):
        sweep_once()
        trace.append((s, sampler.log_likelihood()))
    elapsed = time.time() - started

    echo = _config_echo(config)
    trace_path = out_dir / f"{prefix}.loglik.csv"
    with open(trace_path, "w", newline="") as fh:
        fh.write(f"# config: {json.dumps(echo, sort_keys=True)}\n")
        fh.write("sweep,log_likelihood\n")
        for s, ll in trace:
            fh.write(f"{s},{ll!r}\n")
    checkpoint_path = out_dir / f"{prefix}.checkpoint.json"
    save_checkpoint(checkpoint_path, sampler, echo, sha)
    log_path = out_dir / f"{prefix}.log"
    with open(log_path, "a") as fh:
        fh.write(
            f"{time.strftime('%Y-%m-%dT%H:%M:%S%z')} trained {config.model} "
            f"T={config.n_topics} for {n_sweeps} sweeps in {elapsed:.1f}s\n"
        )
    print(checkpoint_path)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    config, corpus, sampler = _restore_from_checkpoint(checkpoint)
    if args.mode:
        mode = FeatureMode(args.mode)
    elif checkpoint.kind == "lda":
        mode = FeatureMode.TOPICS
    else:
        mode = FeatureMode(config.feature_mode)
    if config.averaging > 1:
        logger.warning("checkpoints hold the final state only; evaluating with averaging=1")
    folds = args.folds if args.folds else config.cv_folds
    features = build_feature_matrix(sampler, corpus, mode=mode, averaging=1)
    report = cross_validate(
        features, k=folds, C=config.svm_c, tol=config.svm_tol,
        max_iter=config.svm_max_iter, seed=config.seed,
    )
    result = {
        "config": _config_echo(config),
        "feature_mode": mode.value,
        "cv": report.to_dict(),
    }
    out_path = Path(args.checkpoint).with_suffix("").with_suffix("")
    out_file = out_path.parent / f"{out_path.name}.cv_{mode.value}.json"
    _write_json(out_file, result)
    print(json.dumps(result["cv"], sort_keys=True, indent=2))
    return 0


def cmd_groups(args: argparse.Namespace) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    if checkpoint.kind != "corrlda2":
        raise ConfigError("groups requires a corrlda2 checkpoint")
    config, corpus, sampler = _restore_from_checkpoint(checkpoint)
    groups, reports = analyze_sampler(
        sampler, corpus, threshold=config.group_threshold, C=config.svm_c,
        tol=config.svm_tol, max_iter=config.svm_max_iter,
        seed=chain_seed(config.seed, 101), averaging=1,
    )
    for report in reports:
        print(render_group_report(report))
        print()
    print(f"neutral topics: {sorted(groups.neutral_topics) or 'none'}")
    result = {
        "config": _config_echo(config),
        "groups": [r.to_dict() for r in reports],
        "neutral_topics": sorted(groups.neutral_topics),
        "threshold": groups.threshold,
    }
    out_path = Path(args.checkpoint).with_suffix("").with_suffix("")
    _write_json(out_path.parent / f"{out_path.name}.groups.json", result)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if not config.t_range:
        raise ConfigError("sweep needs a non-empty t_range in the config")
    corpus_path = _require_corpus_file(config)
    documents = load_annotated_corpus(corpus_path)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scheme_order = list(PartitionScheme)
    reports = []
    for scheme in config.resolved_schemes:
        report = consistency_sweep(
            documents, scheme, config.t_range, n_aspects=config.n_aspects,
            hyper=config.hyperparams, n_sweeps=config.resolved_sweeps,
            base_seed=chain_seed(config.seed, scheme_order.index(scheme)),
            threshold=config.group_threshold, C=config.svm_c,
            tol=config.svm_tol, max_iter=config.svm_max_iter,
            min_count=config.min_count, n_jobs=config.jobs, progress=True,
        )
        reports.append(report)
        print(
            f"{scheme.value}: separation {report.separation:+.3f}, "
            f"overlap at T in {list(report.overlap_points) or 'none'}"
        )
    echo = _config_echo(config)
    write_sweep_csv(
        reports, out_dir / f"sweep_seed{config.seed}.csv",
        comments=[f"config: {json.dumps(echo, sort_keys=True)}"],
    )
    _write_json(
        out_dir / f"sweep_seed{config.seed}.json",
        {"config": echo, "sweeps": [r.to_dict() for r in reports]},
    )
    return 0


def cmd_accuracy_curve(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if not config.t_range:
        raise ConfigError("accuracy-curve needs a non-empty t_range in the config")
    corpus_path = _require_corpus_file(config)
    documents = load_annotated_corpus(corpus_path)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mode = FeatureMode.TOPICS if config.model == "lda" else FeatureMode(config.feature_mode)
    rows = []
    for n_topics in config.t_range:
        point = apply_overrides(config, n_topics=n_topics, seed=chain_seed(config.seed, n_topics))
        eval_corpus, sampler = _build_sampler(point, documents)
        sampler.run(point.resolved_sweeps)
        features = build_feature_matrix(sampler, eval_corpus, mode=mode, averaging=1)
        report = cross_validate(
            features, k=config.cv_folds, C=config.svm_c, tol=config.svm_tol,
            max_iter=config.svm_max_iter, seed=chain_seed(config.seed, n_topics, 1),
        )
        rows.append((n_topics, report.mean_accuracy))
        logger.info("T=%d: accuracy %.3f", n_topics, report.mean_accuracy)
    echo = _config_echo(config)
    out_file = out_dir / f"accuracy_{config.model}_seed{config.seed}.csv"
    with open(out_file, "w", newline="") as fh:
        fh.write(f"# config: {json.dumps(echo, sort_keys=True)}\n")
        fh.write("T,model,scheme,mode,mean_accuracy\n")
        for n_topics, acc in rows:
            fh.write(
                f"{n_topics},{config.model},{config.scheme.value},{mode.value},{acc!r}\n"
            )
    for n_topics, acc in rows:
        print(f"T={n_topics}: {acc:.3f}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    path = Path(args.corpus)
    if not path.exists():
        raise ConfigError(f"corpus file not found: {path}")
    documents = load_annotated_corpus(path)
    scheme = PartitionScheme(args.scheme) if args.scheme else PartitionScheme.OPINION_NE
    corpus = apply_partition(documents, scheme, min_count=args.min_count or 1)
    stats = corpus_stats(corpus)
    print(json.dumps({"scheme": scheme.value, **stats.to_dict()}, sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viewtopics",
        description="Topic, aspect, and viewpoint analysis of bimodal corpora.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON experiment config")
    common.add_argument("--corpus", help="annotated corpus JSONL (overrides config)")
    common.add_argument("--seed", type=int, help="base seed override")
    common.add_argument("--scheme", choices=_SCHEME_CHOICES, help="partition scheme override")
    common.add_argument("--topics", type=int, help="topic count override")
    common.add_argument("--aspects", type=int, help="aspect count override")
    common.add_argument("--model", choices=["lda", "corrlda2"], help="model override")
    common.add_argument("--sweeps", type=int, help="sweep count override")
    common.add_argument("--output", help="output directory override")
    common.add_argument("--min-count", type=int, dest="min_count", help="vocabulary floor override")
    common.add_argument("--jobs", type=int, help="parallel workers for sweeps")

    p_train = sub.add_parser("train", parents=[common], help="run a sampler and checkpoint it")
    p_train.set_defaults(handler=cmd_train)

    p_eval = sub.add_parser("evaluate", parents=[common], help="cross-validate a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--mode", choices=[m.value for m in FeatureMode])
    p_eval.add_argument("--folds", type=int)
    p_eval.set_defaults(handler=cmd_evaluate)

    p_groups = sub.add_parser("groups", parents=[common], help="topic-aspect groups of a checkpoint")
    p_groups.add_argument("--checkpoint", required=True)
    p_groups.set_defaults(handler=cmd_groups)

    p_sweep = sub.add_parser("sweep", parents=[common], help="consistency sweep over topic counts")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_curve = sub.add_parser(
        "accuracy-curve", parents=[common], help="CV accuracy across topic counts"
    )
    p_curve.set_defaults(handler=cmd_accuracy_curve)

    p_stats = sub.add_parser("stats", help="corpus statistics under a partition scheme")
    p_stats.add_argument("--corpus", required=True)
    p_stats.add_argument("--scheme", choices=_SCHEME_CHOICES)
    p_stats.add_argument("--min-count", type=int, dest="min_count")
    p_stats.set_defaults(handler=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
