"""Topic-aspect grouping and viewpoint scoring.

A topic joins an aspect's group when their empirical co-occurrence
frequency exceeds a threshold (default 0.7, strict inequality); topics
passing for no aspect are neutral.  Each group inherits a viewpoint from
the sign of its aspect's SVM weight (negative reads Palestinian, positive
or zero Israeli) and a score equal to the sum of its member topics' SVM
weights.  The consistency sweep repeats this across a grid of topic
counts and tracks whether the two sides' scores stay separated.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import BimodalCorpus, PartitionScheme, RawDocument, Viewpoint, apply_partition
from .corrlda2 import CorrLda2Sampler
from .features import FeatureMode, build_feature_matrix
from .lda import Hyperparams, chain_seed, top_words_named
from .svm import DEFAULT_C, DEFAULT_MAX_ITER, DEFAULT_TOL, train

logger = logging.getLogger(__name__)

DEFAULT_GROUP_THRESHOLD = 0.7
TOP_WORDS_PER_TOPIC = 12


@dataclass(frozen=True)
class TopicAspectGroups:
    """Disjoint per-aspect topic groups plus the leftover neutral topics."""

    members: tuple[frozenset[int], ...]
    neutral_topics: frozenset[int]
    threshold: float
    n_topics: int

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for group in self.members:
            if group & seen:
                raise ValueError("topic groups must be pairwise disjoint")
            seen |= group
        if seen & self.neutral_topics:
            raise ValueError("neutral topics must not appear in any group")
        if seen | self.neutral_topics != set(range(self.n_topics)):
            raise ValueError("groups and neutral topics must cover all topics")

    @property
    def n_aspects(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TopicRow:
    topic_id: int
    weight: float
    top_words: tuple[str, ...]


@dataclass(frozen=True)
class GroupReport:
    """One aspect's group: its viewpoint, member topics, and score."""

    aspect_id: int
    viewpoint: Viewpoint
    aspect_weight: float
    topic_rows: tuple[TopicRow, ...]
    score: float

    def to_dict(self) -> dict:
        return {
            "aspect_id": self.aspect_id,
            "viewpoint": self.viewpoint.name.lower(),
            "aspect_weight": self.aspect_weight,
            "topics": [
                {"topic_id": r.topic_id, "weight": r.weight, "top_words": list(r.top_words)}
                for r in self.topic_rows
            ],
            "score": self.score,
        }


@dataclass(frozen=True)
class SweepPoint:
    n_topics: int
    scheme: PartitionScheme
    reports: tuple[GroupReport, ...]
    pal_score: float
    isr_score: float


@dataclass(frozen=True)
class SweepReport:
    """Scores across a topic-count grid for one partition scheme."""

    scheme: PartitionScheme
    points: tuple[SweepPoint, ...]
    overlap_points: tuple[int, ...]
    separation: float

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "points": [
                {
                    "n_topics": p.n_topics,
                    "pal_score": p.pal_score,
                    "isr_score": p.isr_score,
                    "groups": [r.to_dict() for r in p.reports],
                }
                for p in self.points
            ],
            "overlap_points": list(self.overlap_points),
            "separation": self.separation,
        }


def form_groups(freq: np.ndarray, threshold: float = DEFAULT_GROUP_THRESHOLD) -> TopicAspectGroups:
    """Group topics with the aspects they co-occur with above the threshold.

    `freq` is the (n_aspects, n_topics) co-occurrence frequency matrix;
    every column sums to 1 except all-zero columns, which stay neutral.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if threshold <= 0.5:
        logger.warning(
            "threshold %.3f <= 0.5 no longer guarantees disjoint groups", threshold
        )
    freq = np.asarray(freq, dtype=np.float64)
    if freq.ndim != 2:
        raise ValueError("frequency matrix must be 2-d (aspects by topics)")
    sums = freq.sum(axis=0)
    if not np.all((np.abs(sums - 1.0) < 1e-9) | (sums == 0.0)):
        raise ValueError("frequency columns must sum to 1 or be all zero")

    n_aspects, n_topics = freq.shape
    members = tuple(
        frozenset(np.flatnonzero(freq[a] > threshold).tolist()) for a in range(n_aspects)
    )
    grouped = set().union(*members) if members else set()
    neutral = frozenset(set(range(n_topics)) - grouped)
    return TopicAspectGroups(
        members=members, neutral_topics=neutral, threshold=float(threshold),
        n_topics=n_topics,
    )


def extract_association_weights(
    sampler: CorrLda2Sampler,
    corpus: BimodalCorpus,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    averaging: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Aspect and topic SVM weights from two separately trained models.

    Training the two blocks apart keeps correlated topic and aspect
    fractions out of the same model; both use every labeled document.
    """
    aspect_features = build_feature_matrix(
        sampler, corpus, mode=FeatureMode.ASPECTS, averaging=averaging
    )
    topic_features = build_feature_matrix(
        sampler, corpus, mode=FeatureMode.TOPICS, averaging=averaging
    )
    aspect_model = train(aspect_features, C=C, tol=tol, max_iter=max_iter,
                         seed=chain_seed(seed, 0))
    topic_model = train(topic_features, C=C, tol=tol, max_iter=max_iter,
                        seed=chain_seed(seed, 1))
    return aspect_model.w.copy(), topic_model.w.copy()


def classify_and_score(
    groups: TopicAspectGroups,
    aspect_weights: np.ndarray,
    topic_weights: np.ndarray,
    topic_top_words: Sequence[Sequence[str]] | None = None,
) -> tuple[GroupReport, ...]:
    """Viewpoint and score for every aspect's group.

    Member rows are sorted by weight, ascending for Palestinian groups and
    descending for Israeli ones, so the strongest contributors lead.
    """
    if len(aspect_weights) != groups.n_aspects:
        raise ValueError("aspect weight count does not match groups")
    if len(topic_weights) != groups.n_topics:
        raise ValueError("topic weight count does not match groups")
    reports = []
    for a in range(groups.n_aspects):
        weight = float(aspect_weights[a])
        viewpoint = Viewpoint.PALESTINIAN if weight < 0 else Viewpoint.ISRAELI
        topics = sorted(
            groups.members[a],
            key=lambda t: topic_weights[t],
            reverse=viewpoint is Viewpoint.ISRAELI,
        )
        rows = tuple(
            TopicRow(
                topic_id=t,
                weight=float(topic_weights[t]),
                top_words=tuple(topic_top_words[t]) if topic_top_words is not None else (),
            )
            for t in topics
        )
        reports.append(
            GroupReport(
                aspect_id=a,
                viewpoint=viewpoint,
                aspect_weight=weight,
                topic_rows=rows,
                score=float(sum(r.weight for r in rows)),
            )
        )
    return tuple(reports)


def topic_top_words(sampler, vocab, k: int = TOP_WORDS_PER_TOPIC) -> tuple[tuple[str, ...], ...]:
    """Top topical words per topic for report rendering."""
    dist = sampler.topic_word_dist()
    return tuple(
        tuple(word for word, _ in top_words_named(dist[t], vocab, min(k, len(vocab))))
        for t in range(dist.shape[0])
    )


def split_scores(reports: Sequence[GroupReport]) -> tuple[float, float]:
    """(palestinian_score, israeli_score) for a two-aspect report pair.

    When the aspect-weight signs do not split into one negative and one
    nonnegative, the lower-weighted aspect's group supplies the
    Palestinian-side score and the higher the Israeli-side.
    """
    if len(reports) != 2:
        raise ValueError("score splitting is defined for exactly two aspects")
    by_view = {r.viewpoint for r in reports}
    if by_view == {Viewpoint.PALESTINIAN, Viewpoint.ISRAELI}:
        pal = next(r for r in reports if r.viewpoint is Viewpoint.PALESTINIAN)
        isr = next(r for r in reports if r.viewpoint is Viewpoint.ISRAELI)
    else:
        ordered = sorted(reports, key=lambda r: r.aspect_weight)
        pal, isr = ordered[0], ordered[1]
    return pal.score, isr.score


def analyze_sampler(
    sampler: CorrLda2Sampler,
    corpus: BimodalCorpus,
    threshold: float = DEFAULT_GROUP_THRESHOLD,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    averaging: int = 1,
) -> tuple[TopicAspectGroups, tuple[GroupReport, ...]]:
    """Full grouping pipeline on a swept sampler state."""
    groups = form_groups(sampler.cooccurrence_frequencies(), threshold)
    aspect_w, topic_w = extract_association_weights(
        sampler, corpus, C=C, tol=tol, max_iter=max_iter, seed=seed,
        averaging=averaging,
    )
    words = topic_top_words(sampler, corpus.topical_vocab)
    return groups, classify_and_score(groups, aspect_w, topic_w, words)


def _sweep_point(
    corpus: BimodalCorpus,
    scheme: PartitionScheme,
    n_topics: int,
    n_aspects: int,
    hyper: Hyperparams | None,
    n_sweeps: int,
    base_seed: int,
    threshold: float,
    C: float,
    tol: float,
    max_iter: int,
    n_runs: int,
) -> SweepPoint:
    """One grid point: run the chain(s) and score both groups.  With
    n_runs > 1 the run with the median score gap is reported."""
    candidates = []
    for run in range(n_runs):
        sampler = CorrLda2Sampler.from_corpus(
            corpus, n_topics=n_topics, n_aspects=n_aspects, hyper=hyper,
            seed=chain_seed(base_seed, n_topics, run),
        )
        sampler.run(n_sweeps)
        _, reports = analyze_sampler(
            sampler, corpus, threshold=threshold, C=C, tol=tol,
            max_iter=max_iter, seed=chain_seed(base_seed, n_topics, run, 1),
        )
        pal, isr = split_scores(reports)
        candidates.append(SweepPoint(
            n_topics=n_topics, scheme=scheme, reports=reports,
            pal_score=pal, isr_score=isr,
        ))
    candidates.sort(key=lambda p: p.isr_score - p.pal_score)
    return candidates[(len(candidates) - 1) // 2]


def _sweep_point_star(args) -> SweepPoint:
    return _sweep_point(*args)


def consistency_sweep(
    documents: Sequence[RawDocument],
    scheme: PartitionScheme,
    t_range: Sequence[int],
    n_aspects: int = 2,
    hyper: Hyperparams | None = None,
    n_sweeps: int = 2000,
    base_seed: int = 0,
    threshold: float = DEFAULT_GROUP_THRESHOLD,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    min_count: int = 1,
    n_runs: int = 1,
    n_jobs: int = 1,
    progress: bool = False,
) -> SweepReport:
    """Score both viewpoint groups at every topic count on the grid.

    The corpus partition is fixed once per scheme; each grid point gets a
    fresh sampler chain seeded from (base_seed, n_topics, run), so results
    do not depend on n_jobs.
    """
    t_range = list(t_range)
    if not t_range:
        raise ValueError("topic-count grid must be non-empty")
    corpus = apply_partition(documents, scheme, min_count=min_count)
    args = [
        (corpus, scheme, n_topics, n_aspects, hyper, n_sweeps, base_seed,
         threshold, C, tol, max_iter, n_runs)
        for n_topics in t_range
    ]
    if n_jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            points = list(pool.map(_sweep_point_star, args))
    else:
        points = []
        for a in args:
            point = _sweep_point(*a)
            points.append(point)
            if progress:
                logger.info(
                    "T=%d (%s): pal=%.3f isr=%.3f", point.n_topics, scheme.value,
                    point.pal_score, point.isr_score,
                )
    overlap = tuple(p.n_topics for p in points if p.pal_score >= p.isr_score)
    separation = float(
        min(p.isr_score for p in points) - max(p.pal_score for p in points)
    )
    return SweepReport(
        scheme=scheme, points=tuple(points), overlap_points=overlap,
        separation=separation,
    )


def write_sweep_csv(
    reports: Sequence[SweepReport], path: str | Path,
    comments: Sequence[str] = (),
) -> None:
    """Merged per-point scores: one row per (T, scheme).  Comments go in
    as leading `# `-prefixed lines."""
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["T", "scheme", "pal_score", "isr_score"])
        for report in reports:
            for p in report.points:
                writer.writerow([
                    p.n_topics, p.scheme.value,
                    repr(p.pal_score), repr(p.isr_score),
                ])


def render_group_report(report: GroupReport) -> str:
    """Aligned text table for one group, weight column plus top words."""
    header = (
        f"Aspect {report.aspect_id} [{report.viewpoint.name.lower()}]  "
        f"aspect weight {report.aspect_weight:+.2f}  score {report.score:+.2f}"
    )
    lines = [header]
    if not report.topic_rows:
        lines.append("  (no topics grouped)")
        return "\n".join(lines)
    id_width = max(len(str(r.topic_id)) for r in report.topic_rows)
    for r in report.topic_rows:
        words = ", ".join(r.top_words)
        lines.append(f"  topic {r.topic_id:>{id_width}}  {r.weight:+8.2f}  {words}")
    return "\n".join(lines)
