"""Document feature vectors derived from sampler states.

Every feature is an assignment fraction: the share of a document's words
(topical or opinion) currently carrying a given topic or aspect.  With
averaging > 1 the fractions are means over the sampler's retained
count-snapshot history rather than the final state alone.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)


class FeatureMode(str, Enum):
    TOPICS = "topics"
    ASPECTS = "aspects"
    COMBINED = "combined"


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-document fraction features aligned with labels and ids.

    `opinion_present` marks rows whose aspect block is meaningful; for a
    document without opinion words the block is all zero.  It is None when
    the matrix has no aspect block.
    """

    values: np.ndarray
    feature_names: tuple[str, ...]
    labels: np.ndarray
    doc_ids: tuple[str, ...]
    mode: FeatureMode
    opinion_present: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError("feature values must be a 2-d array")
        n, f = self.values.shape
        if f != len(self.feature_names):
            raise ValueError("feature name count does not match columns")
        if len(self.labels) != n or len(self.doc_ids) != n:
            raise ValueError("labels and doc_ids must align with rows")
        if n and not np.isin(self.labels, (-1, 1)).all():
            raise ValueError("labels must be -1 or +1")
        if self.values.size and (self.values.min() < 0 or self.values.max() > 1):
            raise ValueError("fractions must lie in [0, 1]")
        if self.opinion_present is not None and len(self.opinion_present) != n:
            raise ValueError("opinion_present must align with rows")

    @property
    def num_docs(self) -> int:
        return self.values.shape[0]

    @property
    def num_features(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", "label", *self.feature_names])
            for doc_id, label, row in zip(self.doc_ids, self.labels, self.values):
                writer.writerow([doc_id, int(label), *(repr(float(v)) for v in row)])


def topic_fractions(sampler, d: int) -> np.ndarray:
    """Fraction of document d's topical words assigned to each topic."""
    lengths = _topical_lengths(sampler)
    if lengths[d] == 0:
        raise ValueError(f"document {d} has no topical words")
    return sampler.doc_topic_counts[d] / lengths[d]


def aspect_fractions(sampler, d: int) -> np.ndarray:
    """Fraction of document d's opinion words assigned to each aspect;
    all zero when the document has no sampled opinion words."""
    if sampler.opinion_lengths[d] == 0 or not sampler.included[d]:
        return np.zeros(sampler.n_aspects, dtype=np.float64)
    return sampler.doc_aspect_counts[d] / sampler.opinion_lengths[d]


def _topical_lengths(sampler) -> np.ndarray:
    if hasattr(sampler, "topical_lengths"):
        return sampler.topical_lengths
    return sampler.doc_lengths


def build_feature_matrix(
    sampler,
    corpus,
    mode: FeatureMode = FeatureMode.COMBINED,
    averaging: int = 1,
) -> FeatureMatrix:
    """Assemble the labeled feature matrix for SVM evaluation.

    Rows cover documents that are labeled and have topical words; others
    are dropped with a warning.  With averaging S > 1 the sampler must
    have retained at least S sweep snapshots.
    """
    mode = FeatureMode(mode)
    bimodal = hasattr(sampler, "doc_aspect_counts")
    if mode is not FeatureMode.TOPICS and not bimodal:
        raise ValueError(f"sampler has no aspect assignments; mode {mode.value!r} unavailable")
    if averaging < 1:
        raise ValueError(f"averaging must be >= 1, got {averaging}")

    snapshots = _count_snapshots(sampler, bimodal, averaging)
    lengths = _topical_lengths(sampler)
    labels = corpus.labels
    if len(labels) != sampler.num_docs:
        raise ValueError("corpus and sampler document counts differ")

    rows, kept_labels, kept_ids, opinion_present = [], [], [], []
    n_unlabeled = n_no_topical = 0
    for d in range(sampler.num_docs):
        if labels[d] is None:
            n_unlabeled += 1
            continue
        if lengths[d] == 0:
            n_no_topical += 1
            continue
        blocks = []
        if mode in (FeatureMode.TOPICS, FeatureMode.COMBINED):
            blocks.append(
                np.mean([tc[d] / lengths[d] for tc, _ in snapshots], axis=0)
            )
        if mode in (FeatureMode.ASPECTS, FeatureMode.COMBINED):
            has_opinion = bool(sampler.opinion_lengths[d]) and bool(sampler.included[d])
            if has_opinion:
                blocks.append(
                    np.mean(
                        [ac[d] / sampler.opinion_lengths[d] for _, ac in snapshots],
                        axis=0,
                    )
                )
            else:
                blocks.append(np.zeros(sampler.n_aspects, dtype=np.float64))
            opinion_present.append(has_opinion)
        rows.append(np.concatenate(blocks))
        kept_labels.append(int(labels[d]))
        kept_ids.append(corpus.doc_ids[d])

    if n_unlabeled:
        logger.warning("%d unlabeled document(s) excluded from features", n_unlabeled)
    if n_no_topical:
        logger.warning(
            "%d document(s) without topical words excluded from features", n_no_topical
        )
    if not rows:
        raise ValueError("no labeled documents with topical words; nothing to train on")

    names: list[str] = []
    if mode in (FeatureMode.TOPICS, FeatureMode.COMBINED):
        names += [f"topic_{t}" for t in range(sampler.n_topics)]
    if mode in (FeatureMode.ASPECTS, FeatureMode.COMBINED):
        names += [f"aspect_{a}" for a in range(sampler.n_aspects)]

    return FeatureMatrix(
        values=np.vstack(rows),
        feature_names=tuple(names),
        labels=np.array(kept_labels, dtype=np.int64),
        doc_ids=tuple(kept_ids),
        mode=mode,
        opinion_present=np.array(opinion_present, dtype=bool) if opinion_present else None,
    )


def _count_snapshots(sampler, bimodal: bool, averaging: int):
    """Normalize current state or retained history into (topic, aspect) pairs."""
    if averaging == 1:
        aspect = sampler.doc_aspect_counts if bimodal else None
        return [(sampler.doc_topic_counts, aspect)]
    history = sampler.history
    if history is None or len(history) < averaging:
        have = 0 if history is None else len(history)
        raise ValueError(
            f"averaging over {averaging} sweeps needs retained history; have {have}"
        )
    recent = list(history)[-averaging:]
    if bimodal:
        return recent
    return [(tc, None) for tc in recent]
