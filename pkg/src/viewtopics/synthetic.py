"""Synthetic bimodal corpora drawn from the model's own generative process,
with planted parameters kept for recovery checks.

Topics and aspects own disjoint vocabulary blocks (with a little mass
spread everywhere) so they are identifiable; each topic is tied to one
aspect through a concentrated topic-aspect distribution.  Document labels
follow the majority aspect of the document's opinion words: aspect 0 is
the planted Palestinian side, aspect 1 the Israeli side.  The default
opinion length is odd so two-aspect majorities are never tied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import (
    AnnotatedToken,
    BimodalCorpus,
    BimodalDocument,
    PartitionScheme,
    Pos,
    RawDocument,
    Viewpoint,
    Vocabulary,
)
from .lda import make_rng


@dataclass(frozen=True)
class SyntheticSpec:
    n_docs: int = 200
    n_topics: int = 6
    n_aspects: int = 2
    topical_vocab_size: int = 60
    opinion_vocab_size: int = 30
    topical_doc_length: int = 40
    opinion_doc_length: int = 21
    psi_concentration: float = 0.9
    block_mass: float = 0.9
    doc_topic_alpha: float = 0.4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.topical_vocab_size < self.n_topics:
            raise ValueError("need at least one topical word per topic")
        if self.opinion_vocab_size < self.n_aspects:
            raise ValueError("need at least one opinion word per aspect")
        if not 0 < self.psi_concentration < 1:
            raise ValueError("psi_concentration must lie in (0, 1)")
        if self.topical_doc_length < 1:
            raise ValueError("documents need at least one topical word")


@dataclass(frozen=True)
class SyntheticTruth:
    """Planted parameters and per-document latent summaries."""

    topic_word: np.ndarray
    aspect_word: np.ndarray
    topic_aspect: np.ndarray
    planted_aspect_of_topic: np.ndarray
    labels: np.ndarray


def _block_distributions(n_rows: int, n_cols: int, block_mass: float) -> np.ndarray:
    """One distribution per row: most mass on the row's own column block,
    the remainder uniform over the whole vocabulary."""
    dist = np.full((n_rows, n_cols), (1.0 - block_mass) / n_cols)
    bounds = np.linspace(0, n_cols, n_rows + 1).astype(int)
    for r in range(n_rows):
        block = slice(bounds[r], bounds[r + 1])
        width = bounds[r + 1] - bounds[r]
        dist[r, block] += block_mass / width
    return dist


def planted_parameters(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(topic-word, aspect-word, topic-aspect) planted distributions."""
    topic_word = _block_distributions(spec.n_topics, spec.topical_vocab_size, spec.block_mass)
    aspect_word = _block_distributions(spec.n_aspects, spec.opinion_vocab_size, spec.block_mass)
    topic_aspect = np.full(
        (spec.n_topics, spec.n_aspects),
        (1.0 - spec.psi_concentration) / max(spec.n_aspects - 1, 1),
    )
    owner = np.arange(spec.n_topics) * spec.n_aspects // spec.n_topics
    topic_aspect[np.arange(spec.n_topics), owner] = spec.psi_concentration
    return topic_word, aspect_word, topic_aspect


def _draw_rows(rng: np.random.Generator, dist: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """One categorical draw per entry of `rows`, each from dist[row]."""
    cumulative = np.cumsum(dist, axis=1)
    u = rng.random(len(rows))
    out = np.empty(len(rows), dtype=np.int64)
    for i, r in enumerate(rows):
        out[i] = min(
            int(np.searchsorted(cumulative[r], u[i], side="right")),
            dist.shape[1] - 1,
        )
    return out


def _doc_latents(spec: SyntheticSpec, rng, topic_word, aspect_word, topic_aspect):
    theta = rng.dirichlet(np.full(spec.n_topics, spec.doc_topic_alpha))
    zs = _draw_rows(rng, theta[None, :], np.zeros(spec.topical_doc_length, dtype=np.int64))
    words = _draw_rows(rng, topic_word, zs)
    supertopics = zs[rng.integers(0, len(zs), size=spec.opinion_doc_length)]
    aspects = _draw_rows(rng, topic_aspect, supertopics)
    opinion_words = _draw_rows(rng, aspect_word, aspects)
    return words, opinion_words, aspects


def _majority_label(aspects: np.ndarray, n_aspects: int) -> Viewpoint:
    counts = np.bincount(aspects, minlength=n_aspects)
    dominant = int(np.argmax(counts))
    return Viewpoint.PALESTINIAN if dominant == 0 else Viewpoint.ISRAELI


def topical_lemma(i: int) -> str:
    return f"noun{i:04d}"


def opinion_lemma(i: int) -> str:
    return f"adj{i:04d}"


def generate_bimodal(spec: SyntheticSpec) -> tuple[BimodalCorpus, SyntheticTruth]:
    """Sampled corpus at the token-id level, plus its planted truth.

    Lemma names are zero-padded so the sorted vocabulary preserves id
    order; ids in the documents index the planted distributions directly.
    """
    rng = make_rng(spec.seed)
    topic_word, aspect_word, topic_aspect = planted_parameters(spec)
    docs = []
    labels = []
    for d in range(spec.n_docs):
        words, opinion_words, aspects = _doc_latents(
            spec, rng, topic_word, aspect_word, topic_aspect
        )
        label = _majority_label(aspects, spec.n_aspects)
        labels.append(int(label))
        docs.append(
            BimodalDocument(
                doc_id=f"doc{d:04d}",
                label=label,
                topical_ids=words,
                opinion_ids=opinion_words,
            )
        )
    corpus = BimodalCorpus(
        topical_vocab=Vocabulary.from_words(
            topical_lemma(i) for i in range(spec.topical_vocab_size)
        ),
        opinion_vocab=Vocabulary.from_words(
            opinion_lemma(i) for i in range(spec.opinion_vocab_size)
        ),
        docs=tuple(docs),
        scheme=PartitionScheme.OPINION_NE,
    )
    truth = SyntheticTruth(
        topic_word=topic_word,
        aspect_word=aspect_word,
        topic_aspect=topic_aspect,
        planted_aspect_of_topic=topic_aspect.argmax(axis=1),
        labels=np.array(labels, dtype=np.int64),
    )
    return corpus, truth


def generate_raw_documents(spec: SyntheticSpec) -> tuple[list[RawDocument], SyntheticTruth]:
    """Same process rendered as annotated documents (nouns topical,
    adjectives opinion) for exercising the file-based pipeline.

    Note the resampled route: building a corpus from these documents
    derives vocabularies from words actually present, which can be a
    subset of the planted vocabulary.
    """
    rng = make_rng(spec.seed)
    topic_word, aspect_word, topic_aspect = planted_parameters(spec)
    documents = []
    labels = []
    for d in range(spec.n_docs):
        words, opinion_words, aspects = _doc_latents(
            spec, rng, topic_word, aspect_word, topic_aspect
        )
        label = _majority_label(aspects, spec.n_aspects)
        labels.append(int(label))
        tokens = [
            AnnotatedToken(surface=topical_lemma(w), lemma=topical_lemma(w), pos=Pos.NOUN)
            for w in words
        ] + [
            AnnotatedToken(surface=opinion_lemma(w), lemma=opinion_lemma(w), pos=Pos.ADJ)
            for w in opinion_words
        ]
        documents.append(RawDocument(doc_id=f"doc{d:04d}", label=label, tokens=tokens))
    truth = SyntheticTruth(
        topic_word=topic_word,
        aspect_word=aspect_word,
        topic_aspect=topic_aspect,
        planted_aspect_of_topic=topic_aspect.argmax(axis=1),
        labels=np.array(labels, dtype=np.int64),
    )
    return documents, truth


def best_matching(inferred: np.ndarray, planted: np.ndarray) -> np.ndarray:
    """Optimal row matching between two stacks of distributions.

    Returns `perm` with perm[i] = planted row assigned to inferred row i,
    minimizing summed total-variation distance.
    """
    if inferred.shape != planted.shape:
        raise ValueError("distribution stacks must have identical shape")
    cost = 0.5 * np.abs(inferred[:, None, :] - planted[None, :, :]).sum(axis=2)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(rows), dtype=np.int64)
    perm[rows] = cols
    return perm
