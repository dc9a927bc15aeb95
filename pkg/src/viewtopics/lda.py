"""Collapsed Gibbs sampler for latent Dirichlet allocation.

The sampler keeps one topic assignment per token together with the two
count tables (document-topic and word-topic) that drive the collapsed
full conditional

    p(z = t | rest) propto (n_dt + alpha) / (N_d - 1 + T alpha)
                         * (n_wt + beta) / (n_t + W beta)

where the counts exclude the token being resampled.  Parameters of the
per-document and per-topic multinomials are integrated out; point
estimates are recovered as posterior means.

Determinism: assignments depend only on (documents, topic count,
hyperparameters, seed, number of sweeps).  Documents are visited in
corpus order and tokens in position order; draws come from a single
numpy PCG64 stream seeded at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class Hyperparams:
    """Symmetric Dirichlet concentrations for all model distributions.

    alpha smooths document-topic mixtures, beta the topic-word
    distributions, beta_opinion the aspect-word distributions, and gamma
    the topic-aspect distributions (the latter two are used by the
    bimodal sampler only).
    """

    alpha: float = 0.1
    beta: float = 0.01
    beta_opinion: float = 0.01
    gamma: float = 0.01

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "beta_opinion", "gamma"):
            value = getattr(self, name)
            if not (value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value}")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def chain_seed(base_seed: int, *keys: int) -> int:
    """Deterministic per-chain seed: one PCG64 stream per (base, keys) tuple.

    The key count is folded into the entropy because SeedSequence ignores
    trailing zero words, which would alias (s,) with (s, 0).
    """
    entropy = [int(base_seed), len(keys), *map(int, keys)]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def _categorical(rng: np.random.Generator, unnormalized: np.ndarray) -> int:
    cumulative = np.cumsum(unnormalized)
    u = rng.random() * cumulative[-1]
    return min(int(np.searchsorted(cumulative, u, side="right")), len(cumulative) - 1)


class LdaSampler:
    """Collapsed Gibbs chain over a corpus of integer token-id documents."""

    def __init__(
        self,
        docs: Sequence[Sequence[int]],
        vocab_size: int,
        n_topics: int,
        hyper: Hyperparams | None = None,
        seed: int = 0,
        rng: np.random.Generator | None = None,
    ):
        if n_topics < 1:
            raise ValueError(f"n_topics must be >= 1, got {n_topics}")
        if not docs:
            raise ValueError("corpus must contain at least one document")
        self.docs = [np.asarray(d, dtype=np.int64) for d in docs]
        if any(len(d) and (d.min() < 0 or d.max() >= vocab_size) for d in self.docs):
            raise ValueError("token id out of vocabulary range")
        self.vocab_size = int(vocab_size)
        self.n_topics = int(n_topics)
        self.hyper = hyper or Hyperparams()
        self.seed = int(seed)
        self.rng = rng if rng is not None else make_rng(seed)
        self.sweep_counter = 0
        self.history = None

        D, T = len(self.docs), self.n_topics
        self.doc_topic_counts = np.zeros((D, T), dtype=np.int64)
        self.word_topic_counts = np.zeros((self.vocab_size, T), dtype=np.int64)
        self.topic_totals = np.zeros(T, dtype=np.int64)
        self.doc_lengths = np.array([len(d) for d in self.docs], dtype=np.int64)

        self.assignments = [
            self.rng.integers(0, T, size=len(d), dtype=np.int64) for d in self.docs
        ]
        for d, (ids, zs) in enumerate(zip(self.docs, self.assignments)):
            np.add.at(self.doc_topic_counts[d], zs, 1)
            np.add.at(self.word_topic_counts, (ids, zs), 1)
            np.add.at(self.topic_totals, zs, 1)

    @classmethod
    def from_corpus(cls, corpus, n_topics: int, hyper: Hyperparams | None = None, seed: int = 0):
        return cls(
            docs=[d.token_ids for d in corpus.docs],
            vocab_size=len(corpus.vocab),
            n_topics=n_topics,
            hyper=hyper,
            seed=seed,
        )

    @property
    def num_docs(self) -> int:
        return len(self.docs)

    def conditional(self, d: int, i: int) -> np.ndarray:
        """Normalized full-conditional topic distribution for token i of doc d,
        with the token's current assignment excluded from all counts."""
        word = self.docs[d][i]
        current = self.assignments[d][i]
        doc_counts = self.doc_topic_counts[d].astype(np.float64)
        word_counts = self.word_topic_counts[word].astype(np.float64)
        totals = self.topic_totals.astype(np.float64)
        doc_counts[current] -= 1
        word_counts[current] -= 1
        totals[current] -= 1
        p = self._conditional_from_counts(doc_counts, word_counts, totals)
        return p / p.sum()

    def _conditional_from_counts(self, doc_counts, word_counts, totals) -> np.ndarray:
        h = self.hyper
        T = self.n_topics
        return (
            (doc_counts + h.alpha)
            / (doc_counts.sum() + T * h.alpha)
            * (word_counts + h.beta)
            / (totals + self.vocab_size * h.beta)
        )

    def sweep(self) -> None:
        """Resample every token once, in document then position order."""
        h = self.hyper
        alpha, beta = h.alpha, h.beta
        w_beta = self.vocab_size * beta
        rng = self.rng
        word_topic = self.word_topic_counts
        totals = self.topic_totals
        for d, (ids, zs) in enumerate(zip(self.docs, self.assignments)):
            doc_counts = self.doc_topic_counts[d]
            for i in range(len(ids)):
                w = ids[i]
                t_old = zs[i]
                doc_counts[t_old] -= 1
                word_topic[w, t_old] -= 1
                totals[t_old] -= 1
                p = (doc_counts + alpha) * (word_topic[w] + beta) / (totals + w_beta)
                t_new = _categorical(rng, p)
                zs[i] = t_new
                doc_counts[t_new] += 1
                word_topic[w, t_new] += 1
                totals[t_new] += 1
        self.sweep_counter += 1
        if self.history is not None:
            self.history.append(self.doc_topic_counts.copy())

    def run(self, n_sweeps: int) -> None:
        for _ in range(n_sweeps):
            self.sweep()

    def retain_feature_history(self, capacity: int) -> None:
        """Keep per-document topic-count snapshots of the last `capacity`
        sweeps for sample-averaged features."""
        from collections import deque

        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.history = deque(maxlen=capacity)

    def doc_topic_dist(self) -> np.ndarray:
        """Posterior-mean document-topic mixtures, rows summing to 1."""
        h = self.hyper
        numer = self.doc_topic_counts + h.alpha
        return numer / (self.doc_lengths[:, None] + self.n_topics * h.alpha)

    def topic_word_dist(self) -> np.ndarray:
        """Posterior-mean topic-word distributions, one row per topic."""
        h = self.hyper
        numer = self.word_topic_counts.T + h.beta
        return numer / (self.topic_totals[:, None] + self.vocab_size * h.beta)

    def log_likelihood(self) -> float:
        """Collapsed joint log p(words, assignments) with multinomials
        integrated out: a product of Dirichlet-multinomial normalizers
        over documents and topics."""
        h = self.hyper
        T, W = self.n_topics, self.vocab_size
        doc_part = (
            self.num_docs * (gammaln(T * h.alpha) - T * gammaln(h.alpha))
            + gammaln(self.doc_topic_counts + h.alpha).sum()
            - gammaln(self.doc_lengths + T * h.alpha).sum()
        )
        word_part = (
            T * (gammaln(W * h.beta) - W * gammaln(h.beta))
            + gammaln(self.word_topic_counts + h.beta).sum()
            - gammaln(self.topic_totals + W * h.beta).sum()
        )
        return float(doc_part + word_part)

    def check_invariants(self) -> None:
        """Hard consistency check of count tables against assignments."""
        doc_sums = self.doc_topic_counts.sum(axis=1)
        if not np.array_equal(doc_sums, self.doc_lengths):
            raise AssertionError("document-topic counts do not sum to document lengths")
        if not np.array_equal(self.word_topic_counts.sum(axis=0), self.topic_totals):
            raise AssertionError("word-topic counts do not sum to topic totals")
        if not np.array_equal(self.doc_topic_counts.sum(axis=0), self.topic_totals):
            raise AssertionError("document-topic and word-topic totals disagree")
        for zs in self.assignments:
            if len(zs) and (zs.min() < 0 or zs.max() >= self.n_topics):
                raise AssertionError("assignment out of topic range")


def top_words(row: np.ndarray, k: int) -> list[tuple[int, float]]:
    """Top-k (word id, probability) pairs of one distribution row,
    descending by probability with ties broken by ascending id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k = min(k, len(row))
    order = np.lexsort((np.arange(len(row)), -np.asarray(row, dtype=np.float64)))
    return [(int(i), float(row[i])) for i in order[:k]]


def top_words_named(row: np.ndarray, vocab, k: int) -> list[tuple[str, float]]:
    return [(vocab.word_of(i), p) for i, p in top_words(row, k)]
