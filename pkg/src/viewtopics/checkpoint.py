"""Deterministic JSON checkpoints of sampler states.

A checkpoint stores the assignment arrays (the collapsed state), the
configuration that produced them, and a hash of the corpus file; count
tables are rebuilt on load and cross-checked.  Restoring yields a state
suitable for feature extraction and analysis.  It does not resume the
chain bit-exactly: the generator state is not captured, so further
sweeps diverge from an uninterrupted run.

The byte layout is stable: compact JSON with sorted keys and a trailing
newline, so identical states serialize identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import BimodalCorpus, UnimodalCorpus
from .corrlda2 import CorrLda2Sampler
from .lda import Hyperparams, LdaSampler

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Checkpoint:
    kind: str
    config: dict
    corpus_sha256: str
    sweep_counter: int
    topical_assignments: list[list[int]]
    supertopics: list[list[int]] | None
    aspects: list[list[int]] | None


def corpus_file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def save_checkpoint(
    path: str | Path,
    sampler: LdaSampler | CorrLda2Sampler,
    config: dict,
    corpus_sha256: str,
) -> None:
    bimodal = isinstance(sampler, CorrLda2Sampler)
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "corrlda2" if bimodal else "lda",
        "config": config,
        "corpus_sha256": corpus_sha256,
        "sweep_counter": sampler.sweep_counter,
        "topical_assignments": [
            np.asarray(z).tolist()
            for z in (sampler.topical_assignments if bimodal else sampler.assignments)
        ],
    }
    if bimodal:
        payload["supertopics"] = [z.tolist() for z in sampler.supertopics]
        payload["aspects"] = [z.tolist() for z in sampler.aspects]
    text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    Path(path).write_text(text)


def load_checkpoint(path: str | Path) -> Checkpoint:
    payload = json.loads(Path(path).read_text())
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format version: {version!r}")
    kind = payload["kind"]
    if kind not in ("lda", "corrlda2"):
        raise ValueError(f"unknown checkpoint kind: {kind!r}")
    return Checkpoint(
        kind=kind,
        config=payload["config"],
        corpus_sha256=payload["corpus_sha256"],
        sweep_counter=int(payload["sweep_counter"]),
        topical_assignments=payload["topical_assignments"],
        supertopics=payload.get("supertopics"),
        aspects=payload.get("aspects"),
    )


def _rebuild_lda_counts(sampler: LdaSampler) -> None:
    sampler.doc_topic_counts[:] = 0
    sampler.word_topic_counts[:] = 0
    sampler.topic_totals[:] = 0
    for d, (ids, zs) in enumerate(zip(sampler.docs, sampler.assignments)):
        np.add.at(sampler.doc_topic_counts[d], zs, 1)
        np.add.at(sampler.word_topic_counts, (ids, zs), 1)
        np.add.at(sampler.topic_totals, zs, 1)


def restore_lda(
    checkpoint: Checkpoint, corpus: UnimodalCorpus, n_topics: int,
    hyper: Hyperparams, seed: int,
) -> LdaSampler:
    sampler = LdaSampler.from_corpus(corpus, n_topics=n_topics, hyper=hyper, seed=seed)
    if len(checkpoint.topical_assignments) != sampler.num_docs:
        raise ValueError("checkpoint document count does not match corpus")
    sampler.assignments = [
        np.asarray(z, dtype=np.int64) for z in checkpoint.topical_assignments
    ]
    for ids, zs in zip(sampler.docs, sampler.assignments):
        if len(ids) != len(zs):
            raise ValueError("checkpoint assignment length does not match document")
    _rebuild_lda_counts(sampler)
    sampler.sweep_counter = checkpoint.sweep_counter
    sampler.check_invariants()
    return sampler


def restore_corrlda2(
    checkpoint: Checkpoint, corpus: BimodalCorpus, n_topics: int, n_aspects: int,
    hyper: Hyperparams, seed: int,
) -> CorrLda2Sampler:
    if checkpoint.supertopics is None or checkpoint.aspects is None:
        raise ValueError("checkpoint lacks opinion-modality assignments")
    sampler = CorrLda2Sampler.from_corpus(
        corpus, n_topics=n_topics, n_aspects=n_aspects, hyper=hyper, seed=seed
    )
    if len(checkpoint.topical_assignments) != sampler.num_docs:
        raise ValueError("checkpoint document count does not match corpus")
    inner = sampler._topical
    inner.assignments = [
        np.asarray(z, dtype=np.int64) for z in checkpoint.topical_assignments
    ]
    for ids, zs in zip(inner.docs, inner.assignments):
        if len(ids) != len(zs):
            raise ValueError("checkpoint assignment length does not match document")
    _rebuild_lda_counts(inner)

    sampler.supertopics = [np.asarray(z, dtype=np.int64) for z in checkpoint.supertopics]
    sampler.aspects = [np.asarray(z, dtype=np.int64) for z in checkpoint.aspects]
    sampler.aspect_topic_counts[:] = 0
    sampler.word_aspect_counts[:] = 0
    sampler.opinion_per_topic[:] = 0
    sampler.aspect_totals[:] = 0
    sampler.doc_aspect_counts[:] = 0
    sampler.doc_supertopic_counts[:] = 0
    for d, (words, xs, zs) in enumerate(
        zip(sampler.opinion_docs, sampler.supertopics, sampler.aspects)
    ):
        if len(words) != len(xs) or len(words) != len(zs):
            raise ValueError("checkpoint assignment length does not match document")
        if len(words) == 0 or not sampler.included[d]:
            continue
        np.add.at(sampler.aspect_topic_counts, (zs, xs), 1)
        np.add.at(sampler.word_aspect_counts, (words, zs), 1)
        np.add.at(sampler.opinion_per_topic, xs, 1)
        np.add.at(sampler.aspect_totals, zs, 1)
        np.add.at(sampler.doc_aspect_counts[d], zs, 1)
        np.add.at(sampler.doc_supertopic_counts[d], xs, 1)
    sampler.sweep_counter = checkpoint.sweep_counter
    sampler.check_invariants()
    return sampler
