"""Annotated corpora and bimodal vocabulary partitioning.

A corpus arrives as JSONL of annotated documents (lemmatized tokens with
POS and named-entity tags).  A partition scheme routes every token either
to the topical modality or to the opinion modality, producing a
:class:`BimodalCorpus` with two disjoint vocabularies.  A flat, single
vocabulary view (:class:`UnimodalCorpus`) is used by the plain LDA
baseline.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class Pos(str, Enum):
    NOUN = "NOUN"
    ADJ = "ADJ"
    ADV = "ADV"
    VERB = "VERB"
    OTHER = "OTHER"


class NeClass(str, Enum):
    PERSON = "PERSON"
    ORGANIZATION = "ORGANIZATION"
    LOCATION = "LOCATION"
    MISC = "MISC"


class Viewpoint(IntEnum):
    """Document-level stance label; the integer value is the SVM target."""

    PALESTINIAN = -1
    ISRAELI = 1

    @classmethod
    def from_string(cls, s: str) -> "Viewpoint":
        try:
            return cls[s.upper()]
        except KeyError:
            raise ValueError(f"unknown viewpoint label {s!r}") from None


class Modality(Enum):
    TOPICAL = "topical"
    OPINION = "opinion"


class ParseError(ValueError):
    """Malformed corpus input; carries the offending 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str
    pos: Pos
    ne: NeClass | None = None

    def __post_init__(self) -> None:
        for name in ("surface", "lemma"):
            value = getattr(self, name)
            if not value or any(c.isspace() for c in value):
                raise ValueError(f"{name} must be non-empty without whitespace: {value!r}")
            if value != value.lower():
                raise ValueError(f"{name} must be lowercase: {value!r}")

    @property
    def is_named_entity(self) -> bool:
        return self.ne is not None


@dataclass
class RawDocument:
    doc_id: str
    label: Viewpoint | None
    tokens: list[AnnotatedToken]


class PartitionScheme(str, Enum):
    """Routing rule from (POS, named-entity flag) to a modality.

    Whenever the scheme includes named entities, the NE flag takes
    precedence over POS.  Tokens tagged OTHER are dropped unless they are
    named entities under an NE-including scheme.
    """

    OPINION_NE = "opinion_ne"  # opinion: ADJ/ADV/VERB + all NEs; topical: NOUN
    OPINION = "opinion"        # opinion: ADJ/ADV/VERB; topical: NOUN (NE ignored)
    ADJ_NE = "adj_ne"          # opinion: ADJ + all NEs; topical: NOUN/ADV/VERB
    NE = "ne"                  # opinion: all NEs; topical: NOUN/ADJ/ADV/VERB

    @property
    def includes_named_entities(self) -> bool:
        return self is not PartitionScheme.OPINION

    def route(self, pos: Pos, is_named_entity: bool) -> Modality | None:
        """Return the modality for one token occurrence, or None to drop it."""
        if self.includes_named_entities and is_named_entity:
            return Modality.OPINION
        if pos is Pos.OTHER:
            return None
        if pos in _OPINION_POS[self]:
            return Modality.OPINION
        return Modality.TOPICAL


_OPINION_POS = {
    PartitionScheme.OPINION_NE: frozenset({Pos.ADJ, Pos.ADV, Pos.VERB}),
    PartitionScheme.OPINION: frozenset({Pos.ADJ, Pos.ADV, Pos.VERB}),
    PartitionScheme.ADJ_NE: frozenset({Pos.ADJ}),
    PartitionScheme.NE: frozenset(),
}


@dataclass(frozen=True)
class Vocabulary:
    """Bidirectional word <-> integer id table with lexicographic ids."""

    words: tuple[str, ...]
    index: dict[str, int] = field(repr=False)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        ordered = tuple(sorted(set(words)))
        return cls(words=ordered, index={w: i for i, w in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def id_of(self, word: str) -> int:
        return self.index[word]

    def word_of(self, word_id: int) -> str:
        return self.words[word_id]


@dataclass
class BimodalDocument:
    doc_id: str
    label: Viewpoint | None
    topical_ids: np.ndarray
    opinion_ids: np.ndarray

    @property
    def num_topical(self) -> int:
        return len(self.topical_ids)

    @property
    def num_opinion(self) -> int:
        return len(self.opinion_ids)


@dataclass
class BimodalCorpus:
    topical_vocab: Vocabulary
    opinion_vocab: Vocabulary
    docs: tuple[BimodalDocument, ...]
    scheme: PartitionScheme
    min_count: int = 1

    @property
    def num_docs(self) -> int:
        return len(self.docs)

    @property
    def labels(self) -> tuple[Viewpoint | None, ...]:
        return tuple(d.label for d in self.docs)

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.docs)


@dataclass
class UnimodalDocument:
    doc_id: str
    label: Viewpoint | None
    token_ids: np.ndarray


@dataclass
class UnimodalCorpus:
    vocab: Vocabulary
    docs: tuple[UnimodalDocument, ...]

    @property
    def num_docs(self) -> int:
        return len(self.docs)

    @property
    def labels(self) -> tuple[Viewpoint | None, ...]:
        return tuple(d.label for d in self.docs)

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.docs)


_POS_VALUES = {p.value for p in Pos}
_NE_VALUES = {n.value for n in NeClass}
_LABELS = {"palestinian": Viewpoint.PALESTINIAN, "israeli": Viewpoint.ISRAELI}


def _parse_token(obj: object, line_number: int) -> AnnotatedToken:
    if not isinstance(obj, dict):
        raise ParseError(line_number, f"token must be an object, got {type(obj).__name__}")
    surface = obj.get("surface")
    lemma = obj.get("lemma")
    pos = obj.get("pos")
    ne = obj.get("ne")
    if not isinstance(surface, str) or not isinstance(lemma, str):
        raise ParseError(line_number, "token surface and lemma must be strings")
    if pos not in _POS_VALUES:
        raise ParseError(line_number, f"unknown pos tag {pos!r}")
    if ne is not None and ne not in _NE_VALUES:
        raise ParseError(line_number, f"unknown ne class {ne!r}")
    try:
        return AnnotatedToken(
            surface=surface,
            lemma=lemma,
            pos=Pos(pos),
            ne=NeClass(ne) if ne is not None else None,
        )
    except ValueError as exc:
        raise ParseError(line_number, str(exc)) from None


def load_annotated_corpus(path) -> list[RawDocument]:
    """Load annotated documents from a JSONL file, one document per line.

    Raises :class:`ParseError` naming the offending line for malformed
    input and ValueError for duplicate doc ids.
    """
    documents: list[RawDocument] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_number, f"invalid JSON: {exc.msg}") from None
            if not isinstance(record, dict):
                raise ParseError(line_number, "document must be a JSON object")
            doc_id = record.get("doc_id")
            if not isinstance(doc_id, str) or not doc_id:
                raise ParseError(line_number, "doc_id must be a non-empty string")
            if doc_id in seen_ids:
                raise ValueError(f"duplicate doc_id {doc_id!r} on line {line_number}")
            seen_ids.add(doc_id)
            label_raw = record.get("label")
            if label_raw is None:
                label = None
            elif isinstance(label_raw, str) and label_raw in _LABELS:
                label = _LABELS[label_raw]
            else:
                raise ParseError(line_number, f"unknown label {label_raw!r}")
            tokens_raw = record.get("tokens")
            if not isinstance(tokens_raw, list):
                raise ParseError(line_number, "tokens must be an array")
            tokens = [_parse_token(t, line_number) for t in tokens_raw]
            documents.append(RawDocument(doc_id=doc_id, label=label, tokens=tokens))
    return documents


def write_annotated_corpus(documents: Sequence[RawDocument], path) -> None:
    """Write documents in the annotated-corpus JSONL schema."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            record = {
                "doc_id": doc.doc_id,
                "label": doc.label.name.lower() if doc.label is not None else None,
                "tokens": [
                    {
                        "surface": t.surface,
                        "lemma": t.lemma,
                        "pos": t.pos.value,
                        "ne": t.ne.value if t.ne is not None else None,
                    }
                    for t in doc.tokens
                ],
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def apply_partition(
    documents: Sequence[RawDocument],
    scheme: PartitionScheme,
    min_count: int = 1,
) -> BimodalCorpus:
    """Partition each document's tokens into topical and opinion id sequences.

    Lemmas occurring fewer than ``min_count`` times corpus-wide (over
    retained occurrences) are dropped.  A lemma that routes to both
    modalities across occurrences (NE tagging is rarely consistent) is
    resolved corpus-wide to its majority modality, ties going to opinion,
    so that the two vocabularies stay disjoint.  Documents left empty in
    both modalities are dropped with a warning.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    scheme = PartitionScheme(scheme)

    routed_docs: list[list[tuple[str, Modality]]] = []
    occurrences: Counter[str] = Counter()
    opinion_occurrences: Counter[str] = Counter()
    for doc in documents:
        routed: list[tuple[str, Modality]] = []
        for token in doc.tokens:
            modality = scheme.route(token.pos, token.is_named_entity)
            if modality is None:
                continue
            routed.append((token.lemma, modality))
            occurrences[token.lemma] += 1
            if modality is Modality.OPINION:
                opinion_occurrences[token.lemma] += 1
        routed_docs.append(routed)

    # Majority vote per lemma; ties go to opinion.
    resolved: dict[str, Modality] = {}
    for lemma, total in occurrences.items():
        if total < min_count:
            continue
        n_opinion = opinion_occurrences[lemma]
        resolved[lemma] = (
            Modality.OPINION if n_opinion >= total - n_opinion else Modality.TOPICAL
        )

    topical_vocab = Vocabulary.from_words(
        w for w, m in resolved.items() if m is Modality.TOPICAL
    )
    opinion_vocab = Vocabulary.from_words(
        w for w, m in resolved.items() if m is Modality.OPINION
    )

    docs: list[BimodalDocument] = []
    dropped: list[str] = []
    for doc, routed in zip(documents, routed_docs):
        topical_ids = [
            topical_vocab.id_of(lemma)
            for lemma, _ in routed
            if resolved.get(lemma) is Modality.TOPICAL
        ]
        opinion_ids = [
            opinion_vocab.id_of(lemma)
            for lemma, _ in routed
            if resolved.get(lemma) is Modality.OPINION
        ]
        if not topical_ids and not opinion_ids:
            dropped.append(doc.doc_id)
            continue
        docs.append(
            BimodalDocument(
                doc_id=doc.doc_id,
                label=doc.label,
                topical_ids=np.asarray(topical_ids, dtype=np.int64),
                opinion_ids=np.asarray(opinion_ids, dtype=np.int64),
            )
        )
    if dropped:
        logger.warning(
            "dropped %d document(s) empty under scheme %s: %s",
            len(dropped), scheme.value, ", ".join(dropped[:10]),
        )
    if documents and not docs:
        raise ValueError(f"all {len(documents)} documents empty under scheme {scheme.value}")

    return BimodalCorpus(
        topical_vocab=topical_vocab,
        opinion_vocab=opinion_vocab,
        docs=tuple(docs),
        scheme=scheme,
        min_count=min_count,
    )


def build_unimodal(documents: Sequence[RawDocument], min_count: int = 1) -> UnimodalCorpus:
    """Flat single-vocabulary corpus over NOUN/ADJ/ADV/VERB tokens.

    This is the input for the LDA baseline; OTHER-tagged tokens are
    always dropped here, named entity or not.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    kept_docs: list[list[str]] = []
    occurrences: Counter[str] = Counter()
    for doc in documents:
        kept = [t.lemma for t in doc.tokens if t.pos is not Pos.OTHER]
        occurrences.update(kept)
        kept_docs.append(kept)

    vocab = Vocabulary.from_words(
        w for w, n in occurrences.items() if n >= min_count
    )
    docs: list[UnimodalDocument] = []
    dropped: list[str] = []
    for doc, lemmas in zip(documents, kept_docs):
        ids = [vocab.id_of(w) for w in lemmas if w in vocab]
        if not ids:
            dropped.append(doc.doc_id)
            continue
        docs.append(
            UnimodalDocument(
                doc_id=doc.doc_id,
                label=doc.label,
                token_ids=np.asarray(ids, dtype=np.int64),
            )
        )
    if dropped:
        logger.warning("dropped %d empty document(s): %s", len(dropped), ", ".join(dropped[:10]))
    if documents and not docs:
        raise ValueError(f"all {len(documents)} documents empty after filtering")
    return UnimodalCorpus(vocab=vocab, docs=tuple(docs))


@dataclass
class CorpusStats:
    num_docs: int
    topical_vocab_size: int
    opinion_vocab_size: int
    total_topical_tokens: int
    total_opinion_tokens: int
    label_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "num_docs": self.num_docs,
            "topical_vocab_size": self.topical_vocab_size,
            "opinion_vocab_size": self.opinion_vocab_size,
            "total_topical_tokens": self.total_topical_tokens,
            "total_opinion_tokens": self.total_opinion_tokens,
            "label_counts": dict(sorted(self.label_counts.items())),
        }


def corpus_stats(corpus: BimodalCorpus) -> CorpusStats:
    label_counts = {"palestinian": 0, "israeli": 0, "unlabeled": 0}
    for doc in corpus.docs:
        if doc.label is None:
            label_counts["unlabeled"] += 1
        else:
            label_counts[doc.label.name.lower()] += 1
    return CorpusStats(
        num_docs=corpus.num_docs,
        topical_vocab_size=len(corpus.topical_vocab),
        opinion_vocab_size=len(corpus.opinion_vocab),
        total_topical_tokens=sum(d.num_topical for d in corpus.docs),
        total_opinion_tokens=sum(d.num_opinion for d in corpus.docs),
        label_counts=label_counts,
    )
