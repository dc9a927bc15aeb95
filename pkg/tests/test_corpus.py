import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viewtopics.corpus import (
    AnnotatedToken,
    Modality,
    NeClass,
    ParseError,
    PartitionScheme,
    Pos,
    RawDocument,
    Viewpoint,
    Vocabulary,
    apply_partition,
    build_unimodal,
    corpus_stats,
    load_annotated_corpus,
    write_annotated_corpus,
)


def tok(lemma: str, pos: Pos = Pos.NOUN, ne: NeClass | None = None) -> AnnotatedToken:
    return AnnotatedToken(surface=lemma, lemma=lemma, pos=pos, ne=ne)


def doc(doc_id: str, tokens, label: Viewpoint | None = None) -> RawDocument:
    return RawDocument(doc_id=doc_id, label=label, tokens=list(tokens))


class TestViewpoint:
    def test_integer_values_are_svm_targets(self):
        assert int(Viewpoint.PALESTINIAN) == -1
        assert int(Viewpoint.ISRAELI) == 1

    @pytest.mark.parametrize("text,expected", [
        ("palestinian", Viewpoint.PALESTINIAN),
        ("ISRAELI", Viewpoint.ISRAELI),
        ("Israeli", Viewpoint.ISRAELI),
    ])
    def test_from_string(self, text, expected):
        assert Viewpoint.from_string(text) is expected

    def test_from_string_rejects_unknown(self):
        with pytest.raises(ValueError, match="unknown viewpoint"):
            Viewpoint.from_string("neutral")


class TestAnnotatedToken:
    def test_named_entity_flag(self):
        assert tok("sharon", ne=NeClass.PERSON).is_named_entity
        assert not tok("sharon").is_named_entity

    @pytest.mark.parametrize("bad", ["", "two words", "Upper", "tab\tby"])
    def test_rejects_bad_lemmas(self, bad):
        with pytest.raises(ValueError):
            AnnotatedToken(surface="ok", lemma=bad, pos=Pos.NOUN)
        with pytest.raises(ValueError):
            AnnotatedToken(surface=bad, lemma="ok", pos=Pos.NOUN)


class TestRouting:
    def test_totality_over_all_cases(self):
        # Every (scheme, pos, ne) combination must resolve without error.
        for scheme in PartitionScheme:
            for pos in Pos:
                for ne in (False, True):
                    result = scheme.route(pos, ne)
                    assert result in (Modality.TOPICAL, Modality.OPINION, None)

    @pytest.mark.parametrize("scheme,pos,ne,expected", [
        (PartitionScheme.OPINION_NE, Pos.NOUN, False, Modality.TOPICAL),
        (PartitionScheme.OPINION_NE, Pos.NOUN, True, Modality.OPINION),
        (PartitionScheme.OPINION_NE, Pos.ADJ, False, Modality.OPINION),
        (PartitionScheme.OPINION_NE, Pos.ADV, False, Modality.OPINION),
        (PartitionScheme.OPINION_NE, Pos.VERB, False, Modality.OPINION),
        (PartitionScheme.OPINION_NE, Pos.OTHER, False, None),
        (PartitionScheme.OPINION_NE, Pos.OTHER, True, Modality.OPINION),
        (PartitionScheme.OPINION, Pos.NOUN, True, Modality.TOPICAL),
        (PartitionScheme.OPINION, Pos.VERB, True, Modality.OPINION),
        (PartitionScheme.OPINION, Pos.OTHER, True, None),
        (PartitionScheme.ADJ_NE, Pos.VERB, False, Modality.TOPICAL),
        (PartitionScheme.ADJ_NE, Pos.ADV, False, Modality.TOPICAL),
        (PartitionScheme.ADJ_NE, Pos.ADJ, False, Modality.OPINION),
        (PartitionScheme.ADJ_NE, Pos.NOUN, True, Modality.OPINION),
        (PartitionScheme.NE, Pos.ADJ, False, Modality.TOPICAL),
        (PartitionScheme.NE, Pos.VERB, False, Modality.TOPICAL),
        (PartitionScheme.NE, Pos.NOUN, True, Modality.OPINION),
        (PartitionScheme.NE, Pos.OTHER, True, Modality.OPINION),
    ])
    def test_routing_table(self, scheme, pos, ne, expected):
        assert scheme.route(pos, ne) is expected

    def test_only_plain_opinion_scheme_ignores_entities(self):
        for scheme in PartitionScheme:
            expected = scheme is not PartitionScheme.OPINION
            assert scheme.includes_named_entities is expected


class TestVocabulary:
    def test_lexicographic_ids(self):
        vocab = Vocabulary.from_words(["wall", "border", "wall", "army"])
        assert [vocab.word_of(i) for i in range(len(vocab))] == ["army", "border", "wall"]
        assert vocab.id_of("border") == 1
        assert "wall" in vocab and "fence" not in vocab

    def test_unknown_lookups_raise(self):
        vocab = Vocabulary.from_words(["army"])
        with pytest.raises(KeyError):
            vocab.id_of("navy")
        with pytest.raises(IndexError):
            vocab.word_of(1)


class TestLoadAnnotatedCorpus:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert load_annotated_corpus(path) == []

    def test_single_document(self, tmp_path):
        record = {
            "doc_id": "a1",
            "label": "israeli",
            "tokens": [
                {"surface": "the", "lemma": "the", "pos": "OTHER", "ne": None},
                {"surface": "wall", "lemma": "wall", "pos": "NOUN", "ne": None},
                {"surface": "sharon", "lemma": "sharon", "pos": "NOUN", "ne": "PERSON"},
            ],
        }
        path = tmp_path / "one.jsonl"
        path.write_text(json.dumps(record) + "\n")
        docs = load_annotated_corpus(path)
        assert len(docs) == 1
        assert docs[0].doc_id == "a1"
        assert docs[0].label is Viewpoint.ISRAELI
        assert len(docs[0].tokens) == 3
        assert docs[0].tokens[2].ne is NeClass.PERSON

    def test_unlabeled_document(self, tmp_path):
        path = tmp_path / "u.jsonl"
        path.write_text('{"doc_id": "x", "label": null, "tokens": []}\n')
        assert load_annotated_corpus(path)[0].label is None

    @pytest.mark.parametrize("line,fragment", [
        ('{"doc_id": "a", "label": null, "tokens": [{"surface": "w", "lemma": "w", "pos": "XYZ", "ne": null}]}', "pos"),
        ('{"doc_id": "a", "label": null, "tokens": [{"surface": "w", "lemma": "w", "pos": "NOUN", "ne": "CITY"}]}', "ne"),
        ('{"doc_id": "a", "label": "french", "tokens": []}', "label"),
        ('{"doc_id": "", "label": null, "tokens": []}', "doc_id"),
        ('{"doc_id": "a", "label": null, "tokens": {}}', "tokens"),
        ("[1, 2]", "object"),
        ("{not json", "JSON"),
    ])
    def test_malformed_line_number(self, tmp_path, line, fragment):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"doc_id": "ok", "label": null, "tokens": []}\n' + line + "\n")
        with pytest.raises(ParseError, match=fragment) as exc_info:
            load_annotated_corpus(path)
        assert exc_info.value.line_number == 2

    def test_duplicate_doc_id(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        path.write_text(
            '{"doc_id": "a", "label": null, "tokens": []}\n'
            '{"doc_id": "a", "label": null, "tokens": []}\n'
        )
        with pytest.raises(ValueError, match="duplicate"):
            load_annotated_corpus(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "blank.jsonl"
        path.write_text('\n{"doc_id": "a", "label": null, "tokens": []}\n\n')
        assert len(load_annotated_corpus(path)) == 1

    def test_round_trip(self, tmp_path):
        docs = [
            doc("d0", [tok("wall"), tok("harsh", Pos.ADJ)], Viewpoint.PALESTINIAN),
            doc("d1", [tok("sharon", Pos.NOUN, NeClass.PERSON)], None),
        ]
        path = tmp_path / "rt.jsonl"
        write_annotated_corpus(docs, path)
        assert load_annotated_corpus(path) == docs


class TestApplyPartition:
    def test_spec_routing_examples(self):
        docs = [doc("d0", [
            tok("occupation", Pos.NOUN),
            tok("sharon", Pos.NOUN, NeClass.PERSON),
            tok("harsh", Pos.ADJ),
        ])]
        corpus = apply_partition(docs, PartitionScheme.OPINION_NE)
        assert "occupation" in corpus.topical_vocab
        assert "sharon" in corpus.opinion_vocab
        assert "harsh" in corpus.opinion_vocab

        corpus = apply_partition(docs, PartitionScheme.OPINION)
        assert "sharon" in corpus.topical_vocab

    def test_vocabularies_disjoint_and_sorted(self):
        docs = [doc("d0", [tok("b"), tok("a"), tok("c", Pos.ADJ), tok("a")])]
        corpus = apply_partition(docs, PartitionScheme.OPINION_NE)
        topical = set(corpus.topical_vocab.words)
        opinion = set(corpus.opinion_vocab.words)
        assert topical == {"a", "b"} and opinion == {"c"}
        assert corpus.topical_vocab.words == ("a", "b")
        np.testing.assert_array_equal(corpus.docs[0].topical_ids, [1, 0, 0])

    def test_min_count_filters_rare_lemmas(self):
        docs = [doc("d0", [tok("wall"), tok("wall"), tok("fence")])]
        corpus = apply_partition(docs, PartitionScheme.OPINION_NE, min_count=2)
        assert "wall" in corpus.topical_vocab
        assert "fence" not in corpus.topical_vocab
        assert corpus.docs[0].num_topical == 2

    def test_min_count_validation(self):
        with pytest.raises(ValueError, match="min_count"):
            apply_partition([doc("d0", [tok("w")])], PartitionScheme.OPINION_NE, min_count=0)

    def test_split_lemma_resolved_by_majority(self):
        # "hamas" appears twice NE-tagged, once untagged: majority is opinion.
        docs = [doc("d0", [
            tok("hamas", Pos.NOUN, NeClass.ORGANIZATION),
            tok("hamas", Pos.NOUN, NeClass.ORGANIZATION),
            tok("hamas", Pos.NOUN),
            tok("wall", Pos.NOUN),
        ])]
        corpus = apply_partition(docs, PartitionScheme.OPINION_NE)
        assert "hamas" in corpus.opinion_vocab
        assert "hamas" not in corpus.topical_vocab
        assert corpus.docs[0].num_opinion == 3

    def test_split_lemma_tie_goes_to_opinion(self):
        docs = [doc("d0", [tok("hamas", Pos.NOUN, NeClass.ORGANIZATION), tok("hamas", Pos.NOUN)])]
        corpus = apply_partition(docs, PartitionScheme.OPINION_NE)
        assert "hamas" in corpus.opinion_vocab

    def test_empty_documents_dropped_with_warning(self, caplog):
        docs = [
            doc("keep", [tok("wall")]),
            doc("gone", [tok("the", Pos.OTHER)]),
        ]
        with caplog.at_level("WARNING"):
            corpus = apply_partition(docs, PartitionScheme.OPINION_NE)
        assert corpus.doc_ids == ("keep",)
        assert "gone" in caplog.text

    def test_all_documents_dropped_is_an_error(self):
        docs = [doc("d0", [tok("the", Pos.OTHER)])]
        with pytest.raises(ValueError, match="empty"):
            apply_partition(docs, PartitionScheme.OPINION_NE)

    def test_deterministic(self):
        docs = [
            doc("d0", [tok("wall"), tok("harsh", Pos.ADJ)], Viewpoint.ISRAELI),
            doc("d1", [tok("border"), tok("wall")], Viewpoint.PALESTINIAN),
        ]
        a = apply_partition(docs, PartitionScheme.OPINION_NE)
        b = apply_partition(docs, PartitionScheme.OPINION_NE)
        assert a.topical_vocab == b.topical_vocab
        assert a.opinion_vocab == b.opinion_vocab
        for da, db in zip(a.docs, b.docs):
            np.testing.assert_array_equal(da.topical_ids, db.topical_ids)
            np.testing.assert_array_equal(da.opinion_ids, db.opinion_ids)

    def test_token_conservation(self):
        docs = [
            doc("d0", [tok("wall"), tok("harsh", Pos.ADJ), tok("the", Pos.OTHER)]),
            doc("d1", [tok("strike", Pos.VERB), tok("border")]),
        ]
        corpus = apply_partition(docs, PartitionScheme.OPINION_NE)
        retained = sum(
            1 for d in docs for t in d.tokens
            if PartitionScheme.OPINION_NE.route(t.pos, t.is_named_entity) is not None
        )
        assert sum(d.num_topical + d.num_opinion for d in corpus.docs) == retained


class TestCorpusStats:
    def test_counting_example(self):
        docs = [
            doc("d0", [tok("a"), tok("b"), tok("a"), tok("x", Pos.ADJ)], Viewpoint.PALESTINIAN),
            doc("d1", [tok("c"), tok("a")], Viewpoint.ISRAELI),
        ]
        stats = corpus_stats(apply_partition(docs, PartitionScheme.OPINION_NE))
        assert stats.num_docs == 2
        assert stats.total_topical_tokens == 5
        assert stats.total_opinion_tokens == 1
        assert stats.topical_vocab_size == 3
        assert stats.opinion_vocab_size == 1
        assert stats.label_counts == {"palestinian": 1, "israeli": 1, "unlabeled": 0}

    def test_to_dict_sorted_keys(self):
        docs = [doc("d0", [tok("a")])]
        payload = corpus_stats(apply_partition(docs, PartitionScheme.OPINION_NE)).to_dict()
        assert list(payload["label_counts"]) == ["israeli", "palestinian", "unlabeled"]
        assert payload["label_counts"]["unlabeled"] == 1


class TestBuildUnimodal:
    def test_other_tokens_always_dropped(self):
        docs = [doc("d0", [tok("wall"), tok("the", Pos.OTHER, NeClass.MISC)])]
        corpus = build_unimodal(docs)
        assert len(corpus.vocab) == 1
        assert corpus.docs[0].token_ids.tolist() == [0]

    def test_single_shared_vocabulary(self):
        docs = [doc("d0", [tok("wall"), tok("harsh", Pos.ADJ), tok("strike", Pos.VERB)])]
        corpus = build_unimodal(docs)
        assert corpus.vocab.words == ("harsh", "strike", "wall")

    def test_min_count(self):
        docs = [doc("d0", [tok("wall"), tok("wall")]), doc("d1", [tok("fence"), tok("wall")])]
        corpus = build_unimodal(docs, min_count=2)
        assert corpus.vocab.words == ("wall",)
        assert corpus.num_docs == 2


_token_strategy = st.builds(
    tok,
    lemma=st.sampled_from([f"w{i}" for i in range(12)]),
    pos=st.sampled_from(list(Pos)),
    ne=st.sampled_from([None, NeClass.PERSON, NeClass.LOCATION]),
)


@settings(max_examples=40, deadline=None)
@given(
    token_lists=st.lists(st.lists(_token_strategy, min_size=0, max_size=8), min_size=1, max_size=5),
    scheme=st.sampled_from(list(PartitionScheme)),
)
def test_partition_properties(token_lists, scheme):
    docs = [doc(f"d{i}", tokens) for i, tokens in enumerate(token_lists)]
    try:
        corpus = apply_partition(docs, scheme)
    except ValueError:
        # Legitimate only when every document routed to nothing.
        assert all(
            scheme.route(t.pos, t.is_named_entity) is None for d in docs for t in d.tokens
        )
        return
    topical = set(corpus.topical_vocab.words)
    opinion = set(corpus.opinion_vocab.words)
    assert not topical & opinion
    for d in corpus.docs:
        assert d.num_topical + d.num_opinion > 0
        assert all(0 <= i < len(corpus.topical_vocab) for i in d.topical_ids)
        assert all(0 <= i < len(corpus.opinion_vocab) for i in d.opinion_ids)
    retained = sum(
        1 for d in docs for t in d.tokens
        if scheme.route(t.pos, t.is_named_entity) is not None
    )
    assert sum(d.num_topical + d.num_opinion for d in corpus.docs) == retained
