import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from test_corpus import doc, tok
from viewtopics.corpus import PartitionScheme, Pos, Viewpoint, apply_partition
from viewtopics.corrlda2 import CorrLda2Sampler
from viewtopics.synthetic import SyntheticSpec, generate_raw_documents
from viewtopics.viewpoints import (
    GroupReport,
    TopicAspectGroups,
    TopicRow,
    analyze_sampler,
    classify_and_score,
    consistency_sweep,
    extract_association_weights,
    form_groups,
    render_group_report,
    split_scores,
    topic_top_words,
    write_sweep_csv,
)


def small_corpus(flip_labels: bool = False):
    pal = Viewpoint.ISRAELI if flip_labels else Viewpoint.PALESTINIAN
    isr = Viewpoint.PALESTINIAN if flip_labels else Viewpoint.ISRAELI
    raw = [
        doc("p0", [tok("wall"), tok("camp"), tok("harsh", Pos.ADJ), tok("cruel", Pos.ADJ)], pal),
        doc("p1", [tok("camp"), tok("wall"), tok("harsh", Pos.ADJ)], pal),
        doc("p2", [tok("wall"), tok("court"), tok("cruel", Pos.ADJ)], pal),
        doc("i0", [tok("army"), tok("border"), tok("safe", Pos.ADJ), tok("calm", Pos.ADJ)], isr),
        doc("i1", [tok("border"), tok("army"), tok("safe", Pos.ADJ)], isr),
        doc("i2", [tok("army"), tok("court"), tok("calm", Pos.ADJ)], isr),
    ]
    return apply_partition(raw, PartitionScheme.OPINION_NE)


class TestFormGroups:
    def test_threshold_rule(self):
        freq = np.array([
            [0.8, 0.65, 0.3, 0.0],
            [0.2, 0.35, 0.7, 0.0],
        ])
        groups = form_groups(freq, threshold=0.7)
        assert groups.members[0] == {0}
        assert groups.members[1] == frozenset()  # 0.7 is not > 0.7
        assert groups.neutral_topics == {1, 2, 3}

    def test_zero_column_is_neutral(self):
        groups = form_groups(np.array([[1.0, 0.0], [0.0, 0.0]]), threshold=0.7)
        assert 1 in groups.neutral_topics

    def test_threshold_validation(self):
        freq = np.array([[1.0], [0.0]])
        with pytest.raises(ValueError, match="threshold"):
            form_groups(freq, threshold=0.0)

    def test_low_threshold_warns(self, caplog):
        with caplog.at_level("WARNING"):
            form_groups(np.array([[1.0], [0.0]]), threshold=0.4)
        assert "disjoint" in caplog.text

    def test_bad_columns_rejected(self):
        with pytest.raises(ValueError, match="sum to 1"):
            form_groups(np.array([[0.5], [0.3]]), threshold=0.7)
        with pytest.raises(ValueError, match="2-d"):
            form_groups(np.array([1.0, 0.0]), threshold=0.7)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        n_topics=st.integers(1, 8),
        threshold=st.floats(0.501, 0.99),
    )
    def test_groups_partition_topics(self, seed, n_topics, threshold):
        rng = np.random.default_rng(seed)
        freq = rng.dirichlet([0.5, 0.5], size=n_topics).T
        zero = rng.random(n_topics) < 0.2
        freq[:, zero] = 0.0
        groups = form_groups(freq, threshold=threshold)
        # Construction alone must satisfy disjointness and coverage.
        union = set().union(*groups.members) | groups.neutral_topics
        assert union == set(range(n_topics))
        assert set(np.flatnonzero(zero).tolist()) <= groups.neutral_topics


class TestGroupInvariants:
    def test_overlapping_groups_rejected(self):
        with pytest.raises(ValueError, match="disjoint"):
            TopicAspectGroups(
                members=(frozenset({0}), frozenset({0})),
                neutral_topics=frozenset({1}),
                threshold=0.7,
                n_topics=2,
            )

    def test_incomplete_coverage_rejected(self):
        with pytest.raises(ValueError, match="cover"):
            TopicAspectGroups(
                members=(frozenset({0}), frozenset()),
                neutral_topics=frozenset(),
                threshold=0.7,
                n_topics=3,
            )

    def test_neutral_overlap_rejected(self):
        with pytest.raises(ValueError, match="neutral"):
            TopicAspectGroups(
                members=(frozenset({0}), frozenset()),
                neutral_topics=frozenset({0, 1}),
                threshold=0.7,
                n_topics=2,
            )


class TestClassifyAndScore:
    def _groups(self):
        return TopicAspectGroups(
            members=(frozenset({0, 1, 2}), frozenset({3, 4})),
            neutral_topics=frozenset({5}),
            threshold=0.7,
            n_topics=6,
        )

    def test_signs_scores_and_ordering(self):
        aspect_w = np.array([-4.01, 4.01])
        topic_w = np.array([-1.7, -5.36, -0.28, 5.84, 0.39, 9.9])
        reports = classify_and_score(self._groups(), aspect_w, topic_w)
        pal, isr = reports
        assert pal.viewpoint is Viewpoint.PALESTINIAN
        assert isr.viewpoint is Viewpoint.ISRAELI
        np.testing.assert_allclose(pal.score, -7.34)
        np.testing.assert_allclose(isr.score, 6.23)
        # Palestinian rows ascend (strongest negative first), Israeli descend.
        assert [r.topic_id for r in pal.topic_rows] == [1, 0, 2]
        assert [r.topic_id for r in isr.topic_rows] == [3, 4]
        # Neutral topic 5 contributes to no score.
        assert all(r.topic_id != 5 for rep in reports for r in rep.topic_rows)

    def test_empty_group_scores_zero(self):
        groups = TopicAspectGroups(
            members=(frozenset({0}), frozenset()),
            neutral_topics=frozenset(),
            threshold=0.7,
            n_topics=1,
        )
        reports = classify_and_score(groups, np.array([-1.0, 2.0]), np.array([3.0]))
        assert reports[1].score == 0.0
        assert reports[1].topic_rows == ()

    def test_zero_aspect_weight_is_israeli(self):
        groups = TopicAspectGroups(
            members=(frozenset({0}),), neutral_topics=frozenset(),
            threshold=0.7, n_topics=1,
        )
        reports = classify_and_score(groups, np.array([0.0]), np.array([1.0]))
        assert reports[0].viewpoint is Viewpoint.ISRAELI

    def test_viewpoint_invariant_under_positive_scaling(self):
        aspect_w = np.array([-4.01, 4.01])
        topic_w = np.arange(6, dtype=float)
        before = [r.viewpoint for r in classify_and_score(self._groups(), aspect_w, topic_w)]
        after = [
            r.viewpoint
            for r in classify_and_score(self._groups(), 37.5 * aspect_w, topic_w)
        ]
        assert before == after

    def test_top_words_attached(self):
        groups = TopicAspectGroups(
            members=(frozenset({0}),), neutral_topics=frozenset({1}),
            threshold=0.7, n_topics=2,
        )
        reports = classify_and_score(
            groups, np.array([1.0]), np.array([0.5, 0.5]),
            topic_top_words=[("wall", "camp"), ("army",)],
        )
        assert reports[0].topic_rows[0].top_words == ("wall", "camp")

    def test_weight_length_mismatches(self):
        with pytest.raises(ValueError, match="aspect weight"):
            classify_and_score(self._groups(), np.array([1.0]), np.zeros(6))
        with pytest.raises(ValueError, match="topic weight"):
            classify_and_score(self._groups(), np.array([1.0, -1.0]), np.zeros(3))

    def test_report_to_dict(self):
        reports = classify_and_score(self._groups(), np.array([-1.0, 1.0]), np.zeros(6))
        payload = reports[0].to_dict()
        assert payload["viewpoint"] == "palestinian"
        assert len(payload["topics"]) == 3


class TestSplitScores:
    def _report(self, aspect_id, weight, score, viewpoint):
        return GroupReport(
            aspect_id=aspect_id, viewpoint=viewpoint, aspect_weight=weight,
            topic_rows=(), score=score,
        )

    def test_by_viewpoint_when_signs_split(self):
        pal = self._report(0, -2.0, -5.0, Viewpoint.PALESTINIAN)
        isr = self._report(1, 2.0, 4.0, Viewpoint.ISRAELI)
        assert split_scores([isr, pal]) == (-5.0, 4.0)

    def test_by_weight_order_when_signs_do_not_split(self):
        a = self._report(0, 1.0, 2.0, Viewpoint.ISRAELI)
        b = self._report(1, 3.0, 7.0, Viewpoint.ISRAELI)
        assert split_scores([b, a]) == (2.0, 7.0)

    def test_requires_two_reports(self):
        with pytest.raises(ValueError, match="two"):
            split_scores([self._report(0, 1.0, 1.0, Viewpoint.ISRAELI)])


class TestExtractWeights:
    def test_shapes(self):
        corpus = small_corpus()
        sampler = CorrLda2Sampler.from_corpus(corpus, n_topics=3, n_aspects=2, seed=0)
        sampler.run(10)
        aspect_w, topic_w = extract_association_weights(sampler, corpus, seed=0)
        assert aspect_w.shape == (2,)
        assert topic_w.shape == (3,)

    def test_label_flip_negates_weights(self):
        a_corpus, b_corpus = small_corpus(), small_corpus(flip_labels=True)
        a_sampler = CorrLda2Sampler.from_corpus(a_corpus, n_topics=2, n_aspects=2, seed=5)
        b_sampler = CorrLda2Sampler.from_corpus(b_corpus, n_topics=2, n_aspects=2, seed=5)
        a_sampler.run(10)
        b_sampler.run(10)
        a_weights = extract_association_weights(a_sampler, a_corpus, seed=1)
        b_weights = extract_association_weights(b_sampler, b_corpus, seed=1)
        np.testing.assert_allclose(b_weights[0], -a_weights[0], atol=1e-10)
        np.testing.assert_allclose(b_weights[1], -a_weights[1], atol=1e-10)


class TestAnalyzeSampler:
    def test_end_to_end_shapes(self):
        corpus = small_corpus()
        sampler = CorrLda2Sampler.from_corpus(corpus, n_topics=3, n_aspects=2, seed=2)
        sampler.run(15)
        groups, reports = analyze_sampler(sampler, corpus, seed=0)
        assert groups.n_topics == 3
        assert len(reports) == 2
        for report in reports:
            for row in report.topic_rows:
                assert len(row.top_words) > 0
            np.testing.assert_allclose(
                report.score, sum(r.weight for r in report.topic_rows), atol=1e-12
            )

    def test_top_words_come_from_topical_vocab(self):
        corpus = small_corpus()
        sampler = CorrLda2Sampler.from_corpus(corpus, n_topics=2, n_aspects=2, seed=3)
        sampler.run(5)
        words = topic_top_words(sampler, corpus.topical_vocab, k=3)
        assert len(words) == 2
        vocab = set(corpus.topical_vocab.words)
        assert all(w in vocab for row in words for w in row)


def sweep_documents():
    spec = SyntheticSpec(
        n_docs=20, n_topics=2, n_aspects=2,
        topical_vocab_size=12, opinion_vocab_size=8,
        topical_doc_length=10, opinion_doc_length=5, seed=1,
    )
    documents, _ = generate_raw_documents(spec)
    return documents


class TestConsistencySweep:
    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            consistency_sweep(sweep_documents(), PartitionScheme.OPINION_NE, [])

    def test_single_topic_grid(self):
        report = consistency_sweep(
            sweep_documents(), PartitionScheme.OPINION_NE, [1],
            n_sweeps=20, base_seed=0,
        )
        point = report.points[0]
        scores = {point.pal_score, point.isr_score}
        member_counts = [len(r.topic_rows) for r in point.reports]
        # One topic can join at most one group; the other group is empty.
        assert sorted(member_counts) in ([0, 0], [0, 1])
        assert 0.0 in scores

    def test_grid_covered_and_summary_consistent(self):
        report = consistency_sweep(
            sweep_documents(), PartitionScheme.OPINION_NE, [2, 3],
            n_sweeps=25, base_seed=7,
        )
        assert [p.n_topics for p in report.points] == [2, 3]
        assert report.scheme is PartitionScheme.OPINION_NE
        expected_overlap = tuple(
            p.n_topics for p in report.points if p.pal_score >= p.isr_score
        )
        assert report.overlap_points == expected_overlap
        expected_sep = min(p.isr_score for p in report.points) - max(
            p.pal_score for p in report.points
        )
        np.testing.assert_allclose(report.separation, expected_sep, atol=1e-12)

    def test_deterministic_and_parallel_equivalent(self):
        docs = sweep_documents()
        kwargs = dict(
            scheme=PartitionScheme.OPINION_NE, t_range=[2, 3],
            n_sweeps=15, base_seed=3,
        )
        serial = consistency_sweep(docs, **kwargs)
        again = consistency_sweep(docs, **kwargs)
        parallel = consistency_sweep(docs, n_jobs=2, **kwargs)
        for other in (again, parallel):
            for p, q in zip(serial.points, other.points):
                assert (p.pal_score, p.isr_score) == (q.pal_score, q.isr_score)
        assert serial.to_dict() == parallel.to_dict()

    def test_multi_run_median_selection(self):
        report = consistency_sweep(
            sweep_documents(), PartitionScheme.OPINION_NE, [2],
            n_sweeps=10, base_seed=2, n_runs=3,
        )
        assert len(report.points) == 1


class TestSweepOutputs:
    def test_csv_layout(self, tmp_path):
        report = consistency_sweep(
            sweep_documents(), PartitionScheme.OPINION_NE, [2],
            n_sweeps=10, base_seed=0,
        )
        path = tmp_path / "sweep.csv"
        write_sweep_csv([report], path, comments=("config: test",))
        lines = path.read_text().splitlines()
        assert lines[0] == "# config: test"
        rows = list(csv.reader(lines[1:]))
        assert rows[0] == ["T", "scheme", "pal_score", "isr_score"]
        assert rows[1][0] == "2"
        assert rows[1][1] == "opinion_ne"
        assert float(rows[1][2]) == report.points[0].pal_score

    def test_render_group_report(self):
        report = GroupReport(
            aspect_id=1, viewpoint=Viewpoint.PALESTINIAN, aspect_weight=-4.01,
            topic_rows=(
                TopicRow(topic_id=3, weight=-5.36, top_words=("wall", "camp")),
            ),
            score=-5.36,
        )
        text = render_group_report(report)
        assert "Aspect 1" in text
        assert "palestinian" in text
        assert "wall, camp" in text
        assert "-5.36" in text

    def test_render_empty_group(self):
        report = GroupReport(
            aspect_id=0, viewpoint=Viewpoint.ISRAELI, aspect_weight=2.0,
            topic_rows=(), score=0.0,
        )
        assert "no topics" in render_group_report(report)
