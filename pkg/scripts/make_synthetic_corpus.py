#!/usr/bin/env python3
"""Generate an annotated synthetic corpus for pipeline rehearsal.

Writes a JSONL corpus whose nouns follow planted topic distributions and
whose adjectives follow planted aspect distributions, with document
labels set by the dominant aspect.  The companion truth file records the
planted parameters so recovery can be scored later.
"""

import argparse
import json
from pathlib import Path

from viewtopics.corpus import write_annotated_corpus
from viewtopics.synthetic import SyntheticSpec, generate_raw_documents


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, required=True, help="corpus JSONL path")
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--topics", type=int, default=6)
    parser.add_argument("--aspects", type=int, default=2)
    parser.add_argument("--topical-vocab", type=int, default=60)
    parser.add_argument("--opinion-vocab", type=int, default=30)
    parser.add_argument("--topical-length", type=int, default=40)
    parser.add_argument("--opinion-length", type=int, default=21)
    parser.add_argument("--concentration", type=float, default=0.9,
                        help="planted topic-aspect concentration")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    spec = SyntheticSpec(
        n_docs=args.docs,
        n_topics=args.topics,
        n_aspects=args.aspects,
        topical_vocab_size=args.topical_vocab,
        opinion_vocab_size=args.opinion_vocab,
        topical_doc_length=args.topical_length,
        opinion_doc_length=args.opinion_length,
        psi_concentration=args.concentration,
        seed=args.seed,
    )
    documents, truth = generate_raw_documents(spec)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_annotated_corpus(documents, args.out)

    truth_path = args.out.with_suffix(".truth.json")
    truth_path.write_text(json.dumps({
        "spec": vars(args) | {"out": str(args.out)},
        "planted_aspect_of_topic": truth.planted_aspect_of_topic.tolist(),
        "labels": truth.labels.tolist(),
    }, indent=2, sort_keys=True, default=str) + "\n")
    print(f"wrote {len(documents)} documents to {args.out}")
    print(f"planted truth in {truth_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
