/**
 * Article annotation: tokenize, POS-tag, NER-tag, lowercase, lemmatize.
 *
 * Tagset mapping (compromise -> corpus schema):
 *
 * | compromise tag | pos  |   | compromise tag | ne           |
 * |----------------|------|---|----------------|--------------|
 * | Noun           | NOUN |   | Person         | PERSON       |
 * | Adjective      | ADJ  |   | Organization   | ORGANIZATION |
 * | Adverb         | ADV  |   | Place          | LOCATION     |
 * | Verb           | VERB |   | Demonym        | MISC         |
 * | anything else  | OTHER|   | anything else  | null         |
 *
 * All noun tags (proper nouns included) map to NOUN; demonyms and
 * nationalities carry the Demonym tag and so land in MISC.  Tokens
 * outside the four content categories are still emitted, as OTHER, so
 * named-entity routing downstream sees them.  The lemma is the tagger's
 * root form when it differs from the normalized text.
 */

import nlp from "compromise";

import type { AnnotatedDocument, AnnotatedToken, RawArticle } from "./schema.js";
import { annotatedDocumentSchema } from "./schema.js";

interface TaggedTerm {
  text: string;
  normal: string;
  root?: string;
  tags?: string[];
}

const POS_BY_TAG: ReadonlyArray<[string, AnnotatedToken["pos"]]> = [
  ["Noun", "NOUN"],
  ["Adjective", "ADJ"],
  ["Adverb", "ADV"],
  ["Verb", "VERB"],
];

const NE_BY_TAG: ReadonlyArray<[string, NonNullable<AnnotatedToken["ne"]>]> = [
  ["Person", "PERSON"],
  ["Organization", "ORGANIZATION"],
  ["Place", "LOCATION"],
  ["Demonym", "MISC"],
];

function tokenFromTerm(term: TaggedTerm): AnnotatedToken | null {
  const tags = new Set(term.tags ?? []);
  const lemma = (term.root ?? term.normal).toLowerCase();
  const surface = (term.text || term.normal).toLowerCase();
  // punctuation-only terms normalize to nothing and carry no signal
  if (lemma === "" || surface === "" || /\s/.test(lemma) || /\s/.test(surface)) {
    return null;
  }
  const pos = POS_BY_TAG.find(([tag]) => tags.has(tag))?.[1] ?? "OTHER";
  const ne = NE_BY_TAG.find(([tag]) => tags.has(tag))?.[1] ?? null;
  return { surface, lemma, pos, ne };
}

/** Annotate one article body into schema tokens. */
export function annotateBody(body: string): AnnotatedToken[] {
  const doc = nlp(body);
  doc.compute("root");
  const sentences = doc.json({
    text: false,
    terms: { tags: true, normal: true, text: true },
  }) as Array<{ terms: TaggedTerm[] }>;
  const tokens: AnnotatedToken[] = [];
  for (const sentence of sentences) {
    for (const term of sentence.terms) {
      const token = tokenFromTerm(term);
      if (token !== null) tokens.push(token);
    }
  }
  return tokens;
}

export interface AnnotationResult {
  documents: AnnotatedDocument[];
  skipped: string[];
}

/**
 * Annotate articles in input order.
 *
 * Empty bodies and per-document tagger failures are skipped with a
 * logged id rather than aborting the batch.
 */
export function annotateArticles(
  articles: RawArticle[],
  warn: (message: string) => void = (m) => console.warn(m)
): AnnotationResult {
  const documents: AnnotatedDocument[] = [];
  const skipped: string[] = [];
  for (const article of articles) {
    if (article.body.trim() === "") {
      warn(`skipping ${article.doc_id}: empty body`);
      skipped.push(article.doc_id);
      continue;
    }
    let tokens: AnnotatedToken[];
    try {
      tokens = annotateBody(article.body);
    } catch (err) {
      warn(`skipping ${article.doc_id}: tagger failure (${err})`);
      skipped.push(article.doc_id);
      continue;
    }
    documents.push(
      annotatedDocumentSchema.parse({
        doc_id: article.doc_id,
        label: article.label ?? null,
        tokens,
      })
    );
  }
  return { documents, skipped };
}
