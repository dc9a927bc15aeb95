/**
 * The annotated-corpus JSONL contract shared with the Python toolkit.
 *
 * One document per line: a stable id, an optional viewpoint label, and
 * lemmatized tokens carrying a POS category and an optional
 * named-entity class.  Surfaces and lemmas are lowercase and contain no
 * whitespace; the consumer indexes lemmas, surfaces are kept for
 * inspection.
 */

import { z } from "zod";

export const POS_VALUES = ["NOUN", "ADJ", "ADV", "VERB", "OTHER"] as const;
export const NE_VALUES = ["PERSON", "ORGANIZATION", "LOCATION", "MISC"] as const;
export const LABEL_VALUES = ["palestinian", "israeli"] as const;

const lowercaseWord = z
  .string()
  .min(1)
  .refine((s) => !/\s/.test(s), "must not contain whitespace")
  .refine((s) => s === s.toLowerCase(), "must be lowercase");

export const annotatedTokenSchema = z.object({
  surface: lowercaseWord,
  lemma: lowercaseWord,
  pos: z.enum(POS_VALUES),
  ne: z.enum(NE_VALUES).nullable(),
});

export const annotatedDocumentSchema = z.object({
  doc_id: z.string().min(1),
  label: z.enum(LABEL_VALUES).nullable(),
  tokens: z.array(annotatedTokenSchema),
});

export type AnnotatedToken = z.infer<typeof annotatedTokenSchema>;
export type AnnotatedDocument = z.infer<typeof annotatedDocumentSchema>;

/** Raw input: an article body awaiting annotation. */
export const rawArticleSchema = z.object({
  doc_id: z.string().min(1),
  label: z.enum(LABEL_VALUES).optional(),
  body: z.string(),
});

export type RawArticle = z.infer<typeof rawArticleSchema>;

/** doc_id -> viewpoint label sidecar file. */
export const labelMapSchema = z.record(z.string(), z.enum(LABEL_VALUES));

export type LabelMap = z.infer<typeof labelMapSchema>;
