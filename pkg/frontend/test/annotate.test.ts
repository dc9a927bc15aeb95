import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { annotateArticles, annotateBody } from "../src/annotate.js";
import { corpusToJsonl, readArticles, readLabelMap } from "../src/jsonl.js";
import { annotatedDocumentSchema, type AnnotatedDocument } from "../src/schema.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");
const ARTICLES_DIR = join(FIXTURES, "articles");
const LABELS_PATH = join(FIXTURES, "labels.json");

describe("annotateBody", () => {
  it("maps a demonym to a NOUN with a MISC entity tag", () => {
    // Exact part-of-speech tags are a property of the bundled tagger
    // model; this pins the current mapping for a known phrase.
    expect(annotateBody("Israeli violence")).toEqual([
      { surface: "israeli", lemma: "israeli", pos: "NOUN", ne: "MISC" },
      { surface: "violence", lemma: "violence", pos: "NOUN", ne: null },
    ]);
  });

  it("reduces inflected forms to a shared lemma", () => {
    const tokens = annotateBody("The refugees were displaced.");
    const byLemma = Object.fromEntries(tokens.map((t) => [t.surface, t.lemma]));
    expect(byLemma["refugees"]).toBe("refugee");
    expect(byLemma["displaced"]).toBe("displace");
  });

  it("keeps function words with pos OTHER instead of dropping them", () => {
    const tokens = annotateBody("across the border");
    expect(tokens.map((t) => t.pos)).toEqual(["OTHER", "OTHER", "NOUN"]);
  });
});

describe("annotateArticles on the sample articles", () => {
  let documents: AnnotatedDocument[];
  let skipped: string[];

  beforeAll(() => {
    const labels = readLabelMap(LABELS_PATH);
    const articles = readArticles(ARTICLES_DIR, labels);
    ({ documents, skipped } = annotateArticles(articles, () => {}));
  });

  it("annotates all five articles without skips", () => {
    expect(skipped).toEqual([]);
    expect(documents.map((d) => d.doc_id)).toEqual([
      "ceasefire-talks",
      "refugee-return",
      "security-barrier",
      "settlement-policy",
      "water-rights",
    ]);
  });

  it("produces schema-valid documents", () => {
    for (const doc of documents) {
      expect(annotatedDocumentSchema.safeParse(doc).success).toBe(true);
      expect(doc.tokens.length).toBeGreaterThan(50);
    }
  });

  it("attaches viewpoint labels from the sidecar map", () => {
    const labels = Object.fromEntries(documents.map((d) => [d.doc_id, d.label]));
    expect(labels).toEqual({
      "ceasefire-talks": "palestinian",
      "water-rights": "palestinian",
      "refugee-return": "palestinian",
      "security-barrier": "israeli",
      "settlement-policy": "israeli",
    });
  });

  it("keeps the noun fraction in the plausible range for English prose", () => {
    const tokens = documents.flatMap((d) => d.tokens);
    const nouns = tokens.filter((t) => t.pos === "NOUN").length;
    const fraction = nouns / tokens.length;
    expect(fraction).toBeGreaterThanOrEqual(0.2);
    expect(fraction).toBeLessThanOrEqual(0.6);
  });

  it("recognizes persons, places, and demonyms across the corpus", () => {
    const tokens = documents.flatMap((d) => d.tokens);
    const byTag = (ne: string) =>
      new Set(tokens.filter((t) => t.ne === ne).map((t) => t.lemma));
    expect(byTag("PERSON").size).toBeGreaterThan(0);
    expect(byTag("LOCATION").size).toBeGreaterThan(0);
    expect(byTag("MISC")).toContain("israeli");
    expect(byTag("MISC")).toContain("palestinian");
  });

  it("is deterministic across runs", () => {
    const labels = readLabelMap(LABELS_PATH);
    const rerun = annotateArticles(readArticles(ARTICLES_DIR, labels), () => {});
    expect(corpusToJsonl(rerun.documents)).toBe(corpusToJsonl(documents));
  });
});

describe("annotateArticles skip handling", () => {
  it("skips an empty body with a warning and keeps going", () => {
    const warnings: string[] = [];
    const { documents, skipped } = annotateArticles(
      [
        { doc_id: "blank-doc", body: "   \n\t" },
        { doc_id: "real-doc", body: "Negotiations resumed in Cairo." },
      ],
      (m) => warnings.push(m)
    );
    expect(skipped).toEqual(["blank-doc"]);
    expect(documents.map((d) => d.doc_id)).toEqual(["real-doc"]);
    expect(warnings).toHaveLength(1);
    expect(warnings[0]).toContain("blank-doc");
    expect(warnings[0]).toContain("empty body");
  });
});
