/**
 * Reading raw articles and writing the annotated corpus.
 *
 * Articles come either from a directory of .txt files (the file stem is
 * the doc_id) or from a JSONL file of {doc_id, label?, body} records.
 * Labels can also arrive through a sidecar JSON map keyed by doc_id,
 * which wins over any label embedded in the article record.
 */

import { readFileSync, readdirSync, statSync, writeFileSync } from "node:fs";
import { basename, extname, join } from "node:path";

import {
  type AnnotatedDocument,
  type LabelMap,
  type RawArticle,
  labelMapSchema,
  rawArticleSchema,
} from "./schema.js";

export function readLabelMap(path: string): LabelMap {
  return labelMapSchema.parse(JSON.parse(readFileSync(path, "utf8")));
}

function articlesFromJsonl(path: string): RawArticle[] {
  const articles: RawArticle[] = [];
  const lines = readFileSync(path, "utf8").split("\n");
  lines.forEach((line, index) => {
    if (line.trim() === "") return;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path} line ${index + 1}: invalid JSON (${err})`);
    }
    const checked = rawArticleSchema.safeParse(parsed);
    if (!checked.success) {
      throw new Error(`${path} line ${index + 1}: ${checked.error.issues[0].message}`);
    }
    articles.push(checked.data);
  });
  return articles;
}

function articlesFromDirectory(dir: string): RawArticle[] {
  const files = readdirSync(dir)
    .filter((name) => extname(name) === ".txt")
    .sort();
  if (files.length === 0) {
    throw new Error(`no .txt articles found in ${dir}`);
  }
  return files.map((name) => ({
    doc_id: basename(name, ".txt"),
    body: readFileSync(join(dir, name), "utf8"),
  }));
}

/** Load articles from a .txt directory or a raw-article JSONL file. */
export function readArticles(input: string, labels?: LabelMap): RawArticle[] {
  const stats = statSync(input);
  const articles = stats.isDirectory()
    ? articlesFromDirectory(input)
    : articlesFromJsonl(input);
  if (!labels) return articles;
  return articles.map((article) => ({
    ...article,
    label: labels[article.doc_id] ?? article.label,
  }));
}

/** Serialize annotated documents as JSONL with sorted keys per object. */
export function corpusToJsonl(documents: AnnotatedDocument[]): string {
  const lines = documents.map((doc) =>
    JSON.stringify({
      doc_id: doc.doc_id,
      label: doc.label,
      tokens: doc.tokens.map((t) => ({
        lemma: t.lemma,
        ne: t.ne,
        pos: t.pos,
        surface: t.surface,
      })),
    })
  );
  return lines.map((line) => line + "\n").join("");
}

export function writeCorpus(path: string, documents: AnnotatedDocument[]): void {
  writeFileSync(path, corpusToJsonl(documents), "utf8");
}
