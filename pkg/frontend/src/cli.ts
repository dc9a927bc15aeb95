#!/usr/bin/env node
/**
 * Corpus annotation command line.
 *
 *   annotate --in articles/ --out corpus.jsonl --labels labels.json
 *
 * Input is a directory of .txt articles (file stem = doc_id) or a JSONL
 * file of {doc_id, label?, body} records.  The optional label map
 * assigns viewpoints by doc_id.  Output is the annotated-corpus JSONL
 * consumed by the Python toolkit.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { annotateArticles } from "./annotate.js";
import { readArticles, readLabelMap, writeCorpus } from "./jsonl.js";

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("viewtopics-annotate")
    .command(
      "annotate",
      "annotate raw articles into corpus JSONL",
      (cmd) =>
        cmd
          .option("in", {
            type: "string",
            demandOption: true,
            describe: "article directory or raw-article JSONL file",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "annotated corpus JSONL to write",
          })
          .option("labels", {
            type: "string",
            describe: "JSON file mapping doc_id to viewpoint label",
          }),
      () => {}
    )
    .demandCommand(1)
    .strict()
    .help();
  const args = await parser.parse();

  const labels = args.labels ? readLabelMap(args.labels as string) : undefined;
  const articles = readArticles(args.in as string, labels);
  const { documents, skipped } = annotateArticles(articles, (m) =>
    console.error(m)
  );
  writeCorpus(args.out as string, documents);
  console.log(
    `wrote ${documents.length} documents to ${args.out}` +
      (skipped.length ? ` (skipped ${skipped.length})` : "")
  );
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(hideBin(process.argv)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`error: ${err.message ?? err}`);
      process.exit(1);
    }
  );
}
