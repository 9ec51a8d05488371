/**
 * Emit token/POS/person annotations in the toolkit sidecar schema:
 *   {"book_id", "sent_index", "tokens": [{"t", "pos", "person"}]}
 *
 * Input: JSONL of {"book_id", "text"}. The model id is recorded verbatim in
 * the header; "rule:en-toy" is the built-in deterministic backend.
 */

import { annotateText } from "./annotator";
import { fail, parseArgs, readTextRecords, writeJsonlAtomic } from "./jsonl";

const SCHEMA_VERSION = "annotations/v1";

export function runExportAnnotations(argv: string[]): void {
  const args = parseArgs(argv, { model: "rule:en-toy" }, ["in", "out"]);
  if (args.model !== "rule:en-toy") {
    throw new Error(`unknown annotation backend ${args.model}; available: rule:en-toy`);
  }
  const records = readTextRecords(args.in);
  const lines: object[] = [];
  let unmapped = 0;
  for (const rec of records) {
    const result = annotateText(rec.book_id, rec.text);
    lines.push(...result.records);
    unmapped += result.unmappedCount;
  }
  writeJsonlAtomic(args.out, {
    schema_version: SCHEMA_VERSION,
    model: args.model,
    unmapped_tags: unmapped,
  }, lines);
  if (unmapped > 0) {
    console.error(`warning: ${unmapped} tags fell through the mapping table to OTHER`);
  }
  console.log(`wrote ${lines.length} sentence records -> ${args.out}`);
}

if (require.main === module) {
  try {
    runExportAnnotations(process.argv.slice(2));
  } catch (err) {
    fail(err);
  }
}
