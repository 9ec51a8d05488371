/**
 * Emit per-token negative log-likelihood dumps:
 *   {"unit_id", "log_base": "e", "nlls": [...]}
 *
 * The built-in "toy:lenbias" scorer assigns p(token) = 1/(1 + token length
 * in characters), so nll = ln(1 + len); a sequence repeating one token of
 * length L has perplexity exactly 1 + L. A scoring failure aborts the job
 * before anything is written.
 */

import { fail, parseArgs, readTextRecords, writeJsonlAtomic } from "./jsonl";
import { tokenize } from "./tokenize";

const SCHEMA_VERSION = "nll/v1";

function lenBiasNll(token: string): number {
  const nll = Math.log(1 + Array.from(token).length);
  if (!Number.isFinite(nll) || nll < 0) {
    throw new Error(`scorer produced an invalid NLL for ${JSON.stringify(token)}`);
  }
  return nll;
}

export function runExportNll(argv: string[]): void {
  const args = parseArgs(argv, { model: "toy:lenbias" }, ["in", "out"]);
  if (args.model !== "toy:lenbias") {
    throw new Error(`unknown scoring backend ${args.model}; available: toy:lenbias`);
  }
  const records = readTextRecords(args.in);
  const lines = records.map((rec) => {
    const tokens = tokenize(rec.text).map((t) => t.text);
    if (tokens.length === 0) throw new Error(`record ${rec.book_id} has no tokens`);
    return {
      unit_id: rec.unit_id ?? rec.book_id,
      log_base: "e",
      nlls: tokens.map(lenBiasNll),
    };
  });
  writeJsonlAtomic(args.out, { schema_version: SCHEMA_VERSION, model: args.model }, lines);
  console.log(`wrote ${lines.length} NLL dumps -> ${args.out}`);
}

if (require.main === module) {
  try {
    runExportNll(process.argv.slice(2));
  } catch (err) {
    fail(err);
  }
}
