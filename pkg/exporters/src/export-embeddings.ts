/**
 * Emit fixed-dimension sentence embeddings: {"label", "vector": [...]}.
 *
 * The built-in "toy:hash16" encoder hashes case-folded character trigrams
 * into a 16-bin bag and L2-normalizes it; deterministic, and every vector
 * in a file has the same dimension (dimension drift aborts the job).
 */

import { fail, parseArgs, readTextRecords, writeJsonlAtomic } from "./jsonl";

const SCHEMA_VERSION = "embeddings/v1";
const DIM = 16;

function fnv1a(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export function hash16(text: string): number[] {
  const folded = text.toLowerCase();
  const vec = new Array<number>(DIM).fill(0);
  for (let i = 0; i + 3 <= folded.length; i++) {
    vec[fnv1a(folded.slice(i, i + 3)) % DIM] += 1;
  }
  const norm = Math.sqrt(vec.reduce((acc, x) => acc + x * x, 0));
  return norm > 0 ? vec.map((x) => x / norm) : vec.map(() => 1 / Math.sqrt(DIM));
}

export function runExportEmbeddings(argv: string[]): void {
  const args = parseArgs(argv, { model: "toy:hash16" }, ["in", "out"]);
  if (args.model !== "toy:hash16") {
    throw new Error(`unknown encoder ${args.model}; available: toy:hash16`);
  }
  const records = readTextRecords(args.in);
  const lines = records.map((rec) => {
    const vector = hash16(rec.text);
    if (vector.length !== DIM) {
      throw new Error(`dimension drift: got ${vector.length}, expected ${DIM}`);
    }
    return { label: rec.label ?? rec.book_id, vector };
  });
  writeJsonlAtomic(args.out, { schema_version: SCHEMA_VERSION, model: args.model,
                               dim: DIM }, lines);
  console.log(`wrote ${lines.length} embeddings of dim ${DIM} -> ${args.out}`);
}

if (require.main === module) {
  try {
    runExportEmbeddings(process.argv.slice(2));
  } catch (err) {
    fail(err);
  }
}
