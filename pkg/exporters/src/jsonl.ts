/** JSONL and CLI plumbing shared by the exporters. */

import * as fs from "node:fs";
import * as path from "node:path";

export interface TextRecord {
  book_id: string;
  text: string;
  label?: string;
  unit_id?: string;
}

export function readTextRecords(inputPath: string): TextRecord[] {
  const raw = fs.readFileSync(inputPath, "utf8");
  const records: TextRecord[] = [];
  for (const line of raw.split("\n")) {
    if (!line.trim()) continue;
    const rec = JSON.parse(line);
    if ("_meta" in rec) continue;
    if (typeof rec.book_id !== "string" || typeof rec.text !== "string") {
      throw new Error(`input record needs string "book_id" and "text": ${line}`);
    }
    records.push(rec);
  }
  if (records.length === 0) throw new Error(`no input records in ${inputPath}`);
  return records;
}

export function readLines(inputPath: string): string[] {
  return fs.readFileSync(inputPath, "utf8")
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
}

/** Write all lines through a temp file; an abort leaves no partial output. */
export function writeJsonlAtomic(outputPath: string, header: object, lines: object[]): void {
  const dir = path.dirname(path.resolve(outputPath));
  fs.mkdirSync(dir, { recursive: true });
  const tmp = path.join(dir, `.${path.basename(outputPath)}.tmp-${process.pid}`);
  const body = [JSON.stringify({ _meta: header }), ...lines.map((l) => JSON.stringify(l))];
  try {
    fs.writeFileSync(tmp, body.join("\n") + "\n", "utf8");
    fs.renameSync(tmp, outputPath);
  } catch (err) {
    fs.rmSync(tmp, { force: true });
    throw err;
  }
}

export interface CliArgs {
  in: string;
  out: string;
  model: string;
  [key: string]: string;
}

export function parseArgs(argv: string[], defaults: Record<string, string>,
                          required: string[]): CliArgs {
  const args: Record<string, string> = { ...defaults };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`usage: --in <path> --out <path> --model <id> (got ${flag})`);
    }
    args[flag.slice(2)] = argv[i + 1];
  }
  for (const key of required) {
    if (!args[key]) throw new Error(`missing required flag --${key}`);
  }
  return args as CliArgs;
}

export function fail(err: unknown): never {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(2);
}
