/**
 * Collect prompt continuations into the generations schema:
 *   {"unit_id", "author_id", "method", "prompt_id", "text"}
 *
 * Input: plain-text prompt file, one prompt per line. The built-in
 * "toy:echo" backend repeats the prompt's own words deterministically;
 * every record is truncated to 256 whitespace tokens, prompt included,
 * and carries its prompt provenance.
 */

import { fail, parseArgs, readLines, writeJsonlAtomic } from "./jsonl";

const SCHEMA_VERSION = "generations/v1";
const MAX_TOKENS = 256;

function echoContinuation(prompt: string): string {
  const words = prompt.split(/\s+/).filter((w) => w.length > 0);
  const out = [...words];
  let i = 0;
  while (out.length < MAX_TOKENS) {
    out.push(words[i % words.length]);
    i += 1;
  }
  return out.slice(0, MAX_TOKENS).join(" ");
}

export function runExportGenerations(argv: string[]): void {
  const args = parseArgs(argv,
                         { model: "toy:echo", author: "AU0", method: "toy" },
                         ["in", "out"]);
  if (args.model !== "toy:echo") {
    throw new Error(`unknown generator ${args.model}; available: toy:echo`);
  }
  const prompts = readLines(args.in);
  if (prompts.length === 0) throw new Error(`no prompts in ${args.in}`);
  const lines = prompts.map((prompt, idx) => ({
    unit_id: `${args.author}/${args.method}/${idx}`,
    author_id: args.author,
    method: args.method,
    prompt_id: idx,
    text: echoContinuation(prompt),
  }));
  writeJsonlAtomic(args.out, { schema_version: SCHEMA_VERSION, model: args.model,
                               max_tokens: MAX_TOKENS }, lines);
  console.log(`wrote ${lines.length} generations -> ${args.out}`);
}

if (require.main === module) {
  try {
    runExportGenerations(process.argv.slice(2));
  } catch (err) {
    fail(err);
  }
}
