/**
 * Whitespace+punctuation tokenizer, rule-for-rule the same as the toolkit's
 * sidecar mode so token surfaces byte-match across both sides:
 *   T1 fields are maximal runs of non-whitespace characters;
 *   T2 word characters are Unicode letters, digits and marks; an apostrophe
 *      (' or U+2019) or a single hyphen flanked by word characters is
 *      word-internal;
 *   T3 any other character is punctuation; maximal runs of the SAME
 *      punctuation character form one token;
 *   T4 offsets are [start, end) byte positions into the UTF-8 source.
 */

const WORD = /[\p{L}\p{N}\p{M}]/u;
const APOSTROPHES = new Set(["'", "’"]);

export interface Token {
  text: string;
  start: number; // byte offset
  end: number;
}

function isWord(ch: string): boolean {
  return WORD.test(ch);
}

function isSpace(ch: string): boolean {
  // Python str.isspace() parity: add NEL and the separator controls,
  // drop the BOM (JS \s matches U+FEFF, Python does not)
  if (ch === "﻿") return false;
  return /\s/u.test(ch) || "".includes(ch);
}

export function tokenize(text: string): Token[] {
  const chars = Array.from(text);
  const n = chars.length;
  const spans: Array<[number, number]> = [];
  let i = 0;
  while (i < n) {
    const c = chars[i];
    if (isSpace(c)) {
      i += 1;
      continue;
    }
    if (isWord(c)) {
      let j = i + 1;
      while (j < n) {
        const cj = chars[j];
        if (isWord(cj)) {
          j += 1;
        } else if ((APOSTROPHES.has(cj) || cj === "-") && j + 1 < n && isWord(chars[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      spans.push([i, j]);
      i = j;
    } else {
      let j = i + 1;
      while (j < n && chars[j] === c) j += 1;
      spans.push([i, j]);
      i = j;
    }
  }
  const bytePos: number[] = new Array(n + 1);
  bytePos[0] = 0;
  for (let k = 0; k < n; k++) {
    bytePos[k + 1] = bytePos[k] + Buffer.byteLength(chars[k], "utf8");
  }
  return spans.map(([a, b]) => ({
    text: chars.slice(a, b).join(""),
    start: bytePos[a],
    end: bytePos[b],
  }));
}

const TERMINALS = new Set([".", "!", "?"]);
const CLOSERS = new Set(['"', "'", ")", "]", "}", "’", "”"]);
const ABBREVIATIONS = new Set(["mr.", "mrs.", "ms.", "dr.", "st.", "prof."]);

function isTerminal(tok: string): boolean {
  return tok.length > 0 && [...tok].every((c) => TERMINALS.has(c));
}

/** Sentence index ranges with the toolkit's boundary rules. */
export function sentenceRanges(tokens: string[]): Array<[number, number]> {
  const ranges: Array<[number, number]> = [];
  const n = tokens.length;
  let start = 0;
  let i = 0;
  while (i < n) {
    const tok = tokens[i];
    if (isTerminal(tok)) {
      if (tok === "." && i > 0) {
        const prev = tokens[i - 1];
        if (ABBREVIATIONS.has(prev.toLowerCase() + ".") || (prev.length === 1 && /\p{L}/u.test(prev))) {
          i += 1;
          continue;
        }
      }
      let j = i + 1;
      while (j < n && (CLOSERS.has(tokens[j]) || isTerminal(tokens[j]))) j += 1;
      ranges.push([start, j]);
      start = j;
      i = j;
    } else {
      i += 1;
    }
  }
  if (start < n) ranges.push([start, n]);
  return ranges;
}
