/**
 * Deterministic rule annotator backing the "rule:en-toy" model id. It emits
 * UPOS-style tags that flow through the documented mapping table, plus
 * person flags from a small gazetteer and reporting-verb adjacency. Real
 * pipelines plug in behind the same interface; the model id travels
 * verbatim into the output header for provenance.
 */

import { mapTag } from "./tagmap";
import { sentenceRanges, tokenize } from "./tokenize";

const LEXICON: Record<string, string> = {
  the: "DET", a: "DET", an: "DET", this: "DET", that: "DET",
  i: "PRON", you: "PRON", he: "PRON", she: "PRON", it: "PRON",
  we: "PRON", they: "PRON", her: "PRON", him: "PRON",
  and: "CCONJ", but: "CCONJ", or: "CCONJ",
  because: "SCONJ", although: "SCONJ", while: "SCONJ", if: "SCONJ", when: "SCONJ",
  is: "AUX", was: "AUX", are: "AUX", were: "AUX", be: "AUX",
  have: "AUX", has: "AUX", had: "AUX", will: "AUX", would: "AUX",
  said: "VERB", says: "VERB", saw: "VERB", came: "VERB", went: "VERB",
  left: "VERB", stayed: "VERB", read: "VERB", wrote: "VERB", slept: "VERB",
  of: "ADP", to: "ADP", in: "ADP", on: "ADP", at: "ADP", with: "ADP",
  over: "ADP", under: "ADP", from: "ADP",
  not: "ADV", very: "ADV", quite: "ADV", never: "ADV", soon: "ADV",
  old: "ADJ", young: "ADJ", quick: "ADJ", good: "ADJ", little: "ADJ",
  man: "NOUN", woman: "NOUN", fox: "NOUN", dog: "NOUN", hill: "NOUN",
  book: "NOUN", garden: "NOUN", house: "NOUN", day: "NOUN", time: "NOUN",
};

const PERSON_GAZETTEER = new Set([
  "john", "mary", "anne", "jane", "emma", "george", "henry", "william",
  "james", "peter", "alice", "thomas", "charles", "richard",
]);

const REPORTING_VERBS = new Set([
  "said", "says", "asked", "replied", "answered", "cried", "whispered",
  "shouted", "remarked", "exclaimed",
]);

const PUNCT_RUN = /^[^\p{L}\p{N}\p{M}]+$/u;

export interface AnnotatedToken {
  t: string;
  pos: string;
  person: boolean;
}

export interface SentenceRecord {
  book_id: string;
  sent_index: number;
  tokens: AnnotatedToken[];
}

export interface AnnotationResult {
  records: SentenceRecord[];
  unmappedCount: number;
}

function rawTag(token: string, sentenceInitial: boolean): string {
  if (PUNCT_RUN.test(token)) return "PUNCT";
  const folded = token.toLowerCase();
  const hit = LEXICON[folded];
  if (hit !== undefined) return hit;
  if (folded.endsWith("ly") && folded.length > 2) return "ADV";
  if ((folded.endsWith("ing") || folded.endsWith("ed")) && folded.length > 3) return "VERB";
  if ((folded.endsWith("ness") || folded.endsWith("tion") || folded.endsWith("ment"))
      && folded.length > 4) return "NOUN";
  if (!sentenceInitial && /^\p{Lu}/u.test(token)) return "PROPN";
  if (/^\p{N}/u.test(token)) return "NUM";
  return "X";
}

export function annotateText(bookId: string, text: string): AnnotationResult {
  const tokens = tokenize(text).map((t) => t.text);
  const ranges = sentenceRanges(tokens);
  const records: SentenceRecord[] = [];
  let unmappedCount = 0;
  ranges.forEach(([a, b], sentIndex) => {
    const sentence = tokens.slice(a, b);
    const mapped: AnnotatedToken[] = sentence.map((tok, i) => {
      const raw = rawTag(tok, i === 0);
      const result = mapTag(raw);
      if (!result.mapped) unmappedCount += 1;
      return { t: tok, pos: result.tag, person: false };
    });
    for (let i = 0; i < mapped.length; i++) {
      const tok = mapped[i];
      const folded = tok.t.toLowerCase();
      const personTaggable = tok.pos === "PROPN" || tok.pos === "NOUN" || tok.pos === "OTHER";
      if (!personTaggable || !/^\p{Lu}/u.test(tok.t)) continue;
      const before = i > 0 ? mapped[i - 1].t.toLowerCase() : "";
      const after = i + 1 < mapped.length ? mapped[i + 1].t.toLowerCase() : "";
      if (PERSON_GAZETTEER.has(folded)
          || REPORTING_VERBS.has(before) || REPORTING_VERBS.has(after)) {
        tok.person = true;
      }
    }
    records.push({ book_id: bookId, sent_index: sentIndex, tokens: mapped });
  });
  return { records, unmappedCount };
}
