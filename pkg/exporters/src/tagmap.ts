/**
 * Mapping from Universal-POS-style tagsets down to the toolkit's closed
 * 11-tag set. Unmappable tags fall through to OTHER and are counted so the
 * caller can report a warning total.
 */

export const CLOSED_TAGS = new Set([
  "NOUN", "PROPN", "VERB", "ADJ", "ADV", "DET", "PRON",
  "CONJ_COORD", "CONJ_SUB", "PUNCT", "OTHER",
]);

const UPOS_MAP: Record<string, string> = {
  NOUN: "NOUN",
  PROPN: "PROPN",
  VERB: "VERB",
  AUX: "VERB",
  ADJ: "ADJ",
  ADV: "ADV",
  DET: "DET",
  PRON: "PRON",
  CCONJ: "CONJ_COORD",
  CONJ: "CONJ_COORD",
  SCONJ: "CONJ_SUB",
  PUNCT: "PUNCT",
  ADP: "OTHER",
  PART: "OTHER",
  NUM: "OTHER",
  INTJ: "OTHER",
  SYM: "OTHER",
  SPACE: "OTHER",
  X: "OTHER",
};

export interface TagMapResult {
  tag: string;
  mapped: boolean;
}

export function mapTag(external: string): TagMapResult {
  const upper = external.toUpperCase();
  if (CLOSED_TAGS.has(upper)) {
    return { tag: upper, mapped: true };
  }
  const mapped = UPOS_MAP[upper];
  if (mapped !== undefined) {
    return { tag: mapped, mapped: true };
  }
  return { tag: "OTHER", mapped: false };
}
