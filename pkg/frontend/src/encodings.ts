/**
 * Visual encodings for the element feature view and norm cards.
 *
 * Guarantees relied on by tests:
 *  - glyphSize is strictly increasing in frequency
 *  - edgeThickness is strictly increasing in co-occurrence count
 *  - the four atomic categories map to four distinct colors
 */

export const CATEGORY_COLORS: Record<string, string> = {
  Animal: "#d95f02",
  Plant: "#1b9e77",
  Fruit: "#e7298a",
  Other: "#7570b3",
  Composite: "#666666",
};

export function categoryColor(category: string): string {
  return CATEGORY_COLORS[category] ?? CATEGORY_COLORS.Other;
}

const MIN_GLYPH = 12;

/** Glyph diameter in pixels; strictly monotone in painting frequency. */
export function glyphSize(frequency: number): number {
  if (frequency < 0 || !Number.isFinite(frequency)) {
    throw new RangeError(`frequency must be a non-negative number, got ${frequency}`);
  }
  return MIN_GLYPH + 8 * Math.sqrt(frequency);
}

/** Link stroke width in pixels; strictly monotone in co-occurrence count. */
export function edgeThickness(count: number): number {
  if (count < 1 || !Number.isFinite(count)) {
    throw new RangeError(`edge count must be >= 1, got ${count}`);
  }
  return 1 + 2 * Math.log2(1 + count);
}

export const RHETORIC_COLORS: Record<string, string> = {
  Iconic: "#4477aa",
  Homophony: "#ee6677",
  HomophonicPun: "#228833",
  Synonym: "#ccbb44",
  Homograph: "#66ccee",
  Satire: "#aa3377",
};

export function rhetoricColor(rhetoric: string): string {
  return RHETORIC_COLORS[rhetoric] ?? "#bbbbbb";
}

export type EmotionIcon = "arrow-up" | "dot" | "arrow-down";

export function emotionIcon(emotion: string): EmotionIcon {
  switch (emotion) {
    case "Positive":
      return "arrow-up";
    case "Negative":
      return "arrow-down";
    default:
      return "dot";
  }
}
