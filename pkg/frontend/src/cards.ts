/**
 * Card view models for source norms and translated target norms: the same
 * design scheme (rhetoric color chip, bilingual symbol, custom text, emotion
 * icon) on both sides of a translation.
 */

import { Norm, TargetNorm } from "./api.js";
import { EmotionIcon, emotionIcon, rhetoricColor } from "./encodings.js";

export interface NormCard {
  normId: string;
  element: string;
  rhetoric: string;
  rhetoricChipColor: string;
  symbolPrimary: string; // English-primary display
  symbolHover: string; // native text shown on hover
  custom: string;
  emotion: string;
  emotionIcon: EmotionIcon;
}

export function normCard(norm: Norm): NormCard {
  return {
    normId: norm.id,
    element: norm.element,
    rhetoric: norm.rhetoric,
    rhetoricChipColor: rhetoricColor(norm.rhetoric),
    symbolPrimary: norm.symbol_en,
    symbolHover: norm.symbol_zh,
    custom: norm.custom_en,
    emotion: norm.emotion,
    emotionIcon: emotionIcon(norm.emotion),
  };
}

export interface TargetFacetRow {
  facet: string;
  primary: string; // gloss_en
  hover: string; // native
}

export interface TargetNormCard {
  facets: TargetFacetRow[];
  explanation: string;
  rhetoric: string;
  emotion: string;
}

export function targetNormCard(norm: TargetNorm): TargetNormCard {
  return {
    facets: Object.entries(norm.facet_values)
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([facet, value]) => ({
        facet,
        primary: value.gloss_en,
        hover: value.native,
      })),
    explanation: norm.explanation,
    rhetoric: norm.rhetoric,
    emotion: norm.emotion,
  };
}
