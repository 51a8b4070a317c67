/**
 * Layout-independent model of the element feature view: glyph nodes sized by
 * frequency and colored by category, constituent links between composites and
 * their parts, and co-occurrence links with thickness encoding the count.
 * A renderer (canvas/SVG) consumes this model; layout itself is not tested.
 */

import { Edge, ElementSummary } from "./api.js";
import { categoryColor, edgeThickness, glyphSize } from "./encodings.js";

export interface GlyphNode {
  id: string;
  label: string;
  labelNative: string;
  category: string;
  color: string;
  size: number;
  frequency: number;
  normCount: number;
  isComposite: boolean;
  constituents: string[];
}

export interface ViewLink {
  source: string;
  target: string;
  kind: "co-occurrence" | "constituent";
  thickness: number;
  count: number;
}

export interface FeatureViewModel {
  nodes: GlyphNode[];
  links: ViewLink[];
  empty: boolean;
  emptyMessage: string;
}

export function buildFeatureView(
  elements: ElementSummary[],
  edges: Edge[]
): FeatureViewModel {
  if (elements.length === 0) {
    return {
      nodes: [],
      links: [],
      empty: true,
      emptyMessage: "No elements in the catalog yet. Import a dataset to begin.",
    };
  }
  const nodes: GlyphNode[] = elements.map((e) => ({
    id: e.id,
    label: e.name_en,
    labelNative: e.name_zh,
    category: e.category,
    color: categoryColor(e.category),
    size: glyphSize(e.frequency),
    frequency: e.frequency,
    normCount: e.norm_count,
    isComposite: e.category === "Composite",
    constituents: e.constituents,
  }));
  const known = new Set(nodes.map((n) => n.id));
  const links: ViewLink[] = [];
  for (const edge of edges) {
    if (!known.has(edge.a) || !known.has(edge.b)) continue;
    links.push({
      source: edge.a,
      target: edge.b,
      kind: "co-occurrence",
      thickness: edgeThickness(edge.count),
      count: edge.count,
    });
  }
  for (const node of nodes) {
    if (!node.isComposite) continue;
    for (const part of node.constituents) {
      if (!known.has(part)) continue;
      links.push({
        source: node.id,
        target: part,
        kind: "constituent",
        thickness: 1,
        count: 1,
      });
    }
  }
  return { nodes, links, empty: false, emptyMessage: "" };
}

/** Composites revealed when zooming into an atomic element's glyph. */
export function compositesOf(model: FeatureViewModel, atomicId: string): GlyphNode[] {
  return model.nodes.filter(
    (n) => n.isComposite && n.constituents.includes(atomicId)
  );
}
