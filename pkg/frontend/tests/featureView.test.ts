import { describe, expect, it } from "vitest";

import { ElementSummary } from "../src/api.js";
import { buildFeatureView, compositesOf } from "../src/featureView.js";

function element(partial: Partial<ElementSummary> & { id: string }): ElementSummary {
  return {
    name_zh: "元",
    name_en: partial.id,
    romanization: "x",
    category: "Animal",
    constituents: [],
    frequency: 0,
    norm_count: 0,
    ...partial,
  };
}

const FIXTURE_LIKE: ElementSummary[] = [
  element({ id: "monkey", category: "Animal", frequency: 8, norm_count: 3 }),
  element({ id: "bee", category: "Animal", frequency: 2, norm_count: 1 }),
  element({ id: "lotus", category: "Plant", frequency: 3, norm_count: 2 }),
  element({ id: "egret", category: "Animal", frequency: 2, norm_count: 1 }),
  element({
    id: "bee&monkey", category: "Composite", frequency: 1, norm_count: 1,
    constituents: ["bee", "monkey"],
  }),
];

const EDGES = [
  { a: "egret", b: "lotus", count: 2 },
  { a: "bee", b: "monkey", count: 1 },
];

describe("buildFeatureView", () => {
  it("renders monkey strictly larger than bee (frequency 8 vs 2)", () => {
    const model = buildFeatureView(FIXTURE_LIKE, EDGES);
    const size = (id: string) => model.nodes.find((n) => n.id === id)!.size;
    expect(size("monkey")).toBeGreaterThan(size("bee"));
  });

  it("draws a visible link between lotus and egret", () => {
    const model = buildFeatureView(FIXTURE_LIKE, EDGES);
    const link = model.links.find(
      (l) => l.kind === "co-occurrence" &&
        ((l.source === "egret" && l.target === "lotus") ||
          (l.source === "lotus" && l.target === "egret"))
    );
    expect(link).toBeDefined();
    expect(link!.thickness).toBeGreaterThan(0);
  });

  it("edge thickness is monotone in count", () => {
    const model = buildFeatureView(FIXTURE_LIKE, EDGES);
    const byPair = Object.fromEntries(
      model.links
        .filter((l) => l.kind === "co-occurrence")
        .map((l) => [`${l.source}|${l.target}`, l.thickness])
    );
    expect(byPair["egret|lotus"]).toBeGreaterThan(byPair["bee|monkey"]);
  });

  it("links composites to their constituents", () => {
    const model = buildFeatureView(FIXTURE_LIKE, EDGES);
    const parts = model.links
      .filter((l) => l.kind === "constituent" && l.source === "bee&monkey")
      .map((l) => l.target)
      .sort();
    expect(parts).toEqual(["bee", "monkey"]);
  });

  it("zooming an atomic reveals its composites", () => {
    const model = buildFeatureView(FIXTURE_LIKE, EDGES);
    expect(compositesOf(model, "monkey").map((n) => n.id)).toEqual(["bee&monkey"]);
    expect(compositesOf(model, "lotus")).toEqual([]);
  });

  it("colors atomic categories differently from each other", () => {
    const model = buildFeatureView(FIXTURE_LIKE, EDGES);
    const color = (id: string) => model.nodes.find((n) => n.id === id)!.color;
    expect(color("monkey")).not.toBe(color("lotus"));
  });

  it("renders an empty state instead of crashing on zero elements", () => {
    const model = buildFeatureView([], []);
    expect(model.empty).toBe(true);
    expect(model.emptyMessage).not.toBe("");
    expect(model.nodes).toEqual([]);
  });

  it("drops edges that reference unknown elements", () => {
    const model = buildFeatureView(FIXTURE_LIKE, [{ a: "ghost", b: "monkey", count: 3 }]);
    expect(model.links.filter((l) => l.kind === "co-occurrence")).toEqual([]);
  });
});
