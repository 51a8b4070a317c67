/**
 * Scripted walkthroughs of the two showcase sessions against a real server
 * backed by the deterministic mock provider — no network beyond localhost.
 */

import { spawn, execFileSync, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { buildFeatureView } from "../src/featureView.js";
import { ViewState } from "../src/state.js";

const PORT = 8765 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let workDir: string;

function pythonOut(code: string): string {
  return execFileSync("python3", ["-c", code], { encoding: "utf-8" }).trim();
}

async function waitForHealthy(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/healthz`);
      if (response.ok) return;
    } catch {
      // server not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("server did not become healthy in time");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "explorer-e2e-"));
  const fixtureRoot = pythonOut(
    "import cultiverse; print(cultiverse.fixture_root())"
  );
  const scriptPath = join(workDir, "script.json");
  execFileSync("python3", [
    "-m", "cultiverse.cli", "mock-script", fixtureRoot, "--out", scriptPath,
  ]);
  const llmConfig = join(workDir, "llm.json");
  writeFileSync(llmConfig, JSON.stringify({ kind: "mock", script_path: scriptPath }));
  server = spawn("python3", [
    "-m", "cultiverse.cli", "serve",
    "--root", fixtureRoot,
    "--port", String(PORT),
    "--llm", llmConfig,
    "--store", join(workDir, "events.jsonl"),
    "--image-store", join(workDir, "images"),
  ], { stdio: "ignore" });
  await waitForHealthy();
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("element feature view from the live API", () => {
  it("satisfies the encoding monotonicity guarantees on real data", async () => {
    const api = new ApiClient(BASE);
    const [elements, edges] = await Promise.all([
      api.listElements(),
      api.coOccurrence(),
    ]);
    const model = buildFeatureView(elements, edges);

    const node = (id: string) => model.nodes.find((n) => n.id === id)!;
    expect(node("monkey").frequency).toBe(8);
    expect(node("monkey").size).toBeGreaterThan(node("bee").size);

    // larger frequency ⇒ strictly larger glyph, across every pair
    for (const a of model.nodes) {
      for (const b of model.nodes) {
        if (a.frequency > b.frequency) {
          expect(a.size).toBeGreaterThan(b.size);
        }
      }
    }

    // edge thickness monotone in co-occurrence count, across every pair
    const coLinks = model.links.filter((l) => l.kind === "co-occurrence");
    expect(coLinks.length).toBeGreaterThan(0);
    for (const a of coLinks) {
      for (const b of coLinks) {
        if (a.count > b.count) {
          expect(a.thickness).toBeGreaterThan(b.thickness);
        }
      }
    }

    const lotusEgret = coLinks.find(
      (l) => (l.source === "egret" && l.target === "lotus") ||
        (l.source === "lotus" && l.target === "egret")
    );
    expect(lotusEgret?.count).toBe(2);
  });
});

describe("Case 1 walkthrough (Japan)", () => {
  it("runs QA, translation, verification, inference, and imagery end to end", async () => {
    const api = new ApiClient(BASE);
    const state = new ViewState(api);
    await state.startSession({
      country: "Japan", age: 29, education: "bachelor",
      fwc: 5, fwtcp: 3, note: "deep appreciation for Japanese culture",
    });

    const paintings = await api.elementPaintings("monkey");
    expect(paintings).toHaveLength(8);

    const norms = await api.elementNorms("bee&monkey");
    state.selectedNorm = norms.find(
      (n) => n.symbol_en === "being ennobled as a marquess"
    )!;
    expect(state.selectedNorm).toBeDefined();

    const preset = await state.askPreset(1);
    expect(preset.reply).toContain("rank of marquess");
    const followUp = await state.askFree("why monkeys and nobility?");
    expect(followUp.reply).toContain("intelligence and wit");
    expect(state.transcripts.SourceExploration).toHaveLength(2);

    // per-turn delete shrinks the transcript by one exchange
    await state.deleteTurn("SourceExploration", preset.turn_id);
    expect(state.transcripts.SourceExploration).toHaveLength(1);

    state.toggleCondition("symbol");
    state.toggleQuestion("element");
    expect(state.canTranslate).toBe(true);
    const translation = await state.translate();
    expect(
      translation.target_norms.map((n) => n.facet_values.element.gloss_en)
    ).toEqual(["chrysanthemum", "family crest"]);

    const verdict = await state.verify(translation.translation_id);
    expect(verdict.judgment).toBe("appropriate");
    expect(verdict.reasons.length).toBeGreaterThan(0);

    const items = await state.infer("symbol");
    expect(items.map((i) => i.value)).toEqual([
      "coronet mounted with pearls", "tiger", "fleur-de-lis",
    ]);

    const image = await api.generateImage(
      state.sessionId!, state.selectedNorm!.id, "depict the marquess motif"
    );
    expect(image.index).toBe(0);
    const again = await api.regenerateImage(state.sessionId!, image.id);
    expect(again.index).toBe(1);
    expect(again.prompt_hash).toBe(image.prompt_hash);
    await api.deleteImage(state.sessionId!, again.id);
  }, 30_000);
});

describe("Case 2 walkthrough (Indonesia)", () => {
  it("annotates, translates both directions, and verifies", async () => {
    const api = new ApiClient(BASE);
    const state = new ViewState(api);
    await state.startSession({
      country: "Indonesia", age: 21, education: "undergraduate",
      fwc: 3, fwtcp: 1, note: "",
    });

    const annotation = await state.annotate("p009", {
      x: 30, y: 30, w: 80, h: 60, elementId: "hibiscus",
    });
    expect(annotation.element).toBe("hibiscus");
    expect(annotation.provenance).toBe("Manual");

    const hibiscusNorms = await api.elementNorms("hibiscus");
    state.selectedNorm = hibiscusNorms[0];
    state.toggleCondition("element");
    state.toggleQuestion("symbol");
    const hibiscus = await state.translate();
    expect(
      hibiscus.target_norms.map((n) => n.facet_values.symbol.native)
    ).toEqual(["kecantikan", "kesucian"]);

    const lionNorms = await api.elementNorms("lion dragon");
    state.selectedNorm = lionNorms[0];
    state.toggleCondition("element");
    state.toggleCondition("symbol");
    state.toggleQuestion("symbol");
    state.toggleQuestion("element");
    const lion = await state.translate();
    expect(
      lion.target_norms.map((n) => n.facet_values.element.gloss_en)
    ).toEqual(["garuda", "shadow puppet"]);

    const verdict = await state.verify(lion.translation_id);
    expect(verdict.judgment).toBe("appropriate");
    expect(verdict.reasons).toHaveLength(2);

    await api.deleteAnnotation(annotation.id);
  }, 30_000);
});
