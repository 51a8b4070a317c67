/**
 * Client-side view state for the three-stage workflow. All invariants the
 * server enforces with 422s are mirrored here so the UI never issues a
 * request the server would reject for emptiness or zero-area boxes.
 */

import {
  ApiClient,
  Background,
  Facet,
  InferenceItem,
  Norm,
  Translation,
  Turn,
  Verdict,
} from "./api.js";

export type Scope = "SourceExploration" | "Transfer" | "Extrapolation";

export interface TranscriptEntry {
  turnId: string;
  question: string;
  reply: string;
}

export interface AnnotationDraft {
  x: number;
  y: number;
  w: number;
  h: number;
  elementId: string;
}

export function draftProblems(draft: AnnotationDraft): string[] {
  const problems: string[] = [];
  if (draft.w <= 0 || draft.h <= 0) problems.push("box must have positive area");
  if (draft.x < 0 || draft.y < 0) problems.push("box must start inside the image");
  if (draft.elementId.trim() === "") problems.push("pick an element label");
  return problems;
}

export class ViewState {
  sessionId: string | null = null;
  background: Background | null = null;
  selectedElement: string | null = null;
  selectedPainting: string | null = null;
  selectedNorm: Norm | null = null;
  conditions = new Set<Facet>();
  questions = new Set<Facet>();
  transcripts: Record<Scope, TranscriptEntry[]> = {
    SourceExploration: [],
    Transfer: [],
    Extrapolation: [],
  };
  translations: Translation[] = [];
  verdicts: Verdict[] = [];
  inferences: InferenceItem[][] = [];
  private inFlight = new Set<Scope>();

  constructor(private readonly api: ApiClient) {}

  async startSession(background: Background): Promise<string> {
    this.sessionId = await this.api.createSession(background);
    this.background = background;
    return this.sessionId;
  }

  toggleCondition(facet: Facet): void {
    if (this.conditions.has(facet)) this.conditions.delete(facet);
    else this.conditions.add(facet);
  }

  toggleQuestion(facet: Facet): void {
    if (this.questions.has(facet)) this.questions.delete(facet);
    else this.questions.add(facet);
  }

  /** Mirrors the server-side non-empty C and Q requirement. */
  get canTranslate(): boolean {
    return (
      this.sessionId !== null &&
      this.selectedNorm !== null &&
      this.conditions.size > 0 &&
      this.questions.size > 0
    );
  }

  private requireSession(): string {
    if (this.sessionId === null) throw new Error("no active session");
    return this.sessionId;
  }

  private async onScope<T>(scope: Scope, work: () => Promise<T>): Promise<T> {
    if (this.inFlight.has(scope)) {
      throw new Error(`a ${scope} request is already in flight`);
    }
    this.inFlight.add(scope);
    try {
      return await work();
    } finally {
      this.inFlight.delete(scope);
    }
  }

  async askPreset(preset: number): Promise<Turn> {
    return this.ask({ preset });
  }

  async askFree(question: string): Promise<Turn> {
    return this.ask({ question });
  }

  private async ask(opts: { preset?: number; question?: string }): Promise<Turn> {
    const sessionId = this.requireSession();
    if (this.selectedNorm === null) throw new Error("select a norm first");
    const normId = this.selectedNorm.id;
    return this.onScope("SourceExploration", async () => {
      const turn = await this.api.qa(sessionId, normId, opts);
      this.transcripts.SourceExploration.push({
        turnId: turn.turn_id,
        question: turn.question,
        reply: turn.reply,
      });
      return turn;
    });
  }

  async deleteTurn(scope: Scope, turnId: string): Promise<void> {
    const sessionId = this.requireSession();
    await this.api.deleteTurn(sessionId, scope, turnId);
    this.transcripts[scope] = this.transcripts[scope].filter(
      (t) => t.turnId !== turnId
    );
  }

  async translate(): Promise<Translation> {
    if (!this.canTranslate) {
      throw new Error("translate requires a norm and non-empty facet sets");
    }
    const sessionId = this.requireSession();
    const normId = this.selectedNorm!.id;
    const conditions = [...this.conditions].sort();
    const questions = [...this.questions].sort();
    return this.onScope("Transfer", async () => {
      const translation = await this.api.translate(
        sessionId, normId, conditions, questions
      );
      this.translations.push(translation);
      return translation;
    });
  }

  async verify(translationId: string): Promise<Verdict> {
    const sessionId = this.requireSession();
    return this.onScope("Extrapolation", async () => {
      const result = await this.api.verify(sessionId, translationId);
      this.verdicts.push(result.verdict);
      return result.verdict;
    });
  }

  async infer(anchor: Facet = "symbol"): Promise<InferenceItem[]> {
    const sessionId = this.requireSession();
    if (this.selectedNorm === null) throw new Error("select a norm first");
    const normId = this.selectedNorm.id;
    return this.onScope("Extrapolation", async () => {
      const result = await this.api.infer(sessionId, normId, anchor);
      this.inferences.push(result.items);
      return result.items;
    });
  }

  async annotate(paintingId: string, draft: AnnotationDraft) {
    const problems = draftProblems(draft);
    if (problems.length > 0) {
      throw new Error(problems.join("; "));
    }
    return this.api.addAnnotation(
      paintingId,
      { x: draft.x, y: draft.y, w: draft.w, h: draft.h },
      draft.elementId,
      this.sessionId ?? undefined
    );
  }
}
