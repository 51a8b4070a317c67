/**
 * Typed client for the cultiverse HTTP API. Every call validates the
 * response shape with zod, so contract drift fails loudly in tests.
 */

import { z } from "zod";

export const FACETS = ["custom", "element", "emotion", "rhetoric", "symbol"] as const;
export type Facet = (typeof FACETS)[number];

export const ElementSchema = z.object({
  id: z.string(),
  name_zh: z.string(),
  name_en: z.string(),
  romanization: z.string(),
  category: z.string(),
  constituents: z.array(z.string()),
  frequency: z.number().int().nonnegative(),
  norm_count: z.number().int().nonnegative(),
});
export type ElementSummary = z.infer<typeof ElementSchema>;

export const NormSchema = z.object({
  id: z.string(),
  element: z.string(),
  rhetoric: z.string(),
  symbol_zh: z.string(),
  symbol_en: z.string(),
  custom_zh: z.string(),
  custom_en: z.string(),
  emotion: z.string(),
});
export type Norm = z.infer<typeof NormSchema>;

export const EdgeSchema = z.object({
  a: z.string(),
  b: z.string(),
  count: z.number().int().positive(),
});
export type Edge = z.infer<typeof EdgeSchema>;

export const AnnotationSchema = z.object({
  id: z.string(),
  painting_id: z.string(),
  box: z.object({ x: z.number(), y: z.number(), w: z.number(), h: z.number() }),
  element: z.string(),
  provenance: z.string(),
  verifier_count: z.number().int(),
});
export type Annotation = z.infer<typeof AnnotationSchema>;

export const PaintingSchema = z.object({
  id: z.string(),
  title_zh: z.string(),
  title_en: z.string(),
  artist: z.string(),
  image_size: z.object({ width: z.number(), height: z.number() }),
  annotations: z.array(AnnotationSchema),
  element_stats: z.array(
    z.object({
      element: z.string(),
      frequency: z.number().int(),
      norm_count: z.number().int(),
      composite_partners: z.array(z.string()),
    })
  ),
}).passthrough();
export type Painting = z.infer<typeof PaintingSchema>;

export const TurnSchema = z.object({
  turn_id: z.string(),
  question: z.string(),
  reply: z.string(),
});
export type Turn = z.infer<typeof TurnSchema>;

export const TargetNormSchema = z.object({
  facet_values: z.record(
    z.object({ native: z.string(), gloss_en: z.string() })
  ),
  explanation: z.string(),
  rhetoric: z.string(),
  emotion: z.string(),
});
export type TargetNorm = z.infer<typeof TargetNormSchema>;

export const TranslationSchema = z.object({
  translation_id: z.string(),
  target_norms: z.array(TargetNormSchema),
  raw: z.string(),
});
export type Translation = z.infer<typeof TranslationSchema>;

export const VerdictSchema = z.object({
  judgment: z.enum(["appropriate", "inappropriate", "uncertain"]),
  reasons: z.array(z.string()),
  recommendations: z.array(z.string()),
});
export type Verdict = z.infer<typeof VerdictSchema>;

export const InferenceItemSchema = z.object({
  culture: z.string(),
  value: z.string(),
  explanation: z.string(),
});
export type InferenceItem = z.infer<typeof InferenceItemSchema>;

export const ImageInfoSchema = z.object({
  id: z.string(),
  prompt_hash: z.string(),
  image_ref: z.string(),
  index: z.number().int(),
});
export type ImageInfo = z.infer<typeof ImageInfoSchema>;

export interface Background {
  country: string;
  age: number;
  education: string;
  fwc: number;
  fwtcp: number;
  note: string;
}

/** Error body returned by the server for every mapped failure. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly raw?: string,
    public readonly locator?: string
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch
  ) {}

  private async request<T>(
    method: string,
    path: string,
    schema: z.ZodType<T>,
    body?: unknown
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(
        response.status,
        payload.code ?? "unknown",
        payload.message ?? response.statusText,
        payload.raw,
        payload.locator
      );
    }
    return schema.parse(payload);
  }

  healthz() {
    return this.request("GET", "/healthz", z.object({
      version: z.string(),
      counts: z.object({
        elements: z.number(),
        norms: z.number(),
        paintings: z.number(),
        sessions: z.number(),
        categories: z.record(z.number()),
      }),
    }));
  }

  listElements() {
    return this.request("GET", "/elements", z.array(ElementSchema));
  }

  elementPaintings(elementId: string) {
    return this.request(
      "GET", `/elements/${encodeURIComponent(elementId)}/paintings`, z.array(z.string())
    );
  }

  elementNorms(elementId: string) {
    return this.request(
      "GET", `/elements/${encodeURIComponent(elementId)}/norms`, z.array(NormSchema)
    );
  }

  getPainting(paintingId: string) {
    return this.request("GET", `/paintings/${paintingId}`, PaintingSchema);
  }

  coOccurrence() {
    return this.request(
      "GET", "/analytics/co-occurrence", z.object({ edges: z.array(EdgeSchema) })
    ).then((body) => body.edges);
  }

  addAnnotation(
    paintingId: string,
    box: { x: number; y: number; w: number; h: number },
    elementId: string,
    sessionId?: string
  ) {
    return this.request("POST", `/paintings/${paintingId}/annotations`, AnnotationSchema, {
      box, element_id: elementId, session_id: sessionId ?? null,
    });
  }

  deleteAnnotation(annotationId: string) {
    return this.request(
      "DELETE", `/annotations/${annotationId}`,
      z.object({ removed: AnnotationSchema })
    );
  }

  createSession(background: Background) {
    return this.request(
      "POST", "/sessions", z.object({ session_id: z.string() }), { background }
    ).then((body) => body.session_id);
  }

  qa(sessionId: string, normId: string, opts: { preset?: number; question?: string }) {
    return this.request(
      "POST", `/sessions/${sessionId}/qa`, z.object({ turn: TurnSchema }),
      { norm_id: normId, preset: opts.preset ?? null, question: opts.question ?? null }
    ).then((body) => body.turn);
  }

  deleteTurn(sessionId: string, scope: string, turnId: string) {
    return this.request(
      "DELETE", `/sessions/${sessionId}/threads/${scope}/turns/${turnId}`,
      z.object({ deleted: z.string() })
    );
  }

  generateImage(sessionId: string, normId: string, task: string) {
    return this.request(
      "POST", `/sessions/${sessionId}/image`, z.object({ image: ImageInfoSchema }),
      { norm_id: normId, task }
    ).then((body) => body.image);
  }

  regenerateImage(sessionId: string, imageId: string) {
    return this.request(
      "POST", `/sessions/${sessionId}/image/${imageId}/regenerate`,
      z.object({ image: ImageInfoSchema })
    ).then((body) => body.image);
  }

  deleteImage(sessionId: string, imageId: string) {
    return this.request(
      "DELETE", `/sessions/${sessionId}/image/${imageId}`,
      z.object({ deleted: z.string() })
    );
  }

  translate(sessionId: string, normId: string, conditions: Facet[], questions: Facet[]) {
    return this.request("POST", `/sessions/${sessionId}/translate`, TranslationSchema, {
      norm_id: normId, conditions, questions,
    });
  }

  verify(sessionId: string, translationId: string) {
    return this.request(
      "POST", `/sessions/${sessionId}/verify`,
      z.object({ verdict: VerdictSchema, raw: z.string() }),
      { translation_id: translationId }
    );
  }

  infer(sessionId: string, normId: string, anchor: Facet = "symbol") {
    return this.request(
      "POST", `/sessions/${sessionId}/infer`,
      z.object({ items: z.array(InferenceItemSchema), raw: z.string() }),
      { norm_id: normId, anchor }
    );
  }
}
