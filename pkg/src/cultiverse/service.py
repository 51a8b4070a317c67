"""HTTP service exposing the full workflow: session setup, dataset browsing,
annotation CRUD, source exploration, translation, verification, inference.

State changes are persisted to a single append-only JSON-lines event log and
replayed on startup, so killing and restarting the service loses nothing.
"""

from __future__ import annotations

import datetime as dt
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import analytics, ingest
from .gateway import (
    Gateway,
    ImageResult,
    ProviderConfig,
    ProviderRefused,
    ProviderTimeout,
    ScriptedMiss,
    UnknownResult,
    UnknownThread,
    UnknownTurn,
    make_provider,
)
from .ingest import (
    Dataset,
    OutOfBounds,
    UnknownAnnotation,
    UnknownElement,
    UnknownPainting,
)
from .model import BoundingBox, CulturalNorm
from .prompts import engine
from .prompts.engine import (
    EmptyConditions,
    EmptyQuestions,
    EmptyTask,
    Facet,
    InvalidBackground,
    TemplateError,
    TranslationRequest,
    UnknownPreset,
    UserBackground,
)
from .prompts.parsing import (
    MalformedResponse,
    SchemaViolation,
    parse_inference_response,
    parse_translation_response,
    parse_verdict_response,
    serialize_target_norms,
)

SCOPE_SOURCE = "SourceExploration"
SCOPE_TRANSFER = "Transfer"
SCOPE_EXTRAPOLATION = "Extrapolation"


class UnknownSession(Exception):
    pass


class UnknownNorm(Exception):
    pass


class UnknownTranslation(Exception):
    pass


# Every module error maps to exactly one (status, machine code) pair.
ERROR_MAP: dict[type, tuple[int, str]] = {
    InvalidBackground: (422, "invalid_background"),
    UnknownSession: (404, "unknown_session"),
    UnknownNorm: (404, "unknown_norm"),
    UnknownTranslation: (404, "unknown_translation"),
    UnknownPainting: (404, "unknown_painting"),
    UnknownElement: (404, "unknown_element"),
    UnknownAnnotation: (404, "unknown_annotation"),
    OutOfBounds: (422, "out_of_bounds"),
    UnknownPreset: (422, "unknown_preset"),
    EmptyTask: (422, "empty_task"),
    EmptyConditions: (422, "empty_conditions"),
    EmptyQuestions: (422, "empty_questions"),
    TemplateError: (500, "template_error"),
    MalformedResponse: (422, "malformed_llm_response"),
    SchemaViolation: (422, "malformed_llm_response"),
    ProviderTimeout: (502, "provider_timeout"),
    ProviderRefused: (502, "provider_refused"),
    ScriptedMiss: (502, "scripted_miss"),
    UnknownThread: (404, "unknown_thread"),
    UnknownTurn: (404, "unknown_turn"),
    UnknownResult: (404, "unknown_image"),
    ingest.ValidationFailed: (422, "dataset_invalid"),
    ingest.FileMissing: (500, "dataset_file_missing"),
    ingest.ParseError: (500, "dataset_parse_error"),
}


@dataclass
class TranslationRecord:
    translation_id: str
    norm_id: str
    conditions: list[str]
    questions: list[str]
    raw: str
    parsed_json: str  # serialized target norms, the form /verify reviews
    target_culture: str


@dataclass
class Session:
    id: str
    background: UserBackground
    created_at: str
    threads: dict[str, str] = field(default_factory=dict)  # scope -> thread id
    history: list[dict] = field(default_factory=list)
    translations: dict[str, TranslationRecord] = field(default_factory=dict)
    images: list[ImageResult] = field(default_factory=list)


class EventStore:
    """Append-only JSON-lines log; the single source of durable state."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, event: dict) -> dict:
        """Persist one event; returns it in canonical (sorted-key) form so
        in-memory copies serialize identically after a replay."""
        line = json.dumps(event, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
        return json.loads(line)

    def read_all(self) -> list[dict]:
        if not self.path.exists():
            return []
        events = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                events.append(json.loads(line))
        return events


# -- request bodies -----------------------------------------------------------


class BackgroundBody(BaseModel):
    country: str
    age: int = Field(ge=0)
    education: str = ""
    fwc: int
    fwtcp: int
    note: str = ""


class SessionBody(BaseModel):
    background: BackgroundBody


class BoxBody(BaseModel):
    x: float
    y: float
    w: float
    h: float


class AnnotationBody(BaseModel):
    box: BoxBody
    element_id: str
    session_id: Optional[str] = None


class QaBody(BaseModel):
    norm_id: str
    preset: Optional[int] = None
    question: Optional[str] = None


class ImageBody(BaseModel):
    norm_id: str
    task: str


class TranslateBody(BaseModel):
    norm_id: str
    conditions: list[str]
    questions: list[str]


class VerifyBody(BaseModel):
    translation_id: str


class InferBody(BaseModel):
    norm_id: str
    anchor: str = "symbol"


# -- serialization helpers ----------------------------------------------------


def norm_to_dict(n: CulturalNorm) -> dict:
    return {
        "id": n.id,
        "element": n.element,
        "rhetoric": n.rhetoric.value if hasattr(n.rhetoric, "value") else str(n.rhetoric),
        "symbol_zh": n.symbol_zh,
        "symbol_en": n.symbol_en,
        "custom_zh": n.custom_zh,
        "custom_en": n.custom_en,
        "emotion": n.emotion.value if hasattr(n.emotion, "value") else str(n.emotion),
    }


def edges_to_list(dataset: Dataset) -> list[dict]:
    return [
        {"a": e.a, "b": e.b, "count": e.count} for e in analytics.co_occurrence(dataset)
    ]


def target_norms_to_list(norms) -> list[dict]:
    return [
        {
            "facet_values": {
                facet.value: {"native": v.native, "gloss_en": v.gloss_en}
                for facet, v in n.facet_values
            },
            "explanation": n.explanation,
            "rhetoric": n.rhetoric.value.lower() if n.rhetoric else "unknown",
            "emotion": n.emotion.value.lower() if n.emotion else "unknown",
        }
        for n in norms
    ]


def _parse_facets(tokens: list[str], empty_error) -> frozenset[Facet]:
    if not tokens:
        raise empty_error("facet set must be non-empty")
    facets = set()
    for token in tokens:
        try:
            facets.add(Facet(token.strip().lower()))
        except ValueError:
            raise empty_error(f"unknown facet {token!r}")
    return frozenset(facets)


class ServiceState:
    def __init__(self, dataset: Dataset, gateway: Gateway, store: EventStore):
        self.dataset = dataset
        self.gateway = gateway
        self.store = store
        self.sessions: dict[str, Session] = {}
        self._counter = 0
        self._lock = threading.Lock()
        # LLM-dispatching endpoints are serialized per (session, scope).
        self._scope_locks: dict[tuple[str, str], threading.Lock] = {}

    def next_id(self, prefix: str) -> str:
        with self._lock:
            self._counter += 1
            return f"{prefix}-{self._counter:04d}"

    def note_id(self, restored: str) -> None:
        suffix = restored.rsplit("-", 1)[-1]
        if suffix.isdigit():
            with self._lock:
                self._counter = max(self._counter, int(suffix))

    def session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def norm(self, norm_id: str) -> CulturalNorm:
        for n in self.dataset.norms:
            if n.id == norm_id:
                return n
        raise UnknownNorm(norm_id)

    def scope_lock(self, session_id: str, scope: str) -> threading.Lock:
        key = (session_id, scope)
        with self._lock:
            if key not in self._scope_locks:
                self._scope_locks[key] = threading.Lock()
            return self._scope_locks[key]

    def thread_for(self, session: Session, scope: str, system_message: str) -> str:
        thread_id = session.threads.get(scope)
        if thread_id is None:
            thread = self.gateway.create_thread(scope, system_message)
            session.threads[scope] = thread.id
            thread_id = thread.id
        return thread_id

    # -- replay ----------------------------------------------------------------

    def replay(self) -> None:
        for event in self.store.read_all():
            self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "session_created":
            bg = UserBackground(**event["background"])
            session = Session(event["session_id"], bg, event["created_at"])
            self.sessions[session.id] = session
            self.note_id(session.id)
        elif kind == "annotation_added":
            box = BoundingBox(**event["box"])
            self.dataset.add_manual_annotation(event["painting_id"], box, event["element_id"])
            sid = event.get("session_id")
            if sid and sid in self.sessions:
                self.sessions[sid].history.append(event)
        elif kind == "annotation_removed":
            try:
                self.dataset.remove_annotation(event["annotation_id"])
            except UnknownAnnotation:
                pass  # annotation was added and removed before a snapshot
        elif kind == "qa":
            session = self.sessions[event["session_id"]]
            self._restore_turn(session, event)
            session.history.append(event)
        elif kind == "turn_deleted":
            session = self.sessions[event["session_id"]]
            thread_id = session.threads.get(event["scope"])
            if thread_id:
                self.gateway.delete_turn(thread_id, event["turn_id"])
            session.history.append(event)
        elif kind == "image":
            session = self.sessions[event["session_id"]]
            result = ImageResult(**event["image"])
            self.gateway.restore_image(result, event.get("prompt_text", ""))
            session.images.append(result)
            session.history.append(event)
        elif kind == "image_deleted":
            session = self.sessions[event["session_id"]]
            try:
                self.gateway.delete_image(event["image_id"])
            except UnknownResult:
                pass
            session.images = [i for i in session.images if i.id != event["image_id"]]
        elif kind == "translation":
            session = self.sessions[event["session_id"]]
            record = TranslationRecord(
                translation_id=event["translation_id"],
                norm_id=event["norm_id"],
                conditions=event["conditions"],
                questions=event["questions"],
                raw=event["raw"],
                parsed_json=event["parsed_json"],
                target_culture=event["target_culture"],
            )
            session.translations[record.translation_id] = record
            self.note_id(record.translation_id)
            self._restore_turn(session, event)
            session.history.append(event)
        elif kind in ("verdict", "inference"):
            session = self.sessions[event["session_id"]]
            self._restore_turn(session, event)
            session.history.append(event)

    def _restore_turn(self, session: Session, event: dict) -> None:
        """Re-attach a persisted exchange to its conversation thread."""
        if "turn_id" not in event:
            return
        scope = event["scope"]
        thread_id = session.threads.get(scope)
        if thread_id is None:
            thread = self.gateway.create_thread(scope, event["system_message"],
                                                thread_id=event["thread_id"])
            session.threads[scope] = thread.id
            thread_id = thread.id
        self.gateway.replay_turn(thread_id, event["turn_id"], event["user_text"],
                                 event["assistant_text"])


def create_app(
    dataset_root: str,
    store_path: str,
    provider_config: ProviderConfig,
    image_store: Optional[str] = None,
) -> FastAPI:
    dataset = ingest.load_dataset(dataset_root)
    gateway = Gateway(make_provider(provider_config), image_store=image_store,
                      max_retries=provider_config.max_retries)
    state = ServiceState(dataset, gateway, EventStore(store_path))
    state.replay()

    app = FastAPI(title="cultiverse", version="0.1.0")
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        locator = ".".join(str(p) for p in errors[0]["loc"][1:]) if errors else ""
        return JSONResponse(
            status_code=422,
            content={"status": 422, "code": "invalid_body",
                     "message": errors[0]["msg"] if errors else "invalid body",
                     "locator": locator},
        )

    async def on_domain_error(request: Request, exc: Exception):
        status, code = next(
            (pair for cls, pair in ERROR_MAP.items() if type(exc) is cls),
            (500, "internal"),
        )
        body = {"status": status, "code": code, "message": str(exc)}
        if isinstance(exc, InvalidBackground):
            body["locator"] = exc.field
        if isinstance(exc, (MalformedResponse, SchemaViolation)):
            body["raw"] = getattr(exc, "raw_text", "")
        return JSONResponse(status_code=status, content=body)

    for exc_class in ERROR_MAP:
        app.add_exception_handler(exc_class, on_domain_error)

    # -- health and browsing -------------------------------------------------

    @app.get("/healthz")
    def healthz():
        from .model import category_census

        return {
            "version": app.version,
            "counts": {
                "elements": len(state.dataset.elements),
                "norms": len(state.dataset.norms),
                "paintings": len(state.dataset.paintings),
                "sessions": len(state.sessions),
                "categories": {c.value: n for c, n in category_census(state.dataset.elements).items()},
            },
        }

    @app.get("/elements")
    def list_elements():
        freq = analytics.element_frequency(state.dataset)
        return [
            {
                "id": e.id,
                "name_zh": e.name_zh,
                "name_en": e.name_en,
                "romanization": e.romanization,
                "category": e.category.value,
                "constituents": list(e.constituents),
                "frequency": freq.get(e.id, 0),
                "norm_count": sum(1 for n in state.dataset.norms if n.element == e.id),
            }
            for e in sorted(state.dataset.elements, key=lambda e: e.id)
        ]

    @app.get("/elements/{element_id}/paintings")
    def element_paintings(element_id: str):
        return analytics.paintings_for_element(state.dataset, element_id)

    @app.get("/elements/{element_id}/norms")
    def element_norms(element_id: str):
        return [norm_to_dict(n) for n in analytics.norms_for_element(state.dataset, element_id)]

    @app.get("/paintings/{painting_id}")
    def get_painting(painting_id: str):
        painting = state.dataset.paintings.get(painting_id)
        if painting is None:
            raise UnknownPainting(painting_id)
        body = ingest.painting_to_dict(painting)
        body["element_stats"] = [
            {
                "element": s.element,
                "frequency": s.frequency,
                "norm_count": s.norm_count,
                "rhetoric_histogram": {r.value: n for r, n in s.rhetoric_histogram.items()},
                "emotion_histogram": {e.value: n for e, n in s.emotion_histogram.items()},
                "composite_partners": s.composite_partners,
            }
            for s in analytics.element_stats(state.dataset, painting_id)
        ]
        return body

    @app.get("/analytics/co-occurrence")
    def co_occurrence_edges():
        return {"edges": edges_to_list(state.dataset)}

    # -- annotations -----------------------------------------------------------

    @app.post("/paintings/{painting_id}/annotations", status_code=201)
    def add_annotation(painting_id: str, body: AnnotationBody):
        box = BoundingBox(body.box.x, body.box.y, body.box.w, body.box.h)
        ann = state.dataset.add_manual_annotation(painting_id, box, body.element_id)
        event = {
            "type": "annotation_added",
            "annotation_id": ann.id,
            "painting_id": painting_id,
            "element_id": body.element_id,
            "box": {"x": box.x, "y": box.y, "w": box.w, "h": box.h},
            "session_id": body.session_id,
        }
        event = state.store.append(event)
        if body.session_id and body.session_id in state.sessions:
            state.sessions[body.session_id].history.append(event)
        return ingest.annotation_to_dict(ann)

    @app.delete("/annotations/{annotation_id}")
    def delete_annotation(annotation_id: str):
        ann = state.dataset.remove_annotation(annotation_id)
        state.store.append({"type": "annotation_removed", "annotation_id": annotation_id})
        return {"removed": ingest.annotation_to_dict(ann)}

    # -- sessions ----------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionBody):
        bg = UserBackground(
            country=body.background.country,
            age=body.background.age,
            education=body.background.education,
            fwc=body.background.fwc,
            fwtcp=body.background.fwtcp,
            note=body.background.note,
        )
        session = Session(state.next_id("s"), bg,
                          dt.datetime.now(dt.timezone.utc).isoformat())
        state.sessions[session.id] = session
        state.store.append({
            "type": "session_created",
            "session_id": session.id,
            "created_at": session.created_at,
            "background": {
                "country": bg.country, "age": bg.age, "education": bg.education,
                "fwc": bg.fwc, "fwtcp": bg.fwtcp, "note": bg.note,
            },
        })
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = state.session(session_id)
        return {
            "session_id": session.id,
            "created_at": session.created_at,
            "background": {
                "country": session.background.country,
                "age": session.background.age,
                "education": session.background.education,
                "fwc": session.background.fwc,
                "fwtcp": session.background.fwtcp,
                "note": session.background.note,
            },
            "threads": {
                scope: [
                    {"turn_id": t.turn_id, "user_text": t.user_text,
                     "assistant_text": t.assistant_text}
                    for t in state.gateway.threads[tid].turns
                ]
                for scope, tid in session.threads.items()
            },
            "translations": sorted(session.translations),
            "history": session.history,
        }

    # -- LLM-backed workflow ------------------------------------------------------

    def _chat_on_scope(session: Session, scope: str, envelope) -> "object":
        with state.scope_lock(session.id, scope):
            system_text = next(t for r, t in envelope.messages if r == engine.SYSTEM)
            thread_id = state.thread_for(session, scope, system_text)
            turn = state.gateway.chat(thread_id, envelope)
            return thread_id, turn

    @app.post("/sessions/{session_id}/qa")
    def qa(session_id: str, body: QaBody):
        session = state.session(session_id)
        norm = state.norm(body.norm_id)
        envelope = engine.build_qa_prompt(session.background, norm,
                                          question=body.question, preset=body.preset)
        thread_id, turn = _chat_on_scope(session, SCOPE_SOURCE, envelope)
        event = {
            "type": "qa", "session_id": session.id, "scope": SCOPE_SOURCE,
            "thread_id": thread_id, "turn_id": turn.turn_id,
            "norm_id": body.norm_id,
            "system_message": state.gateway.threads[thread_id].system_message,
            "user_text": turn.user_text, "assistant_text": turn.assistant_text,
        }
        event = state.store.append(event)
        session.history.append(event)
        return {"turn": {"turn_id": turn.turn_id, "question": turn.user_text,
                         "reply": turn.assistant_text}}

    @app.delete("/sessions/{session_id}/threads/{scope}/turns/{turn_id}")
    def delete_turn(session_id: str, scope: str, turn_id: str):
        session = state.session(session_id)
        thread_id = session.threads.get(scope)
        if thread_id is None:
            raise UnknownTurn(turn_id)
        state.gateway.delete_turn(thread_id, turn_id)
        event = {"type": "turn_deleted", "session_id": session.id,
                 "scope": scope, "turn_id": turn_id}
        event = state.store.append(event)
        session.history.append(event)
        return {"deleted": turn_id}

    @app.post("/sessions/{session_id}/image")
    def generate_image(session_id: str, body: ImageBody):
        session = state.session(session_id)
        norm = state.norm(body.norm_id)
        envelope = engine.build_image_prompt(session.background, norm, body.task)
        result = state.gateway.generate_image(envelope)
        session.images.append(result)
        event = {
            "type": "image", "session_id": session.id, "norm_id": body.norm_id,
            "task": body.task,
            "prompt_text": "\n".join(t for _r, t in envelope.messages),
            "image": {"id": result.id, "prompt_hash": result.prompt_hash,
                      "image_ref": result.image_ref, "index": result.index},
        }
        event = state.store.append(event)
        session.history.append(event)
        return {"image": event["image"]}

    @app.post("/sessions/{session_id}/image/{image_id}/regenerate")
    def regenerate_image(session_id: str, image_id: str):
        session = state.session(session_id)
        result = state.gateway.regenerate(image_id)
        session.images.append(result)
        event = {
            "type": "image", "session_id": session.id, "norm_id": "", "task": "",
            "prompt_text": "",
            "image": {"id": result.id, "prompt_hash": result.prompt_hash,
                      "image_ref": result.image_ref, "index": result.index},
        }
        event = state.store.append(event)
        session.history.append(event)
        return {"image": event["image"]}

    @app.delete("/sessions/{session_id}/image/{image_id}")
    def delete_image(session_id: str, image_id: str):
        session = state.session(session_id)
        state.gateway.delete_image(image_id)
        session.images = [i for i in session.images if i.id != image_id]
        state.store.append({"type": "image_deleted", "session_id": session.id,
                            "image_id": image_id})
        return {"deleted": image_id}

    @app.post("/sessions/{session_id}/translate")
    def translate(session_id: str, body: TranslateBody):
        session = state.session(session_id)
        norm = state.norm(body.norm_id)
        conditions = _parse_facets(body.conditions, EmptyConditions)
        questions = _parse_facets(body.questions, EmptyQuestions)
        request = TranslationRequest(session.background, norm, conditions, questions)
        envelope = engine.build_translation_prompt(request)
        thread_id, turn = _chat_on_scope(session, SCOPE_TRANSFER, envelope)
        raw = turn.assistant_text
        try:
            parsed = parse_translation_response(raw, request)
        except (MalformedResponse, SchemaViolation) as exc:
            exc.raw_text = raw
            raise
        parsed_json = serialize_target_norms(parsed, session.background.country)
        record = TranslationRecord(
            translation_id=state.next_id("tr"),
            norm_id=body.norm_id,
            conditions=sorted(f.value for f in conditions),
            questions=sorted(f.value for f in questions),
            raw=raw,
            parsed_json=parsed_json,
            target_culture=session.background.country,
        )
        session.translations[record.translation_id] = record
        event = {
            "type": "translation", "session_id": session.id,
            "translation_id": record.translation_id, "norm_id": record.norm_id,
            "conditions": record.conditions, "questions": record.questions,
            "raw": raw, "parsed_json": parsed_json,
            "target_culture": record.target_culture,
            "scope": SCOPE_TRANSFER, "thread_id": thread_id,
            "turn_id": turn.turn_id,
            "system_message": state.gateway.threads[thread_id].system_message,
            "user_text": turn.user_text, "assistant_text": turn.assistant_text,
        }
        event = state.store.append(event)
        session.history.append(event)
        return {
            "translation_id": record.translation_id,
            "target_norms": target_norms_to_list(parsed),
            "raw": raw,
        }

    @app.post("/sessions/{session_id}/verify")
    def verify(session_id: str, body: VerifyBody):
        session = state.session(session_id)
        record = session.translations.get(body.translation_id)
        if record is None:
            raise UnknownTranslation(body.translation_id)
        norm = state.norm(record.norm_id)
        request = TranslationRequest(
            session.background, norm,
            _parse_facets(record.conditions, EmptyConditions),
            _parse_facets(record.questions, EmptyQuestions),
        )
        envelope = engine.build_verification_prompt(
            session.background, norm, request, record.parsed_json
        )
        thread_id, turn = _chat_on_scope(session, SCOPE_EXTRAPOLATION, envelope)
        try:
            verdict = parse_verdict_response(turn.assistant_text)
        except (MalformedResponse, SchemaViolation) as exc:
            exc.raw_text = turn.assistant_text
            raise
        verdict_body = {
            "judgment": verdict.judgment.value,
            "reasons": list(verdict.reasons),
            "recommendations": list(verdict.recommendations),
        }
        event = {"type": "verdict", "session_id": session.id,
                 "translation_id": body.translation_id,
                 "raw": turn.assistant_text, "verdict": verdict_body,
                 "scope": SCOPE_EXTRAPOLATION, "thread_id": thread_id,
                 "turn_id": turn.turn_id,
                 "system_message": state.gateway.threads[thread_id].system_message,
                 "user_text": turn.user_text, "assistant_text": turn.assistant_text}
        event = state.store.append(event)
        session.history.append(event)
        return {"verdict": verdict_body, "raw": turn.assistant_text}

    @app.post("/sessions/{session_id}/infer")
    def infer(session_id: str, body: InferBody):
        session = state.session(session_id)
        norm = state.norm(body.norm_id)
        try:
            anchor = Facet(body.anchor.strip().lower())
        except ValueError:
            raise RequestValidationError([
                {"loc": ("body", "anchor"), "msg": f"unknown facet {body.anchor!r}", "type": "value_error"}
            ])
        envelope = engine.build_inference_prompt(session.background, norm, anchor)
        thread_id, turn = _chat_on_scope(session, SCOPE_EXTRAPOLATION, envelope)
        try:
            items = parse_inference_response(turn.assistant_text)
        except (MalformedResponse, SchemaViolation) as exc:
            exc.raw_text = turn.assistant_text
            raise
        items_body = [
            {"culture": i.culture, "value": i.value, "explanation": i.explanation}
            for i in items
        ]
        event = {"type": "inference", "session_id": session.id,
                 "norm_id": body.norm_id, "anchor": anchor.value,
                 "raw": turn.assistant_text, "items": items_body,
                 "scope": SCOPE_EXTRAPOLATION, "thread_id": thread_id,
                 "turn_id": turn.turn_id,
                 "system_message": state.gateway.threads[thread_id].system_message,
                 "user_text": turn.user_text, "assistant_text": turn.assistant_text}
        event = state.store.append(event)
        session.history.append(event)
        return {"items": items_body, "raw": turn.assistant_text}

    return app
