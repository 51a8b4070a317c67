"""Tolerant parsing of structured model replies.

Replies are expected to contain one JSON object following the task's output
format; surrounding prose (and markdown fences) is tolerated. Parsers are
total: any byte string yields either a typed value or MalformedResponse /
SchemaViolation, never an unhandled exception.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..model import EmotionPolarity, RhetoricType
from .engine import Facet, TranslationRequest


class MalformedResponse(Exception):
    """No parseable JSON object found in the reply."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")


class SchemaViolation(Exception):
    """A JSON object was found but does not match the expected shape."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (block at byte {offset})")


@dataclass(frozen=True)
class FacetValue:
    native: str
    gloss_en: str


@dataclass(frozen=True)
class TargetNorm:
    """One translated norm in the target culture.

    ``rhetoric``/``emotion`` are None when the model's token falls outside
    the known enumerations (target cultures need not fit the six types).
    """

    facet_values: tuple[tuple[Facet, FacetValue], ...]
    explanation: str
    rhetoric: Optional[RhetoricType] = None
    emotion: Optional[EmotionPolarity] = None

    def value_for(self, facet: Facet) -> Optional[FacetValue]:
        for f, v in self.facet_values:
            if f is facet:
                return v
        return None


class Judgment(Enum):
    APPROPRIATE = "appropriate"
    INAPPROPRIATE = "inappropriate"
    UNCERTAIN = "uncertain"


@dataclass(frozen=True)
class Verdict:
    judgment: Judgment
    reasons: tuple[str, ...]
    recommendations: tuple[str, ...] = ()


@dataclass(frozen=True)
class InferenceItem:
    culture: str
    value: str
    explanation: str


def extract_json_object(text: str) -> tuple[dict, int]:
    """First decodable JSON object in ``text``, with its byte offset."""
    decoder = json.JSONDecoder()
    pos = text.find("{")
    while pos != -1:
        try:
            obj, _end = decoder.raw_decode(text, pos)
        except (json.JSONDecodeError, ValueError):
            pos = text.find("{", pos + 1)
            continue
        if isinstance(obj, dict):
            offset = len(text[:pos].encode("utf-8"))
            return obj, offset
        pos = text.find("{", pos + 1)
    first = text.find("{")
    offset = len(text[: first if first != -1 else len(text)].encode("utf-8"))
    raise MalformedResponse("no JSON object found in reply", offset)


def _require(condition: bool, message: str, offset: int) -> None:
    if not condition:
        raise SchemaViolation(message, offset)


_RHETORIC_TOKENS = {r.value.lower(): r for r in RhetoricType}
_EMOTION_TOKENS = {e.value.lower(): e for e in EmotionPolarity}


def _rhetoric_token(token) -> Optional[RhetoricType]:
    if not isinstance(token, str):
        return None
    return _RHETORIC_TOKENS.get(token.strip().lower())


def _emotion_token(token) -> Optional[EmotionPolarity]:
    if not isinstance(token, str):
        return None
    return _EMOTION_TOKENS.get(token.strip().lower())


def parse_translation_response(text: str, req: TranslationRequest) -> list[TargetNorm]:
    obj, offset = extract_json_object(text)
    norms_raw = obj.get("norms")
    _require(isinstance(norms_raw, list), "'norms' must be a list", offset)
    results: list[TargetNorm] = []
    for i, raw in enumerate(norms_raw):
        _require(isinstance(raw, dict), f"norms[{i}] must be an object", offset)
        fv_raw = raw.get("facet_values")
        _require(isinstance(fv_raw, dict), f"norms[{i}].facet_values must be an object", offset)
        facet_values: list[tuple[Facet, FacetValue]] = []
        for key, value in fv_raw.items():
            try:
                facet = Facet(str(key).strip().lower())
            except ValueError:
                continue  # unknown facet keys are dropped, not fatal
            if facet not in req.questions:
                continue  # answers are restricted to what was asked
            _require(isinstance(value, dict), f"norms[{i}].facet_values[{key}] must be an object", offset)
            native = value.get("native")
            gloss = value.get("gloss_en")
            _require(isinstance(native, str), f"norms[{i}].facet_values[{key}].native must be a string", offset)
            _require(isinstance(gloss, str), f"norms[{i}].facet_values[{key}].gloss_en must be a string", offset)
            facet_values.append((facet, FacetValue(native, gloss)))
        explanation = raw.get("explanation", "")
        _require(isinstance(explanation, str), f"norms[{i}].explanation must be a string", offset)
        facet_values.sort(key=lambda fv: fv[0].value)
        results.append(
            TargetNorm(
                facet_values=tuple(facet_values),
                explanation=explanation,
                rhetoric=_rhetoric_token(raw.get("rhetoric")),
                emotion=_emotion_token(raw.get("emotion")),
            )
        )
    return results


def serialize_target_norms(norms: list[TargetNorm], target_culture: str) -> str:
    """Render target norms in the translation output format (the inverse of
    parse_translation_response for structurally valid inputs)."""
    payload = {
        "target_culture": target_culture,
        "norms": [
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
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2)


def parse_verdict_response(text: str) -> Verdict:
    obj, offset = extract_json_object(text)
    token = obj.get("judgment")
    _require(isinstance(token, str), "'judgment' must be a string", offset)
    try:
        judgment = Judgment(token.strip().lower())
    except ValueError:
        raise SchemaViolation(f"unknown judgment token {token!r}", offset)
    reasons = obj.get("reasons", [])
    recommendations = obj.get("recommendations", [])
    _require(
        isinstance(reasons, list) and all(isinstance(r, str) for r in reasons),
        "'reasons' must be a list of strings", offset,
    )
    _require(
        isinstance(recommendations, list) and all(isinstance(r, str) for r in recommendations),
        "'recommendations' must be a list of strings", offset,
    )
    _require(
        judgment is Judgment.UNCERTAIN or len(reasons) > 0,
        "reasons required unless judgment is uncertain", offset,
    )
    return Verdict(judgment, tuple(reasons), tuple(recommendations))


def parse_inference_response(text: str) -> list[InferenceItem]:
    obj, offset = extract_json_object(text)
    items_raw = obj.get("items")
    _require(isinstance(items_raw, list), "'items' must be a list", offset)
    items: list[InferenceItem] = []
    for i, raw in enumerate(items_raw):
        _require(isinstance(raw, dict), f"items[{i}] must be an object", offset)
        culture = raw.get("culture")
        value = raw.get("value")
        explanation = raw.get("explanation", "")
        _require(isinstance(culture, str) and culture.strip() != "", f"items[{i}].culture must be non-empty", offset)
        _require(isinstance(value, str), f"items[{i}].value must be a string", offset)
        _require(isinstance(explanation, str), f"items[{i}].explanation must be a string", offset)
        items.append(InferenceItem(culture, value, explanation))
    return items
