"""Deterministic prompt assembly for every model-facing task.

Templates live as text files next to this module and use ``{{placeholder}}``
syntax; an unresolved placeholder at render time is a hard error so template
drift breaks loudly in tests rather than silently in prompts.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Optional, Union

from ..model import CulturalNorm, EmotionPolarity, RhetoricType

SYSTEM = "system"
USER = "user"

_PLACEHOLDER = re.compile(r"\{\{(\w+)\}\}")


class TemplateError(Exception):
    pass


class UnknownPreset(Exception):
    pass


class EmptyTask(Exception):
    pass


class EmptyConditions(Exception):
    pass


class EmptyQuestions(Exception):
    pass


class InvalidBackground(Exception):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(message)


class Facet(Enum):
    """One of the five selectable parts of a cultural norm."""

    ELEMENT = "element"
    RHETORIC = "rhetoric"
    SYMBOL = "symbol"
    CUSTOM = "custom"
    EMOTION = "emotion"


FACET_ORDER = (Facet.ELEMENT, Facet.RHETORIC, Facet.SYMBOL, Facet.CUSTOM, Facet.EMOTION)

QA_PRESETS = ("qa_preset_1", "qa_preset_2", "qa_preset_3")


@dataclass(frozen=True)
class UserBackground:
    country: str
    age: int
    education: str
    fwc: int
    fwtcp: int
    note: str = ""

    def __post_init__(self):
        if not self.country.strip():
            raise InvalidBackground("country", "country must be non-empty")
        if self.age < 0:
            raise InvalidBackground("age", "age must be non-negative")
        if self.fwc not in (1, 2, 3, 4, 5):
            raise InvalidBackground("fwc", "fwc must be in 1..5")
        if self.fwtcp not in (1, 2, 3, 4, 5):
            raise InvalidBackground("fwtcp", "fwtcp must be in 1..5")


@dataclass(frozen=True)
class TranslationRequest:
    background: UserBackground
    source_norm: CulturalNorm
    conditions: frozenset[Facet]
    questions: frozenset[Facet]

    def __post_init__(self):
        if not self.conditions:
            raise EmptyConditions("conditions must be non-empty")
        if not self.questions:
            raise EmptyQuestions("questions must be non-empty")


@dataclass(frozen=True)
class PromptEnvelope:
    template_id: str
    messages: tuple[tuple[str, str], ...]
    content_hash: str = field(default="", compare=False)


def _hash_messages(messages: tuple[tuple[str, str], ...]) -> str:
    digest = hashlib.sha256()
    for role, text in messages:
        digest.update(role.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(text.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


def _envelope(template_id: str, messages: list[tuple[str, str]]) -> PromptEnvelope:
    msgs = tuple(messages)
    return PromptEnvelope(template_id, msgs, _hash_messages(msgs))


def load_template(template_id: str) -> str:
    ref = resources.files(__package__) / "templates" / f"{template_id}.txt"
    try:
        return ref.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise TemplateError(f"no template {template_id!r}") from exc


def render_template(template_id: str, **values: str) -> str:
    text = load_template(template_id)

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in values:
            raise TemplateError(f"template {template_id!r}: no value for placeholder {name!r}")
        return values[name]

    return _PLACEHOLDER.sub(substitute, text).rstrip("\n")


def _token(value: Union[RhetoricType, EmotionPolarity, str]) -> str:
    return value.value if isinstance(value, (RhetoricType, EmotionPolarity)) else str(value)


def render_background(bg: UserBackground) -> str:
    lines = [
        f"- country: {bg.country}",
        f"- age: {bg.age}",
        f"- education: {bg.education}",
        f"- familiarity with Chinese culture (1-5): {bg.fwc}",
        f"- familiarity with Traditional Chinese Painting (1-5): {bg.fwtcp}",
    ]
    if bg.note:
        lines.append(f"- note: {bg.note}")
    return "\n".join(lines)


def facet_value(norm: CulturalNorm, facet: Facet) -> str:
    if facet is Facet.ELEMENT:
        return norm.element
    if facet is Facet.RHETORIC:
        return _token(norm.rhetoric)
    if facet is Facet.SYMBOL:
        return norm.symbol_en
    if facet is Facet.CUSTOM:
        return norm.custom_en
    return _token(norm.emotion)


def render_norm(norm: CulturalNorm) -> str:
    return "\n".join(
        [
            f"- element: {norm.element}",
            f"- rhetoric: {_token(norm.rhetoric)}",
            f"- symbol: {norm.symbol_en} ({norm.symbol_zh})",
            f"- custom: {norm.custom_en} ({norm.custom_zh})",
            f"- emotion: {_token(norm.emotion)}",
        ]
    )


def _source_facets_block(norm: CulturalNorm, conditions: frozenset[Facet]) -> str:
    return "\n".join(
        f"- source {facet.value}: {facet_value(norm, facet)}"
        for facet in FACET_ORDER
        if facet in conditions
    )


_FACET_DEFINITIONS = {
    Facet.ELEMENT: "Element: the visual entity depicted in the painting, either a single object class or an AND-combination of object classes carrying its own symbolism.",
    Facet.SYMBOL: "Symbol: the abstract meaning the element stands for under the rhetoric.",
    Facet.CUSTOM: "Custom: the cultural, societal, or traditional practice or belief that explains why the symbol holds.",
    Facet.EMOTION: "Emotion: the sentiment, one of positive, negative, or neutral, that the symbol evokes within its culture.",
}


def _definitions_block(facets: frozenset[Facet]) -> str:
    parts = []
    for facet in FACET_ORDER:
        if facet not in facets:
            continue
        if facet is Facet.RHETORIC:
            parts.append(
                "Rhetoric: the technique linking a depicted element to its symbolic meaning. "
                "The six recognized techniques:\n" + load_template("rhetoric_definitions").rstrip("\n")
            )
        else:
            parts.append(_FACET_DEFINITIONS[facet])
    return "\n".join(parts)


def _questions_block(questions: frozenset[Facet]) -> str:
    return "\n".join(
        f"- target {facet.value}: give the {facet.value} in the target culture"
        for facet in FACET_ORDER
        if facet in questions
    )


def build_qa_prompt(
    bg: UserBackground,
    norm: CulturalNorm,
    question: Optional[str] = None,
    preset: Optional[int] = None,
) -> PromptEnvelope:
    """Question-answering prompt: preset 1..3 or a free question, verbatim."""
    if preset is not None:
        if preset not in (1, 2, 3):
            raise UnknownPreset(f"preset {preset} (valid: 1, 2, 3)")
        question_text = load_template(QA_PRESETS[preset - 1]).strip()
    else:
        if question is None:
            raise UnknownPreset("either preset or question is required")
        question_text = question
    system = render_template(
        "qa_system", background=render_background(bg), norm=render_norm(norm)
    )
    return _envelope("qa_system", [(SYSTEM, system), (USER, question_text)])


def build_image_prompt(bg: UserBackground, norm: CulturalNorm, task: str) -> PromptEnvelope:
    if not task.strip():
        raise EmptyTask("image generation task must be non-empty")
    system = render_template(
        "image_system",
        background=render_background(bg),
        norm=render_norm(norm),
        country=bg.country,
    )
    user = render_template("image_user", task=task)
    return _envelope("image_system", [(SYSTEM, system), (USER, user)])


def build_translation_prompt(req: TranslationRequest) -> PromptEnvelope:
    involved = req.conditions | req.questions
    system = render_template(
        "translate_system",
        background=render_background(req.background),
        source_facets=_source_facets_block(req.source_norm, req.conditions),
        definitions=_definitions_block(involved),
        questions=_questions_block(req.questions),
        country=req.background.country,
        output_format=load_template("output_format_translation").rstrip("\n"),
    )
    user = render_template("translate_user")
    return _envelope("translate_system", [(SYSTEM, system), (USER, user)])


def build_verification_prompt(
    bg: UserBackground,
    source_norm: CulturalNorm,
    request: TranslationRequest,
    result_text: str,
) -> PromptEnvelope:
    """Restates the whole translation path and asks for a judgment.

    ``result_text`` is the serialized target-norm list under review; an empty
    result is still rendered, flagged as such.
    """
    system = render_template(
        "verify_system",
        background=render_background(bg),
        norm=render_norm(source_norm),
        conditions=_source_facets_block(source_norm, request.conditions),
        questions=_questions_block(request.questions),
        country=bg.country,
        result=result_text.strip() or "(empty translation result)",
        output_format=load_template("output_format_verdict").rstrip("\n"),
    )
    return _envelope("verify_system", [(SYSTEM, system), (USER, "Give your judgment now.")])


def build_inference_prompt(
    bg: UserBackground, source_norm: CulturalNorm, anchor: Facet = Facet.SYMBOL
) -> PromptEnvelope:
    system = render_template(
        "infer_system",
        background=render_background(bg),
        norm=render_norm(source_norm),
        anchor=anchor.value,
        country=bg.country,
        output_format=load_template("output_format_inference").rstrip("\n"),
    )
    return _envelope("infer_system", [(SYSTEM, system), (USER, "List the analogies now.")])
