"""Canned end-to-end walkthrough scripts for the two showcase sessions.

Each script pins the exact model replies for a fixed sequence of requests
against the shipped fixture, keyed by prompt content hash, so full sessions
replay byte-identically against the mock provider with no network.
"""

from __future__ import annotations

import json
from pathlib import Path

from .analytics import norms_for_element
from .ingest import Dataset
from .prompts import engine
from .prompts.engine import Facet, TranslationRequest, UserBackground
from .prompts.parsing import parse_translation_response, serialize_target_norms

KAY = UserBackground(
    country="Japan", age=29, education="bachelor", fwc=5, fwtcp=3,
    note="deep appreciation for Japanese culture",
)
LILY = UserBackground(
    country="Indonesia", age=21, education="undergraduate", fwc=3, fwtcp=1,
)

CASE1_QA_REPLY = (
    "In daily life this pairing was a gift motif: presenting a painting of bees "
    "and monkeys wished the recipient a rise to the rank of marquess."
)
CASE1_FOLLOWUP_REPLY = (
    "Monkeys are symbols of intelligence and wit, so drawing one may imply a "
    "tribute to the wisdom and mastermind of nobles."
)
CASE1_TRANSLATE_REPLY = json.dumps({
    "target_culture": "Japan",
    "norms": [
        {
            "facet_values": {"element": {"native": "菊", "gloss_en": "chrysanthemum"}},
            "explanation": "The chrysanthemum is the emblem of the imperial court and of high honor in Japan.",
            "rhetoric": "iconic",
            "emotion": "positive",
        },
        {
            "facet_values": {"element": {"native": "家紋", "gloss_en": "family crest"}},
            "explanation": "A family crest marks hereditary rank and noble lineage in Japan.",
            "rhetoric": "iconic",
            "emotion": "positive",
        },
    ],
}, ensure_ascii=False)
CASE1_VERDICT_REPLY = json.dumps({
    "judgment": "appropriate",
    "reasons": [
        "Chrysanthemum and family crest are established emblems of rank in Japanese culture.",
    ],
    "recommendations": [
        "Note that the chrysanthemum crest is reserved for the imperial household in formal contexts.",
    ],
}, ensure_ascii=False)
CASE1_INFER_REPLY = json.dumps({
    "items": [
        {"culture": "British", "value": "coronet mounted with pearls",
         "explanation": "The coronet of a British marquess carries four strawberry leaves and four pearls."},
        {"culture": "Indian", "value": "tiger",
         "explanation": "The tiger marks princely power and high rank in Indian heraldry."},
        {"culture": "French", "value": "fleur-de-lis",
         "explanation": "The fleur-de-lis marks nobility and royal favor in French heraldry."},
    ],
}, ensure_ascii=False)

CASE2_TRANSLATE_HIBISCUS_REPLY = json.dumps({
    "target_culture": "Indonesia",
    "norms": [
        {
            "facet_values": {"symbol": {"native": "kecantikan", "gloss_en": "beauty"}},
            "explanation": "The hibiscus is worn and planted as an emblem of beauty across Indonesia.",
            "rhetoric": "iconic",
            "emotion": "positive",
        },
        {
            "facet_values": {"symbol": {"native": "kesucian", "gloss_en": "purity"}},
            "explanation": "White hibiscus blossoms stand for purity in Indonesian ceremonies.",
            "rhetoric": "iconic",
            "emotion": "positive",
        },
    ],
}, ensure_ascii=False)
CASE2_TRANSLATE_LION_DRAGON_REPLY = json.dumps({
    "target_culture": "Indonesia",
    "norms": [
        {
            "facet_values": {"element": {"native": "garuda", "gloss_en": "garuda"}},
            "explanation": "The garuda is a guardian bird that wards off evil in Indonesian tradition.",
            "rhetoric": "iconic",
            "emotion": "positive",
        },
        {
            "facet_values": {"element": {"native": "wayang", "gloss_en": "shadow puppet"}},
            "explanation": "Wayang performances are staged to drive away evil spirits.",
            "rhetoric": "iconic",
            "emotion": "positive",
        },
    ],
}, ensure_ascii=False)
CASE2_VERDICT_REPLY = json.dumps({
    "judgment": "appropriate",
    "reasons": [
        "The garuda is a protective symbol of national standing in Indonesia, matching the ward-off-evil meaning.",
        "Traditional stories associate the garuda with guarding against malevolent forces.",
    ],
    "recommendations": [
        "Prefer the garuda over generic dragon imagery when addressing an Indonesian audience.",
    ],
}, ensure_ascii=False)


def _norm(dataset: Dataset, element_id: str, norm_id: str):
    for n in norms_for_element(dataset, element_id):
        if n.id == norm_id:
            return n
    raise KeyError(norm_id)


def build_mock_script(dataset: Dataset) -> dict:
    """Canned replies for both walkthroughs, keyed by prompt content hash."""
    replies: dict[str, str] = {}

    # Case 1 (Kay): bee&monkey -> marquess -> Japan.
    marquess = _norm(dataset, "bee&monkey", "n005")
    replies[engine.build_qa_prompt(KAY, marquess, preset=1).content_hash] = CASE1_QA_REPLY
    replies[
        engine.build_qa_prompt(KAY, marquess, question="why monkeys and nobility?").content_hash
    ] = CASE1_FOLLOWUP_REPLY
    case1_request = TranslationRequest(
        KAY, marquess, frozenset({Facet.SYMBOL}), frozenset({Facet.ELEMENT})
    )
    replies[engine.build_translation_prompt(case1_request).content_hash] = CASE1_TRANSLATE_REPLY
    case1_parsed = parse_translation_response(CASE1_TRANSLATE_REPLY, case1_request)
    case1_result_json = serialize_target_norms(case1_parsed, KAY.country)
    replies[
        engine.build_verification_prompt(KAY, marquess, case1_request, case1_result_json).content_hash
    ] = CASE1_VERDICT_REPLY
    replies[
        engine.build_inference_prompt(KAY, marquess, Facet.SYMBOL).content_hash
    ] = CASE1_INFER_REPLY

    # Case 2 (Lily): hibiscus annotation -> Indonesia; lion dragon -> garuda.
    hibiscus = _norm(dataset, "hibiscus", "n010")
    case2_request_1 = TranslationRequest(
        LILY, hibiscus, frozenset({Facet.ELEMENT}), frozenset({Facet.SYMBOL})
    )
    replies[engine.build_translation_prompt(case2_request_1).content_hash] = (
        CASE2_TRANSLATE_HIBISCUS_REPLY
    )
    lion_dragon = _norm(dataset, "lion dragon", "n011")
    case2_request_2 = TranslationRequest(
        LILY, lion_dragon, frozenset({Facet.SYMBOL}), frozenset({Facet.ELEMENT})
    )
    replies[engine.build_translation_prompt(case2_request_2).content_hash] = (
        CASE2_TRANSLATE_LION_DRAGON_REPLY
    )
    case2_parsed = parse_translation_response(CASE2_TRANSLATE_LION_DRAGON_REPLY, case2_request_2)
    case2_result_json = serialize_target_norms(case2_parsed, LILY.country)
    replies[
        engine.build_verification_prompt(
            LILY, lion_dragon, case2_request_2, case2_result_json
        ).content_hash
    ] = CASE2_VERDICT_REPLY

    return {"replies": replies, "fallback": []}


def write_mock_script(dataset: Dataset, path: str) -> None:
    Path(path).write_text(
        json.dumps(build_mock_script(dataset), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
