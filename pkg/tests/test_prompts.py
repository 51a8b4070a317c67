import itertools
import random
from pathlib import Path

import pytest

import cultiverse
from cultiverse import ingest, replays
from cultiverse.model import CulturalNorm, EmotionPolarity, RhetoricType
from cultiverse.prompts import engine
from cultiverse.prompts.engine import (
    EmptyConditions,
    EmptyQuestions,
    EmptyTask,
    Facet,
    FACET_ORDER,
    InvalidBackground,
    PromptEnvelope,
    TemplateError,
    TranslationRequest,
    UnknownPreset,
    UserBackground,
)
from cultiverse.prompts.parsing import parse_translation_response, serialize_target_norms

GOLDEN = Path(__file__).parent / "golden"


def envelope_text(env: PromptEnvelope) -> str:
    return "\n".join(t for _r, t in env.messages)


def golden_format(env: PromptEnvelope) -> str:
    text = "\n".join(f"[{role}]\n{t}\n" for role, t in env.messages)
    return f"template_id: {env.template_id}\ncontent_hash: {env.content_hash}\n\n{text}"


@pytest.fixture(scope="module")
def fixture_dataset():
    return ingest.load_dataset(cultiverse.fixture_root())


@pytest.fixture(scope="module")
def marquess_norm(fixture_dataset):
    return next(n for n in fixture_dataset.norms if n.id == "n005")


def random_background(rng: random.Random) -> UserBackground:
    return UserBackground(
        country=rng.choice(["Japan", "Indonesia", "France", "Brazil", "Kenya"]),
        age=rng.randint(16, 80),
        education=rng.choice(["secondary", "bachelor", "master"]),
        fwc=rng.randint(1, 5),
        fwtcp=rng.randint(1, 5),
        note=rng.choice(["", "likes anime", "art historian"]),
    )


def random_norm(rng: random.Random) -> CulturalNorm:
    i = rng.randint(0, 10_000)
    return CulturalNorm(
        f"n{i}", f"element-{i}", rng.choice(list(RhetoricType)),
        f"符{i}", f"symbol-{i}", f"俗{i}", f"custom-{i}",
        rng.choice(list(EmotionPolarity)),
    )


class TestQaPrompt:
    def test_preset_embeds_norm_and_country(self, marquess_norm):
        env = engine.build_qa_prompt(replays.KAY, marquess_norm, preset=1)
        text = envelope_text(env)
        assert "being ennobled as a marquess" in text
        assert replays.KAY.country in text

    def test_free_question_is_verbatim(self, marquess_norm):
        question = "why monkeys and nobility?"
        env = engine.build_qa_prompt(replays.KAY, marquess_norm, question=question)
        assert env.messages[-1] == (engine.USER, question)

    def test_unknown_preset(self, marquess_norm):
        with pytest.raises(UnknownPreset):
            engine.build_qa_prompt(replays.KAY, marquess_norm, preset=4)

    def test_three_presets_exist_and_differ(self, marquess_norm):
        questions = {
            engine.build_qa_prompt(replays.KAY, marquess_norm, preset=p).messages[-1][1]
            for p in (1, 2, 3)
        }
        assert len(questions) == 3

    def test_golden(self, marquess_norm):
        env = engine.build_qa_prompt(replays.KAY, marquess_norm, preset=1)
        assert golden_format(env) == (GOLDEN / "qa_preset1.txt").read_text(encoding="utf-8")


class TestImagePrompt:
    def test_task_and_country_embedded(self, marquess_norm):
        env = engine.build_image_prompt(
            replays.KAY, marquess_norm, "depict an ancient Chinese marquess"
        )
        text = envelope_text(env)
        assert "depict an ancient Chinese marquess" in text
        assert "Japan" in text

    def test_empty_task(self, marquess_norm):
        with pytest.raises(EmptyTask):
            engine.build_image_prompt(replays.KAY, marquess_norm, "   ")

    def test_deterministic_hash(self, marquess_norm):
        a = engine.build_image_prompt(replays.KAY, marquess_norm, "task")
        b = engine.build_image_prompt(replays.KAY, marquess_norm, "task")
        assert a.content_hash == b.content_hash


class TestTranslationPrompt:
    def test_case1_shape(self, marquess_norm):
        req = TranslationRequest(
            replays.KAY, marquess_norm, frozenset({Facet.SYMBOL}), frozenset({Facet.ELEMENT})
        )
        text = envelope_text(engine.build_translation_prompt(req))
        assert "being ennobled as a marquess" in text
        assert "Japan" in text
        assert marquess_norm.custom_en not in text  # custom not conditioned
        assert "target element" in text

    def test_empty_sets_rejected(self, marquess_norm):
        with pytest.raises(EmptyConditions):
            TranslationRequest(replays.KAY, marquess_norm, frozenset(), frozenset({Facet.SYMBOL}))
        with pytest.raises(EmptyQuestions):
            TranslationRequest(replays.KAY, marquess_norm, frozenset({Facet.SYMBOL}), frozenset())

    def test_all_961_condition_question_pairs(self):
        """Every non-empty (C, Q) pair renders; conditioned facets appear,
        unconditioned source values never leak (checked with sentinels)."""
        sentinel_norm = CulturalNorm(
            "nx", "SENTINEL-ELEMENT-93d1", RhetoricType.HOMOPHONY,
            "蜂猴", "SENTINEL-SYMBOL-5a2e", "俗", "SENTINEL-CUSTOM-7f40",
            EmotionPolarity.NEGATIVE,
        )
        sentinels = {
            Facet.ELEMENT: "SENTINEL-ELEMENT-93d1",
            Facet.SYMBOL: "SENTINEL-SYMBOL-5a2e",
            Facet.CUSTOM: "SENTINEL-CUSTOM-7f40",
        }
        labels = {Facet.RHETORIC: "- source rhetoric:", Facet.EMOTION: "- source emotion:"}
        facets = list(FACET_ORDER)
        subsets = [
            frozenset(c)
            for r in range(1, 6)
            for c in itertools.combinations(facets, r)
        ]
        assert len(subsets) == 31
        count = 0
        for conditions in subsets:
            for questions in subsets:
                req = TranslationRequest(replays.KAY, sentinel_norm, conditions, questions)
                text = envelope_text(engine.build_translation_prompt(req))
                for facet, sentinel in sentinels.items():
                    assert (sentinel in text) == (facet in conditions)
                for facet, label in labels.items():
                    assert (label in text) == (facet in conditions)
                for facet in facets:
                    assert (f"- target {facet.value}:" in text) == (facet in questions)
                count += 1
        assert count == 961

    def test_golden(self, marquess_norm):
        req = TranslationRequest(
            replays.KAY, marquess_norm, frozenset({Facet.SYMBOL}), frozenset({Facet.ELEMENT})
        )
        env = engine.build_translation_prompt(req)
        assert golden_format(env) == (
            GOLDEN / "translate_symbol_to_element.txt"
        ).read_text(encoding="utf-8")


class TestVerificationPrompt:
    def _case1(self, marquess_norm):
        req = TranslationRequest(
            replays.KAY, marquess_norm, frozenset({Facet.SYMBOL}), frozenset({Facet.ELEMENT})
        )
        parsed = parse_translation_response(replays.CASE1_TRANSLATE_REPLY, req)
        return req, serialize_target_norms(parsed, replays.KAY.country)

    def test_restates_translation_path(self, fixture_dataset):
        lion = next(n for n in fixture_dataset.norms if n.id == "n011")
        req = TranslationRequest(
            replays.LILY, lion, frozenset({Facet.SYMBOL}), frozenset({Facet.ELEMENT})
        )
        parsed = parse_translation_response(replays.CASE2_TRANSLATE_LION_DRAGON_REPLY, req)
        result_json = serialize_target_norms(parsed, "Indonesia")
        text = envelope_text(
            engine.build_verification_prompt(replays.LILY, lion, req, result_json)
        )
        assert "garuda" in text
        assert "to ward off evil spirits" in text
        assert "Indonesia" in text

    def test_empty_result_still_renders(self, marquess_norm):
        req, _ = self._case1(marquess_norm)
        env = engine.build_verification_prompt(replays.KAY, marquess_norm, req, "")
        assert "(empty translation result)" in envelope_text(env)

    def test_golden(self, marquess_norm):
        req, result_json = self._case1(marquess_norm)
        env = engine.build_verification_prompt(replays.KAY, marquess_norm, req, result_json)
        assert golden_format(env) == (GOLDEN / "verify_case1.txt").read_text(encoding="utf-8")


class TestInferencePrompt:
    def test_symbol_anchor(self, marquess_norm):
        env = engine.build_inference_prompt(replays.KAY, marquess_norm, Facet.SYMBOL)
        text = envelope_text(env)
        assert "being ennobled as a marquess" in text
        assert '"symbol"' in text

    def test_emotion_anchor_names_facet(self, marquess_norm):
        env = engine.build_inference_prompt(replays.KAY, marquess_norm, Facet.EMOTION)
        assert '"emotion"' in envelope_text(env)

    def test_golden(self, marquess_norm):
        env = engine.build_inference_prompt(replays.KAY, marquess_norm, Facet.SYMBOL)
        assert golden_format(env) == (GOLDEN / "infer_symbol.txt").read_text(encoding="utf-8")


class TestDeterminism:
    def test_repeated_renders_are_byte_identical(self):
        rng = random.Random(7)
        for _ in range(100):
            bg = random_background(rng)
            norm = random_norm(rng)
            builders = [
                lambda: engine.build_qa_prompt(bg, norm, preset=2),
                lambda: engine.build_image_prompt(bg, norm, "task"),
                lambda: engine.build_translation_prompt(
                    TranslationRequest(bg, norm, frozenset({Facet.CUSTOM}),
                                       frozenset({Facet.SYMBOL, Facet.EMOTION}))
                ),
                lambda: engine.build_inference_prompt(bg, norm),
            ]
            for build in builders:
                first, second = build(), build()
                assert first.messages == second.messages
                assert first.content_hash == second.content_hash


class TestBackgroundValidation:
    def test_fwc_range(self):
        with pytest.raises(InvalidBackground) as exc:
            UserBackground("Japan", 20, "bachelor", 6, 2)
        assert exc.value.field == "fwc"

    def test_fwtcp_range(self):
        with pytest.raises(InvalidBackground) as exc:
            UserBackground("Japan", 20, "bachelor", 3, 0)
        assert exc.value.field == "fwtcp"

    def test_empty_country(self):
        with pytest.raises(InvalidBackground):
            UserBackground("  ", 20, "bachelor", 3, 3)


class TestTemplates:
    def test_unknown_placeholder_is_error(self):
        with pytest.raises(TemplateError):
            engine.render_template("translate_system", background="x")

    def test_missing_template_is_error(self):
        with pytest.raises(TemplateError):
            engine.load_template("no_such_template")
