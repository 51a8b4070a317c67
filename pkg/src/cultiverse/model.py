"""Core domain types of the cultural-norm dataset.

Everything here is an immutable value object; datasets built from these
types can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Union


class RhetoricType(Enum):
    """The six techniques that bind a painted element to a symbolic meaning."""

    ICONIC = "Iconic"
    HOMOPHONY = "Homophony"
    HOMOPHONIC_PUN = "HomophonicPun"
    SYNONYM = "Synonym"
    HOMOGRAPH = "Homograph"
    SATIRE = "Satire"


class EmotionPolarity(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"


class ElementCategory(Enum):
    ANIMAL = "Animal"
    PLANT = "Plant"
    FRUIT = "Fruit"
    OTHER = "Other"
    COMPOSITE = "Composite"


ATOMIC_CATEGORIES = (
    ElementCategory.ANIMAL,
    ElementCategory.PLANT,
    ElementCategory.FRUIT,
    ElementCategory.OTHER,
)

# Category sizes of the full TCP cultural-norm corpus, kept as reference
# metadata alongside the desk-scale fixture shipped with this package.
FULL_CORPUS_CATEGORY_COUNTS = {
    ElementCategory.PLANT: 94,
    ElementCategory.ANIMAL: 86,
    ElementCategory.FRUIT: 16,
    ElementCategory.OTHER: 13,
    ElementCategory.COMPOSITE: 17,
}
FULL_CORPUS_ELEMENT_TOTAL = 226


class Provenance(Enum):
    DETECTED = "Detected"
    MANUAL = "Manual"


@dataclass(frozen=True)
class Element:
    """A visual entity: atomic (single object class) or an AND-combination
    of atomics carrying its own symbolism (e.g. bee & monkey)."""

    id: str
    name_zh: str
    name_en: str
    romanization: str
    category: ElementCategory
    constituents: tuple[str, ...] = ()

    @property
    def is_composite(self) -> bool:
        return self.category is ElementCategory.COMPOSITE


@dataclass(frozen=True)
class CulturalNorm:
    """One symbolic reading of an element: the element stands for a symbol
    via a rhetoric, explained by a custom, evoking an emotion.

    ``rhetoric`` and ``emotion`` may temporarily hold raw string tokens
    during ingest; validation rejects tokens outside the enumerations.
    """

    id: str
    element: str
    rhetoric: Union[RhetoricType, str]
    symbol_zh: str
    symbol_en: str
    custom_zh: str
    custom_en: str
    emotion: Union[EmotionPolarity, str]


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def within(self, image_w: float, image_h: float) -> bool:
        return (
            self.w > 0
            and self.h > 0
            and self.x >= 0
            and self.y >= 0
            and self.x + self.w <= image_w
            and self.y + self.h <= image_h
        )


@dataclass(frozen=True)
class Annotation:
    id: str
    painting_id: str
    box: BoundingBox
    element: str
    provenance: Provenance
    verifier_count: int = 0


@dataclass
class Painting:
    """Catalog record for one painting, with its element annotations."""

    id: str
    title_zh: str
    title_en: str
    artist: str
    dynasty: str
    medium: str
    width_cm: float
    height_cm: float
    location: str
    image_ref: str
    image_width: int
    image_height: int
    annotations: list[Annotation] = field(default_factory=list)


class DanglingConstituent(Exception):
    """A composite element refers to a missing or non-atomic constituent."""

    def __init__(self, element_id: str, constituent_id: str):
        self.element_id = element_id
        self.constituent_id = constituent_id
        super().__init__(f"element {element_id!r}: bad constituent {constituent_id!r}")


class DuplicateElementId(Exception):
    pass


class ElementIndex:
    """Id-keyed lookup over the element taxonomy."""

    def __init__(self, elements: Iterable[Element] = ()):
        self._by_id: dict[str, Element] = {}
        for e in elements:
            self.add(e)

    def add(self, element: Element) -> None:
        if element.id in self._by_id:
            raise DuplicateElementId(element.id)
        self._by_id[element.id] = element

    def get(self, element_id: str) -> Optional[Element]:
        return self._by_id.get(element_id)

    def __contains__(self, element_id: str) -> bool:
        return element_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self):
        return iter(self._by_id.values())

    def ids(self) -> list[str]:
        return sorted(self._by_id)


@dataclass(frozen=True)
class Violation:
    entity_id: str
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _rhetoric_of(token: Union[RhetoricType, str]) -> Optional[RhetoricType]:
    if isinstance(token, RhetoricType):
        return token
    try:
        return RhetoricType(token)
    except ValueError:
        return None


def _emotion_of(token: Union[EmotionPolarity, str]) -> Optional[EmotionPolarity]:
    if isinstance(token, EmotionPolarity):
        return token
    try:
        return EmotionPolarity(token)
    except ValueError:
        return None


def validate_norm(
    norm: CulturalNorm,
    elements: ElementIndex,
    seen_triples: Optional[set] = None,
) -> ValidationResult:
    """Collect every rule violated by ``norm`` against the element index.

    ``seen_triples`` lets callers validating a whole dictionary detect
    duplicate (element, rhetoric, symbol_en) rows; pass the same set for
    every norm in the batch.
    """
    violations: list[Violation] = []
    if norm.element not in elements:
        violations.append(
            Violation(norm.id, "UnknownElement", f"element {norm.element!r} not in index")
        )
    rhetoric = _rhetoric_of(norm.rhetoric)
    if rhetoric is None:
        violations.append(
            Violation(norm.id, "InvalidRhetoric", f"rhetoric {norm.rhetoric!r} is not one of the six types")
        )
    if _emotion_of(norm.emotion) is None:
        violations.append(
            Violation(norm.id, "InvalidEmotion", f"emotion {norm.emotion!r} is not one of the three polarities")
        )
    if not norm.symbol_en.strip():
        violations.append(Violation(norm.id, "EmptySymbol", "symbol_en must be non-empty"))
    if not norm.custom_en.strip():
        violations.append(Violation(norm.id, "EmptySymbol", "custom_en must be non-empty"))
    if seen_triples is not None and rhetoric is not None:
        key = (norm.element, rhetoric, norm.symbol_en)
        if key in seen_triples:
            violations.append(
                Violation(norm.id, "DuplicateTriple", f"duplicate (element, rhetoric, symbol_en) {key!r}")
            )
        seen_triples.add(key)
    return ValidationResult(tuple(violations))


def validate_element(element: Element, elements: ElementIndex) -> ValidationResult:
    """Check composite/constituent invariants for one element."""
    violations: list[Violation] = []
    if element.is_composite:
        if len(element.constituents) < 2:
            violations.append(
                Violation(element.id, "CompositeArity", "composite elements need >= 2 constituents")
            )
        for cid in element.constituents:
            child = elements.get(cid)
            if child is None:
                violations.append(
                    Violation(element.id, "DanglingConstituent", f"constituent {cid!r} missing")
                )
            elif child.is_composite:
                violations.append(
                    Violation(element.id, "DanglingConstituent", f"constituent {cid!r} is itself composite")
                )
    elif element.constituents:
        violations.append(
            Violation(element.id, "AtomicConstituents", "atomic elements must not list constituents")
        )
    return ValidationResult(tuple(violations))


def resolve_constituents(element: Element, elements: ElementIndex) -> set[Element]:
    """Atomic constituents of a composite; empty set for atomics."""
    if not element.is_composite:
        return set()
    resolved: set[Element] = set()
    for cid in element.constituents:
        child = elements.get(cid)
        if child is None or child.is_composite:
            raise DanglingConstituent(element.id, cid)
        resolved.add(child)
    return resolved


def category_census(elements: ElementIndex) -> dict[ElementCategory, int]:
    counts = {c: 0 for c in ElementCategory}
    for e in elements:
        counts[e.category] += 1
    return counts
