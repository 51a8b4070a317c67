"""Statistics behind the element feature, painting selection, and element
selection views: frequencies, co-occurrence relevance, and per-painting
rhetoric/emotion summaries.

All functions are pure over an immutable dataset snapshot; every ordering
is lexicographic by id so API responses and golden tests stay deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .ingest import Dataset, UnknownElement, UnknownPainting
from .model import CulturalNorm, EmotionPolarity, RhetoricType


@dataclass(frozen=True)
class CoOccurrenceEdge:
    """Unordered element pair annotated together in `count` paintings (a < b)."""

    a: str
    b: str
    count: int


@dataclass
class ElementStats:
    element: str
    frequency: int
    norm_count: int
    rhetoric_histogram: dict[RhetoricType, int] = field(default_factory=dict)
    emotion_histogram: dict[EmotionPolarity, int] = field(default_factory=dict)
    composite_partners: list[str] = field(default_factory=list)


def element_frequency(dataset: Dataset) -> dict[str, int]:
    """Number of distinct paintings containing each element (Manual and
    Detected annotations both count; multiplicity within a painting does not)."""
    freq: dict[str, int] = {}
    for painting in dataset.paintings.values():
        for element_id in {a.element for a in painting.annotations}:
            freq[element_id] = freq.get(element_id, 0) + 1
    return freq


def co_occurrence(dataset: Dataset) -> list[CoOccurrenceEdge]:
    counts: dict[tuple[str, str], int] = {}
    for painting in dataset.paintings.values():
        present = sorted({a.element for a in painting.annotations})
        for a, b in combinations(present, 2):
            counts[(a, b)] = counts.get((a, b), 0) + 1
    return [CoOccurrenceEdge(a, b, n) for (a, b), n in sorted(counts.items())]


def paintings_for_element(dataset: Dataset, element_id: str) -> list[str]:
    if element_id not in dataset.elements:
        raise UnknownElement(element_id)
    return sorted(
        p.id
        for p in dataset.paintings.values()
        if any(a.element == element_id for a in p.annotations)
    )


def norms_for_element(dataset: Dataset, element_id: str) -> list[CulturalNorm]:
    if element_id not in dataset.elements:
        raise UnknownElement(element_id)
    return sorted((n for n in dataset.norms if n.element == element_id), key=lambda n: n.id)


def element_stats(dataset: Dataset, painting_id: str) -> list[ElementStats]:
    """One entry per distinct element annotated on the painting."""
    painting = dataset.paintings.get(painting_id)
    if painting is None:
        raise UnknownPainting(painting_id)
    freq = element_frequency(dataset)
    stats: list[ElementStats] = []
    for element_id in sorted({a.element for a in painting.annotations}):
        norms = norms_for_element(dataset, element_id)
        rhetoric_hist: dict[RhetoricType, int] = {}
        emotion_hist: dict[EmotionPolarity, int] = {}
        for n in norms:
            if isinstance(n.rhetoric, RhetoricType):
                rhetoric_hist[n.rhetoric] = rhetoric_hist.get(n.rhetoric, 0) + 1
            if isinstance(n.emotion, EmotionPolarity):
                emotion_hist[n.emotion] = emotion_hist.get(n.emotion, 0) + 1
        element = dataset.elements.get(element_id)
        if element is not None and element.is_composite:
            partners = sorted(element.constituents)
        else:
            partners = sorted(
                {
                    cid
                    for e in dataset.elements
                    if e.is_composite and element_id in e.constituents
                    for cid in e.constituents
                    if cid != element_id
                }
            )
        stats.append(
            ElementStats(
                element=element_id,
                frequency=freq.get(element_id, 0),
                norm_count=len(norms),
                rhetoric_histogram=rhetoric_hist,
                emotion_histogram=emotion_hist,
                composite_partners=partners,
            )
        )
    return stats
