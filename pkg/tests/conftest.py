import random
import shutil

import pytest

import cultiverse
from cultiverse import ingest
from cultiverse.model import (
    Annotation,
    BoundingBox,
    CulturalNorm,
    Element,
    ElementCategory,
    ElementIndex,
    EmotionPolarity,
    Painting,
    Provenance,
    RhetoricType,
)

FIXTURE_ROOT = cultiverse.fixture_root()


@pytest.fixture
def dataset():
    """Fresh fixture dataset per test (annotation edits must not leak)."""
    return ingest.load_dataset(FIXTURE_ROOT)


@pytest.fixture
def dataset_root(tmp_path):
    """Writable copy of the fixture root."""
    root = tmp_path / "dataset"
    shutil.copytree(FIXTURE_ROOT, root)
    return root


def random_dataset(rng: random.Random, max_paintings: int = 50) -> ingest.Dataset:
    """Small random catalog for oracle-equivalence tests."""
    n_atomic = rng.randint(2, 12)
    atomics = [
        Element(f"e{i}", f"元{i}", f"element-{i}", f"yuan{i}",
                rng.choice([ElementCategory.ANIMAL, ElementCategory.PLANT,
                            ElementCategory.FRUIT, ElementCategory.OTHER]))
        for i in range(n_atomic)
    ]
    composites = []
    for i in range(rng.randint(0, min(3, n_atomic // 2))):
        members = rng.sample(atomics, rng.randint(2, min(3, len(atomics))))
        composites.append(
            Element(f"c{i}", f"合{i}", f"composite-{i}", f"he{i}",
                    ElementCategory.COMPOSITE, tuple(sorted(m.id for m in members)))
        )
    elements = ElementIndex(atomics + composites)
    all_ids = [e.id for e in atomics + composites]

    norms = []
    seen = set()
    for i in range(rng.randint(0, 20)):
        element_id = rng.choice(all_ids)
        rhetoric = rng.choice(list(RhetoricType))
        symbol = f"symbol-{rng.randint(0, 6)}"
        if (element_id, rhetoric, symbol) in seen:
            continue
        seen.add((element_id, rhetoric, symbol))
        norms.append(CulturalNorm(
            f"n{i:03d}", element_id, rhetoric, f"符{i}", symbol,
            f"俗{i}", f"custom-{i}", rng.choice(list(EmotionPolarity)),
        ))

    paintings = {}
    ann_counter = 0
    for i in range(rng.randint(0, max_paintings)):
        pid = f"p{i:03d}"
        annotations = []
        for element_id in rng.sample(all_ids, rng.randint(0, min(5, len(all_ids)))):
            # occasionally annotate the same element twice
            for _ in range(rng.choice([1, 1, 1, 2])):
                ann_counter += 1
                annotations.append(Annotation(
                    f"a{ann_counter:04d}", pid, BoundingBox(0, 0, 10, 10),
                    element_id, Provenance.DETECTED, 2,
                ))
        paintings[pid] = Painting(
            pid, f"画{i}", f"painting-{i}", "anon", "Ming", "ink", 30, 40,
            "museum", f"images/{pid}.jpg", 500, 500, annotations,
        )
    return ingest.Dataset(elements, norms, paintings, manifest={})
