"""Dataset loading, validation, detection import, and annotation editing.

A dataset root holds four UTF-8 files:

* ``elements.tsv``   -- one element per line: id, name_zh, name_en,
  romanization, category, constituents (semicolon-separated ids)
* ``norms.tsv``      -- one norm per line: id, element_id, rhetoric,
  symbol_zh, symbol_en, custom_zh, custom_en, emotion
* ``paintings.json`` -- JSON array of painting records with image_size
  and annotations
* ``manifest.json``  -- expected counts per entity kind

Load order is elements -> norms -> paintings so cross-references can be
checked as they appear.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .model import (
    Annotation,
    BoundingBox,
    CulturalNorm,
    DuplicateElementId,
    Element,
    ElementCategory,
    ElementIndex,
    EmotionPolarity,
    Painting,
    Provenance,
    RhetoricType,
    ValidationResult,
    Violation,
    validate_element,
    validate_norm,
)

ELEMENTS_FILE = "elements.tsv"
NORMS_FILE = "norms.tsv"
PAINTINGS_FILE = "paintings.json"
MANIFEST_FILE = "manifest.json"

DEFAULT_MIN_CONFIDENCE = 0.35


class FileMissing(Exception):
    def __init__(self, kind: str, path: Path):
        self.kind = kind
        self.path = path
        super().__init__(f"missing {kind} file: {path}")


class ParseError(Exception):
    def __init__(self, path: Path, locator: str, message: str):
        self.path = path
        self.locator = locator
        super().__init__(f"{path}:{locator}: {message}")


class ValidationFailed(Exception):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(f"validation failed with {len(report.violations)} violation(s)")


class UnknownPainting(Exception):
    pass


class UnknownElement(Exception):
    pass


class UnknownAnnotation(Exception):
    pass


class OutOfBounds(Exception):
    pass


@dataclass(frozen=True)
class DetectionRecord:
    painting_id: str
    box: BoundingBox
    label: str
    confidence: float


@dataclass
class ValidationReport:
    counts: dict[str, int] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "counts": self.counts,
            "violations": [
                {"entity_id": v.entity_id, "rule": v.rule, "message": v.message}
                for v in self.violations
            ],
            "warnings": list(self.warnings),
        }


@dataclass
class ImportSummary:
    added: int = 0
    skipped_unmapped: int = 0
    skipped_low_confidence: int = 0
    skipped_duplicate: int = 0
    out_of_bounds: int = 0
    unknown_paintings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "added": self.added,
            "skipped_unmapped": self.skipped_unmapped,
            "skipped_low_confidence": self.skipped_low_confidence,
            "skipped_duplicate": self.skipped_duplicate,
            "out_of_bounds": self.out_of_bounds,
            "unknown_paintings": list(self.unknown_paintings),
        }


@dataclass
class AuditEntry:
    action: str
    annotation_id: str
    detail: str
    flagged: bool = False


def annotation_id_for(painting_id: str, box: BoundingBox, element_id: str, provenance: Provenance) -> str:
    """Deterministic id so re-imports of the same record are idempotent."""
    key = f"{painting_id}|{box.x}|{box.y}|{box.w}|{box.h}|{element_id}|{provenance.value}"
    return "a-" + hashlib.sha256(key.encode("utf-8")).hexdigest()[:12]


class Dataset:
    """The loaded cultural-norm dataset: elements, norms, painting catalog.

    Immutable after load except through the annotation operations, which
    are serialized per painting; concurrent readers are always safe.
    """

    def __init__(
        self,
        elements: ElementIndex,
        norms: list[CulturalNorm],
        paintings: dict[str, Painting],
        manifest: dict,
    ):
        self.elements = elements
        self.norms = norms
        self.paintings = paintings
        self.manifest = manifest
        self.audit_log: list[AuditEntry] = []
        self._painting_locks: dict[str, threading.Lock] = {
            pid: threading.Lock() for pid in paintings
        }

    # -- annotation lookups ------------------------------------------------

    def find_annotation(self, annotation_id: str) -> Optional[tuple[Painting, Annotation]]:
        for p in self.paintings.values():
            for a in p.annotations:
                if a.id == annotation_id:
                    return p, a
        return None

    # -- annotation edits --------------------------------------------------

    def add_manual_annotation(self, painting_id: str, box: BoundingBox, element_id: str) -> Annotation:
        painting = self.paintings.get(painting_id)
        if painting is None:
            raise UnknownPainting(painting_id)
        if element_id not in self.elements:
            raise UnknownElement(element_id)
        if not box.within(painting.image_width, painting.image_height):
            raise OutOfBounds(f"box {box} outside {painting.image_width}x{painting.image_height}")
        ann = Annotation(
            id=annotation_id_for(painting_id, box, element_id, Provenance.MANUAL),
            painting_id=painting_id,
            box=box,
            element=element_id,
            provenance=Provenance.MANUAL,
            verifier_count=0,
        )
        with self._painting_locks[painting_id]:
            if any(a.id == ann.id for a in painting.annotations):
                return ann  # identical manual annotation already present
            painting.annotations.append(ann)
        self.audit_log.append(AuditEntry("add", ann.id, f"manual {element_id} on {painting_id}"))
        return ann

    def remove_annotation(self, annotation_id: str) -> Annotation:
        found = self.find_annotation(annotation_id)
        if found is None:
            raise UnknownAnnotation(annotation_id)
        painting, ann = found
        with self._painting_locks[painting.id]:
            painting.annotations.remove(ann)
        flagged = ann.provenance is Provenance.DETECTED and ann.verifier_count >= 2
        self.audit_log.append(
            AuditEntry(
                "remove",
                ann.id,
                f"removed {ann.element} from {painting.id}"
                + (" (expert-verified)" if flagged else ""),
                flagged=flagged,
            )
        )
        return ann

    def import_detections(
        self,
        records: list[DetectionRecord],
        label_map: dict[str, str],
        min_confidence: float = DEFAULT_MIN_CONFIDENCE,
    ) -> ImportSummary:
        """Turn detector output into Detected annotations.

        Manual annotations are never touched; duplicates (same painting,
        box, element) are idempotent thanks to content-hashed ids.
        """
        summary = ImportSummary()
        for record in records:
            painting = self.paintings.get(record.painting_id)
            if painting is None:
                summary.unknown_paintings.append(record.painting_id)
                continue
            if record.confidence < min_confidence:
                summary.skipped_low_confidence += 1
                continue
            element_id = label_map.get(record.label)
            if element_id is None or element_id not in self.elements:
                summary.skipped_unmapped += 1
                continue
            if not record.box.within(painting.image_width, painting.image_height):
                summary.out_of_bounds += 1
                continue
            ann = Annotation(
                id=annotation_id_for(record.painting_id, record.box, element_id, Provenance.DETECTED),
                painting_id=record.painting_id,
                box=record.box,
                element=element_id,
                provenance=Provenance.DETECTED,
                verifier_count=0,
            )
            with self._painting_locks[painting.id]:
                if any(a.id == ann.id for a in painting.annotations):
                    summary.skipped_duplicate += 1
                    continue
                painting.annotations.append(ann)
            summary.added += 1
        return summary

    # -- serialization -----------------------------------------------------

    def save(self, root: Union[str, Path]) -> None:
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        lines = []
        for e in sorted(self.elements, key=lambda e: e.id):
            lines.append(
                "\t".join(
                    [e.id, e.name_zh, e.name_en, e.romanization, e.category.value, ";".join(e.constituents)]
                )
            )
        (root / ELEMENTS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
        lines = []
        for n in sorted(self.norms, key=lambda n: n.id):
            rhet = n.rhetoric.value if isinstance(n.rhetoric, RhetoricType) else str(n.rhetoric)
            emo = n.emotion.value if isinstance(n.emotion, EmotionPolarity) else str(n.emotion)
            lines.append(
                "\t".join([n.id, n.element, rhet, n.symbol_zh, n.symbol_en, n.custom_zh, n.custom_en, emo])
            )
        (root / NORMS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
        paintings = [painting_to_dict(p) for p in sorted(self.paintings.values(), key=lambda p: p.id)]
        (root / PAINTINGS_FILE).write_text(
            json.dumps(paintings, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        (root / MANIFEST_FILE).write_text(
            json.dumps(self.manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )


# -- record (de)serialization ----------------------------------------------


def annotation_to_dict(a: Annotation) -> dict:
    return {
        "id": a.id,
        "painting_id": a.painting_id,
        "box": {"x": a.box.x, "y": a.box.y, "w": a.box.w, "h": a.box.h},
        "element": a.element,
        "provenance": a.provenance.value,
        "verifier_count": a.verifier_count,
    }


def painting_to_dict(p: Painting) -> dict:
    return {
        "id": p.id,
        "title_zh": p.title_zh,
        "title_en": p.title_en,
        "artist": p.artist,
        "dynasty": p.dynasty,
        "medium": p.medium,
        "dimensions": {"width_cm": p.width_cm, "height_cm": p.height_cm},
        "location": p.location,
        "image_ref": p.image_ref,
        "image_size": {"width": p.image_width, "height": p.image_height},
        "annotations": [annotation_to_dict(a) for a in p.annotations],
    }


def _annotation_from_dict(d: dict, path: Path, locator: str) -> Annotation:
    try:
        box = BoundingBox(**d["box"])
        return Annotation(
            id=d["id"],
            painting_id=d["painting_id"],
            box=box,
            element=d["element"],
            provenance=Provenance(d.get("provenance", "Detected")),
            verifier_count=int(d.get("verifier_count", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, locator, f"bad annotation record: {exc}") from exc


def _painting_from_dict(d: dict, path: Path, locator: str) -> Painting:
    try:
        return Painting(
            id=d["id"],
            title_zh=d.get("title_zh", ""),
            title_en=d.get("title_en", ""),
            artist=d.get("artist", ""),
            dynasty=d.get("dynasty", ""),
            medium=d.get("medium", ""),
            width_cm=float(d["dimensions"]["width_cm"]),
            height_cm=float(d["dimensions"]["height_cm"]),
            location=d.get("location", ""),
            image_ref=d.get("image_ref", ""),
            image_width=int(d["image_size"]["width"]),
            image_height=int(d["image_size"]["height"]),
            annotations=[
                _annotation_from_dict(a, path, f"{locator}.annotations[{i}]")
                for i, a in enumerate(d.get("annotations", []))
            ],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(path, locator, f"bad painting record: {exc}") from exc


def load_detections(path: Union[str, Path]) -> list[DetectionRecord]:
    path = Path(path)
    if not path.exists():
        raise FileMissing("detections", path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, str(exc.lineno), exc.msg) from exc
    records = []
    for i, d in enumerate(raw):
        try:
            confidence = float(d["confidence"])
            if not 0.0 <= confidence <= 1.0:
                raise ValueError(f"confidence {confidence} outside [0,1]")
            records.append(
                DetectionRecord(
                    painting_id=d["painting_id"],
                    box=BoundingBox(**d["box"]),
                    label=d["label"],
                    confidence=confidence,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, f"[{i}]", f"bad detection record: {exc}") from exc
    return records


# -- loading -----------------------------------------------------------------


def _load_elements(path: Path, report: ValidationReport) -> ElementIndex:
    index = ElementIndex()
    pending: list[Element] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise ParseError(path, str(lineno), f"expected 6 tab-separated fields, got {len(parts)}")
        eid, name_zh, name_en, romanization, category_token, constituents_field = parts
        try:
            category = ElementCategory(category_token)
        except ValueError:
            report.violations.append(
                Violation(eid, "InvalidCategory", f"category {category_token!r} unknown")
            )
            continue
        constituents = tuple(c for c in constituents_field.split(";") if c)
        element = Element(eid, name_zh, name_en, romanization, category, constituents)
        try:
            index.add(element)
        except DuplicateElementId:
            report.violations.append(Violation(eid, "DuplicateId", "duplicate element id"))
            continue
        pending.append(element)
    for element in pending:
        report.violations.extend(validate_element(element, index).violations)
    report.counts["elements"] = len(index)
    return index


def _load_norms(path: Path, elements: ElementIndex, report: ValidationReport) -> list[CulturalNorm]:
    norms: list[CulturalNorm] = []
    seen_triples: set = set()
    seen_ids: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 8:
            raise ParseError(path, str(lineno), f"expected 8 tab-separated fields, got {len(parts)}")
        nid, element_id, rhetoric, symbol_zh, symbol_en, custom_zh, custom_en, emotion = parts
        if nid in seen_ids:
            report.violations.append(Violation(nid, "DuplicateId", "duplicate norm id"))
        seen_ids.add(nid)
        norm = CulturalNorm(nid, element_id, rhetoric, symbol_zh, symbol_en, custom_zh, custom_en, emotion)
        result = validate_norm(norm, elements, seen_triples)
        report.violations.extend(result.violations)
        if result.ok:
            norm = CulturalNorm(
                nid, element_id, RhetoricType(rhetoric), symbol_zh, symbol_en,
                custom_zh, custom_en, EmotionPolarity(emotion),
            )
        norms.append(norm)
    report.counts["norms"] = len(norms)
    return norms


def _load_paintings(path: Path, elements: ElementIndex, report: ValidationReport) -> dict[str, Painting]:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, str(exc.lineno), exc.msg) from exc
    paintings: dict[str, Painting] = {}
    for i, d in enumerate(raw):
        p = _painting_from_dict(d, path, f"[{i}]")
        if p.id in paintings:
            report.violations.append(Violation(p.id, "DuplicateId", "duplicate painting id"))
            continue
        for a in p.annotations:
            if a.element not in elements:
                report.violations.append(
                    Violation(a.id, "UnknownElement", f"annotation element {a.element!r} not in taxonomy")
                )
            if not a.box.within(p.image_width, p.image_height):
                report.violations.append(
                    Violation(a.id, "OutOfBounds", f"box outside image of painting {p.id}")
                )
            if a.provenance is Provenance.DETECTED and a.verifier_count < 2:
                report.warnings.append(
                    f"annotation {a.id} on {p.id}: Detected with verifier_count {a.verifier_count} < 2"
                )
        paintings[p.id] = p
    report.counts["paintings"] = len(paintings)
    report.counts["annotations"] = sum(len(p.annotations) for p in paintings.values())
    return paintings


def _check_manifest(manifest: dict, report: ValidationReport, elements: ElementIndex) -> None:
    for kind in ("elements", "norms", "paintings"):
        expected = manifest.get(kind)
        if expected is not None and report.counts.get(kind) != expected:
            report.violations.append(
                Violation(kind, "ManifestMismatch", f"expected {expected} {kind}, found {report.counts.get(kind)}")
            )
    expected_census = manifest.get("element_categories")
    if expected_census:
        from .model import category_census

        actual = {c.value: n for c, n in category_census(elements).items()}
        for cat, expected in expected_census.items():
            if actual.get(cat, 0) != expected:
                report.violations.append(
                    Violation(cat, "ManifestMismatch", f"expected {expected} {cat} elements, found {actual.get(cat, 0)}")
                )


def validate_root(root: Union[str, Path]) -> tuple[Optional[Dataset], ValidationReport]:
    """Load and cross-validate a dataset root; always returns the report."""
    root = Path(root)
    report = ValidationReport()
    for kind, name in (("elements", ELEMENTS_FILE), ("norms", NORMS_FILE),
                       ("paintings", PAINTINGS_FILE), ("manifest", MANIFEST_FILE)):
        if not (root / name).exists():
            raise FileMissing(kind, root / name)
    try:
        manifest = json.loads((root / MANIFEST_FILE).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(root / MANIFEST_FILE, str(exc.lineno), exc.msg) from exc
    elements = _load_elements(root / ELEMENTS_FILE, report)
    norms = _load_norms(root / NORMS_FILE, elements, report)
    paintings = _load_paintings(root / PAINTINGS_FILE, elements, report)
    _check_manifest(manifest, report, elements)
    if not report.accepted:
        return None, report
    return Dataset(elements, norms, paintings, manifest), report


def load_dataset(root: Union[str, Path]) -> Dataset:
    """Load a dataset root, raising ValidationFailed (with report) on any violation."""
    dataset, report = validate_root(root)
    if dataset is None:
        raise ValidationFailed(report)
    return dataset
