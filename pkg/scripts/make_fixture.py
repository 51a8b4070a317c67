"""One-off generator for the desk-scale fixture dataset shipped with the package."""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "src" / "cultiverse" / "fixture"
ROOT.mkdir(parents=True, exist_ok=True)

ELEMENTS = [
    # id, name_zh, name_en, romanization, category, constituents
    ("monkey", "猴", "monkey", "hóu", "Animal", ""),
    ("bee", "蜂", "bee", "fēng", "Animal", ""),
    ("egret", "鹭", "egret", "lù", "Animal", ""),
    ("cat", "猫", "cat", "māo", "Animal", ""),
    ("butterfly", "蝶", "butterfly", "dié", "Animal", ""),
    ("crane", "鹤", "crane", "hè", "Animal", ""),
    ("lotus", "莲", "lotus", "lián", "Plant", ""),
    ("hibiscus", "芙蓉", "hibiscus", "fúróng", "Plant", ""),
    ("leaf", "叶", "leaf", "yè", "Plant", ""),
    ("pine", "松", "pine", "sōng", "Plant", ""),
    ("bamboo", "竹", "bamboo", "zhú", "Plant", ""),
    ("peach", "桃", "peach", "táo", "Fruit", ""),
    ("persimmon", "柿", "persimmon", "shì", "Fruit", ""),
    ("lion dragon", "狻猊", "lion dragon", "suānní", "Other", ""),
    ("ruyi", "如意", "ruyi sceptre", "rúyì", "Other", ""),
    ("bee&monkey", "蜂猴", "bee & monkey", "fēnghóu", "Composite", "bee;monkey"),
    ("lotus&egret", "莲鹭", "lotus & egret", "liánlù", "Composite", "lotus;egret"),
    ("cat&butterfly", "猫蝶", "cat & butterfly", "māodié", "Composite", "cat;butterfly"),
]

NORMS = [
    ("n001", "monkey", "Homophony", "侯", "rank of marquess",
     "猴与侯同音，寓意封侯拜相。",
     "The word for monkey (hou) sounds identical to the word for marquess (hou), so a painted monkey hints at noble rank.",
     "Positive"),
    ("n002", "monkey", "Iconic", "机智", "intelligence and wit",
     "猴子机敏灵巧，画猴可颂扬贵人的智慧。",
     "Monkeys are seen as clever and quick-witted; painting one can pay tribute to the wisdom and mastermind of nobles.",
     "Positive"),
    ("n003", "monkey", "Satire", "顽劣", "restlessness and mischief",
     "以猴讽刺贪躁之徒。",
     "A painted monkey can mock officials who are restless and grasping.",
     "Negative"),
    ("n004", "bee", "Iconic", "勤劳", "diligence",
     "蜜蜂终日采蜜，象征勤劳。",
     "Bees gather nectar all day long, standing for tireless diligence.",
     "Positive"),
    ("n005", "bee&monkey", "Homophony", "封侯", "being ennobled as a marquess",
     "蜂猴与封侯同音，寄托仕途高升之愿。",
     "Bee (feng) and monkey (hou) together sound like feng hou, being ennobled as a marquess; the pairing voices aspirations for upward mobility.",
     "Positive"),
    ("n006", "lotus", "Iconic", "纯洁", "purity and spiritual enlightenment",
     "莲花出淤泥而不染，象征心灵纯洁。",
     "The lotus rises unstained from the mud, standing for purity of heart and spiritual clarity.",
     "Positive"),
    ("n007", "lotus", "Homophony", "廉", "integrity in office",
     "莲与廉同音，寓意为官清廉。",
     "Lotus (lian) sounds like the word for incorruptibility (lian), a wish for honest officials.",
     "Positive"),
    ("n008", "egret", "Iconic", "高洁", "nobility of character",
     "白鹭洁白高雅，象征品格高洁。",
     "The egret's pure white plumage and poised bearing stand for a noble heart.",
     "Positive"),
    ("n009", "lotus&egret", "Iconic", "高洁", "nobility",
     "鹭洁莲清，共喻高洁品格。",
     "The egret with its pure white beauty and the lotus rising in purity from the mud together embody esteemed, noble character.",
     "Positive"),
    ("n010", "hibiscus", "Homophony", "富荣", "wealth and glory",
     "芙蓉谐音富荣，寓意富贵荣华。",
     "Hibiscus (furong) echoes the words for wealth (fu) and glory (rong), a blessing of prosperity.",
     "Positive"),
    ("n011", "lion dragon", "Iconic", "辟邪", "to ward off evil spirits",
     "狻猊为镇守瑞兽，用以辟邪。",
     "The lion dragon is a guardian creature placed to ward off evil spirits.",
     "Positive"),
    ("n012", "cat&butterfly", "HomophonicPun", "耄耋", "longevity into one's eighties",
     "猫蝶谐音耄耋，贺寿之意。",
     "Cat and butterfly (maodie) pun on the word for those aged eighty to ninety (maodie), a birthday wish for long life.",
     "Positive"),
    ("n013", "butterfly", "Iconic", "爱情", "love",
     "双蝶喻恩爱情侣。",
     "Paired butterflies evoke devoted lovers.",
     "Positive"),
    ("n014", "crane", "Iconic", "长寿", "longevity",
     "鹤为仙禽，祝愿长寿。",
     "The crane is a companion of immortals and a classic wish for long life.",
     "Positive"),
    ("n015", "peach", "Iconic", "仙寿", "longevity and immortality",
     "仙桃延年益寿。",
     "The peach of immortality grants long life in legend.",
     "Positive"),
]

# painting id -> (title_zh, title_en, artist, dynasty, size_px, annotated elements)
PAINTINGS = [
    ("p001", "猿猴图", "Monkey Painting", "Yan Hui", "Yuan",
     (800, 1200), ["monkey", "monkey", "bee", "bee&monkey"]),
    ("p002", "猴桃图", "Monkey Offering a Peach", "Anonymous", "Ming",
     (700, 1000), ["monkey", "peach"]),
    ("p003", "松猿图", "Gibbon under a Pine", "Anonymous", "Song",
     (600, 900), ["monkey", "pine"]),
    ("p004", "蜂猴图", "Bees and Monkey", "Anonymous", "Qing",
     (750, 1100), ["monkey", "bee", "bee&monkey"]),
    ("p005", "山猿图", "Mountain Monkey", "Anonymous", "Ming",
     (650, 950), ["monkey"]),
    ("p006", "鹤猿图", "Crane and Monkey", "Anonymous", "Song",
     (720, 1080), ["monkey", "crane"]),
    ("p007", "雪猿图", "Monkey in Snow", "Anonymous", "Yuan",
     (680, 1020), ["monkey"]),
    ("p008", "柿猴图", "Monkey and Persimmons", "Anonymous", "Qing",
     (700, 980), ["monkey", "persimmon"]),
    ("p009", "芙蓉秋鹭图", "Autumn Egret in Hibiscus Flower Landscape", "Anonymous", "Song",
     (900, 1400), ["egret", "lotus", "lotus&egret"]),
    ("p010", "狻猊图", "Lion Dragon", "Anonymous", "Ming",
     (820, 1240), ["lion dragon"]),
    ("p011", "富贵耄耋图", "Elderly in Spring Painting", "Shen Zhenlin", "Qing",
     (880, 1320), ["cat", "butterfly", "cat&butterfly"]),
    ("p012", "莲塘图", "Lotus Pond", "Anonymous", "Ming",
     (760, 1140), ["lotus", "egret"]),
]

elements_lines = ["\t".join(row) for row in ELEMENTS]
(ROOT / "elements.tsv").write_text("\n".join(elements_lines) + "\n", encoding="utf-8")

norms_lines = ["\t".join(row) for row in NORMS]
(ROOT / "norms.tsv").write_text("\n".join(norms_lines) + "\n", encoding="utf-8")

paintings = []
ann_counter = 0
total_annotations = 0
for pid, title_zh, title_en, artist, dynasty, (w, h), elements in PAINTINGS:
    annotations = []
    for i, element in enumerate(elements):
        ann_counter += 1
        x = 40 + 90 * i
        y = 60 + 110 * i
        annotations.append({
            "id": f"a{ann_counter:03d}",
            "painting_id": pid,
            "box": {"x": x, "y": y, "w": 180, "h": 220},
            "element": element,
            "provenance": "Detected",
            "verifier_count": 2,
        })
    total_annotations += len(annotations)
    paintings.append({
        "id": pid,
        "title_zh": title_zh,
        "title_en": title_en,
        "artist": artist,
        "dynasty": dynasty,
        "medium": "ink and color on silk",
        "dimensions": {"width_cm": round(w / 10, 1), "height_cm": round(h / 10, 1)},
        "location": "National Palace Museum",
        "image_ref": f"images/{pid}.jpg",
        "image_size": {"width": w, "height": h},
        "annotations": annotations,
    })

(ROOT / "paintings.json").write_text(
    json.dumps(paintings, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
)

census = {}
for row in ELEMENTS:
    census[row[4]] = census.get(row[4], 0) + 1

manifest = {
    "elements": len(ELEMENTS),
    "norms": len(NORMS),
    "paintings": len(PAINTINGS),
    "annotations": total_annotations,
    "element_categories": census,
}
(ROOT / "manifest.json").write_text(
    json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
)

# Sample detector output + label map used by the import-detections tests/CLI.
detections = [
    {"painting_id": "p005", "box": {"x": 300, "y": 400, "w": 120, "h": 150},
     "label": "monkey", "confidence": 0.91},
    {"painting_id": "p005", "box": {"x": 10, "y": 20, "w": 60, "h": 80},
     "label": "rock", "confidence": 0.88},
    {"painting_id": "p005", "box": {"x": 50, "y": 60, "w": 70, "h": 90},
     "label": "monkey", "confidence": 0.12},
    {"painting_id": "p007", "box": {"x": 600, "y": 900, "w": 200, "h": 200},
     "label": "monkey", "confidence": 0.77},
    {"painting_id": "p007", "box": {"x": 100, "y": 150, "w": 90, "h": 110},
     "label": "snow plum", "confidence": 0.64},
    {"painting_id": "p012", "box": {"x": 80, "y": 120, "w": 160, "h": 200},
     "label": "egret", "confidence": 0.83},
    {"painting_id": "p999", "box": {"x": 0, "y": 0, "w": 10, "h": 10},
     "label": "monkey", "confidence": 0.95},
]
(ROOT / "detections.json").write_text(
    json.dumps(detections, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
)
label_map = {"monkey": "monkey", "egret": "egret", "bee": "bee", "lotus": "lotus"}
(ROOT / "label_map.json").write_text(
    json.dumps(label_map, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
)

print("fixture written:", manifest)
