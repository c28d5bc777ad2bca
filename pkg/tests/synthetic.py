"""Hermetic English-Hindi toy corpus with detections, ground truth and a word table."""

import json
import random
from pathlib import Path

NOUNS = {
    "man": "आदमी", "woman": "औरत", "dog": "कुत्ता", "horse": "घोड़ा", "car": "गाड़ी",
    "tree": "पेड़", "ball": "गेंद", "table": "मेज़", "cat": "बिल्ली", "boy": "लड़का",
    "girl": "लड़की", "bird": "चिड़िया",
}
ADJECTIVES = {
    "red": "लाल", "big": "बड़ा", "small": "छोटा", "white": "सफ़ेद", "black": "काला",
    "old": "पुराना", "green": "हरा",
}
OTHER = {"near": "पास", "rides": "सवारी", "holds": "पकड़ता", "sees": "देखता",
         "beside": "बगल", "a": "एक", "the": "वह", ".": "।"}


def sentence(rng):
    def phrase():
        words = [rng.choice(["a", "the"])]
        if rng.random() < 0.6:
            words.append(rng.choice(sorted(ADJECTIVES)))
        words.append(rng.choice(sorted(NOUNS)))
        return words

    verb = rng.choice(["near", "rides", "holds", "sees", "beside"])
    return phrase() + [verb] + phrase() + ["."]


def reference(words):
    table = {**NOUNS, **ADJECTIVES, **OTHER}
    return " ".join(table[w] for w in words[:-1]) + " है ।"


def write_synthetic(root, n=50, seed=0):
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    corpus_lines, det_lines, gt_lines = [], [], []
    for i in range(n):
        words = sentence(rng)
        src = " ".join(words[:-1]) + "."
        image = f"img{i:03d}"
        corpus_lines.append(f"{image}\t10\t10\t80\t60\t{src}\t{reference(words)}")
        nouns = [w for w in words if w in NOUNS]
        labels = nouns + rng.sample(sorted(NOUNS), 3)
        dets = [{"label": lab, "score": round(rng.uniform(0.3, 1.0), 3), "box": [0, 0, 10, 10]}
                for lab in labels]
        det_lines.append(json.dumps({"image_id": image, "objects": dets}))
        objs = []
        for j, w in enumerate(words):
            if w in NOUNS:
                attrs = [words[j - 1]] if words[j - 1] in ADJECTIVES else []
                objs.append({"names": [w], "attributes": attrs, "box": [20, 20, 30, 30]})
        objs.append({"names": ["sky"], "attributes": ["blue"], "box": [200, 200, 10, 10]})
        gt_lines.append(json.dumps({"image_id": image, "objects": objs}))

    paths = {
        "corpus": root / "corpus.tsv",
        "detections": root / "detections.jsonl",
        "gt": root / "gt.jsonl",
        "dictionary": root / "dictionary.tsv",
        "nouns": root / "nouns.txt",
        "adjectives": root / "adjectives.txt",
    }
    paths["corpus"].write_text("\n".join(corpus_lines) + "\n", encoding="utf-8")
    paths["detections"].write_text("\n".join(det_lines) + "\n", encoding="utf-8")
    paths["gt"].write_text("\n".join(gt_lines) + "\n", encoding="utf-8")
    table = {**NOUNS, **ADJECTIVES, **OTHER}
    paths["dictionary"].write_text("".join(f"{k}\t{v}\n" for k, v in table.items()), encoding="utf-8")
    paths["nouns"].write_text("\n".join(sorted(NOUNS)) + "\n", encoding="utf-8")
    paths["adjectives"].write_text("\n".join(sorted(ADJECTIVES)) + "\n", encoding="utf-8")
    return paths


def experiment_config(paths, out_dir, mode="entity", systems=None, **extra):
    config = {
        "corpus": str(paths["corpus"]),
        "detections": str(paths["detections"]),
        "gt_annotations": str(paths["gt"]),
        "pos": {"nouns": str(paths["nouns"]), "adjectives": str(paths["adjectives"])},
        "systems": systems or [
            {"name": "mBART", "variant": "none",
             "translator": {"kind": "builtin-dictionary", "path": str(paths["dictionary"])}},
            {"name": "ViTA", "variant": "vita",
             "translator": {"kind": "builtin-dictionary", "path": str(paths["dictionary"])}},
        ],
        "degradation": {"mode": mode, "fractions": [i / 10 for i in range(11)], "seed": 13},
        "output_dir": str(out_dir),
    }
    config.update(extra)
    return config
