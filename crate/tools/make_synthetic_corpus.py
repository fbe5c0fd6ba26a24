#!/usr/bin/env python3
"""Generate the bundled synthetic topic corpus under data/synthetic/.

Each topic draws content words from its own vocabulary with Zipf-like
weights, interleaves stopwords and punctuation, and plants fixed word pairs
side by side so that they co-occur inside the same window. Output is fully
determined by SEED.
"""
import json
import random
from pathlib import Path

SEED = 20240521
ROOT = Path(__file__).resolve().parent.parent / "data" / "synthetic"

STOP = ["the", "of", "and", "in", "with", "a", "to", "was", "for", "on", "at",
        "by", "from", "is", "were", "that", "this", "it", "as", "their"]

SHARED = [["report", "reports", "reported"], ["season", "seasons"],
          ["measure", "measured", "measurements"], ["record", "records", "recorded"]]

TOPICS = {
    "astronomy": [
        ["telescope", "telescopes"], ["orbit", "orbits", "orbiting", "orbital"],
        ["comet", "comets"], ["planet", "planets", "planetary"], ["galaxy", "galaxies"],
        ["star", "stars"], ["observatory"], ["observe", "observed", "observing", "observations"],
        ["lens", "lenses"], ["mirror", "mirrors"], ["nebula"], ["eclipse", "eclipses"],
        ["satellite", "satellites"], ["gravity"], ["spectrum"], ["astronomer", "astronomers"],
        ["moon", "moons"], ["solar"], ["radiation"], ["cluster", "clusters", "clustered"],
        ["meteor", "meteors"], ["horizon"], ["luminous"], ["distance", "distances"],
        ["brightness"], ["photograph", "photographs", "photographed"], ["dust"], ["cosmic"],
        ["survey", "surveys", "surveyed"], ["celestial"],
    ],
    "fermentation": [
        ["yeast"], ["dough"], ["bread", "breads"], ["ferment", "fermented", "fermenting", "fermentation"],
        ["sourdough"], ["flour"], ["starter", "starters"], ["bacteria"], ["vinegar"], ["cabbage"],
        ["jar", "jars"], ["brine"], ["salt", "salted"], ["temperature", "temperatures"],
        ["kitchen", "kitchens"], ["cheese", "cheeses"], ["culture", "cultures"], ["sugar", "sugars"],
        ["acid", "acidic", "acidity"], ["bake", "baked", "baker", "bakery"], ["oven", "ovens"],
        ["crust"], ["knead", "kneaded", "kneading"], ["pickle", "pickles", "pickled"], ["kimchi"],
        ["garlic"], ["recipe", "recipes"], ["cellar"], ["wine"], ["barrel", "barrels"],
    ],
    "grain-markets": [
        ["grain", "grains"], ["wheat"], ["corn"], ["futures"], ["price", "prices", "priced"],
        ["trader", "traders"], ["harvest", "harvests", "harvested"], ["export", "exports", "exported"],
        ["tariff", "tariffs"], ["commodity", "commodities"], ["silo", "silos"], ["farmer", "farmers"],
        ["drought"], ["yield", "yields"], ["bushel", "bushels"], ["contract", "contracts"],
        ["exchange", "exchanges"], ["shipment", "shipments"], ["soybean", "soybeans"], ["demand"],
        ["supply"], ["inventory"], ["weather"], ["rail"], ["port", "ports"], ["barge", "barges"],
        ["subsidy", "subsidies"], ["hedge", "hedging", "hedged"], ["broker", "brokers"], ["auction"],
    ],
}

# Lexeme index pairs written next to each other; (a, b, rate) plants the
# pair in roughly `rate` of the sentences.
PLANTED = [(0, 10, 0.30), (1, 11, 0.25), (2, 12, 0.05), (3, 13, 0.22),
           (0, 12, 0.04), (4, 14, 0.18), (5, 15, 0.02), (6, 16, 0.12)]

DOCS_PER_TOPIC = {"astronomy": 9, "fermentation": 8, "grain-markets": 7}


def pick(rng, lexemes, weights):
    forms = rng.choices(lexemes, weights)[0]
    return rng.choice(forms)


def sentence(rng, vocab, weights):
    words = []
    for _ in range(rng.randint(5, 13)):
        if rng.random() < 0.45:
            words.append(rng.choice(STOP))
        if rng.random() < 0.08:
            words.append(rng.choice(rng.choice(SHARED)))
        else:
            words.append(pick(rng, vocab, weights))
    for a, b, rate in PLANTED:
        if rng.random() < rate:
            pos = rng.randrange(len(words) + 1)
            words[pos:pos] = [rng.choice(vocab[a]), rng.choice(["and", "with", "of"]), rng.choice(vocab[b])]
    text = " ".join(words)
    text = text[0].upper() + text[1:]
    if rng.random() < 0.15:
        text += f" ({rng.randint(1, 999)})"
    return text + rng.choice([".", ".", ".", "!", "?", ";"])


def main():
    rng = random.Random(SEED)
    manifest = {"topics": []}
    for topic, vocab in TOPICS.items():
        weights = [1.0 / (r + 1) ** 0.8 for r in range(len(vocab))]
        docs = []
        for d in range(DOCS_PER_TOPIC[topic]):
            doc_id = f"{topic}-{d + 1:02d}"
            rel = Path(topic) / f"{doc_id}.txt"
            target = rng.randint(120, 260)
            sentences, n = [], 0
            while n < target:
                s = sentence(rng, vocab, weights)
                sentences.append(s)
                n += len(s.split())
            paragraphs = [" ".join(sentences[i:i + 5]) for i in range(0, len(sentences), 5)]
            out = ROOT / rel
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text("\n\n".join(paragraphs) + "\n", encoding="utf-8")
            docs.append({"doc_id": doc_id, "path": str(rel)})
        manifest["topics"].append({"topic_id": topic, "documents": docs})
    (ROOT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
