#!/usr/bin/env python3
"""Regenerates data/toy deterministically.

The corpus is built so the graph embedding carries information nothing else
does: each family has a person ("First Surname"), a company ("Surname"), and a
product unit whose label is byte-identical to the company's. Question wording
selects which of the three is the answer, and only the embedding type block
separates the company from the unit. Entity ids are assigned in shuffled
order, so search-rank tie-breaks on the twin labels do not leak the type.
"""

import json
import pathlib
import random

SEED = 7
OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "toy"

SURNAMES = [
    "veltrin", "ondara", "maraxis", "quillon", "tavrose", "brenwick",
    "solvara", "kimbral", "dorvath", "ellowen", "ferrago", "galdrin",
    "hastora", "imbrek", "jorvand", "kestrane", "lumeda", "morvath",
    "nexhall", "ostrell", "pendrake", "quorath", "rivven", "sandrel",
    "torvane", "ulmora", "vexhart", "wrenfold", "yandrel", "zephrim",
]
FIRST = ["Mara", "Joren", "Tessa", "Bram", "Sella", "Doran", "Livia",
         "Kato", "Nerin", "Adda"]

# Words with vectors: everything a question can contain except surnames and
# punctuation, plus a few fillers that never appear anywhere.
VOCAB = ["who", "founded", "what", "does", "make", "how", "many", "per",
         "crate", "unit", "company", "person", "market", "ledger", "survey"]

DECOY_LABELS = ["founded", "make", "crate", "many", "per", "founded make",
                "many crate", "make per", "per crate", "founded crate"]

EMB_DIM = 200
WV_DIM = 300
TYPE_BLOCK = {"person": 0, "company": 1, "unit": 2, "decoy": 3}

QUESTION = {
    "person": "Who founded {}?",
    "company": "What does {} make?",
    "unit": "How many {} per crate?",
}


def embedding(rnd, kind):
    vec = [0.0] * EMB_DIM
    base = TYPE_BLOCK[kind] * 10
    for d in range(base, base + 10):
        vec[d] = 2.0
    for d in range(40, EMB_DIM):
        vec[d] = round(rnd.uniform(-0.1, 0.1), 4)
    return vec


def word_vector(rnd, i):
    vec = [round(rnd.uniform(-0.05, 0.05), 4) for _ in range(WV_DIM)]
    vec[(i * 17) % WV_DIM] = 1.5
    return vec


def main():
    rnd = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)

    assert len(set(SURNAMES)) == len(SURNAMES)
    assert not set(SURNAMES) & set(VOCAB)

    entities = []  # (kind, family, label, description)
    for f, surname in enumerate(SURNAMES):
        cap = surname.capitalize()
        first = FIRST[f % len(FIRST)]
        entities.append(("person", f, f"{first} {cap}", f"head of {surname} holdings"))
        entities.append(("company", f, cap, f"{surname} trading works"))
        entities.append(("unit", f, cap, ""))
    for label in DECOY_LABELS:
        entities.append(("decoy", -1, label, ""))

    ids = rnd.sample(range(100, 1000), len(entities))
    by_key = {}
    with open(OUT / "entities.jsonl", "w") as out:
        for (kind, family, label, desc), num in zip(entities, ids):
            eid = f"Q{num}"
            by_key[(kind, family)] = eid
            row = {"id": eid, "label": label}
            if desc:
                row["description"] = desc
            row["embedding"] = embedding(rnd, kind)
            out.write(json.dumps(row) + "\n")

    with open(OUT / "vectors.txt", "w") as out:
        out.write(f"{len(VOCAB)} {WV_DIM}\n")
        for i, word in enumerate(VOCAB):
            out.write(word + " " + " ".join(str(v) for v in word_vector(rnd, i)) + "\n")

    kinds = ["person", "company", "unit"]
    train = [(f, kinds[f % 3]) for f in range(len(SURNAMES))]
    train += [(f, kinds[(f + 1) % 3]) for f in range(10)]
    test = [(f, kinds[(f + 1) % 3]) for f in range(10, 20)]

    def write_split(path, rows):
        with open(path, "w") as out:
            for family, kind in rows:
                q = QUESTION[kind].format(SURNAMES[family].capitalize())
                out.write(json.dumps({"question": q, "entities": [by_key[(kind, family)]]}) + "\n")

    write_split(OUT / "train.jsonl", train)
    write_split(OUT / "test.jsonl", test)
    print(f"wrote {len(entities)} entities, {len(train)} train, {len(test)} test -> {OUT}")


if __name__ == "__main__":
    main()
