"""Regenerates the toy pipeline fixture: python3 generate.py (writes into this directory)."""
import json
import random
from datetime import date, timedelta

rng = random.Random(20190128)
start = date(2019, 1, 28)
days = 12
groups = {
    "major": ["nytimes", "npr", "chicagotribune", "reuters"],
    "ent": ["tmz", "people", "eonline", "thesun"],
    "test": ["cnn", "usatoday", "newsweek"],
}
# expected new triples per day after day 1
rates = {"major": 5, "ent": 9, "test": 4}
seeds = [
    ("jussie smollett", "play", "jamal lyon"),
    ("chicago police", "say", "statement"),
    ("two men", "pour", "bleach"),
    ("tmz", "first report", "news"),
]
seed_nodes = sorted({p for h, _, t in seeds for p in (h, t)})
pool = ["empire", "fox", "prosecutors", "charges", "hoax", "video", "detectives", "brothers",
        "nigerian brothers", "actor jussie smollett", "the chicago police", "chicago police department",
        "grand jury", "attack", "cook county", "kim foxx", "social media", "social media posts",
        "rope", "subway sandwich", "check", "statement of facts", "fbi", "letter"]
relations = ["say", "deny", "arrest", "charge", "drop", "release", "report", "be in", "be charge with",
             "have", "play", "hire", "pay", "send"]

records = []


def emit(h, r, t, day, group):
    src = rng.choice(groups[group])
    records.append({"head": h, "relation": r, "tail": t,
                    "date": (start + timedelta(days=day - 1)).isoformat(),
                    "source": src, "article_id": f"toy-{len(records)}"})


for group in groups:
    for h, r, t in seeds:
        emit(h, r, t, 1, group)
    for day in range(2, days + 1):
        # coverage peaks a few days in, as in real news cycles
        scale = 1.6 if 4 <= day <= 6 else (0.6 if day > 9 else 1.0)
        n = max(0, int(round(rng.gauss(rates[group] * scale, 1.5))))
        for _ in range(n):
            h = rng.choice(seed_nodes if rng.random() < 0.5 else pool)
            t = rng.choice(pool if rng.random() < 0.7 else seed_nodes)
            if h == t:
                continue
            r = rng.choice(relations)
            if rng.random() < 0.1:
                # occasional re-wording of a seed triple
                sh, _, st = rng.choice(seeds)
                h, t = sh, st
            emit(h, r, t, day, group)

records.sort(key=lambda x: (x["date"], x["article_id"]))
with open("corpus.jsonl", "w") as f:
    for rec in records:
        f.write(json.dumps(rec) + "\n")
with open("seeds.tsv", "w") as f:
    for h, r, t in seeds:
        f.write(f"{h}\t{r}\t{t}\n")

# 4-d embeddings: actor/smollett/jussie point the same way so the fine stage links them.
vectors = {
    "jussie": [1, 0.1, 0, 0], "smollett": [0.9, 0.2, 0, 0], "actor": [0.95, 0.15, 0.05, 0],
    "chicago": [0, 1, 0, 0], "police": [0.1, 0.9, 0.1, 0], "department": [0, 0.8, 0.3, 0],
    "say": [0, 0, 1, 0], "report": [0, 0.1, 0.9, 0.1], "deny": [0, 0, -1, 0.2],
    "video": [0, 0, 0, 1], "rope": [0.2, 0, 0, 0.8],
}
with open("embeddings.txt", "w") as f:
    f.write(f"{len(vectors)} 4\n")
    for tok, vec in vectors.items():
        f.write(tok + " " + " ".join(repr(float(x)) for x in vec) + "\n")
print(len(records), "records")
