#!/usr/bin/env python3
"""Generates fixtures/mini100.jsonl and the brute-force expectations for it.

The expectations file (fixtures/mini100.expected.json) is computed by
re-reading the corpus with a flat in-memory count, independent of the Rust
implementation:

    vocab:     relevant hashtag -> tweet frequency (min_support = 3)
    postings:  relevant hashtag -> sorted tweet ids
    pairs:     "a|b" (a < b) -> co-occurrence count over relevant hashtags
    days:      day bucket start (unix seconds) -> tweet count
"""
import json
import os
import random
import re
from collections import Counter, defaultdict
from itertools import combinations

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..")

TAG_RE = re.compile(
    r"c/o|b/c|w/o|w/|\+/-|\d+(?:[.,:/-]\d+)+|(?:[:;][-=]?|=)[Dp(|)][D()]*|<3+|"
    r"(?:https?\:\/\/|www\.)[a-zA-Z0-9/.?=&\-#]*[a-zA-Z0-9/]|([#@]\w+)|\w+(?:-\w+)*(?:'\w+)?|[$£€¥¢§@&#]"
)

CLASSES = {
    "geolocation": ["paris", "london", "berlin", "boulder"],
    "person": ["obama", "madonna", "gandhi"],
    "organization": ["google", "apple", "nokia"],
    "event": ["christmas", "election", "easter"],
    "category": ["jazz", "rock", "music", "photography", "fun"],
}
CONTEXT = {
    "geolocation": ["visiting", "flight", "downtown", "weather", "trip", "in"],
    "person": ["said", "speech", "president", "interview", "she", "he"],
    "organization": ["announced", "stock", "launch", "company", "shares"],
    "event": ["celebrate", "holiday", "vote", "party", "tonight"],
    "category": ["love", "listening", "great", "photos", "awesome"],
}
COMMON = ["the", "a", "is", "so", "today", "really", "I", "we"]
RARE = ["oneoff", "blip", "zzz", "lonely", "singleton"]

START = 1225497600  # 2008-11-01
END = 1257033600    # 2009-11-01


def main():
    rng = random.Random(100)
    tags = [(c, t) for c, ts in CLASSES.items() for t in ts]
    lines = []
    used_ids = set()
    for i in range(100):
        cls, tag = tags[i % len(tags)]
        words = [rng.choice(CONTEXT[cls]) for _ in range(3)] + [rng.choice(COMMON) for _ in range(2)]
        rng.shuffle(words)
        pos = rng.randrange(len(words) + 1)
        disp = tag.capitalize() if rng.random() < 0.2 else tag
        words.insert(pos, "#" + disp)
        if rng.random() < 0.5:
            other = rng.choice(CLASSES[cls])
            words.append("#" + other)
        if rng.random() < 0.1:
            words.append("#" + tag)  # repeated hashtag
        if i % 17 == 0:
            words.append("#" + RARE[(i // 17) % len(RARE)])
        if i % 11 == 0:
            words.insert(0, "@friend%d" % i)
        if i % 13 == 0:
            words.append("http://ex.am/p%d" % i)
        if i % 9 == 0:
            words.append(":)")
        text = " ".join(words)
        while True:
            tid = rng.randrange(10**9, 10**10)
            if tid not in used_ids:
                used_ids.add(tid)
                break
        # majority of tweets in the last month
        if rng.random() < 0.6:
            ts = rng.randrange(END - 30 * 86400, END)
        else:
            ts = rng.randrange(START, END - 30 * 86400)
        lines.append({"id": tid, "created_at": ts, "text": text})

    with open(os.path.join(OUT, "mini100.jsonl"), "w", encoding="utf-8") as f:
        for rec in lines:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    expected = brute_force(os.path.join(OUT, "mini100.jsonl"), 3)
    assert expected["indexed_tweets"] == 100, expected["indexed_tweets"]
    with open(os.path.join(OUT, "mini100.expected.json"), "w") as f:
        json.dump(expected, f, indent=1, sort_keys=True)
        f.write("\n")


def brute_force(path, min_support):
    tweets = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            rec = json.loads(line)
            hs = set()
            for m in TAG_RE.finditer(rec["text"]):
                g = m.group(1)
                if g and g.startswith("#"):
                    hs.add(g[1:].lower())
            tweets.append((rec["id"], rec["created_at"], hs))
    freq = Counter(h for _, _, hs in tweets for h in hs)
    relevant = {h for h, c in freq.items() if c >= min_support}
    postings = defaultdict(list)
    pairs = Counter()
    days = Counter()
    indexed = 0
    for tid, ts, hs in tweets:
        rel = sorted(hs & relevant)
        if not rel:
            continue
        indexed += 1
        days[ts - ts % 86400] += 1
        for h in rel:
            postings[h].append(tid)
        for a, b in combinations(rel, 2):
            pairs["%s|%s" % (a, b)] += 1
    return {
        "total_tweets": len(tweets),
        "indexed_tweets": indexed,
        "vocab": {h: freq[h] for h in relevant},
        "postings": {h: sorted(v) for h, v in postings.items()},
        "pairs": dict(pairs),
        "days": {str(k): v for k, v in days.items()},
    }


if __name__ == "__main__":
    main()
