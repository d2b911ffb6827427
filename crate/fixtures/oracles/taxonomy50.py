#!/usr/bin/env python3
"""Generates fixtures/taxonomy50.json and frozen similarity expectations.

Oracles, independent of the Rust code:
  * path: breadth-first search (networkx) over the undirected hypernym
    graph plus a virtual root joined to every root synset; 1 / (d + 1).
  * Wu-Palmer: depth = number of nodes on the longest hypernym path to a
    root (enumerated exhaustively); lowest common subsumer = the deepest
    synset among all enumerated common ancestors; virtual root depth 0.
  * lemma level: maximum over all synset pairs.
"""
import json
import os
import random

import networkx as nx

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..")

WORDS = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
    "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
    "quebec", "romeo", "sierra", "tango", "uniform", "victor", "whiskey",
    "xray", "yankee", "zulu", "amber", "basil", "cedar", "dune", "ember",
    "fern", "grove", "heath", "iris", "jade", "kelp", "lotus", "moss", "nettle",
]


def main():
    rng = random.Random(50)
    synsets = []
    for i in range(50):
        sid = "s%02d" % i
        if i < 3:
            hyper = []
        else:
            k = 1 if rng.random() < 0.75 else 2
            hyper = sorted(set("s%02d" % rng.randrange(0, i) for _ in range(k)))
        n_lem = rng.choice([1, 1, 2, 3])
        lemmas = sorted(set(rng.choice(WORDS) for _ in range(n_lem)))
        synsets.append({"id": sid, "lemmas": lemmas, "hypernyms": hyper})

    with open(os.path.join(OUT, "taxonomy50.json"), "w") as f:
        json.dump({"synsets": synsets}, f, indent=1)
        f.write("\n")

    hyp = {s["id"]: s["hypernyms"] for s in synsets}
    g = nx.Graph()
    g.add_node("<virtual>")
    for s in synsets:
        g.add_node(s["id"])
        for h in s["hypernyms"]:
            g.add_edge(s["id"], h)
        if not s["hypernyms"]:
            g.add_edge(s["id"], "<virtual>")
    dist = dict(nx.all_pairs_shortest_path_length(g))

    def root_paths(s):
        if not hyp[s]:
            return [[s]]
        return [[s] + p for h in hyp[s] for p in root_paths(h)]

    depth = {s: max(len(p) for p in root_paths(s)) for s in hyp}
    ancestors = {s: set(x for p in root_paths(s) for x in p) for s in hyp}

    def wup(a, b):
        common = ancestors[a] & ancestors[b]
        lcs = max((depth[c] for c in common), default=0)
        return 2.0 * lcs / (depth[a] + depth[b])

    ids = [s["id"] for s in synsets]
    pairs = []
    for a in ids:
        for b in ids:
            pairs.append([a, b, 1.0 / (dist[a][b] + 1), wup(a, b)])

    by_lemma = {}
    for s in synsets:
        for l in s["lemmas"]:
            by_lemma.setdefault(l, []).append(s["id"])
    lemmas = sorted(by_lemma)
    lemma_pairs = []
    for x in lemmas:
        for y in lemmas:
            p = max(1.0 / (dist[a][b] + 1) for a in by_lemma[x] for b in by_lemma[y])
            w = max(wup(a, b) for a in by_lemma[x] for b in by_lemma[y])
            lemma_pairs.append([x, y, p, w])

    with open(os.path.join(OUT, "taxonomy50.expected.json"), "w") as f:
        json.dump({"depth": depth, "pairs": pairs, "lemma_pairs": lemma_pairs}, f)
        f.write("\n")


if __name__ == "__main__":
    main()
