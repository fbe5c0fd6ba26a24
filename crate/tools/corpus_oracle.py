#!/usr/bin/env python3
"""Independent reference results for a topic corpus.

Recomputes term rankings, concept sets, co-occurrence matrices and the share
of CHSH-violating 4x4 submatrices without sharing code with the Rust crate.
Stemming uses NLTK's Porter stemmer in original-algorithm mode. The CHSH scan
visits all 24 x 24 measurement assignments of every submatrix and decides
|S| > 2 in exact integer arithmetic.

    python3 tools/corpus_oracle.py data/synthetic/manifest.json > data/synthetic/expected.json
"""
import argparse
import itertools
import json
import math
import re
import sys
from collections import Counter
from pathlib import Path

import numpy as np
from nltk.stem.porter import PorterStemmer

STOPLIST = Path(__file__).resolve().parent.parent / "crates" / "core" / "src" / "corpus" / "smart_stoplist.txt"
TOKEN = re.compile(r"[A-Za-z]+")


def load_stoplist(path):
    return {w.strip().lower() for w in path.read_text().splitlines() if w.strip() and not w.startswith("#")}


def normalize(text, stop, stemmer):
    out = []
    for tok in TOKEN.findall(text):
        tok = tok.lower()
        if tok in stop:
            continue
        stem = stemmer.stem(tok)
        if stem and stem not in stop:
            out.append(stem)
    return out


def windows(terms, w):
    return [terms[i:i + w] for i in range(0, len(terms), w)]


def rank(counts, score):
    items = [(t, score(t, c)) for t, c in counts.items()]
    items.sort(key=lambda x: (-x[1], x[0]))
    return items


def cooc(c1, c2, wins):
    m = [[0] * len(c2) for _ in c1]
    for win in wins:
        present = set(win)
        for i, a in enumerate(c1):
            if a in present:
                for j, b in enumerate(c2):
                    if b in present:
                        m[i][j] += 1
    return m


PERMS = list(itertools.permutations(range(4)))


def entangled_count(m):
    """Number of (row 4-subset, col 4-subset) pairs with some assignment |S| > 2."""
    f = np.asarray(m, dtype=np.int64)
    n_r, n_c = f.shape
    # num/den for ordered row pair (a, b) and ordered column pair (c, d)
    num = (f[:, None, :, None] + f[None, :, None, :] - f[:, None, None, :] - f[None, :, :, None])
    den = (f[:, None, :, None] + f[None, :, None, :] + f[:, None, None, :] + f[None, :, :, None])
    num = num.reshape(n_r * n_r, n_c * n_c)
    den = den.reshape(n_r * n_r, n_c * n_c)

    col_sets = list(itertools.combinations(range(n_c), 4))
    # per (col subset, col permutation): ids of B = (p0, p1) and B' = (p2, p3)
    cb = np.array([[s[p[0]] * n_c + s[p[1]] for p in PERMS] for s in col_sets]).reshape(-1)
    cbp = np.array([[s[p[2]] * n_c + s[p[3]] for p in PERMS] for s in col_sets]).reshape(-1)

    total = 0
    for rs in itertools.combinations(range(n_r), 4):
        ra = np.array([rs[p[0]] * n_r + rs[p[1]] for p in PERMS])[:, None]
        rap = np.array([rs[p[2]] * n_r + rs[p[3]] for p in PERMS])[:, None]
        n1, d1 = num[ra, cb], den[ra, cb]
        n2, d2 = num[rap, cb], den[rap, cb]
        n3, d3 = num[ra, cbp], den[ra, cbp]
        n4, d4 = num[rap, cbp], den[rap, cbp]
        defined = (d1 > 0) & (d2 > 0) & (d3 > 0) & (d4 > 0)
        lhs = n1 * d2 * d3 * d4 + n2 * d1 * d3 * d4 + n3 * d1 * d2 * d4 - n4 * d1 * d2 * d3
        rhs = 2 * d1 * d2 * d3 * d4
        viol = defined & (np.abs(lhs) > rhs)
        viol = viol.reshape(len(PERMS), len(col_sets), len(PERMS)).any(axis=(0, 2))
        total += int(viol.sum())
    return total, math.comb(n_r, 4) * len(col_sets)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("manifest", type=Path)
    ap.add_argument("--window", default="20,10,5")
    ap.add_argument("--k", type=int, default=10)
    args = ap.parse_args()
    sizes = [int(x) for x in args.window.split(",")]

    stop = load_stoplist(STOPLIST)
    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    manifest = json.loads(args.manifest.read_text())
    base = args.manifest.parent

    topics = {}
    for t in manifest["topics"]:
        topics[t["topic_id"]] = [
            (d["doc_id"], normalize((base / d["path"]).read_text(encoding="utf-8"), stop, stemmer))
            for d in t["documents"]
        ]

    n_docs = sum(len(docs) for docs in topics.values())
    df = Counter()
    for docs in topics.values():
        for _, terms in docs:
            df.update(set(terms))

    result = {"k": args.k, "window_sizes": sizes, "topics": {}}
    for tid, docs in topics.items():
        counts = Counter(t for _, terms in docs for t in terms)
        rankings = {
            "frequency": rank(counts, lambda t, c: float(c)),
            "tfidf": rank(counts, lambda t, c: c * (math.log((n_docs + 1) / (df[t] + 1)) + 1.0)),
        }
        entry = {"n_terms": sum(counts.values()), "vocabulary": len(counts), "methods": {}}
        for method, ranked in rankings.items():
            c1 = [t for t, _ in ranked[: args.k]]
            c2 = [t for t, _ in ranked[args.k: 2 * args.k]]
            cells = {}
            for w in sizes:
                wins = [win for _, terms in docs for win in windows(terms, w)]
                m = cooc(c1, c2, wins)
                n_ent, n_pairs = entangled_count(m)
                cells[str(w)] = {
                    "n_windows": len(wins),
                    "matrix": m,
                    "n_entangled": n_ent,
                    "n_pairs": n_pairs,
                    "p": n_ent / n_pairs,
                }
                print(f"{tid} {method} W={w}: {n_ent}/{n_pairs}", file=sys.stderr)
            entry["methods"][method] = {
                "ranking": [[t, s] for t, s in ranked[: 2 * args.k]],
                "c1": c1,
                "c2": c2,
                "cells": cells,
            }
        result["topics"][tid] = entry
    json.dump(result, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
