"""Regenerate the bundled English hyphenation sample.

Hyphenation points come from the TeX en_US patterns (via pyphen) applied to
the most frequent English words (via wordfreq).  Neither package is needed
at runtime; install them only to rebuild the list.
"""

import argparse
import random
import re

import pyphen
from wordfreq import top_n_list

VOWELS = set("aeiouy")


def candidates(n_top: int):
    dic = pyphen.Pyphen(lang="en_US", left=2, right=2)
    for word in top_n_list("en", n_top):
        if not re.fullmatch(r"[a-z]{2,}", word):
            continue
        syllables = dic.inserted(word).split("-")
        if all(VOWELS & set(s) for s in syllables):
            yield syllables


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--top", type=int, default=20000)
    ap.add_argument("--size", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--output", default="src/scansion/data/hyph_en_2000.txt")
    args = ap.parse_args()
    pool = list(candidates(args.top))
    sample = random.Random(args.seed).sample(pool, args.size)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(f"# {args.size} words sampled (seed {args.seed}) from the {args.top} most "
                 "frequent English words, hyphenated with TeX en_US patterns\n")
        for syllables in sample:
            fh.write("·".join(syllables) + "\n")


if __name__ == "__main__":
    main()
