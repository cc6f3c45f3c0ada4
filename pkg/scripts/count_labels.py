"""Count label frequencies in a token-per-line corpus with plain string handling.

Kept free of any ``cmlid`` import so the manifest it writes is an
independent check on ``cmlid.corpus.label_stats``.

    python scripts/count_labels.py src/cmlid/data/sample_corpus.tsv > src/cmlid/data/sample_manifest.json
"""

import json
import sys


def main(path):
    counts = {"TE": 0, "EN": 0, "NE": 0, "UNIV": 0}
    sentences = 0
    in_sentence = False
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line.strip():
                in_sentence = False
                continue
            if not in_sentence:
                sentences += 1
                in_sentence = True
            counts[line.split("\t")[2]] += 1
    total = sum(counts.values())
    json.dump({"sentences": sentences, "tokens": total, "counts": counts}, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
