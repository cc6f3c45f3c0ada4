"""Generate the bundled synthetic English-Telugu code-mixed sample corpus.

Writes token-per-line ``surface<TAB>pos<TAB>label`` text.  Sentences mix
romanized Telugu and English in switching runs, with the usual social-media
noise: spelling variants (evaru/yevaru), morpheme-level mixing (classlo),
SMS spellings (2morrow, ni8, gud), named entities, URLs and smileys.

    python scripts/generate_sample_corpus.py > src/cmlid/data/sample_corpus.tsv
"""

import argparse
import random
import sys

TELUGU = [
    ("nuvvu", "PRP"), ("nenu", "PRP"), ("memu", "PRP"), ("vaadu", "PRP"), ("aame", "PRP"),
    ("manamu", "PRP"), ("meeru", "PRP"), ("vallu", "PRP"), ("naaku", "PRP"), ("neeku", "PRP"),
    ("evaru", "WP"), ("emiti", "WP"), ("enduku", "WRB"), ("ekkada", "WRB"), ("ela", "WRB"),
    ("eppudu", "WRB"), ("baaga", "RB"), ("chala", "RB"), ("inka", "RB"), ("ippudu", "RB"),
    ("malli", "RB"), ("kuda", "RB"), ("repu", "NN"), ("ninna", "NN"), ("illu", "NN"),
    ("pani", "NN"), ("amma", "NN"), ("nanna", "NN"), ("annayya", "NN"), ("snehithudu", "NN"),
    ("chesanu", "VB"), ("chestunnanu", "VB"), ("vellanu", "VB"), ("vastanu", "VB"),
    ("chudali", "VB"), ("cheppu", "VB"), ("ledu", "VB"), ("undi", "VB"), ("ayyindi", "VB"),
    ("aithene", "VB"), ("avuthav", "VB"), ("telusu", "VB"), ("kavali", "VB"), ("raledu", "VB"),
    ("tinnava", "VB"), ("padukunna", "VB"), ("chusava", "VB"), ("vachindi", "VB"),
    ("ante", "CC"), ("kani", "CC"), ("mari", "CC"), ("leka", "CC"),
    ("manchi", "JJ"), ("pedda", "JJ"), ("chinna", "JJ"), ("kottha", "JJ"), ("anni", "JJ"),
    ("kadha", "UH"), ("ra", "UH"), ("andi", "UH"), ("abba", "UH"), ("ayyo", "UH"),
    ("a", "DT"), ("to", "PSP"), ("lo", "PSP"), ("ki", "PSP"), ("tho", "PSP"), ("gurinchi", "PSP"), ("kosam", "PSP"),
    ("valla", "PSP"), ("daggara", "PSP"), ("tarvata", "PSP"),
]

ENGLISH = [
    ("exams", "NNS"), ("class", "NN"), ("movie", "NN"), ("phone", "NN"), ("office", "NN"),
    ("time", "NN"), ("weekend", "NN"), ("friends", "NNS"), ("party", "NN"), ("plan", "NN"),
    ("match", "NN"), ("college", "NN"), ("boss", "NN"), ("traffic", "NN"), ("bus", "NN"),
    ("results", "NNS"), ("marks", "NNS"), ("review", "NN"), ("songs", "NNS"), ("story", "NN"),
    ("prepare", "VB"), ("pass", "VB"), ("call", "VB"), ("message", "VB"), ("watch", "VB"),
    ("come", "VB"), ("go", "VB"), ("check", "VB"), ("send", "VB"), ("wait", "VB"),
    ("is", "VBZ"), ("was", "VBD"), ("are", "VBP"), ("have", "VBP"), ("will", "MD"),
    ("first", "JJ"), ("super", "JJ"), ("good", "JJ"), ("late", "JJ"), ("happy", "JJ"),
    ("boring", "JJ"), ("busy", "JJ"), ("free", "JJ"), ("awesome", "JJ"), ("best", "JJS"),
    ("really", "RB"), ("very", "RB"), ("today", "NN"), ("tomorrow", "NN"), ("night", "NN"),
    ("please", "UH"), ("sorry", "UH"), ("thanks", "UH"), ("ok", "UH"), ("hi", "UH"),
    ("the", "DT"), ("a", "DT"), ("this", "DT"), ("and", "CC"), ("but", "CC"),
    ("I", "PRP"), ("you", "PRP"), ("we", "PRP"), ("it", "PRP"), ("to", "TO"), ("for", "IN"),
    ("in", "IN"), ("at", "IN"), ("always", "RB"), ("great", "JJ"), ("before", "IN"),
]

SMS = {
    "you": ["u", "U"], "good": ["gud", "gooood"], "tomorrow": ["2morrow", "tmrw"],
    "night": ["ni8"], "please": ["plz", "pls"], "great": ["gr8"], "thanks": ["thnx"],
    "before": ["b4"], "hi": ["hai", "Hai"], "always": ["aLwAyS"], "really": ["rly"],
    "today": ["2day"], "message": ["msg"],
}

# English roots that take a Telugu case marker or clitic; the whole token is TE
MIXABLE = ["class", "office", "phone", "movie", "college", "exam", "bus", "party", "friends", "match", "weekend", "traffic"]
MIX_SUFFIXES = ["lo", "ki", "tho", "ni", "ke", "e"]
MIXED_ADJ = [("supere", "JJ"), ("busyga", "RB"), ("lateaindi", "VB"), ("happyga", "RB"), ("freega", "RB")]

NAMED = [
    ("John", "NNP"), ("Ravi", "NNP"), ("Priya", "NNP"), ("Mahesh", "NNP"), ("Hyderabad", "NNP"),
    ("Vizag", "NNP"), ("Chennai", "NNP"), ("Baahubali", "NNP"), ("Tollywood", "NNP"),
    ("Facebook", "NNP"), ("Chiranjeevi", "NNP"), ("Samantha", "NNP"), ("Prabhas", "NNP"),
    ("Rajamouli", "NNP"), ("Warangal", "NNP"), ("Kiran", "NNP"),
]

PUNCT = [(",", ","), (".", "."), ("!", "."), ("?", "."), ("...", ":"), ("!!", ".")]
SMILEYS = [":)", ":-)", ":D", ":-D", ";p", ":P", ":(", ";)", "xD", ":-/"]
URLS = [
    "http://bit.ly/2tel", "https://youtu.be/x9Lm", "www.chaibisket.com", "http://greatandhra.in",
    "www.idlebrain.com", "tollywood.in", "https://fb.me/abc12",
]
NUMBERS = ["10", "2", "100", "5", "2015", "3"]


def telugu_variant(word, rng):
    """Romanization noise: one spelling rule applied to a Telugu word."""
    rules = [
        lambda w: "y" + w if w[0] in "e" else w,
        lambda w: "a" + w[1:] if w.startswith("e") else w,
        lambda w: "ai" + w[1:] if w.startswith("e") else w,
        lambda w: w.replace("aa", "a"),
        lambda w: w.replace("ee", "i"),
        lambda w: w.replace("oo", "u"),
        lambda w: w.replace("vv", "v"),
        lambda w: w.replace("kk", "k"),
        lambda w: w.replace("th", "t"),
        lambda w: w.replace("v", "w", 1),
        lambda w: w.replace("a", "aa", 1),
        lambda w: w[:-1] if len(w) > 4 and w.endswith("u") else w,
        lambda w: w + "u" if w.endswith("n") else w,
        lambda w: w.replace("i", "ee", 1),
    ]
    for _ in range(4):
        out = rng.choice(rules)(word)
        if out != word:
            return out
    return word


def english_variant(word, rng):
    if word in SMS and rng.random() < 0.7:
        return rng.choice(SMS[word])
    if rng.random() < 0.3 and len(word) > 3:
        i = rng.randrange(1, len(word))
        return word[:i] + word[i - 1] * rng.randint(1, 3) + word[i:]
    return word


def telugu_token(rng, p_variant):
    r = rng.random()
    if r < 0.12:
        root = rng.choice(MIXABLE)
        # annotators do not always agree on morpheme-level mixing
        return root + rng.choice(MIX_SUFFIXES), "NN", "EN" if rng.random() < 0.2 else "TE"
    if r < 0.16:
        word, pos = rng.choice(MIXED_ADJ)
        return word, pos, "EN" if rng.random() < 0.2 else "TE"
    word, pos = rng.choice(TELUGU)
    if rng.random() < p_variant:
        word = telugu_variant(word, rng)
    return word, pos, "TE"


def english_token(rng, p_variant):
    word, pos = rng.choice(ENGLISH)
    if rng.random() < p_variant:
        word = english_variant(word, rng)
    return word, pos, "EN"


def univ_token(rng):
    r = rng.random()
    if r < 0.55:
        return rng.choice(PUNCT) + ("UNIV",)
    if r < 0.8:
        return rng.choice(SMILEYS), "SYM", "UNIV"
    if r < 0.92:
        return rng.choice(URLS), "SYM", "UNIV"
    return rng.choice(NUMBERS), "CD", "UNIV"


def named_token(rng):
    word, pos = rng.choice(NAMED)
    if rng.random() < 0.15:
        word = word.lower()
        if rng.random() < 0.3:
            return word, pos, "EN"
    return word, pos, "NE"


def sentence(rng, p_variant=0.5):
    length = rng.randint(6, 22)
    lang = "TE" if rng.random() < 0.55 else "EN"
    tokens = []
    if rng.random() < 0.25:
        tokens.append(named_token(rng))
    while len(tokens) < length:
        run = rng.randint(1, 5)
        for _ in range(run):
            tokens.append(telugu_token(rng, p_variant) if lang == "TE" else english_token(rng, p_variant))
        r = rng.random()
        if r < 0.3:
            tokens.append(univ_token(rng))
        elif r < 0.38:
            tokens.append(named_token(rng))
        if rng.random() < 0.6:
            lang = "EN" if lang == "TE" else "TE"
    tokens = tokens[:length]
    tokens.append(rng.choice(PUNCT[1:]) + ("UNIV",))
    r = rng.random()
    if r < 0.3:
        tokens.append((rng.choice(SMILEYS), "SYM", "UNIV"))
    elif r < 0.4:
        tokens.append((rng.choice(URLS), "SYM", "UNIV"))
    return tokens


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sentences", type=int, default=200)
    parser.add_argument("--seed", type=int, default=2015)
    args = parser.parse_args(argv)
    rng = random.Random(args.seed)
    out = sys.stdout
    for _ in range(args.sentences):
        for word, pos, label in sentence(rng):
            out.write(f"{word}\t{pos}\t{label}\n")
        out.write("\n")


if __name__ == "__main__":
    main()
