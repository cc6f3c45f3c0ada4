"""
Token features
==============

Three feature views of a word, one per model family:

* TF-IDF vectors over word or character trigrams (Naive Bayes),
* frequency-weighted count vectors (random forest),
* symbolic template features (CRF).
"""

import math

from cmlid import load_sample_corpus, parse_corpus
from cmlid.features import (
    CHAR_TRIGRAM,
    WORD_TRIGRAM,
    CountVectorizer,
    char_class_predicates,
    char_ngrams,
    crf_features,
    fit_tfidf,
    idf,
    is_univ_default,
    tf,
)

# tf is the share of the document taken up by the term; idf is ln(N / df)
print("tf('exams') =", tf("exams", ["nuvvu", "exams", "baaga", "exams"]))
docs = parse_corpus("nuvvu\tX\tTE\n\nnuvvu\tX\tTE\n\nra\tX\tTE\n\nga\tX\tTE\n")
vec = fit_tfidf(docs, WORD_TRIGRAM)
print(f"idf('nuvvu') = {idf('nuvvu', vec):.6f}  (ln 2 = {math.log(2):.6f})")
print(f"idf(unseen)  = {idf('zzz', vec):.6f}  (ln 4 = {math.log(4):.6f})")

# Character trigrams capture romanized Telugu morphology such as the locative "-lo"
sample = load_sample_corpus()
char_vec = fit_tfidf(sample, CHAR_TRIGRAM)
sentence = parse_corpus("maa\tX\tTE\nclasslo\tX\tTE\nexam\tX\tEN\n")[0]
v = char_vec.transform_token(sentence, 1)
print()
print("TF-IDF char trigrams for 'classlo':")
for fid, w in zip(v.ids, v.weights):
    print(f"  {char_vec.index.name(fid):>8}  {w:.4f}")

# Count vectors weight each feature by how often it occurred in training
counts = CountVectorizer.fit(sample)
cv = counts.transform_word("ra")
print()
print("count vector for 'ra':", {counts.index.name(i): float(w) for i, w in zip(cv.ids, cv.weights)})

# CRF templates: word, POS and context windows, affixes, shape predicates, char n-grams
print()
print("forward/backward n-grams of 'yevaru':", char_ngrams("yevaru", 3, "forward"), char_ngrams("yevaru", 3, "backward"))
print("shape of '2morrow':", char_class_predicates("2morrow"))
feats = sorted(crf_features(sentence, 1, None))
print(f"{len(feats)} CRF features for 'classlo', e.g. {feats[:8]}")

# URLs and smileys are language neutral no matter what a model predicts
for w in ["http://t.co/x", "www.greatandhra.com", ":-)", "XD", "nuvvu"]:
    print(f"  {w:<22} univ default: {is_univ_default(w)}")
