"""
A synthetic language family with known translations
====================================================

A base language, related languages that relexify part of the lexicon
(each in its own invented script), and a distant language with a fresh
lexicon and reversed word order.  Every member renders the same word-id
sentences, so ground-truth translations come for free.
"""

from unmtlab.corpus import detokenize
from unmtlab.similarity import format_matrix, overlap, pairwise_matrix, profile
from unmtlab.synthlang import (SynthSpec, derive_distant, derive_related, gen_base,
                               pua_script, romanization)
from unmtlab.translit import romanize

spec = SynthSpec(corpus_size=1000, seed=0)
base, state = gen_base(spec, name="syn")
members = {}
for i, strength in enumerate((0.0, 0.3, 0.6, 0.9), start=1):
    name = f"rel{int(strength * 100)}"
    members[name], _ = derive_related(state, strength, pua_script(i, spec.alphabet_size), name)
members["dst"], test = derive_distant(state, name="dst")

# The ground-truth test pairs are marked evaluation-only.
src, tgt = test.pairs[0]
print(detokenize(src), "->", detokenize(tgt), "| evaluation_only:", test.evaluation_only)


def latin(corpus):
    scheme = None if state.language(corpus.lang).script.is_latin else \
        romanization(state.language(corpus.lang).script)
    if scheme is None:
        return corpus.sentences
    return [[romanize(t, scheme) for t in s] for s in corpus.sentences]


labels = ["syn", *members]
corpora = [base, *members.values()]
print("native scripts:")
print(format_matrix(labels, pairwise_matrix(corpora)), end="")
print("romanized:")
print(format_matrix(labels, pairwise_matrix([latin(c) for c in corpora])), end="")

# More relexification, less overlap with the base.
for name, corpus in members.items():
    print(name, round(overlap(profile(latin(base)), profile(latin(corpus))), 3))
