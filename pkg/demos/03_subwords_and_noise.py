"""
Subword segmentation and the denoising corruption
==================================================

BPE is learned jointly over every training corpus.  The corruption used
by the denoising loss drops words and shuffles them locally.
"""

import numpy as np

from unmtlab.noise import NoiseConfig, corrupt
from unmtlab.subword import Vocab, apply_bpe, learn_bpe, revert_bpe

corpus = [s.split() for s in [
    "low lower lowest",
    "new newer newest",
    "wide wider widest",
    "the lowest and the widest",
]]
bpe = learn_bpe([corpus], num_merges=20)
print("first merges:", bpe.merges[:5])

segmented = [apply_bpe(s, bpe) for s in corpus]
print(segmented[0])
assert all(revert_bpe(seg) == s for seg, s in zip(segmented, corpus))

vocab = Vocab.build(segmented)
print(len(vocab), "symbols; ids:", vocab.encode(segmented[3]))

# Corruption: each call draws fresh noise from the generator.
rng = np.random.default_rng(0)
sentence = "the cat sat on the mat near the door".split()
for _ in range(3):
    print(" ".join(corrupt(sentence, NoiseConfig(p_drop=0.1, shuffle_k=3), rng)))
