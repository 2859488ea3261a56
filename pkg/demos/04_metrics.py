"""
Scoring translations
====================

Corpus BLEU with exponential smoothing, and a character-level edit rate
computed on detokenized text.
"""

from unmtlab.metrics import bleu, character_ter, evaluate

refs = [["the", "cat", "sat", "on", "the", "mat"], ["a", "dog", "barked", "."]]
good = [["the", "cat", "sat", "on", "a", "mat"], ["a", "dog", "barked", "."]]
bad = [["mat", "the", "on"], ["barked"]]

for name, hyps in (("good", good), ("bad", bad), ("reference", refs)):
    report = evaluate(hyps, refs)
    print(f"{name:10s} {report.tsv()}  precisions {report.stats.precisions}")

# Character edits see partial word matches that BLEU ignores.
print(bleu([["colour"]], [["color"]]), character_ter([["colour"]], [["color"]]))
