"""Regenerate the shipped romanization tables under src/unmtlab/schemes/.

Images follow ISO 15919 with three deterministic adjustments that make
greedy longest-match decoding exact:

* independent vowels are capitalised (``A``, ``Ā``, ``Ai`` ...), so a
  vowel after a consonant can never merge into a vowel sign;
* aspiration is written with the modifier letter ``ʰ`` (``kʰa``), so
  ``k`` + ``ha`` stays distinct from ``kʰa``;
* Malayalam chillu letters and the au length mark take a ``ˑ`` suffix.

Run:  python tools/make_schemes.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from unmtlab.translit import (  # noqa: E402
    BUILTIN_SCRIPTS, TranslitScheme, format_scheme, validate_scheme)

VOWELS = [  # (ISO value, independent image)
    ("a", "A"), ("ā", "Ā"), ("i", "I"), ("ī", "Ī"), ("u", "U"), ("ū", "Ū"),
    ("r̥", "R̥"), ("e", "E"), ("ē", "Ē"), ("ai", "Ai"), ("o", "O"), ("ō", "Ō"),
    ("au", "Au"),
]

CONSONANTS = [
    "k", "kʰ", "g", "gʰ", "ṅ", "c", "cʰ", "j", "jʰ", "ñ",
    "ṭ", "ṭʰ", "ḍ", "ḍʰ", "ṇ", "t", "tʰ", "d", "dʰ", "n",
    "p", "pʰ", "b", "bʰ", "m", "y", "r", "ṟ", "l", "ḷ", "ḻ", "v",
    "ś", "ṣ", "s", "h", "ṉ",
]

# Offsets inside the script block for the standard Brahmic layout.
BRAHMIC_VOWELS = {"a": 0x05, "ā": 0x06, "i": 0x07, "ī": 0x08, "u": 0x09, "ū": 0x0A,
                  "r̥": 0x0B, "e": 0x0E, "ē": 0x0F, "ai": 0x10, "o": 0x12, "ō": 0x13,
                  "au": 0x14}
BRAHMIC_SIGNS = {"ā": 0x3E, "i": 0x3F, "ī": 0x40, "u": 0x41, "ū": 0x42, "r̥": 0x43,
                 "e": 0x46, "ē": 0x47, "ai": 0x48, "o": 0x4A, "ō": 0x4B, "au": 0x4C}
BRAHMIC_CONS = {
    "k": 0x15, "kʰ": 0x16, "g": 0x17, "gʰ": 0x18, "ṅ": 0x19, "c": 0x1A, "cʰ": 0x1B,
    "j": 0x1C, "jʰ": 0x1D, "ñ": 0x1E, "ṭ": 0x1F, "ṭʰ": 0x20, "ḍ": 0x21, "ḍʰ": 0x22,
    "ṇ": 0x23, "t": 0x24, "tʰ": 0x25, "d": 0x26, "dʰ": 0x27, "n": 0x28, "ṉ": 0x29,
    "p": 0x2A, "pʰ": 0x2B, "b": 0x2C, "bʰ": 0x2D, "m": 0x2E, "y": 0x2F, "r": 0x30,
    "ṟ": 0x31, "l": 0x32, "ḷ": 0x33, "ḻ": 0x34, "v": 0x35, "ś": 0x36, "ṣ": 0x37,
    "s": 0x38, "h": 0x39,
}
VIRAMA, ANUSVARA, VISARGA = 0x4D, 0x02, 0x03

SCRIPTS = {
    "kannada": dict(base=0x0C80,
                    consonants=[c for c in CONSONANTS if c not in ("ṉ", "ḻ")],
                    extra_consonants={"ḻ": 0x0CDE},
                    vowels=[v for v, _ in VOWELS], signs=list(BRAHMIC_SIGNS),
                    marks={"ṁ": ANUSVARA, "ḥ": VISARGA}),
    "telugu": dict(base=0x0C00,
                   consonants=[c for c in CONSONANTS if c not in ("ṉ", "ḻ")],
                   vowels=[v for v, _ in VOWELS], signs=list(BRAHMIC_SIGNS),
                   marks={"ṁ": ANUSVARA, "ḥ": VISARGA}),
    "malayalam": dict(base=0x0D00,
                      consonants=[c for c in CONSONANTS if c != "ṉ"],
                      vowels=[v for v, _ in VOWELS], signs=list(BRAHMIC_SIGNS),
                      marks={"ṁ": ANUSVARA, "ḥ": VISARGA},
                      chillu={"ṇ": 0x0D7A, "n": 0x0D7B, "r": 0x0D7C, "l": 0x0D7D,
                              "ḷ": 0x0D7E, "k": 0x0D7F},
                      au_length=0x0D57),
    "tamil": dict(base=0x0B80,
                  consonants=["k", "ṅ", "c", "j", "ñ", "ṭ", "ṇ", "t", "n", "ṉ", "p", "m",
                              "y", "r", "ṟ", "l", "ḷ", "ḻ", "v", "ś", "ṣ", "s", "h"],
                  vowels=[v for v, _ in VOWELS if v != "r̥"],
                  signs=[s for s in BRAHMIC_SIGNS if s != "r̥"],
                  marks={"ḵ": VISARGA}),
}
CHILLU_SUFFIX = "ˑ"


def build(name: str) -> TranslitScheme:
    spec = SCRIPTS[name]
    base = spec["base"]
    independent = dict(VOWELS)
    fwd: dict[str, str] = {}
    for v in spec["vowels"]:
        fwd[chr(base + BRAHMIC_VOWELS[v])] = independent[v]
    for latin, off in spec["marks"].items():
        fwd[chr(base + off)] = latin
    cons = {c: chr(base + BRAHMIC_CONS[c]) for c in spec["consonants"]}
    for c, cp in spec.get("extra_consonants", {}).items():
        cons[c] = chr(cp)
    virama = chr(base + VIRAMA)
    for c, ch in cons.items():
        fwd[ch] = c + "a"
        fwd[ch + virama] = c
        for s in spec["signs"]:
            fwd[ch + chr(base + BRAHMIC_SIGNS[s])] = c + s
        if "au_length" in spec:
            fwd[ch + chr(spec["au_length"])] = c + "au" + CHILLU_SUFFIX
    for c, cp in spec.get("chillu", {}).items():
        fwd[chr(cp)] = c + CHILLU_SUFFIX
    return TranslitScheme(BUILTIN_SCRIPTS[name], fwd)


def main():
    out_dir = ROOT / "src" / "unmtlab" / "schemes"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in SCRIPTS:
        scheme = build(name)
        report = validate_scheme(scheme)
        if not report:
            raise SystemExit(f"{name}: {report.problems}")
        header = (f"# {name} romanization, generated by tools/make_schemes.py\n"
                  f"# {len(scheme.forward)} entries; native<TAB>latin\n")
        (out_dir / f"{name}.tsv").write_text(header + format_scheme(scheme), encoding="utf-8")
        print(f"{name}: {len(scheme.forward)} entries, {report.checked} combinations checked")


if __name__ == "__main__":
    main()
