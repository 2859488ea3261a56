"""Invertible romanization between native scripts and Latin.

A scheme is a table from short native sequences to Latin sequences.
Romanizing parses the native side greedily (longest key first); restoring
parses the Latin side the same way.  ``validate_scheme`` proves that the
greedy Latin parse recovers every short concatenation of entries, which
is what makes ``restore(romanize(s)) == s`` hold for pure-script text.

Restoration keeps ASCII digits and a small set of ASCII punctuation in
Latin form, so numbers and sentence punctuation never turn into native
digits or dandas.  Latin words that were code-mixed into the original
text cannot be told apart from romanized words and are restored into
the native script anyway; that loss is inherent to the approach.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

PROTECTED_PUNCT = frozenset(".,;:?!'\"()-")
ASCII_DIGITS = frozenset("0123456789")
PROTECTED = PROTECTED_PUNCT | ASCII_DIGITS
LATIN = "latin"


class TranslitError(ValueError):
    pass


@dataclass(frozen=True)
class Script:
    name: str
    ranges: tuple[tuple[int, int], ...]

    def owns(self, ch: str) -> bool:
        cp = ord(ch)
        return any(lo <= cp <= hi for lo, hi in self.ranges)


BUILTIN_SCRIPTS = {
    "tamil": Script("tamil", ((0x0B80, 0x0BFF),)),
    "telugu": Script("telugu", ((0x0C00, 0x0C7F),)),
    "kannada": Script("kannada", ((0x0C80, 0x0CFF),)),
    "malayalam": Script("malayalam", ((0x0D00, 0x0D7F),)),
}


@dataclass(frozen=True)
class TranslitScheme:
    script: Script
    forward: Mapping[str, str]
    inverse: Mapping[str, str] = field(init=False)
    _max_native: int = field(init=False)
    _max_latin: int = field(init=False)

    def __post_init__(self):
        inverse: dict[str, str] = {}
        for native, latin in self.forward.items():
            # duplicates are reported by validate_scheme; first entry wins here
            inverse.setdefault(latin, native)
        object.__setattr__(self, "forward", dict(self.forward))
        object.__setattr__(self, "inverse", inverse)
        object.__setattr__(self, "_max_native", max(map(len, self.forward), default=0))
        object.__setattr__(self, "_max_latin", max(map(len, inverse), default=0))

    @property
    def name(self) -> str:
        return self.script.name


def detect_script(text: str, scripts: Iterable[Script] | None = None) -> list[str]:
    """Tag each character with the script owning its codepoint, else ``latin``."""
    scripts = list(BUILTIN_SCRIPTS.values() if scripts is None else scripts)
    tags = []
    for ch in text:
        for s in scripts:
            if s.owns(ch):
                tags.append(s.name)
                break
        else:
            tags.append(LATIN)
    return tags


def _native_digit(ch: str) -> str | None:
    d = unicodedata.decimal(ch, None)
    return None if d is None else str(d)


def romanize(text: str, scheme: TranslitScheme) -> str:
    """Replace every character of ``scheme.script`` through the table.

    Native decimal digits fold to ASCII digits (one-way, matching the
    restore rule that keeps numbers in Latin).  Any other native character
    without a table entry is an error.
    """
    owns = scheme.script.owns
    fwd = scheme.forward
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if not owns(ch):
            out.append(ch)
            i += 1
            continue
        for k in range(min(scheme._max_native, n - i), 0, -1):
            latin = fwd.get(text[i:i + k])
            if latin is not None:
                out.append(latin)
                i += k
                break
        else:
            digit = _native_digit(ch)
            if digit is None:
                raise TranslitError(
                    f"U+{ord(ch):04X} ({unicodedata.name(ch, 'unnamed')}) at offset {i} "
                    f"has no entry in the {scheme.name} scheme")
            out.append(digit)
            i += 1
    return "".join(out)


def _parse_latin(text: str, scheme: TranslitScheme) -> list[tuple[str, bool]]:
    """Greedy longest-match segmentation; each piece flagged as matched or residue."""
    inv = scheme.inverse
    pieces = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in PROTECTED:
            pieces.append((ch, False))
            i += 1
            continue
        for k in range(min(scheme._max_latin, n - i), 0, -1):
            if text[i:i + k] in inv:
                pieces.append((text[i:i + k], True))
                i += k
                break
        else:
            pieces.append((ch, False))
            i += 1
    return pieces


def restore(latin_text: str, scheme: TranslitScheme) -> str:
    """Inverse of ``romanize`` for pure-script text; tolerant of anything else.

    Digits and protected punctuation stay ASCII; unparseable residue is
    copied verbatim.
    """
    inv = scheme.inverse
    return "".join(inv[p] if matched else p for p, matched in _parse_latin(latin_text, scheme))


# --------------------------------------------------------------------------
# validation

@dataclass
class ValidationReport:
    scheme: str
    ok: bool = True
    problems: list[str] = field(default_factory=list)
    checked: int = 0

    def fail(self, msg: str):
        self.ok = False
        self.problems.append(msg)

    def __bool__(self) -> bool:
        return self.ok


def _segments(text: str, table: Mapping[str, str], maxlen: int) -> list[str] | None:
    out = []
    i = 0
    while i < len(text):
        for k in range(min(maxlen, len(text) - i), 0, -1):
            if text[i:i + k] in table:
                out.append(text[i:i + k])
                i += k
                break
        else:
            return None
    return out


def validate_scheme(scheme: TranslitScheme, stop_at_first: bool = True) -> ValidationReport:
    """Check injectivity, the protected set, and greedy decodability.

    Decodability means: for every concatenation of up to three entries,
    both greedy parses (native keys, Latin images) recover exactly that
    entry sequence, so the string round-trips.  Pairs are enumerated in
    full.  A triple can only fail where a pair does not if some image is
    longer than the first two images together and starts with them, so
    only those triples are enumerated; that covers the same set as the
    full cube at a fraction of the cost.
    """
    rep = ValidationReport(scheme.name)

    def fail(msg):
        rep.fail(msg)
        return stop_at_first

    seen: dict[str, str] = {}
    for native, latin in scheme.forward.items():
        if not native or not latin:
            if fail(f"empty entry {native!r} -> {latin!r}"):
                return rep
        if latin in seen:
            if fail(f"not injective: {seen[latin]!r} and {native!r} both map to {latin!r}"):
                return rep
        seen[latin] = native
        if any(not scheme.script.owns(c) for c in native):
            if fail(f"native key {native!r} has characters outside {scheme.name}"):
                return rep
        bad = sorted(set(latin) & PROTECTED)
        if bad or any(c.isspace() or scheme.script.owns(c) for c in latin):
            if fail(f"image {latin!r} of {native!r} uses reserved characters {bad}"):
                return rep
    if not rep.ok:
        return rep

    entries = list(scheme.forward.items())
    fwd, inv = scheme.forward, scheme.inverse
    mn, ml = scheme._max_native, scheme._max_latin

    def check(combo):
        rep.checked += 1
        nat = "".join(e[0] for e in combo)
        lat = "".join(e[1] for e in combo)
        if _segments(nat, fwd, mn) != [e[0] for e in combo]:
            return f"native parse of {nat!r} does not recover {[e[0] for e in combo]}"
        if _segments(lat, inv, ml) != [e[1] for e in combo]:
            back = restore(lat, scheme)
            return f"greedy decode breaks {[e[0] for e in combo]}: {lat!r} restores to {back!r}"
        return None

    for e in entries:
        msg = check((e,))
        if msg and fail(msg):
            return rep
    for e1 in entries:
        for e2 in entries:
            msg = check((e1, e2))
            if msg and fail(msg):
                return rep

    def triples(side: int, maxlen: int):
        keys = [e[side] for e in entries]
        by_prefix: dict[str, list[str]] = {}
        for k in keys:
            for j in range(1, len(k)):
                by_prefix.setdefault(k[:j], []).append(k)
        for e1 in entries:
            for e2 in entries:
                head = e1[side] + e2[side]
                if len(head) >= maxlen:
                    continue
                for longer in by_prefix.get(head, ()):
                    rest = longer[len(head):]
                    for e3 in entries:
                        if e3[side].startswith(rest) or rest.startswith(e3[side]):
                            yield (e1, e2, e3)

    for side, maxlen in ((0, mn), (1, ml)):
        for combo in triples(side, maxlen):
            msg = check(combo)
            if msg and fail(msg):
                return rep
    return rep


# --------------------------------------------------------------------------
# table files

def parse_scheme(text: str, source: str = "<string>") -> TranslitScheme:
    """Parse ``native<TAB>latin`` lines.

    ``#`` starts a comment line.  Two directive comments describe the
    script: ``#@script <name>`` and ``#@range <hex>-<hex>`` (repeatable).
    Without directives the script must be a built-in one named by
    ``#@script``.
    """
    name = None
    ranges: list[tuple[int, int]] = []
    forward: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#@"):
            key, _, value = line[2:].partition(" ")
            if key == "script":
                name = value.strip()
            elif key == "range":
                lo, _, hi = value.strip().partition("-")
                ranges.append((int(lo, 16), int(hi or lo, 16)))
            else:
                raise TranslitError(f"{source}:{lineno}: unknown directive {key!r}")
            continue
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise TranslitError(f"{source}:{lineno}: expected native<TAB>latin")
        native, latin = parts
        if native in forward:
            raise TranslitError(f"{source}:{lineno}: duplicate native key {native!r}")
        forward[native] = latin
    if name is None:
        raise TranslitError(f"{source}: missing '#@script <name>' directive")
    if ranges:
        script = Script(name, tuple(ranges))
    elif name in BUILTIN_SCRIPTS:
        script = BUILTIN_SCRIPTS[name]
    else:
        raise TranslitError(f"{source}: script {name!r} needs '#@range' directives")
    return TranslitScheme(script, forward)


def format_scheme(scheme: TranslitScheme) -> str:
    lines = [f"#@script {scheme.name}"]
    lines += [f"#@range {lo:04X}-{hi:04X}" for lo, hi in scheme.script.ranges]
    lines += [f"{n}\t{l}" for n, l in scheme.forward.items()]
    return "\n".join(lines) + "\n"


def load_scheme(path: str | Path) -> TranslitScheme:
    path = Path(path)
    return parse_scheme(path.read_text(encoding="utf-8"), str(path))


def save_scheme(scheme: TranslitScheme, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_scheme(scheme), encoding="utf-8")
    return path


SHIPPED_SCHEMES = ("kannada", "telugu", "tamil", "malayalam")


def builtin_scheme(name: str) -> TranslitScheme:
    if name not in SHIPPED_SCHEMES:
        raise KeyError(f"no shipped scheme {name!r}; have {SHIPPED_SCHEMES}")
    text = resources.files("unmtlab").joinpath("schemes").joinpath(f"{name}.tsv").read_text("utf-8")
    return parse_scheme(text, f"{name}.tsv")


def synthetic_scheme(name: str, native: Sequence[str], latin: Sequence[str]) -> TranslitScheme:
    """One-character-per-entry scheme for a synthetic script inventory."""
    if len(native) != len(latin):
        raise TranslitError("native and latin inventories differ in size")
    cps = sorted(ord(c) for c in native)
    ranges = []
    for cp in cps:
        if ranges and cp == ranges[-1][1] + 1:
            ranges[-1] = (ranges[-1][0], cp)
        else:
            ranges.append((cp, cp))
    return TranslitScheme(Script(name, tuple(ranges)), dict(zip(native, latin)))
