"""Command-line entry point: ``unmtlab <subcommand> ...``.

Text subcommands read stdin and write stdout unless given files.  Every
random choice comes from an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __doc__ as package_doc
from .corpus import (CorpusError, detokenize, load_mono, load_parallel, load_parallel_tsv,
                     mono_from_lines, tokenize)
from .metrics import MetricError, evaluate
from .model import ModelConfig
from .noise import NoiseConfig, corrupt
from .schedules import (DataBindings, ScheduleError, build_codec, load_result,
                        schedule_from_json, train)
from .similarity import format_matrix, pairwise_matrix
from .subword import (BpeError, DESK_MERGES, apply_bpe, format_bpe, learn_bpe, load_bpe,
                      revert_bpe)
from .synthlang import SynthError, family_from_json, write_family
from .translit import (SHIPPED_SCHEMES, TranslitError, TranslitScheme, builtin_scheme,
                       load_scheme, restore, romanize, validate_scheme)


def _lines(path: str | None) -> list[str]:
    if path is None or path == "-":
        return sys.stdin.read().splitlines()
    return Path(path).read_text(encoding="utf-8").splitlines()


def _emit(lines, path: str | None = None):
    text = "".join(line + "\n" for line in lines)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _scheme(ref: str) -> TranslitScheme:
    """A shipped scheme name or a path to a scheme file."""
    if ref in SHIPPED_SCHEMES:
        return builtin_scheme(ref)
    return load_scheme(ref)


def _scheme_set(ref: str) -> list[TranslitScheme]:
    """``builtin`` for every shipped scheme, else a directory of ``*.tsv`` files."""
    if ref == "builtin":
        return [builtin_scheme(n) for n in SHIPPED_SCHEMES]
    files = sorted(Path(ref).glob("*.tsv"))
    if not files:
        raise TranslitError(f"no scheme files (*.tsv) in {ref}")
    return [load_scheme(f) for f in files]


# --------------------------------------------------------------------------
# subcommands

def cmd_translit(args) -> int:
    if args.action == "validate":
        bad = 0
        for ref in args.schemes or SHIPPED_SCHEMES:
            report = validate_scheme(_scheme(ref), stop_at_first=False)
            status = "ok" if report else "FAILED"
            print(f"{ref}\t{status}\t{report.checked} combinations checked")
            for p in report.problems[:20]:
                print(f"  {p}")
            bad += not report
        return 1 if bad else 0
    if not args.scheme:
        raise TranslitError("--scheme is required for romanize/restore")
    scheme = _scheme(args.scheme)
    fn = romanize if args.action == "romanize" else restore
    _emit((fn(line, scheme) for line in _lines(args.input)), args.output)
    return 0


def cmd_similarity(args) -> int:
    schemes = _scheme_set(args.romanize) if args.romanize else []
    corpora = []
    for path in args.files:
        lines = _lines(path)
        for sc in schemes:
            lines = [romanize(line, sc) for line in lines]
        corpora.append(mono_from_lines(lines, Path(path).stem or "corpus"))
    labels = args.labels.split(",") if args.labels else [Path(p).stem for p in args.files]
    if len(labels) != len(args.files):
        raise ValueError(f"{len(labels)} labels for {len(args.files)} files")
    mat = pairwise_matrix(corpora, args.n) if len(corpora) > 1 else np.ones((1, 1))
    if len(corpora) == 1 and not any(tok for s in corpora[0] for tok in s if len(tok) >= args.n):
        raise ValueError(f"{args.files[0]} has no {args.n}-grams")
    sys.stdout.write(format_matrix(labels, mat))
    return 0


def cmd_bpe(args) -> int:
    if args.action == "learn":
        if not args.files:
            raise BpeError("bpe learn needs at least one corpus file")
        corpora = [load_mono(f, Path(f).stem or "corpus") for f in args.files]
        _emit([format_bpe(learn_bpe(corpora, args.merges)).rstrip("\n")], args.output)
        return 0
    if args.action == "apply":
        if not args.model:
            raise BpeError("bpe apply needs --model")
        model = load_bpe(args.model)
        _emit((" ".join(apply_bpe(tokenize(line), model)) for line in _lines(args.input)),
              args.output)
        return 0
    _emit((detokenize(revert_bpe(line.split())) for line in _lines(args.input)), args.output)
    return 0


def cmd_corrupt(args) -> int:
    config = NoiseConfig(args.p_drop, args.shuffle_k)
    rng = np.random.default_rng(args.seed)
    out = []
    for line in _lines(args.input):
        toks = tokenize(line)
        out.append(detokenize(corrupt(toks, config, rng)) if toks else "")
    _emit(out, args.output)
    return 0


def cmd_synth(args) -> int:
    data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    if args.seed is not None:
        data.setdefault("spec", {})["seed"] = args.seed
    state = family_from_json(data)
    path = write_family(state, args.out)
    print(f"wrote {path}")
    return 0


def _resolve(base: Path, p: str) -> Path:
    path = Path(p)
    return path if path.is_absolute() else base / path


def _load_corpora(spec: dict, base: Path, evaluation_only: bool = False):
    out = []
    for entry in spec:
        if "tsv" in entry:
            c = load_parallel_tsv(_resolve(base, entry["tsv"]), entry["src_lang"], entry["tgt_lang"])
        else:
            c = load_parallel(_resolve(base, entry["src"]), _resolve(base, entry["tgt"]),
                              entry["src_lang"], entry["tgt_lang"])
        if evaluation_only or entry.get("evaluation_only"):
            c = type(c)(c.src_lang, c.tgt_lang, c.pairs, True)
        out.append(c)
    return out


def cmd_train(args) -> int:
    path = Path(args.schedule)
    data = json.loads(path.read_text(encoding="utf-8"))
    if args.seed is not None:
        data["seed"] = args.seed
    base = path.parent
    corpora = data.get("corpora", {})
    bindings = DataBindings(
        {lang: load_mono(_resolve(base, p), lang) for lang, p in corpora.get("mono", {}).items()},
        _load_corpora(corpora.get("parallel", []), base),
        _load_corpora(corpora.get("validation", []), base, evaluation_only=True))
    schedule = schedule_from_json(data)
    bpe_cfg = data.get("bpe", {})
    bpe = load_bpe(_resolve(base, bpe_cfg["model"])) if "model" in bpe_cfg else None
    codec = build_codec(bindings, bpe_cfg.get("merges", DESK_MERGES), bpe)
    config = ModelConfig(vocab_size=len(codec.vocab), **data.get("model", {}))
    progress = None if args.quiet else (lambda m: print(m, file=sys.stderr, flush=True))
    result = train(schedule, bindings, config, codec, progress)
    result.save(args.out)
    print(f"{result.updates} updates; outputs in {args.out}")
    return 0


def cmd_translate(args) -> int:
    result = load_result(args.model)
    lines = _lines(args.input)
    if args.romanize:
        sc = _scheme(args.romanize)
        lines = [romanize(line, sc) for line in lines]
    sents = [tokenize(line) for line in lines]
    keep = [i for i, s in enumerate(sents) if s]
    hyps = result.translate([sents[i] for i in keep], args.src_lang, args.tgt_lang)
    out = [""] * len(sents)
    for i, h in zip(keep, hyps):
        out[i] = detokenize(h)
    if args.restore:
        sc = _scheme(args.restore)
        out = [restore(line, sc) for line in out]
    _emit(out, args.output)
    return 0


def cmd_evaluate(args) -> int:
    hyps = [tokenize(line) for line in _lines(args.hyp)]
    refs = [tokenize(line) for line in _lines(args.ref)]
    report = evaluate(hyps, refs)
    print(report.verbose() if args.verbose else report.tsv())
    return 0


def cmd_reproduce(args) -> int:
    from .experiments import bundled_manifest, reproduce
    manifest = bundled_manifest()
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    progress = None if args.quiet else (lambda m: print(m, file=sys.stderr, flush=True))
    rows, _ = reproduce(args.out, manifest, args.jobs, progress)
    sys.stdout.write((Path(args.out) / "acceptance.tsv").read_text(encoding="utf-8"))
    return 0 if all(r.passed for r in rows) else 1


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unmtlab", description=package_doc)
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("translit", help="romanize, restore, or validate schemes")
    p.add_argument("action", choices=("romanize", "restore", "validate"))
    p.add_argument("--scheme", help=f"one of {', '.join(SHIPPED_SCHEMES)} or a scheme file")
    p.add_argument("schemes", nargs="*", help="schemes to validate (default: all shipped)")
    p.add_argument("-i", "--input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("similarity", help="character n-gram overlap matrix (percent)")
    p.add_argument("files", nargs="+")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--romanize", metavar="SCHEME_DIR",
                   help="directory of scheme files, or 'builtin' for the shipped ones")
    p.add_argument("--labels", help="comma-separated row labels (default: file stems)")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("bpe", help="learn, apply, or revert byte-pair encoding")
    p.add_argument("action", choices=("learn", "apply", "revert"))
    p.add_argument("files", nargs="*")
    p.add_argument("--merges", type=int, default=DESK_MERGES)
    p.add_argument("--model")
    p.add_argument("-i", "--input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bpe)

    p = sub.add_parser("corrupt", help="apply the denoising noise model line by line")
    p.add_argument("--p-drop", type=float, default=0.1)
    p.add_argument("--shuffle-k", type=float, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-i", "--input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("synth", help="generate a synthetic language family")
    p.add_argument("--spec", required=True, help="family JSON: {spec, base, members}")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train one architecture from a schedule file")
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("translate", help="translate with a trained model directory")
    p.add_argument("--model", required=True, help="output directory of 'train'")
    p.add_argument("--src-lang", required=True)
    p.add_argument("--tgt-lang", required=True)
    p.add_argument("--romanize", help="scheme applied to the input first")
    p.add_argument("--restore", help="scheme used to restore the output script")
    p.add_argument("-i", "--input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("evaluate", help="BLEU and character edit rate")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reproduce", help="run the bundled synthetic experiments")
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="alternative manifest JSON")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusError, TranslitError, BpeError, MetricError, ScheduleError, SynthError,
            ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"unmtlab {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
