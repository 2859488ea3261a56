"""Run the bundled synthetic experiments and build the acceptance table.

The manifest (``reproduce.json`` in the package) names a synthetic
language family, the shared model/training settings, and a list of
conditions.  Each condition runs the same chain of stages:

    synth -> translit (unified conditions only) -> bpe -> train
          -> translate -> restore script -> evaluate

and writes its metrics log, test hypotheses and scores under
``<out>/<condition>/``.  The table rows then compare conditions.

Everything that lands in ``acceptance.tsv`` and ``runs.tsv`` is a pure
function of the manifest; wall-clock times go to ``timings.tsv`` only.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import MonoCorpus, ParallelCorpus, Sentence, write_mono
from .metrics import evaluate
from .model import ModelConfig
from .schedules import DataBindings, TrainSchedule, active_tasks, schedule_from_json, train
from .similarity import overlap, profile
from .synthlang import BaseState, family_from_json, romanization
from .translit import TranslitScheme, restore, romanize


def bundled_manifest() -> dict:
    text = resources.files("unmtlab").joinpath("reproduce.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class Condition:
    name: str
    schedule: Mapping
    unified: bool = True
    data_seed: int = 0
    parallel_size: int = 2000
    time_limit: float | None = None


def conditions(manifest: Mapping) -> list[Condition]:
    out = []
    for entry in manifest["conditions"]:
        seeds = entry.get("seeds", [entry.get("seed", 0)])
        for seed in seeds:
            sched = dict(entry["schedule"])
            sched["seed"] = seed
            name = entry["name"].format(seed=seed)
            out.append(Condition(name, sched, entry.get("unified", True), seed,
                                 entry.get("parallel_size", manifest.get("parallel_size", 2000)),
                                 entry.get("time_limit")))
    names = [c.name for c in out]
    if len(set(names)) != len(names):
        raise ValueError("condition names must be unique (use {seed} in repeated entries)")
    return out


# --------------------------------------------------------------------------
# one condition

def family_for(manifest: Mapping, data_seed: int) -> BaseState:
    fam = json.loads(json.dumps(manifest["family"]))
    fam.setdefault("spec", {})["seed"] = data_seed
    return family_from_json(fam)


class ScriptMapper:
    """Romanize/restore tokens of each synthetic language (Latin ones pass through)."""

    def __init__(self, state: BaseState, unified: bool):
        self.schemes: dict[str, TranslitScheme | None] = {}
        for lang in [state.base, *state.members.values()]:
            keep = lang.script.is_latin or not unified
            self.schemes[lang.name] = None if keep else romanization(lang.script)

    def to_latin(self, lang: str, sents: Sequence[Sentence]) -> tuple[Sentence, ...]:
        sc = self.schemes[lang]
        if sc is None:
            return tuple(sents)
        return tuple(tuple(romanize(t, sc) for t in s) for s in sents)

    def to_native(self, lang: str, sents: Sequence[Sequence[str]]) -> list[list[str]]:
        sc = self.schemes[lang]
        if sc is None:
            return [list(s) for s in sents]
        return [[restore(t, sc) for t in s] for s in sents]

    def mono(self, corpus: MonoCorpus) -> MonoCorpus:
        return MonoCorpus(corpus.lang, self.to_latin(corpus.lang, corpus.sentences))

    def parallel(self, corpus: ParallelCorpus) -> ParallelCorpus:
        a = self.to_latin(corpus.src_lang, corpus.sources)
        b = self.to_latin(corpus.tgt_lang, corpus.targets)
        return ParallelCorpus(corpus.src_lang, corpus.tgt_lang, tuple(zip(a, b)),
                              corpus.evaluation_only)


def bindings_for(schedule: TrainSchedule, state: BaseState, mapper: ScriptMapper,
                 parallel_size: int) -> DataBindings:
    x, y = schedule.focal
    tasks = active_tasks(schedule)
    mono_langs = sorted({t.src for t in tasks if t.term in ("AE", "BT")})
    par_pairs = sorted({tuple(sorted((t.src, t.tgt))) for t in tasks if t.term in ("MT", "CT")})
    mono = {lang: mapper.mono(state.mono(lang)) for lang in mono_langs}
    parallel = [mapper.parallel(state.parallel(a, b, parallel_size)) for a, b in par_pairs]
    valid = [mapper.parallel(state.parallel(x, y, schedule.validation_size, "valid", True))]
    return DataBindings(mono, parallel, valid)


@dataclass
class RunRecord:
    condition: str
    architecture: str
    seed: int
    scores: dict[str, tuple[float, float]] = field(default_factory=dict)   # direction -> (bleu, chrter)
    seconds: float = 0.0
    time_limit: float | None = None

    def bleu(self, direction: str) -> float:
        return self.scores[direction][0]


def run_condition(manifest: Mapping, cond: Condition, out_dir: str | Path,
                  progress: Callable[[str], None] | None = None) -> RunRecord:
    out = Path(out_dir) / cond.name
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.process_time()
    state = family_for(manifest, cond.data_seed)
    mapper = ScriptMapper(state, cond.unified)
    schedule = schedule_from_json(cond.schedule)
    bindings = bindings_for(schedule, state, mapper, cond.parallel_size)
    config = ModelConfig(vocab_size=16, **manifest.get("model", {}))
    tag = (lambda m: progress(f"{cond.name}: {m}")) if progress else None
    result = train(schedule, bindings, config, progress=tag)
    (out / "metrics.tsv").write_text(result.metrics_tsv(), encoding="utf-8")

    record = RunRecord(cond.name, schedule.architecture, schedule.seed, time_limit=cond.time_limit)
    x, y = schedule.focal
    test = state.test_set(x, y)
    for src, tgt, col_in, col_ref in ((x, y, 0, 1), (y, x, 1, 0)):
        inputs = mapper.to_latin(src, [p[col_in] for p in test.pairs])
        hyps = mapper.to_native(tgt, result.translate(inputs, src, tgt))
        refs = [p[col_ref] for p in test.pairs]
        report = evaluate(hyps, refs)
        record.scores[f"{src}>{tgt}"] = (round(report.bleu, 2), round(report.character_ter, 4))
        write_mono([h if h else [""] for h in hyps], out / f"hyp.{src}-{tgt}.{tgt}")
    record.seconds = time.process_time() - t0
    if progress:
        progress(f"{cond.name}: " + ", ".join(f"{d} {b:.1f}" for d, (b, _) in record.scores.items())
                 + f" ({record.seconds:.0f}s)")
    return record


# --------------------------------------------------------------------------
# acceptance table

@dataclass
class Row:
    criterion: str
    measured: str
    threshold: str
    passed: bool

    def tsv(self) -> str:
        return f"{self.criterion}\t{self.measured}\t{self.threshold}\t{'pass' if self.passed else 'FAIL'}"


def _focal_mean(rec: RunRecord) -> float:
    return round(float(np.mean([s[0] for s in rec.scores.values()])), 2)


def family_overlaps(manifest: Mapping, data_seed: int, langs: Sequence[str]) -> dict[str, float]:
    """Trigram overlap of each language with the focal one, both romanized."""
    state = family_for(manifest, data_seed)
    mapper = ScriptMapper(state, unified=True)
    base = profile(mapper.mono(state.mono(state.base.name)))
    return {lang: round(overlap(base, profile(mapper.mono(state.mono(lang)))), 4) for lang in langs}


def acceptance_rows(manifest: Mapping, records: Mapping[str, RunRecord]) -> list[Row]:
    crit = manifest["criteria"]
    rows: list[Row] = []

    def within(rec):
        return rec.time_limit is None or rec.seconds <= rec.time_limit

    def limit(rec):
        return "" if rec.time_limit is None else f" within {rec.time_limit:.0f}s cpu"

    c = crit["supervised"]
    rec = records[c["run"]]
    low = min(b for b, _ in rec.scores.values())
    rows.append(Row("7 supervised sanity", f"min BLEU {low:.2f}",
                    f">= {c['min_bleu']}{limit(rec)}",
                    low >= c["min_bleu"] and within(rec)))

    c = crit["distant"]
    rec = records[c["run"]]
    high = max(b for b, _ in rec.scores.values())
    rows.append(Row("8 distant pair fails", f"max BLEU {high:.2f}", f"< {c['max_bleu']}",
                    high < c["max_bleu"]))

    c = crit["unification"]
    uni, dis = records[c["unified"]], records[c["disjoint"]]
    gaps = {d: round(uni.bleu(d) - dis.bleu(d), 2) for d in uni.scores}
    low_uni = min(b for b, _ in uni.scores.values())
    rows.append(Row("9 unified beats disjoint script",
                    "gaps " + " ".join(f"{d}:{g:.2f}" for d, g in gaps.items())
                    + f"; unified min BLEU {low_uni:.2f}",
                    f"gap >= {c['min_gap']} both directions; unified >= {c['min_bleu']}{limit(uni)}",
                    min(gaps.values()) >= c["min_gap"] and low_uni >= c["min_bleu"] and within(uni)))

    c = crit["ordering"]
    ovl = family_overlaps(manifest, 0, c["references"])
    by_overlap = sorted(c["references"], key=lambda r: -ovl[r])
    ordered = 0
    detail = []
    for seed in c["seeds"]:
        scores = [_focal_mean(records[c["run"].format(ref=r, seed=seed)]) for r in by_overlap]
        ok = all(a > b for a, b in zip(scores, scores[1:]))
        ordered += ok
        detail.append("/".join(f"{s:.2f}" for s in scores))
    rows.append(Row("10 reference ordering",
                    "overlap " + "/".join(f"{ovl[r]:.3f}" for r in by_overlap)
                    + "; BLEU " + " ".join(detail) + f"; ordered in {ordered}/{len(c['seeds'])}",
                    "BLEU decreasing with overlap in a majority of seeds",
                    2 * ordered > len(c["seeds"])))

    c = crit["cross_translation"]
    wins = 0
    detail = []
    for seed in c["seeds"]:
        with_ct = records[c["with_ct"].format(seed=seed)].bleu(c["direction"])
        without = records[c["without_ct"].format(seed=seed)].bleu(c["direction"])
        wins += with_ct >= without
        detail.append(f"{with_ct:.2f}vs{without:.2f}")
    rows.append(Row("11 cross-translation helps", " ".join(detail) + f"; wins {wins}/{len(c['seeds'])}",
                    f">= in at least {c['min_wins']} seeds ({c['direction']})",
                    wins >= c["min_wins"]))
    return rows


def _run_one(args):
    manifest, cond, out_dir, verbose = args
    return run_condition(manifest, cond, out_dir, print if verbose else None)


def reproduce(out_dir: str | Path, manifest: Mapping | None = None, jobs: int = 1,
              progress: Callable[[str], None] | None = None) -> tuple[list[Row], dict[str, RunRecord]]:
    """Run every condition, then write ``acceptance.tsv``, ``runs.tsv`` and ``timings.tsv``."""
    manifest = manifest or bundled_manifest()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    conds = conditions(manifest)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            recs = list(pool.map(_run_one, [(manifest, c, out, progress is not None) for c in conds]))
    else:
        recs = [run_condition(manifest, c, out, progress) for c in conds]
    records = {r.condition: r for r in recs}
    rows = acceptance_rows(manifest, records)

    (out / "acceptance.tsv").write_text(
        "criterion\tmeasured\tthreshold\tstatus\n" + "".join(r.tsv() + "\n" for r in rows),
        encoding="utf-8")
    lines = ["condition\tarchitecture\tseed\tdirection\tbleu\tcharacter_ter"]
    for r in recs:
        for d, (b, ct) in r.scores.items():
            lines.append(f"{r.condition}\t{r.architecture}\t{r.seed}\t{d}\t{b:.2f}\t{ct:.4f}")
    (out / "runs.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "timings.tsv").write_text(
        "condition\tcpu_seconds\n" + "".join(f"{r.condition}\t{r.seconds:.1f}\n" for r in recs),
        encoding="utf-8")
    return rows, records
