"""Training architectures built from four loss terms, and the training loop.

Loss terms, each one SGD update on one batch:

``MT``   supervised cross-entropy on a parallel batch (x -> y);
``AE``   denoising: reconstruct x from its corrupted copy, both sides tagged
         with x's language;
``BT``   back-translation: greedily translate monolingual x into the other
         language (no gradient), then train on (translation -> x);
``CT``   cross-translation: for a parallel pair (x, r), translate x into the
         pivot language (no gradient), then train on (translation -> r).

An architecture is a fixed cycle of tasks (term + languages).  One *round*
runs every task of the cycle once, in order; ``TrainSchedule.steps``
counts rounds.  Tasks whose term weight is 0 are removed from the cycle
entirely, and every task draws its batches from its own random stream,
so removing a task leaves the remaining update sequence unchanged.

Architectures (X, Y the focal pair; R the reference languages, which
have parallel data with Y):

* ``supervised_baseline``: MT X<->Y (needs focal parallel data).
* ``unsupervised_baseline``: AE X, AE Y, BT X<->Y.
* ``unsup_dissimilar``: MT R<->Y, plus AE/BT between X and Y.
* ``unsup_similar``: MT R<->Y, plus AE/BT between X and each R.
* ``*_ct``: the above plus CT on both directions of every R-Y corpus,
  pivoting through X.
* ``cascaded``: two models; a supervised R<->Y model and an unsupervised
  X<->R model, chained at translation time through R.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import MonoCorpus, ParallelCorpus, Sentence
from .metrics import bleu
from .model import (ModelConfig, Seq2SeqModel, forward_loss, grad_step, greedy_decode,
                    init_model, load_checkpoint, make_batch, mlm_loss, pad_sequences,
                    save_checkpoint)
from .noise import NoiseConfig, corrupt
from .subword import (DESK_MERGES, BpeModel, Vocab, apply_bpe, learn_bpe, load_bpe,
                      revert_bpe_lenient, save_bpe)

TERMS = ("MT", "AE", "BT", "CT", "MLM")
ARCHITECTURES = ("cascaded", "unsup_dissimilar", "unsup_similar", "unsup_dissimilar_ct",
                 "unsup_similar_ct", "supervised_baseline", "unsupervised_baseline")
DECODE_BATCH = 100

Ids = list[int]


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class MlmConfig:
    enabled: bool = False
    mask_rate: float = 0.15
    steps: int = 2000

    def __post_init__(self):
        if not 0.0 < self.mask_rate < 1.0:
            raise ScheduleError(f"mask_rate must lie in (0, 1), got {self.mask_rate}")
        if self.steps < 0:
            raise ScheduleError("mlm steps must be >= 0")


def _default_weights() -> dict[str, float]:
    return {t: 1.0 for t in TERMS}


@dataclass(frozen=True)
class TrainSchedule:
    architecture: str
    focal: tuple[str, str]
    references: tuple[str, ...] = ()
    steps: int = 600
    batch_size: int = 32
    loss_weights: Mapping[str, float] = field(default_factory=_default_weights)
    noise: NoiseConfig = NoiseConfig()
    mlm: MlmConfig = MlmConfig()
    seed: int = 0
    pivot: str | None = None
    validate_every: int = 200
    validation_size: int = 200
    clip_norm: float | None = None
    # overrides applied to the model config of the cascade's supervised model
    sup_model: Mapping[str, int | float] = field(default_factory=dict)

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ScheduleError(f"unknown architecture {self.architecture!r}; "
                                f"choose from {', '.join(ARCHITECTURES)}")
        object.__setattr__(self, "focal", tuple(self.focal))
        object.__setattr__(self, "references", tuple(self.references))
        x, y = self.focal
        if x == y:
            raise ScheduleError("focal languages must differ")
        weights = _default_weights()
        for k, v in dict(self.loss_weights).items():
            if k not in weights:
                raise ScheduleError(f"unknown loss term {k!r}")
            if v < 0:
                raise ScheduleError(f"loss weight for {k} must be >= 0")
            weights[k] = float(v)
        object.__setattr__(self, "loss_weights", weights)
        baseline = self.architecture.endswith("baseline")
        if baseline and self.references:
            raise ScheduleError(f"{self.architecture} takes no reference languages")
        if not baseline and not self.references:
            raise ScheduleError(f"{self.architecture} needs at least one reference language")
        if self.architecture == "cascaded" and len(self.references) != 1:
            raise ScheduleError("cascaded chains exactly two models through one reference language")
        if set(self.references) & {x, y} or len(set(self.references)) != len(self.references):
            raise ScheduleError("reference languages must be distinct from each other and the focal pair")
        if self.steps < 0 or self.batch_size < 1:
            raise ScheduleError("steps must be >= 0 and batch_size >= 1")
        if self.pivot is not None and self.pivot not in (x, *self.references, y):
            raise ScheduleError(f"pivot {self.pivot!r} is not a schedule language")

    @property
    def languages(self) -> tuple[str, ...]:
        return (*self.focal, *self.references)

    @property
    def cross_pivot(self) -> str:
        return self.pivot or self.focal[0]


@dataclass(frozen=True)
class Task:
    term: str
    model: str        # which model the update goes to: "main", or "sup"/"unsup" in a cascade
    src: str          # MT/CT: source side of the parallel pair; AE/BT: monolingual language
    tgt: str          # MT/CT: target side; AE: same as src; BT: intermediate language
    pivot: str | None = None

    @property
    def key(self) -> str:
        via = f"@{self.pivot}" if self.pivot else ""
        return f"{self.term}:{self.src}>{self.tgt}{via}:{self.model}"


def _unmt_tasks(a: str, b: str, model: str) -> list[Task]:
    return [Task("AE", model, a, a), Task("AE", model, b, b),
            Task("BT", model, a, b), Task("BT", model, b, a)]


def plan_tasks(schedule: TrainSchedule) -> list[Task]:
    """The round's task cycle, before weight-0 pruning."""
    arch = schedule.architecture
    x, y = schedule.focal
    refs = schedule.references
    tasks: list[Task] = []
    if arch == "supervised_baseline":
        return [Task("MT", "main", x, y), Task("MT", "main", y, x)]
    if arch == "unsupervised_baseline":
        return _unmt_tasks(x, y, "main")
    if arch == "cascaded":
        r = refs[0]
        return [Task("MT", "sup", r, y), Task("MT", "sup", y, r), *_unmt_tasks(x, r, "unsup")]
    for r in refs:
        tasks += [Task("MT", "main", r, y), Task("MT", "main", y, r)]
    if arch.startswith("unsup_dissimilar"):
        tasks += _unmt_tasks(x, y, "main")
    else:
        for r in refs:
            tasks += _unmt_tasks(x, r, "main")
    if arch.endswith("_ct"):
        pivot = schedule.cross_pivot
        for r in refs:
            tasks += [Task("CT", "main", r, y, pivot), Task("CT", "main", y, r, pivot)]
    seen, unique = set(), []
    for t in tasks:
        if t.key not in seen:
            seen.add(t.key)
            unique.append(t)
    return unique


def active_tasks(schedule: TrainSchedule) -> list[Task]:
    return [t for t in plan_tasks(schedule) if schedule.loss_weights[t.term] > 0]


def model_languages(schedule: TrainSchedule) -> dict[str, list[str]]:
    x, y = schedule.focal
    if schedule.architecture == "cascaded":
        r = schedule.references[0]
        return {"sup": [r, y], "unsup": [x, r]}
    return {"main": list(schedule.languages)}


# --------------------------------------------------------------------------
# data bindings

@dataclass(frozen=True)
class DataBindings:
    """Word-level corpora for one run.

    ``mono`` feeds AE/BT (and MLM), ``parallel`` feeds MT/CT, and
    ``validation`` is only ever decoded and scored.
    """
    mono: Mapping[str, MonoCorpus] = field(default_factory=dict)
    parallel: Sequence[ParallelCorpus] = ()
    validation: Sequence[ParallelCorpus] = ()


def _find_parallel(bindings: DataBindings, a: str, b: str) -> ParallelCorpus | None:
    for corpus in bindings.parallel:
        if {corpus.src_lang, corpus.tgt_lang} == {a, b}:
            return corpus if corpus.src_lang == a else corpus.reversed()
    return None


def validate_bindings(schedule: TrainSchedule, bindings: DataBindings) -> None:
    """Every problem is collected and reported at once, before any training."""
    problems = []
    x, y = schedule.focal
    langs = set(schedule.languages)
    for lang, corpus in bindings.mono.items():
        if corpus.lang != lang:
            problems.append(f"mono corpus bound as {lang!r} is tagged {corpus.lang!r}")
        if corpus.evaluation_only:
            problems.append(f"mono corpus {lang!r} is evaluation-only and cannot be trained on")
    for corpus in bindings.parallel:
        pair = f"{corpus.src_lang}-{corpus.tgt_lang}"
        if corpus.evaluation_only:
            problems.append(f"parallel corpus {pair} is evaluation-only and cannot be trained on")
        if {corpus.src_lang, corpus.tgt_lang} == {x, y} and schedule.architecture != "supervised_baseline":
            problems.append(f"{schedule.architecture} must not see focal parallel data ({pair})")
        if not {corpus.src_lang, corpus.tgt_lang} <= langs:
            problems.append(f"parallel corpus {pair} uses a language outside the schedule")
    for corpus in bindings.validation:
        if not {corpus.src_lang, corpus.tgt_lang} <= langs:
            problems.append(f"validation corpus {corpus.src_lang}-{corpus.tgt_lang} "
                            "uses a language outside the schedule")
    for task in active_tasks(schedule):
        if task.term in ("MT", "CT"):
            corpus = _find_parallel(bindings, task.src, task.tgt)
            if corpus is None:
                problems.append(f"{task.key} needs a {task.src}-{task.tgt} parallel corpus")
            elif not len(corpus):
                problems.append(f"{task.key}: parallel corpus {task.src}-{task.tgt} is empty")
        else:
            corpus = bindings.mono.get(task.src)
            if corpus is None:
                problems.append(f"{task.key} needs a monolingual {task.src} corpus")
            elif not len(corpus):
                problems.append(f"{task.key}: monolingual {task.src} corpus is empty")
    if problems:
        raise ScheduleError("invalid data bindings:\n  " + "\n  ".join(dict.fromkeys(problems)))


# --------------------------------------------------------------------------
# single-term steps

@dataclass
class StepOutcome:
    loss: float | None        # None when no update happened
    skipped: int = 0


def _check_langs(model: Seq2SeqModel, *langs: str):
    for lang in langs:
        model.lang_id(lang)


def _update(model: Seq2SeqModel, src: Sequence[Ids], src_lang: str, tgt: Sequence[Ids],
            tgt_lang: str, learning_rate: float, weight: float,
            clip_norm: float | None) -> float:
    batch = make_batch(src, src_lang, tgt, tgt_lang, model.config.max_len)
    loss, grads = forward_loss(model, batch)
    if weight > 0:
        grad_step(model, grads, learning_rate * weight, clip_norm)
    return float(loss)


def mt_step(model: Seq2SeqModel, sources: Sequence[Ids], src_lang: str, targets: Sequence[Ids],
            tgt_lang: str, learning_rate: float, weight: float = 1.0,
            clip_norm: float | None = None) -> float:
    _check_langs(model, src_lang, tgt_lang)
    return _update(model, sources, src_lang, targets, tgt_lang, learning_rate, weight, clip_norm)


def ae_step(model: Seq2SeqModel, sentences: Sequence[Ids], lang: str, noise: NoiseConfig,
            rng: np.random.Generator, learning_rate: float, weight: float = 1.0,
            clip_norm: float | None = None) -> float:
    """Fresh corruption is drawn on every call."""
    _check_langs(model, lang)
    noisy = [corrupt(s, noise, rng) for s in sentences]
    return _update(model, noisy, lang, sentences, lang, learning_rate, weight, clip_norm)


def decode_limit(model: Seq2SeqModel, sources: Sequence[Ids]) -> int:
    longest = max(len(s) for s in sources)
    return min(model.config.max_len - 1, math.ceil(1.5 * longest) + 2)


def bt_step(model: Seq2SeqModel, sentences: Sequence[Ids], lang: str, other: str,
            learning_rate: float, weight: float = 1.0,
            clip_norm: float | None = None) -> StepOutcome:
    """Translate ``lang -> other`` greedily, then train ``other -> lang`` on it."""
    _check_langs(model, lang, other)
    hyps = greedy_decode(model, sentences, lang, other, decode_limit(model, sentences))
    keep = [i for i, h in enumerate(hyps) if h]
    skipped = len(hyps) - len(keep)
    if not keep:
        return StepOutcome(None, skipped)
    loss = _update(model, [hyps[i] for i in keep], other, [sentences[i] for i in keep], lang,
                   learning_rate, weight, clip_norm)
    return StepOutcome(loss, skipped)


def ct_step(model: Seq2SeqModel, sources: Sequence[Ids], src_lang: str, refs: Sequence[Ids],
            ref_lang: str, pivot: str, learning_rate: float, weight: float = 1.0,
            clip_norm: float | None = None) -> StepOutcome:
    """Translate ``src_lang -> pivot`` greedily, then train ``pivot -> ref_lang``."""
    _check_langs(model, src_lang, ref_lang, pivot)
    if pivot == src_lang:
        hyps = [list(s) for s in sources]
    else:
        hyps = greedy_decode(model, sources, src_lang, pivot, decode_limit(model, sources))
    keep = [i for i, h in enumerate(hyps) if h]
    skipped = len(hyps) - len(keep)
    if not keep:
        return StepOutcome(None, skipped)
    loss = _update(model, [hyps[i] for i in keep], pivot, [refs[i] for i in keep], ref_lang,
                   learning_rate, weight, clip_norm)
    return StepOutcome(loss, skipped)


def mlm_step(model: Seq2SeqModel, sentences: Sequence[Ids], lang: str, mask_rate: float,
             rng: np.random.Generator, learning_rate: float,
             clip_norm: float | None = None) -> StepOutcome:
    _check_langs(model, lang)
    ids = pad_sequences([list(s)[:model.config.max_len - 1] for s in sentences])
    loss, grads, skipped = mlm_loss(model, ids, lang, mask_rate, rng)
    if grads is None:
        return StepOutcome(None, skipped)
    grad_step(model, grads, learning_rate, clip_norm)
    return StepOutcome(float(loss), skipped)


def unmt_epoch(model: Seq2SeqModel, mono_x: Sequence[Ids], lang_x: str, mono_y: Sequence[Ids],
               lang_y: str, noise: NoiseConfig, rng: np.random.Generator,
               learning_rate: float, batch_size: int = 32) -> dict[str, float]:
    """One pass over the larger corpus, cycling AE(x), AE(y), BT(x->y), BT(y->x).

    Returns summed losses per term and their total.
    """
    order_x = rng.permutation(len(mono_x))
    order_y = rng.permutation(len(mono_y))
    rounds = math.ceil(max(len(mono_x), len(mono_y)) / batch_size)
    sums = {"AE": 0.0, "BT": 0.0, "bt_skipped": 0}

    def take(order, corpus, r):
        idx = [order[(r * batch_size + j) % len(order)] for j in range(batch_size)]
        return [corpus[i] for i in idx]

    for r in range(rounds):
        bx, by = take(order_x, mono_x, r), take(order_y, mono_y, r)
        sums["AE"] += ae_step(model, bx, lang_x, noise, rng, learning_rate)
        sums["AE"] += ae_step(model, by, lang_y, noise, rng, learning_rate)
        for batch, a, b in ((bx, lang_x, lang_y), (by, lang_y, lang_x)):
            out = bt_step(model, batch, a, b, learning_rate)
            sums["bt_skipped"] += out.skipped
            if out.loss is not None:
                sums["BT"] += out.loss
    sums["total"] = sums["AE"] + sums["BT"]
    return sums


# --------------------------------------------------------------------------
# text <-> ids

@dataclass
class Codec:
    bpe: BpeModel
    vocab: Vocab

    def encode(self, tokens: Sequence[str]) -> Ids:
        return self.vocab.encode(apply_bpe(tokens, self.bpe))

    def decode(self, ids: Sequence[int]) -> list[str]:
        return revert_bpe_lenient(self.vocab.decode(ids), self.bpe.marker)


def _training_sentences(bindings: DataBindings) -> list[Sequence[Sentence]]:
    out: list[Sequence[Sentence]] = [c.sentences for c in bindings.mono.values()]
    for corpus in bindings.parallel:
        out += [corpus.sources, corpus.targets]
    return out


def build_codec(bindings: DataBindings, merges: int = DESK_MERGES,
                bpe: BpeModel | None = None) -> Codec:
    """Joint BPE over every training corpus (unless one is given) and the
    vocabulary of symbols that occur in the segmented training data."""
    corpora = _training_sentences(bindings)
    if bpe is None:
        bpe = learn_bpe(corpora, merges)
    vocab = Vocab.build(apply_bpe(s, bpe) for sents in corpora for s in sents)
    return Codec(bpe, vocab)


# --------------------------------------------------------------------------
# translation

def _batched_decode(model, sources, src_lang, tgt_lang):
    out = []
    for i in range(0, len(sources), DECODE_BATCH):
        chunk = sources[i:i + DECODE_BATCH]
        out += greedy_decode(model, chunk, src_lang, tgt_lang, decode_limit(model, chunk))
    return out


@dataclass
class CascadeOutput:
    intermediate: list[Ids]
    output: list[Ids]


def cascade_translate(model_sup: Seq2SeqModel, model_unsup: Seq2SeqModel,
                      sources: Sequence[Ids], path: Sequence[str]) -> CascadeOutput:
    """Two greedy decodes through the middle language of ``path``.

    Each hop runs on whichever model was trained on both of its languages.
    Empty intermediate outputs are passed on as a single unknown token.
    """
    if len(path) != 3:
        raise ScheduleError(f"cascade path needs three languages, got {list(path)}")

    def pick(a, b):
        for m in (model_sup, model_unsup):
            if a in m.lang_index and b in m.lang_index:
                return m
        raise ScheduleError(f"no cascade model covers the hop {a}->{b}")

    first, second = pick(path[0], path[1]), pick(path[1], path[2])
    mid = _batched_decode(first, list(sources), path[0], path[1])
    fed = [m if m else [4] for m in mid]
    return CascadeOutput(mid, _batched_decode(second, fed, path[1], path[2]))


# --------------------------------------------------------------------------
# training

@dataclass(frozen=True)
class LogRow:
    step: int
    term: str
    value: float

    def tsv(self) -> str:
        return f"{self.step}\t{self.term}\t{self.value:.6f}"


@dataclass
class TrainResult:
    schedule: TrainSchedule
    codec: Codec
    models: dict[str, Seq2SeqModel]
    log: list[LogRow] = field(default_factory=list)
    diagnostics: dict[str, int] = field(default_factory=dict)
    updates: int = 0

    def translate(self, sentences: Sequence[Sequence[str]], src: str, tgt: str) -> list[list[str]]:
        ids = [self.codec.encode(s) or [4] for s in sentences]
        if "main" in self.models:
            out = _batched_decode(self.models["main"], ids, src, tgt)
        else:
            r = self.schedule.references[0]
            out = cascade_translate(self.models["sup"], self.models["unsup"], ids,
                                    (src, r, tgt)).output
        return [self.codec.decode(o) for o in out]

    def metrics_tsv(self) -> str:
        return "step\tloss_term\tvalue\n" + "".join(r.tsv() + "\n" for r in self.log)

    def save(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_bpe(self.codec.bpe, out / "bpe.model")
        self.codec.vocab.save(out / "vocab.txt")
        for name, m in self.models.items():
            save_checkpoint(m, out / f"model.{name}.ckpt")
        (out / "metrics.tsv").write_text(self.metrics_tsv(), encoding="utf-8")
        (out / "schedule.json").write_text(json.dumps(schedule_to_json(self.schedule), indent=1) + "\n",
                                           encoding="utf-8")
        (out / "diagnostics.json").write_text(
            json.dumps({**self.diagnostics, "updates": self.updates}, indent=1, sort_keys=True) + "\n",
            encoding="utf-8")
        return out


def load_result(out_dir: str | Path) -> TrainResult:
    out = Path(out_dir)
    schedule = schedule_from_json(json.loads((out / "schedule.json").read_text(encoding="utf-8")))
    codec = Codec(load_bpe(out / "bpe.model"), Vocab.load(out / "vocab.txt"))
    models = {p.name.split(".")[1]: load_checkpoint(p) for p in sorted(out.glob("model.*.ckpt"))}
    if not models:
        raise ScheduleError(f"{out}: no model checkpoints")
    return TrainResult(schedule, codec, models)


def _task_rng(seed: int, key: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(key.encode("utf-8"))])


def train(schedule: TrainSchedule, bindings: DataBindings, config: ModelConfig,
          codec: Codec | None = None,
          progress: Callable[[str], None] | None = None) -> TrainResult:
    """Optional MLM pretraining, then ``schedule.steps`` rounds of the task cycle.

    Every update appends one log row ``(update index, term, loss)``.
    Every ``validate_every`` rounds, and after the last one, each
    validation corpus is decoded in both directions on its first
    ``validation_size`` pairs and logged as ``bleu:<src>><tgt>``.
    """
    validate_bindings(schedule, bindings)
    codec = codec or build_codec(bindings)
    base = replace(config, vocab_size=len(codec.vocab), seed=schedule.seed)
    models = {}
    for name, langs in model_languages(schedule).items():
        cfg = replace(base, **schedule.sup_model) if name == "sup" else base
        models[name] = init_model(cfg, langs)
    result = TrainResult(schedule, codec, models,
                         diagnostics={"bt_skipped": 0, "ct_skipped": 0, "mlm_skipped": 0})
    lr = base.learning_rate
    clip = schedule.clip_norm
    B = schedule.batch_size

    mono_ids = {lang: [codec.encode(s) for s in c.sentences] for lang, c in bindings.mono.items()}
    par_cache: dict[tuple[str, str], tuple[list[Ids], list[Ids]]] = {}

    def parallel_ids(a, b):
        if (a, b) not in par_cache:
            corpus = _find_parallel(bindings, a, b)
            par_cache[(a, b)] = ([codec.encode(s) for s in corpus.sources],
                                 [codec.encode(t) for t in corpus.targets])
        return par_cache[(a, b)]

    def log(term, value):
        result.updates += 1
        result.log.append(LogRow(result.updates, term, value))

    if schedule.mlm.enabled and schedule.mlm.steps > 0:
        for name, model in models.items():
            langs = [lang for lang in model.langs if lang in mono_ids]
            rngs = {lang: _task_rng(schedule.seed, f"MLM:{lang}:{name}") for lang in langs}
            for step in range(schedule.mlm.steps):
                lang = langs[step % len(langs)]
                corpus = mono_ids[lang]
                batch = [corpus[i] for i in rngs[lang].integers(0, len(corpus), size=B)]
                out = mlm_step(model, batch, lang, schedule.mlm.mask_rate, rngs[lang], lr, clip)
                result.diagnostics["mlm_skipped"] += out.skipped
                if out.loss is not None:
                    log("MLM", out.loss)

    tasks = active_tasks(schedule)
    rngs = {t.key: _task_rng(schedule.seed, t.key) for t in tasks}

    def run_task(task: Task):
        model = models[task.model]
        rng = rngs[task.key]
        w = schedule.loss_weights[task.term]
        if task.term in ("MT", "CT"):
            srcs, tgts = parallel_ids(task.src, task.tgt)
            idx = rng.integers(0, len(srcs), size=B)
            s, t = [srcs[i] for i in idx], [tgts[i] for i in idx]
            if task.term == "MT":
                return mt_step(model, s, task.src, t, task.tgt, lr, w, clip), 0
            out = ct_step(model, s, task.src, t, task.tgt, task.pivot, lr, w, clip)
            return out.loss, out.skipped
        corpus = mono_ids[task.src]
        batch = [corpus[i] for i in rng.integers(0, len(corpus), size=B)]
        if task.term == "AE":
            return ae_step(model, batch, task.src, schedule.noise, rng, lr, w, clip), 0
        out = bt_step(model, batch, task.src, task.tgt, lr, w, clip)
        return out.loss, out.skipped

    def validate():
        for corpus in bindings.validation:
            pairs = corpus.pairs[:schedule.validation_size]
            for src_lang, tgt_lang, col_in, col_ref in (
                    (corpus.src_lang, corpus.tgt_lang, 0, 1),
                    (corpus.tgt_lang, corpus.src_lang, 1, 0)):
                hyps = result.translate([p[col_in] for p in pairs], src_lang, tgt_lang)
                score = bleu(hyps, [p[col_ref] for p in pairs])
                result.log.append(LogRow(result.updates, f"bleu:{src_lang}>{tgt_lang}", score))
                if progress:
                    progress(f"round {rnd}: bleu {src_lang}>{tgt_lang} {score:.1f}")

    rnd = 0
    for rnd in range(1, schedule.steps + 1):
        for task in tasks:
            loss, skipped = run_task(task)
            if skipped:
                result.diagnostics[f"{task.term.lower()}_skipped"] += skipped
            if loss is not None:
                if not math.isfinite(loss):
                    raise FloatingPointError(f"non-finite {task.key} loss at round {rnd}")
                log(task.term, loss)
        if schedule.validate_every and rnd % schedule.validate_every == 0 and rnd < schedule.steps:
            validate()
    validate()
    return result


# --------------------------------------------------------------------------
# schedule files

def schedule_to_json(schedule: TrainSchedule) -> dict:
    data = asdict(schedule)
    data["focal"] = list(schedule.focal)
    data["references"] = list(schedule.references)
    data["loss_weights"] = dict(schedule.loss_weights)
    data["sup_model"] = dict(schedule.sup_model)
    return data


def schedule_from_json(data: Mapping) -> TrainSchedule:
    """Accepts both the flat form written by ``schedule_to_json`` and the
    file form with a ``languages`` block ``{focal, references, pivot}``."""
    data = dict(data)
    langs = data.pop("languages", None)
    if langs is not None:
        data["focal"] = langs["focal"]
        data["references"] = langs.get("references", [])
        data["pivot"] = langs.get("pivot")
    for key in ("corpora", "model", "bpe"):
        data.pop(key, None)
    known = set(TrainSchedule.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ScheduleError(f"unknown schedule fields: {sorted(unknown)}")
    if "noise" in data:
        data["noise"] = NoiseConfig(**data["noise"])
    if "mlm" in data:
        data["mlm"] = MlmConfig(**data["mlm"])
    if "architecture" not in data or "focal" not in data:
        raise ScheduleError("schedule needs 'architecture' and focal languages")
    return TrainSchedule(**data)
