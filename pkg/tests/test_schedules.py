import json
from collections import Counter

import numpy as np
import pytest

from unmtlab import model as M
from unmtlab.corpus import MonoCorpus
from unmtlab.model import EOS, ModelConfig, forward_loss, greedy_decode, init_model, make_batch
from unmtlab.noise import NoiseConfig
from unmtlab.schedules import (DataBindings, MlmConfig, ScheduleError, TrainSchedule,
                               active_tasks, ae_step, bt_step, cascade_translate, ct_step,
                               decode_limit, load_result, mt_step, plan_tasks, schedule_from_json,
                               schedule_to_json, train, unmt_epoch, validate_bindings)
from unmtlab.synthlang import SynthSpec, derive_distant, derive_related, gen_base


def cipher(seq):
    return [5 + (t - 5 + 3) % 10 for t in seq]


def random_seqs(rng, count):
    return [[int(t) for t in rng.integers(5, 15, size=rng.integers(2, 6))] for _ in range(count)]


@pytest.fixture(scope="module")
def cipher_model():
    """a->b is a token cipher, b->a its inverse, b->c a copy."""
    cfg = ModelConfig(vocab_size=15, max_len=12, embed_dim=32, hidden_dim=64, seed=0)
    m = init_model(cfg, ["a", "b", "c"])
    rng = np.random.default_rng(0)
    for _ in range(700):
        xs = random_seqs(rng, 16)
        ys = [cipher(x) for x in xs]
        mt_step(m, xs, "a", ys, "b", 0.1)
        mt_step(m, ys, "b", xs, "a", 0.1)
        mt_step(m, ys, "b", ys, "c", 0.1)
    return m


@pytest.fixture(scope="module")
def family():
    spec = SynthSpec(corpus_size=200, test_size=20, seed=5)
    _, state = gen_base(spec, name="x")
    derive_related(state, 0.3, name="r")
    derive_distant(state, name="y")
    return state


# vocab_size is replaced by the codec's size inside train()
TINY = ModelConfig(vocab_size=10, max_len=16, embed_dim=16, hidden_dim=32, num_layers=1,
                   num_heads=2, dtype="float64")


def bindings_for(state, schedule):
    x, y = schedule.focal
    mono = {lang: state.mono(lang, 100) for lang in schedule.languages}
    parallel = [state.parallel(r, y, 100) for r in schedule.references]
    if schedule.architecture == "supervised_baseline":
        parallel.append(state.parallel(x, y, 100))
    return DataBindings(mono, parallel, [state.parallel(x, y, 20, "valid", True)])


def small_schedule(arch, **kw):
    refs = () if arch.endswith("baseline") else ("r",)
    kw = {"steps": 3, "batch_size": 8, "validate_every": 2, "validation_size": 10, **kw}
    return TrainSchedule(arch, ("x", "y"), refs, **kw)


# --------------------------------------------------------------------------
# planning and validation

def test_task_plans():
    keys = lambda arch, refs=("r",): [t.key for t in plan_tasks(TrainSchedule(arch, ("x", "y"), refs))]
    assert keys("supervised_baseline", ()) == ["MT:x>y:main", "MT:y>x:main"]
    assert keys("unsupervised_baseline", ()) == ["AE:x>x:main", "AE:y>y:main",
                                                 "BT:x>y:main", "BT:y>x:main"]
    assert keys("unsup_similar") == ["MT:r>y:main", "MT:y>r:main", "AE:x>x:main",
                                     "AE:r>r:main", "BT:x>r:main", "BT:r>x:main"]
    assert keys("unsup_dissimilar_ct")[-2:] == ["CT:r>y@x:main", "CT:y>r@x:main"]
    assert keys("cascaded") == ["MT:r>y:sup", "MT:y>r:sup", "AE:x>x:unsup", "AE:r>r:unsup",
                                "BT:x>r:unsup", "BT:r>x:unsup"]
    two = keys("unsup_similar_ct", ("r", "s"))
    # AE on x is shared between the two references
    assert len(two) == len(set(two)) == 4 + 3 + 4 + 4


def test_schedule_validation():
    with pytest.raises(ScheduleError):
        TrainSchedule("nope", ("x", "y"))
    with pytest.raises(ScheduleError):
        TrainSchedule("unsup_similar", ("x", "y"))
    with pytest.raises(ScheduleError):
        TrainSchedule("cascaded", ("x", "y"), ("r", "s"))
    with pytest.raises(ScheduleError):
        TrainSchedule("supervised_baseline", ("x", "y"), loss_weights={"XX": 1})
    with pytest.raises(ScheduleError):
        TrainSchedule("unsup_similar", ("x", "y"), ("x",))


def test_weight_zero_prunes_tasks():
    s = small_schedule("unsup_similar_ct", loss_weights={"CT": 0})
    assert [t.key for t in active_tasks(s)] == [t.key for t in plan_tasks(small_schedule("unsup_similar"))]


def test_bindings_reject_evaluation_only_and_focal_parallel(family):
    s = small_schedule("unsup_similar_ct")
    good = bindings_for(family, s)
    validate_bindings(s, good)
    test = family.test_set("x", "y")
    bad = DataBindings({**good.mono, "x": MonoCorpus("x", test.sources, evaluation_only=True)},
                       [*good.parallel, test, family.parallel("x", "y", 10)])
    with pytest.raises(ScheduleError) as err:
        validate_bindings(s, bad)
    msg = str(err.value)
    assert "mono corpus 'x' is evaluation-only" in msg
    assert "parallel corpus x-y is evaluation-only" in msg
    assert "must not see focal parallel data" in msg
    with pytest.raises(ScheduleError, match="needs a r-y parallel corpus"):
        validate_bindings(s, DataBindings(good.mono, []))
    with pytest.raises(ScheduleError):
        train(s, bad, TINY)


# --------------------------------------------------------------------------
# single steps

def test_mt_step_equals_forward_loss_and_zero_weight_is_inert():
    m = init_model(ModelConfig(vocab_size=15, max_len=8, embed_dim=8, hidden_dim=16), ["a", "b"])
    rng = np.random.default_rng(1)
    xs, ys = random_seqs(rng, 4), random_seqs(rng, 4)
    expected, _ = forward_loss(m, make_batch(xs, "a", ys, "b"), False)
    before = m.copy()
    assert mt_step(m, xs, "a", ys, "b", 0.1, weight=0.0) == expected
    assert all(np.array_equal(m.params[k], before.params[k]) for k in m.params)
    with pytest.raises(KeyError):
        mt_step(m, xs, "a", ys, "zz", 0.1)


def test_mt_loss_decreases_on_fixed_set():
    m = init_model(ModelConfig(vocab_size=15, max_len=8, embed_dim=16, hidden_dim=32), ["a", "b"])
    rng = np.random.default_rng(2)
    xs = random_seqs(rng, 8)
    ys = [cipher(x) for x in xs]
    first = mt_step(m, xs, "a", ys, "b", 0.1)
    for _ in range(199):
        last = mt_step(m, xs, "a", ys, "b", 0.1)
    assert last < 0.5 * first


def test_ae_copy_task_converges():
    m = init_model(ModelConfig(vocab_size=15, max_len=8, embed_dim=32, hidden_dim=64), ["a"])
    rng = np.random.default_rng(3)
    data = random_seqs(rng, 16)
    for _ in range(400):
        loss = ae_step(m, data, "a", NoiseConfig(0.0, 0), rng, 0.1)
    assert loss < 0.1


def test_ae_corruption_is_resampled():
    m = init_model(ModelConfig(vocab_size=15, max_len=12, embed_dim=8, hidden_dim=16), ["a"])
    sent = list(range(5, 15))
    rng = np.random.default_rng(4)
    noise = NoiseConfig(0.3, 3)
    losses = {ae_step(m, [sent], "a", noise, rng, 0.0) for _ in range(5)}
    assert len(losses) > 1


def test_bt_loss_at_true_mapping_is_supervised_loss(cipher_model):
    m = cipher_model.copy()
    rng = np.random.default_rng(10)
    xs = random_seqs(rng, 20)
    decoded = greedy_decode(m, xs, "a", "b")
    assert decoded == [cipher(x) for x in xs]
    expected, _ = forward_loss(m, make_batch([cipher(x) for x in xs], "b", xs, "a"), False)
    out = bt_step(m, xs, "a", "b", 0.0)
    assert out.skipped == 0
    assert out.loss == pytest.approx(expected, rel=1e-12)
    # the trained direction sits near the copy-task optimum
    assert out.loss < 0.05


def test_generation_passes_register_no_backward(cipher_model):
    m = cipher_model.copy()
    xs = random_seqs(np.random.default_rng(11), 6)
    for step in (lambda: bt_step(m, xs, "a", "b", 0.01),
                 lambda: ct_step(m, xs, "a", [cipher(x) for x in xs], "c", "b", 0.01)):
        before = M.BACKWARD_CALLS["count"]
        step()
        assert M.BACKWARD_CALLS["count"] == before + 1


def test_empty_translations_are_skipped_and_tallied():
    m = init_model(ModelConfig(vocab_size=15, max_len=8, embed_dim=8, hidden_dim=16), ["a", "b"])
    m.params["out.b"][EOS] = 1e3
    frozen = m.copy()
    xs = random_seqs(np.random.default_rng(5), 7)
    out = bt_step(m, xs, "a", "b", 0.1)
    assert out.loss is None and out.skipped == 7
    out = ct_step(m, xs, "a", xs, "a", "b", 0.1)
    assert out.loss is None and out.skipped == 7
    assert all(np.array_equal(m.params[k], frozen.params[k]) for k in m.params)


def test_ct_with_source_pivot_is_mt(cipher_model):
    xs = random_seqs(np.random.default_rng(12), 5)
    refs = [cipher(x) for x in xs]
    m1, m2 = cipher_model.copy(), cipher_model.copy()
    out = ct_step(m1, xs, "a", refs, "b", "a", 0.05)
    assert out.loss == mt_step(m2, xs, "a", refs, "b", 0.05)
    assert all(np.array_equal(m1.params[k], m2.params[k]) for k in m1.params)


def test_unmt_epoch_sums_its_steps():
    cfg = ModelConfig(vocab_size=15, max_len=12, embed_dim=8, hidden_dim=16)
    m1 = init_model(cfg, ["a", "b"])
    m2 = m1.copy()
    rng = np.random.default_rng(6)
    mono_a, mono_b = random_seqs(rng, 10), random_seqs(rng, 7)
    noise = NoiseConfig()
    got = unmt_epoch(m1, mono_a, "a", mono_b, "b", noise, np.random.default_rng(0), 0.05, 4)

    r = np.random.default_rng(0)
    oa, ob = r.permutation(10), r.permutation(7)
    parts = []
    for k in range(3):
        ba = [mono_a[oa[(k * 4 + j) % 10]] for j in range(4)]
        bb = [mono_b[ob[(k * 4 + j) % 7]] for j in range(4)]
        parts.append(("AE", ae_step(m2, ba, "a", noise, r, 0.05)))
        parts.append(("AE", ae_step(m2, bb, "b", noise, r, 0.05)))
        for batch, x, y in ((ba, "a", "b"), (bb, "b", "a")):
            out = bt_step(m2, batch, x, y, 0.05)
            parts.append(("BT", out.loss or 0.0))
    assert got["AE"] == sum(v for t, v in parts if t == "AE")
    assert got["BT"] == sum(v for t, v in parts if t == "BT")
    assert got["total"] == got["AE"] + got["BT"]
    assert all(np.array_equal(m1.params[k], m2.params[k]) for k in m1.params)


# --------------------------------------------------------------------------
# cascade

def test_cascade_is_composition(cipher_model):
    xs = random_seqs(np.random.default_rng(13), 30)
    out = cascade_translate(cipher_model, cipher_model, xs, ("a", "b", "c"))
    mid = greedy_decode(cipher_model, xs, "a", "b", decode_limit(cipher_model, xs))
    assert out.intermediate == mid
    fed = [m or [4] for m in mid]
    assert out.output == greedy_decode(cipher_model, fed, "b", "c", decode_limit(cipher_model, fed))
    # the second hop copies, so the cascade is the first model alone
    same = sum(o == i for o, i in zip(out.output, out.intermediate))
    assert same >= 27
    with pytest.raises(ScheduleError):
        cascade_translate(cipher_model, cipher_model, xs, ("a", "c"))


# --------------------------------------------------------------------------
# training loop

def test_train_log_accounting_and_determinism(family):
    s = small_schedule("unsup_similar_ct")
    b = bindings_for(family, s)
    r1, r2 = train(s, b, TINY), train(s, b, TINY)
    assert r1.metrics_tsv() == r2.metrics_tsv()
    updates = [row for row in r1.log if not row.term.startswith("bleu:")]
    assert [row.step for row in updates] == list(range(1, r1.updates + 1))
    counts = Counter(row.term for row in updates)
    assert set(counts) <= {"MT", "AE", "BT", "CT"}
    assert sum(counts.values()) == r1.updates
    assert counts["MT"] == counts["AE"] == 2 * s.steps
    bleu_rows = [row for row in r1.log if row.term.startswith("bleu:")]
    assert [row.term for row in bleu_rows] == ["bleu:x>y", "bleu:y>x"] * 2
    assert all(0 <= row.value <= 100 for row in bleu_rows)
    assert np.isfinite([row.value for row in r1.log]).all()


def test_zero_weight_ct_reproduces_plain_schedule(family):
    plain = small_schedule("unsup_similar")
    muted = small_schedule("unsup_similar_ct", loss_weights={"CT": 0})
    b = bindings_for(family, plain)
    assert train(plain, b, TINY).metrics_tsv() == train(muted, b, TINY).metrics_tsv()


@pytest.mark.parametrize("arch", ["supervised_baseline", "unsupervised_baseline", "cascaded",
                                  "unsup_dissimilar", "unsup_dissimilar_ct"])
def test_every_architecture_trains(family, arch):
    s = small_schedule(arch, steps=1)
    result = train(s, bindings_for(family, s), TINY)
    assert result.updates > 0
    hyps = result.translate(list(family.test_set("x", "y").sources[:3]), "x", "y")
    assert len(hyps) == 3


def test_mlm_pretraining_is_logged(family):
    s = small_schedule("unsupervised_baseline", steps=1, mlm=MlmConfig(True, 0.15, 4))
    result = train(s, bindings_for(family, s), TINY)
    assert [row.term for row in result.log[:4]] == ["MLM"] * 4


def test_save_and_reload(family, tmp_path):
    s = small_schedule("cascaded", steps=1)
    result = train(s, bindings_for(family, s), TINY)
    result.save(tmp_path)
    again = load_result(tmp_path)
    src = list(family.test_set("x", "y").sources[:5])
    assert again.translate(src, "x", "y") == result.translate(src, "x", "y")
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert diag["updates"] == result.updates


def test_schedule_json_round_trip():
    s = small_schedule("unsup_similar_ct", noise=NoiseConfig(0.2, 2), clip_norm=5.0)
    assert schedule_from_json(json.loads(json.dumps(schedule_to_json(s)))) == s
    file_form = {"architecture": "unsup_similar", "languages": {"focal": ["x", "y"],
                 "references": ["r"]}, "corpora": {}, "steps": 5}
    assert schedule_from_json(file_form).references == ("r",)
    with pytest.raises(ScheduleError):
        schedule_from_json({"architecture": "unsup_similar", "focal": ["x", "y"], "bogus": 1})
