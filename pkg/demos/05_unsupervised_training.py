"""
Unsupervised translation between two related languages
======================================================

Two related synthetic languages written in different scripts are trained
with denoising and on-the-fly back-translation only, once with both
sides romanized into one alphabet and once in their native scripts.
Takes under a minute on one CPU.
"""

from unmtlab.experiments import ScriptMapper, bindings_for
from unmtlab.metrics import evaluate
from unmtlab.model import ModelConfig
from unmtlab.schedules import TrainSchedule, train
from unmtlab.synthlang import FamilyMember, SynthSpec, build_family

state = build_family(SynthSpec(corpus_size=3000, seed=0),
                     [FamilyMember("rel", "related", script=1, substitution_strength=0.5)],
                     base_name="syn")
schedule = TrainSchedule("unsupervised_baseline", ("syn", "rel"), steps=300)
config = ModelConfig(vocab_size=16, dtype="float32")   # vocab size is reset from the data
test = state.test_set("syn", "rel")

for unified in (True, False):
    mapper = ScriptMapper(state, unified)
    result = train(schedule, bindings_for(schedule, state, mapper, 0), config)
    sources = mapper.to_latin("syn", test.sources)
    hyps = mapper.to_native("rel", result.translate(sources, "syn", "rel"))
    report = evaluate(hyps, test.targets)
    print(f"unified={unified}: syn>rel {report.tsv()}  ({result.updates} updates)")

# The metrics log has one row per update plus periodic validation BLEU.
print(result.metrics_tsv().splitlines()[:4])
