"""
Architectures that add a reference language
============================================

Each architecture is a fixed cycle of loss terms.  The similar and
dissimilar variants share one model; the cascade chains two.  Cross
translation adds a pivot through the focal language.
"""

from unmtlab.experiments import ScriptMapper, bindings_for
from unmtlab.model import ModelConfig
from unmtlab.schedules import ARCHITECTURES, TrainSchedule, active_tasks, train
from unmtlab.synthlang import FamilyMember, SynthSpec, build_family

for arch in ARCHITECTURES:
    refs = () if arch.endswith("baseline") else ("ref",)
    schedule = TrainSchedule(arch, ("x", "en"), refs)
    print(f"{arch:22s}", " ".join(t.key for t in active_tasks(schedule)))

# A short cascaded run: supervised ref<->en plus unsupervised x<->ref,
# translating x -> ref -> en at test time.  Sixty rounds only shows the
# plumbing; the output is still noise at this budget.
state = build_family(SynthSpec(corpus_size=1000, seed=1),
                     [FamilyMember("ref", "related", 1, 0.3),
                      FamilyMember("en", "distant", "latin")], base_name="x")
schedule = TrainSchedule("cascaded", ("x", "en"), ("ref",), steps=60, validate_every=0)
mapper = ScriptMapper(state, unified=True)
result = train(schedule, bindings_for(schedule, state, mapper, 1000),
               ModelConfig(vocab_size=16, dtype="float32"))
print(sorted(result.models), result.updates, "updates")
src = mapper.to_latin("x", state.test_set("x", "en").sources[:3])
for s, h in zip(src, result.translate(src, "x", "en")):
    print(" ".join(s), "->", " ".join(h))
