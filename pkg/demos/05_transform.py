"""Substitute controlled items consistently across sentence and logical form.

Two modes: sampled character sequences (subword-tokenized downstream) or
numbered sentinel tokens that a harness adds to its vocabulary. The same
replacement string serves the sentence token and the LF lemma, and the
transform inverts back to the original bytes.
"""

from lexcontrol import (
    SamplerConfig,
    apply_plan,
    build_plan,
    emit_manifest,
    infer_controlled_items,
    invert_plan,
    serialize_split_file,
)
from lexcontrol.synthcogs import SMALL_SPEC, build_corpus
from lexcontrol.transform import dataset_vocabulary

corpus = build_corpus(SMALL_SPEC)
items = infer_controlled_items(corpus["train"], corpus["gen"])
hedgehog_row = next(
    r for r in corpus["train"].rows if "hedgehog" in r.source
)
print("original :", hedgehog_row.source)

# Character-sequence mode, blocklisted against the whole dataset vocabulary.
cfg = SamplerConfig(
    length_bucket="shorter", distribution="cvcv", seed=8,
    count=len(items), blocklist=frozenset(dataset_vocabulary(corpus.values())),
)
charseq_plan = build_plan(items, "charseq", sampler_config=cfg)
t_train = apply_plan(corpus["train"], charseq_plan)
row = next(r for r in t_train.rows if r.category == hedgehog_row.category and "touched" in r.source and "bottle" in r.source)
print("charseq  :", row.source)
print("          ", row.target)

# Sentinel mode plus the tokenizer add-order manifest.
sentinel_plan = build_plan(items, "sentinel")
s_train = apply_plan(corpus["train"], sentinel_plan)
row = next(r for r in s_train.rows if "[w" in r.source and "bottle" in r.source)
print("sentinel :", row.source)

manifest = emit_manifest(sentinel_plan, "random")
print("\nfirst manifest lines (whitespace-prepended variant first):")
for line in manifest.serialize().splitlines()[:4]:
    print("  ", line)

# Round trip back to the original bytes.
restored = invert_plan(s_train, sentinel_plan)
assert serialize_split_file(restored) == serialize_split_file(corpus["train"])
print("\ninversion: byte-identical")
