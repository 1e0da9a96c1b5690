"""Find the context-controlled lexical items of a dataset.

An item qualifies when it occurs in exactly one training row (at the
sentence level) and reappears in the generalization split. The exposure
profile records the context class: thematic roles, definiteness for nouns,
the ordered role frame for verbs.
"""

from lexcontrol import infer_controlled_items
from lexcontrol.synthcogs import SMALL_SPEC, build_corpus

corpus = build_corpus(SMALL_SPEC)
items = infer_controlled_items(corpus["train"], corpus["gen"])

print(f"{len(items)} controlled items\n")
print(f"{'lemma':<12} {'surface':<12} exposure context")
for it in items:
    print(f"{it.lemma:<12} {','.join(it.surface_forms):<12} {it.exposure_role.describe()}")

# The exposure example itself:
hedgehog = next(it for it in items if it.lemma == "hedgehog")
row = corpus["train"].rows[hedgehog.exposure_rows[0]]
print("\nexposure example for 'hedgehog':")
print("  ", row.source)
print("  ", row.target)
