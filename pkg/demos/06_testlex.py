"""Generate the Test-Lex diagnostic split.

Each controlled item is re-used in fresh in-distribution sentences of its
exposure context class, by swapping it into training rows that contain a
slot of the same profile. The audit checks counts, role fidelity, training
overlap, and parseability.
"""

from lexcontrol import TestLexConfig, generate_test_lex, infer_controlled_items, validate_test_lex
from lexcontrol.synthcogs import SMALL_SPEC, build_corpus

corpus = build_corpus(SMALL_SPEC)
items = infer_controlled_items(corpus["train"], corpus["gen"])

split = generate_test_lex(corpus["train"], items, TestLexConfig(total=63, seed=0))
print(f"{len(split)} rows over {len(items)} items\n")

for row in split.rows[:3]:
    print(row.source)
    print("  ", row.target)

report = validate_test_lex(split, corpus["train"], items)
print("\naudit ok:", report.ok)
sample = report.items["hedgehog"]
print(
    f"hedgehog: count={sample.count} role_matches={sample.role_matches} "
    f"train_overlap={sample.train_overlap} parse_failures={sample.parse_failures}"
)
