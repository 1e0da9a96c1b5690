"""Score predictions and run the downstream analyses.

Simulates a model that gets a controlled fraction of rows right, scores it
per split and category, aggregates over seeds with the std-suppression
rendering rule, and correlates accuracy against a pretraining-size sweep
(the inverse-scaling style of analysis).
"""

import numpy as np

from lexcontrol import (
    EvalReport,
    PredictionFile,
    aggregate_seeds,
    build_plan,
    evaluate_split,
    infer_controlled_items,
    overestimation,
    pearson,
    spearman,
    test_lex_gap,
)
from lexcontrol.evaluate import render_table
from lexcontrol.synthcogs import SMALL_SPEC, build_corpus


def simulate(ref, plan, accuracy, rng):
    """Predictions that hit the target at the given rate, novel tokens intact."""
    rows = []
    for row in ref.rows:
        if rng.random() < accuracy:
            rows.append(row.target)
        else:
            rows.append(row.target.replace("x _ 1", "x _ 0") + " AND broken ( x _ 9 )")
    return PredictionFile(rows=rows, metadata={"seed": int(rng.integers(1 << 30))})


corpus = build_corpus(SMALL_SPEC)
items = infer_controlled_items(corpus["train"], corpus["gen"])
plan = build_plan(items, "sentinel")

from lexcontrol import apply_plan

gen = apply_plan(corpus["gen"], plan)
test = corpus["test"]

reports = []
for seed in range(5):
    rng = np.random.default_rng(seed)
    rep = EvalReport()
    rep.add(evaluate_split(simulate(gen, plan, 0.64, rng), gen, plan=plan))
    rep.add(evaluate_split(simulate(test, plan, 0.99, rng), test, plan=plan))
    reports.append(rep)

agg = aggregate_seeds(reports)
print(render_table([("shorter-cvcv (simulated)", agg)]))

gen_acc = agg.metrics["gen/accuracy"].mean
print("\noverestimation vs a 0.833 baseline:", f"{overestimation(0.833, gen_acc):.3f}")
print("novel-token rate:", f"{agg.metrics['gen/novel_token_rate'].mean:.3f}")
print("test-lex gap example:", f"{test_lex_gap(0.902, 0.874):.3f}")

# Pretraining-size sweep: accuracy against token counts (symmetric-log style).
tokens = [0, 1e6, 5e6, 25e6, 50e6, 100e6, 1e9, 1e12]
accuracy = [0.749, 0.678, 0.602, 0.538, 0.516, 0.787, 0.722, 0.279]
rho, rho_p = spearman(tokens, accuracy)
r, r_p = pearson(tokens, accuracy)
print(f"\nsweep: spearman rho={rho:.2f} (p={rho_p:.2f}), pearson r={r:.2f} (p={r_p:.2f})")
