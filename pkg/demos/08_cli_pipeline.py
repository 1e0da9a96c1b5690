"""The whole pipeline through the command-line interface.

Stages talk to each other only through files, so any of them can be swapped
for another implementation (in particular, the finetuning harness only needs
the transformed TSVs, the plan, and the vocabulary manifest).
"""

import json
import tempfile
from pathlib import Path

from lexcontrol.cli import main
from lexcontrol.cogs import load_split
from lexcontrol.synthcogs import SMALL_SPEC, build_corpus, write_corpus

work = Path(tempfile.mkdtemp(prefix="lexcontrol-demo-"))
data = work / "data"
write_corpus(build_corpus(SMALL_SPEC), data)
print("workspace:", work)


def run(*argv):
    print("\n$ lexcontrol", " ".join(argv))
    rc = main(list(argv))
    assert rc == 0, rc


run("infer", "--train", str(data / "train.tsv"), "--gen", str(data / "gen.tsv"),
    "--out-dir", str(work / "items"))

run("sample", "--length", "shorter", "--dist", "cvcv", "--seed", "7", "--count", "21",
    "--out", str(work / "candidates.txt"))

(work / "corpus").mkdir()
(work / "corpus" / "shard0.txt").write_text("just some pretraining text, nothing sampled")
run("scan", "--patterns", str(work / "candidates.txt"), "--corpus", str(work / "corpus"),
    "--report", str(work / "scan.json"))

run("transform", "--train", str(data / "train.tsv"), "--gen", str(data / "gen.tsv"),
    "--mode", "sentinel", "--out-dir", str(work / "transformed"))

run("testlex", "--train", str(data / "train.tsv"), "--gen", str(data / "gen.tsv"),
    "--total", "42", "--out-dir", str(work / "testlex"))

# Fake a perfect model over the transformed gen split, then score it.
gen = load_split(work / "transformed" / "gen.tsv", "gen")
preds = work / "preds_gen.txt"
preds.write_text("".join(r.target + "\n" for r in gen.rows))
run("evaluate", "--split", "gen", str(work / "transformed" / "gen.tsv"), str(preds),
    "--plan", str(work / "transformed" / "plan.json"),
    "--out", str(work / "eval_seed0.json"))

run("report", "--group", f"perfect={work / 'eval_seed0.json'}")

manifest = json.loads((work / "transformed" / "run_manifest.json").read_text())
print("\nrun manifest artifacts:")
for a in manifest["artifacts"]:
    print("  ", a["path"], a["sha256"][:12])
