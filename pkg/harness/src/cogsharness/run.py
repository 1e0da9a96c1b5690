"""Finetune the toy model on a transformed dataset directory and emit predictions.

Reads the directory written by the transform stage (train/gen/test/testlex
TSVs, plan.json, and vocab_manifest.txt in sentinel mode), expands the
tokenizer in manifest order, trains until the exposure examples are learned
perfectly (that is the precondition for interpreting any generalization
number), and writes one prediction file per requested split plus a metadata
JSON with the seed, step count, and exposure accuracy.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn

from .data import Manifest, Row, read_manifest, read_plan, read_split, replacements_from_plan
from .model import TinySeq2Seq, init_added_embeddings
from .tokenizer import EOS, PAD, MarkerTokenizer


@dataclass
class HarnessConfig:
    seed: int = 0
    init_scheme: str | None = None  # default: the manifest's scheme
    max_steps: int = 4000
    min_steps: int = 200
    batch_size: int = 32
    lr: float = 3e-4
    eval_every: int = 100
    max_train_rows: int = 160
    exposure_oversample: int = 4
    decode_max_len: int = 120
    predict_splits: tuple[str, ...] = ("gen", "test", "testlex")


def expand_vocabulary(tokenizer: MarkerTokenizer, manifest: Manifest) -> list[int]:
    """Add the manifest tokens in order; returns the new ids."""
    return [tokenizer.add_token(tok) for tok in manifest.add_order]


def _pad_batch(seqs: list[list[int]], device) -> torch.Tensor:
    width = max(len(s) for s in seqs)
    out = torch.full((len(seqs), width), PAD, dtype=torch.long, device=device)
    for i, s in enumerate(seqs):
        out[i, : len(s)] = torch.tensor(s, dtype=torch.long, device=device)
    return out


def _decode_batch(model, tokenizer, sources: list[list[int]], batch_size: int,
                  max_len: int) -> list[str]:
    texts: list[str] = []
    for i in range(0, len(sources), batch_size):
        src = _pad_batch(sources[i : i + batch_size], "cpu")
        out = model.greedy_decode(src, max_len=max_len)
        for row in out:
            ids = [int(t) for t in row if int(t) not in (PAD,)]
            if EOS in ids:
                ids = ids[: ids.index(EOS)]
            texts.append(tokenizer.decode(ids))
    return texts


def finetune_and_predict(dataset_dir, out_dir, config: HarnessConfig = HarnessConfig()) -> dict:
    data_dir = Path(dataset_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    train_rows = read_split(data_dir / "train.tsv")
    plan = read_plan(data_dir / "plan.json")
    replacements = replacements_from_plan(plan)
    manifest_path = data_dir / "vocab_manifest.txt"
    manifest = read_manifest(manifest_path) if manifest_path.exists() else None

    predict_rows: dict[str, list[Row]] = {}
    for name in config.predict_splits:
        path = data_dir / f"{name}.tsv"
        if path.exists():
            predict_rows[name] = read_split(path)

    # Base vocabulary from every text the model will see; sentinel tokens are
    # excluded from the word pieces so they can be added in manifest order.
    texts: list[str] = []
    for rows in [train_rows, *predict_rows.values()]:
        for row in rows:
            texts.append(row.source)
            texts.append(row.target)
    exclude = set(tok.strip() for tok in (manifest.add_order if manifest else []))
    if exclude:
        cleaned = []
        for text in texts:
            cleaned.append(" ".join(w for w in text.split(" ") if w not in exclude))
            # keep the raw text too so the characters stay covered
        char_cover = ["".join(sorted({c for t in exclude for c in t if c != " "}))]
        texts = cleaned + char_cover
    tokenizer = MarkerTokenizer.train(texts, reserve_unused=max(8, len(replacements)))

    added_ids: list[int] = []
    scheme = config.init_scheme
    if manifest is not None:
        added_ids = expand_vocabulary(tokenizer, manifest)
        scheme = scheme or manifest.init_scheme

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    model = TinySeq2Seq(vocab_size=tokenizer.vocab_size)
    init_info: dict = {"scheme": None}
    if added_ids:
        gen = torch.Generator().manual_seed(config.seed)
        init_info = init_added_embeddings(
            model, added_ids, tokenizer.unused_ids, scheme or "random", gen
        )

    # Exposure examples: the training rows that carry a replacement token.
    exposure_idx = [
        i for i, row in enumerate(train_rows)
        if any(rep in row.source.split(" ") for rep in replacements)
    ]
    keep = list(exposure_idx)
    for i in range(len(train_rows)):
        if len(keep) >= max(config.max_train_rows, len(exposure_idx)):
            break
        if i not in set(exposure_idx):
            keep.append(i)
    rows = [train_rows[i] for i in keep]
    weights = [config.exposure_oversample if i in set(exposure_idx) else 1 for i in keep]

    encoded = [
        (tokenizer.encode(r.source) + [EOS], tokenizer.encode(r.target) + [EOS])
        for r in rows
    ]
    pool: list[int] = [i for i, w in enumerate(weights) for _ in range(w)]
    exposure_src = [tokenizer.encode(train_rows[i].source) + [EOS] for i in exposure_idx]
    exposure_tgt = [train_rows[i].target for i in exposure_idx]

    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    criterion = nn.CrossEntropyLoss(ignore_index=PAD)

    def exposure_accuracy() -> float:
        if not exposure_idx:
            return 1.0
        decoded = _decode_batch(
            model, tokenizer, exposure_src, config.batch_size, config.decode_max_len
        )
        return sum(d == t for d, t in zip(decoded, exposure_tgt)) / len(exposure_tgt)

    step = 0
    exp_acc = 0.0
    while step < config.max_steps:
        model.train()
        batch_idx = rng.choice(len(pool), size=min(config.batch_size, len(pool)), replace=True)
        batch = [encoded[pool[int(i)]] for i in batch_idx]
        src = _pad_batch([s for s, _ in batch], "cpu")
        tgt = _pad_batch([t for _, t in batch], "cpu")
        tgt_in = torch.cat(
            [torch.full((tgt.shape[0], 1), EOS, dtype=torch.long), tgt[:, :-1]], dim=1
        )
        logits = model(src, tgt_in)
        loss = criterion(logits.reshape(-1, logits.shape[-1]), tgt.reshape(-1))
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        step += 1
        if step % config.eval_every == 0 and step >= config.min_steps:
            exp_acc = exposure_accuracy()
            if exp_acc == 1.0:
                break
    if exp_acc < 1.0:
        exp_acc = exposure_accuracy()

    metadata = {
        "seed": config.seed,
        "steps": step,
        "exposure_accuracy": exp_acc,
        "init": init_info,
        "mode": plan.get("mode"),
        "n_train_rows": len(rows),
        "vocab_size": tokenizer.vocab_size,
    }
    if exp_acc < 1.0:
        metadata["warning"] = (
            "exposure examples not perfectly learned; generalization numbers "
            "from this run are not interpretable"
        )

    for name, rows_out in predict_rows.items():
        sources = [tokenizer.encode(r.source) + [EOS] for r in rows_out]
        preds = _decode_batch(model, tokenizer, sources, config.batch_size,
                              config.decode_max_len)
        pred_path = out / f"{name}.pred.txt"
        pred_path.write_text("".join(p + "\n" for p in preds), encoding="utf-8")
        Path(str(pred_path) + ".meta.json").write_text(
            json.dumps({**metadata, "split": name}, indent=2), encoding="utf-8"
        )
    (out / "metadata.json").write_text(json.dumps(metadata, indent=2), encoding="utf-8")
    return metadata


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Toy finetune over a transformed dataset.")
    parser.add_argument("--data", required=True, help="transformed dataset directory")
    parser.add_argument("--out", required=True, help="prediction output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--init-scheme",
                        choices=["random", "avgWithNoise", "unusedEmbeddings"])
    parser.add_argument("--max-steps", type=int, default=4000)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--lr", type=float, default=3e-4)
    parser.add_argument("--max-train-rows", type=int, default=160)
    parser.add_argument("--splits", default="gen,test,testlex")
    args = parser.parse_args(argv)
    config = HarnessConfig(
        seed=args.seed,
        init_scheme=args.init_scheme,
        max_steps=args.max_steps,
        batch_size=args.batch_size,
        lr=args.lr,
        max_train_rows=args.max_train_rows,
        predict_splits=tuple(s for s in args.splits.split(",") if s),
    )
    metadata = finetune_and_predict(args.data, args.out, config)
    print(json.dumps(metadata, indent=2))
    return 0 if "warning" not in metadata else 1


if __name__ == "__main__":
    raise SystemExit(main())
