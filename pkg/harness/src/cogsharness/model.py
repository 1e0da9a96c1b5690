"""Tiny from-scratch transformer seq2seq for desk-scale finetunes.

Two encoder and two decoder layers; the decoder starts from the end-of-
sequence token and decodes greedily. New-token embedding rows support three initialization
schemes: fresh random normal rows, the mean of the base embedding table
plus small noise, or reuse of reserved never-trained rows.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .tokenizer import EOS, PAD


class TinySeq2Seq(nn.Module):
    def __init__(self, vocab_size: int, d_model: int = 128, nhead: int = 4,
                 layers: int = 2, ff: int = 256, max_len: int = 192):
        super().__init__()
        self.d_model = d_model
        self.max_len = max_len
        self.embed = nn.Embedding(vocab_size, d_model, padding_idx=PAD)
        self.pos = nn.Embedding(max_len, d_model)
        self.transformer = nn.Transformer(
            d_model=d_model,
            nhead=nhead,
            num_encoder_layers=layers,
            num_decoder_layers=layers,
            dim_feedforward=ff,
            dropout=0.1,
            batch_first=True,
        )
        self.out = nn.Linear(d_model, vocab_size)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        return self.embed(ids) + self.pos(positions)[None, :, :]

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        n = tgt_in.shape[1]
        causal = torch.triu(
            torch.ones(n, n, dtype=torch.bool, device=src.device), diagonal=1
        )
        hidden = self.transformer(
            self._embed(src),
            self._embed(tgt_in),
            tgt_mask=causal,
            src_key_padding_mask=src == PAD,
            tgt_key_padding_mask=tgt_in == PAD,
            memory_key_padding_mask=src == PAD,
        )
        return self.out(hidden)

    @torch.no_grad()
    def greedy_decode(self, src: torch.Tensor, max_len: int = 128) -> torch.Tensor:
        """Decode from the EOS start token until every row emits EOS again."""
        self.eval()
        batch = src.shape[0]
        device = src.device
        tgt = torch.full((batch, 1), EOS, dtype=torch.long, device=device)
        finished = torch.zeros(batch, dtype=torch.bool, device=device)
        for _ in range(max_len - 1):
            logits = self.forward(src, tgt)
            step = logits[:, -1, :].argmax(dim=-1)
            step = torch.where(finished, torch.full_like(step, PAD), step)
            tgt = torch.cat([tgt, step[:, None]], dim=1)
            finished |= step == EOS
            if bool(finished.all()):
                break
        return tgt[:, 1:]


def init_added_embeddings(model: TinySeq2Seq, added_ids: list[int],
                          reserved_ids: list[int], scheme: str,
                          generator: torch.Generator) -> dict:
    """Initialize the rows for newly added tokens; returns metadata."""
    weight = model.embed.weight
    n_base = min(added_ids) if added_ids else weight.shape[0]
    info: dict = {"scheme": scheme}
    with torch.no_grad():
        if scheme == "random":
            rows = torch.randn(len(added_ids), weight.shape[1], generator=generator)
            weight[added_ids] = rows * weight[:n_base].std()
        elif scheme == "avgWithNoise":
            base_mean = weight[:n_base].mean(dim=0)
            noise_std = float(weight[:n_base].std()) * 0.1
            info["noise_std"] = noise_std
            noise = torch.randn(len(added_ids), weight.shape[1], generator=generator)
            weight[added_ids] = base_mean[None, :] + noise * noise_std
        elif scheme == "unusedEmbeddings":
            # Reuse reserved rows that no input ever produces. In a model
            # trained from scratch these are simply never-trained rows.
            if len(reserved_ids) < len(added_ids):
                raise ValueError(
                    f"{len(added_ids)} added tokens but only "
                    f"{len(reserved_ids)} reserved rows"
                )
            src = reserved_ids[: len(added_ids)]
            info["reused_rows"] = list(src)
            weight[added_ids] = weight[src].clone()
        else:
            raise ValueError(f"unknown init scheme {scheme!r}")
    return info
