"""Readers for the dataset-directory interface.

The harness consumes exactly what the transform stage writes: 3-column TSV
splits, ``plan.json`` with the replacement strings, and, in sentinel mode,
``vocab_manifest.txt`` whose ADD lines give the tokenizer add order with
leading whitespace encoded as the literal escape ``\\u2581``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

_SPACE_ESCAPE = "\\u2581"


@dataclass
class Row:
    source: str
    target: str
    category: str


def read_split(path) -> list[Row]:
    rows: list[Row] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        rows.append(Row(*fields))
    return rows


@dataclass
class Manifest:
    add_order: list[str]
    init_scheme: str
    strategy: str = "both-variants"


def read_manifest(path) -> Manifest:
    adds: list[str] = []
    scheme = ""
    strategy = "both-variants"
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        kind, _, value = line.partition("\t")
        if kind == "ADD":
            adds.append(value.replace(_SPACE_ESCAPE, " "))
        elif kind == "INIT":
            scheme = value
        elif kind == "STRATEGY":
            strategy = value
        elif kind != "NOTE":
            raise ValueError(f"unknown manifest record {kind!r}")
    if not scheme:
        raise ValueError("manifest has no INIT record")
    return Manifest(add_order=adds, init_scheme=scheme, strategy=strategy)


def read_plan(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def replacements_from_plan(plan: dict) -> list[str]:
    return [entry["replacement"] for entry in plan["entries"]]
