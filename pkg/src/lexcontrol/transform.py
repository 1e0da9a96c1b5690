"""Consistent lexical substitution across splits.

A substitution plan maps each controlled item to a single replacement string:
either a sampled character sequence or a numbered sentinel token such as
``[w0]``. Application rewrites both the sentence (whole-token matches only,
with sentence-final punctuation detached) and the logical form (predicate
lemmas and proper-name constants). Inversion restores the original bytes.

For sentinel plans, a vocabulary manifest records the tokenizer add-order:
for every sentinel the whitespace-prepended variant precedes the bare one.
The serialized form encodes the leading space as the literal escape
``\\u2581`` so the file survives whitespace-mangling diffs.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass

from .cogs import (
    Atom,
    Example,
    LogicalForm,
    ProperName,
    SplitFile,
    parse_lf,
    print_lf,
    source_tokens,
    strip_final_punct,
)
from .errors import ConsistencyError, PlanError
from .lexicon import ControlledItem, ExposureProfile
from .sampler import SamplerConfig, sample_sequences

__all__ = [
    "PlanEntry",
    "SubstitutionPlan",
    "VocabularyManifest",
    "INIT_SCHEMES",
    "build_plan",
    "apply_plan",
    "invert_plan",
    "emit_manifest",
    "dataset_vocabulary",
    "count_whole_token_occurrences",
]

INIT_SCHEMES = ("random", "avgWithNoise", "unusedEmbeddings")

# A replacement must survive the LF lexer as a single token.
_REPLACEMENT_SHAPE = re.compile(r"^(?:[A-Za-z0-9_]+|\[[A-Za-z0-9_]+\]|<[A-Za-z0-9_]+>)$")


@dataclass(frozen=True)
class PlanEntry:
    item: ControlledItem
    replacement: str


@dataclass
class SubstitutionPlan:
    mode: str  # "charseq" | "sentinel"
    entries: tuple[PlanEntry, ...]
    sentinel_template: str = "[w{n}]"
    sampler_config: SamplerConfig | None = None
    add_strategy: str = "both-variants"  # or "prepended-in-data"

    def replacements(self) -> list[str]:
        return [e.replacement for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "sentinel_template": self.sentinel_template,
            "add_strategy": self.add_strategy,
            "sampler_config": None
            if self.sampler_config is None
            else {
                "length_bucket": self.sampler_config.length_bucket,
                "distribution": self.sampler_config.distribution,
                "seed": self.sampler_config.seed,
                "count": self.sampler_config.count,
            },
            "entries": [
                {
                    "lemma": e.item.lemma,
                    "surface_forms": list(e.item.surface_forms),
                    "exposure_rows": list(e.item.exposure_rows),
                    "exposure_role": e.item.exposure_role.describe(),
                    "replacement": e.replacement,
                }
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "SubstitutionPlan":
        entries = tuple(
            PlanEntry(
                item=ControlledItem(
                    lemma=e["lemma"],
                    surface_forms=tuple(e["surface_forms"]),
                    exposure_rows=tuple(e["exposure_rows"]),
                    exposure_role=ExposureProfile(kind="unknown"),
                ),
                replacement=e["replacement"],
            )
            for e in d["entries"]
        )
        cfg = d.get("sampler_config")
        sampler_config = (
            SamplerConfig(
                length_bucket=cfg["length_bucket"],
                distribution=cfg["distribution"],
                seed=cfg["seed"],
                count=cfg["count"],
            )
            if cfg
            else None
        )
        return cls(
            mode=d["mode"],
            entries=entries,
            sentinel_template=d.get("sentinel_template", "[w{n}]"),
            sampler_config=sampler_config,
            add_strategy=d.get("add_strategy", "both-variants"),
        )

    @classmethod
    def from_json(cls, text: str) -> "SubstitutionPlan":
        return cls.from_dict(json.loads(text))


def build_plan(
    items: list[ControlledItem],
    mode: str,
    sampler_config: SamplerConfig | None = None,
    sentinel_template: str = "[w{n}]",
) -> SubstitutionPlan:
    """One replacement per item; sentinels are numbered in lemma sort order."""
    if not items:
        raise PlanError("cannot build a plan for zero items")
    lemmas = [it.lemma for it in items]
    if len(set(lemmas)) != len(lemmas):
        dupes = sorted({l for l in lemmas if lemmas.count(l) > 1})
        raise PlanError(f"duplicate lemmas in items: {dupes}")
    ordered = sorted(items, key=lambda it: it.lemma)

    if mode == "sentinel":
        if "{n}" not in sentinel_template:
            raise PlanError("sentinel template must contain '{n}'")
        replacements = [sentinel_template.format(n=i) for i in range(len(ordered))]
    elif mode == "charseq":
        if sampler_config is None:
            raise PlanError("charseq mode requires a sampler config")
        sampler_config = dataclasses.replace(sampler_config, count=len(ordered))
        replacements = sample_sequences(sampler_config)
    else:
        raise PlanError(f"unknown mode {mode!r}")

    for r in replacements:
        if not _REPLACEMENT_SHAPE.match(r):
            raise PlanError(f"replacement {r!r} would not tokenize as a single unit")
    if len(set(replacements)) != len(replacements):
        raise PlanError("replacements are not pairwise distinct")

    return SubstitutionPlan(
        mode=mode,
        entries=tuple(PlanEntry(it, r) for it, r in zip(ordered, replacements)),
        sentinel_template=sentinel_template,
        sampler_config=sampler_config,
    )


# ---------------------------------------------------------------------------
# Application


def _rewrite_source(source: str, token_map: dict[str, str]) -> tuple[str, set[str]]:
    """Whole-token replacement; returns the new source and tokens replaced."""
    out: list[str] = []
    hit: set[str] = set()
    for token in source_tokens(source):
        word, punct = strip_final_punct(token)
        if word in token_map:
            hit.add(word)
            out.append(token_map[word] + punct)
        else:
            out.append(token)
    return " ".join(out), hit


def _rewrite_lf(lf: LogicalForm, lemma_map: dict[str, str]) -> tuple[LogicalForm, set[str]]:
    hit: set[str] = set()

    def sub_lemma(lemma: str) -> str:
        if lemma in lemma_map:
            hit.add(lemma)
            return lemma_map[lemma]
        return lemma

    def sub_term(term):
        if isinstance(term, ProperName) and term.name in lemma_map:
            hit.add(term.name)
            return ProperName(lemma_map[term.name])
        return term

    definites = tuple((sub_lemma(l), sub_term(t)) for l, t in lf.definites)
    atoms = tuple(
        Atom(sub_lemma(a.lemma), a.role_path, tuple(sub_term(t) for t in a.args))
        for a in lf.atoms
    )
    bare = lf.bare_name
    if bare is not None and bare in lemma_map:
        hit.add(bare)
        bare = lemma_map[bare]
    return LogicalForm(lf.lambdas, definites, atoms, bare), hit


def _apply_maps(
    split: SplitFile,
    token_map: dict[str, str],
    lemma_map: dict[str, str],
    pair_of: dict[str, str],
    direction: str,
) -> SplitFile:
    """Shared engine for apply/invert; ``pair_of`` links sentence and LF keys."""
    quick = [k for k in set(token_map) | set(lemma_map)]
    new_rows: list[Example] = []
    for idx, row in enumerate(split.rows):
        if not any(k in row.source or k in row.target for k in quick):
            new_rows.append(row)
            continue
        new_source, sentence_hits = _rewrite_source(row.source, token_map)
        lf, lf_hits = _rewrite_lf(parse_lf(row.target), lemma_map)
        # A sentence hit for item X must be matched by an LF hit for X.
        sentence_keys = {pair_of[t] for t in sentence_hits}
        lf_keys = {pair_of[l] for l in lf_hits}
        if sentence_keys != lf_keys:
            only_sentence = sorted(sentence_keys - lf_keys)
            only_lf = sorted(lf_keys - sentence_keys)
            raise ConsistencyError(
                f"{direction}: row {idx + 1} ({row.source!r}): sentence/logical-form "
                f"mismatch (sentence-only: {only_sentence}, lf-only: {only_lf})"
            )
        if not sentence_keys:
            new_rows.append(row)
            continue
        new_rows.append(
            Example(new_source, print_lf(lf, split.lf_style), row.category)
        )
    return split.with_rows(new_rows)


def apply_plan(split: SplitFile, plan: SubstitutionPlan) -> SplitFile:
    """Substitute every controlled item; untouched rows stay byte-identical."""
    token_map: dict[str, str] = {}
    lemma_map: dict[str, str] = {}
    pair_of: dict[str, str] = {}
    for entry in plan.entries:
        for surface in entry.item.surface_forms:
            token_map[surface] = entry.replacement
            pair_of[surface] = entry.item.lemma
        lemma_map[entry.item.lemma] = entry.replacement
        pair_of[entry.item.lemma] = entry.item.lemma
    return _apply_maps(split, token_map, lemma_map, pair_of, "apply")


def invert_plan(split: SplitFile, plan: SubstitutionPlan) -> SplitFile:
    """Inverse of :func:`apply_plan`; requires single-surface items."""
    token_map: dict[str, str] = {}
    lemma_map: dict[str, str] = {}
    pair_of: dict[str, str] = {}
    for entry in plan.entries:
        if len(entry.item.surface_forms) != 1:
            raise PlanError(
                f"item {entry.item.lemma!r} has {len(entry.item.surface_forms)} surface "
                "forms; inversion is ambiguous"
            )
        token_map[entry.replacement] = entry.item.surface_forms[0]
        lemma_map[entry.replacement] = entry.item.lemma
        pair_of[entry.replacement] = entry.item.lemma
    return _apply_maps(split, token_map, lemma_map, pair_of, "invert")


# ---------------------------------------------------------------------------
# Vocabulary manifest (sentinel mode)

_SPACE_ESCAPE = "\\u2581"


@dataclass
class VocabularyManifest:
    """Tokenizer add-order: whitespace-prepended variant first, then bare."""

    tokens: tuple[tuple[str, str], ...]
    init_scheme: str
    add_strategy: str = "both-variants"
    notes: str = ""

    def add_order(self) -> list[str]:
        out: list[str] = []
        for prepended, bare in self.tokens:
            out.append(prepended)
            out.append(bare)
        return out

    def serialize(self) -> str:
        lines = [f"ADD\t{tok.replace(' ', _SPACE_ESCAPE)}" for tok in self.add_order()]
        lines.append(f"INIT\t{self.init_scheme}")
        lines.append(f"STRATEGY\t{self.add_strategy}")
        if self.notes:
            lines.append(f"NOTE\t{self.notes}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "VocabularyManifest":
        adds: list[str] = []
        scheme = ""
        strategy = "both-variants"
        notes = ""
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            kind, _, value = line.partition("\t")
            if kind == "ADD":
                adds.append(value.replace(_SPACE_ESCAPE, " "))
            elif kind == "INIT":
                scheme = value
            elif kind == "STRATEGY":
                strategy = value
            elif kind == "NOTE":
                notes = value
            else:
                raise PlanError(f"manifest line {lineno}: unknown record {kind!r}")
        if not scheme:
            raise PlanError("manifest has no INIT record")
        if len(adds) % 2 != 0:
            raise PlanError("manifest ADD records are not paired")
        pairs = tuple((adds[i], adds[i + 1]) for i in range(0, len(adds), 2))
        for prepended, bare in pairs:
            if prepended != " " + bare:
                raise PlanError(
                    f"ADD pair out of order: {prepended!r} should be the "
                    f"whitespace-prepended form of {bare!r}"
                )
        return cls(tokens=pairs, init_scheme=scheme, add_strategy=strategy, notes=notes)


def emit_manifest(
    plan: SubstitutionPlan, init_scheme: str, notes: str = ""
) -> VocabularyManifest:
    if plan.mode != "sentinel":
        raise PlanError(
            "vocabulary manifests apply to sentinel plans only; character "
            "sequences go through ordinary subword tokenization"
        )
    if init_scheme not in INIT_SCHEMES:
        raise PlanError(f"unknown init scheme {init_scheme!r}; expected one of {INIT_SCHEMES}")
    pairs = tuple((" " + r, r) for r in plan.replacements())
    return VocabularyManifest(
        tokens=pairs,
        init_scheme=init_scheme,
        add_strategy=plan.add_strategy,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Vocabulary helpers


def dataset_vocabulary(splits) -> set[str]:
    """Every word token and LF lexical item across the given splits."""
    vocab: set[str] = set()
    for split in splits:
        for row in split.rows:
            for token in source_tokens(row.source):
                word, _ = strip_final_punct(token)
                if word:
                    vocab.add(word)
            vocab.update(parse_lf(row.target).lexical_items())
    return vocab


def count_whole_token_occurrences(split: SplitFile, tokens: set[str]) -> dict[str, int]:
    """Whole-token hits in sentences plus lexical-item hits in logical forms."""
    counts = {t: 0 for t in tokens}
    for row in split.rows:
        for token in source_tokens(row.source):
            word, _ = strip_final_punct(token)
            if word in counts:
                counts[word] += 1
        for item in parse_lf(row.target).lexical_items():
            if item in counts:
                counts[item] += 1
    return counts
