"""Test-Lex split generation and auditing.

Test-Lex reuses each controlled item in new in-distribution sentences of the
same context class as its exposure example. Construction is by slot swapping:
a training row that contains a slot with the item's exact exposure profile
donates its sentence and logical form, and the slot's word is exchanged for
the item in both. Variable indices are untouched (single-token swaps keep
token positions), every output parses, and no output sentence duplicates a
training sentence or another Test-Lex sentence.

The target total is divided evenly across items; the remainder goes to the
first items in lemma order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .cogs import (
    Atom,
    Example,
    LogicalForm,
    ProperName,
    SplitFile,
    Variable,
    parse_lf,
    print_lf,
    source_tokens,
    strip_final_punct,
)
from .errors import LexControlError, LFParseError
from .lexicon import ControlledItem, Slot, clause_slots, controlled_tokens

__all__ = ["TestLexConfig", "generate_test_lex", "validate_test_lex", "TestLexReport"]

CATEGORY_PREFIX = "test_lex_"


@dataclass(frozen=True)
class TestLexConfig:
    __test__ = False  # not a pytest class

    total: int = 12_000
    seed: int = 0
    per_item_cap: int | None = None


def _allocation(total: int, lemmas: list[str], cap: int | None) -> dict[str, int]:
    base, remainder = divmod(total, len(lemmas))
    counts = {lemma: base + (1 if i < remainder else 0) for i, lemma in enumerate(lemmas)}
    if cap is not None:
        if cap * len(lemmas) < total:
            raise LexControlError(
                f"per-item cap {cap} cannot reach total {total} over {len(lemmas)} items"
            )
        counts = {l: min(c, cap) for l, c in counts.items()}
        shortfall = total - sum(counts.values())
        lemma_cycle = [l for l in lemmas]
        i = 0
        while shortfall > 0:
            lemma = lemma_cycle[i % len(lemma_cycle)]
            if counts[lemma] < cap:
                counts[lemma] += 1
                shortfall -= 1
            i += 1
    return counts


def _swap_row(row: Example, slot: Slot, item: ControlledItem, style: str) -> Example:
    tokens = source_tokens(row.source)
    word, punct = strip_final_punct(tokens[slot.token_index])
    tokens[slot.token_index] = item.surface_forms[0] + punct

    old = slot.lemma
    new = item.lemma
    var = None
    if slot.profile.kind in ("common", "verb"):
        var = Variable(slot.token_index)

    def sub_atom(atom: Atom) -> Atom:
        lemma = atom.lemma
        args = atom.args
        if slot.profile.kind == "proper":
            args = tuple(
                ProperName(new) if isinstance(a, ProperName) and a.name == old else a
                for a in args
            )
        elif lemma == old:
            if not atom.role_path and args == (var,):
                lemma = new  # the slot's own unary atom
            elif atom.role_path and atom.args and atom.args[0] == var:
                lemma = new  # verb frame atoms and nmod atoms headed by the slot
        return Atom(lemma, atom.role_path, args)

    lf = parse_lf(row.target)
    definites = tuple(
        (new, t) if l == old and t == var else (l, t) for l, t in lf.definites
    )
    atoms = tuple(sub_atom(a) for a in lf.atoms)
    new_lf = LogicalForm(lf.lambdas, definites, atoms, lf.bare_name)
    return Example(
        source=" ".join(tokens),
        target=print_lf(new_lf, style),
        category=f"{CATEGORY_PREFIX}{item.lemma}",
    )


def generate_test_lex(
    train: SplitFile, items: list[ControlledItem], config: TestLexConfig = TestLexConfig()
) -> SplitFile:
    """Build the Test-Lex split; deterministic under ``config.seed``."""
    if not items:
        raise LexControlError("no controlled items supplied")
    if config.total < len(items):
        raise LexControlError(
            f"total {config.total} is below the number of items {len(items)}"
        )
    ordered = sorted(items, key=lambda it: it.lemma)
    lemmas = [it.lemma for it in ordered]
    counts = _allocation(config.total, lemmas, config.per_item_cap)

    marker_tokens = controlled_tokens(ordered)

    # Template pool: training rows free of controlled items, indexed by the
    # profile of every slot they contain.
    pools: dict[object, list[tuple[int, Slot]]] = {}
    for idx, row in enumerate(train.rows):
        if any(t in row.source or t in row.target for t in marker_tokens):
            tokens = {strip_final_punct(t)[0] for t in source_tokens(row.source)}
            lexical = parse_lf(row.target).lexical_items()
            if (tokens | lexical) & marker_tokens:
                continue
        lf = parse_lf(row.target)
        for slot in clause_slots(row.source, lf):
            pools.setdefault(slot.profile, []).append((idx, slot))

    train_sentences = {row.source for row in train.rows}
    emitted_sentences: set[str] = set()
    out_rows: list[Example] = []

    for item_index, item in enumerate(ordered):
        want = counts[item.lemma]
        pool = pools.get(item.exposure_role, [])
        if not pool and want > 0:
            raise LexControlError(
                f"no compatible template rows for item {item.lemma!r} "
                f"(context {item.exposure_role.describe()!r})"
            )
        rng = np.random.default_rng([config.seed, item_index])
        order = rng.permutation(len(pool))
        got = 0
        for pool_idx in order:
            if got >= want:
                break
            row_idx, slot = pool[int(pool_idx)]
            candidate = _swap_row(train.rows[row_idx], slot, item, train.lf_style)
            if candidate.source in train_sentences or candidate.source in emitted_sentences:
                continue
            parse_lf(candidate.target)  # every output must parse
            emitted_sentences.add(candidate.source)
            out_rows.append(candidate)
            got += 1
        if got < want:
            raise LexControlError(
                f"item {item.lemma!r}: only {got} of {want} distinct rows possible "
                "without duplicating training sentences"
            )
    return SplitFile(rows=out_rows, split_name="testlex", lf_style=train.lf_style)


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ItemAudit:
    lemma: str
    count: int = 0
    role_matches: int = 0
    role_mismatches: int = 0
    train_overlap: int = 0
    parse_failures: int = 0

    @property
    def ok(self) -> bool:
        return self.role_mismatches == 0 and self.train_overlap == 0 and self.parse_failures == 0


@dataclass
class TestLexReport:
    items: dict[str, ItemAudit] = field(default_factory=dict)
    unattributed_rows: int = 0

    @property
    def ok(self) -> bool:
        return self.unattributed_rows == 0 and all(a.ok for a in self.items.values())

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "unattributed_rows": self.unattributed_rows,
            "items": {
                lemma: {
                    "count": a.count,
                    "role_matches": a.role_matches,
                    "role_mismatches": a.role_mismatches,
                    "train_overlap": a.train_overlap,
                    "parse_failures": a.parse_failures,
                }
                for lemma, a in sorted(self.items.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def validate_test_lex(
    split: SplitFile, train: SplitFile, items: list[ControlledItem]
) -> TestLexReport:
    """Audit a Test-Lex split: counts, role fidelity, overlap, parseability."""
    report = TestLexReport(items={it.lemma: ItemAudit(lemma=it.lemma) for it in items})
    by_lemma = {it.lemma: it for it in items}
    train_sentences = {row.source for row in train.rows}
    for row in split.rows:
        lemma = row.category.removeprefix(CATEGORY_PREFIX)
        audit = report.items.get(lemma)
        if audit is None:
            report.unattributed_rows += 1
            continue
        audit.count += 1
        if row.source in train_sentences:
            audit.train_overlap += 1
        try:
            lf = parse_lf(row.target)
        except LFParseError:
            audit.parse_failures += 1
            continue
        item = by_lemma[lemma]
        matching = [
            s
            for s in clause_slots(row.source, lf)
            if s.lemma == lemma and s.profile == item.exposure_role
        ]
        if matching:
            audit.role_matches += 1
        else:
            audit.role_mismatches += 1
    return report
