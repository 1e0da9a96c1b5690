"""Controlled lexical items: inference from the splits, or explicit manifests.

An item is inferred when its lexical form (predicate lemma or proper-name
constant) occurs in exactly one training row at the sentence level and also
occurs somewhere in the generalization split. Each item carries the context
profile of its exposure row: the thematic roles its variable fills, plus a
definiteness marker for common nouns, or the ordered role frame for verbs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cogs import (
    Atom,
    LogicalForm,
    ProperName,
    SplitFile,
    Variable,
    parse_lf,
    source_tokens,
    strip_final_punct,
)
from .errors import ConsistencyError, FormatError, LexControlError

__all__ = [
    "ExposureProfile",
    "Slot",
    "ControlledItem",
    "LexiconError",
    "clause_slots",
    "infer_controlled_items",
    "load_controlled_items",
    "serialize_items_manifest",
    "controlled_tokens",
]


class LexiconError(LexControlError):
    pass


@dataclass(frozen=True)
class ExposureProfile:
    """Context class of a lexical item occurrence.

    For nouns and proper names, ``noun_roles`` holds the sorted (role path,
    argument index, direction) triples the entity variable or constant fills
    elsewhere in the LF; the direction records whether the word precedes or
    follows its governing predicate, so that e.g. a theme realized as an
    object NP is a different context class from a theme realized as an
    unaccusative subject. ``definite`` distinguishes ``the``/``a`` for
    common nouns. For verbs, ``verb_roles`` is the ordered role frame of the
    event's atoms, and ``nonfinite`` marks events governed by an infinitival
    complement, whose surface inflection differs from finite contexts.
    """

    kind: str  # common | proper | verb | primitive_noun | primitive_verb | primitive_name
    definite: bool | None = None
    noun_roles: tuple[tuple[str, int, str], ...] = ()
    verb_roles: tuple[str, ...] = ()
    nonfinite: bool = False

    def describe(self) -> str:
        if self.kind == "common":
            det = "def" if self.definite else "indef"
            roles = "+".join(f"{r}:{i}:{d}" for r, i, d in self.noun_roles) or "isolated"
            return f"common[{det}] {roles}"
        if self.kind == "proper":
            roles = "+".join(f"{r}:{i}:{d}" for r, i, d in self.noun_roles) or "isolated"
            return f"proper {roles}"
        if self.kind == "verb":
            frame = "+".join(self.verb_roles)
            return f"verb {frame}" + (" [nonfinite]" if self.nonfinite else "")
        return self.kind


@dataclass(frozen=True)
class Slot:
    """One substitutable occurrence of a lexical item inside a parsed row."""

    lemma: str
    profile: ExposureProfile
    token_index: int


@dataclass(frozen=True)
class ControlledItem:
    lemma: str
    surface_forms: tuple[str, ...]
    exposure_rows: tuple[int, ...]
    exposure_role: ExposureProfile

    def surface(self) -> str:
        return self.surface_forms[0]


# ---------------------------------------------------------------------------
# Slot extraction

_ROLE_PATH_SEP = "."


def _role_key(path: tuple[str, ...]) -> str:
    return _ROLE_PATH_SEP.join(path)


def clause_slots(source: str, lf: LogicalForm) -> list[Slot]:
    """Enumerate noun, proper-name and verb slots of a sentential row.

    Primitive rows (lambda forms, bare names) yield no slots. Token indices
    come from the COGS convention that variable indices track positions.
    """
    if lf.bare_name is not None or lf.lambdas:
        return []
    tokens = source_tokens(source)
    n_tokens = len(tokens)

    unary_vars: dict[int, str] = {}
    definite_vars: set[int] = set()
    for lemma, term in lf.definites:
        if isinstance(term, Variable):
            unary_vars[term.index] = lemma
            definite_vars.add(term.index)
    for atom in lf.atoms:
        if not atom.role_path and len(atom.args) == 1 and isinstance(atom.args[0], Variable):
            unary_vars[atom.args[0].index] = atom.lemma

    # Role occupancy of every variable and proper name: (role, argument
    # index, direction relative to the governing predicate's position).
    var_roles: dict[int, set[tuple[str, int, str]]] = {}
    name_positions = {
        strip_final_punct(t)[0]: i
        for i, t in enumerate(tokens)
        if strip_final_punct(t)[0] and strip_final_punct(t)[0][0].isupper()
    }

    def _direction(word_pos: int | None, atom: Atom) -> str:
        head = atom.args[0]
        if word_pos is None or not isinstance(head, Variable):
            return "post"
        return "pre" if word_pos < head.index else "post"

    name_roles: dict[str, set[tuple[str, int, str]]] = {}
    for atom in lf.atoms:
        if not atom.role_path:
            continue
        role = _role_key(atom.role_path)
        for pos, arg in enumerate(atom.args, start=1):
            if isinstance(arg, Variable):
                var_roles.setdefault(arg.index, set()).add(
                    (role, pos, _direction(arg.index, atom))
                )
            elif isinstance(arg, ProperName):
                name_roles.setdefault(arg.name, set()).add(
                    (role, pos, _direction(name_positions.get(arg.name), atom))
                )

    slots: list[Slot] = []

    for idx in sorted(unary_vars):
        lemma = unary_vars[idx]
        if not 0 <= idx < n_tokens:
            continue
        roles = tuple(sorted(var_roles.get(idx, set())))
        slots.append(
            Slot(
                lemma=lemma,
                profile=ExposureProfile(
                    kind="common", definite=idx in definite_vars, noun_roles=roles
                ),
                token_index=idx,
            )
        )

    for name, roles in sorted(name_roles.items()):
        positions = [i for i, t in enumerate(tokens) if strip_final_punct(t)[0] == name]
        if len(positions) != 1:
            continue
        slots.append(
            Slot(
                lemma=name,
                profile=ExposureProfile(kind="proper", noun_roles=tuple(sorted(roles))),
                token_index=positions[0],
            )
        )

    # Verb slots: event atoms grouped by (lemma, event variable), keeping the
    # atom order as the role frame. nmod chains belong to nouns, not verbs.
    frames: dict[tuple[str, int], list[str]] = {}
    for atom in lf.atoms:
        if not atom.role_path or atom.role_path[0] == "nmod":
            continue
        if not isinstance(atom.args[0], Variable):
            continue
        key = (atom.lemma, atom.args[0].index)
        frames.setdefault(key, []).append(_role_key(atom.role_path))
    xcomp_targets = {
        arg.index
        for atom in lf.atoms
        if atom.role_path and atom.role_path[-1] == "xcomp"
        for arg in atom.args[1:]
        if isinstance(arg, Variable)
    }
    for (lemma, event), roles in sorted(frames.items(), key=lambda kv: kv[0][1]):
        if not 0 <= event < n_tokens:
            continue
        slots.append(
            Slot(
                lemma=lemma,
                profile=ExposureProfile(
                    kind="verb",
                    verb_roles=tuple(roles),
                    nonfinite=event in xcomp_targets,
                ),
                token_index=event,
            )
        )
    return slots


def _primitive_profile(lf: LogicalForm) -> ExposureProfile:
    if lf.bare_name is not None:
        return ExposureProfile(kind="primitive_name")
    if len(lf.lambdas) == 1:
        return ExposureProfile(kind="primitive_noun")
    return ExposureProfile(kind="primitive_verb")


def _row_lexical_items(target: str) -> set[str]:
    return parse_lf(target).lexical_items()


# ---------------------------------------------------------------------------
# Inference


def _item_from_exposure(lemma: str, row_idx: int, split: SplitFile) -> ControlledItem:
    row = split.rows[row_idx]
    lf = parse_lf(row.target)
    if lf.bare_name is not None or lf.lambdas:
        return ControlledItem(
            lemma=lemma,
            surface_forms=(row.source,),
            exposure_rows=(row_idx,),
            exposure_role=_primitive_profile(lf),
        )
    matching = [s for s in clause_slots(row.source, lf) if s.lemma == lemma]
    if not matching:
        raise ConsistencyError(
            f"item {lemma!r}: no slot found in exposure row {row_idx}: {row.source!r}"
        )
    tokens = source_tokens(row.source)
    surfaces: list[str] = []
    for slot in matching:
        word = strip_final_punct(tokens[slot.token_index])[0]
        if word not in surfaces:
            surfaces.append(word)
    return ControlledItem(
        lemma=lemma,
        surface_forms=tuple(surfaces),
        exposure_rows=(row_idx,),
        exposure_role=matching[0].profile,
    )


def infer_controlled_items(train: SplitFile, gen: SplitFile) -> list[ControlledItem]:
    """One-shot training items that reappear in the generalization split."""
    occurrences: dict[str, list[int]] = {}
    for idx, row in enumerate(train.rows):
        for item in _row_lexical_items(row.target):
            occurrences.setdefault(item, []).append(idx)
    gen_items: set[str] = set()
    for row in gen.rows:
        gen_items.update(_row_lexical_items(row.target))

    controlled: list[ControlledItem] = []
    for lemma in sorted(occurrences):
        rows = occurrences[lemma]
        if len(rows) == 1 and lemma in gen_items:
            controlled.append(_item_from_exposure(lemma, rows[0], train))
    return controlled


def load_controlled_items(data: bytes, train: SplitFile) -> list[ControlledItem]:
    """Explicit manifest: one item per line, ``lemma<TAB>surface,surface``."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"manifest not valid UTF-8: {exc}") from None
    occurrences: dict[str, list[int]] | None = None
    items: list[ControlledItem] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError("expected lemma<TAB>surfaces", line=lineno)
        lemma, surfaces_field = fields
        surfaces = tuple(s for s in surfaces_field.split(",") if s)
        if not lemma or not surfaces:
            raise FormatError("empty lemma or surface list", line=lineno)
        if occurrences is None:
            occurrences = {}
            for idx, row in enumerate(train.rows):
                for it in _row_lexical_items(row.target):
                    occurrences.setdefault(it, []).append(idx)
        rows = occurrences.get(lemma)
        if not rows:
            raise LexiconError(f"lemma not found: {lemma}")
        base = _item_from_exposure(lemma, rows[0], train)
        items.append(
            ControlledItem(
                lemma=lemma,
                surface_forms=surfaces,
                exposure_rows=tuple(rows),
                exposure_role=base.exposure_role,
            )
        )
    return sorted(items, key=lambda it: it.lemma)


def serialize_items_manifest(items: list[ControlledItem]) -> str:
    return "".join(f"{it.lemma}\t{','.join(it.surface_forms)}\n" for it in items)


def controlled_tokens(items: list[ControlledItem]) -> set[str]:
    """All strings whose presence marks a row as containing a controlled item."""
    tokens: set[str] = set()
    for it in items:
        tokens.add(it.lemma)
        tokens.update(it.surface_forms)
    return tokens
