import pytest

from lexcontrol.cogs import parse_lf, parse_split_file, serialize_split_file
from lexcontrol.errors import LexControlError
from lexcontrol.lexicon import ControlledItem, ExposureProfile, infer_controlled_items
from lexcontrol.testlex import (
    TestLexConfig,
    _allocation,
    generate_test_lex,
    validate_test_lex,
)


def _split(rows, name="train"):
    data = "".join("\t".join(r) + "\n" for r in rows).encode()
    return parse_split_file(data, name)


HEDGEHOG_ITEM = ControlledItem(
    lemma="hedgehog",
    surface_forms=("hedgehog",),
    exposure_rows=(0,),
    exposure_role=ExposureProfile(kind="common", definite=True, noun_roles=(("agent", 2, "pre"),)),
)


def test_slot_swap_reproduces_known_construction():
    train = _split(
        [
            (
                "The hedgehog ate the cake .",
                "* hedgehog ( x _ 1 ) ; * cake ( x _ 4 ) ; eat . agent ( x _ 2 , x _ 1 ) AND eat . theme ( x _ 2 , x _ 4 )",
                "in_distribution",
            ),
            (
                "The girl ate the donut .",
                "* girl ( x _ 1 ) ; * donut ( x _ 4 ) ; eat . agent ( x _ 2 , x _ 1 ) AND eat . theme ( x _ 2 , x _ 4 )",
                "in_distribution",
            ),
            ("A boy smiled .", "boy ( x _ 1 ) AND smile . agent ( x _ 2 , x _ 1 )", "in_distribution"),
            ("A boy napped .", "boy ( x _ 1 ) AND nap . agent ( x _ 2 , x _ 1 )", "in_distribution"),
        ]
    )
    out = generate_test_lex(train, [HEDGEHOG_ITEM], TestLexConfig(total=1, seed=3))
    assert len(out) == 1
    row = out.rows[0]
    assert row.source == "The hedgehog ate the donut ."
    assert row.target == (
        "* hedgehog ( x _ 1 ) ; * donut ( x _ 4 ) ; eat . agent ( x _ 2 , x _ 1 ) "
        "AND eat . theme ( x _ 2 , x _ 4 )"
    )
    assert row.category == "test_lex_hedgehog"


def test_allocation_even_split_with_remainder():
    lemmas = [f"l{i:02d}" for i in range(21)]
    counts = _allocation(12_000, lemmas, None)
    assert sum(counts.values()) == 12_000
    assert sorted(set(counts.values())) == [571, 572]
    assert sum(1 for v in counts.values() if v == 572) == 9
    # remainder goes to the first items in lemma order
    assert counts["l00"] == 572 and counts["l20"] == 571


def test_generate_on_corpus_minimal_allocation(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    out = generate_test_lex(
        small_corpus["train"], items, TestLexConfig(total=len(items), seed=1)
    )
    assert len(out) == len(items)
    lemmas = sorted(it.lemma for it in items)
    assert [r.category.removeprefix("test_lex_") for r in out.rows] == lemmas


def test_generate_full_small_run_and_validate(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    config = TestLexConfig(total=2 * len(items), seed=7)
    out = generate_test_lex(small_corpus["train"], items, config)
    assert len(out) == 2 * len(items)

    report = validate_test_lex(out, small_corpus["train"], items)
    assert report.ok
    for it in items:
        audit = report.items[it.lemma]
        assert audit.count == 2
        assert audit.role_matches == 2
        assert audit.train_overlap == 0
        assert audit.parse_failures == 0

    # deterministic under seed
    again = generate_test_lex(small_corpus["train"], items, config)
    assert serialize_split_file(again) == serialize_split_file(out)
    # exactly one controlled item per row: its own
    lemma_set = {it.lemma for it in items}
    for row in out.rows:
        present = parse_lf(row.target).lexical_items() & lemma_set
        assert present == {row.category.removeprefix("test_lex_")}


def test_no_compatible_templates_errors():
    train = _split(
        [("A boy smiled .", "boy ( x _ 1 ) AND smile . agent ( x _ 2 , x _ 1 )", "x")] * 1
    )
    weird = ControlledItem(
        lemma="hedgehog",
        surface_forms=("hedgehog",),
        exposure_rows=(0,),
        exposure_role=ExposureProfile(kind="common", definite=True, noun_roles=(("recipient", 2, "post"),)),
    )
    with pytest.raises(LexControlError, match="hedgehog"):
        generate_test_lex(train, [weird], TestLexConfig(total=1))


def test_total_unreachable_without_duplicates_errors():
    train = _split(
        [
            (
                "The girl ate the donut .",
                "* girl ( x _ 1 ) ; * donut ( x _ 4 ) ; eat . agent ( x _ 2 , x _ 1 ) AND eat . theme ( x _ 2 , x _ 4 )",
                "x",
            ),
        ]
    )
    with pytest.raises(LexControlError, match="only"):
        generate_test_lex(train, [HEDGEHOG_ITEM], TestLexConfig(total=5))


def test_total_below_item_count_errors(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    with pytest.raises(LexControlError):
        generate_test_lex(small_corpus["train"], items, TestLexConfig(total=3))


def test_per_item_cap():
    lemmas = ["a1", "b2", "c3"]
    counts = _allocation(9, lemmas, 3)
    assert counts == {"a1": 3, "b2": 3, "c3": 3}
    with pytest.raises(LexControlError):
        _allocation(10, lemmas, 3)


def test_validate_flags_injected_train_duplicate(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    out = generate_test_lex(small_corpus["train"], items, TestLexConfig(total=len(items)))
    hedgehog = next(it for it in items if it.lemma == "hedgehog")
    exposure = small_corpus["train"].rows[hedgehog.exposure_rows[0]]
    from lexcontrol.cogs import Example

    spiked = out.with_rows(
        out.rows + [Example(exposure.source, exposure.target, "test_lex_hedgehog")]
    )
    report = validate_test_lex(spiked, small_corpus["train"], items)
    assert not report.ok
    assert report.items["hedgehog"].train_overlap == 1


def test_validate_flags_role_mismatch(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    from lexcontrol.cogs import Example

    # hedgehog was exposed as a subject; an object use is a role mismatch here
    bad = Example(
        "Emma saw the hedgehog .",
        "* hedgehog ( x _ 3 ) ; see . agent ( x _ 1 , Emma ) AND see . theme ( x _ 1 , x _ 3 )",
        "test_lex_hedgehog",
    )
    split = _split([]).with_rows([bad])
    report = validate_test_lex(split, small_corpus["train"], items)
    assert report.items["hedgehog"].role_mismatches == 1
    assert not report.ok


def test_validate_empty_split(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    report = validate_test_lex(_split([]), small_corpus["train"], items)
    assert report.ok
    assert all(a.count == 0 for a in report.items.values())


def test_variable_indices_preserved(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    out = generate_test_lex(small_corpus["train"], items, TestLexConfig(total=len(items)))
    from lexcontrol.cogs import Variable, source_tokens

    for row in out.rows:
        lf = parse_lf(row.target)
        n = len(source_tokens(row.source))
        for atom in lf.atoms:
            for arg in atom.args:
                if isinstance(arg, Variable):
                    assert 0 <= arg.index < n
