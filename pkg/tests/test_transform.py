import pytest

from lexcontrol.cogs import parse_split_file, serialize_split_file
from lexcontrol.errors import ConsistencyError, PlanError
from lexcontrol.lexicon import ControlledItem, ExposureProfile, infer_controlled_items
from lexcontrol.sampler import SamplerConfig
from lexcontrol.transform import (
    PlanEntry,
    SubstitutionPlan,
    VocabularyManifest,
    apply_plan,
    build_plan,
    count_whole_token_occurrences,
    dataset_vocabulary,
    emit_manifest,
    invert_plan,
)


def _item(lemma, surfaces=None, profile=None):
    return ControlledItem(
        lemma=lemma,
        surface_forms=tuple(surfaces or (lemma,)),
        exposure_rows=(0,),
        exposure_role=profile or ExposureProfile(kind="common", definite=True),
    )


def _split(rows, name="train"):
    data = "".join("\t".join(r) + "\n" for r in rows).encode()
    return parse_split_file(data, name)


HEDGEHOG_ROW = (
    "Emma liked the hedgehog .",
    "* hedgehog ( x _ 3 ) ; like . agent ( x _ 1 , Emma ) AND like . theme ( x _ 1 , x _ 3 )",
    "in_distribution",
)
PLAIN_ROW = (
    "A dog slept .",
    "dog ( x _ 1 ) AND sleep . agent ( x _ 2 , x _ 1 )",
    "in_distribution",
)


def test_build_plan_sentinel_numbering():
    items = [_item(l) for l in ("zebra", "aardvark", "moose")]
    plan = build_plan(items, "sentinel")
    assert [e.item.lemma for e in plan.entries] == ["aardvark", "moose", "zebra"]
    assert plan.replacements() == ["[w0]", "[w1]", "[w2]"]


def test_build_plan_21_sentinels():
    items = [_item(f"lemma{i:02d}") for i in range(21)]
    plan = build_plan(items, "sentinel")
    assert plan.replacements() == [f"[w{n}]" for n in range(21)]


def test_build_plan_charseq_uses_sampler():
    items = [_item("hedgehog")]
    cfg = SamplerConfig(length_bucket="shorter", distribution="cvcv", seed=99, count=1)
    plan = build_plan(items, "charseq", sampler_config=cfg)
    (entry,) = plan.entries
    assert 7 <= len(entry.replacement) < 15
    # same seed, same draw
    again = build_plan(items, "charseq", sampler_config=cfg)
    assert again.replacements() == plan.replacements()


def test_build_plan_errors():
    with pytest.raises(PlanError):
        build_plan([], "sentinel")
    with pytest.raises(PlanError):
        build_plan([_item("a1"), _item("a1")], "sentinel")
    with pytest.raises(PlanError):
        build_plan([_item("a1")], "charseq")
    with pytest.raises(PlanError):
        build_plan([_item("a1")], "sentinel", sentinel_template="[w]")


def test_apply_plan_charseq_substitution():
    split = _split([HEDGEHOG_ROW, PLAIN_ROW])
    plan = SubstitutionPlan(
        mode="charseq",
        entries=(PlanEntry(_item("hedgehog"), "bahufowu"),),
    )
    out = apply_plan(split, plan)
    assert out.rows[0].source == "Emma liked the bahufowu ."
    assert out.rows[0].target == (
        "* bahufowu ( x _ 3 ) ; like . agent ( x _ 1 , Emma ) AND like . theme ( x _ 1 , x _ 3 )"
    )
    # untouched row byte-identical, categories preserved
    assert out.rows[1] == split.rows[1]
    assert [r.category for r in out.rows] == [r.category for r in split.rows]


def test_apply_plan_sentinel_mode():
    split = _split([HEDGEHOG_ROW])
    plan = build_plan([_item("hedgehog")], "sentinel")
    out = apply_plan(split, plan)
    assert out.rows[0].source == "Emma liked the [w0] ."
    assert out.rows[0].target.startswith("* [w0] ( x _ 3 ) ;")


def test_apply_then_invert_is_identity():
    split = _split([HEDGEHOG_ROW, PLAIN_ROW])
    plan = build_plan([_item("hedgehog")], "sentinel")
    restored = invert_plan(apply_plan(split, plan), plan)
    assert serialize_split_file(restored) == serialize_split_file(split)


def test_apply_plan_proper_name_item():
    split = _split([HEDGEHOG_ROW])
    plan = build_plan(
        [_item("Emma", profile=ExposureProfile(kind="proper"))], "sentinel"
    )
    out = apply_plan(split, plan)
    assert out.rows[0].source == "[w0] liked the hedgehog ."
    assert "like . agent ( x _ 1 , [w0] )" in out.rows[0].target


def test_apply_plan_verb_item_with_distinct_surface():
    split = _split([HEDGEHOG_ROW])
    plan = build_plan(
        [_item("like", surfaces=("liked",), profile=ExposureProfile(kind="verb"))],
        "sentinel",
    )
    out = apply_plan(split, plan)
    assert out.rows[0].source == "Emma [w0] the hedgehog ."
    assert "[w0] . agent ( x _ 1 , Emma )" in out.rows[0].target


def test_apply_plan_substring_tokens_untouched():
    row = (
        "A hedgehogkeeper slept .",
        "hedgehogkeeper ( x _ 1 ) AND sleep . agent ( x _ 2 , x _ 1 )",
        "in_distribution",
    )
    split = _split([row])
    plan = build_plan([_item("hedgehog")], "sentinel")
    out = apply_plan(split, plan)
    assert out.rows[0] == split.rows[0]


def test_apply_plan_consistency_error():
    # lemma in the LF, surface absent from the sentence
    row = (
        "Emma liked the animal .",
        "* hedgehog ( x _ 3 ) ; like . agent ( x _ 1 , Emma ) AND like . theme ( x _ 1 , x _ 3 )",
        "in_distribution",
    )
    split = _split([row])
    plan = build_plan([_item("hedgehog")], "sentinel")
    with pytest.raises(ConsistencyError, match="row 1"):
        apply_plan(split, plan)


def test_invert_requires_replacement_consistency():
    row = ("Emma liked the [w0] .", "* cake ( x _ 3 ) ; like . agent ( x _ 1 , Emma )", "x")
    split = _split([row])
    plan = build_plan([_item("hedgehog")], "sentinel")
    with pytest.raises(ConsistencyError):
        invert_plan(split, plan)


def test_invert_rejects_multi_surface_items():
    plan = build_plan([_item("like", surfaces=("liked", "likes"))], "sentinel")
    with pytest.raises(PlanError, match="ambiguous"):
        invert_plan(_split([PLAIN_ROW]), plan)


def test_full_corpus_roundtrip_and_soundness(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    plan = build_plan(items, "sentinel")
    for name in ("train", "gen"):
        split = small_corpus[name]
        transformed = apply_plan(split, plan)
        from lexcontrol.lexicon import controlled_tokens

        counts = count_whole_token_occurrences(transformed, controlled_tokens(items))
        assert all(c == 0 for c in counts.values()), counts
        restored = invert_plan(transformed, plan)
        assert serialize_split_file(restored) == serialize_split_file(split)
        # category multiset preserved
        assert sorted(r.category for r in transformed.rows) == sorted(
            r.category for r in split.rows
        )


def test_charseq_plan_respects_dataset_blocklist(small_corpus):
    items = infer_controlled_items(small_corpus["train"], small_corpus["gen"])
    vocab = dataset_vocabulary(small_corpus.values())
    cfg = SamplerConfig(
        length_bucket="shorter", distribution="cvcv", seed=12, count=len(items),
        blocklist=frozenset(vocab),
    )
    plan = build_plan(items, "charseq", sampler_config=cfg)
    lowered = {w.lower() for w in vocab}
    for r in plan.replacements():
        assert r not in lowered


def test_emit_manifest_pairs_and_order():
    plan = build_plan([_item("hedgehog")], "sentinel")
    manifest = emit_manifest(plan, "random")
    assert manifest.tokens == ((" [w0]", "[w0]"),)
    assert manifest.add_order() == [" [w0]", "[w0]"]


def test_emit_manifest_21_items_gives_42_entries():
    plan = build_plan([_item(f"lemma{i:02d}") for i in range(21)], "sentinel")
    manifest = emit_manifest(plan, "avgWithNoise")
    assert len(manifest.add_order()) == 42
    assert manifest.init_scheme == "avgWithNoise"


def test_emit_manifest_rejects_charseq():
    cfg = SamplerConfig(seed=1, count=1)
    plan = build_plan([_item("hedgehog")], "charseq", sampler_config=cfg)
    with pytest.raises(PlanError):
        emit_manifest(plan, "random")


def test_emit_manifest_rejects_unknown_scheme():
    plan = build_plan([_item("hedgehog")], "sentinel")
    with pytest.raises(PlanError):
        emit_manifest(plan, "xavier")


def test_manifest_serialization_roundtrip():
    plan = build_plan([_item("hedgehog"), _item("wombat")], "sentinel")
    manifest = emit_manifest(plan, "unusedEmbeddings", notes="toy run")
    text = manifest.serialize()
    assert "ADD\t\\u2581[w0]" in text
    assert "ADD\t[w0]" in text
    assert "INIT\tunusedEmbeddings" in text
    parsed = VocabularyManifest.parse(text)
    assert parsed == manifest


def test_manifest_parse_rejects_reversed_pairs():
    text = "ADD\t[w0]\nADD\t\\u2581[w0]\nINIT\trandom\n"
    with pytest.raises(PlanError):
        VocabularyManifest.parse(text)


def test_plan_json_roundtrip():
    plan = build_plan([_item("hedgehog")], "sentinel")
    restored = SubstitutionPlan.from_json(plan.to_json())
    assert restored.mode == plan.mode
    assert restored.replacements() == plan.replacements()
    assert restored.entries[0].item.surface_forms == ("hedgehog",)
