import pytest

from lexcontrol.errors import LexControlError
from lexcontrol.sampler import CONSONANTS, VOWELS, SamplerConfig, sample_sequences


def _is_cvcv(s: str) -> bool:
    for i, ch in enumerate(s):
        pool = CONSONANTS if i % 2 == 0 else VOWELS
        if ch not in pool:
            return False
    return True


def test_consonant_vowel_partition():
    assert len(CONSONANTS) == 21
    assert len(VOWELS) == 5
    assert set(CONSONANTS) & set(VOWELS) == set()
    assert "y" in CONSONANTS


def test_paper_examples_fit_the_factors():
    # Shapes reported for the four sampling conditions.
    assert 7 <= len("bahufowu") < 15 and _is_cvcv("bahufowu")
    assert 15 <= len("rkijtgjqamjtwsmcbi") < 30
    assert 7 <= len("dvalcxw") < 15
    assert 15 <= len("tayutenotipevobe") < 30 and _is_cvcv("tayutenotipevobe")


def test_determinism_same_seed():
    cfg = SamplerConfig(length_bucket="shorter", distribution="cvcv", seed=77, count=50)
    assert sample_sequences(cfg) == sample_sequences(cfg)


def test_different_seeds_differ():
    a = sample_sequences(SamplerConfig(seed=1, count=20))
    b = sample_sequences(SamplerConfig(seed=2, count=20))
    assert a != b


@pytest.mark.parametrize("bucket,lo,hi", [("shorter", 7, 15), ("longer", 15, 30)])
@pytest.mark.parametrize("dist", ["random", "cvcv"])
def test_bucket_bounds_and_charset(bucket, lo, hi, dist):
    seqs = sample_sequences(
        SamplerConfig(length_bucket=bucket, distribution=dist, seed=3, count=500)
    )
    assert len(set(seqs)) == 500
    for s in seqs:
        assert lo <= len(s) < hi
        assert s.islower() and s.isalpha() and s.isascii()
        if dist == "cvcv":
            assert _is_cvcv(s)


def test_cvcv_starts_with_consonant():
    seqs = sample_sequences(SamplerConfig(distribution="cvcv", seed=5, count=200))
    assert all(s[0] in CONSONANTS for s in seqs)


def test_blocklist_exact_match_rejected():
    # Force every 7-char cvcv draw through a blocklist containing one of them.
    probe = sample_sequences(SamplerConfig(seed=11, count=5))
    cfg = SamplerConfig(seed=11, count=5, blocklist=frozenset({probe[0].upper()}))
    seqs = sample_sequences(cfg)
    assert probe[0] not in seqs


def test_blocklist_containment_rejected():
    probe = sample_sequences(SamplerConfig(seed=13, count=1))[0]
    inner = probe[1:6]  # >= 4 chars, contained in the first draw
    seqs = sample_sequences(SamplerConfig(seed=13, count=10, blocklist=frozenset({inner})))
    assert all(inner not in s for s in seqs)


def test_short_blocklist_words_do_not_block_containment():
    # Single letters appear in every output; only exact equality may reject.
    seqs = sample_sequences(SamplerConfig(seed=17, count=20, blocklist=frozenset({"a", "the"})))
    assert len(seqs) == 20


def test_unreachable_count_raises(monkeypatch):
    import lexcontrol.sampler as mod

    monkeypatch.setattr(mod, "_blocked", lambda *args: True)
    with pytest.raises(LexControlError):
        sample_sequences(SamplerConfig(seed=19, count=2))


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(length_bucket="medium")
    with pytest.raises(ValueError):
        SamplerConfig(distribution="zipf")
    with pytest.raises(ValueError):
        SamplerConfig(count=0)
