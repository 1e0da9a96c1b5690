"""Draw novel character sequences under the two crossed factors.

Length is uniform over the bucket ([7,15) or [15,30) characters); characters
are either uniform over a-z or alternate consonant/vowel starting with a
consonant, which makes the sequences look more like English words.
"""

from lexcontrol import SamplerConfig, sample_sequences

for bucket in ("shorter", "longer"):
    for dist in ("random", "cvcv"):
        cfg = SamplerConfig(length_bucket=bucket, distribution=dist, seed=42, count=4)
        seqs = sample_sequences(cfg)
        print(f"{bucket:<8} {dist:<7}:", "  ".join(seqs))

# The dataset vocabulary acts as a blocklist so no replacement collides with
# a real word of the data.
cfg = SamplerConfig(
    length_bucket="shorter",
    distribution="cvcv",
    seed=42,
    count=21,
    blocklist=frozenset({"hedgehog", "cockroach", "bahufowu"}),
)
seqs = sample_sequences(cfg)
print("\n21 replacement candidates:", ", ".join(seqs[:6]), "...")
assert "bahufowu" not in seqs
