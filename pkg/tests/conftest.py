import os
from pathlib import Path

import pytest

from lexcontrol.cogs import load_split
from lexcontrol.synthcogs import FULL_SPEC, SMALL_SPEC, build_corpus, write_corpus

_CACHE = Path(__file__).resolve().parent.parent / ".cache"


@pytest.fixture(scope="session")
def small_corpus():
    return build_corpus(SMALL_SPEC)


@pytest.fixture(scope="session")
def full_corpus_dir():
    """Full-scale corpus on disk, cached across test runs.

    When COGS_OFFICIAL_DIR points at an official COGS checkout (train.tsv,
    dev.tsv, test.tsv, gen.tsv), that directory is used instead, so the
    acceptance suite runs against the real distribution when available.
    """
    official = os.environ.get("COGS_OFFICIAL_DIR")
    if official:
        root = Path(official)
        if not (root / "train.tsv").exists():
            raise RuntimeError(f"COGS_OFFICIAL_DIR={official} lacks train.tsv")
        return root
    out = _CACHE / f"synthcogs-full-seed{FULL_SPEC.seed}"
    marker = out / ".complete"
    if not marker.exists():
        write_corpus(build_corpus(FULL_SPEC), out)
        marker.write_text("ok")
    return out


@pytest.fixture(scope="session")
def full_corpus(full_corpus_dir):
    return {
        name: load_split(full_corpus_dir / f"{name}.tsv", name)
        for name in ("train", "dev", "test", "gen")
    }


@pytest.fixture(scope="session")
def corpus_source_label(full_corpus_dir):
    if os.environ.get("COGS_OFFICIAL_DIR"):
        return f"official COGS at {full_corpus_dir}"
    return f"synthetic COGS-layout corpus at {full_corpus_dir}"
