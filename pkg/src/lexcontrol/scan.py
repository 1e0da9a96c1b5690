"""Single-pass multi-pattern corpus scan.

Verifies that candidate replacement sequences are absent from a pretraining
corpus. All patterns are matched simultaneously by an Aho-Corasick automaton
whose failure links are resolved into a dense byte-transition table, so the
corpus is consumed in one pass regardless of pattern count. Overlapping
occurrences are counted; matching is by substring, with ASCII case folding
on by default.

The hot loop is compiled with numba when available ("auto" engine) and falls
back to a pure-Python walk otherwise; both paths share the same table.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import ScanError

__all__ = [
    "PatternAutomaton",
    "PatternHit",
    "PatternStats",
    "ScanReport",
    "scan_corpus",
    "filter_absent",
    "MIN_PATTERN_LEN",
]

MIN_PATTERN_LEN = 4
CONTEXT_BYTES = 20  # bytes kept on each side of a sample match

try:  # optional accelerator
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _fold(data: bytes) -> bytes:
    return bytes(b + 32 if 65 <= b <= 90 else b for b in data)


class PatternAutomaton:
    """Aho-Corasick DFA over bytes for a fixed pattern set."""

    def __init__(self, patterns: list[bytes], case_fold: bool = True):
        if not patterns:
            raise ScanError("pattern set is empty")
        for p in patterns:
            if len(p) < MIN_PATTERN_LEN:
                raise ScanError(
                    f"pattern {p!r} is shorter than {MIN_PATTERN_LEN} bytes"
                )
        self.case_fold = case_fold
        keys = [_fold(p) if case_fold else p for p in patterns]
        self.pattern_lengths = np.array([len(p) for p in patterns], dtype=np.int64)

        # Trie construction.
        children: list[dict[int, int]] = [{}]
        emits: list[list[int]] = [[]]
        for pid, key in enumerate(keys):
            s = 0
            for b in key:
                nxt = children[s].get(b)
                if nxt is None:
                    nxt = len(children)
                    children[s][b] = nxt
                    children.append({})
                    emits.append([])
                s = nxt
            emits[s].append(pid)

        # Failure links in BFS order, accumulating suffix emissions.
        n = len(children)
        fail = [0] * n
        order: list[int] = []
        dq: deque[int] = deque()
        for s in children[0].values():
            dq.append(s)
        while dq:
            r = dq.popleft()
            order.append(r)
            for b, s in children[r].items():
                dq.append(s)
                f = fail[r]
                while f and b not in children[f]:
                    f = fail[f]
                cand = children[f].get(b, 0)
                fail[s] = cand if cand != s else 0
        for s in order:
            if emits[fail[s]]:
                emits[s] = emits[s] + emits[fail[s]]

        # Dense transition table with failures resolved (true DFA).
        table = np.zeros((n, 256), dtype=np.int32)
        for b, s in children[0].items():
            table[0, b] = s
        for s in order:
            row = table[fail[s]].copy()
            for b, child in children[s].items():
                row[b] = child
            table[s] = row

        flat_ids: list[int] = []
        out_start = np.zeros(n, dtype=np.int32)
        out_count = np.zeros(n, dtype=np.int32)
        for s in range(n):
            out_start[s] = len(flat_ids)
            out_count[s] = len(emits[s])
            flat_ids.extend(emits[s])
        self._table = table
        self._out_start = out_start
        self._out_count = out_count
        self._out_ids = np.array(flat_ids, dtype=np.int32) if flat_ids else np.zeros(1, np.int32)

    @property
    def n_states(self) -> int:
        return self._table.shape[0]

    def scan_chunk(
        self,
        data: bytes,
        state: int,
        fold: bool,
        counts: np.ndarray,
        retained: np.ndarray,
        sample_pos: np.ndarray,
        base: int,
        engine: str,
    ) -> int:
        buf = np.frombuffer(data, dtype=np.uint8)
        if engine == "numba":
            return int(
                _scan_kernel_numba(
                    self._table,
                    self._out_start,
                    self._out_count,
                    self._out_ids,
                    self.pattern_lengths,
                    buf,
                    state,
                    fold,
                    counts,
                    retained,
                    sample_pos,
                    base,
                )
            )
        return _scan_kernel_python(
            self._table,
            self._out_start,
            self._out_count,
            self._out_ids,
            self.pattern_lengths,
            data,
            state,
            fold,
            counts,
            retained,
            sample_pos,
            base,
        )


def _scan_kernel_python(
    table, out_start, out_count, out_ids, pat_lens, data, state, fold, counts, retained, sample_pos, base
):
    max_keep = sample_pos.shape[1]
    for i, b in enumerate(data):
        if fold and 65 <= b <= 90:
            b += 32
        state = int(table[state, b])
        oc = int(out_count[state])
        if oc:
            s0 = int(out_start[state])
            for j in range(oc):
                pid = int(out_ids[s0 + j])
                counts[pid] += 1
                if retained[pid] < max_keep:
                    sample_pos[pid, retained[pid]] = base + i - pat_lens[pid] + 1
                    retained[pid] += 1
    return state


if _HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _scan_kernel_numba(
        table, out_start, out_count, out_ids, pat_lens, data, state, fold, counts, retained, sample_pos, base
    ):  # pragma: no cover - exercised via scan_chunk
        max_keep = sample_pos.shape[1]
        for i in range(data.shape[0]):
            b = data[i]
            if fold and 65 <= b <= 90:
                b += 32
            state = table[state, b]
            oc = out_count[state]
            if oc:
                s0 = out_start[state]
                for j in range(oc):
                    pid = out_ids[s0 + j]
                    counts[pid] += 1
                    if retained[pid] < max_keep:
                        sample_pos[pid, retained[pid]] = base + i - pat_lens[pid] + 1
                        retained[pid] += 1
        return state


# ---------------------------------------------------------------------------
# Report types


@dataclass
class PatternHit:
    file: str
    offset: int
    context: str


@dataclass
class PatternStats:
    pattern: str
    count: int = 0
    samples: list[PatternHit] = field(default_factory=list)


@dataclass
class ScanReport:
    patterns: list[PatternStats]
    bytes_scanned: int = 0
    elapsed_seconds: float = 0.0
    files_scanned: int = 0
    case_fold: bool = True
    engine: str = "python"
    errors: list[dict] = field(default_factory=list)

    def stats_for(self, pattern: str) -> PatternStats:
        for st in self.patterns:
            if st.pattern == pattern:
                return st
        raise ScanError(f"pattern {pattern!r} missing from report")

    @property
    def throughput_mb_s(self) -> float:
        if self.elapsed_seconds <= 0:
            return 0.0
        return self.bytes_scanned / 1e6 / self.elapsed_seconds

    def to_dict(self) -> dict:
        return {
            "bytes_scanned": self.bytes_scanned,
            "elapsed_seconds": self.elapsed_seconds,
            "throughput_mb_s": round(self.throughput_mb_s, 3),
            "files_scanned": self.files_scanned,
            "case_fold": self.case_fold,
            "engine": self.engine,
            "patterns": [
                {
                    "pattern": st.pattern,
                    "count": st.count,
                    "samples": [
                        {"file": h.file, "offset": h.offset, "context": h.context}
                        for h in st.samples
                    ],
                }
                for st in self.patterns
            ],
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        return cls(
            patterns=[
                PatternStats(
                    pattern=p["pattern"],
                    count=p["count"],
                    samples=[PatternHit(**h) for h in p["samples"]],
                )
                for p in d["patterns"]
            ],
            bytes_scanned=d["bytes_scanned"],
            elapsed_seconds=d["elapsed_seconds"],
            files_scanned=d["files_scanned"],
            case_fold=d["case_fold"],
            engine=d["engine"],
            errors=d.get("errors", []),
        )


# ---------------------------------------------------------------------------
# Corpus traversal


def _corpus_sources(corpus) -> Iterator[tuple[str, object]]:
    """Yield (name, source) where source is a Path or an in-memory bytes object."""
    if isinstance(corpus, (str, Path)):
        root = Path(corpus)
        if root.is_dir():
            for p in sorted(f for f in root.rglob("*") if f.is_file()):
                yield str(p.relative_to(root)), p
        else:
            yield root.name, root
        return
    if isinstance(corpus, bytes):
        yield "<memory>", corpus
        return
    for item in corpus:
        if isinstance(item, tuple):
            name, data = item
            yield str(name), data if isinstance(data, bytes) else data.encode("utf-8")
        else:
            p = Path(item)
            yield str(p), p


def _iter_chunks(source, chunk_size: int) -> Iterator[bytes]:
    if isinstance(source, bytes):
        for i in range(0, len(source), chunk_size):
            yield source[i : i + chunk_size]
        return
    with open(source, "rb") as f:
        while True:
            chunk = f.read(chunk_size)
            if not chunk:
                return
            yield chunk


def _read_context(source, start: int, length: int) -> str:
    lo = max(0, start - CONTEXT_BYTES)
    span = (start - lo) + length + CONTEXT_BYTES
    if isinstance(source, bytes):
        window = source[lo : lo + span]
    else:
        with open(source, "rb") as f:
            f.seek(lo)
            window = f.read(span)
    return window.decode("utf-8", errors="replace")


def resolve_engine(engine: str = "auto") -> str:
    if engine == "auto":
        return "numba" if _HAVE_NUMBA else "python"
    if engine == "numba" and not _HAVE_NUMBA:
        raise ScanError("numba engine requested but numba is not installed")
    if engine not in ("numba", "python"):
        raise ScanError(f"unknown engine {engine!r}")
    return engine


# ---------------------------------------------------------------------------
# Public operations


def scan_corpus(
    patterns: Iterable[str],
    corpus,
    case_fold: bool = True,
    max_samples_per_pattern: int = 5,
    engine: str = "auto",
    chunk_size: int = 1 << 20,
) -> ScanReport:
    """Count every substring occurrence of every pattern across the corpus.

    ``corpus`` may be a directory, a file path, raw bytes, or an iterable of
    paths or (name, bytes) pairs. Unreadable files are recorded in the report
    and the scan continues.
    """
    pattern_list: list[str] = []
    for p in patterns:
        if p not in pattern_list:
            pattern_list.append(p)
    if not pattern_list:
        raise ScanError("pattern set is empty")
    engine = resolve_engine(engine)
    encoded = [p.encode("utf-8") for p in pattern_list]
    automaton = PatternAutomaton(encoded, case_fold=case_fold)

    n = len(pattern_list)
    counts = np.zeros(n, dtype=np.int64)
    keep = max(0, max_samples_per_pattern)
    samples: list[list[PatternHit]] = [[] for _ in range(n)]
    errors: list[dict] = []
    bytes_scanned = 0
    files_scanned = 0

    t0 = time.perf_counter()
    for name, source in _corpus_sources(corpus):
        state = 0
        base = 0
        retained = np.zeros(n, dtype=np.int64)
        sample_pos = np.zeros((n, max(keep, 1)), dtype=np.int64)
        try:
            for chunk in _iter_chunks(source, chunk_size):
                state = automaton.scan_chunk(
                    chunk, state, case_fold, counts, retained, sample_pos, base, engine
                )
                base += len(chunk)
                bytes_scanned += len(chunk)
        except OSError as exc:
            errors.append({"file": name, "error": str(exc)})
            continue
        files_scanned += 1
        if keep:
            for pid in range(n):
                for k in range(int(retained[pid])):
                    if len(samples[pid]) >= keep:
                        break
                    start = int(sample_pos[pid, k])
                    ctx = _read_context(source, start, len(encoded[pid]))
                    samples[pid].append(PatternHit(file=name, offset=start, context=ctx))
    elapsed = time.perf_counter() - t0

    stats = [
        PatternStats(pattern=pattern_list[i], count=int(counts[i]), samples=samples[i])
        for i in range(n)
    ]
    return ScanReport(
        patterns=stats,
        bytes_scanned=bytes_scanned,
        elapsed_seconds=elapsed,
        files_scanned=files_scanned,
        case_fold=case_fold,
        engine=engine,
        errors=errors,
    )


def filter_absent(patterns: Iterable[str], report: ScanReport) -> tuple[list[str], list[str]]:
    """Partition patterns into (absent, present) by their report counts."""
    absent: list[str] = []
    present: list[str] = []
    for p in patterns:
        if report.stats_for(p).count == 0:
            absent.append(p)
        else:
            present.append(p)
    return absent, present
