"""Exact-match evaluation, diagnostics, seed aggregation, and correlations.

Scoring is exact string match. The strict policy is byte equality; the
canonical policy first collapses space runs, trims the ends, and forces a
single space on each side of every replacement token, which quantifies the
whitespace artifacts that added-token decoding can introduce. Reports carry
per-category accuracies, the lexical/structural breakdown, and the fraction
of lexical-generalization predictions containing at least one replacement
token. Aggregation over seeds reports mean and sample standard deviation,
and the renderer suppresses standard deviations of 0.01 or below.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.stats import t as t_dist

from .cogs import SplitFile
from .errors import EvalError

__all__ = [
    "PredictionFile",
    "CategoryScore",
    "SplitEval",
    "EvalReport",
    "Aggregate",
    "AggregateReport",
    "load_structural_categories",
    "canonicalize",
    "exact_match",
    "evaluate_split",
    "overestimation",
    "test_lex_gap",
    "aggregate_seeds",
    "format_measurement",
    "render_table",
    "spearman",
    "pearson",
]


def load_structural_categories(path=None) -> frozenset[str]:
    """Category tags counted as structural; the default ships with the package."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("lexcontrol").joinpath(
            "data/structural_categories.txt"
        ).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


DEFAULT_STRUCTURAL = load_structural_categories()


# ---------------------------------------------------------------------------
# Prediction files


@dataclass
class PredictionFile:
    rows: list[str]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "PredictionFile":
        p = Path(path)
        text = p.read_text(encoding="utf-8")
        rows = text.split("\n")
        if rows and rows[-1] == "":
            rows.pop()
        meta_path = Path(str(p) + ".meta.json")
        metadata = {}
        if meta_path.exists():
            metadata = json.loads(meta_path.read_text(encoding="utf-8"))
        return cls(rows=rows, metadata=metadata)

    def save(self, path) -> None:
        p = Path(path)
        p.write_text("".join(r + "\n" for r in self.rows), encoding="utf-8")
        if self.metadata:
            Path(str(p) + ".meta.json").write_text(
                json.dumps(self.metadata, indent=2), encoding="utf-8"
            )


# ---------------------------------------------------------------------------
# Exact match

_SPACE_RUN = re.compile(r" {2,}")


def canonicalize(text: str, replacement_tokens=()) -> str:
    out = _SPACE_RUN.sub(" ", text).strip()
    for token in replacement_tokens:
        escaped = re.escape(token)
        out = re.sub(rf" ?{escaped} ?", f" {token} ", out)
    out = _SPACE_RUN.sub(" ", out).strip()
    return out


def exact_match(pred: str, gold: str, policy: str = "strict", replacement_tokens=()) -> bool:
    if policy == "strict":
        return pred == gold
    if policy == "canonical":
        return canonicalize(pred, replacement_tokens) == canonicalize(
            gold, replacement_tokens
        )
    raise EvalError(f"unknown match policy {policy!r}")


# ---------------------------------------------------------------------------
# Split evaluation


@dataclass
class CategoryScore:
    n: int = 0
    correct: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.n if self.n else 0.0


@dataclass
class SplitEval:
    split: str
    policy: str
    n: int
    correct: int
    per_category: dict[str, CategoryScore]
    lexical_accuracy: float | None = None
    structural_accuracy: float | None = None
    novel_token_rate: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def accuracy(self) -> float:
        return self.correct / self.n if self.n else 0.0

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "policy": self.policy,
            "n": self.n,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "per_category": {
                c: {"n": s.n, "correct": s.correct, "accuracy": s.accuracy}
                for c, s in sorted(self.per_category.items())
            },
            "lexical_accuracy": self.lexical_accuracy,
            "structural_accuracy": self.structural_accuracy,
            "novel_token_rate": self.novel_token_rate,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SplitEval":
        return cls(
            split=d["split"],
            policy=d["policy"],
            n=d["n"],
            correct=d["correct"],
            per_category={
                c: CategoryScore(n=s["n"], correct=s["correct"])
                for c, s in d["per_category"].items()
            },
            lexical_accuracy=d.get("lexical_accuracy"),
            structural_accuracy=d.get("structural_accuracy"),
            novel_token_rate=d.get("novel_token_rate"),
            metadata=d.get("metadata", {}),
        )


@dataclass
class EvalReport:
    splits: dict[str, SplitEval] = field(default_factory=dict)

    def add(self, ev: SplitEval) -> "EvalReport":
        self.splits[ev.split] = ev
        return self

    def metrics(self) -> dict[str, float]:
        """Flat metric map; gen also contributes the lexical-only view."""
        out: dict[str, float] = {}
        for name, ev in self.splits.items():
            out[name] = ev.accuracy
            if ev.lexical_accuracy is not None:
                out[f"{name}_lex_only"] = ev.lexical_accuracy
        return out

    def to_dict(self) -> dict:
        return {"splits": {k: v.to_dict() for k, v in sorted(self.splits.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(splits={k: SplitEval.from_dict(v) for k, v in d["splits"].items()})

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))


def evaluate_split(
    preds: PredictionFile,
    ref: SplitFile,
    plan=None,
    policy: str = "strict",
    structural_categories: frozenset[str] | None = None,
) -> SplitEval:
    """Score one prediction file against its reference split."""
    if len(preds.rows) != len(ref.rows):
        raise EvalError(
            f"prediction/reference row count mismatch: {len(preds.rows)} predictions "
            f"vs {len(ref.rows)} reference rows"
        )
    structural = (
        DEFAULT_STRUCTURAL if structural_categories is None else structural_categories
    )
    replacements = tuple(plan.replacements()) if plan is not None else ()

    per_category: dict[str, CategoryScore] = {}
    correct = 0
    lex_n = lex_correct = struct_n = struct_correct = 0
    novel_n = novel_hits = 0
    for pred, row in zip(preds.rows, ref.rows):
        ok = exact_match(pred, row.target, policy, replacements)
        correct += ok
        score = per_category.setdefault(row.category, CategoryScore())
        score.n += 1
        score.correct += ok
        if row.category in structural:
            struct_n += 1
            struct_correct += ok
        else:
            lex_n += 1
            lex_correct += ok
            if replacements:
                novel_n += 1
                novel_hits += any(r in pred for r in replacements)

    has_structural = struct_n > 0
    return SplitEval(
        split=ref.split_name,
        policy=policy,
        n=len(ref.rows),
        correct=correct,
        per_category=per_category,
        lexical_accuracy=(lex_correct / lex_n) if (has_structural and lex_n) else None,
        structural_accuracy=(struct_correct / struct_n) if has_structural else None,
        novel_token_rate=(novel_hits / novel_n) if novel_n and replacements else None,
        metadata=dict(preds.metadata),
    )


# ---------------------------------------------------------------------------
# Derived quantities


def overestimation(baseline_acc: float, controlled_acc: float) -> float:
    """Accuracy gap between the unmodified and exposure-controlled runs."""
    for name, v in (("baseline", baseline_acc), ("controlled", controlled_acc)):
        if not 0.0 <= v <= 1.0:
            raise EvalError(f"{name} accuracy {v} outside [0, 1]")
    return baseline_acc - controlled_acc


def test_lex_gap(test_lex_acc: float | None, gen_lex_only_acc: float | None) -> float:
    if test_lex_acc is None or gen_lex_only_acc is None:
        raise EvalError("test_lex_gap needs both test-lex and lexical-gen accuracies")
    return abs(test_lex_acc - gen_lex_only_acc)


def report_test_lex_gap(report: EvalReport) -> float:
    m = report.metrics()
    test_lex = m.get("testlex", m.get("test_lex"))
    return test_lex_gap(test_lex, m.get("gen_lex_only"))


# ---------------------------------------------------------------------------
# Seed aggregation


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std: float | None
    n: int


@dataclass
class AggregateReport:
    metrics: dict[str, Aggregate]

    def to_dict(self) -> dict:
        return {
            k: {"mean": a.mean, "std": a.std, "n": a.n}
            for k, a in sorted(self.metrics.items())
        }


def _collect_metrics(report: EvalReport) -> dict[str, float | None]:
    out: dict[str, float | None] = {}
    for name, ev in report.splits.items():
        out[f"{name}/accuracy"] = ev.accuracy
        out[f"{name}/lexical_accuracy"] = ev.lexical_accuracy
        out[f"{name}/structural_accuracy"] = ev.structural_accuracy
        out[f"{name}/novel_token_rate"] = ev.novel_token_rate
        for cat, score in ev.per_category.items():
            out[f"{name}/category/{cat}"] = score.accuracy
    return out


def aggregate_seeds(reports: list[EvalReport]) -> AggregateReport:
    """Per-metric mean and sample standard deviation across seed runs."""
    if not reports:
        raise EvalError("no reports to aggregate")
    collected = [_collect_metrics(r) for r in reports]
    keys = set(collected[0])
    for i, c in enumerate(collected[1:], start=2):
        if set(c) != keys:
            only_first = sorted(keys - set(c))[:3]
            only_other = sorted(set(c) - keys)[:3]
            raise EvalError(
                f"report {i} has a different metric structure "
                f"(missing: {only_first}, extra: {only_other})"
            )
    metrics: dict[str, Aggregate] = {}
    for key in sorted(keys):
        values = [c[key] for c in collected]
        if any(v is None for v in values):
            continue
        arr = np.asarray(values, dtype=float)
        std = float(np.std(arr, ddof=1)) if len(arr) >= 2 else None
        metrics[key] = Aggregate(mean=float(arr.mean()), std=std, n=len(arr))
    return AggregateReport(metrics=metrics)


def format_measurement(mean: float, std: float | None) -> str:
    """Render ``0.681 (± 0.022)``; standard deviations of 0.01 or less are omitted."""
    if std is not None and std > 0.01:
        return f"{mean:.3f} (± {std:.3f})"
    return f"{mean:.3f}"


_TABLE_COLUMNS = [
    ("gen/accuracy", "Gen."),
    ("test/accuracy", "Test-ID"),
    ("gen/lexical_accuracy", "Gen. (Lex. only)"),
    ("testlex/accuracy", "Test-Lex"),
]


def render_table(rows: list[tuple[str, AggregateReport]], columns=None) -> str:
    """Text table over aggregated runs, one labelled row per configuration."""
    columns = columns or _TABLE_COLUMNS
    present = [(key, title) for key, title in columns if any(
        key in agg.metrics for _, agg in rows
    )]
    header = ["Run"] + [title for _, title in present]
    body: list[list[str]] = []
    for label, agg in rows:
        cells = [label]
        for key, _ in present:
            a = agg.metrics.get(key)
            cells.append(format_measurement(a.mean, a.std) if a else "-")
        body.append(cells)
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for cells in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Correlations


def _as_xy(x, y, op: str) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1 or len(xa) != len(ya):
        raise EvalError(f"{op}: inputs must be 1-d sequences of equal length")
    if len(xa) < 3:
        raise EvalError(f"{op}: need at least 3 points, got {len(xa)}")
    if not (np.isfinite(xa).all() and np.isfinite(ya).all()):
        raise EvalError(f"{op}: inputs must be finite")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise EvalError(f"{op}: constant input has no defined correlation")
    return xa, ya


def _t_pvalue(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * t_dist.sf(abs(t), n - 2))


def pearson(x, y) -> tuple[float, float]:
    """Correlation coefficient with a two-sided t-approximation p-value."""
    xa, ya = _as_xy(x, y, "pearson")
    xd = xa - xa.mean()
    yd = ya - ya.mean()
    r = float((xd * yd).sum() / math.sqrt((xd * xd).sum() * (yd * yd).sum()))
    r = max(-1.0, min(1.0, r))
    return r, _t_pvalue(r, len(xa))


def _average_ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> tuple[float, float]:
    """Rank correlation with average ranks for ties; t-approximation p-value."""
    xa, ya = _as_xy(x, y, "spearman")
    return pearson(_average_ranks(xa), _average_ranks(ya))
