"""Inverse-frequency weighting and batch sampling over a design corpus.

Rare attribute values get large importance weights, w = ln(1 + total/count)
(natural log; the base only rescales weights uniformly). An example's weight
is the product over its flattened attribute values, discounted once per
applicable-but-absent attribute, and the normalized weights form the
sampling distribution from which batches are drawn with replacement using
NumPy's PCG64 generator.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import schema
from .evaluation import flatten, scalar_text
from .schema import ChartType, DesignSpec


def pair_key(path: str, value) -> str:
    """Render a flattened attribute as its counting key, "path=value"."""
    return f"{path}={scalar_text(value)}"


@dataclass(frozen=True)
class CountTable:
    """Document frequency of every attribute value over a corpus of size
    ``total``."""

    counts: dict[str, int]
    total: int


@dataclass(frozen=True)
class WeightTable:
    weights: dict[str, float]


@dataclass(frozen=True)
class SampleDistribution:
    """Per-example sampling probabilities, index-aligned with the corpus."""

    probabilities: tuple[float, ...]


@dataclass(frozen=True)
class CoverageReport:
    """Attribute-value frequencies per batch, plus the pooled totals."""

    per_batch: tuple[dict[str, int], ...]
    aggregate: dict[str, int]

    def to_json(self) -> dict[str, Any]:
        return {
            "per_batch": [dict(b) for b in self.per_batch],
            "aggregate": dict(self.aggregate),
        }


@dataclass(frozen=True)
class StatsReport:
    """Corpus composition by source: totals, chart types, bar sub-types,
    alignment inventory, and observed grid-line count ranges."""

    totals: dict[str, int]
    chart_types: dict[str, dict[str, int]]
    sub_types: dict[str, dict[str, int]]
    alignment_values: dict[str, tuple[str, ...]]
    grid_line_ranges: dict[str, dict[str, tuple[int, int] | None]]

    def to_json(self) -> dict[str, Any]:
        return {
            "totals": dict(self.totals),
            "chart_types": {s: dict(c) for s, c in self.chart_types.items()},
            "sub_types": {s: dict(c) for s, c in self.sub_types.items()},
            "alignment_values": {s: list(v) for s, v in self.alignment_values.items()},
            "grid_line_ranges": {
                s: {axis: list(r) if r else None for axis, r in axes.items()}
                for s, axes in self.grid_line_ranges.items()
            },
        }


def attribute_counts(corpus: Sequence[DesignSpec]) -> CountTable:
    """Count, per attribute value, how many corpus examples contain it."""
    if not corpus:
        raise ValueError("corpus is empty")
    counts: Counter[str] = Counter()
    for spec in corpus:
        counts.update(pair_key(f.path, f.value) for f in flatten(spec))
    return CountTable(counts=dict(counts), total=len(corpus))


def value_weight(n_k: int, total: int) -> float:
    """Importance of an attribute value seen in n_k of ``total`` examples:
    ln(1 + total/n_k). Strictly decreasing in n_k; equals ln 2 at n_k=total."""
    if n_k <= 0:
        raise ValueError("attribute value was never observed (count must be >= 1)")
    if n_k > total:
        raise ValueError(f"count {n_k} exceeds corpus size {total}")
    return math.log(1 + total / n_k)


def compute_weights(counts: CountTable) -> WeightTable:
    return WeightTable(
        {key: value_weight(n, counts.total) for key, n in counts.counts.items()}
    )


def example_weight(
    spec: DesignSpec, weights: WeightTable, penalty: float = 0.9
) -> float:
    """Sampling weight of one example: the product of its attribute-value
    weights, times ``penalty`` once per applicable-but-absent attribute."""
    if not 0 < penalty <= 1:
        raise ValueError(f"penalty must be in (0, 1], got {penalty}")
    weight = 1.0
    for flat in flatten(spec):
        key = pair_key(flat.path, flat.value)
        try:
            weight *= weights.weights[key]
        except KeyError:
            raise ValueError(f"attribute value not in weight table: {key}") from None
    absent = sum(
        1
        for key in schema.applicability(spec.chart_type)
        if key != "text_elements" and getattr(spec, key) is None
    )
    return weight * penalty**absent


def normalize_weights(raw: Sequence[float]) -> SampleDistribution:
    """Scale positive weights so they sum to 1."""
    if not raw:
        raise ValueError("no weights to normalize")
    if any(w <= 0 for w in raw):
        raise ValueError("all weights must be positive")
    total = math.fsum(raw)
    return SampleDistribution(tuple(w / total for w in raw))


def sample_batches(
    dist: SampleDistribution, batch_size: int, num_batches: int, seed: int
) -> list[list[int]]:
    """Draw ``num_batches`` batches of corpus indices i.i.d. with replacement."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if num_batches < 0:
        raise ValueError("num_batches must be >= 0")
    rng = np.random.default_rng(seed)
    draws = rng.choice(
        len(dist.probabilities),
        size=(num_batches, batch_size),
        replace=True,
        p=np.asarray(dist.probabilities),
    )
    return [[int(i) for i in batch] for batch in draws]


def coverage_log(
    batches: Sequence[Sequence[int]], corpus: Sequence[DesignSpec]
) -> CoverageReport:
    """Tally attribute values per batch to audit class coverage."""
    per_batch = []
    aggregate: Counter[str] = Counter()
    for batch in batches:
        tally: Counter[str] = Counter()
        for index in batch:
            if not 0 <= index < len(corpus):
                raise IndexError(f"batch index {index} outside corpus of {len(corpus)}")
            tally.update(pair_key(f.path, f.value) for f in flatten(corpus[index]))
        per_batch.append(dict(tally))
        aggregate.update(tally)
    return CoverageReport(per_batch=tuple(per_batch), aggregate=dict(aggregate))


def corpus_stats(
    corpus: Sequence[DesignSpec], source_tags: Sequence[str]
) -> StatsReport:
    """Per-source composition report over a tagged corpus."""
    if not corpus:
        raise ValueError("corpus is empty")
    if len(corpus) != len(source_tags):
        raise ValueError(
            f"{len(corpus)} specs but {len(source_tags)} source tags"
        )

    sources = sorted(set(source_tags))
    totals = {s: 0 for s in sources}
    chart_types = {s: {t.value: 0 for t in ChartType} for s in sources}
    sub_types: dict[str, Counter[str]] = {s: Counter() for s in sources}
    alignments: dict[str, set[str]] = {s: set() for s in sources}
    grid_values: dict[str, dict[str, list[int]]] = {
        s: {"horizontal": [], "vertical": []} for s in sources
    }

    for spec, source in zip(corpus, source_tags):
        totals[source] += 1
        chart_types[source][spec.chart_type.value] += 1
        if spec.sub_chart_type is not None:
            sub_types[source][spec.sub_chart_type] += 1
        if spec.chart_alignment is not None:
            alignments[source].add(spec.chart_alignment)
        if spec.grid_lines is not None:
            if spec.grid_lines.horizontal is not None:
                grid_values[source]["horizontal"].append(spec.grid_lines.horizontal)
            if spec.grid_lines.vertical is not None:
                grid_values[source]["vertical"].append(spec.grid_lines.vertical)

    return StatsReport(
        totals=totals,
        chart_types=chart_types,
        sub_types={s: dict(c) for s, c in sub_types.items()},
        alignment_values={s: tuple(sorted(v)) for s, v in alignments.items()},
        grid_line_ranges={
            s: {
                axis: (min(vals), max(vals)) if vals else None
                for axis, vals in axes.items()
            }
            for s, axes in grid_values.items()
        },
    )
