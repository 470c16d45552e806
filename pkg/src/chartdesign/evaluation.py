"""Attribute-level comparison of design specs.

Predictions are scored against ground truth by flattening both documents
into (attribute path, scalar value) pairs, aligning them by path, deciding
MATCH/NO_MATCH per pair (deterministic rules first, an optional judge for
the remainder), and pooling the verdicts into per-attribute accuracies plus
their unweighted macro average.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from statistics import fmean
from typing import Any, Iterable, Sequence

from . import schema
from .schema import DesignSpec

Scalar = int | float | str | bool


class Verdict(str, Enum):
    MATCH = "MATCH"
    NO_MATCH = "NO_MATCH"


class VerdictSource(str, Enum):
    RULE = "rule"
    JUDGE = "judge"


@dataclass(frozen=True)
class FlatAttribute:
    path: str
    value: Scalar


@dataclass(frozen=True)
class AlignedPair:
    path: str
    truth_value: Scalar
    pred_value: Scalar | None = None  # None: the prediction omits this path


@dataclass(frozen=True)
class MatchVerdict:
    path: str
    verdict: Verdict
    source: VerdictSource
    rationale: str


@dataclass(frozen=True)
class MatchPolicy:
    """Tolerances for the rule engine; integers always compare exactly."""

    numeric_rel_tol: float = 0.05


DEFAULT_POLICY = MatchPolicy()


@dataclass(frozen=True)
class EvalReport:
    per_attribute: dict[str, float]
    macro: float
    counts: dict[str, tuple[int, int]]
    extras: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "per_attribute": dict(self.per_attribute),
            "macro": self.macro,
            "counts": {p: list(c) for p, c in self.counts.items()},
            "extras": list(self.extras),
        }


# --------------------------------------------------------------------------
# Scalar rendering


def scalar_text(value: Scalar) -> str:
    """Deterministic text rendering of a flattened value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return json.dumps(value)
    return value


def _as_number(value: Scalar) -> float | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(value.strip())
    except (ValueError, AttributeError):
        return None


def normalize_value(value: Scalar) -> str:
    """The normalized rendering the matcher, the judge, and its cache share.

    Numbers (and numeric strings) render canonically; text is trimmed,
    lowercased, and whitespace/punctuation runs collapse to single spaces.
    """
    num = _as_number(value)
    if num is not None:
        return json.dumps(int(num) if num.is_integer() else num)
    return schema.normalize_token(scalar_text(value))


# --------------------------------------------------------------------------
# Flatten / unflatten


def flatten(spec: DesignSpec) -> list[FlatAttribute]:
    """List a spec's leaf values as dot-joined paths, in canonical order.

    Lists flatten with numeric indices ("legend.labels.0"). The spec only
    needs to parse; validity is not required, so predictions flatten too.
    """
    out: list[FlatAttribute] = []
    _walk(schema.spec_to_obj(spec), "", out)
    return out


def _walk(node: Any, prefix: str, out: list[FlatAttribute]) -> None:
    if isinstance(node, dict):
        for key, value in node.items():
            _walk(value, f"{prefix}{key}.", out)
    elif isinstance(node, list):
        for i, value in enumerate(node):
            _walk(value, f"{prefix}{i}.", out)
    else:
        out.append(FlatAttribute(prefix[:-1], node))


def unflatten(flats: Iterable[FlatAttribute]) -> DesignSpec:
    """Rebuild a spec from flattened attributes; inverse of flatten up to
    normalization (unflatten(flatten(s)) == normalize(s) for valid s)."""
    root: dict[str, Any] = {}
    for flat in flats:
        segments = flat.path.split(".")
        node = root
        for seg in segments[:-1]:
            node = node.setdefault(seg, {})
            if not isinstance(node, dict):
                raise ValueError(f"path {flat.path!r} descends through a scalar")
        leaf = segments[-1]
        if leaf in node:
            raise ValueError(f"duplicate attribute path {flat.path!r}")
        node[leaf] = flat.value
    obj = _listify(root)
    issues: list[schema.ValidationIssue] = []
    spec, _ = schema._build_spec(obj, issues)
    if issues or spec is None:
        raise schema.InvalidDesignError(issues)
    return schema.normalize(spec)


def _listify(node: Any) -> Any:
    if not isinstance(node, dict):
        return node
    converted = {k: _listify(v) for k, v in node.items()}
    if converted and all(k.isdigit() for k in converted):
        indices = sorted(int(k) for k in converted)
        if indices != list(range(len(indices))):
            raise ValueError(f"list indices not contiguous: {sorted(converted)}")
        return [converted[str(i)] for i in indices]
    return converted


# --------------------------------------------------------------------------
# Alignment


def align(
    truth: Sequence[FlatAttribute], pred: Sequence[FlatAttribute]
) -> tuple[list[AlignedPair], list[FlatAttribute]]:
    """Pair every ground-truth attribute with the prediction's value at the
    same path. Returns (pairs, extras): extras are predicted-only attributes,
    reported but never scored."""
    truth_paths = [f.path for f in truth]
    pred_paths = [f.path for f in pred]
    for side, paths in (("truth", truth_paths), ("prediction", pred_paths)):
        seen = set()
        for p in paths:
            if p in seen:
                raise ValueError(f"duplicate attribute path in {side}: {p!r}")
            seen.add(p)

    pred_by_path = {f.path: f.value for f in pred}
    pairs = [
        AlignedPair(f.path, f.value, pred_by_path.get(f.path)) for f in truth
    ]
    truth_set = set(truth_paths)
    extras = [f for f in pred if f.path not in truth_set]
    return pairs, extras


# --------------------------------------------------------------------------
# Rule engine


def match_rule(
    truth_value: Scalar,
    pred_value: Scalar,
    policy: MatchPolicy = DEFAULT_POLICY,
    path: str = "",
) -> MatchVerdict | None:
    """Decide a pair when the rules are confident; return None when not.

    Rules, in order: exact equality after text normalization; numeric
    comparison (integers exact, otherwise a symmetric relative tolerance);
    synonym-table agreement. Anything else is left for the judge.
    """
    t_norm, p_norm = normalize_value(truth_value), normalize_value(pred_value)
    if t_norm == p_norm:
        return MatchVerdict(path, Verdict.MATCH, VerdictSource.RULE, "exact after normalization")

    t_num, p_num = _as_number(truth_value), _as_number(pred_value)
    if t_num is not None and p_num is not None:
        if t_num.is_integer() and p_num.is_integer():
            verdict = Verdict.MATCH if t_num == p_num else Verdict.NO_MATCH
            return MatchVerdict(path, verdict, VerdictSource.RULE, "integer comparison")
        tol = policy.numeric_rel_tol * max(abs(t_num), abs(p_num))
        verdict = Verdict.MATCH if abs(t_num - p_num) <= tol else Verdict.NO_MATCH
        return MatchVerdict(
            path,
            verdict,
            VerdictSource.RULE,
            f"relative difference vs {policy.numeric_rel_tol:.0%} tolerance",
        )
    if (t_num is None) != (p_num is None):
        return None  # number against text: let the judge read it

    t_canon = schema.resolve_any_enum(str(truth_value))
    p_canon = schema.resolve_any_enum(str(pred_value))
    if t_canon is not None and p_canon is not None:
        verdict = Verdict.MATCH if t_canon == p_canon else Verdict.NO_MATCH
        return MatchVerdict(path, verdict, VerdictSource.RULE, "synonym table")
    return None


# --------------------------------------------------------------------------
# Evaluation pipeline


def evaluate(
    truth: DesignSpec,
    pred: DesignSpec,
    judge=None,
    policy: MatchPolicy = DEFAULT_POLICY,
) -> list[MatchVerdict]:
    """Score one prediction against its ground truth, one verdict per
    ground-truth attribute, in alignment order.

    ``judge`` is an object exposing ``judge_pairs(requests)`` (see the judge
    module); without one, rule-undecided pairs score NO_MATCH.
    """
    pairs, _ = align(flatten(truth), flatten(pred))
    verdicts: list[MatchVerdict | None] = []
    undecided: list[tuple[int, AlignedPair]] = []

    for pair in pairs:
        if pair.pred_value is None:
            verdicts.append(
                MatchVerdict(
                    pair.path,
                    Verdict.NO_MATCH,
                    VerdictSource.RULE,
                    "attribute missing from prediction",
                )
            )
            continue
        ruled = match_rule(pair.truth_value, pair.pred_value, policy, pair.path)
        if ruled is not None:
            verdicts.append(ruled)
        else:
            undecided.append((len(verdicts), pair))
            verdicts.append(None)

    if undecided:
        if judge is None:
            for index, pair in undecided:
                verdicts[index] = MatchVerdict(
                    pair.path, Verdict.NO_MATCH, VerdictSource.RULE, "undecided, no judge"
                )
        else:
            from .judge import JudgeRequest

            requests = [
                JudgeRequest(
                    truth_value=normalize_value(pair.truth_value),
                    pred_value=normalize_value(pair.pred_value),
                    path=pair.path,
                )
                for _, pair in undecided
            ]
            for (index, _), verdict in zip(undecided, judge.judge_pairs(requests)):
                verdicts[index] = verdict

    return verdicts  # type: ignore[return-value]


def score(verdicts: Sequence[MatchVerdict], extras: Iterable[str] = ()) -> EvalReport:
    """Pool verdicts across a test set into per-path accuracies and their
    unweighted macro average."""
    if not verdicts:
        raise ValueError("cannot score an empty verdict set")
    counts: dict[str, tuple[int, int]] = {}
    for v in verdicts:
        matched, total = counts.get(v.path, (0, 0))
        counts[v.path] = (matched + (v.verdict is Verdict.MATCH), total + 1)
    per_attribute = {p: m / t for p, (m, t) in counts.items()}
    return EvalReport(
        per_attribute=per_attribute,
        macro=fmean(per_attribute.values()),
        counts=counts,
        extras=tuple(dict.fromkeys(extras)),
    )


def top_level_rollup(report: EvalReport) -> dict[str, float]:
    """Accuracy pooled by top-level attribute (first path segment)."""
    pooled: dict[str, list[int]] = {}
    for path, (m, t) in report.counts.items():
        top = path.split(".", 1)[0]
        matched, total = pooled.setdefault(top, [0, 0])
        pooled[top] = [matched + m, total + t]
    return {k: m / t for k, (m, t) in pooled.items()}


def agreement(
    verdicts: Sequence[MatchVerdict], labels: Sequence[Verdict | str]
) -> float:
    """Fraction of verdicts equal to reference labels (e.g. human raters)."""
    if len(verdicts) != len(labels):
        raise ValueError(
            f"got {len(verdicts)} verdicts but {len(labels)} labels"
        )
    if not verdicts:
        raise ValueError("cannot compute agreement over an empty set")
    hits = sum(v.verdict is Verdict(label) for v, label in zip(verdicts, labels))
    return hits / len(verdicts)
