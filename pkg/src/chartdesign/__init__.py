"""chartdesign: a toolkit for renderer-agnostic chart design specifications.

Subpackages cover the full non-training pipeline around design JSONs:
schema (parse/validate/canonicalize), tabular (CSV bundles, perturbation and
masking harnesses), sampling (inverse-frequency weighting and batch draws),
evaluation (flatten/align/judge/score), judge (remote equivalence client),
emitters (Vega-Lite plus matplotlib/ggplot2/altair scripts), and cli.
"""

from . import emitters, evaluation, judge, sampling, schema, tabular
from .schema import ChartType, DesignSpec, parse_design, serialize, validate

__version__ = "0.1.0"

__all__ = [
    "ChartType",
    "DesignSpec",
    "__version__",
    "emitters",
    "evaluation",
    "judge",
    "parse_design",
    "sampling",
    "schema",
    "serialize",
    "tabular",
    "validate",
]
