"""Command-line interface: one subcommand per pipeline stage.

Exit codes are stable: 0 success, 1 validation failure, 2 I/O or config
error, 3 judge/transport error. Reports are JSON on stdout (or at -o /
--report); diagnostics go to stderr. Randomized subcommands require an
explicit --seed so runs are reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import emitters, evaluation, sampling, schema, tabular
from .judge import ERROR_RATIONALE_PREFIX, JudgeClient, JudgeConfig

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_JUDGE = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _emit_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        try:
            Path(out).write_text(text, "utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from None


def _parse_spec_file(path: str | Path) -> schema.DesignSpec:
    try:
        return schema.parse_design(_read_text(path))
    except schema.DesignParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_VALIDATION) from None
    except schema.InvalidDesignError as exc:
        detail = "; ".join(f"{i.path} ({i.code.value})" for i in exc.issues)
        raise CliError(f"{path}: {detail}", EXIT_VALIDATION) from None


def _load_corpus(root: str | Path) -> tuple[list[schema.DesignSpec], list[str], list[str]]:
    """Load every *.json under a corpus directory.

    Returns (specs, source tags, file names); the tag is the immediate
    subdirectory under the root, or the root's own name for loose files.
    """
    root = Path(root)
    if not root.is_dir():
        raise CliError(f"corpus directory not found: {root}", EXIT_IO)
    files = sorted(root.rglob("*.json"))
    if not files:
        raise CliError(f"no *.json specs under {root}", EXIT_IO)
    specs, tags, names = [], [], []
    for path in files:
        specs.append(_parse_spec_file(path))
        relative = path.relative_to(root)
        tags.append(relative.parts[0] if len(relative.parts) > 1 else root.name)
        names.append(str(relative))
    return specs, tags, names


# --------------------------------------------------------------------------
# Subcommand handlers


def _cmd_validate(args) -> int:
    try:
        spec = _parse_spec_file(args.spec)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    issues = schema.validate(spec)
    payload = [{"path": i.path, "code": i.code.value, "message": i.message} for i in issues]
    _emit_output(json.dumps(payload, indent=2), args.output)
    return EXIT_VALIDATION if issues else EXIT_OK


def _cmd_flatten(args) -> int:
    spec = _parse_spec_file(args.spec)
    payload = [{"path": f.path, "value": f.value} for f in evaluation.flatten(spec)]
    _emit_output(json.dumps(payload, indent=2), args.output)
    return EXIT_OK


def _make_judge(args) -> JudgeClient | None:
    if args.rules_only:
        return None
    overrides = {}
    if args.judge_url:
        overrides["endpoint_url"] = args.judge_url
    if args.judge_cache:
        overrides["cache_path"] = Path(args.judge_cache)
    config = JudgeConfig.from_env(**overrides)
    if not config.endpoint_url:
        return None  # no endpoint anywhere: rule engine only
    try:
        return JudgeClient(config)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_IO) from None


def _cmd_eval(args) -> int:
    truth_dir, pred_dir = Path(args.truth), Path(args.pred)
    for d in (truth_dir, pred_dir):
        if not d.is_dir():
            raise CliError(f"not a directory: {d}", EXIT_IO)
    truth_files = {p.name: p for p in sorted(truth_dir.glob("*.json"))}
    pred_files = {p.name: p for p in sorted(pred_dir.glob("*.json"))}
    if not truth_files:
        raise CliError(f"no *.json files in {truth_dir}", EXIT_IO)
    for name in sorted(set(truth_files) ^ set(pred_files)):
        side = "prediction" if name in truth_files else "ground truth"
        print(f"skipping {name}: no matching {side} file", file=sys.stderr)

    policy = evaluation.MatchPolicy(numeric_rel_tol=args.tolerance)
    judge = _make_judge(args)
    verdicts: list[evaluation.MatchVerdict] = []
    extras: list[str] = []
    for name in sorted(set(truth_files) & set(pred_files)):
        truth = _parse_spec_file(truth_files[name])
        try:
            pred = _parse_spec_file(pred_files[name])
        except CliError as exc:
            print(f"unparseable prediction scored as empty: {exc}", file=sys.stderr)
            verdicts.extend(
                evaluation.MatchVerdict(
                    f.path,
                    evaluation.Verdict.NO_MATCH,
                    evaluation.VerdictSource.RULE,
                    "prediction unparseable",
                )
                for f in evaluation.flatten(truth)
            )
            continue
        verdicts.extend(evaluation.evaluate(truth, pred, judge=judge, policy=policy))
        _, extra_flats = evaluation.align(evaluation.flatten(truth), evaluation.flatten(pred))
        extras.extend(f.path for f in extra_flats)
    if judge is not None:
        judge.close()

    if not verdicts:
        raise CliError("no chart pairs to evaluate", EXIT_IO)
    report = evaluation.score(verdicts, extras)
    _emit_output(json.dumps(report.to_json(), indent=2), args.report)
    judge_failures = sum(v.rationale.startswith(ERROR_RATIONALE_PREFIX) for v in verdicts)
    if judge_failures:
        print(f"{judge_failures} pair(s) hit judge transport errors", file=sys.stderr)
        return EXIT_JUDGE
    return EXIT_OK


def _distribution(specs: list[schema.DesignSpec], names: list[str], penalty: float):
    for spec, name in zip(specs, names):
        issues = schema.validate(spec)
        if issues:
            raise CliError(
                f"{name} does not validate: "
                + "; ".join(f"{i.path} ({i.code.value})" for i in issues),
                EXIT_VALIDATION,
            )
    counts = sampling.attribute_counts(specs)
    weights = sampling.compute_weights(counts)
    raw = [sampling.example_weight(s, weights, penalty) for s in specs]
    return sampling.normalize_weights(raw)


def _cmd_sample(args) -> int:
    specs, _, names = _load_corpus(args.corpus)
    dist = _distribution(specs, names, args.penalty)
    batches = sampling.sample_batches(dist, args.batch_size, args.batches, args.seed)
    _emit_output(json.dumps(batches), args.output)
    return EXIT_OK


def _cmd_stats(args) -> int:
    specs, tags, _ = _load_corpus(args.corpus)
    report = sampling.corpus_stats(specs, tags)
    _emit_output(json.dumps(report.to_json(), indent=2), args.output)
    return EXIT_OK


def _cmd_emit(args) -> int:
    spec = _parse_spec_file(args.spec)
    tables = tabular.parse_csv_bundle(_read_text(args.data))
    if len(tables) > 1:
        print(f"data has {len(tables)} tables; using {tables[0].name}", file=sys.stderr)
    try:
        result = emitters.emit(spec, tables[0], args.backend)
    except emitters.EmitError as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from None
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    _emit_output(result.content, args.output)
    return EXIT_OK


def _cmd_perturb(args) -> int:
    tables = tabular.parse_csv_bundle(_read_text(args.data))
    if args.mode in ("missing", "outliers") and args.fraction is None:
        raise CliError(f"--fraction is required for mode {args.mode}", EXIT_IO)
    outputs = []
    try:
        for i, table in enumerate(tables):
            seed = args.seed + i  # one stream per table
            if args.mode == "missing":
                outputs.append(
                    tabular.serialize_table(tabular.perturb_missing(table, args.fraction, seed))
                )
            elif args.mode == "outliers":
                outputs.append(
                    tabular.serialize_table(tabular.perturb_outliers(table, args.fraction, seed))
                )
            else:
                outputs.append(tabular.perturb_format(table, seed))
    except (ValueError, tabular.TableError) as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from None
    _emit_output("\n".join(outputs), args.output)
    return EXIT_OK


def _cmd_mask(args) -> int:
    tables = tabular.parse_csv_bundle(_read_text(args.data))
    masked = [tabular.mask_numeric(t) for t in tables]
    _emit_output(tabular.serialize_bundle(masked), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chartdesign",
        description="Chart design specs: validate, evaluate, sample, emit, perturb.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("-o", "--output", default=None, help="write result here instead of stdout")
        return p

    p = add("validate", _cmd_validate, "check one design JSON against the schema")
    p.add_argument("spec", help="design JSON file")

    p = add("flatten", _cmd_flatten, "list a design's attribute paths and values")
    p.add_argument("spec", help="design JSON file")

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.set_defaults(handler=_cmd_eval)
    p.add_argument("--truth", required=True, help="directory of ground-truth design JSONs")
    p.add_argument("--pred", required=True, help="directory of predicted design JSONs")
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--rules-only", action="store_true", help="never call the judge (fully offline)"
    )
    group.add_argument("--judge-url", default=None, help="judge endpoint (default: env)")
    p.add_argument("--judge-cache", default=None, help="append-only verdict cache for resumable runs")
    p.add_argument("--tolerance", type=float, default=0.05, help="relative numeric tolerance")
    p.add_argument("--report", default=None, help="write the JSON report here")

    p = add("sample", _cmd_sample, "draw weighted training batches")
    p.add_argument("--corpus", required=True, help="directory of design JSONs")
    p.add_argument("--batch-size", type=int, default=4)
    p.add_argument("--batches", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--penalty", type=float, default=0.9, help="per-missing-attribute factor")

    p = add("stats", _cmd_stats, "corpus composition report")
    p.add_argument("--corpus", required=True)

    p = add("emit", _cmd_emit, "compile a (spec, data) pair for a backend")
    p.add_argument("--spec", required=True)
    p.add_argument("--data", required=True)
    p.add_argument(
        "--backend",
        required=True,
        choices=[b.value for b in emitters.Backend],
    )

    p = add("perturb", _cmd_perturb, "stress-test transforms for CSV inputs")
    p.add_argument("--data", required=True)
    p.add_argument("--mode", required=True, choices=["missing", "outliers", "format"])
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--seed", type=int, required=True)

    p = add("mask", _cmd_mask, "replace numeric cells with <MASKED>")
    p.add_argument("--data", required=True)

    return parser


def run(argv: list[str]) -> int:
    """Dispatch one invocation; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_IO
    try:
        return args.handler(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except tabular.TableError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:  # bad flag values (penalty, fractions, ...)
        print(str(exc), file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
