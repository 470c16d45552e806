"""Client for an external chat-completion service that judges semantic
equivalence of attribute-value pairs.

The service receives one prompt per (ground truth, prediction) pair and must
answer with a standalone MATCH or NO_MATCH token. Verdicts are cached in an
append-only newline-delimited JSON file keyed by the normalized pair (the
prompt is path-agnostic), duplicate pairs in flight share one upstream call,
and at most ``max_in_flight`` requests are outstanding per client instance.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests as _requests

from .evaluation import MatchVerdict, Verdict, VerdictSource

ENV_URL = "CHARTDESIGN_JUDGE_URL"
ENV_KEY = "CHARTDESIGN_JUDGE_KEY"

ERROR_RATIONALE_PREFIX = "judge error:"

PROMPT_TEMPLATE = (
    "You are evaluating the accuracy of predicted chart design attributes. "
    "For each pair of ground-truth and predicted values, respond with `MATCH` "
    "if they are semantically equivalent (e.g., “bar” and “bar chart”) "
    "and `NO_MATCH` otherwise. Use natural-language reasoning to decide "
    "semantic equivalence."
)

# NO_MATCH must win over its MATCH substring; the lookarounds keep tokens
# standalone (no letter/digit/underscore on either side). NO-MATCH / NO MATCH
# spellings count as NO_MATCH.
_VERDICT_RE = re.compile(r"(?<![A-Za-z0-9_])(NO[ _-]?MATCH|MATCH)(?![A-Za-z0-9_])", re.IGNORECASE)


class JudgeResponseError(ValueError):
    """The service answered without a MATCH/NO_MATCH token."""


class JudgeTransportError(RuntimeError):
    """The service could not be reached or answered malformed JSON."""


@dataclass(frozen=True)
class JudgeRequest:
    """One pair to judge; values are the normalized renderings the rule
    engine uses. ``path`` is carried for reporting only."""

    truth_value: str
    pred_value: str
    path: str = ""


@dataclass(frozen=True)
class JudgeConfig:
    endpoint_url: str
    model_name: str = "judge"
    timeout: float = 30.0
    max_in_flight: int = 4
    cache_path: Path | None = None
    max_retries: int = 2
    backoff_base: float = 0.25
    api_key: str | None = None

    @classmethod
    def from_env(cls, **overrides) -> "JudgeConfig":
        """Build a config from CHARTDESIGN_JUDGE_URL / CHARTDESIGN_JUDGE_KEY."""
        overrides.setdefault("endpoint_url", os.environ.get(ENV_URL, ""))
        overrides.setdefault("api_key", os.environ.get(ENV_KEY) or None)
        return cls(**overrides)


def build_prompt(request: JudgeRequest) -> str:
    """Instantiate the evaluation prompt for one pair. Deterministic, and
    independent of the attribute path."""
    return (
        f"{PROMPT_TEMPLATE}\n\n"
        f"Ground-truth value: {request.truth_value}\n"
        f"Predicted value: {request.pred_value}"
    )


def parse_response(text: str) -> Verdict:
    """Extract the verdict: first standalone MATCH/NO_MATCH token wins,
    case-insensitively. Raises JudgeResponseError when neither appears."""
    m = _VERDICT_RE.search(text)
    if m is None:
        raise JudgeResponseError(f"no MATCH/NO_MATCH token in response: {text[:200]!r}")
    return Verdict.NO_MATCH if m.group(1).upper().startswith("NO") else Verdict.MATCH


class JudgeClient:
    """Thread-safe judging client with caching, deduplication, retries, and
    a global in-flight bound. May be used from several threads at once."""

    def __init__(self, config: JudgeConfig):
        if config.endpoint_url == "":
            raise ValueError(f"judge endpoint missing (flag or {ENV_URL})")
        if config.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.config = config
        self._lock = threading.Lock()
        self._cache: dict[tuple[str, str], Verdict] = {}
        self._pending: dict[tuple[str, str], Future] = {}
        self._pool = ThreadPoolExecutor(max_workers=config.max_in_flight)
        if config.cache_path is not None:
            self._load_cache(Path(config.cache_path))

    def close(self) -> None:
        self._pool.shutdown(wait=True)

    def __enter__(self) -> "JudgeClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _load_cache(self, path: Path) -> None:
        if not path.exists():
            return
        for line in path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                self._cache[(record["truth"], record["pred"])] = Verdict(record["verdict"])
            except (ValueError, KeyError):
                continue  # a torn write from an interrupted run; skip it

    def _append_cache(self, key: tuple[str, str], verdict: Verdict) -> None:
        if self.config.cache_path is None:
            return
        record = json.dumps({"truth": key[0], "pred": key[1], "verdict": verdict.value})
        with open(self.config.cache_path, "a", encoding="utf-8") as fh:
            fh.write(record + "\n")

    def judge_pairs(self, requests: list[JudgeRequest]) -> list[MatchVerdict]:
        """Judge a batch; results are index-aligned with the input. Transport
        failures become error-flagged NO_MATCH verdicts, never exceptions."""
        slots: list[Verdict | Future | Exception] = []
        with self._lock:
            for request in requests:
                key = (request.truth_value, request.pred_value)
                if key in self._cache:
                    slots.append(self._cache[key])
                elif key in self._pending:
                    slots.append(self._pending[key])
                else:
                    future = self._pool.submit(self._call_and_store, key, request)
                    self._pending[key] = future
                    slots.append(future)

        verdicts = []
        for request, slot in zip(requests, slots):
            if isinstance(slot, Future):
                try:
                    slot = slot.result()
                except Exception as exc:  # noqa: BLE001 - must not abort the batch
                    slot = exc
            if isinstance(slot, Exception):
                verdicts.append(
                    MatchVerdict(
                        request.path,
                        Verdict.NO_MATCH,
                        VerdictSource.JUDGE,
                        f"{ERROR_RATIONALE_PREFIX} {slot}",
                    )
                )
            else:
                verdicts.append(
                    MatchVerdict(request.path, slot, VerdictSource.JUDGE, "llm judge")
                )
        return verdicts

    def _call_and_store(self, key: tuple[str, str], request: JudgeRequest) -> Verdict:
        try:
            verdict = self._call(request)
        except Exception:
            with self._lock:
                self._pending.pop(key, None)  # failures stay uncached, retryable later
            raise
        with self._lock:
            self._cache[key] = verdict
            self._append_cache(key, verdict)
            self._pending.pop(key, None)
        return verdict

    def _call(self, request: JudgeRequest) -> Verdict:
        body = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": build_prompt(request)}],
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"

        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
            try:
                response = _requests.post(
                    self.config.endpoint_url,
                    json=body,
                    headers=headers,
                    timeout=self.config.timeout,
                )
                response.raise_for_status()
                payload = response.json()
                content = payload["choices"][0]["message"]["content"]
            except (_requests.RequestException, ValueError, KeyError, IndexError) as exc:
                last_error = JudgeTransportError(str(exc))
                continue
            return parse_response(content)  # unparseable verdicts are not retried
        raise last_error if last_error else JudgeTransportError("no attempts made")


def judge_pairs(requests: list[JudgeRequest], config: JudgeConfig) -> list[MatchVerdict]:
    """One-shot convenience wrapper around a short-lived JudgeClient."""
    with JudgeClient(config) as client:
        return client.judge_pairs(requests)
