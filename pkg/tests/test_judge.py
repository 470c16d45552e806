import json

import pytest

from chartdesign.evaluation import Verdict, VerdictSource
from chartdesign.judge import (
    ERROR_RATIONALE_PREFIX,
    JudgeClient,
    JudgeConfig,
    JudgeRequest,
    JudgeResponseError,
    build_prompt,
    judge_pairs,
    parse_response,
)
from conftest import JudgeStub


def req(truth, pred, path="attr"):
    return JudgeRequest(truth_value=truth, pred_value=pred, path=path)


def config_for(stub, **overrides):
    overrides.setdefault("endpoint_url", stub.url)
    overrides.setdefault("timeout", 5.0)
    overrides.setdefault("backoff_base", 0.01)
    return JudgeConfig(**overrides)


class TestPrompt:
    def test_contains_pair_and_instruction(self):
        prompt = build_prompt(req("bar", "bar chart"))
        assert "bar" in prompt and "bar chart" in prompt
        assert "MATCH" in prompt and "NO_MATCH" in prompt

    def test_deterministic_and_path_free(self):
        a = build_prompt(req("x", "y", path="legend.position"))
        b = build_prompt(req("x", "y", path="grid_lines.horizontal"))
        assert a == b  # the cache may key on the pair alone

    def test_empty_prediction_still_well_formed(self):
        prompt = build_prompt(req("bar", ""))
        assert prompt.endswith("Predicted value: ")


class TestParseResponse:
    def test_plain_tokens(self):
        assert parse_response("NO_MATCH") is Verdict.NO_MATCH
        assert parse_response("MATCH") is Verdict.MATCH

    def test_reasoning_then_verdict(self):
        assert parse_response("These are synonyms... MATCH") is Verdict.MATCH

    def test_no_match_wins_over_its_match_substring(self):
        assert parse_response("I think NO_MATCH fits") is Verdict.NO_MATCH
        assert parse_response("no_match") is Verdict.NO_MATCH

    def test_first_token_wins(self):
        assert parse_response("MATCH? no... NO_MATCH") is Verdict.MATCH

    def test_embedded_tokens_do_not_count(self):
        with pytest.raises(JudgeResponseError):
            parse_response("MATCHING MISMATCHED")

    def test_missing_tokens_error(self):
        with pytest.raises(JudgeResponseError):
            parse_response("maybe")


class TestClient:
    def test_echo_fixture_all_match(self, judge_stub):
        with JudgeClient(config_for(judge_stub)) as client:
            verdicts = client.judge_pairs([req("a", "b"), req("c", "d")])
        assert [v.verdict for v in verdicts] == [Verdict.MATCH, Verdict.MATCH]
        assert all(v.source is VerdictSource.JUDGE for v in verdicts)

    def test_empty_request_list(self, judge_stub):
        with JudgeClient(config_for(judge_stub)) as client:
            assert client.judge_pairs([]) == []

    def test_order_preserved_under_concurrency(self):
        stub = JudgeStub(
            responder=lambda p: "NO_MATCH" if "odd" in p else "MATCH", delay=0.02
        )
        try:
            requests = [
                req("left", f"{'odd' if i % 2 else 'even'} {i}", path=f"p{i}")
                for i in range(12)
            ]
            with JudgeClient(config_for(stub, max_in_flight=4)) as client:
                verdicts = client.judge_pairs(requests)
            assert [v.path for v in verdicts] == [f"p{i}" for i in range(12)]
            for i, v in enumerate(verdicts):
                assert v.verdict is (Verdict.NO_MATCH if i % 2 else Verdict.MATCH)
        finally:
            stub.close()

    def test_duplicate_pair_hits_upstream_once(self, judge_stub):
        requests = [req("bar", "bar chart"), req("pie", "donut"), req("bar", "bar chart")]
        with JudgeClient(config_for(judge_stub)) as client:
            verdicts = client.judge_pairs(requests)
        assert len(verdicts) == 3
        assert len(judge_stub.prompts) == 2

    def test_in_flight_bound_respected(self):
        stub = JudgeStub(delay=0.05)
        try:
            requests = [req("t", f"p{i}") for i in range(10)]
            with JudgeClient(config_for(stub, max_in_flight=3)) as client:
                client.judge_pairs(requests)
            assert stub.max_in_flight <= 3
        finally:
            stub.close()

    def test_cache_short_circuits_network(self, judge_stub, tmp_path):
        cache = tmp_path / "verdicts.jsonl"
        cfg = config_for(judge_stub, cache_path=cache)
        with JudgeClient(cfg) as client:
            first = client.judge_pairs([req("a", "b"), req("c", "d")])
        calls_after_first = len(judge_stub.prompts)
        with JudgeClient(cfg) as client:  # fresh client, warm file cache
            second = client.judge_pairs([req("a", "b"), req("c", "d")])
        assert len(judge_stub.prompts) == calls_after_first
        assert first == second
        records = [json.loads(line) for line in cache.read_text().splitlines()]
        assert {tuple(sorted(r)) for r in records} == {("pred", "truth", "verdict")}

    def test_cached_and_uncached_verdicts_identical(self, tmp_path):
        stub = JudgeStub(responder=lambda p: "NO_MATCH" if "zed" in p else "MATCH")
        try:
            requests = [req("a", "b"), req("x", "zed")]
            with JudgeClient(config_for(stub)) as client:
                plain = client.judge_pairs(requests)
            cfg = config_for(stub, cache_path=tmp_path / "c.jsonl")
            with JudgeClient(cfg) as client:
                client.judge_pairs(requests)
            with JudgeClient(cfg) as client:
                cached = client.judge_pairs(requests)
            assert plain == cached
        finally:
            stub.close()

    def test_transport_failure_yields_error_verdicts(self):
        cfg = JudgeConfig(
            endpoint_url="http://127.0.0.1:9/nothing",
            timeout=0.2,
            max_retries=1,
            backoff_base=0.01,
        )
        with JudgeClient(cfg) as client:
            verdicts = client.judge_pairs([req("a", "b"), req("c", "d")])
        assert len(verdicts) == 2
        for v in verdicts:
            assert v.verdict is Verdict.NO_MATCH
            assert v.rationale.startswith(ERROR_RATIONALE_PREFIX)

    def test_retry_recovers_from_transient_failures(self, judge_stub):
        judge_stub.fail_next = 2
        with JudgeClient(config_for(judge_stub, max_retries=2)) as client:
            (verdict,) = client.judge_pairs([req("a", "b")])
        assert verdict.verdict is Verdict.MATCH
        assert len(judge_stub.prompts) == 3

    def test_unparseable_response_is_flagged(self):
        stub = JudgeStub(responder=lambda p: "hard to say")
        try:
            with JudgeClient(config_for(stub))as client:
                (verdict,) = client.judge_pairs([req("a", "b")])
            assert verdict.rationale.startswith(ERROR_RATIONALE_PREFIX)
            assert len(stub.prompts) == 1  # verdict-shaped garbage is not retried
        finally:
            stub.close()

    def test_module_level_wrapper(self, judge_stub):
        verdicts = judge_pairs([req("a", "b")], config_for(judge_stub))
        assert verdicts[0].verdict is Verdict.MATCH


class TestConfig:
    def test_missing_endpoint_rejected(self):
        with pytest.raises(ValueError, match="CHARTDESIGN_JUDGE_URL"):
            JudgeClient(JudgeConfig(endpoint_url=""))

    def test_from_env(self, monkeypatch):
        monkeypatch.setenv("CHARTDESIGN_JUDGE_URL", "http://example.invalid/judge")
        monkeypatch.setenv("CHARTDESIGN_JUDGE_KEY", "sekrit")
        cfg = JudgeConfig.from_env()
        assert cfg.endpoint_url == "http://example.invalid/judge"
        assert cfg.api_key == "sekrit"

    def test_flag_overrides_env(self, monkeypatch):
        monkeypatch.setenv("CHARTDESIGN_JUDGE_URL", "http://env.invalid")
        cfg = JudgeConfig.from_env(endpoint_url="http://flag.invalid")
        assert cfg.endpoint_url == "http://flag.invalid"
