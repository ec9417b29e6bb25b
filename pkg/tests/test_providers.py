from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from structsearch.providers import (
    ChatCompletionProvider,
    CountingProvider,
    FailingProvider,
    FunctionProvider,
    HashingEmbedder,
    HttpEmbedder,
    LlmRequest,
    ProviderError,
    ProviderSettings,
    RecordingProvider,
    ReplayProvider,
    count_tokens,
    prompt_key,
)


def test_count_tokens_splits_words_and_punctuation():
    assert count_tokens("a += Integer.toString(x);") == 10  # a + = Integer . toString ( x ) ;
    assert count_tokens("") == 0


def test_prompt_key_is_stable_sha256():
    req = LlmRequest("sys", "user", task="translate", meta={"ignored": 1})
    assert req.key() == prompt_key("sys", "user") == prompt_key("sy", "suser")
    assert len(req.key()) == 64


def test_hashing_embedder_is_unit_and_deterministic():
    e = HashingEmbedder(64)
    v = e.embed(["Find all for loops", "find ALL for loops!", ""])
    assert v.shape == (3, 64)
    assert np.allclose(np.linalg.norm(v[:2], axis=1), 1.0)
    assert np.allclose(v[0], v[1])
    assert not v[2].any()


def test_record_then_replay(tmp_path):
    recorder = RecordingProvider(FunctionProvider(lambda r: r.user.upper()))
    req = LlmRequest("s", "hello", task="pair_nl")
    assert recorder.complete(req).text == "HELLO"
    recorder.save(tmp_path / "t.json")
    replay = ReplayProvider.from_file(tmp_path / "t.json")
    out = replay.complete(req)
    assert out.text == "HELLO"
    assert out.prompt_tokens == count_tokens("s") + count_tokens("hello")
    with pytest.raises(ProviderError):
        replay.complete(LlmRequest("s", "other"))


def test_counting_provider_tallies_by_task():
    counter = CountingProvider(FunctionProvider(lambda r: "ok"))
    counter.complete(LlmRequest("a", "b c", task="translate"))
    counter.complete(LlmRequest("a", "b", task="refine"))
    assert counter.calls == {"translate": 1, "refine": 1}
    assert counter.prompt_tokens == 5
    assert counter.completion_tokens == 2


def test_failing_provider():
    with pytest.raises(ProviderError):
        FailingProvider().complete(LlmRequest("a", "b"))


def test_live_provider_needs_settings():
    with pytest.raises(ProviderError):
        ChatCompletionProvider(ProviderSettings())
    with pytest.raises(ProviderError):
        HttpEmbedder(ProviderSettings(endpoint="http://x"))
    env = {"SCS_API_ENDPOINT": "http://h", "SCS_MODEL": "m"}
    assert ProviderSettings.from_env(env).model == "m"


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        if self.path.endswith("/chat/completions"):
            text = body["messages"][1]["content"][::-1]
            payload = {"choices": [{"message": {"content": text}}], "usage": {"prompt_tokens": 7, "completion_tokens": 3}}
        else:
            payload = {"data": [{"embedding": [3.0, 4.0]} for _ in body["input"]]}
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture()
def local_endpoint():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1"
    server.shutdown()


def test_http_adapters_against_local_server(local_endpoint):
    settings = ProviderSettings(local_endpoint, "key", "model", "embed")
    out = ChatCompletionProvider(settings).complete(LlmRequest("s", "abc"))
    assert (out.text, out.prompt_tokens, out.completion_tokens) == ("cba", 7, 3)
    vectors = HttpEmbedder(settings).embed(["x", "y"])
    assert np.allclose(vectors, [[0.6, 0.8], [0.6, 0.8]])


def test_unreachable_endpoint_is_a_provider_error():
    provider = ChatCompletionProvider(ProviderSettings("http://127.0.0.1:9", None, "m"), timeout=2)
    with pytest.raises(ProviderError):
        provider.complete(LlmRequest("s", "u"))
