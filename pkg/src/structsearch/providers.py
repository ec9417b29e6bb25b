"""LLM and embedding providers: an HTTP chat-completion adapter plus offline stand-ins."""

from __future__ import annotations

import hashlib
import json
import os
import re
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np

TASKS = ("translate", "refine", "target_type", "pair_nl", "direct_search")

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


class ProviderError(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


def count_tokens(text: str) -> int:
    """Word and punctuation count; a stand-in for a model tokenizer."""
    return len(_TOKEN_RE.findall(text))


@dataclass(frozen=True)
class LlmRequest:
    system: str
    user: str
    task: str = "translate"
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)
    temperature: float = 0.0
    request_id: str = ""

    def key(self) -> str:
        return prompt_key(self.system, self.user)


def prompt_key(system: str, user: str) -> str:
    return hashlib.sha256((system + user).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class LlmResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


def respond(request: LlmRequest, text: str) -> LlmResponse:
    """Wrap ``text`` as a response with locally counted tokens."""
    return LlmResponse(text, count_tokens(request.system) + count_tokens(request.user), count_tokens(text))


class LlmProvider(Protocol):
    name: str

    def complete(self, request: LlmRequest) -> LlmResponse: ...


class Embedder(Protocol):
    name: str
    dim: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


# ---------------------------------------------------------------------------
# embedders


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return np.divide(matrix, norms, out=np.zeros_like(matrix), where=norms > 0)


class HashingEmbedder:
    """Bag of lowercase alphanumeric tokens hashed into fixed buckets, unit-normalized."""

    def __init__(self, dim: int = 256):
        self.dim = dim
        self.name = f"hashing-{dim}"

    def _bucket(self, token: str) -> int:
        return int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big") % self.dim

    def tokens(self, text: str) -> list[str]:
        return re.findall(r"[a-z0-9]+", text.lower())

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            for token in self.tokens(text):
                out[row, self._bucket(token)] += 1.0
        return unit_rows(out)


# ---------------------------------------------------------------------------
# HTTP adapter


@dataclass
class ProviderSettings:
    endpoint: str | None = None
    api_key: str | None = None
    model: str | None = None
    embed_model: str | None = None

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> ProviderSettings:
        env = os.environ if env is None else env
        return cls(
            env.get("SCS_API_ENDPOINT"),
            env.get("SCS_API_KEY"),
            env.get("SCS_MODEL"),
            env.get("SCS_EMBED_MODEL"),
        )


def _post_json(url: str, body: dict, api_key: str | None, timeout: float) -> dict:
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    req = urllib.request.Request(url, json.dumps(body).encode("utf-8"), headers, method="POST")
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
        raise ProviderError(f"request to {url} failed: {exc}") from exc


class ChatCompletionProvider:
    """Generic ``/chat/completions`` JSON endpoint."""

    def __init__(self, settings: ProviderSettings, timeout: float = 120.0):
        if not settings.endpoint or not settings.model:
            raise ProviderError("SCS_API_ENDPOINT and SCS_MODEL must be set for a live provider")
        self.settings = settings
        self.timeout = timeout
        self.name = settings.model

    def complete(self, request: LlmRequest) -> LlmResponse:
        body = {
            "model": self.settings.model,
            "temperature": request.temperature,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        data = _post_json(self.settings.endpoint.rstrip("/") + "/chat/completions", body, self.settings.api_key, self.timeout)
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected completion payload: {data!r}"[:500]) from exc
        usage = data.get("usage") or {}
        return LlmResponse(
            text,
            int(usage.get("prompt_tokens", count_tokens(request.system + request.user))),
            int(usage.get("completion_tokens", count_tokens(text))),
        )


class HttpEmbedder:
    """Generic ``/embeddings`` JSON endpoint."""

    def __init__(self, settings: ProviderSettings, timeout: float = 120.0):
        if not settings.endpoint or not settings.embed_model:
            raise ProviderError("SCS_API_ENDPOINT and SCS_EMBED_MODEL must be set for a live embedder")
        self.settings = settings
        self.timeout = timeout
        self.name = settings.embed_model
        self.dim = 0

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        body = {"model": self.settings.embed_model, "input": list(texts)}
        data = _post_json(self.settings.endpoint.rstrip("/") + "/embeddings", body, self.settings.api_key, self.timeout)
        try:
            rows = [item["embedding"] for item in data["data"]]
        except (KeyError, TypeError) as exc:
            raise ProviderError("unexpected embedding payload") from exc
        matrix = np.asarray(rows, dtype=np.float64)
        if matrix.ndim != 2 or len(matrix) != len(texts):
            raise DimensionMismatch("embedding endpoint returned a ragged or short batch")
        self.dim = matrix.shape[1]
        return unit_rows(matrix)


# ---------------------------------------------------------------------------
# transcript replay


class ReplayProvider:
    """Answers from a recorded ``{sha256(system + user): completion}`` map."""

    name = "replay"

    def __init__(self, transcripts: Mapping[str, str]):
        self.transcripts = dict(transcripts)

    @classmethod
    def from_file(cls, path: str | Path) -> ReplayProvider:
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def complete(self, request: LlmRequest) -> LlmResponse:
        try:
            return respond(request, self.transcripts[request.key()])
        except KeyError:
            raise ProviderError(f"no recorded completion for {request.task} prompt {request.key()[:12]}") from None


class RecordingProvider:
    """Pass-through that keeps every completion for later replay."""

    def __init__(self, inner: LlmProvider):
        self.inner = inner
        self.name = getattr(inner, "name", "recording")
        self.transcripts: dict[str, str] = {}

    def complete(self, request: LlmRequest) -> LlmResponse:
        response = self.inner.complete(request)
        self.transcripts[request.key()] = response.text
        return response

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.transcripts, indent=2, sort_keys=True) + "\n", encoding="utf-8")


class FailingProvider:
    name = "failing"

    def complete(self, request: LlmRequest) -> LlmResponse:
        raise ProviderError("provider unavailable")


class FunctionProvider:
    """Adapter turning ``f(request) -> text`` into a provider."""

    def __init__(self, fn: Callable[[LlmRequest], str], name: str = "function"):
        self.fn = fn
        self.name = name

    def complete(self, request: LlmRequest) -> LlmResponse:
        return respond(request, self.fn(request))


class CountingProvider:
    """Wraps a provider and tallies calls and tokens per task."""

    def __init__(self, inner: LlmProvider):
        self.inner = inner
        self.name = getattr(inner, "name", "counting")
        self.calls: dict[str, int] = {}
        self.prompt_tokens = 0
        self.completion_tokens = 0

    def complete(self, request: LlmRequest) -> LlmResponse:
        response = self.inner.complete(request)
        self.calls[request.task] = self.calls.get(request.task, 0) + 1
        self.prompt_tokens += response.prompt_tokens
        self.completion_tokens += response.completion_tokens
        return response
