"""Model traffic mediation: chat threads with memory, image generation with
regenerate/delete, and a scripted mock provider that makes every test run
byte-reproducible.

Thread memory is the full thread resent per request: system message, all
surviving turns, then the new user message. A turn is appended only after
the provider succeeds, so no partial turn is ever visible.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

import httpx

from .prompts.engine import PromptEnvelope, SYSTEM, USER

ENV_KIND = "CULTIVERSE_LLM_KIND"
ENV_ENDPOINT = "CULTIVERSE_LLM_ENDPOINT"
ENV_CREDENTIAL_VAR = "CULTIVERSE_LLM_CREDENTIAL_VAR"
ENV_TIMEOUT = "CULTIVERSE_LLM_TIMEOUT_S"


class ProviderTimeout(Exception):
    pass


class ProviderRefused(Exception):
    pass


class ScriptedMiss(Exception):
    """The mock script has no canned reply for this prompt hash."""


class UnknownThread(Exception):
    pass


class UnknownTurn(Exception):
    pass


class UnknownResult(Exception):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"  # "mock" | "remote"
    endpoint: str = ""
    credential_var: str = ""  # env var NAME holding the credential, never the value
    timeout_s: float = 30.0
    max_retries: int = 1
    script_path: Optional[str] = None  # mock only
    record_path: Optional[str] = None  # request trace (JSON lines)

    def __post_init__(self):
        if self.kind == "mock" and not self.script_path:
            raise ValueError("mock provider requires a script path")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote provider requires an endpoint")

    @classmethod
    def from_env(cls, **overrides) -> "ProviderConfig":
        values = dict(
            kind=os.environ.get(ENV_KIND, "mock"),
            endpoint=os.environ.get(ENV_ENDPOINT, ""),
            credential_var=os.environ.get(ENV_CREDENTIAL_VAR, ""),
            timeout_s=float(os.environ.get(ENV_TIMEOUT, "30")),
        )
        values.update(overrides)
        return cls(**values)


@dataclass
class Turn:
    turn_id: str
    user_text: str
    assistant_text: str


@dataclass
class ConversationThread:
    id: str
    scope: str  # SourceExploration | Transfer | Extrapolation
    system_message: str
    turns: list[Turn] = field(default_factory=list)


@dataclass(frozen=True)
class ImageResult:
    id: str
    prompt_hash: str
    image_ref: str
    index: int


class Provider(Protocol):
    def complete(self, messages: list[tuple[str, str]], prompt_hash: str) -> str: ...

    def image(self, prompt_text: str, prompt_hash: str, index: int) -> bytes: ...


class MockProvider:
    """Replies come from a script file keyed by prompt content hash, with an
    optional ordered fallback list consumed when a hash is absent."""

    def __init__(self, script_path: str, record_path: Optional[str] = None):
        raw = json.loads(Path(script_path).read_text(encoding="utf-8"))
        self.replies: dict[str, str] = dict(raw.get("replies", {}))
        self.fallback: list[str] = list(raw.get("fallback", []))
        self.record_path = record_path
        self._lock = threading.Lock()

    def _record(self, kind: str, messages: list[tuple[str, str]], prompt_hash: str) -> None:
        if not self.record_path:
            return
        entry = {
            "kind": kind,
            "prompt_hash": prompt_hash,
            "messages": [{"role": r, "text": t} for r, t in messages],
        }
        with self._lock:
            with open(self.record_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")

    def complete(self, messages: list[tuple[str, str]], prompt_hash: str) -> str:
        self._record("chat", messages, prompt_hash)
        reply = self.replies.get(prompt_hash)
        if reply is not None:
            return reply
        with self._lock:
            if self.fallback:
                return self.fallback.pop(0)
        raise ScriptedMiss(prompt_hash)

    def image(self, prompt_text: str, prompt_hash: str, index: int) -> bytes:
        self._record("image", [(USER, prompt_text)], prompt_hash)
        # Placeholder artifact: bytes are a pure function of (hash, index).
        seed = f"{prompt_hash}:{index}".encode("utf-8")
        block = hashlib.sha256(seed).digest()
        return block * 8


class RemoteProvider:
    """Minimal HTTP chat provider: POSTs the message list, expects
    ``{"content": "..."}``. Credentials are read from the environment
    variable named in the config, never from the config itself."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    def _headers(self) -> dict[str, str]:
        headers = {"content-type": "application/json"}
        if self.config.credential_var:
            token = os.environ.get(self.config.credential_var, "")
            if token:
                headers["authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: list[tuple[str, str]], prompt_hash: str) -> str:
        body = {"messages": [{"role": r, "content": t} for r, t in messages]}
        try:
            response = httpx.post(
                self.config.endpoint, json=body, headers=self._headers(),
                timeout=self.config.timeout_s,
            )
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderRefused(str(exc)) from exc
        if response.status_code != 200:
            raise ProviderRefused(f"status {response.status_code}")
        return response.json()["content"]

    def image(self, prompt_text: str, prompt_hash: str, index: int) -> bytes:
        body = {"prompt": prompt_text, "index": index}
        try:
            response = httpx.post(
                self.config.endpoint.rstrip("/") + "/images", json=body,
                headers=self._headers(), timeout=self.config.timeout_s,
            )
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderRefused(str(exc)) from exc
        if response.status_code != 200:
            raise ProviderRefused(f"status {response.status_code}")
        return response.content


def make_provider(config: ProviderConfig) -> Provider:
    if config.kind == "mock":
        return MockProvider(config.script_path, config.record_path)
    if config.kind == "remote":
        return RemoteProvider(config)
    raise ValueError(f"unknown provider kind {config.kind!r}")


class Gateway:
    """Owns conversation threads and image results for one service instance.

    Operations on distinct threads may run concurrently; operations on one
    thread are serialized by a per-thread lock.
    """

    def __init__(self, provider: Provider, image_store: Optional[str] = None,
                 max_retries: int = 1):
        self.provider = provider
        self.image_store = Path(image_store) if image_store else None
        self.max_retries = max_retries
        self.threads: dict[str, ConversationThread] = {}
        self._images: dict[str, tuple[str, str, int]] = {}  # id -> (hash, prompt, index)
        self._thread_locks: dict[str, threading.Lock] = {}
        self._counter = 0
        self._lock = threading.Lock()

    def _next_id(self, prefix: str) -> str:
        with self._lock:
            self._counter += 1
            return f"{prefix}-{self._counter:04d}"

    def note_id(self, restored_id: str) -> None:
        """Keep the id counter ahead of ids restored from persistence."""
        suffix = restored_id.rsplit("-", 1)[-1]
        if suffix.isdigit():
            with self._lock:
                self._counter = max(self._counter, int(suffix))

    # -- threads ------------------------------------------------------------

    def create_thread(self, scope: str, system_message: str,
                      thread_id: Optional[str] = None) -> ConversationThread:
        if thread_id is not None:
            self.note_id(thread_id)
        thread = ConversationThread(thread_id or self._next_id("t"), scope, system_message)
        self.threads[thread.id] = thread
        self._thread_locks[thread.id] = threading.Lock()
        return thread

    def _thread(self, thread_id: str) -> ConversationThread:
        thread = self.threads.get(thread_id)
        if thread is None:
            raise UnknownThread(thread_id)
        return thread

    def chat(self, thread_id: str, envelope: PromptEnvelope) -> Turn:
        """Send one exchange on a thread; the thread is unchanged on failure."""
        thread = self._thread(thread_id)
        user_text = next(t for r, t in envelope.messages if r == USER)
        with self._thread_locks[thread_id]:
            messages = [(SYSTEM, thread.system_message)]
            for turn in thread.turns:
                messages.append((USER, turn.user_text))
                messages.append(("assistant", turn.assistant_text))
            messages.append((USER, user_text))
            reply = self._complete_with_retry(messages, envelope.content_hash)
            turn = Turn(self._next_id("turn"), user_text, reply)
            thread.turns.append(turn)
            return turn

    def _complete_with_retry(self, messages: list[tuple[str, str]], prompt_hash: str) -> str:
        last: Optional[Exception] = None
        for _attempt in range(self.max_retries + 1):
            try:
                return self.provider.complete(messages, prompt_hash)
            except ProviderTimeout as exc:
                last = exc
            except (ProviderRefused, ScriptedMiss):
                raise
        raise last  # type: ignore[misc]

    def replay_turn(self, thread_id: str, turn_id: str, user_text: str, assistant_text: str) -> None:
        """Restore a persisted turn without touching the provider."""
        thread = self._thread(thread_id)
        self.note_id(turn_id)
        thread.turns.append(Turn(turn_id, user_text, assistant_text))

    def delete_turn(self, thread_id: str, turn_id: str) -> None:
        thread = self._thread(thread_id)
        with self._thread_locks[thread_id]:
            for i, turn in enumerate(thread.turns):
                if turn.turn_id == turn_id:
                    del thread.turns[i]
                    return
        raise UnknownTurn(turn_id)

    # -- images ---------------------------------------------------------------

    def _store_image(self, prompt_hash: str, index: int, data: bytes) -> str:
        name = f"{prompt_hash[:16]}-{index}.png"
        if self.image_store is not None:
            self.image_store.mkdir(parents=True, exist_ok=True)
            (self.image_store / name).write_bytes(data)
            return str(self.image_store / name)
        return name

    def generate_image(self, envelope: PromptEnvelope) -> ImageResult:
        prompt_text = "\n".join(t for _r, t in envelope.messages)
        data = self.provider.image(prompt_text, envelope.content_hash, 0)
        ref = self._store_image(envelope.content_hash, 0, data)
        result = ImageResult(self._next_id("img"), envelope.content_hash, ref, 0)
        self._images[result.id] = (envelope.content_hash, prompt_text, 0)
        return result

    def regenerate(self, result_id: str) -> ImageResult:
        entry = self._images.get(result_id)
        if entry is None:
            raise UnknownResult(result_id)
        prompt_hash, prompt_text, index = entry
        new_index = index + 1
        data = self.provider.image(prompt_text, prompt_hash, new_index)
        ref = self._store_image(prompt_hash, new_index, data)
        result = ImageResult(self._next_id("img"), prompt_hash, ref, new_index)
        self._images[result.id] = (prompt_hash, prompt_text, new_index)
        return result

    def restore_image(self, result: ImageResult, prompt_text: str = "") -> None:
        """Restore a persisted image result without touching the provider."""
        self.note_id(result.id)
        self._images[result.id] = (result.prompt_hash, prompt_text, result.index)

    def delete_image(self, result_id: str) -> None:
        if result_id not in self._images:
            raise UnknownResult(result_id)
        del self._images[result_id]
