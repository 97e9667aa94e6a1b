"""Sampling clients for text-completion backends.

Two implementations of one contract: an HTTP client for a
completions-style service, and a seeded mock that fabricates
task-shaped samples so the whole pipeline runs offline.  Both return
exactly ``n_samples`` completions or raise a ``GenerationError``.
"""

from __future__ import annotations

import hashlib
import math
import os
import random
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

import requests

from .core import GenerationParams, Task

__all__ = [
    "AuthenticationError",
    "Backend",
    "CompletionRequest",
    "CompletionSample",
    "GenerationError",
    "HttpBackend",
    "MalformedResponseError",
    "MockBackend",
    "RateLimiter",
    "RetriesExhaustedError",
    "build_backend",
    "classify_prompt",
    "mock_generate",
]

MAX_ATTEMPTS = 5
BACKOFF_BASE_S = 1.0


class GenerationError(Exception):
    """Base class for sampling failures."""


class AuthenticationError(GenerationError):
    """Credentials rejected or missing; never retried."""


class MalformedResponseError(GenerationError):
    """Backend answered with something the adapter cannot accept."""


class RetriesExhaustedError(GenerationError):
    """Transient failures persisted through every attempt."""


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    params: GenerationParams

    def __post_init__(self) -> None:
        if len(self.params.stop_sequences) > 4:
            raise ValueError("at most 4 stop sequences")


_FINISH_REASONS = ("stop", "length")


@dataclass(frozen=True)
class CompletionSample:
    text: str
    total_logprob: float
    finish_reason: str = "stop"

    def __post_init__(self) -> None:
        if self.finish_reason not in _FINISH_REASONS:
            raise ValueError(f"bad finish_reason: {self.finish_reason!r}")
        if not math.isfinite(self.total_logprob) or self.total_logprob > 0.0:
            raise ValueError(f"total_logprob must be finite and <= 0: {self.total_logprob!r}")


class Backend(Protocol):
    def complete(self, request: CompletionRequest) -> list[CompletionSample]: ...


# --- mock backend -----------------------------------------------------------
#
# The banks below give each task a handful of surface forms that fall
# into a few execution-equivalence clusters, plus some entries that
# fail to execute.  Weights skew the draw so one cluster usually
# dominates, which is what agreement scoring needs to have something
# to select.

_SQL_QUESTION_BANK: Sequence[tuple[str, int]] = (
    ("How many heads of the departments are older than 56 ?", 4),
    ("List the name, born state and age of the heads of departments ordered by age.", 3),
    ("What are the names of all departments?", 3),
    ("What is the average age of all department heads?", 2),
    ("Which department was created first?", 2),
    ("List the names of departments with a budget above 10 billion.", 2),
    ("How many departments are there?", 2),
    ("What are the distinct born states of the heads?", 1),
    ("Show the ranking of each department by number of employees.", 1),
    ("Which heads are acting on a temporary basis?", 1),
)

_BASH_QUESTION_BANK: Sequence[tuple[str, int]] = (
    ("list all files in the current directory including hidden ones", 4),
    ("count the number of lines in every text file", 3),
    ("show the disk usage of each subdirectory", 3),
    ("find all files modified in the last day", 2),
    ("delete every empty directory under the current one", 2),
    ("print the five largest files in this folder", 2),
    ("show the current working directory", 1),
    ("replace spaces with underscores in all file names", 1),
)

_PYTHON_QUESTION_BANK: Sequence[tuple[str, int]] = (
    ("Write a function to find the maximum of two numbers.", 4),
    ("Write a function to reverse a given string.", 3),
    ("Write a function to check whether a number is odd.", 3),
    ("Write a function to sum the elements of a list.", 2),
    ("Write a function to count vowels in a string.", 2),
    ("Write a function to compute the factorial of a number.", 1),
)

_TOP_QUESTION_BANK: Sequence[tuple[str, int]] = (
    ("what is the weather tonight", 4),
    ("set an alarm for tomorrow morning", 3),
    ("wake me up every day at 7 am", 3),
    ("will it rain this weekend", 2),
    ("cancel all my alarms", 2),
    ("remind me to call mom", 1),
)

_QDMR_QUESTION_BANK: Sequence[tuple[str, int]] = (
    ("how many objects are blue?", 4),
    ("what is the name of the largest state?", 3),
    ("how many touchdowns were scored in the first half?", 3),
    ("which color are most of the cubes?", 2),
    ("how many papers cite the oldest publication?", 2),
    ("what is the total population of the listed cities?", 1),
)

_SQL_ANSWER_BANK: Sequence[tuple[str, int]] = (
    # completions continue after the "SELECT" primer
    (" count(*) FROM head", 5),
    (" count ( * )  FROM head", 3),
    (" COUNT(*) FROM head", 2),
    (" name FROM head", 2),
    (" T1.name FROM head AS T1", 1),
    (" avg(age) FROM head", 1),
    (" FROM nowhere", 1),
    (" * FROM heads", 1),
)

_BASH_ANSWER_BANK: Sequence[tuple[str, int]] = (
    ("ls -a", 5),
    ("ls  -a", 3),
    (" ls -a", 2),
    ("ls -la", 2),
    ("ls  -la", 1),
    ("find . -type f", 1),
    ('echo "unclosed', 1),
    ("", 1),
)

_PYTHON_ANSWER_BANK: Sequence[tuple[str, int]] = (
    (
        "def max_two(a, b):\n    return a if a > b else b\n\n"
        "assert max_two(1, 2) == 2\nassert max_two(5, 3) == 5",
        5,
    ),
    (
        "def max_two(x, y):\n    return max(x, y)\n\n"
        "assert max_two(1, 2) == 2\nassert max_two(5, 3) == 5",
        3,
    ),
    (
        "def max_two(a, b):\n    return a\n\n"
        "assert max_two(1, 2) == 2\nassert max_two(5, 3) == 5",
        2,
    ),
    ("def max_two(a, b):\n    return a if a > b else b", 1),  # no checks
    ("def broken(:\n    pass\n\nassert broken() == 1", 1),
)

_TOP_ANSWER_BANK: Sequence[tuple[str, int]] = (
    ("[IN:GET_WEATHER [SL:DATE_TIME tonight ] ]", 5),
    ("[IN:GET_WEATHER[SL:DATE_TIME tonight]]", 3),
    ("[IN:GET_WEATHER [SL:LOCATION here ] ]", 2),
    ("[IN:GET_WEATHER", 1),
    ("not a tree", 1),
)

_QDMR_ANSWER_BANK: Sequence[tuple[str, int]] = (
    # completions continue after the "1#)" primer
    (" return dogs 2#) return count of #1", 5),
    (" Return dogs 2#) return count  of #1", 3),
    (" return cats 2#) return count of #1", 2),
    (" return #2 2#) return dogs", 1),
    ("", 1),
)

_QUESTION_BANKS = {
    Task.SQL: _SQL_QUESTION_BANK,
    Task.BASH: _BASH_QUESTION_BANK,
    Task.PYTHON: _PYTHON_QUESTION_BANK,
    Task.TOP: _TOP_QUESTION_BANK,
    Task.QDMR: _QDMR_QUESTION_BANK,
}

_ANSWER_BANKS = {
    Task.SQL: _SQL_ANSWER_BANK,
    Task.BASH: _BASH_ANSWER_BANK,
    Task.PYTHON: _PYTHON_ANSWER_BANK,
    Task.TOP: _TOP_ANSWER_BANK,
    Task.QDMR: _QDMR_ANSWER_BANK,
}

# Answer-output markers are checked before question markers: answer
# prompts contain question markers too, never the other way around.
_ANSWER_MARKERS = (
    ("Logical Form:", Task.TOP),
    ("Bash commands:", Task.BASH),
    ("Answer Steps:", Task.QDMR),
    ("-- Using valid SQLite", Task.SQL),
    ('"""', Task.PYTHON),
)

_QUESTION_MARKERS = (
    ("-- Question:", Task.SQL),
    ("-- Write a question", Task.SQL),
    ("Natural Language Instruction for Python Code:", Task.PYTHON),
    ("logical form", Task.TOP),
    ("bash commands", Task.BASH),
    ("Question:", Task.QDMR),
)


def classify_prompt(prompt: str) -> Optional[tuple[Task, str]]:
    """(task, mode) guessed from prompt markers, or None when unrecognized."""
    for marker, task in _ANSWER_MARKERS:
        if marker in prompt:
            return task, "answer"
    for marker, task in _QUESTION_MARKERS:
        if marker in prompt:
            return task, "question"
    return None


def _mock_rng(prompt: str, params: GenerationParams, seed: int) -> random.Random:
    key = f"{seed}|{params.temperature}|{params.n_samples}|{prompt}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def mock_generate(
    prompt: str, params: GenerationParams, seed: int
) -> list[CompletionSample]:
    """Deterministic samples drawn from a task bank keyed by prompt markers."""
    rng = _mock_rng(prompt, params, seed)
    kind = classify_prompt(prompt)
    if kind is None:
        tail = prompt.strip()[-40:]
        texts = [f"mock echo {j}: {tail}" for j in range(params.n_samples)]
    else:
        task, mode = kind
        bank = (_ANSWER_BANKS if mode == "answer" else _QUESTION_BANKS)[task]
        entries = [text for text, _ in bank]
        weights = [weight for _, weight in bank]
        texts = rng.choices(entries, weights=weights, k=params.n_samples)
    return [
        CompletionSample(text=text, total_logprob=-(j / 10), finish_reason="stop")
        for j, text in enumerate(texts)
    ]


@dataclass(frozen=True)
class MockBackend:
    seed: int = 42

    def complete(self, request: CompletionRequest) -> list[CompletionSample]:
        return mock_generate(request.prompt, request.params, self.seed)


# --- rate limiting ----------------------------------------------------------


class RateLimiter:
    """Sliding-window ceiling on request starts; blocks via injected sleep."""

    def __init__(
        self,
        max_per_minute: int,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
        window_s: float = 60.0,
    ) -> None:
        if max_per_minute < 1:
            raise ValueError("ceiling must be at least 1")
        self.max_per_minute = max_per_minute
        self.window_s = window_s
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._starts: list[float] = []

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._starts and now - self._starts[0] >= self.window_s:
                    self._starts.pop(0)
                if len(self._starts) < self.max_per_minute:
                    self._starts.append(now)
                    return
                wait = self._starts[0] + self.window_s - now
            self._sleep(max(wait, 0.0))


# --- HTTP backend -----------------------------------------------------------


class _TransientFailure(Exception):
    """Internal marker for conditions worth another attempt."""


class HttpBackend:
    """Client for a completions-style HTTP service.

    ``transport`` is a callable with the signature of ``requests.post``
    restricted to (url, json=..., headers=..., timeout=...); tests
    substitute a fake, production uses requests.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str,
        max_per_minute: int = 60,
        timeout_s: float = 60.0,
        transport: Optional[Callable[..., object]] = None,
        adapter: Optional[object] = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if not api_key:
            raise AuthenticationError("no API key configured")
        if adapter is None:
            from .vendor import CompletionsAdapter

            adapter = CompletionsAdapter(model)
        if transport is None:
            transport = requests.post
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_s
        self._headers = {"Authorization": f"Bearer {api_key}"}
        self._adapter = adapter
        self._transport = transport
        self._sleep = sleep
        self._limiter = RateLimiter(max_per_minute, clock=clock, sleep=sleep)

    def complete(self, request: CompletionRequest) -> list[CompletionSample]:
        body = self._adapter.encode(request.prompt, request.params)
        last_reason = "unknown"
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self._sleep(BACKOFF_BASE_S * 2 ** (attempt - 1))
            self._limiter.acquire()
            try:
                return self._attempt(body, request.params.n_samples)
            except _TransientFailure as failure:
                last_reason = str(failure)
        raise RetriesExhaustedError(
            f"gave up after {MAX_ATTEMPTS} attempts: {last_reason}"
        )

    def _attempt(self, body: dict, expected_n: int) -> list[CompletionSample]:
        try:
            response = self._transport(
                self.endpoint,
                json=body,
                headers=self._headers,
                timeout=self.timeout_s,
            )
        except requests.RequestException as err:
            raise _TransientFailure(f"transport: {err}") from err

        status = getattr(response, "status_code", 0)
        if status in (401, 403):
            raise AuthenticationError(f"backend rejected credentials: {status}")
        if status == 408 or status == 429 or status >= 500:
            raise _TransientFailure(f"status {status}")
        if status != 200:
            raise GenerationError(f"backend rejected request: {status}")
        try:
            payload = response.json()
        except ValueError as err:
            raise MalformedResponseError(f"bad JSON: {err}") from err
        return self._adapter.decode(payload, expected_n)


def build_backend(config: dict, seed: int = 42) -> Backend:
    """Backend selected by config["backend"]; http reads SYMGEN_API_KEY."""
    name = config.get("backend", "mock")
    if name == "mock":
        return MockBackend(seed=seed)
    if name == "http":
        api_key = os.environ.get("SYMGEN_API_KEY", "")
        if not api_key:
            raise AuthenticationError("SYMGEN_API_KEY is not set")
        return HttpBackend(
            endpoint=config.get("endpoint", "http://localhost:8000/v1/completions"),
            model=config.get("model", "local-completions"),
            api_key=api_key,
            max_per_minute=int(config.get("rpm", 60)),
            timeout_s=float(config.get("timeout_s", 60.0)),
        )
    raise ValueError(f"unknown backend: {name!r}")
