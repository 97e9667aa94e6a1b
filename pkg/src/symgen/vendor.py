"""Wire adapter for completions-style HTTP services.

All vendor-schema knowledge lives here: the request body layout and
how to pull (text, logprob sum, finish reason) out of each choice.
Swapping providers means swapping this adapter, nothing else.
"""

from __future__ import annotations

from .core import GenerationParams
from .genclient import CompletionSample, MalformedResponseError


class CompletionsAdapter:
    def __init__(self, model: str) -> None:
        self.model = model

    def encode(self, prompt: str, params: GenerationParams) -> dict:
        return {
            "model": self.model,
            "prompt": prompt,
            "n": params.n_samples,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "stop": list(params.stop_sequences) or None,
            "logprobs": True,
        }

    def decode(self, payload: object, expected_n: int) -> list[CompletionSample]:
        if not isinstance(payload, dict) or not isinstance(payload.get("choices"), list):
            raise MalformedResponseError("response has no choices list")
        choices = payload["choices"]
        if len(choices) != expected_n:
            raise MalformedResponseError(
                f"short response: got {len(choices)} of {expected_n} samples"
            )
        samples = []
        for pos, choice in enumerate(choices):
            if not isinstance(choice, dict) or "text" not in choice:
                raise MalformedResponseError(f"choice {pos} has no text")
            logprobs = choice.get("logprobs") or {}
            tokens = logprobs.get("token_logprobs") or []
            # The first token's logprob is often null; count it as zero.
            total = sum(value or 0.0 for value in tokens)
            finish = "length" if choice.get("finish_reason") == "length" else "stop"
            try:
                samples.append(
                    CompletionSample(
                        text=str(choice["text"]),
                        total_logprob=total,
                        finish_reason=finish,
                    )
                )
            except ValueError as err:
                raise MalformedResponseError(f"choice {pos}: {err}") from err
        return samples
