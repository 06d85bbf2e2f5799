from __future__ import annotations

from typing import Optional


class TaillabError(RuntimeError):
    """Base error carrying the process exit code used by the command line."""

    exit_code: int = 1

    def __init__(self, message: str, *, hint: Optional[str] = None) -> None:
        super().__init__(message)
        self.hint = hint or ""

    def describe(self) -> str:
        text = str(self)
        if self.hint:
            text = f"{text}（建议：{self.hint}）"
        return text


class ConfigError(TaillabError, ValueError):
    exit_code = 2


class SpectralAssumptionError(TaillabError):
    exit_code = 3

    def __init__(self, message: str, *, verdict: object = None, hint: Optional[str] = None) -> None:
        super().__init__(message, hint=hint)
        self.verdict = verdict


class NumericFailure(TaillabError):
    exit_code = 4
