"""
Run configuration for the command-line workflow.

All settings come from flags; no environment variables are consulted.
"""

import logging
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, field_validator

from core_series import MonthIndex
from errors import SarimaToolkitError, UsageError
from sarima import SarimaSpec
from spec_notation import parse_spec

logger = logging.getLogger(__name__)


def parse_window(text: str) -> Tuple[MonthIndex, MonthIndex]:
    """``YYYY-MM:YYYY-MM`` -> (start, end)."""
    try:
        first, last = text.split(":")
        start, end = MonthIndex.parse(first), MonthIndex.parse(last)
    except ValueError as e:
        raise ValueError(f"window must look like YYYY-MM:YYYY-MM, got '{text}'") from e
    if end < start:
        raise ValueError(f"window '{text}' ends before it starts")
    return start, end


class RunConfig(BaseModel):
    """Validated settings for one CLI invocation."""

    input_path: Optional[str] = None
    column: Literal["arrivals", "departures", "total"] = "total"
    train_window: Optional[str] = None
    test_window: Optional[str] = None
    spec: Optional[str] = None
    mask: List[str] = Field(default_factory=list)
    levels: Tuple[float, ...] = (0.80, 0.95)
    output_format: Literal["text", "json"] = "text"
    max_lag: int = Field(default=24, ge=1)
    seed: int = 0
    restarts: int = Field(default=3, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)

    @field_validator("levels")
    @classmethod
    def _levels_inside_unit_interval(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("at least one confidence level is required")
        for level in value:
            if not 0.0 < level < 1.0:
                raise ValueError(f"confidence level {level} outside (0, 1)")
        return tuple(sorted(value))

    @field_validator("train_window", "test_window")
    @classmethod
    def _window_format(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            parse_window(value)
        return value

    @field_validator("spec")
    @classmethod
    def _spec_parses(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            parse_spec(value)
        return value

    def train(self) -> Optional[Tuple[MonthIndex, MonthIndex]]:
        return parse_window(self.train_window) if self.train_window else None

    def test(self) -> Optional[Tuple[MonthIndex, MonthIndex]]:
        return parse_window(self.test_window) if self.test_window else None

    def sarima_spec(self) -> SarimaSpec:
        if self.spec is None:
            raise UsageError("--spec is required for this command")
        return parse_spec(self.spec).with_mask(self.mask)


def build_config(**settings) -> RunConfig:
    """RunConfig from keyword settings; toolkit errors raised by validators surface unchanged."""
    try:
        return RunConfig(**settings)
    except ValidationError as e:
        for detail in e.errors():
            cause = detail.get("ctx", {}).get("error")
            if isinstance(cause, SarimaToolkitError):
                raise cause
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise UsageError(f"invalid {location}: {first['msg']}") from e
