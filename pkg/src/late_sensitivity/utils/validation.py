"""Input validation utilities for LATE sensitivity analysis."""

import math
from dataclasses import fields, is_dataclass
from typing import Any, Optional

from .exceptions import ValidationError


def validate_config(config: Any) -> None:
    """
    Validate a configuration dataclass through its ``validate()`` method.

    Args:
        config: ForgeConfig, ExperimentConfig or AnalysisConfig

    Raises:
        ValidationError: If validation fails, naming the offending field
    """
    try:
        config.validate()
    except ValueError as e:
        message = str(e)

        # Config messages start with the field name
        field = None
        if is_dataclass(config):
            first_word = message.split(" ", 1)[0]
            names = {f.name for f in fields(config)}
            if first_word in names:
                field = first_word

        raise ValidationError(message, field=field)


def validate_finite(value: float, name: str) -> float:
    """Reject NaN and infinities."""
    if value is None or not math.isfinite(value):
        raise ValidationError("value must be a finite number", field=name, value=str(value))
    return float(value)


def validate_probability(
    value: float, name: str, allow_zero: bool = True, allow_one: bool = True
) -> float:
    """
    Validate that a value is a probability.

    Args:
        value: Value to check
        name: Field name for error messages
        allow_zero: Whether 0 is admissible
        allow_one: Whether 1 is admissible

    Returns:
        The value as float
    """
    value = validate_finite(value, name)
    low_ok = value >= 0.0 if allow_zero else value > 0.0
    high_ok = value <= 1.0 if allow_one else value < 1.0
    if not (low_ok and high_ok):
        low = "[0" if allow_zero else "(0"
        high = "1]" if allow_one else "1)"
        raise ValidationError(f"must be in {low}, {high}", field=name, value=str(value))
    return value


def validate_positive(value: float, name: str, allow_zero: bool = False) -> float:
    value = validate_finite(value, name)
    if value < 0.0 or (value == 0.0 and not allow_zero):
        requirement = "nonnegative" if allow_zero else "positive"
        raise ValidationError(f"must be {requirement}", field=name, value=str(value))
    return value


def validate_seed(seed: Optional[int]) -> int:
    """Seeds must be nonnegative integers (numpy SeedSequence entropy)."""
    if seed is None or isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise ValidationError("seed must be a nonnegative integer", field="seed", value=str(seed))
    return int(seed)
