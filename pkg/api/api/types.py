"""
    Kind tags and option value types.

    The enums name the variants of every entropic quantity and bound; the
    ``TypeValidator`` converts raw option strings (from the CLI or from
    JSON parameters) into typed values with a uniform error.
"""
import math
from enum import Enum
from typing import Any, List

from .exceptions import ValidationError


class DivergenceKind(Enum):
    PETZ = "petz"
    SANDWICHED = "sandwiched"


class EntropyKind(Enum):
    """Conditional entropies: against ρ_E (down), optimised σ_E (star), sandwiched against ρ_E (down_star)."""
    DOWN = "down"
    STAR = "star"
    DOWN_STAR = "down_star"


class MutualInfoKind(Enum):
    DOWN = "down"
    STAR = "star"


class ModerateKind(Enum):
    PA_ACH = "pa_ach"
    PA_CONV = "pa_conv"
    WT_ACH = "wt_ach"
    WT_CONV = "wt_conv"


class BoundSide(Enum):
    ACH = "ach"
    CONV = "conv"


class Units(Enum):
    NATS = "nats"
    BITS = "bits"

    def from_nats(self, value: float, power: int = 1) -> float:
        """Convert a value in nats^power to this unit."""
        if self is Units.BITS:
            return value / math.log(2) ** power
        return value

    def to_nats(self, value: float) -> float:
        """Convert a value in this unit to nats."""
        if self is Units.BITS:
            return value * math.log(2)
        return value


class ValueType(Enum):
    INT = "int"
    FLOAT = "float"
    FLOAT_LIST = "float_list"
    INT_LIST = "int_list"
    STR = "str"


class TypeValidator:
    """Conversion of raw option values to typed values."""

    @staticmethod
    def convert_to_type(value: Any, target_type: ValueType) -> Any:
        """Convert value to target type"""
        if target_type == ValueType.INT:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"{value} is not an integer")
            return int(value)
        elif target_type == ValueType.FLOAT:
            result = float(value)
            if math.isnan(result):
                raise ValueError("NaN is not accepted")
            return result
        elif target_type in (ValueType.FLOAT_LIST, ValueType.INT_LIST):
            item_type = ValueType.FLOAT if target_type == ValueType.FLOAT_LIST else ValueType.INT
            if isinstance(value, str):
                items: List[Any] = [v for v in value.split(",") if v.strip()]
            elif isinstance(value, (list, tuple)):
                items = list(value)
            else:
                items = [value]
            return [TypeValidator.convert_to_type(v, item_type) for v in items]
        else:  # STR
            return str(value)

    @staticmethod
    def validate_and_convert(value: Any, target_type: ValueType, name: str = "value") -> Any:
        """Validate and convert value, raising ``ValidationError`` on failure."""
        try:
            return TypeValidator.convert_to_type(value, target_type)
        except (ValueError, TypeError) as e:
            raise ValidationError(
                f"Cannot convert {name}={value!r} to {target_type.value}: {e}"
            ) from e

    @staticmethod
    def parse_enum(value: Any, enum_cls, name: str):
        """Look up an enum member by its value, listing the allowed values on failure."""
        if isinstance(value, enum_cls):
            return value
        try:
            return enum_cls(str(value).lower())
        except ValueError:
            allowed = ", ".join(m.value for m in enum_cls)
            raise ValidationError(f"Unknown {name} '{value}'. Expected one of: {allowed}.")
