"""Answer polarity and the compatibility label it induces."""

from enum import Enum


class Polarity(str, Enum):
    YES = "yes"
    NO = "no"
    NEUTRAL = "neutral"

    @property
    def label(self) -> "CompatLabel":
        return _TO_LABEL[self]


class CompatLabel(str, Enum):
    COMPATIBLE = "compatible"
    INCOMPATIBLE = "incompatible"
    UNKNOWN = "unknown"

    @property
    def polarity(self) -> Polarity:
        return _TO_POLARITY[self]


_TO_LABEL = {
    Polarity.YES: CompatLabel.COMPATIBLE,
    Polarity.NO: CompatLabel.INCOMPATIBLE,
    Polarity.NEUTRAL: CompatLabel.UNKNOWN,
}
_TO_POLARITY = {v: k for k, v in _TO_LABEL.items()}
