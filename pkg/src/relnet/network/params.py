"""
Learnable parameters of the ground network and the combining-rule modes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from relnet.errors import ConfigError, NumericalError
from relnet.seeding import rng_for

INIT_RANGE = 0.1


class CombinerMode(str, Enum):
    """Aggregator collapsing the groundings of one rule into one value."""

    AVERAGE = "average"
    MAX = "max"
    NOISY_OR = "noisyor"

    @classmethod
    def parse(cls, value: Union[str, "CombinerMode"]) -> "CombinerMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace("-", "").replace("_", ""))
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ConfigError(f"Unknown combiner {value!r}; choose one of {choices}") from None


@dataclass
class ModelParams:
    """
    Tied rule weights w (M,), rule-to-output weights u (M, C), biases b (C,).

    Class index 1 is the positive class for binary targets.
    """

    w: np.ndarray
    u: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.u = np.asarray(self.u, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.w.ndim != 1 or self.u.ndim != 2 or self.b.ndim != 1:
            raise ValueError("ModelParams expects w (M,), u (M, C) and b (C,)")
        if self.u.shape != (self.w.shape[0], self.b.shape[0]):
            raise ValueError(f"Shape mismatch: w {self.w.shape}, u {self.u.shape}, b {self.b.shape}")

    @property
    def num_rules(self) -> int:
        return self.w.shape[0]

    @property
    def num_classes(self) -> int:
        return self.b.shape[0]

    @classmethod
    def initialize(cls, num_rules: int, num_classes: int = 2, seed: int = 0) -> "ModelParams":
        """
        Seeded initialization: w, u ~ Uniform(-0.1, 0.1), b = 0.

        w and u draw from separate streams, so M does not change the
        values of the other block.
        """
        if num_rules < 1 or num_classes < 2:
            raise ValueError(f"Need at least 1 rule and 2 classes, got M={num_rules}, C={num_classes}")
        w = rng_for(seed, "init", "w").uniform(-INIT_RANGE, INIT_RANGE, size=num_rules)
        u = rng_for(seed, "init", "u").uniform(-INIT_RANGE, INIT_RANGE, size=(num_rules, num_classes))
        return cls(w=w, u=u, b=np.zeros(num_classes))

    @classmethod
    def zeros(cls, num_rules: int, num_classes: int = 2) -> "ModelParams":
        return cls(np.zeros(num_rules), np.zeros((num_rules, num_classes)), np.zeros(num_classes))

    def copy(self) -> "ModelParams":
        return ModelParams(self.w.copy(), self.u.copy(), self.b.copy())

    def check_finite(self) -> None:
        for name in ("w", "u", "b"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NumericalError(f"Non-finite entries in parameter block {name}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (
            np.array_equal(self.w, other.w)
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.b, other.b)
        )
