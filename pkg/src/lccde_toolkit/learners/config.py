from collections.abc import Mapping
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any

from ..exceptions import ConfigurationError


class Variant(str, Enum):
    """Tree-growth variant of a boosted forest"""

    GOSS_LEAFWISE = "goss_leafwise"
    DEPTHWISE = "depthwise"
    OBLIVIOUS = "oblivious"


VARIANT_ORDER: tuple[Variant, ...] = (
    Variant.GOSS_LEAFWISE,
    Variant.DEPTHWISE,
    Variant.OBLIVIOUS,
)
"""Variant at each model index of an ensemble."""


@dataclass(frozen=True)
class BoosterConfig:
    """
    Hyperparameters of one boosted forest.

    Attributes:
        rounds: boosting rounds; each round grows one tree per class
        learning_rate: shrinkage applied to every leaf weight
        max_depth: depth bound for every variant
        l2_reg: L2 penalty on leaf weights (lambda)
        min_child_hessian: smallest hessian sum a child may hold
        max_leaves: leaf bound of the leaf-wise variant
        goss_top_fraction: share of largest-gradient samples always kept
        goss_rand_fraction: share sampled from the remaining samples
        seed: random seed (GOSS sampling)
    """

    rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 6
    l2_reg: float = 1.0
    min_child_hessian: float = 1.0
    max_leaves: int = 31
    goss_top_fraction: float = 0.2
    goss_rand_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        checks = (
            (self.rounds >= 1, f"rounds must be a positive integer, got {self.rounds}"),
            (
                self.learning_rate > 0,
                f"learning_rate must be > 0, got {self.learning_rate}",
            ),
            (
                self.max_depth >= 1,
                f"max_depth must be a positive integer, got {self.max_depth}",
            ),
            (self.l2_reg >= 0, f"l2_reg must be >= 0, got {self.l2_reg}"),
            (
                self.min_child_hessian >= 0,
                f"min_child_hessian must be >= 0, got {self.min_child_hessian}",
            ),
            (
                self.max_leaves >= 1,
                f"max_leaves must be a positive integer, got {self.max_leaves}",
            ),
            (
                0 <= self.goss_top_fraction <= 1,
                f"goss_top_fraction must be in [0, 1], got {self.goss_top_fraction}",
            ),
            (
                0 <= self.goss_rand_fraction <= 1,
                f"goss_rand_fraction must be in [0, 1], got {self.goss_rand_fraction}",
            ),
            (
                self.goss_top_fraction + self.goss_rand_fraction <= 1,
                "goss_top_fraction + goss_rand_fraction must not exceed 1",
            ),
            (
                0 <= self.seed < 2**64,
                f"seed must be a 64-bit unsigned integer, got {self.seed}",
            ),
        )
        for passed, reason in checks:
            if not passed:
                raise ConfigurationError(reason=reason)

    @classmethod
    def lazy_build(
        cls, value: "BoosterConfig | Mapping[str, Any] | None" = None
    ) -> "BoosterConfig":
        if value is None:
            return cls()
        if isinstance(value, cls):
            return value
        if isinstance(value, Mapping):
            unknown = set(value) - cls.field_names()
            if unknown:
                raise ConfigurationError(
                    reason=f"unknown hyperparameters {sorted(unknown)}"
                )
            return cls(**value)
        raise TypeError(f"Unable to build a BoosterConfig from value {value!r}")

    @classmethod
    def field_names(cls) -> set[str]:
        return {field.name for field in fields(cls)}

    @classmethod
    def coerce(cls, name: str, raw: str) -> Any:
        """Parse a textual hyperparameter value into the field's type."""
        for field in fields(cls):
            if field.name == name:
                field_type = int if field.type in (int, "int") else float
                try:
                    return field_type(raw)
                except ValueError:
                    raise ConfigurationError(
                        reason=f"{name} expects {field_type.__name__}, got {raw!r}"
                    ) from None
        raise ConfigurationError(reason=f"unknown hyperparameter {name!r}")

    def with_overrides(self, **changes: Any) -> "BoosterConfig":
        unknown = set(changes) - self.field_names()
        if unknown:
            raise ConfigurationError(reason=f"unknown hyperparameters {sorted(unknown)}")
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def default_configs(seed: int = 0) -> tuple[BoosterConfig, BoosterConfig, BoosterConfig]:
    """Default configuration for every model index, all seeded with `seed`."""
    return tuple(BoosterConfig(seed=seed) for _ in VARIANT_ORDER)  # type: ignore[return-value]
