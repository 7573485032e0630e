"""Eavesdropper models for the quantum channels."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class EveStrategy(Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept_resend"


@dataclass(frozen=True)
class EveModel:
    """Intercept-resend on one flying qubit per round.

    ``basis_set`` holds analyzer angles (radians); ``None`` means the
    protocol's own default set.
    """

    strategy: EveStrategy = EveStrategy.NONE
    basis_set: tuple[float, ...] | None = None
    intercept_probability: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.intercept_probability <= 1.0:
            raise ValueError(f"intercept_probability must be in [0, 1], got {self.intercept_probability}")
        if self.basis_set is not None:
            basis = tuple(float(a) for a in self.basis_set)
            if not basis:
                raise ValueError("basis_set must not be empty")
            object.__setattr__(self, "basis_set", basis)

    @classmethod
    def intercept_resend(cls, probability=1.0, basis_set=None) -> "EveModel":
        return cls(EveStrategy.INTERCEPT_RESEND, basis_set, probability)

    @property
    def active(self) -> bool:
        return self.strategy is EveStrategy.INTERCEPT_RESEND and self.intercept_probability > 0.0

    def angles(self, default) -> tuple[float, ...]:
        return self.basis_set if self.basis_set is not None else tuple(default)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "intercept_probability": self.intercept_probability,
            "basis_set": list(self.basis_set) if self.basis_set is not None else None,
        }


NO_EVE = EveModel()
