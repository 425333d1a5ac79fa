from __future__ import annotations

from dataclasses import dataclass, field


def bits_for(size: int) -> int:
    """Bits charged for one uniform draw from a set of `size` elements."""
    if size < 1:
        raise ValueError("empty sample space")
    return (size - 1).bit_length()


@dataclass
class SeedBudget:
    bits_drawn: int = 0
    breakdown: dict[str, int] = field(default_factory=dict)

    def draw(self, consumer: str, bits: int) -> "SeedBudget":
        if bits < 0:
            raise ValueError("cannot draw a negative number of bits")
        self.bits_drawn += bits
        self.breakdown[consumer] = self.breakdown.get(consumer, 0) + bits
        return self

    def to_dict(self) -> dict:
        return {"bits_drawn": self.bits_drawn, "breakdown": dict(self.breakdown)}


def budget_draw(budget: SeedBudget, consumer: str, bits: int) -> SeedBudget:
    return budget.draw(consumer, bits)
