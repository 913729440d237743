from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class OpCounter:
    """Tallies of elementary operations during a reconstruction run.

    ``value_mul_div`` counts multiplications and divisions whose operands are
    grid values or line sums; it stays 0 because values are found by
    subtraction only.  Address arithmetic on flat indices is not counted.
    """

    add_sub: int = 0
    mul_div: int = 0
    comparisons: int = 0
    assignments: int = 0
    value_mul_div: int = 0

    @property
    def total(self) -> int:
        return self.add_sub + self.mul_div + self.comparisons + self.assignments

    def as_dict(self) -> dict:
        out = asdict(self)
        out["total"] = self.total
        return out
