from dataclasses import dataclass, field
from typing import List, Optional
import math


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int

    def z_score(self, prediction: float) -> float:
        """Standardized distance of a prediction from this estimate"""
        diff = self.mean - prediction
        if self.std_error > 0:
            return diff / self.std_error
        scale = max(abs(self.mean), abs(prediction))
        return 0.0 if diff == 0 or abs(diff) <= 1e-12 * scale else math.copysign(math.inf, diff)


@dataclass(frozen=True)
class MomentRow:
    name: str
    k: int
    i: Optional[int]
    estimate: McEstimate
    closed_form_prediction: float

    @property
    def z_score(self) -> float:
        return self.estimate.z_score(self.closed_form_prediction)


MOMENT_CSV_HEADER = ("name", "k", "i", "estimate", "std_error", "closed_form_prediction", "z_score")


@dataclass
class MomentReport:
    trials: int
    seed: int
    rows: List[MomentRow] = field(default_factory=list)

    def get(self, name: str, k: int, i: Optional[int] = None) -> MomentRow:
        for row in self.rows:
            if row.name == name and row.k == k and row.i == i:
                return row
        raise KeyError(f"no moment {name} for k={k}, i={i}")

    def flagged(self, limit: float) -> List[MomentRow]:
        return [row for row in self.rows if not abs(row.z_score) <= limit]

    def csv_rows(self):
        for row in self.rows:
            yield (
                row.name,
                row.k,
                "" if row.i is None else row.i,
                float(row.estimate.mean),
                float(row.estimate.std_error),
                float(row.closed_form_prediction),
                float(row.z_score),
            )
