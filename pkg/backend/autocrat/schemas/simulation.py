"""
Autocrat - Simulation Schemas

Monte Carlo reports and verification verdicts.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class SimulationReport(BaseModel):
    """Statistics over independent episodes."""
    policy: str
    episodes: int
    seed: int
    mean: float = Field(..., description="Mean rescaled total utility")
    stderr: float
    confidence: float = 0.99
    ci99: Tuple[float, float] = Field(..., description="Confidence interval around the mean")
    clamps: int = 0
    mean_rounds: float
    rounds_stderr: float = 0.0

    def covers(self, value: float) -> bool:
        return self.ci99[0] <= value <= self.ci99[1]


class VerdictRow(BaseModel):
    """Verdict for one (target, policy) pair."""
    model_config = ConfigDict(populate_by_name=True)

    target: float
    policy: str
    mc_pass: bool
    mean: Optional[float] = None
    oracle_lo: Optional[float] = None
    oracle_hi: Optional[float] = None
    passed: bool = Field(..., alias="pass")
    error: Optional[str] = None


class VerdictTable(BaseModel):
    rows: List[VerdictRow]
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)
