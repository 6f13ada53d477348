"""
Autocrat - Strategy Schemas

Serializable form of the synthesized autocratic strategy.
"""

from typing import Dict, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

STRATEGY_FORMAT = "autocrat-strategy/1"


class StateEndpoints(BaseModel):
    """Interval and extremal actions of one surviving state."""
    model_config = ConfigDict(populate_by_name=True)

    m: float
    M: float
    x_minus: str
    x_plus: str
    cornered: bool = False


class StrategySpec(BaseModel):
    """Controller parameters minus runtime state."""
    model_config = ConfigDict(populate_by_name=True)

    format: Literal["autocrat-strategy/1"] = STRATEGY_FORMAT
    discount: float = Field(..., alias="lambda", gt=0.0, lt=1.0)
    start: str
    v0: float = Field(..., description="Initial target value")
    drift: float = Field(0.0, ge=0.0, description="Drift tolerance for the controller")
    states: Dict[str, StateEndpoints]

    @model_validator(mode="after")
    def check_start(self):
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} has no endpoints")
        end = self.states[self.start]
        if not end.m - self.drift <= self.v0 <= end.M + self.drift:
            raise ValueError(f"v0={self.v0} outside [{end.m}, {end.M}]")
        return self
