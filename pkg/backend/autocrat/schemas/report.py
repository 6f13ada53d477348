"""
Autocrat - Report Schemas

Pydantic models for solve reports, exact bounds and lambda sweeps.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class RepliesDocument(BaseModel):
    y_plus: str
    y_minus: str


class StateSummary(BaseModel):
    """Per-state result of a solve."""
    model_config = ConfigDict(populate_by_name=True)

    m: float = Field(..., description="Left endpoint m_s")
    M: float = Field(..., description="Right endpoint M_s")
    x_minus: List[str] = Field(..., description="All tied left extremal actions")
    x_plus: List[str] = Field(..., description="All tied right extremal actions")
    cornered: bool
    support: List[str] = Field(..., description="Surviving autocrat actions")
    replies: Dict[str, RepliesDocument] = Field(default_factory=dict)


class TraceDocument(BaseModel):
    """One run of the bound iteration."""
    outer_round: int
    init: str
    iterations: int
    deltas: List[float]
    m: List[Dict[str, float]]
    M: List[Dict[str, float]]


class ExactBoundsDocument(BaseModel):
    """Exact endpoints on one side as rational strings."""
    side: str
    values: Dict[str, str]
    certified: Dict[str, bool]
    diagnostics: List[str] = Field(default_factory=list)


class SolveReportDocument(BaseModel):
    """JSON form of a solve report."""
    model_config = ConfigDict(populate_by_name=True)

    status: str
    discount: float = Field(..., alias="lambda")
    tol: float
    start: str
    start_pruned: bool = False
    L: int = Field(..., description="Longest cornered chain")
    memory: int = Field(..., description="Memory needed by the autocratic strategy")
    cornered: List[str]
    states: Dict[str, StateSummary]
    pruned_actions: List[Tuple[str, str, int]]
    iterations: int
    runtime_estimate: int
    diagnostics: List[str] = Field(default_factory=list)
    exact: Optional[Dict[str, ExactBoundsDocument]] = None
    trace: Optional[List[TraceDocument]] = None


class SweepRow(BaseModel):
    """Summary of one solve in a lambda sweep."""
    model_config = ConfigDict(populate_by_name=True)

    discount: float = Field(..., alias="lambda")
    status: str
    L: int
    intervals: Dict[str, Tuple[float, float]]
