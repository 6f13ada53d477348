"""
Autocrat - Game File Schemas

Pydantic models for the game file format. Numbers are read losslessly:
JSON decimals arrive as Decimal and strings like "3/10" are accepted too.
"""

from decimal import Decimal
from fractions import Fraction
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

ExactNumber = Union[int, Decimal, str]


def to_fraction(value: Union[ExactNumber, float, Fraction]) -> Fraction:
    """
    Convert a number literal to an exact rational.

    Floats are converted by their exact binary expansion; decimal literals
    and "p/q" strings are exact.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def fraction_to_json(value: Fraction) -> Union[int, float, str]:
    """Shortest JSON literal that reads back to exactly ``value``."""
    if value.denominator == 1:
        return int(value)
    as_float = float(value)
    if Fraction(Decimal(repr(as_float))) == value:
        return as_float
    return f"{value.numerator}/{value.denominator}"


class StateDocument(BaseModel):
    """One state of the game file."""
    autocrat_actions: List[str] = Field(..., description="Autocrat actions X_s in declared order")
    opponent_actions: List[str] = Field(..., description="Opponent actions Y_s in declared order")
    transitions: Dict[str, str] = Field(..., description='"x,y" -> successor state')
    utility: Dict[str, ExactNumber] = Field(..., description='"x,y" -> unscaled utility')


class GameDocument(BaseModel):
    """Top-level game file."""
    model_config = ConfigDict(populate_by_name=True)

    discount: ExactNumber = Field(..., alias="lambda", description="Discount factor in (0, 1)")
    start: str = Field(..., description="Start state")
    states: Dict[str, StateDocument] = Field(..., description="States in declared order")
    name: Optional[str] = Field(None, description="Free-form game name")
