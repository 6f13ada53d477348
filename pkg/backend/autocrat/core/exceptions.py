"""
Autocrat - Exceptions

Error hierarchy shared by the services and the command line. Every error
carries the process exit code the CLI reports for it.
"""

from typing import Any, Dict, List, Optional, Tuple

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_PARSE = 2
EXIT_EMPTY = 3
EXIT_VALUE_RANGE = 4
EXIT_VERIFICATION = 5


class AutocratError(Exception):
    """Base class for all domain errors."""

    exit_code: int = EXIT_OTHER

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class GameParseError(AutocratError, ValueError):
    """The game document is not valid JSON or does not match the schema."""

    exit_code = EXIT_PARSE

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message, {"location": location})
        self.location = location


class GameValidationError(AutocratError, ValueError):
    """The game document parsed but violates a GameGraph invariant."""

    exit_code = EXIT_PARSE

    def __init__(self, violations: List[Any]):
        summary = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid game: {summary}", {"violations": [str(v) for v in violations]})
        self.violations = violations


class UnknownStateError(AutocratError, ValueError):
    """A state name that is not declared in the game."""

    def __init__(self, state: str):
        super().__init__(f"unknown state {state!r}", {"state": state})
        self.state = state


class UnknownActionError(AutocratError, ValueError):
    """An action name that is not available in the given state."""

    def __init__(self, state: str, action: str, player: str = "autocrat"):
        super().__init__(
            f"unknown {player} action {action!r} in state {state!r}",
            {"state": state, "action": action, "player": player},
        )
        self.state = state
        self.action = action


class NonConvergenceError(AutocratError, RuntimeError):
    """An iteration budget was exhausted before the stopping rule fired."""


class EmptyGameError(AutocratError):
    """Pruning removed every state and the caller asked for strictness."""

    exit_code = EXIT_EMPTY


class PrunedStateError(AutocratError, ValueError):
    """The state has no enforceable values because pruning removed it."""

    exit_code = EXIT_VALUE_RANGE

    def __init__(self, state: str):
        super().__init__(f"no enforceable values in state {state!r}", {"state": state})
        self.state = state


class PrunedStartError(PrunedStateError):
    """The requested start state was pruned away."""


class ValueOutOfRangeError(AutocratError, ValueError):
    """The requested target value is not enforceable from the start state."""

    exit_code = EXIT_VALUE_RANGE

    def __init__(self, state: str, value: float, interval: Tuple[float, float], kind: str):
        super().__init__(
            f"value {value} is {kind} in state {state!r}; enforceable interval is "
            f"[{interval[0]}, {interval[1]}]",
            {"state": state, "value": value, "interval": list(interval), "kind": kind},
        )
        self.state = state
        self.value = value
        self.interval = interval


class TieAmbiguityError(AutocratError):
    """Exact certification shows the approximate arg-extremum was wrong."""

    def __init__(self, state: str, residual: Any):
        super().__init__(
            f"exact certification failed in state {state!r} (residual {residual})",
            {"state": state, "residual": str(residual)},
        )
        self.state = state
        self.residual = residual


class TargetDriftError(AutocratError, RuntimeError):
    """A controller target left its state's interval beyond the drift tolerance."""

    def __init__(self, state: str, target: float, interval: Tuple[float, float]):
        super().__init__(
            f"target {target!r} drifted outside [{interval[0]!r}, {interval[1]!r}] in state {state!r}",
            {"state": state, "target": target, "interval": list(interval)},
        )
        self.state = state
        self.target = target
        self.interval = interval


class HorizonTooLargeError(AutocratError, ValueError):
    """The enumeration oracle would exceed its path budget."""

    def __init__(self, horizon: int, nodes: int, budget: int):
        super().__init__(
            f"horizon {horizon} needs more than {budget} enumeration nodes (reached {nodes})",
            {"horizon": horizon, "nodes": nodes, "budget": budget},
        )


class VerificationFailedError(AutocratError):
    """At least one verdict row failed."""

    exit_code = EXIT_VERIFICATION
