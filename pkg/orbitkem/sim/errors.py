from __future__ import annotations

from typing import Any


class SimulationError(ValueError):
    pass


class ScheduleError(SimulationError):
    pass


class HorizonExhausted(SimulationError):
    """The horizon ended before both parties settled; `result` holds the partial run."""

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result
