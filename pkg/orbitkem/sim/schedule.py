"""Periodic visibility windows standing in for satellite passes."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from orbitkem.constants import (
    DEFAULT_ORBIT_PERIOD_S,
    DEFAULT_PASS_DURATION_S,
    DEFAULT_START_OFFSET_S,
    US_PER_SECOND,
)
from orbitkem.sim.errors import ScheduleError

Window = tuple[int, int]


class PassSchedule(BaseModel):
    orbit_period_s: int = Field(default=DEFAULT_ORBIT_PERIOD_S, gt=0)
    pass_duration_s: int = Field(default=DEFAULT_PASS_DURATION_S, gt=0)
    start_offset_s: int = Field(default=DEFAULT_START_OFFSET_S, ge=0)

    @model_validator(mode="after")
    def _check_disjoint(self) -> "PassSchedule":
        if self.pass_duration_s >= self.orbit_period_s:
            raise ScheduleError(
                f"Pass duration {self.pass_duration_s}s must be shorter than the "
                f"orbit period {self.orbit_period_s}s."
            )
        return self

    @property
    def passes_per_day_visible(self) -> int:
        return len(windows(self, 86_400))

    def window_at(self, t_us: int) -> int | None:
        """Index of the window containing t_us, or None between passes."""
        offset = self.start_offset_s * US_PER_SECOND
        if t_us < offset:
            return None
        period = self.orbit_period_s * US_PER_SECOND
        k, into = divmod(t_us - offset, period)
        return k if into < self.pass_duration_s * US_PER_SECOND else None


def windows(schedule: PassSchedule, horizon_s: int) -> list[Window]:
    """Pass windows [open, close) in microseconds that end within the horizon."""
    if horizon_s <= 0:
        raise ScheduleError("Horizon must be positive.")
    if schedule.pass_duration_s >= schedule.orbit_period_s:
        raise ScheduleError("Pass duration must be shorter than the orbit period.")
    out: list[Window] = []
    k = 0
    while True:
        start = k * schedule.orbit_period_s + schedule.start_offset_s
        end = start + schedule.pass_duration_s
        if end > horizon_s:
            break
        out.append((start * US_PER_SECOND, end * US_PER_SECOND))
        k += 1
    return out
