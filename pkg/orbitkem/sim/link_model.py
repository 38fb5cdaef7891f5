"""Seeded radio channel: serialization delay, turnaround, loss and corruption."""

from __future__ import annotations

import random
from dataclasses import dataclass

from pydantic import BaseModel, Field

from orbitkem.constants import (
    CARRIER_LABEL,
    DEFAULT_DATA_RATE_BPS,
    DEFAULT_TURNAROUND_MS,
    US_PER_SECOND,
)
from orbitkem.sim.schedule import PassSchedule


class LinkModel(BaseModel):
    data_rate_bps: int = Field(default=DEFAULT_DATA_RATE_BPS, gt=0)
    loss_prob: float = Field(default=0.0, ge=0.0, lt=1.0)
    corrupt_prob: float = Field(default=0.0, ge=0.0, lt=1.0)
    turnaround_ms: int = Field(default=DEFAULT_TURNAROUND_MS, ge=0)
    rng_seed: int = Field(default=0, ge=0, lt=1 << 64)
    carrier: str = CARRIER_LABEL

    def serialization_us(self, size: int) -> int:
        return -(-size * 8 * US_PER_SECOND // self.data_rate_bps)

    @property
    def turnaround_us(self) -> int:
        return self.turnaround_ms * 1000


@dataclass(frozen=True)
class Transmission:
    outcome: str
    t_send_us: int
    t_deliver_us: int | None
    packet: bytes
    window: int | None


class RadioLink:
    """One generator drives every stochastic choice, in a fixed draw order."""

    def __init__(self, model: LinkModel, schedule: PassSchedule) -> None:
        self.model = model
        self.schedule = schedule
        self.rng = random.Random(model.rng_seed)

    def transmit(self, t_send_us: int, packet: bytes) -> Transmission:
        if t_send_us < 0:
            raise ValueError("Send time must be non-negative.")
        model = self.model
        window = self.schedule.window_at(t_send_us)
        t_deliver = (
            t_send_us + model.serialization_us(len(packet)) + model.turnaround_us
        )
        if window is None or self.schedule.window_at(t_deliver) != window:
            return Transmission("out_of_window", t_send_us, None, packet, window)
        if self.rng.random() < model.loss_prob:
            return Transmission("lost", t_send_us, None, packet, window)
        if packet and self.rng.random() < model.corrupt_prob:
            damaged = bytearray(packet)
            position = self.rng.randrange(len(damaged))
            damaged[position] ^= self.rng.randrange(1, 256)
            return Transmission(
                "corrupted", t_send_us, t_deliver, bytes(damaged), window
            )
        return Transmission("delivered", t_send_us, t_deliver, packet, window)
