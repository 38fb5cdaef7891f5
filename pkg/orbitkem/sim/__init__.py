from orbitkem.sim.errors import HorizonExhausted, ScheduleError, SimulationError
from orbitkem.sim.exchange import (
    ExchangeConfig,
    ExchangeResult,
    kem_seeds,
    run_exchange,
)
from orbitkem.sim.link_model import LinkModel, RadioLink, Transmission
from orbitkem.sim.schedule import PassSchedule, windows
from orbitkem.sim.trace import SimTrace, TraceRecord

__all__ = [
    "ExchangeConfig",
    "ExchangeResult",
    "HorizonExhausted",
    "LinkModel",
    "PassSchedule",
    "RadioLink",
    "ScheduleError",
    "SimTrace",
    "SimulationError",
    "TraceRecord",
    "Transmission",
    "kem_seeds",
    "run_exchange",
    "windows",
]
