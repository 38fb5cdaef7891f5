from orbitkem.repositories.config_repository import ConfigRepository
from orbitkem.repositories.interfaces import (
    ConfigRepositoryProtocol,
    ReportRepositoryProtocol,
    SessionRepositoryProtocol,
)
from orbitkem.repositories.report_repository import ReportRepository
from orbitkem.repositories.session_repository import SessionRepository

__all__ = [
    "ConfigRepository",
    "ConfigRepositoryProtocol",
    "ReportRepository",
    "ReportRepositoryProtocol",
    "SessionRepository",
    "SessionRepositoryProtocol",
]
