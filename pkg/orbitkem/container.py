from __future__ import annotations

from dependency_injector import containers, providers  # type: ignore[import-not-found]

from orbitkem.repositories import ConfigRepository, ReportRepository, SessionRepository
from orbitkem.services import (
    BenchService,
    DumpService,
    ExchangeService,
    KatService,
    KeystoreService,
    ReportService,
)
from orbitkem.view import ConsoleView


class GroundStationContainer(containers.DeclarativeContainer):
    app: object = providers.Dependency()

    config_repository = providers.Singleton(ConfigRepository)
    report_repository = providers.Singleton(ReportRepository)
    session_repository = providers.Singleton(SessionRepository)

    report_service = providers.Singleton(ReportService, app=app)
    kat_service = providers.Singleton(KatService, app=app)
    exchange_service = providers.Singleton(ExchangeService, app=app)
    keystore_service = providers.Singleton(KeystoreService, app=app)
    bench_service = providers.Singleton(BenchService, app=app)
    dump_service = providers.Singleton(DumpService, app=app)

    view = providers.Singleton(ConsoleView, app=app)
