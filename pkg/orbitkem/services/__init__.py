from orbitkem.services.bench_service import BenchService
from orbitkem.services.dump_service import DumpService
from orbitkem.services.exchange_service import ExchangeService
from orbitkem.services.kat_service import KatService
from orbitkem.services.keystore_service import KeystoreService
from orbitkem.services.report_service import ReportService

__all__ = [
    "BenchService",
    "DumpService",
    "ExchangeService",
    "KatService",
    "KeystoreService",
    "ReportService",
]
