"""Ground-station command line: KATs, simulated exchanges, benchmarks, key analysis."""

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from orbitkem import __version__
from orbitkem.commands import CommandRegistry
from orbitkem.constants import (
    EXIT_FAILURE,
    EXIT_USAGE,
    KAT_DEFAULT_FILE,
    REPORT_FORMATS,
)
from orbitkem.models import ConfigError, RunConfig
from orbitkem.state import AppState

portalocker: Any
_PORTALOCKER_IMPORT_ERROR: ImportError | None
try:
    import portalocker as _portalocker  # type: ignore[import-not-found]
except ImportError as exc:  # pragma: no cover - tested via startup guard
    portalocker = None
    _PORTALOCKER_IMPORT_ERROR = exc
else:
    portalocker = _portalocker
    _PORTALOCKER_IMPORT_ERROR = None

logger = logging.getLogger(__name__)
__all__ = ["GroundStationApp", "build_parser"]

# Argument destinations that feed verb handlers rather than RunConfig.
_VERB_ARGS = {
    "command",
    "config",
    "verbose",
    "path",
    "generate",
    "counts",
    "packet",
    "key",
}


def _add_global_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        help="-v for info logging, -vv for debug",
    )
    parser.add_argument("--output", help="report file")
    parser.add_argument("--format", dest="report_format", choices=REPORT_FORMATS)


def _add_link_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hmac-alg", dest="hmac_alg", choices=("sha1", "sha256"))
    parser.add_argument(
        "--hmac-scope", dest="hmac_scope", choices=("header", "payload")
    )


def _verb(
    verbs: Any, name: str, common: argparse.ArgumentParser, help_text: str
) -> argparse.ArgumentParser:
    parser: argparse.ArgumentParser = verbs.add_parser(
        name,
        parents=[common],
        argument_default=argparse.SUPPRESS,
        help=help_text,
    )
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    _add_global_options(common)

    parser = argparse.ArgumentParser(
        prog="groundstation",
        description=__doc__,
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument(
        "--version", action="version", version=f"orbitkem {__version__}"
    )
    verbs = parser.add_subparsers(dest="command", required=True)

    kat = _verb(
        verbs, "kat", common, "check or generate Kyber-512 known-answer vectors"
    )
    kat.add_argument("path", nargs="?", default=KAT_DEFAULT_FILE)
    kat.add_argument("--generate", type=int, default=None, metavar="N")

    exchange = _verb(verbs, "exchange", common, "simulate a handshake over passes")
    exchange.add_argument("--seed", type=int)
    exchange.add_argument("--seeds", type=int, help="number of consecutive seeds")
    exchange.add_argument("--workers", type=int)
    exchange.add_argument("--mtu", type=int)
    exchange.add_argument("--loss", type=float)
    exchange.add_argument("--corrupt", type=float)
    exchange.add_argument("--rate", type=int, help="link data rate in bit/s")
    exchange.add_argument("--turnaround-ms", dest="turnaround_ms", type=int)
    exchange.add_argument("--orbit-period", dest="orbit_period_s", type=int)
    exchange.add_argument("--pass-duration", dest="pass_duration_s", type=int)
    exchange.add_argument("--start-offset", dest="start_offset_s", type=int)
    exchange.add_argument("--horizon", dest="horizon_s", type=int)
    exchange.add_argument(
        "--ground-role", dest="ground_role", choices=("key_holder", "encapsulator")
    )
    exchange.add_argument("--no-crc", dest="crc", action="store_false")
    exchange.add_argument("--no-hmac", dest="hmac", action="store_false")
    exchange.add_argument("--data-frames", dest="data_frames", type=int)
    exchange.add_argument("--trace", help="append the first run's trace as NDJSON")
    exchange.add_argument("--snapshot-dir", dest="snapshot_dir")
    _add_link_options(exchange)

    keystore = _verb(
        verbs, "keystore", common, "key-management scaling for n satellites"
    )
    keystore.add_argument("counts", nargs="+", type=int, metavar="N")

    bench = _verb(verbs, "bench", common, "time KEM, link and frame primitives")
    bench.add_argument("--ops", help="comma-separated operation names")
    bench.add_argument("--iterations", type=int)
    bench.add_argument("--seed", type=int)

    dump = _verb(verbs, "dump-packet", common, "decode a CSP packet given as hex")
    dump.add_argument("packet", metavar="HEX")
    dump.add_argument("--key", default=None, help="HMAC link key as hex")
    _add_link_options(dump)
    return parser


class GroundStationApp:
    config: RunConfig
    verbosity: int
    exit_code: int
    last_envelope: dict[str, Any] | None
    reports_written: list[str]
    environment: dict[str, str]

    def __init__(self) -> None:
        self.ensure_locking_dependency()
        self.state = AppState()
        self.state.apply_to(self)

        from orbitkem.container import GroundStationContainer

        self.container = GroundStationContainer(app=self)
        self.config_repository = self.container.config_repository()
        self.report_repository = self.container.report_repository()
        self.session_repository = self.container.session_repository()
        self.report_service = self.container.report_service()
        self.kat_service = self.container.kat_service()
        self.exchange_service = self.container.exchange_service()
        self.keystore_service = self.container.keystore_service()
        self.bench_service = self.container.bench_service()
        self.dump_service = self.container.dump_service()
        self.view = self.container.view()
        self.command_handlers = CommandRegistry(self).build()

    def ensure_locking_dependency(self) -> None:
        if portalocker is not None:
            return

        detail = ""
        if _PORTALOCKER_IMPORT_ERROR is not None:
            detail = f" Original error: {_PORTALOCKER_IMPORT_ERROR}."
        raise SystemExit(
            "Missing dependency 'portalocker'. "
            "Install dependencies with 'pip install -r requirements.txt'." + detail
        )

    def apply_verbosity(self, verbosity: int) -> None:
        self.verbosity = verbosity
        if verbosity <= 0:
            return
        level = logging.DEBUG if verbosity > 1 else logging.INFO
        logging.getLogger("orbitkem").setLevel(level)
        logging.getLogger(__name__).setLevel(level)

    def load_run_config(self, args: argparse.Namespace) -> RunConfig:
        """File values first, then command-line flags, then validation."""
        config_path = getattr(args, "config", None)
        values = self.config_repository.load_config(
            Path(config_path) if config_path else None
        )
        values.update(
            {
                k: v
                for k, v in vars(args).items()
                if k not in _VERB_ARGS and v is not None
            }
        )
        values["command"] = args.command
        try:
            return RunConfig.model_validate(values)
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc

    def run(self, argv: Sequence[str] | None = None) -> int:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE

        self.apply_verbosity(getattr(args, "verbose", 0))
        try:
            self.config = self.load_run_config(args)
        except ConfigError as exc:
            self.view.error(str(exc))
            self.exit_code = EXIT_USAGE
            return self.exit_code

        handler = self.command_handlers[args.command]
        try:
            self.exit_code = handler(args)
        except Exception:
            logger.exception("Command %s crashed", args.command)
            self.exit_code = EXIT_FAILURE
        return self.exit_code


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    raise SystemExit(GroundStationApp().run())
