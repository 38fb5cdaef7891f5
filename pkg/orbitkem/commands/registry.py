from __future__ import annotations

from argparse import Namespace
from collections.abc import Callable
from pathlib import Path
from typing import TYPE_CHECKING

from orbitkem.constants import EXIT_USAGE

if TYPE_CHECKING:
    from groundstation import GroundStationApp


class CommandRegistry:
    def __init__(self, app: "GroundStationApp"):
        self.app = app

    def build(self) -> dict[str, Callable[[Namespace], int]]:
        return {
            "kat": self.command_kat,
            "exchange": self.command_exchange,
            "keystore": self.command_keystore,
            "bench": self.command_bench,
            "dump-packet": self.command_dump_packet,
        }

    def command_kat(self, args: Namespace) -> int:
        if args.generate is not None:
            if not self.app.config.output:
                self.app.view.error("kat --generate needs --output FILE.")
                return EXIT_USAGE
            return self.app.kat_service.generate(
                args.generate, Path(self.app.config.output)
            )
        return self.app.kat_service.check_file(Path(args.path))

    def command_exchange(self, _args: Namespace) -> int:
        return self.app.exchange_service.run()

    def command_keystore(self, args: Namespace) -> int:
        return self.app.keystore_service.run(list(args.counts))

    def command_bench(self, _args: Namespace) -> int:
        return self.app.bench_service.run()

    def command_dump_packet(self, args: Namespace) -> int:
        return self.app.dump_service.run(args.packet, args.key)
