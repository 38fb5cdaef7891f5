from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import TYPE_CHECKING, Any

from rich.console import Console
from rich.table import Table

if TYPE_CHECKING:
    from groundstation import GroundStationApp


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    if isinstance(value, (list, tuple)):
        return ", ".join(str(item) for item in value) or "-"
    if value is None:
        return "-"
    return str(value)


class ConsoleView:
    """Terminal rendering of report tables and status lines."""

    def __init__(
        self,
        app: "GroundStationApp",
        console: Console | None = None,
        error_console: Console | None = None,
    ) -> None:
        self.app = app
        self.console = console or Console(highlight=False)
        self.error_console = error_console or Console(stderr=True, highlight=False)

    def table(self, title: str, rows: Iterable[Mapping[str, Any]]) -> None:
        rows = list(rows)
        if not rows:
            self.console.print(f"{title}: no rows")
            return
        table = Table(title=title)
        columns = list(rows[0])
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_cell(row.get(column)) for column in columns))
        self.console.print(table)

    def pairs(self, title: str, pairs: Iterable[tuple[str, Any]]) -> None:
        table = Table(title=title, show_header=False)
        table.add_column("field", style="bold")
        table.add_column("value", overflow="fold")
        for name, value in pairs:
            table.add_row(name, _cell(value))
        self.console.print(table)

    def message(self, text: str) -> None:
        self.console.print(text)

    def error(self, text: str) -> None:
        self.error_console.print(f"error: {text}", style="red")
