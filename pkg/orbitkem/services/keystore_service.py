from __future__ import annotations

from typing import TYPE_CHECKING

from orbitkem.constants import (
    EXIT_OK,
    EXIT_USAGE,
    KEYSTORE_KEYPAIR_BYTES,
    SYMMETRIC_KEY_BYTES,
)
from orbitkem.models import ConfigError, KeystoreRow

if TYPE_CHECKING:
    from groundstation import GroundStationApp


def pairwise_keys(n: int) -> int:
    return n * (n - 1) // 2


def keystore_row(n: int) -> KeystoreRow:
    """Key counts for n satellites: pre-shared pairwise keys vs one KEM keypair each.

    In the pairwise scheme every node stores one key per peer. In the
    public-key scheme each node stores only its own keypair and fetches peer
    public keys on demand, so the fleet holds n keypairs (2n keys).
    """
    if n < 1:
        raise ConfigError("Satellite count must be at least 1.")
    pairs = pairwise_keys(n)
    return KeystoreRow(
        n=n,
        pairwise_keys=pairs,
        pk_keys=2 * n,
        pairwise_storage_bytes=pairs * SYMMETRIC_KEY_BYTES,
        pk_storage_bytes=n * KEYSTORE_KEYPAIR_BYTES,
        pairwise_per_node_bytes=(n - 1) * SYMMETRIC_KEY_BYTES,
        pk_per_node_bytes=KEYSTORE_KEYPAIR_BYTES,
    )


class KeystoreService:
    def __init__(self, app: "GroundStationApp") -> None:
        self.app = app

    def run(self, counts: list[int]) -> int:
        try:
            rows = [keystore_row(n).model_dump() for n in counts]
        except ConfigError as exc:
            self.app.view.error(str(exc))
            return EXIT_USAGE
        self.app.report_service.emit("keystore", {"counts": counts}, rows)
        self.app.view.table("Key management scaling", rows)
        return EXIT_OK
