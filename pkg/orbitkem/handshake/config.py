from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import (
    BaseModel,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from orbitkem.constants import (
    CSP_DEFAULT_MTU,
    CSP_DEFAULT_PRIORITY,
    CSP_MAX_MTU,
    CSP_MIN_MTU,
    DEFAULT_LINK_KEY,
    FRAGMENT_HEADER_BYTES,
    GROUND_ADDRESS,
    HANDSHAKE_SOURCE_PORT,
    HMAC_REJECT_LIMIT,
    MAX_RETRIES_PER_PASS,
    PORT_CONTROL,
    PORT_CT_FRAGMENT,
    PORT_DATA,
    PORT_PK_FRAGMENT,
    SATELLITE_ADDRESS,
    SESSION_TIMEOUT_US,
    TICK_INTERVAL_US,
)


class Role(str, Enum):
    KEY_HOLDER = "key_holder"
    ENCAPSULATOR = "encapsulator"

    @property
    def peer(self) -> "Role":
        return Role.ENCAPSULATOR if self is Role.KEY_HOLDER else Role.KEY_HOLDER


Party = Literal["ground", "satellite"]


class HandshakeConfig(BaseModel):
    party: Party = "ground"
    role: Role | None = None
    session_id: int = Field(default=1, ge=0, le=0xFFFF)
    local_address: int | None = Field(default=None, ge=0, le=31)
    peer_address: int | None = Field(default=None, ge=0, le=31)
    priority: int = Field(default=CSP_DEFAULT_PRIORITY, ge=0, le=3)
    mtu: int = Field(default=CSP_DEFAULT_MTU, ge=CSP_MIN_MTU, le=CSP_MAX_MTU)
    pk_port: int = Field(default=PORT_PK_FRAGMENT, ge=0, le=63)
    ct_port: int = Field(default=PORT_CT_FRAGMENT, ge=0, le=63)
    control_port: int = Field(default=PORT_CONTROL, ge=0, le=63)
    data_port: int = Field(default=PORT_DATA, ge=0, le=63)
    source_port: int = Field(default=HANDSHAKE_SOURCE_PORT, ge=0, le=63)
    link_key: bytes = DEFAULT_LINK_KEY
    crc_on: bool = True
    hmac_on: bool = True
    hmac_alg: Literal["sha1", "sha256"] = "sha1"
    hmac_scope: Literal["header", "payload"] = "header"
    tick_interval_us: int = Field(default=TICK_INTERVAL_US, gt=0)
    max_retries: int = Field(default=MAX_RETRIES_PER_PASS, ge=1)
    timeout_us: int = Field(default=SESSION_TIMEOUT_US, gt=0)
    hmac_reject_limit: int = Field(default=HMAC_REJECT_LIMIT, ge=1)

    @field_validator("link_key", mode="before")
    @classmethod
    def _parse_link_key(cls, value: object) -> object:
        if isinstance(value, str):
            return bytes.fromhex(value)
        return value

    @field_serializer("link_key")
    def _dump_link_key(self, value: bytes) -> str:
        return value.hex()

    @model_validator(mode="after")
    def _fill_party_defaults(self) -> "HandshakeConfig":
        ground = self.party == "ground"
        if self.role is None:
            self.role = Role.KEY_HOLDER if ground else Role.ENCAPSULATOR
        if self.local_address is None:
            self.local_address = GROUND_ADDRESS if ground else SATELLITE_ADDRESS
        if self.peer_address is None:
            self.peer_address = SATELLITE_ADDRESS if ground else GROUND_ADDRESS
        if len({self.pk_port, self.ct_port, self.control_port, self.data_port}) != 4:
            raise ValueError("Handshake and data ports must be distinct.")
        if self.hmac_on and len(self.link_key) < 16:
            raise ValueError("Link key must be at least 16 bytes.")
        return self

    @property
    def chunk_size(self) -> int:
        return self.mtu - FRAGMENT_HEADER_BYTES

    @property
    def hmac_key(self) -> bytes | None:
        return self.link_key if self.hmac_on else None

    def __repr_args__(self):  # type: ignore[no-untyped-def]
        for name, value in super().__repr_args__():
            yield name, ("<redacted>" if name == "link_key" else value)

    def peer_config(self) -> "HandshakeConfig":
        """The matching configuration for the other end of the link."""
        return self.model_copy(
            update={
                "party": "satellite" if self.party == "ground" else "ground",
                "role": self.role.peer if self.role else None,
                "local_address": self.peer_address,
                "peer_address": self.local_address,
            }
        )
