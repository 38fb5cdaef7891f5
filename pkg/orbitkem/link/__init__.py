from orbitkem.link.csp import (
    CspHeader,
    CspPacket,
    LinkStats,
    crc32,
    hmac_tag,
    pack_header,
    seal,
    unpack_header,
    verify,
)
from orbitkem.link.dump import DumpRow, dump_packet
from orbitkem.link.errors import (
    BadCrc,
    BadHmac,
    EmptyPayload,
    HeaderFieldError,
    IntegrityConflict,
    LinkError,
    MissingHmacKey,
    PayloadTooLarge,
    Truncated,
)
from orbitkem.link.fragment import (
    Fragment,
    FragmentHeader,
    Incomplete,
    Reassembler,
    fragment,
    reassemble,
)

__all__ = [
    "BadCrc",
    "BadHmac",
    "CspHeader",
    "CspPacket",
    "DumpRow",
    "EmptyPayload",
    "Fragment",
    "FragmentHeader",
    "HeaderFieldError",
    "Incomplete",
    "IntegrityConflict",
    "LinkError",
    "LinkStats",
    "MissingHmacKey",
    "PayloadTooLarge",
    "Reassembler",
    "Truncated",
    "crc32",
    "dump_packet",
    "fragment",
    "hmac_tag",
    "pack_header",
    "reassemble",
    "seal",
    "unpack_header",
    "verify",
]
