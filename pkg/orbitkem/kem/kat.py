"""Known-answer test vectors in the NIST request/response (.rsp) format."""

from __future__ import annotations

import hmac
import logging
from dataclasses import dataclass, field
from pathlib import Path

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from orbitkem.constants import KAT_SEED_BYTES, KEM_SYMBYTES
from orbitkem.kem.errors import KatFormatError, KemError, RandomnessError
from orbitkem.kem.kyber import kem_decaps, kem_encaps, kem_keygen

logger = logging.getLogger(__name__)

KAT_FIELDS = ("count", "seed", "pk", "sk", "ct", "ss")
_BLOCK = 16


class KatDrbg:
    """AES-256 CTR-DRBG without derivation function, as used by PQCgenKAT."""

    def __init__(self, entropy: bytes, personalization: bytes = b"") -> None:
        if len(entropy) != KAT_SEED_BYTES:
            raise RandomnessError(f"DRBG entropy must be {KAT_SEED_BYTES} bytes.")
        if len(personalization) > KAT_SEED_BYTES:
            raise RandomnessError("DRBG personalization string is too long.")
        material = bytes(
            a ^ b for a, b in zip(entropy, personalization.ljust(KAT_SEED_BYTES, b"\0"))
        )
        self._key = bytes(32)
        self._v = bytes(_BLOCK)
        self._update(material)

    def _increment(self) -> None:
        value = (int.from_bytes(self._v, "big") + 1) % (1 << 128)
        self._v = value.to_bytes(_BLOCK, "big")

    def _block(self) -> bytes:
        self._increment()
        encryptor = Cipher(algorithms.AES(self._key), modes.ECB()).encryptor()
        return encryptor.update(self._v) + encryptor.finalize()

    def _update(self, provided: bytes | None) -> None:
        temp = b"".join(self._block() for _ in range(3))
        if provided is not None:
            temp = bytes(a ^ b for a, b in zip(temp, provided))
        self._key, self._v = temp[:32], temp[32:]

    def random_bytes(self, length: int) -> bytes:
        out = bytearray()
        while len(out) < length:
            out += self._block()
        self._update(None)
        return bytes(out[:length])


@dataclass(frozen=True)
class KatVector:
    count: int
    seed: bytes
    pk: bytes = b""
    sk: bytes = b""
    ct: bytes = b""
    ss: bytes = b""


@dataclass
class KatOutcome:
    count: int
    passed: bool
    mismatches: list[str] = field(default_factory=list)


def parse_kat_text(text: str) -> list[KatVector]:
    vectors: list[KatVector] = []
    current: dict[str, str] = {}

    def flush() -> None:
        if not current:
            return
        if "count" not in current or "seed" not in current:
            raise KatFormatError("KAT record is missing count or seed.")
        try:
            vectors.append(
                KatVector(
                    count=int(current["count"]),
                    **{
                        name: bytes.fromhex(current.get(name, ""))
                        for name in KAT_FIELDS[1:]
                    },
                )
            )
        except ValueError as exc:
            raise KatFormatError(
                f"Bad KAT record {current.get('count')}: {exc}"
            ) from exc
        current.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            flush()
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise KatFormatError(f"Line {lineno}: expected 'name = value'.")
        name = name.strip().lower()
        if name not in KAT_FIELDS:
            raise KatFormatError(f"Line {lineno}: unknown field '{name}'.")
        if name == "count" and current:
            flush()
        current[name] = value.strip()
    flush()

    for vector in vectors:
        if len(vector.seed) != KAT_SEED_BYTES:
            raise KatFormatError(f"Vector {vector.count}: seed must be 48 bytes.")
    return vectors


def read_kat_file(path: Path) -> list[KatVector]:
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise KatFormatError(f"Cannot read KAT file {path}: {exc}") from exc
    return parse_kat_text(text)


def format_kat_file(vectors: list[KatVector], header: str = "kyber512") -> str:
    lines = [f"# {header}", ""]
    for vector in vectors:
        lines.append(f"count = {vector.count}")
        for name in KAT_FIELDS[1:]:
            lines.append(f"{name} = {getattr(vector, name).hex().upper()}")
        lines.append("")
    return "\n".join(lines)


def vector_from_seed(count: int, seed: bytes) -> KatVector:
    drbg = KatDrbg(seed)
    d = drbg.random_bytes(KEM_SYMBYTES)
    z = drbg.random_bytes(KEM_SYMBYTES)
    keypair = kem_keygen(d + z)
    ct, ss = kem_encaps(keypair.public_key, drbg.random_bytes(KEM_SYMBYTES))
    return KatVector(
        count=count,
        seed=seed,
        pk=keypair.public_key,
        sk=keypair.secret_key,
        ct=ct.data,
        ss=ss.data,
    )


def generate_vectors(count: int, entropy: bytes = bytes(range(48))) -> list[KatVector]:
    master = KatDrbg(entropy)
    seeds = [master.random_bytes(KAT_SEED_BYTES) for _ in range(count)]
    return [vector_from_seed(i, seed) for i, seed in enumerate(seeds)]


def run_vector(expected: KatVector) -> KatOutcome:
    actual = vector_from_seed(expected.count, expected.seed)
    mismatches = [
        name
        for name in ("pk", "sk", "ct", "ss")
        if not hmac.compare_digest(getattr(actual, name), getattr(expected, name))
    ]
    try:
        decapsulated = kem_decaps(expected.sk, expected.ct).data
    except KemError:
        decapsulated = b""
    if not hmac.compare_digest(decapsulated, expected.ss):
        mismatches.append("decaps")
    if mismatches:
        logger.info(
            "KAT vector %d mismatched: %s", expected.count, ", ".join(mismatches)
        )
    return KatOutcome(
        count=expected.count, passed=not mismatches, mismatches=mismatches
    )
