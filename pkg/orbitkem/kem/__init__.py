from orbitkem.kem.errors import (
    DomainMismatch,
    InsufficientInput,
    KatError,
    KatFormatError,
    KemError,
    MalformedCiphertext,
    MalformedKey,
    RandomnessError,
)
from orbitkem.kem.kat import (
    KatDrbg,
    KatOutcome,
    KatVector,
    format_kat_file,
    generate_vectors,
    parse_kat_text,
    read_kat_file,
    run_vector,
)
from orbitkem.kem.kyber import (
    KemCiphertext,
    KemKeyPair,
    SharedSecret,
    kem_decaps,
    kem_encaps,
    kem_keygen,
    public_key_of,
    validate_public_key,
)
from orbitkem.kem.params import KYBER512, KemParams

__all__ = [
    "DomainMismatch",
    "InsufficientInput",
    "KYBER512",
    "KatDrbg",
    "KatError",
    "KatFormatError",
    "KatOutcome",
    "KatVector",
    "KemCiphertext",
    "KemError",
    "KemKeyPair",
    "KemParams",
    "MalformedCiphertext",
    "MalformedKey",
    "RandomnessError",
    "SharedSecret",
    "format_kat_file",
    "generate_vectors",
    "kem_decaps",
    "kem_encaps",
    "kem_keygen",
    "parse_kat_text",
    "public_key_of",
    "read_kat_file",
    "run_vector",
    "validate_public_key",
]
