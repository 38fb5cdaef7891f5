from orbitkem.session.errors import (
    AuthFail,
    BlockLengthError,
    NonceReuse,
    ReplayRejected,
    SessionCryptoError,
)
from orbitkem.session.frames import (
    FrameOpener,
    FrameSealer,
    ReplayWindow,
    SecureFrame,
    aes_gcm_open,
    aes_gcm_seal,
    decrypt_frame,
    encrypt_frame,
    frame_nonce,
)
from orbitkem.session.keys import SessionKeys, derive_keys, hkdf_sha256
from orbitkem.session.tamper import TamperResult, tamper_sweep
from orbitkem.session.xtea import (
    legacy_open,
    legacy_seal,
    xtea_ctr,
    xtea_decrypt_block,
    xtea_encrypt_block,
)

__all__ = [
    "AuthFail",
    "BlockLengthError",
    "FrameOpener",
    "FrameSealer",
    "NonceReuse",
    "ReplayRejected",
    "ReplayWindow",
    "SecureFrame",
    "SessionCryptoError",
    "SessionKeys",
    "TamperResult",
    "aes_gcm_open",
    "aes_gcm_seal",
    "decrypt_frame",
    "derive_keys",
    "encrypt_frame",
    "frame_nonce",
    "hkdf_sha256",
    "legacy_open",
    "legacy_seal",
    "tamper_sweep",
    "xtea_ctr",
    "xtea_decrypt_block",
    "xtea_encrypt_block",
]
