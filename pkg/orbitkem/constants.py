CONFIG_FILE = "orbitkem.conf"
REPORT_SCHEMA_VERSION = 1
TRACE_SCHEMA_VERSION = 1

# Kyber-512 (round 3)
KEM_N = 256
KEM_Q = 3329
KEM_K = 2
KEM_ETA1 = 3
KEM_ETA2 = 2
KEM_DU = 10
KEM_DV = 4
KEM_SYMBYTES = 32
KEM_SSBYTES = 32
KEM_KEYGEN_SEED_BYTES = 64
KEM_ENCAPS_SEED_BYTES = 32
KAT_SEED_BYTES = 48
KAT_DEFAULT_FILE = "PQCkemKAT_1632.rsp"

# CSP framing
CSP_HEADER_BYTES = 4
CSP_CRC_BYTES = 4
CSP_HMAC_BYTES = 4
CSP_FLAG_HMAC = 0x08
CSP_FLAG_XTEA = 0x04
CSP_FLAG_RDP = 0x02
CSP_FLAG_CRC = 0x01
CSP_MAX_PRIORITY = 3
CSP_MAX_ADDRESS = 31
CSP_MAX_PORT = 63
CSP_MIN_MTU = 32
CSP_MAX_MTU = 1024
CSP_DEFAULT_MTU = 200
CSP_HMAC_ALGORITHMS = ("sha1", "sha256")
CSP_HMAC_SCOPES = ("header", "payload")
CSP_DEFAULT_PRIORITY = 2
FRAGMENT_HEADER_BYTES = 8
FRAGMENT_MAX_TOTAL = 0xFFFF

# Handshake
GROUND_ADDRESS = 1
SATELLITE_ADDRESS = 10
PORT_PK_FRAGMENT = 20
PORT_CT_FRAGMENT = 21
PORT_CONTROL = 22
PORT_DATA = 23
HANDSHAKE_SOURCE_PORT = 32
CONFIRM_TAG_BYTES = 16
CONFIRM_LABEL_GS_TO_SAT = "GS→SAT".encode("utf-8")
CONFIRM_LABEL_SAT_TO_GS = "SAT→GS".encode("utf-8")
TICK_INTERVAL_US = 5_000_000
MAX_RETRIES_PER_PASS = 8
SESSION_TIMEOUT_US = 30 * 86_400 * 1_000_000
HMAC_REJECT_LIMIT = 64
DEFAULT_LINK_KEY = bytes.fromhex("6f726269746b656d2d6c696e6b2d6b6579")
SNAPSHOT_MAGIC = b"OKHS"
SNAPSHOT_VERSION = 1

# Session crypto
HKDF_SALT = b"orbitkem/v1"
AES_KEY_BYTES = 32
IV_SALT_BYTES = 12
LEGACY_MAC_KEY_BYTES = 16
XTEA_KEY_BYTES = 16
GCM_TAG_BYTES = 16
FRAME_SEQUENCE_BYTES = 8
REPLAY_WINDOW = 64
XTEA_DELTA = 0x9E3779B9
XTEA_ROUNDS = 32

# Orbit simulation
US_PER_SECOND = 1_000_000
DEFAULT_ORBIT_PERIOD_S = 5700
DEFAULT_PASS_DURATION_S = 480
DEFAULT_START_OFFSET_S = 0
DEFAULT_DATA_RATE_BPS = 9600
DEFAULT_TURNAROUND_MS = 20
DEFAULT_HORIZON_S = 2 * 86_400
DEFAULT_DATA_FRAMES = 4
CARRIER_LABEL = "436.2 MHz UHF"

# Reports, persistence and bench
REPORT_FORMATS = ("json", "csv")
BENCH_MIN_RELIABLE_ITERATIONS = 100
BENCH_DEFAULT_ITERATIONS = 100
BENCH_OPERATIONS = (
    "keygen",
    "encaps",
    "decaps",
    "seal",
    "verify",
    "aes_encrypt",
    "aes_decrypt",
    "xtea_block",
    "ntt",
    "tamper",
)
SYMMETRIC_KEY_BYTES = 32
KEYSTORE_KEYPAIR_BYTES = 800 + 1632
LOCK_TIMEOUT_SECONDS = 2.0
LOCK_MAX_ATTEMPTS = 20
LOCK_BACKOFF_BASE_SECONDS = 0.05
LOCK_BACKOFF_MAX_SECONDS = 0.5
MAX_SWEEP_WORKERS = 16

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
