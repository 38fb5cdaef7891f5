from __future__ import annotations

import hashlib
import logging
import statistics
import time
from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING

from orbitkem.constants import (
    BENCH_MIN_RELIABLE_ITERATIONS,
    CSP_DEFAULT_MTU,
    CSP_FLAG_CRC,
    CSP_FLAG_HMAC,
    DEFAULT_LINK_KEY,
    EXIT_OK,
    FRAGMENT_HEADER_BYTES,
    KEM_SSBYTES,
)
from orbitkem.kem import KYBER512, kem_decaps, kem_encaps, kem_keygen
from orbitkem.kem.ring import RingElement, ntt_forward
from orbitkem.link import CspHeader, seal, verify
from orbitkem.models import BenchReport, BenchRow
from orbitkem.session import (
    decrypt_frame,
    derive_keys,
    encrypt_frame,
    tamper_sweep,
    xtea_encrypt_block,
)
from orbitkem.sim import kem_seeds

if TYPE_CHECKING:
    from groundstation import GroundStationApp

logger = logging.getLogger(__name__)

FRAME_PAYLOAD_BYTES = CSP_DEFAULT_MTU - FRAGMENT_HEADER_BYTES


@dataclass
class BenchCase:
    name: str
    call: Callable[[], object]
    bytes_per_call: int


def measure(case: BenchCase, iterations: int) -> BenchRow:
    samples = []
    for _ in range(iterations):
        start = time.perf_counter_ns()
        case.call()
        samples.append((time.perf_counter_ns() - start) / 1000)
    if len(samples) > 1:
        p95 = statistics.quantiles(samples, n=20, method="inclusive")[-1]
    else:
        p95 = samples[0]
    return BenchRow(
        name=case.name,
        iterations=iterations,
        median_us=statistics.median(samples),
        mean_us=statistics.fmean(samples),
        p95_us=p95,
        bytes_processed=case.bytes_per_call * iterations,
        informational=iterations < BENCH_MIN_RELIABLE_ITERATIONS,
    )


def build_cases(seed: int) -> dict[str, BenchCase]:
    """Fixed inputs for every timed operation, all derived from one seed."""
    keygen_seed, encaps_seed = kem_seeds(seed)
    keypair = kem_keygen(keygen_seed)
    ct, ss = kem_encaps(keypair.public_key, encaps_seed)
    keys = derive_keys(ss, b"bench")
    payload = hashlib.shake_256(keygen_seed).digest(FRAME_PAYLOAD_BYTES)
    header = CspHeader(
        priority=2,
        source=1,
        destination=10,
        destination_port=23,
        source_port=40,
        flags=CSP_FLAG_CRC | CSP_FLAG_HMAC,
    )
    packet = seal(header, payload, crc_on=True, hmac_key=DEFAULT_LINK_KEY)
    wire = packet.to_bytes()
    frame = encrypt_frame(keys, 0, payload)
    element = RingElement.from_ints(payload[i % len(payload)] * 13 for i in range(256))
    return {
        "keygen": BenchCase(
            "keygen",
            lambda: kem_keygen(keygen_seed),
            KYBER512.public_key_bytes + KYBER512.secret_key_bytes,
        ),
        "encaps": BenchCase(
            "encaps",
            lambda: kem_encaps(keypair.public_key, encaps_seed),
            KYBER512.ciphertext_bytes + KEM_SSBYTES,
        ),
        "decaps": BenchCase(
            "decaps",
            lambda: kem_decaps(keypair.secret_key, ct),
            KYBER512.ciphertext_bytes,
        ),
        "seal": BenchCase(
            "seal",
            lambda: seal(header, payload, crc_on=True, hmac_key=DEFAULT_LINK_KEY),
            len(payload),
        ),
        "verify": BenchCase(
            "verify",
            lambda: verify(wire, DEFAULT_LINK_KEY, require_crc=True),
            len(wire),
        ),
        "aes_encrypt": BenchCase(
            "aes_encrypt", lambda: encrypt_frame(keys, 1, payload), len(payload)
        ),
        "aes_decrypt": BenchCase(
            "aes_decrypt", lambda: decrypt_frame(keys, frame), len(payload)
        ),
        "xtea_block": BenchCase(
            "xtea_block", lambda: xtea_encrypt_block(keys.xtea_key, payload[:8]), 8
        ),
        "ntt": BenchCase("ntt", lambda: ntt_forward(element), 384),
    }


class BenchService:
    def __init__(self, app: "GroundStationApp") -> None:
        self.app = app

    def collect(self) -> BenchReport:
        config = self.app.config
        cases = build_cases(config.seed)
        report = BenchReport(environment=self.app.report_service.describe_environment())
        for name in config.ops:
            if name == "tamper":
                continue
            logger.info("Timing %s over %d iterations", name, config.iterations)
            report.rows.append(measure(cases[name], config.iterations))
        medians = {row.name: row.median_us for row in report.rows}
        if medians.get("encaps") and "decaps" in medians:
            report.decaps_encaps_ratio = medians["decaps"] / medians["encaps"]
        if "tamper" in config.ops:
            keygen_seed, encaps_seed = kem_seeds(config.seed)
            keypair = kem_keygen(keygen_seed)
            _, ss = kem_encaps(keypair.public_key, encaps_seed)
            gcm, legacy = tamper_sweep(
                derive_keys(ss, b"bench"), b"telecommand: set mode safe"
            )
            report.tamper = {
                "gcm_detection_rate": gcm.detection_rate,
                "xtea_ctr_detection_rate": legacy.detection_rate,
                "gcm_flips": float(gcm.flips),
                "xtea_ctr_flips": float(legacy.flips),
            }
        return report

    def run(self) -> int:
        report = self.collect()
        rows = [row.model_dump() for row in report.rows]
        result = {
            "decaps_encaps_ratio": report.decaps_encaps_ratio,
            "tamper": report.tamper,
        }
        self.app.report_service.emit("bench", result, rows)
        if rows:
            self.app.view.table("Benchmarks (microseconds)", rows)
        if any(row.informational for row in report.rows):
            self.app.view.message(
                f"Fewer than {BENCH_MIN_RELIABLE_ITERATIONS} iterations: "
                "statistics are informational only."
            )
        if report.decaps_encaps_ratio is not None:
            self.app.view.message(
                f"decaps/encaps ratio: {report.decaps_encaps_ratio:.2f}"
            )
        if report.tamper:
            self.app.view.pairs("Tamper detection", list(report.tamper.items()))
        return EXIT_OK
