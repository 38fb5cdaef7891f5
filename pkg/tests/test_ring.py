import random
from collections import Counter

import pytest

from orbitkem.kem import DomainMismatch, InsufficientInput, KemError
from orbitkem.kem.params import KYBER512, KemParams
from orbitkem.kem.ring import (
    Domain,
    RingElement,
    RingVector,
    cbd_sample,
    compress,
    decode_element,
    decode_ring_vector,
    decompress,
    encode_element,
    encode_ring_vector,
    ntt_forward,
    ntt_inverse,
)
from tests.oracles import Q, schoolbook_multiply


def random_element(rng: random.Random) -> RingElement:
    return RingElement(tuple(rng.randrange(Q) for _ in range(256)))


def test_params_byte_lengths():
    assert KYBER512.public_key_bytes == 800
    assert KYBER512.secret_key_bytes == 1632
    assert KYBER512.ciphertext_bytes == 768
    assert KYBER512.shared_secret_bytes == 32


def test_params_reject_other_sets():
    with pytest.raises(KemError):
        KemParams(k=3)


def test_ntt_of_zero_is_zero():
    assert ntt_forward(RingElement.zero()) == RingElement.zero(Domain.NTT)


@pytest.mark.slow
def test_ntt_roundtrip():
    rng = random.Random(1)
    for _ in range(1000):
        p = random_element(rng)
        assert ntt_inverse(ntt_forward(p)) == p


@pytest.mark.slow
def test_ntt_multiplication_matches_schoolbook():
    rng = random.Random(2)
    for _ in range(500):
        a, b = random_element(rng), random_element(rng)
        product = ntt_inverse(ntt_forward(a).multiply(ntt_forward(b)))
        expected = schoolbook_multiply(list(a.coeffs), list(b.coeffs))
        assert list(product.coeffs) == expected


def test_domain_mixing_is_rejected():
    p = RingElement.zero()
    with pytest.raises(DomainMismatch):
        p + ntt_forward(p)
    with pytest.raises(DomainMismatch):
        ntt_inverse(p)
    with pytest.raises(DomainMismatch):
        p.multiply(p)


def test_ring_vector_requires_one_domain():
    p = RingElement.zero()
    with pytest.raises(DomainMismatch):
        RingVector((p, ntt_forward(p)))


def test_coefficients_must_be_canonical():
    with pytest.raises(KemError):
        RingElement((Q,) + (0,) * 255)


@pytest.mark.parametrize(
    ("fill", "eta"),
    [(0x00, 3), (0x00, 2), (0xFF, 2), (0xFF, 3)],
)
def test_cbd_symmetric_buffers_give_zero(fill, eta):
    assert cbd_sample(bytes([fill]) * (64 * eta), eta) == RingElement.zero()


def test_cbd_needs_enough_input():
    with pytest.raises(InsufficientInput):
        cbd_sample(bytes(127), 2)


@pytest.mark.slow
def test_cbd_eta2_distribution():
    rng = random.Random(3)
    counts: Counter[int] = Counter()
    polys = 3907
    for _ in range(polys):
        element = cbd_sample(rng.randbytes(128), 2)
        for c in element.coeffs:
            counts[c if c <= 2 else c - Q] += 1
    total = polys * 256
    for value, pmf in {-2: 1 / 16, -1: 4 / 16, 0: 6 / 16, 1: 4 / 16, 2: 1 / 16}.items():
        assert abs(counts[value] / total - pmf) < 0.005
    assert set(counts) <= {-2, -1, 0, 1, 2}


def test_compress_examples():
    assert compress(0, 10) == 0
    assert compress(3328, 4) == 0


@pytest.mark.parametrize("d", [1, 4, 10])
def test_compression_error_bound_is_exhaustive(d):
    bound = -(-Q // (1 << (d + 1)))
    for x in range(Q):
        y = compress(x, d)
        assert 0 <= y < (1 << d)
        diff = (decompress(y, d) - x) % Q
        assert min(diff, Q - diff) <= bound


def test_element_and_vector_serialization_roundtrip():
    rng = random.Random(4)
    p = RingElement(random_element(rng).coeffs, Domain.NTT)
    assert decode_element(encode_element(p)) == p
    v = RingVector((p, RingElement(random_element(rng).coeffs, Domain.NTT)))
    assert decode_ring_vector(encode_ring_vector(v), 2) == v


def test_strict_decode_rejects_non_canonical_values():
    with pytest.raises(KemError):
        decode_element(b"\xff" * 384)
