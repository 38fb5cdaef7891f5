"""CPA-secure public-key encryption core underneath the FO transform."""

from __future__ import annotations

from orbitkem.kem.params import KYBER512, KemParams
from orbitkem.kem.ring import (
    Domain,
    RingElement,
    RingVector,
    byte_decode,
    byte_encode,
    cbd_sample,
    compress_element,
    decode_ring_vector,
    decompress_element,
    element_to_message,
    encode_ring_vector,
    message_to_element,
    ntt_inverse,
)
from orbitkem.kem.symmetric import hash_g, prf, sample_ntt


def generate_matrix(
    rho: bytes, *, transposed: bool, params: KemParams = KYBER512
) -> list[RingVector]:
    rows = []
    for i in range(params.k):
        row = []
        for j in range(params.k):
            row.append(sample_ntt(rho, i, j) if transposed else sample_ntt(rho, j, i))
        rows.append(RingVector(tuple(row)))
    return rows


def _noise_vector(
    seed: bytes, first_nonce: int, eta: int, params: KemParams
) -> RingVector:
    return RingVector(
        tuple(
            cbd_sample(prf(seed, first_nonce + i, 64 * eta), eta)
            for i in range(params.k)
        )
    )


def indcpa_keypair(d: bytes, params: KemParams = KYBER512) -> tuple[bytes, bytes]:
    rho, sigma = hash_g(d)
    matrix = generate_matrix(rho, transposed=False, params=params)
    s_hat = _noise_vector(sigma, 0, params.eta1, params).ntt()
    e_hat = _noise_vector(sigma, params.k, params.eta1, params).ntt()
    t_hat = RingVector(
        tuple(row.dot(s_hat) + e_hat.elems[i] for i, row in enumerate(matrix))
    )
    public_key = encode_ring_vector(t_hat) + rho
    secret_key = encode_ring_vector(s_hat)
    return public_key, secret_key


def indcpa_encrypt(
    public_key: bytes, message: bytes, coins: bytes, params: KemParams = KYBER512
) -> bytes:
    t_hat = decode_ring_vector(
        public_key[: params.polyvec_bytes], params.k, Domain.NTT, strict=False
    )
    rho = public_key[params.polyvec_bytes :]
    matrix_t = generate_matrix(rho, transposed=True, params=params)

    r_hat = _noise_vector(coins, 0, params.eta1, params).ntt()
    e1 = _noise_vector(coins, params.k, params.eta2, params)
    e2 = cbd_sample(prf(coins, 2 * params.k, 64 * params.eta2), params.eta2)

    u = RingVector(
        tuple(
            ntt_inverse(row.dot(r_hat)) + e1.elems[i]
            for i, row in enumerate(matrix_t)
        )
    )
    v = ntt_inverse(t_hat.dot(r_hat)) + e2 + message_to_element(message)

    c1 = b"".join(
        byte_encode(compress_element(e, params.du), params.du) for e in u.elems
    )
    c2 = byte_encode(compress_element(v, params.dv), params.dv)
    return c1 + c2


def indcpa_decrypt(
    secret_key: bytes, ciphertext: bytes, params: KemParams = KYBER512
) -> bytes:
    chunk = params.polyvec_compressed_bytes // params.k
    u = RingVector(
        tuple(
            decompress_element(
                byte_decode(ciphertext[chunk * i : chunk * (i + 1)], params.du),
                params.du,
            )
            for i in range(params.k)
        )
    )
    v = decompress_element(
        byte_decode(ciphertext[params.polyvec_compressed_bytes :], params.dv),
        params.dv,
    )
    s_hat = decode_ring_vector(secret_key, params.k, Domain.NTT, strict=False)
    w: RingElement = v - ntt_inverse(s_hat.dot(u.ntt()))
    return element_to_message(w)
