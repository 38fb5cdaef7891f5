"""Independent reference implementations used only as test oracles."""

Q = 3329
N = 256


def schoolbook_multiply(a: list[int], b: list[int]) -> list[int]:
    """Product in Z_q[X]/(X^256 + 1) by the O(n^2) definition."""
    out = [0] * N
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            k = i + j
            if k < N:
                out[k] += ai * bj
            else:
                out[k - N] -= ai * bj
    return [value % Q for value in out]


def header_word(priority, src, dst, dport, sport, flags):
    word = priority << 30
    word |= src << 25
    word |= dst << 20
    word |= dport << 14
    word |= sport << 8
    word |= flags
    return word


def xtea_encipher(num_rounds, v, key):
    """Needham and Wheeler's reference routine on 32-bit words."""
    v0, v1 = v
    total, delta, mask = 0, 0x9E3779B9, 0xFFFFFFFF
    for _ in range(num_rounds):
        v0 = (v0 + ((((v1 << 4) ^ (v1 >> 5)) + v1) ^ (total + key[total & 3]))) & mask
        total = (total + delta) & mask
        v1 = (
            v1 + ((((v0 << 4) ^ (v0 >> 5)) + v0) ^ (total + key[(total >> 11) & 3]))
        ) & mask
    return v0, v1


def xtea_block_oracle(key: bytes, block: bytes) -> bytes:
    words = [int.from_bytes(key[i : i + 4], "big") for i in range(0, 16, 4)]
    v = (int.from_bytes(block[:4], "big"), int.from_bytes(block[4:], "big"))
    v0, v1 = xtea_encipher(32, v, words)
    return v0.to_bytes(4, "big") + v1.to_bytes(4, "big")
