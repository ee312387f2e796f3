"""Keccak-f[1600] sponge: hashing and deterministic byte/field-element PRNG.

Two fixed profiles are used throughout the package:
  - hash_digest: 136-byte rate, 32-byte digests (SHAKE256-style padding)
  - Prng:        168-byte rate byte stream (SHAKE128-style padding)
Every invocation absorbs a one-byte domain tag before its payload, so the
same seed bytes never feed two different roles.
"""

HASH_RATE = 136
PRNG_RATE = 168
DIGEST_LEN = 32

_MASK = (1 << 64) - 1

_ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)


def keccak_f1600(lanes):
    """Apply the 24-round permutation to a sequence of 25 64-bit lanes."""
    if len(lanes) != 25:
        raise ValueError("state must hold exactly 25 lanes")
    m = _MASK
    (a0, a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12,
     a13, a14, a15, a16, a17, a18, a19, a20, a21, a22, a23, a24) = lanes
    # round body unrolled over locals; list indexing in the natural
    # formulation costs about 2x at CPython speeds
    for rc in _ROUND_CONSTANTS:
        c0 = a0 ^ a5 ^ a10 ^ a15 ^ a20
        c1 = a1 ^ a6 ^ a11 ^ a16 ^ a21
        c2 = a2 ^ a7 ^ a12 ^ a17 ^ a22
        c3 = a3 ^ a8 ^ a13 ^ a18 ^ a23
        c4 = a4 ^ a9 ^ a14 ^ a19 ^ a24
        d0 = c4 ^ ((c1 << 1 | c1 >> 63) & m)
        d1 = c0 ^ ((c2 << 1 | c2 >> 63) & m)
        d2 = c1 ^ ((c3 << 1 | c3 >> 63) & m)
        d3 = c2 ^ ((c4 << 1 | c4 >> 63) & m)
        d4 = c3 ^ ((c0 << 1 | c0 >> 63) & m)
        b0 = (a0 ^ d0)
        t = (a6 ^ d1)
        b1 = (t << 44 | t >> 20) & m
        t = (a12 ^ d2)
        b2 = (t << 43 | t >> 21) & m
        t = (a18 ^ d3)
        b3 = (t << 21 | t >> 43) & m
        t = (a24 ^ d4)
        b4 = (t << 14 | t >> 50) & m
        t = (a3 ^ d3)
        b5 = (t << 28 | t >> 36) & m
        t = (a9 ^ d4)
        b6 = (t << 20 | t >> 44) & m
        t = (a10 ^ d0)
        b7 = (t << 3 | t >> 61) & m
        t = (a16 ^ d1)
        b8 = (t << 45 | t >> 19) & m
        t = (a22 ^ d2)
        b9 = (t << 61 | t >> 3) & m
        t = (a1 ^ d1)
        b10 = (t << 1 | t >> 63) & m
        t = (a7 ^ d2)
        b11 = (t << 6 | t >> 58) & m
        t = (a13 ^ d3)
        b12 = (t << 25 | t >> 39) & m
        t = (a19 ^ d4)
        b13 = (t << 8 | t >> 56) & m
        t = (a20 ^ d0)
        b14 = (t << 18 | t >> 46) & m
        t = (a4 ^ d4)
        b15 = (t << 27 | t >> 37) & m
        t = (a5 ^ d0)
        b16 = (t << 36 | t >> 28) & m
        t = (a11 ^ d1)
        b17 = (t << 10 | t >> 54) & m
        t = (a17 ^ d2)
        b18 = (t << 15 | t >> 49) & m
        t = (a23 ^ d3)
        b19 = (t << 56 | t >> 8) & m
        t = (a2 ^ d2)
        b20 = (t << 62 | t >> 2) & m
        t = (a8 ^ d3)
        b21 = (t << 55 | t >> 9) & m
        t = (a14 ^ d4)
        b22 = (t << 39 | t >> 25) & m
        t = (a15 ^ d0)
        b23 = (t << 41 | t >> 23) & m
        t = (a21 ^ d1)
        b24 = (t << 2 | t >> 62) & m
        a0 = b0 ^ (b2 & ~b1)
        a1 = b1 ^ (b3 & ~b2)
        a2 = b2 ^ (b4 & ~b3)
        a3 = b3 ^ (b0 & ~b4)
        a4 = b4 ^ (b1 & ~b0)
        a5 = b5 ^ (b7 & ~b6)
        a6 = b6 ^ (b8 & ~b7)
        a7 = b7 ^ (b9 & ~b8)
        a8 = b8 ^ (b5 & ~b9)
        a9 = b9 ^ (b6 & ~b5)
        a10 = b10 ^ (b12 & ~b11)
        a11 = b11 ^ (b13 & ~b12)
        a12 = b12 ^ (b14 & ~b13)
        a13 = b13 ^ (b10 & ~b14)
        a14 = b14 ^ (b11 & ~b10)
        a15 = b15 ^ (b17 & ~b16)
        a16 = b16 ^ (b18 & ~b17)
        a17 = b17 ^ (b19 & ~b18)
        a18 = b18 ^ (b15 & ~b19)
        a19 = b19 ^ (b16 & ~b15)
        a20 = b20 ^ (b22 & ~b21)
        a21 = b21 ^ (b23 & ~b22)
        a22 = b22 ^ (b24 & ~b23)
        a23 = b23 ^ (b20 & ~b24)
        a24 = b24 ^ (b21 & ~b20)
        a0 ^= rc
    return [a0, a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12,
            a13, a14, a15, a16, a17, a18, a19, a20, a21, a22, a23, a24]


class Sponge:
    """Incremental sponge over Keccak-f[1600] with SHAKE-style padding.

    absorb() may be called any number of times; the first squeeze() pads the
    input and flips the sponge into its output phase, after which absorbing
    raises.  The state lives as 25 lanes; input is buffered and folded in one
    rate-sized block at a time.
    """

    __slots__ = ("rate", "_lanes", "_buf", "_block", "_pos", "_squeezing")

    def __init__(self, rate: int):
        if rate not in (HASH_RATE, PRNG_RATE):
            raise ValueError(f"unsupported rate {rate}")
        self.rate = rate
        self._lanes = [0] * 25
        self._buf = bytearray()
        self._block = b""
        self._pos = 0
        self._squeezing = False

    def _fold(self, block):
        lanes = self._lanes
        for i in range(self.rate // 8):
            lanes[i] ^= int.from_bytes(block[8 * i : 8 * i + 8], "little")
        self._lanes = keccak_f1600(lanes)

    def absorb(self, data: bytes):
        if self._squeezing:
            raise RuntimeError("cannot absorb once squeezing has started")
        buf = self._buf
        buf += data
        rate = self.rate
        if len(buf) >= rate:
            view = memoryview(bytes(buf))
            end = len(buf) - len(buf) % rate
            for off in range(0, end, rate):
                self._fold(view[off : off + rate])
            del buf[:end]

    def _refill(self):
        self._block = b"".join(
            v.to_bytes(8, "little") for v in self._lanes[: self.rate // 8]
        )
        self._pos = 0

    def squeeze(self, n: int) -> bytes:
        if n < 0:
            raise ValueError("negative output length")
        if n == 0:
            return b""
        if not self._squeezing:
            # pad10*1 with the 0x1F SHAKE suffix; the buffer holds < rate bytes
            block = bytearray(self.rate)
            block[: len(self._buf)] = self._buf
            block[len(self._buf)] ^= 0x1F
            block[self.rate - 1] ^= 0x80
            self._fold(block)
            self._buf.clear()
            self._squeezing = True
            self._refill()
        out = bytearray()
        rate = self.rate
        while n > 0:
            if self._pos == rate:
                self._lanes = keccak_f1600(self._lanes)
                self._refill()
            take = min(n, rate - self._pos)
            out += self._block[self._pos : self._pos + take]
            self._pos += take
            n -= take
        return bytes(out)


def _absorb_chunks(sponge: Sponge, tag: int, chunks):
    if not 0 <= tag < 256:
        raise ValueError("domain tag must fit one byte")
    # length-delimited so shifting bytes across chunk boundaries changes
    # the digest
    parts = [bytes((tag,))]
    for chunk in chunks:
        parts.append(len(chunk).to_bytes(8, "little"))
        parts.append(bytes(chunk))
    sponge.absorb(b"".join(parts))


def hash_digest(tag: int, chunks, out_len: int = DIGEST_LEN) -> bytes:
    """Domain-separated digest of a sequence of byte chunks."""
    sponge = Sponge(HASH_RATE)
    _absorb_chunks(sponge, tag, chunks)
    return sponge.squeeze(out_len)


_HI_NIBBLE = bytes(v >> 4 for v in range(256))
_LO_NIBBLE = bytes(v & 0xF for v in range(256))


class Prng:
    """Deterministic byte/field-element stream seeded by (tag, salt, seed)."""

    __slots__ = ("_sponge",)

    def __init__(self, seed: bytes, tag: int, salt: bytes = b""):
        if not 0 <= tag < 256:
            raise ValueError("domain tag must fit one byte")
        self._sponge = Sponge(PRNG_RATE)
        self._sponge.absorb(bytes((tag,)) + bytes(salt) + bytes(seed))

    def read(self, n: int) -> bytes:
        return self._sponge.squeeze(n)

    def field_bytes(self, count: int) -> bytes:
        """Next count GF(16) elements, one per byte, high nibble drawn first."""
        if count < 0:
            raise ValueError("negative element count")
        raw = self.read((count + 1) // 2)
        out = bytearray(2 * len(raw))
        out[0::2] = raw.translate(_HI_NIBBLE)
        out[1::2] = raw.translate(_LO_NIBBLE)
        return bytes(out[:count])

    def field_elements(self, count: int) -> list:
        return list(self.field_bytes(count))


def shake256(data: bytes, out_len: int) -> bytes:
    """One-shot SHAKE256; byte-compatible with FIPS 202."""
    sponge = Sponge(HASH_RATE)
    sponge.absorb(data)
    return sponge.squeeze(out_len)


def shake128(data: bytes, out_len: int) -> bytes:
    """One-shot SHAKE128; byte-compatible with FIPS 202."""
    sponge = Sponge(PRNG_RATE)
    sponge.absorb(data)
    return sponge.squeeze(out_len)
