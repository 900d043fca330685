"""AES-128 block cipher and inverse cipher (FIPS-197).

The 16-byte block is mapped onto the 4x4 state column by column, so byte
``i`` sits at row ``i % 4``, column ``i // 4``.

Two code paths share the same tables:

* :func:`encrypt_block` / :func:`decrypt_block` work on one block with plain
  Python integers.
* :func:`encrypt_blocks` / :func:`decrypt_blocks` push any number of
  independent blocks (ECB) through numpy in one pass, using 32-bit
  round tables.

Nothing here is constant time.
"""

from __future__ import annotations

import binascii
from dataclasses import dataclass
from functools import cached_property

import numpy as np

BLOCK_SIZE = 16
KEY_SIZE = 16
ROUNDS = 10

# fmt: off
SBOX = (
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
)
# fmt: on

_inv = [0] * 256
for _i, _v in enumerate(SBOX):
    _inv[_v] = _i
INV_SBOX = tuple(_inv)
del _inv, _i, _v

RCON = (0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36)


def xtime(a: int) -> int:
    """Multiply by x (i.e. 0x02) in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1."""
    a <<= 1
    return (a ^ 0x1B) & 0xFF if a & 0x100 else a


def gmul(a: int, b: int) -> int:
    """GF(2^8) product, shift-and-add."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a = xtime(a)
        b >>= 1
    return out


MUL2, MUL3, MUL9, MUL11, MUL13, MUL14 = (
    tuple(gmul(a, c) for a in range(256)) for c in (2, 3, 9, 11, 13, 14)
)

# new_state[i] = old_state[SHIFT_ROWS[i]]; byte i is row i % 4, column i // 4
SHIFT_ROWS = tuple((i % 4) + 4 * ((i // 4 + i % 4) % 4) for i in range(16))
INV_SHIFT_ROWS = tuple((i % 4) + 4 * ((i // 4 - i % 4) % 4) for i in range(16))


def _check_len(data: bytes, size: int, what: str) -> bytes:
    data = bytes(data)
    if len(data) != size:
        raise ValueError(f"{what} must be exactly {size} bytes, got {len(data)}")
    return data


@dataclass(frozen=True)
class AesKey128:
    """A 128-bit cipher key. Other sizes are rejected on construction."""

    key: bytes

    def __post_init__(self):
        object.__setattr__(self, "key", _check_len(self.key, KEY_SIZE, "AES-128 key"))

    @classmethod
    def from_hex(cls, text: str) -> AesKey128:
        text = text.strip()
        if len(text) != 2 * KEY_SIZE:
            raise ValueError(f"key must be {2 * KEY_SIZE} hex characters, got {len(text)}")
        try:
            return cls(binascii.unhexlify(text))
        except binascii.Error as exc:
            raise ValueError(f"key is not valid hex: {exc}") from None

    def __bytes__(self) -> bytes:
        return self.key

    def __repr__(self) -> str:
        return "AesKey128(<redacted>)"


@dataclass(frozen=True)
class KeySchedule:
    """The 11 round keys of AES-128; ``round_keys[0]`` is the cipher key."""

    round_keys: tuple[bytes, ...]

    def __post_init__(self):
        if len(self.round_keys) != ROUNDS + 1:
            raise ValueError(f"expected {ROUNDS + 1} round keys, got {len(self.round_keys)}")
        for rk in self.round_keys:
            _check_len(rk, BLOCK_SIZE, "round key")

    @cached_property
    def _words(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(rk) for rk in self.round_keys)

    @cached_property
    def _array(self) -> np.ndarray:
        return np.frombuffer(b"".join(self.round_keys), dtype=np.uint8).reshape(ROUNDS + 1, 16)

    @cached_property
    def _enc_words(self) -> np.ndarray:
        return self._array.view("<u4")

    @cached_property
    def _dec_words(self) -> np.ndarray:
        # round keys for the equivalent inverse cipher pass through InvMixColumns
        mixed = [bytes(_inv_mix_columns(list(rk))) for rk in self.round_keys]
        return np.frombuffer(b"".join(mixed), dtype="<u4").reshape(ROUNDS + 1, 4)


def _as_key_bytes(key) -> bytes:
    if isinstance(key, AesKey128):
        return key.key
    return AesKey128(key).key


def expand_key(key: AesKey128 | bytes) -> KeySchedule:
    """Standard AES-128 key expansion (RotWord, SubWord, Rcon)."""
    w = [list(_as_key_bytes(key)[4 * i : 4 * i + 4]) for i in range(4)]
    for i in range(4, 4 * (ROUNDS + 1)):
        temp = list(w[i - 1])
        if i % 4 == 0:
            temp = temp[1:] + temp[:1]
            temp = [SBOX[b] for b in temp]
            temp[0] ^= RCON[i // 4 - 1]
        w.append([a ^ b for a, b in zip(w[i - 4], temp)])
    return KeySchedule(
        tuple(bytes(w[4 * r] + w[4 * r + 1] + w[4 * r + 2] + w[4 * r + 3]) for r in range(ROUNDS + 1))
    )


def _schedule(ks: KeySchedule | AesKey128 | bytes) -> KeySchedule:
    return ks if isinstance(ks, KeySchedule) else expand_key(ks)


def _mix_columns(s: list[int]) -> list[int]:
    out = [0] * 16
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c], s[c + 1], s[c + 2], s[c + 3]
        out[c] = MUL2[a0] ^ MUL3[a1] ^ a2 ^ a3
        out[c + 1] = a0 ^ MUL2[a1] ^ MUL3[a2] ^ a3
        out[c + 2] = a0 ^ a1 ^ MUL2[a2] ^ MUL3[a3]
        out[c + 3] = MUL3[a0] ^ a1 ^ a2 ^ MUL2[a3]
    return out


def _inv_mix_columns(s: list[int]) -> list[int]:
    out = [0] * 16
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c], s[c + 1], s[c + 2], s[c + 3]
        out[c] = MUL14[a0] ^ MUL11[a1] ^ MUL13[a2] ^ MUL9[a3]
        out[c + 1] = MUL9[a0] ^ MUL14[a1] ^ MUL11[a2] ^ MUL13[a3]
        out[c + 2] = MUL13[a0] ^ MUL9[a1] ^ MUL14[a2] ^ MUL11[a3]
        out[c + 3] = MUL11[a0] ^ MUL13[a1] ^ MUL9[a2] ^ MUL14[a3]
    return out


def mix_columns(block: bytes) -> bytes:
    return bytes(_mix_columns(list(_check_len(block, BLOCK_SIZE, "state"))))


def inv_mix_columns(block: bytes) -> bytes:
    return bytes(_inv_mix_columns(list(_check_len(block, BLOCK_SIZE, "state"))))


def encrypt_block(pt: bytes, ks: KeySchedule | AesKey128 | bytes) -> bytes:
    """Encrypt one 16-byte block.

    ``ks`` should normally be a precomputed :class:`KeySchedule`; a raw key
    is expanded on every call.
    """
    rk = _schedule(ks)._words
    s = [b ^ k for b, k in zip(_check_len(pt, BLOCK_SIZE, "plaintext block"), rk[0])]
    for r in range(1, ROUNDS):
        s = _mix_columns([SBOX[s[j]] for j in SHIFT_ROWS])
        k = rk[r]
        s = [s[i] ^ k[i] for i in range(16)]
    k = rk[ROUNDS]
    return bytes(SBOX[s[j]] ^ k[i] for i, j in enumerate(SHIFT_ROWS))


def decrypt_block(ct: bytes, ks: KeySchedule | AesKey128 | bytes) -> bytes:
    """Inverse cipher for one 16-byte block."""
    rk = _schedule(ks)._words
    k = rk[ROUNDS]
    s = [b ^ kb for b, kb in zip(_check_len(ct, BLOCK_SIZE, "ciphertext block"), k)]
    for r in range(ROUNDS - 1, 0, -1):
        k = rk[r]
        s = [INV_SBOX[s[j]] ^ k[i] for i, j in enumerate(INV_SHIFT_ROWS)]
        s = _inv_mix_columns(s)
    k = rk[0]
    return bytes(INV_SBOX[s[j]] ^ k[i] for i, j in enumerate(INV_SHIFT_ROWS))


# Batched path: 32-bit T-tables. A column word holds rows 0..3 in bytes 0..3
# (little-endian), so ``view("<u4")`` on the byte state lines up with columns.


def _t_table(coeffs, box):
    return np.array(
        [sum(gmul(box[x], c) << (8 * r) for r, c in enumerate(coeffs)) for x in range(256)],
        dtype="<u4",
    )


def _rotations(coeffs, box):
    return tuple(_t_table(coeffs[-i:] + coeffs[:-i], box) for i in range(4))


_TE = _rotations((2, 1, 1, 3), SBOX)
_TD = _rotations((14, 9, 13, 11), INV_SBOX)
_SBOX_NP = np.array(SBOX, dtype=np.uint8)
_INV_SBOX_NP = np.array(INV_SBOX, dtype=np.uint8)
# source byte for (output column, row) after ShiftRows / InvShiftRows, grouped by row
_ENC_GATHER = np.array([r + 4 * ((c + r) % 4) for r in range(4) for c in range(4)])
_DEC_GATHER = np.array([r + 4 * ((c - r) % 4) for r in range(4) for c in range(4)])
_SHIFT_NP = np.array(SHIFT_ROWS)
_INV_SHIFT_NP = np.array(INV_SHIFT_ROWS)


def _as_blocks(data: bytes) -> np.ndarray:
    if len(data) % BLOCK_SIZE:
        raise ValueError(f"data length {len(data)} is not a multiple of {BLOCK_SIZE}")
    return np.frombuffer(bytes(data), dtype=np.uint8).reshape(-1, BLOCK_SIZE)


def _rounds(state, tables, gather, round_words):
    t0, t1, t2, t3 = tables
    for rk in round_words:
        g = state[:, gather]
        w = t0[g[:, 0:4]] ^ t1[g[:, 4:8]] ^ t2[g[:, 8:12]] ^ t3[g[:, 12:16]] ^ rk
        state = np.ascontiguousarray(w).view(np.uint8)
    return state


def encrypt_blocks(data: bytes, ks: KeySchedule | AesKey128 | bytes) -> bytes:
    """Encrypt every 16-byte block of ``data`` independently (ECB)."""
    ks = _schedule(ks)
    rk = ks._array
    s = _as_blocks(data) ^ rk[0]
    s = _rounds(s, _TE, _ENC_GATHER, ks._enc_words[1:ROUNDS])
    return (_SBOX_NP[s[:, _SHIFT_NP]] ^ rk[ROUNDS]).tobytes()


def decrypt_blocks(data: bytes, ks: KeySchedule | AesKey128 | bytes) -> bytes:
    """Inverse of :func:`encrypt_blocks` (equivalent inverse cipher)."""
    ks = _schedule(ks)
    rk = ks._array
    s = _as_blocks(data) ^ rk[ROUNDS]
    s = _rounds(s, _TD, _DEC_GATHER, ks._dec_words[ROUNDS - 1 : 0 : -1])
    return (_INV_SBOX_NP[s[:, _INV_SHIFT_NP]] ^ rk[0]).tobytes()
