"""Encrypted ECG container: serialize -> pad -> AES-128 ECB -> file, and back.

Layout (all offsets in bytes)::

    0..3    b"ECGS"
    4       version, 0x01
    5..12   plaintext length, little-endian u64
    13..    ciphertext, a positive multiple of 16 bytes

Every block is encrypted on its own with no IV or chaining, so equal
plaintext blocks give equal ciphertext blocks under one key.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from . import aes
from .ecg_data import EcgRecord, deserialize_record, serialize_record
from .enrollment import EnrollmentModel
from .errors import CryptoError
from .identification import MatchResult, identify

MAGIC = b"ECGS"
VERSION = 1
_HEADER = struct.Struct("<4sBQ")
HEADER_SIZE = _HEADER.size  # 13

ECB_WARNING = (
    "warning: ECB mode encrypts each 16-byte block independently; "
    "identical plaintext blocks produce identical ciphertext blocks"
)


def pkcs7_pad(data: bytes, block: int = aes.BLOCK_SIZE) -> bytes:
    count = block - len(data) % block
    return bytes(data) + bytes([count]) * count


def pkcs7_unpad(data: bytes, block: int = aes.BLOCK_SIZE) -> bytes:
    if not data or len(data) % block:
        raise CryptoError("BAD_PADDING", "padded data is not a positive multiple of the block size")
    count = data[-1]
    if not 1 <= count <= block or data[-count:] != bytes([count]) * count:
        raise CryptoError("BAD_PADDING", "padding bytes are inconsistent (wrong key or corrupted data)")
    return data[:-count]


@dataclass(frozen=True)
class EncryptedContainer:
    plaintext_len: int
    ciphertext: bytes
    version: int = VERSION

    def to_bytes(self) -> bytes:
        return _HEADER.pack(MAGIC, self.version, self.plaintext_len) + self.ciphertext

    @classmethod
    def from_bytes(cls, data: bytes) -> EncryptedContainer:
        data = bytes(data)
        if len(data) < len(MAGIC) or data[:4] != MAGIC:
            raise CryptoError("BAD_MAGIC", "not an ECGS container")
        if len(data) < HEADER_SIZE:
            raise CryptoError("TRUNCATED", f"container header needs {HEADER_SIZE} bytes, got {len(data)}")
        _, version, length = _HEADER.unpack_from(data)
        if version != VERSION:
            raise CryptoError("VERSION_MISMATCH", f"container version {version}, expected {VERSION}")
        ct = data[HEADER_SIZE:]
        if not ct or len(ct) % aes.BLOCK_SIZE:
            raise CryptoError("LENGTH_MISMATCH", f"ciphertext of {len(ct)} bytes is not a positive multiple of 16")
        return cls(length, ct, version)


def _key_schedule(key) -> aes.KeySchedule:
    return key if isinstance(key, aes.KeySchedule) else aes.expand_key(key)


def encrypt_bytes(plaintext: bytes, key) -> EncryptedContainer:
    plaintext = bytes(plaintext)
    if len(plaintext) >= 2**63:
        raise ValueError("plaintext too long")
    return EncryptedContainer(len(plaintext), aes.encrypt_blocks(pkcs7_pad(plaintext), _key_schedule(key)))


def decrypt_bytes(container: EncryptedContainer | bytes, key) -> bytes:
    if not isinstance(container, EncryptedContainer):
        container = EncryptedContainer.from_bytes(container)
    if container.version != VERSION:
        raise CryptoError("VERSION_MISMATCH", f"container version {container.version}, expected {VERSION}")
    plaintext = pkcs7_unpad(aes.decrypt_blocks(container.ciphertext, _key_schedule(key)))
    if len(plaintext) != container.plaintext_len:
        raise CryptoError(
            "LENGTH_MISMATCH", f"recovered {len(plaintext)} bytes, header says {container.plaintext_len}"
        )
    return plaintext


def encrypt_record(record: EcgRecord, key) -> EncryptedContainer:
    return encrypt_bytes(serialize_record(record), key)


def decrypt_record(container: EncryptedContainer | bytes, key) -> EcgRecord:
    return deserialize_record(decrypt_bytes(container, key))


def secure_identify(container: EncryptedContainer | bytes, key, model: EnrollmentModel) -> MatchResult:
    """Decrypt a container holding one serialized record and identify it."""
    return identify(model, decrypt_record(container, key))
