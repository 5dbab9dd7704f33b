"""Size-preserving message sealing with AES-256 in counter mode.

Key and nonce are both derived deterministically from the passphrase with
domain-separated SHA-256, because the embed layout has no room to store a
random nonce next to the message.

Security caveat, read before reusing this module elsewhere: a deterministic
nonce means the same passphrase always produces the same keystream. Sealing
two different messages under one passphrase reuses keystream, and sealing
the same message twice yields identical ciphertext. There is also no
authentication tag, so a wrong passphrase (or a corrupted carrier) decrypts
to garbage instead of failing. Use one passphrase per message.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import EmptyMessage, EmptyPassphrase, MessageTooLarge

_KEY_DOMAIN = b"stegostream-key:"
_NONCE_DOMAIN = b"stegostream-nonce:"

MAX_MESSAGE_BYTES = 0xFFFFFFFF  # declared size must fit the 32-bit field


@dataclass(frozen=True)
class SealedPayload:
    """Ciphertext plus the one-byte file-type code and its declared size."""

    ciphertext: bytes
    file_type_code: int
    declared_size: int

    def __post_init__(self):
        if not 0 <= self.file_type_code <= 0xFF:
            raise ValueError("file type code must fit one byte")
        if self.declared_size != len(self.ciphertext):
            raise ValueError("declared size must equal the ciphertext length")
        if self.declared_size > MAX_MESSAGE_BYTES:
            raise ValueError("declared size must fit in 32 bits")


def derive_key_material(passphrase: str) -> tuple[bytes, bytes]:
    """Derive the (key, nonce) pair for a passphrase; deterministic."""
    if not passphrase:
        raise EmptyPassphrase("passphrase must not be empty")
    encoded = passphrase.encode("utf-8")
    key = hashlib.sha256(_KEY_DOMAIN + encoded).digest()
    nonce = hashlib.sha256(_NONCE_DOMAIN + encoded).digest()[:16]
    return key, nonce


def encrypt_block(key: bytes, block: bytes) -> bytes:
    """Raw AES-256 encryption of a single 16-byte block."""
    encryptor = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return encryptor.update(block) + encryptor.finalize()


def _keystream(key: bytes, nonce: bytes, length: int) -> bytes:
    """Counter-mode keystream: low 64 bits of the nonce block count up from 0."""
    block_count = (length + 15) // 16
    prefix = nonce[:8]
    base = int.from_bytes(nonce[8:16], "big")
    counters = b"".join(
        prefix + ((base + i) & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "big")
        for i in range(block_count)
    )
    encryptor = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    stream = encryptor.update(counters) + encryptor.finalize()
    return stream[:length]


def _xor_keystream(data: bytes, passphrase: str) -> bytes:
    key, nonce = derive_key_material(passphrase)
    stream = _keystream(key, nonce, len(data))
    out = np.frombuffer(data, dtype=np.uint8) ^ np.frombuffer(stream, dtype=np.uint8)
    return out.tobytes()


def seal(plaintext: bytes, file_type_code: int, passphrase: str) -> SealedPayload:
    """Encrypt a message; the ciphertext has exactly the plaintext's length."""
    if len(plaintext) == 0:
        raise EmptyMessage("cannot seal an empty message")
    if len(plaintext) > MAX_MESSAGE_BYTES:
        raise MessageTooLarge(
            f"message is {len(plaintext)} bytes; the size field holds at most "
            f"{MAX_MESSAGE_BYTES}"
        )
    ciphertext = _xor_keystream(bytes(plaintext), passphrase)
    return SealedPayload(
        ciphertext=ciphertext,
        file_type_code=file_type_code,
        declared_size=len(ciphertext),
    )


def unseal(payload: SealedPayload, passphrase: str) -> bytes:
    """Decrypt a sealed payload.

    A wrong passphrase yields garbage bytes rather than an error: counter
    mode is unauthenticated.
    """
    return _xor_keystream(payload.ciphertext, passphrase)
