"""Byte-message encryption on top of the GT-message schemes.

A random GT element is RIBE-encrypted; its canonical encoding is expanded
with HKDF-SHA256 into an AES-256-GCM key that seals the payload.  A wrong
decryption key yields a different GT element, hence a different AEAD key,
and :func:`open_sealed` fails closed with :class:`IntegrityError`.

This layer is not part of the underlying RIBE construction.
"""

from __future__ import annotations

import os
from types import ModuleType
from typing import Any

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .algebra import Side, default_rng
from .errors import IntegrityError
from .scheme import DecryptionKey, PublicParams, dec
from .wire import HybridCiphertext

KDF_INFO = b"RIBE:hybrid:v1"
NONCE_BYTES = 12


def derive_key(pp: PublicParams, mass: Any) -> bytes:
    ikm = pp.group.encode(Side.GT, mass)
    return HKDF(algorithm=hashes.SHA256(), length=32, salt=None, info=KDF_INFO).derive(ikm)


def seal(
    pp: PublicParams,
    scheme: ModuleType,
    identity: int,
    t: int,
    payload: bytes,
    rng: Any = None,
) -> HybridCiphertext:
    """Encrypt ``payload`` to ``(identity, t)``; ``scheme`` is :mod:`ribe.sxdh` or :mod:`ribe.dlin`."""
    rng = rng or default_rng()
    mass = pp.group.random_gt(rng)
    ct = scheme.enc(pp, identity, t, mass, rng)
    nonce = os.urandom(NONCE_BYTES)
    body = AESGCM(derive_key(pp, mass)).encrypt(nonce, payload, KDF_INFO)
    return HybridCiphertext(ct, nonce, body)


def open_sealed(pp: PublicParams, dk: DecryptionKey, hct: HybridCiphertext) -> bytes:
    mass = dec(pp, dk, hct.ct)
    try:
        return AESGCM(derive_key(pp, mass)).decrypt(hct.nonce, hct.body, KDF_INFO)
    except InvalidTag as exc:
        raise IntegrityError("payload authentication failed (wrong key or corrupt ciphertext)") from exc
