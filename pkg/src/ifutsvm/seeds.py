"""Stable derivation of sub-seeds from a master seed."""

from __future__ import annotations

import hashlib


def mix_seed(*parts) -> int:
    """Collapse a master seed plus context labels into a reproducible 63-bit seed.

    Stable across processes and platforms, unlike hash().
    """
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(repr(part).encode("utf-8"))
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "little") >> 1
