"""Artifacts and algorithms shared by the 6- and 9-dimensional schemes.

Both schemes publish ``(g_T^alpha, g^{d_1}, ...)``, issue one key vector per
tree node, and decrypt with ``C / (e(C0, K_id) * e(C0, K_t))``.  Only setup,
key generation, key update and encryption differ; those live in
:mod:`ribe.sxdh` and :mod:`ribe.dlin`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import revtree
from .algebra import DualBases, GroupDescription, GroupVector, Side, vec_pair
from .revtree import RevocationList, TreeState

SCHEMES = {"sxdh": 0x01, "dlin": 0x02}
DIMENSIONS = {"sxdh": 6, "dlin": 9}


@dataclass(frozen=True)
class PublicParams:
    scheme: str
    group: GroupDescription
    gt_alpha: Any
    vectors: tuple[GroupVector, ...]

    @property
    def dim(self) -> int:
        return self.vectors[0].n

    def element_count(self) -> int:
        return 1 + sum(v.n for v in self.vectors)


@dataclass(frozen=True)
class MasterKey:
    """``alpha`` and the dual vectors ``g2^{d_i*}``.

    ``bases`` keeps the full exponent-level bases for test oracles only; it
    is never serialized and is ``None`` after a decode.
    """

    scheme: str
    alpha: int
    vectors: tuple[GroupVector, ...]
    bases: DualBases | None = field(default=None, compare=False, repr=False)

    def element_count(self) -> int:
        return 1 + sum(v.n for v in self.vectors)


@dataclass(frozen=True)
class PrivateKey:
    """``{(theta, K_id_theta)}`` for theta on the owner's root path, leaf first."""

    scheme: str
    leaf: int
    entries: tuple[tuple[int, GroupVector], ...]

    def nodes(self) -> list[int]:
        return [node for node, _ in self.entries]


@dataclass(frozen=True)
class KeyUpdate:
    scheme: str
    time: int
    entries: tuple[tuple[int, GroupVector], ...]

    def nodes(self) -> list[int]:
        return [node for node, _ in self.entries]


@dataclass(frozen=True)
class DecryptionKey:
    scheme: str
    node: int
    time: int
    k_id: GroupVector
    k_t: GroupVector


@dataclass(frozen=True)
class Ciphertext:
    scheme: str
    c: Any
    c0: GroupVector

    def source_element_count(self) -> int:
        return self.c0.n


def as_scalar(group: GroupDescription, value: int, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{what} must be an integer in Z_q")
    if not 0 <= value < group.q:
        raise ValueError(f"{what}={value} is outside Z_q (q={group.q})")
    return value


def dec_key_gen(sk: PrivateKey, ku: KeyUpdate) -> DecryptionKey | None:
    """Pair the key and update vectors of a common node, or ``None`` if revoked.

    The deepest common node wins (private-key entries are stored leaf first).
    """
    if sk.scheme != ku.scheme:
        raise ValueError(f"scheme mismatch: {sk.scheme} key with {ku.scheme} update")
    published = dict(ku.entries)
    for node, k_id in sk.entries:
        k_t = published.get(node)
        if k_t is not None:
            return DecryptionKey(sk.scheme, node, ku.time, k_id, k_t)
    return None


def dec(pp: PublicParams, dk: DecryptionKey | None, ct: Ciphertext) -> Any:
    """Recover the GT message; ``2 * dim`` pairings.  No validity check is made."""
    if dk is None:
        raise ValueError("cannot decrypt with a revoked (bottom) decryption key")
    if dk.scheme != pp.scheme or ct.scheme != pp.scheme:
        raise ValueError("artifact scheme does not match the public parameters")
    g = pp.group
    mask = g.mul(vec_pair(ct.c0, dk.k_id), vec_pair(ct.c0, dk.k_t))
    return g.div(ct.c, mask)


def key_rev(identity: int, t: int, rl: RevocationList, tree: TreeState) -> RevocationList:
    return revtree.revoke(rl, tree, identity, t)


def gt_alpha_from(group: GroupDescription, alpha: int, bases: DualBases) -> Any:
    """``e(g1, g2)^{alpha * d_1 . d_1*}``."""
    return group.exp(group.gt, alpha * bases.D[0].dot(bases.Dstar[0]))


def key_side(group: GroupDescription) -> Side:
    return group.source_side(Side.G2)
