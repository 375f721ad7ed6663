"""Complete-subtree revocation state: leaf assignment, paths, KUNodes, node shares.

Nodes are heap-indexed: the root is 1 and the children of ``k`` are ``2k``
and ``2k + 1``.  A tree of depth ``d`` has leaves ``2^d .. 2^(d+1) - 1``.
"""

from __future__ import annotations

import hashlib
import hmac
import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import CapacityError, ShareVariantError, TimeOrderError

log = logging.getLogger(__name__)

ROOT = 1
VARIANTS = ("sxdh", "dlin")


class UnknownIdentityWarning(UserWarning):
    """Revocation was requested for an identity that holds no leaf."""


@dataclass(frozen=True)
class ShareSet:
    alpha1: int
    alpha2: int
    alpha3: int | None = None

    @property
    def variant(self) -> str:
        return "sxdh" if self.alpha3 is None else "dlin"


@dataclass
class TreeState:
    """Binary tree with leaf -> identity bindings and write-once node shares.

    With ``prf_seed`` set, shares are re-derivable from the seed and are not
    persisted; ``node_shares`` then acts as a cache.
    """

    depth: int
    n_max: int
    leaf_assignments: dict[int, int] = field(default_factory=dict)
    node_shares: dict[int, ShareSet] = field(default_factory=dict)
    prf_seed: bytes | None = None

    @property
    def root(self) -> int:
        return ROOT

    @property
    def first_leaf(self) -> int:
        return 1 << self.depth

    @property
    def num_nodes(self) -> int:
        return (1 << (self.depth + 1)) - 1

    def is_leaf(self, node: int) -> bool:
        return self.first_leaf <= node <= self.num_nodes

    def contains(self, node: int) -> bool:
        return 1 <= node <= self.num_nodes

    def usable_leaves(self) -> range:
        return range(self.first_leaf, self.first_leaf + self.n_max)

    def leaves_of(self, identity: int) -> list[int]:
        return sorted(leaf for leaf, who in self.leaf_assignments.items() if who == identity)

    def children(self, node: int) -> tuple[int, int] | tuple[()]:
        if self.is_leaf(node):
            return ()
        return (2 * node, 2 * node + 1)


@dataclass
class RevocationList:
    """Set of ``(leaf, epoch)`` pairs plus the epoch bookkeeping for query order.

    ``high_water_update_time`` is the latest epoch a key update was issued
    for; ``last_query_time`` the latest epoch of any update or revocation.
    """

    entries: set[tuple[int, int]] = field(default_factory=set)
    high_water_update_time: int | None = None
    last_query_time: int | None = None

    def check_update_time(self, t: int) -> None:
        if self.last_query_time is not None and t < self.last_query_time:
            raise TimeOrderError(
                f"epoch {t} precedes earlier query at epoch {self.last_query_time}; "
                "updates must be issued in non-decreasing order of time"
            )

    def record_update(self, t: int) -> None:
        self.check_update_time(t)
        self.high_water_update_time = t
        self.last_query_time = t

    def check_revoke_time(self, t: int) -> None:
        if self.last_query_time is not None and t < self.last_query_time:
            raise TimeOrderError(
                f"revocation at epoch {t} precedes earlier query at epoch {self.last_query_time}"
            )
        if self.high_water_update_time is not None and t == self.high_water_update_time:
            raise TimeOrderError(f"a key update was already published for epoch {t}")


def new_tree(n_max: int, prf_seed: bytes | None = None) -> TreeState:
    if n_max < 1:
        raise ValueError("N_max must be at least 1")
    depth = (n_max - 1).bit_length()
    return TreeState(depth=depth, n_max=n_max, prf_seed=prf_seed)


def assign_leaf(tree: TreeState, identity: int) -> int:
    """Bind ``identity`` to the leftmost unassigned leaf and return it."""
    for leaf in tree.usable_leaves():
        if leaf not in tree.leaf_assignments:
            tree.leaf_assignments[leaf] = identity
            return leaf
    raise CapacityError(f"all {tree.n_max} leaves are assigned")


def path(tree: TreeState, leaf: int) -> list[int]:
    """Nodes from ``leaf`` up to the root, both inclusive."""
    if not tree.is_leaf(leaf):
        raise ValueError(f"node {leaf} is not a leaf of a depth-{tree.depth} tree")
    out = []
    node = leaf
    while node >= ROOT:
        out.append(node)
        node //= 2
    return out


def marked_nodes(tree: TreeState, rl: RevocationList, t: int) -> set[int]:
    """Union of ``Path(leaf)`` over revocations effective at ``t``."""
    x: set[int] = set()
    lo, hi = tree.first_leaf, tree.num_nodes
    for leaf, t_i in rl.entries:
        if t_i <= t:
            if not lo <= leaf <= hi:
                raise ValueError(f"node {leaf} is not a leaf of a depth-{tree.depth} tree")
            node = leaf
            while node and node not in x:
                x.add(node)
                node >>= 1
    return x


def ku_nodes(tree: TreeState, rl: RevocationList, t: int) -> list[int]:
    """Minimal node set covering every leaf not revoked at ``t``, ascending.

    The root is returned only when no revocation is effective; if every
    leaf is revoked the cover is empty.
    """
    x = marked_nodes(tree, rl, t)
    if not x:
        return [ROOT]
    first_leaf = tree.first_leaf
    y = []
    for theta in x:
        if theta < first_leaf:
            for child in (2 * theta, 2 * theta + 1):
                if child not in x:
                    y.append(child)
    return sorted(y)


def _prf_scalar(seed: bytes, node: int, slot: int, q: int) -> int:
    msg = b"RIBE:share:v1" + node.to_bytes(4, "big") + bytes([slot])
    digest = hmac.new(seed, msg, hashlib.sha512).digest()
    return int.from_bytes(digest, "big") % q


def get_or_create_shares(
    tree: TreeState, node: int, master_alpha: int, q: int, variant: str, rng: Any
) -> ShareSet:
    """Return the node's ``(alpha1, alpha2[, alpha3])``, creating them once.

    ``alpha2 = master_alpha - alpha1``; ``alpha3`` exists only for ``dlin``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown scheme variant {variant!r}")
    if not tree.contains(node):
        raise ValueError(f"node {node} is outside the tree")
    existing = tree.node_shares.get(node)
    if existing is not None:
        if existing.variant != variant:
            raise ShareVariantError(
                f"node {node} holds {existing.variant} shares, {variant} requested"
            )
        return existing
    if tree.prf_seed is not None:
        alpha1 = _prf_scalar(tree.prf_seed, node, 1, q)
        alpha3 = _prf_scalar(tree.prf_seed, node, 3, q) if variant == "dlin" else None
    else:
        alpha1 = rng.randrange(q)
        alpha3 = rng.randrange(q) if variant == "dlin" else None
    shares = ShareSet(alpha1, (master_alpha - alpha1) % q, alpha3)
    tree.node_shares[node] = shares
    return shares


def revoke(rl: RevocationList, tree: TreeState, identity: int, t: int) -> RevocationList:
    """Add ``(leaf, t)`` for every leaf bound to ``identity``.

    Unknown identities leave ``rl`` untouched and emit
    :class:`UnknownIdentityWarning`.
    """
    rl.check_revoke_time(t)
    leaves = tree.leaves_of(identity)
    if not leaves:
        warnings.warn(f"identity {identity} holds no leaf; nothing revoked", UnknownIdentityWarning)
        return rl
    for leaf in leaves:
        rl.entries.add((leaf, t))
    rl.last_query_time = t if rl.last_query_time is None else max(rl.last_query_time, t)
    log.debug("revoked leaves %s at epoch %d", leaves, t)
    return rl


def is_revoked(tree: TreeState, rl: RevocationList, leaf: int, t: int) -> bool:
    return any(l == leaf and t_i <= t for l, t_i in rl.entries)


def iter_leaves(tree: TreeState) -> Iterable[int]:
    return range(tree.first_leaf, tree.num_nodes + 1)
