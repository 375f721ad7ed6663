"""Anonymous revocable IBE over a symmetric pairing, 9-dimensional dual bases.

Six basis vectors are published.  Every node carries a third share
``alpha3`` that enters the private key with ``+`` and the key update with
``-`` on the ``d_4*`` slot, so it cancels only when both halves come from
the same node.
"""

from __future__ import annotations

from typing import Any

from .algebra import (
    GroupDescription,
    GroupVector,
    Side,
    default_rng,
    gen_pairing_groups,
    sample_dual_bases,
    vec_combine,
    vec_exp,
)
from .revtree import (
    RevocationList,
    ShareSet,
    TreeState,
    assign_leaf,
    get_or_create_shares,
    ku_nodes,
    new_tree,
    path,
)
from .scheme import (
    Ciphertext,
    KeyUpdate,
    MasterKey,
    PrivateKey,
    PublicParams,
    as_scalar,
    dec,
    dec_key_gen,
    gt_alpha_from,
    key_rev,
)

NAME = "dlin"
DIM = 9
PUBLISHED = 6

__all__ = [
    "setup", "pri_key_gen", "key_upd", "dec_key_gen", "enc", "dec", "key_rev",
    "identity_key", "update_key",
]


def setup(
    n_max: int,
    group: GroupDescription | None = None,
    rng: Any = None,
    prf_seed: bytes | None = None,
) -> tuple[PublicParams, MasterKey, RevocationList, TreeState]:
    group = group or gen_pairing_groups("production", symmetric=True)
    if not group.symmetric:
        raise ValueError("the DLIN scheme needs a symmetric pairing group")
    rng = rng or default_rng()
    tree = new_tree(n_max, prf_seed)
    bases = sample_dual_bases(group, DIM, rng)
    alpha = group.random_scalar(rng)
    pp = PublicParams(
        NAME,
        group,
        gt_alpha_from(group, alpha, bases),
        tuple(vec_exp(group, Side.G1, bases.D[i]) for i in range(PUBLISHED)),
    )
    mk = MasterKey(
        NAME,
        alpha,
        tuple(vec_exp(group, Side.G2, bases.Dstar[i]) for i in range(PUBLISHED)),
        bases,
    )
    return pp, mk, RevocationList(), tree


def identity_key(
    mk: MasterKey, shares: ShareSet, identity: int, r1: int, r3: int
) -> GroupVector:
    """``g^{(a1 + r1 id) d_1* - r1 d_2* + (a3 + r3 id) d_4* - r3 d_5*}``."""
    d1s, d2s, _, d4s, d5s, _ = mk.vectors
    return vec_combine([
        (d1s, shares.alpha1 + r1 * identity),
        (d2s, -r1),
        (d4s, shares.alpha3 + r3 * identity),
        (d5s, -r3),
    ])


def update_key(mk: MasterKey, shares: ShareSet, t: int, r2: int, r4: int) -> GroupVector:
    """``g^{(a2 + r2 t) d_1* - r2 d_3* + (-a3 + r4 t) d_4* - r4 d_6*}``."""
    d1s, _, d3s, d4s, _, d6s = mk.vectors
    return vec_combine([
        (d1s, shares.alpha2 + r2 * t),
        (d3s, -r2),
        (d4s, -shares.alpha3 + r4 * t),
        (d6s, -r4),
    ])


def pri_key_gen(
    pp: PublicParams, mk: MasterKey, identity: int, tree: TreeState, rng: Any = None
) -> tuple[PrivateKey, TreeState]:
    group = pp.group
    rng = rng or default_rng()
    identity = as_scalar(group, identity, "identity")
    leaf = assign_leaf(tree, identity)
    entries = []
    for node in path(tree, leaf):
        shares = get_or_create_shares(tree, node, mk.alpha, group.q, NAME, rng)
        r1 = group.random_scalar(rng)
        r3 = group.random_scalar(rng)
        entries.append((node, identity_key(mk, shares, identity, r1, r3)))
    return PrivateKey(NAME, leaf, tuple(entries)), tree


def key_upd(
    pp: PublicParams,
    mk: MasterKey,
    t: int,
    rl: RevocationList,
    tree: TreeState,
    rng: Any = None,
) -> KeyUpdate:
    group = pp.group
    rng = rng or default_rng()
    t = as_scalar(group, t, "epoch")
    rl.check_update_time(t)
    entries = []
    for node in ku_nodes(tree, rl, t):
        shares = get_or_create_shares(tree, node, mk.alpha, group.q, NAME, rng)
        r2 = group.random_scalar(rng)
        r4 = group.random_scalar(rng)
        entries.append((node, update_key(mk, shares, t, r2, r4)))
    rl.record_update(t)
    return KeyUpdate(NAME, t, tuple(entries))


def enc(pp: PublicParams, identity: int, t: int, m: Any, rng: Any = None) -> Ciphertext:
    """``C = m (g_T^alpha)^{z1}``, ``C0 = g^{z1 (d_1 + id d_2 + t d_3) + z2 (d_4 + id d_5 + t d_6)}``."""
    group = pp.group
    rng = rng or default_rng()
    identity = as_scalar(group, identity, "identity")
    t = as_scalar(group, t, "epoch")
    z1 = group.random_scalar(rng)
    z2 = group.random_scalar(rng)
    d1, d2, d3, d4, d5, d6 = pp.vectors
    c = group.mul(m, group.exp(pp.gt_alpha, z1))
    c0 = vec_combine([
        (d1, z1), (d2, z1 * identity), (d3, z1 * t),
        (d4, z2), (d5, z2 * identity), (d6, z2 * t),
    ])
    return Ciphertext(NAME, c, c0)
