"""Anonymous revocable IBE over an asymmetric pairing, 6-dimensional dual bases.

Keys live in G2 and ciphertexts in G1.  The public parameters are
``(g_T^alpha, g1^{d_1}, g1^{d_2}, g1^{d_3})`` and the master key is
``(alpha, g2^{d_1*}, g2^{d_2*}, g2^{d_3*})``; ``d_4..d_6`` and their duals
exist only inside :class:`~ribe.algebra.DualBases`.
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

NAME = "sxdh"
DIM = 6

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
    group = group or gen_pairing_groups("production")
    if group.symmetric:
        raise ValueError("the SXDH scheme needs an asymmetric pairing group")
    rng = rng or default_rng()
    tree = new_tree(n_max, prf_seed)
    bases = sample_dual_bases(group, DIM, rng)
    alpha = group.random_scalar(rng)
    pp = PublicParams(
        NAME,
        group,
        gt_alpha_from(group, alpha, bases),
        tuple(vec_exp(group, Side.G1, bases.D[i]) for i in range(3)),
    )
    mk = MasterKey(
        NAME, alpha, tuple(vec_exp(group, Side.G2, bases.Dstar[i]) for i in range(3)), bases
    )
    return pp, mk, RevocationList(), tree


def identity_key(mk: MasterKey, shares: ShareSet, identity: int, r: int) -> GroupVector:
    """``g2^{(alpha1 + r id) d_1* - r d_2*}``."""
    d1s, d2s, _ = mk.vectors
    return vec_combine([(d1s, shares.alpha1 + r * identity), (d2s, -r)])


def update_key(mk: MasterKey, shares: ShareSet, t: int, r: int) -> GroupVector:
    """``g2^{(alpha2 + r t) d_1* - r d_3*}``."""
    d1s, _, d3s = mk.vectors
    return vec_combine([(d1s, shares.alpha2 + r * t), (d3s, -r)])


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
        r = group.random_scalar(rng)
        entries.append((node, identity_key(mk, shares, identity, r)))
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
        r = group.random_scalar(rng)
        entries.append((node, update_key(mk, shares, t, r)))
    rl.record_update(t)
    return KeyUpdate(NAME, t, tuple(entries))


def enc(pp: PublicParams, identity: int, t: int, m: Any, rng: Any = None) -> Ciphertext:
    """``C = m (g_T^alpha)^z``, ``C0 = g1^{z (d_1 + id d_2 + t d_3)}``."""
    group = pp.group
    rng = rng or default_rng()
    identity = as_scalar(group, identity, "identity")
    t = as_scalar(group, t, "epoch")
    z = group.random_scalar(rng)
    d1, d2, d3 = pp.vectors
    c = group.mul(m, group.exp(pp.gt_alpha, z))
    c0 = vec_combine([(d1, z), (d2, z * identity), (d3, z * t)])
    return Ciphertext(NAME, c, c0)
