import hashlib
import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cover_oracle import reference_cover, sweep, x_monotone
from ribe.errors import CapacityError, ShareVariantError, TimeOrderError
from ribe.revtree import (
    ROOT,
    RevocationList,
    ShareSet,
    TreeState,
    UnknownIdentityWarning,
    assign_leaf,
    get_or_create_shares,
    is_revoked,
    ku_nodes,
    marked_nodes,
    new_tree,
    path,
    revoke,
)

Q = 101


def test_new_tree_nmax_8():
    tree = new_tree(8)
    assert tree.depth == 3
    assert tree.num_nodes == 15
    assert list(tree.usable_leaves()) == list(range(8, 16))


def test_new_tree_rounds_up():
    assert new_tree(5).depth == 3
    assert new_tree(2).depth == 1
    assert new_tree(9).depth == 4


def test_new_tree_single_node():
    tree = new_tree(1)
    assert tree.depth == 0
    assert tree.is_leaf(ROOT) and tree.num_nodes == 1


def test_new_tree_rejects_zero():
    with pytest.raises(ValueError):
        new_tree(0)


def test_assign_leaf_leftmost():
    tree = new_tree(4)
    assert [assign_leaf(tree, i) for i in (10, 11, 12, 13)] == [4, 5, 6, 7]
    with pytest.raises(CapacityError):
        assign_leaf(tree, 14)


def test_assign_leaf_capacity_below_power_of_two():
    tree = new_tree(5)
    for i in range(5):
        assign_leaf(tree, i)
    with pytest.raises(CapacityError):
        assign_leaf(tree, 99)


def test_duplicate_identity_gets_distinct_leaves():
    tree = new_tree(4)
    a, b = assign_leaf(tree, 7), assign_leaf(tree, 7)
    assert a != b
    assert tree.leaves_of(7) == [a, b]
    assert len(tree.leaf_assignments) == len(set(tree.leaf_assignments))


def test_path_examples():
    assert path(new_tree(4), 5) == [5, 2, 1]
    assert path(new_tree(1), 1) == [1]
    tree = new_tree(16)
    for leaf in tree.usable_leaves():
        p = path(tree, leaf)
        assert len(p) == tree.depth + 1
        assert all(nxt == k // 2 for k, nxt in zip(p, p[1:]))
        assert p[-1] == ROOT


def test_path_rejects_internal_node():
    with pytest.raises(ValueError):
        path(new_tree(4), 2)


def test_ku_nodes_empty_rl_is_root():
    assert ku_nodes(new_tree(8), RevocationList(), 0) == [ROOT]


def test_ku_nodes_hand_executed_example():
    tree = new_tree(4)
    rl = RevocationList(entries={(4, 1)})
    assert marked_nodes(tree, rl, 1) == {1, 2, 4}
    assert ku_nodes(tree, rl, 1) == [3, 5]


def test_ku_nodes_ignores_future_revocation():
    tree = new_tree(4)
    rl = RevocationList(entries={(4, 5)})
    assert ku_nodes(tree, rl, 1) == [ROOT]
    assert ku_nodes(tree, rl, 5) == [3, 5]


def test_ku_nodes_all_revoked_is_empty():
    tree = new_tree(4)
    rl = RevocationList(entries={(leaf, 1) for leaf in range(4, 8)})
    assert ku_nodes(tree, rl, 1) == []
    assert ku_nodes(new_tree(1), RevocationList(entries={(1, 0)}), 0) == []


def test_ku_nodes_reference_examples():
    assert reference_cover(3, frozenset({9})) == [3, 5, 8]
    assert ku_nodes(new_tree(8), RevocationList(entries={(9, 2)}), 2) == [3, 5, 8]
    assert ku_nodes(new_tree(8), RevocationList(entries={(8, 1), (15, 1)}), 1) == [5, 6, 9, 14]


def test_ku_nodes_exhaustive_up_to_depth_3():
    stats = None
    for depth in range(4):
        stats = sweep(depth, stats)
    assert stats.failures == []
    assert stats.max_ratio_violations == 0
    assert stats.root_only_checks > 0


# -- shares -------------------------------------------------------------------


def test_shares_idempotent(rng):
    tree = new_tree(8)
    a = get_or_create_shares(tree, 3, 42, Q, "sxdh", rng)
    b = get_or_create_shares(tree, 3, 42, Q, "sxdh", rng)
    assert a is b
    assert a.alpha3 is None and a.variant == "sxdh"


def test_shares_sum_to_master_alpha():
    rng = random.Random(1)
    q = 2**61 - 1
    tree = new_tree(1024)
    alpha = rng.randrange(q)
    for node in rng.sample(range(1, tree.num_nodes + 1), 1000):
        s = get_or_create_shares(tree, node, alpha, q, "dlin", rng)
        assert (s.alpha1 + s.alpha2) % q == alpha
        assert s.alpha3 is not None


def test_shares_variant_mismatch(rng):
    tree = new_tree(4)
    get_or_create_shares(tree, 1, 5, Q, "sxdh", rng)
    with pytest.raises(ShareVariantError):
        get_or_create_shares(tree, 1, 5, Q, "dlin", rng)
    with pytest.raises(ValueError):
        get_or_create_shares(tree, 1, 5, Q, "bls", rng)
    with pytest.raises(ValueError):
        get_or_create_shares(tree, 99, 5, Q, "sxdh", rng)


def test_prf_shares_replay_bit_identical():
    seed = bytes.fromhex("00112233445566778899aabbccddeeff")
    q = 2**127 - 1
    nodes = [1, 2, 5, 11, 3, 7, 15]
    first = new_tree(8, prf_seed=seed)
    second = new_tree(8, prf_seed=seed)
    a = [get_or_create_shares(first, n, 77, q, "dlin", random.Random(1)) for n in nodes]
    b = [get_or_create_shares(second, n, 77, q, "dlin", random.Random(2)) for n in reversed(nodes)]
    assert a == list(reversed(b))
    other = new_tree(8, prf_seed=b"another seed")
    assert get_or_create_shares(other, 1, 77, q, "dlin", None) != a[0]


def _share_hash(tree: TreeState) -> str:
    h = hashlib.sha256()
    for node in sorted(tree.node_shares):
        s = tree.node_shares[node]
        h.update(repr((node, s.alpha1, s.alpha2, s.alpha3)).encode())
    return h.hexdigest()


def test_shares_write_once_across_repeated_use(rng):
    tree = new_tree(8)
    for node in range(1, 16):
        get_or_create_shares(tree, node, 9, Q, "sxdh", rng)
    before = _share_hash(tree)
    for _ in range(5):
        for node in range(1, 16):
            get_or_create_shares(tree, node, 9, Q, "sxdh", rng)
    assert _share_hash(tree) == before
    with pytest.raises(Exception):
        tree.node_shares[1].alpha1 = 0


# -- revocation ---------------------------------------------------------------


def test_revoke_unknown_identity_warns():
    tree, rl = new_tree(4), RevocationList()
    with pytest.warns(UnknownIdentityWarning):
        revoke(rl, tree, 123, 1)
    assert rl.entries == set()


def test_revoke_then_cover_excludes_path():
    tree, rl = new_tree(4), RevocationList()
    leaf = assign_leaf(tree, 55)
    assert leaf == 4
    revoke(rl, tree, 55, 3)
    cover = ku_nodes(tree, rl, 3)
    assert not set(cover) & set(path(tree, 4))
    assert is_revoked(tree, rl, 4, 3) and not is_revoked(tree, rl, 4, 2)


def test_revoke_all_leaves_of_duplicate_identity():
    tree, rl = new_tree(4), RevocationList()
    assign_leaf(tree, 1)
    assign_leaf(tree, 2)
    assign_leaf(tree, 1)
    revoke(rl, tree, 1, 0)
    assert rl.entries == {(4, 0), (6, 0)}


def test_revoke_before_published_update_rejected():
    rl = RevocationList()
    rl.record_update(5)
    tree = new_tree(4)
    assign_leaf(tree, 8)
    with pytest.raises(TimeOrderError):
        revoke(rl, tree, 8, 2)
    with pytest.raises(TimeOrderError):
        revoke(rl, tree, 8, 5)
    revoke(rl, tree, 8, 6)
    assert rl.entries == {(4, 6)}


def test_update_order_enforced():
    rl = RevocationList()
    rl.record_update(3)
    rl.record_update(3)
    with pytest.raises(TimeOrderError):
        rl.record_update(2)
    tree = new_tree(2)
    assign_leaf(tree, 1)
    revoke(rl, tree, 1, 9)
    with pytest.raises(TimeOrderError):
        rl.record_update(8)


def test_revoke_is_idempotent_on_same_epoch():
    tree, rl = new_tree(4), RevocationList()
    assign_leaf(tree, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        revoke(rl, tree, 3, 1)
        revoke(rl, tree, 3, 1)
    assert rl.entries == {(4, 1)}


# -- properties -----------------------------------------------------------------

depth_and_entries = st.integers(0, 5).flatmap(
    lambda d: st.tuples(
        st.just(d),
        st.sets(st.tuples(st.integers(1 << d, (1 << (d + 1)) - 1), st.integers(0, 6)), max_size=12),
        st.sets(st.tuples(st.integers(1 << d, (1 << (d + 1)) - 1), st.integers(0, 6)), max_size=6),
        st.integers(0, 7),
    )
)


@settings(max_examples=300, deadline=None)
@given(depth_and_entries)
def test_property_x_monotone_in_entries(args):
    depth, entries, extra, t = args
    tree = TreeState(depth=depth, n_max=1 << depth)
    assert x_monotone(tree, RevocationList(entries=set(entries)), set(extra), t)


@settings(max_examples=300, deadline=None)
@given(depth_and_entries)
def test_property_cover_matches_reference_and_bound(args):
    depth, entries, _, t = args
    tree = TreeState(depth=depth, n_max=1 << depth)
    rl = RevocationList(entries=set(entries))
    effective = frozenset(leaf for leaf, t_i in entries if t_i <= t)
    got = ku_nodes(tree, rl, t)
    if effective:
        assert got == reference_cover(depth, effective)
        assert len(got) <= 2 * len(effective) * depth + 1
    else:
        assert got == [ROOT]


def test_shareset_variant():
    assert ShareSet(1, 2).variant == "sxdh"
    assert ShareSet(1, 2, 3).variant == "dlin"
