import inspect
import random

import pytest

from mock_oracle import check_scheme, combo, logs
from ribe import dlin, sxdh
from ribe.algebra import Side, gen_pairing_groups, vec_exp, vec_pair
from ribe.errors import TimeOrderError
from ribe.revtree import ROOT, ShareSet
from ribe.testing import RecordingRandom

Q = 101


@pytest.fixture(scope="module")
def prod_setup():
    rng = random.Random(123)
    pp, mk, rl, tree = dlin.setup(8, gen_pairing_groups("production", symmetric=True), rng)
    return pp, mk, rl, tree, rng


def test_setup_counts(prod_setup):
    pp, mk, *_ = prod_setup
    assert pp.element_count() == 55
    assert mk.element_count() == 55
    assert len(pp.vectors) == 6 and all(v.n == 9 for v in pp.vectors)


def test_setup_needs_symmetric_group(mock_group):
    with pytest.raises(ValueError):
        dlin.setup(4, mock_group, random.Random(0))


def test_hidden_dimensions_not_published(mock_sym_group, rng):
    pp, mk, _, _ = dlin.setup(4, mock_sym_group, rng)
    b = mk.bases
    published = [logs(mock_sym_group, Side.G1, v) for v in pp.vectors]
    held = [logs(mock_sym_group, Side.G1, v) for v in mk.vectors]
    assert published == [list(v.coords) for v in b.D[:6]]
    assert held == [list(v.coords) for v in b.Dstar[:6]]
    for extra in b.D[6:]:
        assert list(extra.coords) not in published
    for extra in b.Dstar[6:]:
        assert list(extra.coords) not in held


def test_full_nine_by_nine_duality(mock_sym_group, rng):
    pp, mk, _, _ = dlin.setup(2, mock_sym_group, rng)
    b = mk.bases
    for i in range(9):
        for j in range(9):
            dot = sum(x * y for x, y in zip(b.D[i].coords, b.Dstar[j].coords)) % Q
            assert dot == (b.psi if i == j else 0)


def test_key_and_update_pairings_mock(mock_sym_group):
    g = mock_sym_group
    rng = RecordingRandom(17)
    pp, mk, rl, tree = dlin.setup(4, g, rng, prf_seed=b"dlin")
    who, t = 33, 12
    sk, tree = dlin.pri_key_gen(pp, mk, who, tree, rng)
    ku = dlin.key_upd(pp, mk, t, rl, tree, rng)
    start = len(rng.draws)
    ct = dlin.enc(pp, who, t, g.gt, rng)
    z1, z2 = rng.draws[start:]
    psi = mk.bases.psi
    dk = dlin.dec_key_gen(sk, ku)
    assert dk.node == ROOT
    s = tree.node_shares[ROOT]
    e_id = g.dlog(Side.GT, vec_pair(ct.c0, dk.k_id))
    e_t = g.dlog(Side.GT, vec_pair(ct.c0, dk.k_t))
    assert e_id == (s.alpha1 * z1 + s.alpha3 * z2) * psi % Q
    assert (e_id + e_t) % Q == (s.alpha1 + s.alpha2) * z1 * psi % Q == mk.alpha * z1 * psi % Q


def test_alpha3_cancellation_symbolic(mock_sym_group):
    # the combined exponent must not move when alpha3, the r's or z2 change
    g = mock_sym_group
    pp, mk, _, _ = dlin.setup(2, g, random.Random(2))
    who, t, z1 = 5, 9, 4
    d = mk.bases.D
    seen = set()
    for a3, r1, r2, r3, r4, z2 in [(0, 1, 2, 3, 4, 0), (50, 7, 8, 9, 10, 77), (99, 0, 0, 0, 0, 13)]:
        shares = ShareSet(11, (mk.alpha - 11) % Q, a3)
        k_id = dlin.identity_key(mk, shares, who, r1, r3)
        k_t = dlin.update_key(mk, shares, t, r2, r4)
        c0_exp = combo(
            Q, (z1, d[0].coords), (z1 * who, d[1].coords), (z1 * t, d[2].coords),
            (z2, d[3].coords), (z2 * who, d[4].coords), (z2 * t, d[5].coords),
        )
        c0 = vec_exp(g, Side.G1, c0_exp)
        seen.add(g.dlog(Side.GT, g.mul(vec_pair(c0, k_id), vec_pair(c0, k_t))))
    assert seen == {mk.alpha * z1 * mk.bases.psi % Q}


def test_alpha3_shared_between_key_and_update(mock_sym_group, rng):
    pp, mk, rl, tree = dlin.setup(4, mock_sym_group, rng)
    sk, tree = dlin.pri_key_gen(pp, mk, 1, tree, rng)
    before = dict(tree.node_shares)
    dlin.key_upd(pp, mk, 1, rl, tree, rng)
    assert tree.node_shares[ROOT] is before[ROOT]
    assert all(s.alpha3 is not None for s in tree.node_shares.values())


def test_four_independent_r_per_node(mock_sym_group):
    rng = RecordingRandom(3)
    pp, mk, rl, tree = dlin.setup(4, mock_sym_group, rng, prf_seed=b"x")
    start = len(rng.draws)
    sk, tree = dlin.pri_key_gen(pp, mk, 2, tree, rng)
    assert len(rng.draws) - start == 2 * len(sk.entries)
    start = len(rng.draws)
    ku = dlin.key_upd(pp, mk, 1, rl, tree, rng)
    assert len(rng.draws) - start == 2 * len(ku.entries)


@pytest.mark.parametrize("seed", range(5))
def test_mock_oracle(seed):
    assert check_scheme("dlin", seed).mismatches == []


def test_production_round_trip(prod_setup):
    pp, mk, rl, tree, rng = prod_setup
    g = pp.group
    who = g.random_scalar(rng)
    sk, tree = dlin.pri_key_gen(pp, mk, who, tree, rng)
    dk = dlin.dec_key_gen(sk, dlin.key_upd(pp, mk, 4, rl, tree, rng))
    for _ in range(100):
        m = g.random_gt(rng)
        assert dlin.dec(pp, dk, dlin.enc(pp, who, 4, m, rng)) == m
    assert dlin.dec(pp, dk, dlin.enc(pp, (who + 1) % g.q, 4, m, rng)) != m


def test_dec_pairing_count(any_sym_group, rng):
    pp, mk, rl, tree = dlin.setup(2, any_sym_group, rng)
    sk, tree = dlin.pri_key_gen(pp, mk, 1, tree, rng)
    dk = dlin.dec_key_gen(sk, dlin.key_upd(pp, mk, 1, rl, tree, rng))
    ct = dlin.enc(pp, 1, 1, any_sym_group.gt, rng)
    assert ct.source_element_count() == 9 and dk.k_id.n == dk.k_t.n == 9
    before = any_sym_group.pairing_count
    dlin.dec(pp, dk, ct)
    assert any_sym_group.pairing_count - before == 18


def test_revoked_is_none(mock_sym_group, rng):
    pp, mk, rl, tree = dlin.setup(4, mock_sym_group, rng)
    sk, tree = dlin.pri_key_gen(pp, mk, 7, tree, rng)
    dlin.key_rev(7, 2, rl, tree)
    assert dlin.dec_key_gen(sk, dlin.key_upd(pp, mk, 2, rl, tree, rng)) is None
    with pytest.raises(TimeOrderError):
        dlin.key_upd(pp, mk, 1, rl, tree, rng)


def test_exhaustive_small_tree(mock_sym_group):
    rng = random.Random(9)
    for mask in range(16):
        pp, mk, rl, tree = dlin.setup(4, mock_sym_group, rng)
        keys = [dlin.pri_key_gen(pp, mk, i, tree, rng)[0] for i in range(4)]
        for i in range(4):
            if mask >> i & 1:
                dlin.key_rev(i, 3, rl, tree)
        ku = dlin.key_upd(pp, mk, 3, rl, tree, rng)
        for i, sk in enumerate(keys):
            dk = dlin.dec_key_gen(sk, ku)
            assert (dk is None) == bool(mask >> i & 1)
            if dk is not None:
                m = mock_sym_group.random_gt(rng)
                assert dlin.dec(pp, dk, dlin.enc(pp, i, 3, m, rng)) == m


def _decisions(module, group, seed):
    rng = random.Random(seed)
    pp, mk, rl, tree = module.setup(8, group, rng)
    plan = random.Random(seed + 1000)
    keys = [module.pri_key_gen(pp, mk, i, tree, rng)[0] for i in range(8)]
    out = []
    for t in range(1, 9):
        for i in plan.sample(range(8), plan.randrange(2)):
            module.key_rev(i, t, rl, tree)
        ku = module.key_upd(pp, mk, t, rl, tree, rng)
        out.append(tuple(module.dec_key_gen(sk, ku) is None for sk in keys))
        out.append(tuple(ku.nodes()))
    return out


@pytest.mark.parametrize("seed", range(10))
def test_scheme_parity_of_revocation_decisions(seed):
    a = _decisions(sxdh, gen_pairing_groups("mock", q=Q), seed)
    b = _decisions(dlin, gen_pairing_groups("mock", q=Q, symmetric=True), seed)
    assert a == b


def test_enc_and_dec_take_no_master_key():
    assert "mk" not in inspect.signature(dlin.enc).parameters
    assert "mk" not in inspect.signature(dlin.dec).parameters
