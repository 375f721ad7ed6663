"""One row of the semi-functional decryption matrix for a given seed."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ribe import sxdh
from ribe.revtree import get_or_create_shares
from ribe.scheme import DecryptionKey
from ribe.testing import sf_oracles as sf


@dataclass
class MatrixRow:
    normal_ct_sf_keys: bool
    sf_ct_normal_keys: bool
    sf_sf_predicate: bool
    sf_sf_failed: bool
    type1_ok: bool
    type2_ok: bool
    perturbed_failed: bool
    unmatched_alpha_failed: bool

    @property
    def consistent(self) -> bool:
        return (
            self.normal_ct_sf_keys
            and self.sf_ct_normal_keys
            and self.sf_sf_predicate == self.sf_sf_failed
            and self.type1_ok
            and self.type2_ok
            and self.perturbed_failed
            and self.unmatched_alpha_failed
        )


def run_row(group, seed: int) -> MatrixRow:
    rng = random.Random(seed)
    pp, mk, _, tree = sxdh.setup(2, group, rng)
    q = group.q
    node = 1
    shares = get_or_create_shares(tree, node, mk.alpha, q, "sxdh", rng)
    who, t = group.random_scalar(rng), group.random_scalar(rng)
    m = group.random_gt(rng)

    def decrypts(k_id, k_t, ct) -> bool:
        return sxdh.dec(pp, DecryptionKey("sxdh", node, t, k_id, k_t), ct) == m

    normal_id = sxdh.identity_key(mk, shares, who, group.random_scalar(rng))
    normal_t = sxdh.update_key(mk, shares, t, group.random_scalar(rng))
    normal_ct = sxdh.enc(pp, who, t, m, rng)
    (_, sf_id), ktag = sf.pri_key_gen_sf(mk, who, node, shares, rng)
    (_, sf_t), utag = sf.key_upd_sf(mk, t, node, shares, rng)
    sf_ct, ctag = sf.encrypt_sf(pp, mk, who, t, m, rng)

    shift = sf.sf_shift_exponent(
        ktag.coefficients["nu"], utag.coefficients["nu"], ctag.coefficients["chi"], mk.bases.psi, q
    )

    type1 = sf.nominal_pair_type1(pp, mk, who, t, node, shares, m, rng)
    type2 = sf.nominal_pair_type2(pp, mk, who, t, node, shares, m, rng)

    # bump the d_5* coefficient of the Type I key by one, same r
    nu = list(type1.key_tag.coefficients["nu"])
    nu[1] = (nu[1] + 1) % q
    (_, bumped), _ = sf.pri_key_gen_sf(mk, who, node, shares, rng, r=type1.key_tag.coefficients["r"], nu=nu)

    # Type II with two independent alpha_theta values
    a, b = group.random_scalar(rng, nonzero=True), group.random_scalar(rng, nonzero=True)
    while b == a:
        b = group.random_scalar(rng, nonzero=True)
    nu41, nu42 = group.random_scalar(rng), group.random_scalar(rng)
    (_, k_a), _ = sf.pri_key_gen_sf(mk, who, node, shares, rng, nu=((a + nu41 * who) % q, -nu41 % q, 0))
    (_, u_b), _ = sf.key_upd_sf(mk, t, node, shares, rng, nu=((-b + nu42 * t) % q, 0, -nu42 % q))
    chi4 = group.random_scalar(rng, nonzero=True)
    ct_nom, _ = sf.encrypt_sf(pp, mk, who, t, m, rng, chi=(chi4, chi4 * who % q, chi4 * t % q))

    return MatrixRow(
        normal_ct_sf_keys=decrypts(sf_id, sf_t, normal_ct),
        sf_ct_normal_keys=decrypts(normal_id, normal_t, sf_ct),
        sf_sf_predicate=shift != 0,
        sf_sf_failed=not decrypts(sf_id, sf_t, sf_ct),
        type1_ok=sxdh.dec(pp, type1.decryption_key(), type1.ciphertext) == m,
        type2_ok=sxdh.dec(pp, type2.decryption_key(), type2.ciphertext) == m,
        perturbed_failed=not decrypts(bumped, type1.update, type1.ciphertext),
        unmatched_alpha_failed=not decrypts(k_a, u_b, ct_nom),
    )
