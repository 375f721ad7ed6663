"""The RIBE consistency experiment run over a random registration/revocation schedule."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import ModuleType
from typing import Any

from .algebra import GroupDescription, default_rng


@dataclass
class ConsistencyReport:
    decrypt_ok: int = 0
    decrypt_failed: int = 0
    revoked_bottom: int = 0
    revoked_leaked: int = 0
    unrevoked_bottom: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.decrypt_failed or self.revoked_leaked or self.unrevoked_bottom)


def run_consistency(
    scheme: ModuleType,
    group: GroupDescription | None = None,
    *,
    n_max: int = 8,
    users: int = 5,
    epochs: int = 10,
    revocations: int = 3,
    messages: int = 100,
    rng: Any = None,
) -> ConsistencyReport:
    """Register ``users``, revoke ``revocations`` of them at random epochs, publish
    ``epochs`` key updates and decrypt ``messages`` random GT messages.

    Every (user, epoch) pair is checked for the ``None``-iff-revoked contract;
    messages go to random unrevoked (user, epoch) pairs and must decrypt.
    """
    rng = rng or default_rng()
    pp, mk, rl, tree = scheme.setup(n_max, group, rng)
    group = pp.group
    report = ConsistencyReport()

    ids: list[int] = []
    while len(ids) < users:
        candidate = group.random_scalar(rng)
        if candidate not in ids:
            ids.append(candidate)
    keys = {who: scheme.pri_key_gen(pp, mk, who, tree, rng)[0] for who in ids}

    schedule: dict[int, list[int]] = {}
    for who in rng.sample(ids, revocations):
        schedule.setdefault(1 + rng.randrange(epochs), []).append(who)
    revoked_at: dict[int, int] = {}

    usable: list[tuple[int, int, Any]] = []
    for t in range(1, epochs + 1):
        for who in schedule.get(t, []):
            scheme.key_rev(who, t, rl, tree)
            revoked_at[who] = t
        ku = scheme.key_upd(pp, mk, t, rl, tree, rng)
        for who in ids:
            dk = scheme.dec_key_gen(keys[who], ku)
            revoked = who in revoked_at and revoked_at[who] <= t
            if revoked and dk is None:
                report.revoked_bottom += 1
            elif revoked:
                report.revoked_leaked += 1
                report.failures.append(f"revoked id {who} obtained a key at t={t}")
            elif dk is None:
                report.unrevoked_bottom += 1
                report.failures.append(f"unrevoked id {who} got bottom at t={t}")
            else:
                usable.append((who, t, dk))

    for _ in range(messages):
        who, t, dk = usable[rng.randrange(len(usable))]
        m = group.random_gt(rng)
        ct = scheme.enc(pp, who, t, m, rng)
        if scheme.dec(pp, dk, ct) == m:
            report.decrypt_ok += 1
        else:
            report.decrypt_failed += 1
            report.failures.append(f"decryption failed for id {who} at t={t}")
    return report
