"""On-disk key authority: parameters, state, bulletins and user keys.

Layout of an authority directory::

    pp.bin              public parameters (world-readable)
    mk.bin              master key (mode 0600)
    state.bin           tree + revocation list
    bulletins/ku_<T>.bin  key update for epoch T (public)
    keys/sk_<leaf>.bin  private key handed to the user (mode 0600)
    .lock               advisory lock for state mutations

Every file is replaced atomically (write to a temporary file, fsync, rename),
so an interrupted command leaves the previous version in place.
"""

from __future__ import annotations

import contextlib
import fcntl
import hashlib
import logging
import os
import re
import tempfile
import warnings
from pathlib import Path
from types import ModuleType
from typing import Any

from . import dlin, sxdh, wire
from .algebra import GroupDescription, default_rng, gen_pairing_groups
from .errors import FormatError, RibeError
from .revtree import UnknownIdentityWarning
from .scheme import KeyUpdate, MasterKey, PrivateKey, PublicParams

log = logging.getLogger(__name__)

ID_TAG = b"RIBE:id:v1"
MAX_EPOCH = 2**64 - 1
_BULLETIN_RE = re.compile(r"^ku_(\d+)\.bin$")


class StateCorruptionError(RibeError):
    """Authority files are missing, unreadable or mutually inconsistent."""


class PolicyError(RibeError):
    """The request is well-formed but refused by authority policy."""


def id_to_field(raw: str, q: int) -> int:
    """Map a UTF-8 identity string into ``Z_q``: ``SHA-512("RIBE:id:v1" || raw) mod q``."""
    digest = hashlib.sha512(ID_TAG + raw.encode("utf-8")).digest()
    return int.from_bytes(digest, "big") % q


def epoch_to_field(t: int, q: int) -> int:
    if not 0 <= t <= MAX_EPOCH:
        raise ValueError(f"epoch {t} is not a u64")
    if t >= q:
        raise ValueError(f"epoch {t} does not embed into Z_q (q={q})")
    return t


def scheme_module(name: str) -> ModuleType:
    try:
        return {"sxdh": sxdh, "dlin": dlin}[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}") from None


def atomic_write(path: Path, data: bytes, mode: int = 0o644) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.chmod(tmp, mode)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def read_artifact(path: Path, expect: str | None = None, group: GroupDescription | None = None) -> Any:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    return wire.decode(data, group=group, expect=expect)


class AuthorityStore:
    def __init__(self, home: Path | str):
        self.home = Path(home)

    @property
    def pp_path(self) -> Path:
        return self.home / "pp.bin"

    @property
    def mk_path(self) -> Path:
        return self.home / "mk.bin"

    @property
    def state_path(self) -> Path:
        return self.home / "state.bin"

    @property
    def bulletin_dir(self) -> Path:
        return self.home / "bulletins"

    @property
    def key_dir(self) -> Path:
        return self.home / "keys"

    def bulletin_path(self, t: int) -> Path:
        return self.bulletin_dir / f"ku_{t}.bin"

    @contextlib.contextmanager
    def lock(self):
        with open(self.home / ".lock", "a+") as fh:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh.fileno(), fcntl.LOCK_UN)

    # -- creation -----------------------------------------------------------

    @classmethod
    def create(
        cls,
        home: Path | str,
        scheme: str,
        n_max: int,
        *,
        prf_seed: bytes | None = None,
        mock_q: int | None = None,
        force: bool = False,
        rng: Any = None,
    ) -> tuple[AuthorityStore, PublicParams, MasterKey]:
        store = cls(home)
        if store.pp_path.exists() and not force:
            raise PolicyError(f"{store.home} already holds an authority (use --force to replace)")
        module = scheme_module(scheme)
        symmetric = scheme == "dlin"
        if mock_q is not None:
            group = gen_pairing_groups("mock", q=mock_q, symmetric=symmetric)
        else:
            group = gen_pairing_groups("production", symmetric=symmetric)
        pp, mk, rl, tree = module.setup(n_max, group, rng or default_rng(), prf_seed=prf_seed)

        store.home.mkdir(parents=True, exist_ok=True)
        store.bulletin_dir.mkdir(exist_ok=True)
        store.key_dir.mkdir(mode=0o700, exist_ok=True)
        with store.lock():
            for old in store.bulletin_dir.glob("ku_*.bin"):
                old.unlink()
            atomic_write(store.mk_path, wire.encode(mk), mode=0o600)
            atomic_write(store.state_path, wire.encode_state(tree, rl), mode=0o600)
            atomic_write(store.pp_path, wire.encode(pp))
        return store, pp, mk

    # -- loading ------------------------------------------------------------

    def load_pp(self) -> PublicParams:
        try:
            return read_artifact(self.pp_path, expect="pp")
        except FormatError as exc:
            raise StateCorruptionError(str(exc)) from exc

    def load_mk(self, group: GroupDescription) -> MasterKey:
        try:
            return read_artifact(self.mk_path, expect="mk", group=group)
        except FormatError as exc:
            raise StateCorruptionError(str(exc)) from exc

    def load_state(self):
        try:
            tree, rl = wire.decode_state(self.state_path.read_bytes())
        except (OSError, FormatError) as exc:
            raise StateCorruptionError(f"cannot load {self.state_path}: {exc}") from exc
        latest = self.latest_bulletin()
        if latest is not None and (rl.high_water_update_time is None or latest > rl.high_water_update_time):
            raise StateCorruptionError(
                f"bulletin for epoch {latest} is newer than the state's high-water epoch "
                f"{rl.high_water_update_time}"
            )
        return tree, rl

    def latest_bulletin(self) -> int | None:
        epochs = [
            int(m.group(1))
            for p in self.bulletin_dir.glob("ku_*.bin")
            if (m := _BULLETIN_RE.match(p.name))
        ]
        return max(epochs, default=None)

    def _save_state(self, tree, rl) -> None:
        atomic_write(self.state_path, wire.encode_state(tree, rl), mode=0o600)

    # -- operations ---------------------------------------------------------

    def register(
        self, raw_id: str, *, allow_duplicate: bool = False, out: Path | None = None, rng: Any = None
    ) -> tuple[Path, PrivateKey]:
        with self.lock():
            pp = self.load_pp()
            mk = self.load_mk(pp.group)
            tree, rl = self.load_state()
            identity = id_to_field(raw_id, pp.group.q)
            if tree.leaves_of(identity) and not allow_duplicate:
                raise PolicyError(f"identity {raw_id!r} is already registered (use --allow-duplicate)")
            sk, tree = scheme_module(pp.scheme).pri_key_gen(pp, mk, identity, tree, rng or default_rng())
            path = Path(out) if out else self.key_dir / f"sk_{sk.leaf}.bin"
            atomic_write(path, wire.encode(sk), mode=0o600)
            self._save_state(tree, rl)
        log.info("registered %r at leaf %d", raw_id, sk.leaf)
        return path, sk

    def revoke(self, raw_id: str, t: int) -> list[int]:
        """Revoke every leaf of ``raw_id`` from epoch ``t``; returns the leaves (empty if unknown)."""
        with self.lock():
            pp = self.load_pp()
            tree, rl = self.load_state()
            t = epoch_to_field(t, pp.group.q)
            identity = id_to_field(raw_id, pp.group.q)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UnknownIdentityWarning)
                scheme_module(pp.scheme).key_rev(identity, t, rl, tree)
            leaves = tree.leaves_of(identity)
            if leaves:
                self._save_state(tree, rl)
        return leaves

    def publish(self, t: int, rng: Any = None) -> tuple[Path, KeyUpdate]:
        with self.lock():
            pp = self.load_pp()
            mk = self.load_mk(pp.group)
            tree, rl = self.load_state()
            t = epoch_to_field(t, pp.group.q)
            ku = scheme_module(pp.scheme).key_upd(pp, mk, t, rl, tree, rng or default_rng())
            # state first: a crash before the bulletin lands is recovered by re-publishing t
            self._save_state(tree, rl)
            path = self.bulletin_path(t)
            atomic_write(path, wire.encode(ku, group=pp.group))
        return path, ku
