"""``ribe`` command-line tool for the key authority, senders and receivers.

Exit codes: 0 ok, 1 refused by policy (capacity, epoch order, duplicate
identity, existing authority), 2 usage, 3 revoked, 4 integrity failure,
5 corrupt or unreadable state/artifact.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import hybrid, wire
from .authority import (
    AuthorityStore,
    PolicyError,
    StateCorruptionError,
    epoch_to_field,
    id_to_field,
    read_artifact,
    scheme_module,
)
from .errors import CapacityError, FormatError, IntegrityError, TimeOrderError
from .scheme import dec_key_gen

EXIT_OK = 0
EXIT_POLICY = 1
EXIT_USAGE = 2
EXIT_REVOKED = 3
EXIT_INTEGRITY = 4
EXIT_CORRUPT = 5

HYBRID_NOTE = (
    "Byte payloads are wrapped in a hybrid layer (random GT mass -> HKDF-SHA256 -> "
    "AES-256-GCM) that sits outside the RIBE construction itself."
)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _epoch(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("epochs are unsigned 64-bit integers")
    return value


def _hex(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a hex string") from None


def _default_home() -> str | None:
    return os.environ.get("RIBE_HOME")


def _home(args) -> Path:
    home = args.home or _default_home()
    if not home:
        raise _Usage("no authority directory: pass --home/--out or set RIBE_HOME")
    return Path(home)


class _Usage(Exception):
    pass


def cmd_init(args) -> int:
    if args.out is None and not _default_home():
        raise _Usage("init needs --out DIR or RIBE_HOME")
    home = Path(args.out or _default_home())
    store, pp, mk = AuthorityStore.create(
        home, args.scheme, args.nmax, prf_seed=args.prf_seed, mock_q=args.mock_q, force=args.force
    )
    dim = pp.vectors[0].n
    depth = (args.nmax - 1).bit_length()
    print(f"authority initialised in {store.home}")
    print(f"scheme: {args.scheme}  engine: {pp.group.name}" + ("  INSECURE-MOCK" if pp.group.insecure else ""))
    print(f"PP elements: {pp.element_count()}")
    print(f"MK elements: {mk.element_count()}")
    print(f"SK elements per node: {dim} ({depth + 1} nodes per user)")
    print(f"KU elements per node: {dim}")
    print(f"CT elements: {dim} source-group + 1 GT")
    print(f"pairings per decryption: {2 * dim}")
    return EXIT_OK


def cmd_register(args) -> int:
    store = AuthorityStore(_home(args))
    path, sk = store.register(args.id, allow_duplicate=args.allow_duplicate, out=args.out)
    print(f"registered {args.id!r} at leaf {sk.leaf}; private key ({len(sk.entries)} nodes) -> {path}")
    print("deliver the key file over an authenticated, confidential channel")
    return EXIT_OK


def cmd_revoke(args) -> int:
    store = AuthorityStore(_home(args))
    leaves = store.revoke(args.id, args.time)
    if not leaves:
        print(f"warning: {args.id!r} holds no leaf; revocation list unchanged", file=sys.stderr)
    else:
        print(f"revoked {args.id!r} (leaves {', '.join(map(str, leaves))}) from epoch {args.time}")
    return EXIT_OK


def cmd_publish(args) -> int:
    store = AuthorityStore(_home(args))
    path, ku = store.publish(args.time)
    print(f"published key update for epoch {ku.time}: nodes {ku.nodes()} -> {path}")
    return EXIT_OK


def cmd_derive_dk(args) -> int:
    sk = read_artifact(args.sk, expect="sk")
    ku = read_artifact(args.ku, expect="ku")
    dk = dec_key_gen(sk, ku)
    if dk is None:
        print(f"revoked: no common node with the epoch-{ku.time} key update", file=sys.stderr)
        return EXIT_REVOKED
    Path(args.out).write_bytes(wire.encode(dk))
    os.chmod(args.out, 0o600)
    print(f"decryption key for epoch {dk.time} (node {dk.node}) -> {args.out}")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    pp = read_artifact(args.pp, expect="pp")
    q = pp.group.q
    payload = Path(args.infile).read_bytes()
    hct = hybrid.seal(
        pp, scheme_module(pp.scheme), id_to_field(args.id, q), epoch_to_field(args.time, q), payload
    )
    Path(args.out).write_bytes(wire.encode(hct))
    print(f"encrypted {len(payload)} bytes for {args.id!r} at epoch {args.time} -> {args.out}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    pp = read_artifact(args.pp, expect="pp")
    dk = read_artifact(args.dk, expect="dk", group=pp.group)
    hct = read_artifact(args.infile, expect="hct", group=pp.group)
    payload = hybrid.open_sealed(pp, dk, hct)
    Path(args.out).write_bytes(payload)
    print(f"decrypted {len(payload)} bytes -> {args.out}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    data = Path(args.file).read_bytes()
    if data[:4] == wire.STATE_MAGIC:
        tree, rl = wire.decode_state(data)
        print(
            f"kind=state depth={tree.depth} n_max={tree.n_max} assigned={len(tree.leaf_assignments)} "
            f"revoked={len(rl.entries)} high_water={rl.high_water_update_time} "
            f"prf={'yes' if tree.prf_seed else 'no'}"
        )
    else:
        wire.peek(data)
        print(wire.header_line(data))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ribe",
        description="Revocable identity-based encryption: key authority, sender and receiver tools.",
        epilog=HYBRID_NOTE,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a key authority")
    p.add_argument("--scheme", choices=["sxdh", "dlin"], default="sxdh")
    p.add_argument("--nmax", type=_positive_int, required=True, help="maximum number of users")
    p.add_argument("--out", help="authority directory (default $RIBE_HOME)")
    p.add_argument("--prf-seed", type=_hex, help="derive node shares from this seed instead of storing them")
    p.add_argument("--mock-q", type=int, help="use the INSECURE exponent-only test engine with this prime")
    p.add_argument("--force", action="store_true", help="overwrite an existing authority")
    p.set_defaults(func=cmd_init)

    def with_home(p):
        p.add_argument("--home", help="authority directory (default $RIBE_HOME)")
        return p

    p = with_home(sub.add_parser("register", help="issue a private key for an identity"))
    p.add_argument("--id", required=True)
    p.add_argument("--out", help="key file (default <home>/keys/sk_<leaf>.bin)")
    p.add_argument("--allow-duplicate", action="store_true", help="permit a second leaf for the same identity")
    p.set_defaults(func=cmd_register)

    p = with_home(sub.add_parser("revoke", help="revoke an identity from an epoch on"))
    p.add_argument("--id", required=True)
    p.add_argument("--time", type=_epoch, required=True)
    p.set_defaults(func=cmd_revoke)

    p = with_home(sub.add_parser("publish-update", help="publish the key update bulletin for an epoch"))
    p.add_argument("--time", type=_epoch, required=True)
    p.set_defaults(func=cmd_publish)

    p = sub.add_parser("derive-dk", help="combine a private key with a key update")
    p.add_argument("--sk", required=True)
    p.add_argument("--ku", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_derive_dk)

    p = sub.add_parser("encrypt", help="encrypt a file to an identity and epoch", epilog=HYBRID_NOTE)
    p.add_argument("--pp", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--time", type=_epoch, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a file with a decryption key", epilog=HYBRID_NOTE)
    p.add_argument("--pp", required=True)
    p.add_argument("--dk", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("inspect", help="print the header of an artifact or state file")
    p.add_argument("file")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (StateCorruptionError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (PolicyError, CapacityError, TimeOrderError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLICY


if __name__ == "__main__":
    sys.exit(main())
