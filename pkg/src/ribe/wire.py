"""Binary encodings for scheme artifacts and authority state.

Artifact container::

    "RIBE" | version u8 | scheme u8 | kind u8 | engine u8 | engine param u32
           | header length u16 | ASCII header line | body

The header line (``scheme=sxdh kind=ku t=42 nodes=3``) is informational and
ignored on decode.  Group elements are written as ``u16 length || canonical
encoding``; scalars as fixed-width big-endian integers of ``ceil(|q| / 8)``
bytes.

State record (tree + revocation list)::

    "RIBT" | version u16 | depth u16 | n_max u32 | flags u8 | ...
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Any

from .algebra import GroupDescription, GroupVector, Side, gen_pairing_groups
from .errors import FormatError
from .revtree import RevocationList, ShareSet, TreeState
from .scheme import (
    SCHEMES,
    Ciphertext,
    DecryptionKey,
    KeyUpdate,
    MasterKey,
    PrivateKey,
    PublicParams,
)

MAGIC = b"RIBE"
STATE_MAGIC = b"RIBT"
VERSION = 1
STATE_VERSION = 1

KIND_PP = 0x01
KIND_MK = 0x02
KIND_SK = 0x03
KIND_KU = 0x04
KIND_CT = 0x05
KIND_DK = 0x06
KIND_HYBRID = 0x07

KIND_NAMES = {
    KIND_PP: "pp", KIND_MK: "mk", KIND_SK: "sk", KIND_KU: "ku",
    KIND_CT: "ct", KIND_DK: "dk", KIND_HYBRID: "hct",
}
SCHEME_BY_ID = {v: k for k, v in SCHEMES.items()}

ENGINE_IDS = {
    "bls12-381": 0x01,
    "bls12-381-symshim": 0x02,
    "mock": 0x81,
    "mock-sym": 0x82,
}
ENGINE_BY_ID = {v: k for k, v in ENGINE_IDS.items()}


@dataclass(frozen=True)
class HybridCiphertext:
    """RIBE ciphertext of a random GT mass plus an AEAD-sealed payload."""

    ct: Ciphertext
    nonce: bytes
    body: bytes


class _Writer:
    def __init__(self, group: GroupDescription | None = None):
        self.group = group
        self.parts: list[bytes] = []

    def raw(self, data: bytes) -> None:
        self.parts.append(data)

    def u8(self, v: int) -> None:
        self.parts.append(struct.pack(">B", v))

    def u16(self, v: int) -> None:
        self.parts.append(struct.pack(">H", v))

    def u32(self, v: int) -> None:
        self.parts.append(struct.pack(">I", v))

    def u64(self, v: int) -> None:
        self.parts.append(struct.pack(">Q", v))

    def blob(self, data: bytes) -> None:
        self.u16(len(data))
        self.parts.append(data)

    def scalar(self, v: int) -> None:
        self.parts.append(v.to_bytes((self.group.q.bit_length() + 7) // 8, "big"))

    def element(self, side: Side, x: Any) -> None:
        self.blob(self.group.encode(side, x))

    def vector(self, v: GroupVector) -> None:
        self.u8(v.n)
        for e in v.elems:
            self.element(v.side, e)

    def node_vectors(self, entries) -> None:
        self.u16(len(entries))
        for node, vec in entries:
            self.u32(node)
            self.vector(vec)

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes, group: GroupDescription | None = None):
        self.data = memoryview(data)
        self.pos = 0
        self.group = group

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError("truncated record")
        out = bytes(self.data[self.pos : self.pos + n])
        self.pos += n
        return out

    def _unpack(self, fmt: str) -> int:
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))[0]

    def u8(self) -> int:
        return self._unpack(">B")

    def u16(self) -> int:
        return self._unpack(">H")

    def u32(self) -> int:
        return self._unpack(">I")

    def u64(self) -> int:
        return self._unpack(">Q")

    def blob(self) -> bytes:
        return self.take(self.u16())

    def scalar(self) -> int:
        v = int.from_bytes(self.take((self.group.q.bit_length() + 7) // 8), "big")
        if v >= self.group.q:
            raise FormatError("scalar is not reduced mod q")
        return v

    def element(self, side: Side) -> Any:
        return self.group.decode(side, self.blob())

    def vector(self, side: Side) -> GroupVector:
        n = self.u8()
        side = self.group.source_side(side)
        return GroupVector(self.group, side, tuple(self.element(side) for _ in range(n)))

    def node_vectors(self, side: Side) -> tuple:
        count = self.u16()
        return tuple((self.u32(), self.vector(side)) for _ in range(count))

    def done(self) -> None:
        if self.pos != len(self.data):
            raise FormatError(f"{len(self.data) - self.pos} trailing bytes")


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


def _kind_of(obj: Any) -> int:
    for cls, kind in (
        (PublicParams, KIND_PP), (MasterKey, KIND_MK), (PrivateKey, KIND_SK),
        (KeyUpdate, KIND_KU), (Ciphertext, KIND_CT), (DecryptionKey, KIND_DK),
        (HybridCiphertext, KIND_HYBRID),
    ):
        if isinstance(obj, cls):
            return kind
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _scheme_of(obj: Any) -> str:
    return obj.ct.scheme if isinstance(obj, HybridCiphertext) else obj.scheme


def describe(obj: Any, group: GroupDescription) -> str:
    """One-line human-readable summary, e.g. ``scheme=sxdh kind=ku t=42 nodes=3``."""
    kind = _kind_of(obj)
    fields = [f"scheme={_scheme_of(obj)}", f"kind={KIND_NAMES[kind]}"]
    if isinstance(obj, KeyUpdate):
        fields += [f"t={obj.time}", f"nodes={len(obj.entries)}"]
    elif isinstance(obj, PrivateKey):
        fields += [f"leaf={obj.leaf}", f"nodes={len(obj.entries)}"]
    elif isinstance(obj, DecryptionKey):
        fields += [f"t={obj.time}", f"node={obj.node}"]
    elif isinstance(obj, (PublicParams, MasterKey)):
        fields.append(f"elements={obj.element_count()}")
    fields.append(f"engine={group.name}")
    if group.insecure:
        fields.append(f"INSECURE-MOCK(q={group.q})")
    return " ".join(fields)


def _write_ct(w: _Writer, ct: Ciphertext) -> None:
    w.element(Side.GT, ct.c)
    w.vector(ct.c0)


def _read_ct(r: _Reader, scheme: str) -> Ciphertext:
    c = r.element(Side.GT)
    return Ciphertext(scheme, c, r.vector(Side.G1))


def _group_of(obj: Any) -> GroupDescription:
    if isinstance(obj, PublicParams):
        return obj.group
    if isinstance(obj, HybridCiphertext):
        return obj.ct.c0.group
    if isinstance(obj, Ciphertext):
        return obj.c0.group
    if isinstance(obj, DecryptionKey):
        return obj.k_id.group
    vectors = obj.vectors if isinstance(obj, MasterKey) else [v for _, v in obj.entries]
    if not vectors:
        raise ValueError("cannot infer the pairing group of an empty artifact; pass group=")
    return vectors[0].group


def encode(obj: Any, group: GroupDescription | None = None) -> bytes:
    """Serialize any scheme artifact into the versioned container."""
    kind = _kind_of(obj)
    group = group or _group_of(obj)
    w = _Writer(group)
    w.raw(MAGIC)
    w.u8(VERSION)
    w.u8(SCHEMES[_scheme_of(obj)])
    w.u8(kind)
    w.u8(ENGINE_IDS[group.name])
    w.u32(group.q if group.insecure else 0)
    w.blob(describe(obj, group).encode("ascii"))

    if kind == KIND_PP:
        w.element(Side.GT, obj.gt_alpha)
        w.u8(len(obj.vectors))
        for v in obj.vectors:
            w.vector(v)
    elif kind == KIND_MK:
        w.scalar(obj.alpha)
        w.u8(len(obj.vectors))
        for v in obj.vectors:
            w.vector(v)
    elif kind == KIND_SK:
        w.u32(obj.leaf)
        w.node_vectors(obj.entries)
    elif kind == KIND_KU:
        w.u64(obj.time)
        w.node_vectors(obj.entries)
    elif kind == KIND_DK:
        w.u32(obj.node)
        w.u64(obj.time)
        w.vector(obj.k_id)
        w.vector(obj.k_t)
    elif kind == KIND_CT:
        _write_ct(w, obj)
    else:
        _write_ct(w, obj.ct)
        w.blob(obj.nonce)
        w.u32(len(obj.body))
        w.raw(obj.body)
    return w.getvalue()


def _group_from_header(engine_id: int, param: int) -> GroupDescription:
    name = ENGINE_BY_ID.get(engine_id)
    if name is None:
        raise FormatError(f"unknown engine id 0x{engine_id:02x}")
    symmetric = name.endswith("sym") or name.endswith("symshim")
    if name.startswith("mock"):
        try:
            return gen_pairing_groups("mock", q=param, symmetric=symmetric)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    return gen_pairing_groups("production", symmetric=symmetric)


def peek(data: bytes) -> tuple[str, str, GroupDescription]:
    """Return ``(scheme, kind, group)`` from a container header."""
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise FormatError("not a RIBE artifact (bad magic)")
    version = r.u8()
    if version != VERSION:
        raise FormatError(f"unsupported artifact version {version}")
    scheme = SCHEME_BY_ID.get(r.u8())
    kind = KIND_NAMES.get(r.u8())
    if scheme is None or kind is None:
        raise FormatError("unknown scheme or artifact kind")
    group = _group_from_header(r.u8(), r.u32())
    return scheme, kind, group


def header_line(data: bytes) -> str:
    r = _Reader(data)
    r.take(4 + 1 + 1 + 1 + 1 + 4)
    return r.blob().decode("ascii", errors="replace")


def decode(data: bytes, group: GroupDescription | None = None, expect: str | None = None) -> Any:
    """Inverse of :func:`encode`.

    ``group`` (if given) must match the engine recorded in the header and is
    reused so that pairing counters stay attached to the caller's context.
    ``expect`` restricts the artifact kind (``"pp"``, ``"ku"``, ...).
    """
    scheme, kind_name, header_group = peek(data)
    if group is None:
        group = header_group
    elif group != header_group:
        raise FormatError(f"artifact was made with {header_group.name}, not {group.name}")
    if expect is not None and kind_name != expect:
        raise FormatError(f"expected a {expect} artifact, found {kind_name}")
    r = _Reader(data, group)
    r.take(4 + 1 + 1 + 1 + 1 + 4)
    r.blob()

    if kind_name == "pp":
        gt_alpha = r.element(Side.GT)
        vectors = tuple(r.vector(Side.G1) for _ in range(r.u8()))
        obj: Any = PublicParams(scheme, group, gt_alpha, vectors)
    elif kind_name == "mk":
        alpha = r.scalar()
        vectors = tuple(r.vector(Side.G2) for _ in range(r.u8()))
        obj = MasterKey(scheme, alpha, vectors)
    elif kind_name == "sk":
        leaf = r.u32()
        obj = PrivateKey(scheme, leaf, r.node_vectors(Side.G2))
    elif kind_name == "ku":
        t = r.u64()
        obj = KeyUpdate(scheme, t, r.node_vectors(Side.G2))
    elif kind_name == "dk":
        node = r.u32()
        t = r.u64()
        obj = DecryptionKey(scheme, node, t, r.vector(Side.G2), r.vector(Side.G2))
    elif kind_name == "ct":
        obj = _read_ct(r, scheme)
    else:
        ct = _read_ct(r, scheme)
        nonce = r.blob()
        obj = HybridCiphertext(ct, nonce, r.take(r.u32()))
    r.done()
    return obj


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

_FLAG_PRF = 0x01


def _int_blob(v: int) -> bytes:
    return v.to_bytes((v.bit_length() + 7) // 8 or 1, "big")


def encode_state(tree: TreeState, rl: RevocationList) -> bytes:
    """Serialize tree and revocation list; PRF-derived shares are not stored."""
    w = _Writer()
    w.raw(STATE_MAGIC)
    w.u16(STATE_VERSION)
    w.u16(tree.depth)
    w.u32(tree.n_max)
    w.u8(_FLAG_PRF if tree.prf_seed is not None else 0)
    w.blob(tree.prf_seed or b"")

    w.u32(len(tree.leaf_assignments))
    for leaf in sorted(tree.leaf_assignments):
        w.u32(leaf)
        w.blob(_int_blob(tree.leaf_assignments[leaf]))

    shares = {} if tree.prf_seed is not None else tree.node_shares
    w.u32(len(shares))
    for node in sorted(shares):
        s = shares[node]
        w.u32(node)
        w.blob(_int_blob(s.alpha1))
        w.blob(_int_blob(s.alpha2))
        w.u8(s.alpha3 is not None)
        if s.alpha3 is not None:
            w.blob(_int_blob(s.alpha3))

    w.u32(len(rl.entries))
    for leaf, t in sorted(rl.entries):
        w.u32(leaf)
        w.u64(t)
    for mark in (rl.high_water_update_time, rl.last_query_time):
        w.u8(mark is not None)
        w.u64(mark or 0)
    return w.getvalue()


def decode_state(data: bytes) -> tuple[TreeState, RevocationList]:
    r = _Reader(data)
    if r.take(4) != STATE_MAGIC:
        raise FormatError("not a RIBE state record (bad magic)")
    version = r.u16()
    if version != STATE_VERSION:
        raise FormatError(f"unsupported state version {version}")
    depth = r.u16()
    n_max = r.u32()
    if n_max < 1 or (n_max - 1).bit_length() != depth:
        raise FormatError("inconsistent tree dimensions")
    flags = r.u8()
    seed = r.blob()
    tree = TreeState(depth=depth, n_max=n_max, prf_seed=seed if flags & _FLAG_PRF else None)

    for _ in range(r.u32()):
        leaf = r.u32()
        if leaf not in tree.usable_leaves():
            raise FormatError(f"assignment to invalid leaf {leaf}")
        tree.leaf_assignments[leaf] = int.from_bytes(r.blob(), "big")

    for _ in range(r.u32()):
        node = r.u32()
        if not tree.contains(node):
            raise FormatError(f"share for invalid node {node}")
        a1 = int.from_bytes(r.blob(), "big")
        a2 = int.from_bytes(r.blob(), "big")
        a3 = int.from_bytes(r.blob(), "big") if r.u8() else None
        tree.node_shares[node] = ShareSet(a1, a2, a3)

    rl = RevocationList()
    for _ in range(r.u32()):
        leaf = r.u32()
        if not tree.is_leaf(leaf):
            raise FormatError(f"revocation of invalid leaf {leaf}")
        rl.entries.add((leaf, r.u64()))
    marks = []
    for _ in range(2):
        present = r.u8()
        value = r.u64()
        marks.append(value if present else None)
    rl.high_water_update_time, rl.last_query_time = marks
    r.done()
    return tree, rl
