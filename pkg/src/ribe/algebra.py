"""Pairing groups, exponent vectors and dual orthonormal bases.

Two engines sit behind :class:`GroupDescription`:

* ``production`` -- BLS12-381 through RELIC (``petrelic``), a type-3 pairing
  at roughly 128-bit security.  With ``symmetric=True`` every source-group
  element is carried as the pair ``(g1^x, g2^x)`` so that ``e(g^a, g^b)``
  is defined for any two elements, which is all the 9-dimensional scheme
  needs from a symmetric pairing.
* ``mock`` -- an exponent-only engine where G1, G2 and GT are ``Z_q``
  written additively and the pairing is field multiplication.  It is
  insecure by construction and exists so that every exponent identity can
  be recomputed by hand with :meth:`GroupDescription.dlog`.

Randomness is always passed in explicitly.  Any object exposing
``randrange(n)`` works: ``random.Random(seed)`` for reproducible tests,
``secrets.SystemRandom()`` (the default) otherwise.
"""

from __future__ import annotations

import enum
import secrets
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

from .errors import FormatError, RibeError

MAX_BASIS_RETRIES = 100
MOCK_Q_LIMIT = 2**31


class Side(str, enum.Enum):
    G1 = "G1"
    G2 = "G2"
    GT = "GT"


def default_rng() -> secrets.SystemRandom:
    return secrets.SystemRandom()


def is_prime(n: int) -> bool:
    """Trial division; only ever used for mock moduli below 2^31."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MockElement:
    side: Side
    value: int


class _MockBackend:
    insecure = True

    def __init__(self, q: int, symmetric: bool):
        self.q = q
        self.symmetric = symmetric
        self.name = "mock-sym" if symmetric else "mock"
        g1 = 2 if q > 2 else 1
        g2 = g1 if symmetric else (3 if q > 3 else 1)
        self._gen = {Side.G1: g1, Side.G2: g2, Side.GT: g1 * g2 % q}

    def generator(self, side: Side) -> MockElement:
        return MockElement(side, self._gen[side])

    def identity(self, side: Side) -> MockElement:
        return MockElement(side, 0)

    def exp(self, x: MockElement, k: int) -> MockElement:
        return MockElement(x.side, x.value * k % self.q)

    def mul(self, x: MockElement, y: MockElement) -> MockElement:
        if x.side != y.side:
            raise ValueError(f"cannot combine {x.side.value} and {y.side.value} elements")
        return MockElement(x.side, (x.value + y.value) % self.q)

    def inverse(self, x: MockElement) -> MockElement:
        return MockElement(x.side, -x.value % self.q)

    def pair(self, x: MockElement, y: MockElement) -> MockElement:
        return MockElement(Side.GT, x.value * y.value % self.q)

    def is_identity(self, side: Side, x: MockElement) -> bool:
        return x.value == 0

    def encode(self, side: Side, x: MockElement) -> bytes:
        return x.value.to_bytes(8, "little")

    def decode(self, side: Side, data: bytes) -> MockElement:
        if len(data) != 8:
            raise FormatError(f"mock element must be 8 bytes, got {len(data)}")
        value = int.from_bytes(data, "little")
        if value >= self.q:
            raise FormatError("mock element is not reduced mod q")
        return MockElement(side, value)

    def dlog(self, side: Side, x: MockElement) -> int:
        return x.value * pow(self._gen[side], -1, self.q) % self.q


class _Bls12Backend:
    name = "bls12-381"
    insecure = False
    symmetric = False

    def __init__(self):
        from petrelic.multiplicative import pairing

        self._mod = pairing
        self.q = int(pairing.G1.order())
        self._classes = {
            Side.G1: pairing.G1Element,
            Side.G2: pairing.G2Element,
            Side.GT: pairing.GTElement,
        }
        self._gens = {
            Side.G1: pairing.G1.generator(),
            Side.G2: pairing.G2.generator(),
        }
        self._gens[Side.GT] = self._gens[Side.G1].pair(self._gens[Side.G2])

    def generator(self, side: Side) -> Any:
        return self._gens[side]

    def identity(self, side: Side) -> Any:
        if side is Side.GT:
            return self._mod.GT.unity()
        return (self._mod.G1 if side is Side.G1 else self._mod.G2).neutral_element()

    def exp(self, x: Any, k: int) -> Any:
        return x**k

    def mul(self, x: Any, y: Any) -> Any:
        return x * y

    def inverse(self, x: Any) -> Any:
        return x.inverse()

    def pair(self, x: Any, y: Any) -> Any:
        return x.pair(y)

    def is_identity(self, side: Side, x: Any) -> bool:
        return x.is_unity() if side is Side.GT else x.is_neutral_element()

    def encode(self, side: Side, x: Any) -> bytes:
        return x.to_binary()

    def decode(self, side: Side, data: bytes) -> Any:
        try:
            x = self._classes[side].from_binary(data)
        except Exception as exc:  # petrelic raises bare exceptions on bad points
            raise FormatError(f"invalid {side.value} encoding: {exc}") from exc
        if not x.is_valid():
            raise FormatError(f"{side.value} element is not in the prime-order subgroup")
        return x


class _SymmetricShim:
    """Symmetric pairing realised on a type-3 curve.

    A source element ``g^x`` is the tuple ``(g1^x, g2^x)`` and
    ``e(g^a, g^b) := e(g1^a, g2^b)``.  Only the canonical side G1 is used.
    """

    insecure = False
    symmetric = True

    def __init__(self, base: _Bls12Backend):
        self.base = base
        self.q = base.q
        self.name = base.name + "-symshim"

    def generator(self, side: Side) -> Any:
        if side is Side.GT:
            return self.base.generator(Side.GT)
        return (self.base.generator(Side.G1), self.base.generator(Side.G2))

    def identity(self, side: Side) -> Any:
        if side is Side.GT:
            return self.base.identity(Side.GT)
        return (self.base.identity(Side.G1), self.base.identity(Side.G2))

    def exp(self, x: Any, k: int) -> Any:
        if isinstance(x, tuple):
            return (x[0] ** k, x[1] ** k)
        return x**k

    def mul(self, x: Any, y: Any) -> Any:
        if isinstance(x, tuple):
            return (x[0] * y[0], x[1] * y[1])
        return x * y

    def inverse(self, x: Any) -> Any:
        if isinstance(x, tuple):
            return (x[0].inverse(), x[1].inverse())
        return x.inverse()

    def pair(self, x: Any, y: Any) -> Any:
        return x[0].pair(y[1])

    def is_identity(self, side: Side, x: Any) -> bool:
        if side is Side.GT:
            return self.base.is_identity(Side.GT, x)
        return x[0].is_neutral_element() and x[1].is_neutral_element()

    def encode(self, side: Side, x: Any) -> bytes:
        if side is Side.GT:
            return self.base.encode(Side.GT, x)
        a = self.base.encode(Side.G1, x[0])
        return bytes([len(a)]) + a + self.base.encode(Side.G2, x[1])

    def decode(self, side: Side, data: bytes) -> Any:
        if side is Side.GT:
            return self.base.decode(Side.GT, data)
        if not data or data[0] + 1 > len(data):
            raise FormatError("truncated symmetric element")
        n = data[0]
        a = self.base.decode(Side.G1, data[1 : 1 + n])
        b = self.base.decode(Side.G2, data[1 + n :])
        g1, g2 = self.base.generator(Side.G1), self.base.generator(Side.G2)
        if a.pair(g2) != g1.pair(b):
            raise FormatError("symmetric element carriers disagree")
        return (a, b)


@lru_cache(maxsize=1)
def _bls12_backend() -> _Bls12Backend:
    return _Bls12Backend()


# ---------------------------------------------------------------------------
# Group description
# ---------------------------------------------------------------------------


class GroupDescription:
    """The pairing context ``(q, G1, G2, GT, g1, g2, e)``.

    ``pairing_count`` counts every single pairing evaluated through
    :meth:`pair`; tests read it to check per-operation pairing budgets.
    """

    def __init__(self, backend: Any):
        self._backend = backend
        self.q: int = backend.q
        self.name: str = backend.name
        self.symmetric: bool = backend.symmetric
        self.insecure: bool = backend.insecure
        self.g1 = backend.generator(Side.G1)
        self.g2 = backend.generator(self.source_side(Side.G2))
        self.gt = backend.generator(Side.GT)
        self.pairing_count = 0

    def __repr__(self) -> str:
        flag = " INSECURE-MOCK" if self.insecure else ""
        return f"<GroupDescription {self.name} q={self.q}{flag}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupDescription):
            return NotImplemented
        return (self.name, self.q) == (other.name, other.q)

    def __hash__(self) -> int:
        return hash((self.name, self.q))

    def source_side(self, side: Side) -> Side:
        """Symmetric groups keep every source element on G1."""
        if self.symmetric and side is Side.G2:
            return Side.G1
        return side

    def generator(self, side: Side) -> Any:
        return self._backend.generator(self.source_side(side))

    def identity(self, side: Side) -> Any:
        return self._backend.identity(self.source_side(side))

    def is_identity(self, side: Side, x: Any) -> bool:
        return self._backend.is_identity(self.source_side(side), x)

    def exp(self, x: Any, k: int) -> Any:
        return self._backend.exp(x, k % self.q)

    def mul(self, x: Any, y: Any) -> Any:
        return self._backend.mul(x, y)

    def div(self, x: Any, y: Any) -> Any:
        return self._backend.mul(x, self._backend.inverse(y))

    def pair(self, x: Any, y: Any) -> Any:
        self.pairing_count += 1
        return self._backend.pair(x, y)

    def encode(self, side: Side, x: Any) -> bytes:
        return self._backend.encode(self.source_side(side), x)

    def decode(self, side: Side, data: bytes) -> Any:
        return self._backend.decode(self.source_side(side), data)

    def random_scalar(self, rng: Any, nonzero: bool = False) -> int:
        if nonzero:
            return 1 + rng.randrange(self.q - 1)
        return rng.randrange(self.q)

    def random_gt(self, rng: Any) -> Any:
        return self.exp(self.gt, self.random_scalar(rng))

    def dlog(self, side: Side, x: Any) -> int:
        """Discrete log w.r.t. the side's generator (``e(g1, g2)`` for GT); mock only."""
        if not isinstance(self._backend, _MockBackend):
            raise TypeError("discrete logs are only available on the mock engine")
        return self._backend.dlog(self.source_side(side), x)


def gen_pairing_groups(
    profile: str = "production", *, q: int | None = None, symmetric: bool = False
) -> GroupDescription:
    """Build a pairing context.

    ``profile`` is ``"production"`` (BLS12-381) or ``"mock"``; the mock
    profile needs a prime ``q < 2^31``.
    """
    if profile == "production":
        base = _bls12_backend()
        return GroupDescription(_SymmetricShim(base) if symmetric else base)
    if profile == "mock":
        if q is None or not is_prime(q) or q >= MOCK_Q_LIMIT:
            raise ValueError(f"mock profile needs a prime modulus below 2^31, got {q!r}")
        return GroupDescription(_MockBackend(q, symmetric))
    raise ValueError(f"unsupported pairing profile {profile!r}")


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentVector:
    """An element of ``Z_q^n``; coordinates are reduced on construction."""

    coords: tuple[int, ...]
    q: int

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) % self.q for c in self.coords))

    @classmethod
    def zeros(cls, n: int, q: int) -> ExponentVector:
        return cls((0,) * n, q)

    @property
    def n(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i: int) -> int:
        return self.coords[i]

    def _check(self, other: ExponentVector) -> None:
        if self.q != other.q or self.n != other.n:
            raise ValueError("exponent vectors differ in modulus or dimension")

    def __add__(self, other: ExponentVector) -> ExponentVector:
        self._check(other)
        return ExponentVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.q)

    def __sub__(self, other: ExponentVector) -> ExponentVector:
        self._check(other)
        return ExponentVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.q)

    def __neg__(self) -> ExponentVector:
        return ExponentVector(tuple(-a for a in self.coords), self.q)

    def __mul__(self, k: int) -> ExponentVector:
        return ExponentVector(tuple(a * k for a in self.coords), self.q)

    __rmul__ = __mul__

    def dot(self, other: ExponentVector) -> int:
        self._check(other)
        return sum(a * b for a, b in zip(self.coords, other.coords)) % self.q


@dataclass(frozen=True)
class GroupVector:
    """``g_side^v`` for some exponent vector ``v``, held as group elements."""

    group: GroupDescription = field(compare=False, repr=False)
    side: Side
    elems: tuple

    @property
    def n(self) -> int:
        return len(self.elems)

    def __len__(self) -> int:
        return len(self.elems)


def vec_exp(group: GroupDescription, side: Side, v: ExponentVector | Sequence[int]) -> GroupVector:
    """Component-wise exponentiation of the side's generator."""
    coords = v.coords if isinstance(v, ExponentVector) else tuple(v)
    if not coords:
        raise ValueError("vector dimension must be at least 1")
    side = group.source_side(side)
    gen = group.generator(side)
    return GroupVector(group, side, tuple(group.exp(gen, c) for c in coords))


def vec_pow(x: GroupVector, k: int) -> GroupVector:
    """Raise every component to ``k``: ``(g^v)^k = g^{k v}``."""
    return GroupVector(x.group, x.side, tuple(x.group.exp(e, k) for e in x.elems))


def vec_mul(x: GroupVector, y: GroupVector) -> GroupVector:
    """Component-wise group operation, i.e. exponent addition."""
    if x.side != y.side:
        raise ValueError(f"side mismatch: {x.side.value} vs {y.side.value}")
    if x.n != y.n:
        raise ValueError(f"dimension mismatch: {x.n} vs {y.n}")
    g = x.group
    return GroupVector(g, x.side, tuple(g.mul(a, b) for a, b in zip(x.elems, y.elems)))


def vec_combine(terms: Iterable[tuple[GroupVector, int]]) -> GroupVector:
    """``prod_i x_i^{k_i}`` for group vectors sharing a side and dimension."""
    out = None
    for x, k in terms:
        term = vec_pow(x, k)
        out = term if out is None else vec_mul(out, term)
    if out is None:
        raise ValueError("vec_combine needs at least one term")
    return out


def vec_pair(x: GroupVector, y: GroupVector) -> Any:
    """``e(g1^v, g2^w) = prod_i e(g1^{v_i}, g2^{w_i}) = e(g1, g2)^{v.w}``.

    Executes exactly ``n`` pairings.
    """
    g = x.group
    if x.n != y.n:
        raise ValueError(f"dimension mismatch: {x.n} vs {y.n}")
    if not g.symmetric and (x.side is not Side.G1 or y.side is not Side.G2):
        raise ValueError("vec_pair expects a G1 vector on the left and a G2 vector on the right")
    if Side.GT in (x.side, y.side):
        raise ValueError("cannot pair target-group elements")
    acc = g.identity(Side.GT)
    for a, b in zip(x.elems, y.elems):
        acc = g.mul(acc, g.pair(a, b))
    return acc


# ---------------------------------------------------------------------------
# Dual orthonormal bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualBases:
    """Bases ``D = (d_1..d_n)`` and ``D* = (d_1*..d_n*)`` with ``d_i . d_j* = psi * [i == j]``."""

    dim: int
    D: tuple[ExponentVector, ...]
    Dstar: tuple[ExponentVector, ...]
    psi: int

    def inner_products(self) -> list[list[int]]:
        return [[d.dot(ds) for ds in self.Dstar] for d in self.D]


def inverse_mod(matrix: Sequence[Sequence[int]], q: int) -> list[list[int]] | None:
    """Gauss-Jordan inverse over ``Z_q``; ``None`` when singular."""
    n = len(matrix)
    aug = [[c % q for c in row] + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = pow(aug[col][col], -1, q)
        aug[col] = [c * inv % q for c in aug[col]]
        for r in range(n):
            f = aug[r][col]
            if r != col and f:
                aug[r] = [(a - f * b) % q for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def sample_dual_bases(group: GroupDescription, n: int, rng: Any = None) -> DualBases:
    """Random dual orthonormal bases of ``Z_q^n``.

    ``D`` is a uniformly random invertible matrix and ``D* = psi * (D^-1)^T``
    for a random nonzero ``psi``.
    """
    if n < 1:
        raise ValueError("basis dimension must be at least 1")
    rng = rng or default_rng()
    q = group.q
    for _ in range(MAX_BASIS_RETRIES):
        b = [[rng.randrange(q) for _ in range(n)] for _ in range(n)]
        b_inv = inverse_mod(b, q)
        if b_inv is not None:
            break
    else:
        raise RibeError(f"no invertible {n}x{n} matrix after {MAX_BASIS_RETRIES} draws")
    psi = group.random_scalar(rng, nonzero=True)
    D = tuple(ExponentVector(tuple(row), q) for row in b)
    Dstar = tuple(
        ExponentVector(tuple(psi * b_inv[k][i] for k in range(n)), q) for i in range(n)
    )
    return DualBases(n, D, Dstar, psi)
