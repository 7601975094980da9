"""Prime-field scalars, short vectors and subspaces.

Vectors have length 1..4 and live over GF(q) for a prime q.  Subspaces are
stored by their reduced row echelon basis so that two equal subspaces compare
equal structurally.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .errors import DimensionMismatch, ZeroSubspace

MAX_L = 4
MAX_Q = 2**31 - 1


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or not 2 <= self.q <= MAX_Q or not is_prime(self.q):
            raise ValueError(f"field order must be a prime in [2, 2^31-1], got {self.q!r}")

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.q - 2, self.q)

    def __str__(self) -> str:
        return f"GF({self.q})"


@dataclass(frozen=True)
class FVector:
    coords: tuple[int, ...]
    field: Field

    def __post_init__(self) -> None:
        if not 1 <= len(self.coords) <= MAX_L:
            raise DimensionMismatch(f"vector length must be 1..{MAX_L}, got {len(self.coords)}")
        q = self.field.q
        object.__setattr__(self, "coords", tuple(int(c) % q for c in self.coords))

    @property
    def L(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: FVector) -> FVector:
        _check_same(self, other)
        return FVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.field)

    def scale(self, c: int) -> FVector:
        return FVector(tuple(c * a for a in self.coords), self.field)

    def __iter__(self):
        return iter(self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + f") over {self.field}"


@dataclass(frozen=True)
class Subspace:
    basis: tuple[FVector, ...]
    L: int
    field: Field = dc_field(compare=True)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v: FVector) -> bool:
        return in_span(v, self)

    def __str__(self) -> str:
        rows = ", ".join("(" + ",".join(map(str, b.coords)) + ")" for b in self.basis)
        return f"span{{{rows}}} over {self.field}"


def vec(coords: Sequence[int], q: int | Field) -> FVector:
    """Shorthand constructor: ``vec((1, 0, 1), 2)``."""
    f = q if isinstance(q, Field) else Field(q)
    return FVector(tuple(coords), f)


def _check_same(a: FVector, b: FVector) -> None:
    if a.L != b.L or a.field != b.field:
        raise DimensionMismatch(f"cannot combine {a} with {b}")


def rref_rows(rows: Iterable[Sequence[int]], q: int, ncols: int) -> list[list[int]]:
    """Reduced row echelon form of integer rows mod q; zero rows dropped."""
    m = [[c % q for c in r] for r in rows]
    out: list[list[int]] = []
    col = 0
    while m and col < ncols:
        piv = next((r for r in m if r[col]), None)
        if piv is None:
            col += 1
            continue
        m.remove(piv)
        inv = pow(piv[col], q - 2, q)
        piv = [(x * inv) % q for x in piv]
        for r in m + out:
            f = r[col]
            if f:
                for i in range(ncols):
                    r[i] = (r[i] - f * piv[i]) % q
        out.append(piv)
        m = [r for r in m if any(r)]
        col += 1
    out.sort(key=lambda r: next(i for i, x in enumerate(r) if x))
    return out


def _resolve_shape(vectors: Sequence[FVector], L: int | None, field: Field | None) -> tuple[int, Field]:
    if vectors:
        L0, f0 = vectors[0].L, vectors[0].field
        for v in vectors[1:]:
            if v.L != L0 or v.field != f0:
                raise DimensionMismatch("all vectors must share length and field")
        if (L is not None and L != L0) or (field is not None and field != f0):
            raise DimensionMismatch("explicit L/field disagree with the vectors")
        return L0, f0
    if L is None or field is None:
        raise DimensionMismatch("empty input needs explicit L and field")
    return L, field


def span_of(vectors: Sequence[FVector], L: int | None = None, field: Field | None = None) -> Subspace:
    """Canonical subspace spanned by ``vectors``; empty input gives the zero subspace."""
    vectors = list(vectors)
    L, field = _resolve_shape(vectors, L, field)
    rows = rref_rows((v.coords for v in vectors), field.q, L)
    return Subspace(tuple(FVector(tuple(r), field) for r in rows), L, field)


def rank(vectors: Sequence[FVector], L: int | None = None, field: Field | None = None) -> int:
    return span_of(vectors, L, field).dim


def in_span(v: FVector, s: Subspace) -> bool:
    if v.L != s.L or v.field != s.field:
        raise DimensionMismatch(f"{v} is not in the ambient space of {s}")
    if v.is_zero():
        return True
    q = s.field.q
    r = list(v.coords)
    for b in s.basis:
        p = next(i for i, x in enumerate(b.coords) if x)
        f = r[p]
        if f:
            r = [(x - f * y) % q for x, y in zip(r, b.coords)]
    return not any(r)


def join(a: Subspace, b: Subspace) -> Subspace:
    """Sum of two subspaces."""
    if a.L != b.L or a.field != b.field:
        raise DimensionMismatch("subspaces live in different spaces")
    return span_of(list(a.basis) + list(b.basis), a.L, a.field)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the Zassenhaus construction."""
    if a.L != b.L or a.field != b.field:
        raise DimensionMismatch("subspaces live in different spaces")
    L, q = a.L, a.field.q
    rows = [list(v.coords) + list(v.coords) for v in a.basis]
    rows += [list(v.coords) + [0] * L for v in b.basis]
    red = rref_rows(rows, q, 2 * L)
    inter = [r[L:] for r in red if not any(r[:L])]
    return span_of([FVector(tuple(r), a.field) for r in inter], L, a.field)


def full_space(L: int, field: Field) -> Subspace:
    return span_of([FVector(tuple(int(i == j) for j in range(L)), field) for i in range(L)])


def sample_nonzero(s: Subspace, rng: random.Random) -> FVector:
    """Uniform nonzero vector of ``s``.  Deterministic for a given rng state."""
    if s.dim == 0:
        raise ZeroSubspace("the zero subspace has no nonzero vector")
    q = s.field.q
    while True:
        coeffs = [rng.randrange(q) for _ in range(s.dim)]
        if any(coeffs):
            break
    out = [0] * s.L
    for c, b in zip(coeffs, s.basis):
        for i, x in enumerate(b.coords):
            out[i] += c * x
    return FVector(tuple(out), s.field)


def random_vector(L: int, field: Field, rng: random.Random) -> FVector:
    """Uniform nonzero vector of the whole space GF(q)^L."""
    return sample_nonzero(full_space(L, field), rng)


def random_plane(L: int, field: Field, rng: random.Random, through: FVector | None = None) -> Subspace:
    """Random 2-dimensional subspace, optionally containing a given nonzero vector."""
    first = through if through is not None else random_vector(L, field, rng)
    while True:
        second = random_vector(L, field, rng)
        s = span_of([first, second])
        if s.dim == 2:
            return s
