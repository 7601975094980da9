"""Scalar linear codes as precoding-vector assignments, and their verification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from . import gf
from .errors import CoverageError, DimensionMismatch
from .model import Problem


@dataclass(frozen=True)
class PrecodingAssignment:
    L: int
    field: gf.Field
    vectors: Mapping[int, gf.FVector]

    def __post_init__(self) -> None:
        for m, v in self.vectors.items():
            if v.L != self.L or v.field != self.field:
                raise DimensionMismatch(f"vector of message {m} is {v}, expected length {self.L} over {self.field}")

    def __getitem__(self, m: int) -> gf.FVector:
        return self.vectors[m]

    def to_dict(self) -> dict[str, Any]:
        return {
            "L": self.L,
            "q": self.field.q,
            "vectors": {str(m): list(self.vectors[m].coords) for m in sorted(self.vectors)},
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> PrecodingAssignment:
        f = gf.Field(int(raw["q"]))
        L = int(raw["L"])
        return cls(L, f, {int(m): gf.FVector(tuple(c), f) for m, c in raw["vectors"].items()})

    @classmethod
    def from_coords(cls, coords: Mapping[int, tuple[int, ...]], q: int) -> PrecodingAssignment:
        f = gf.Field(q)
        vecs = {m: gf.FVector(tuple(c), f) for m, c in coords.items()}
        L = len(next(iter(coords.values())))
        return cls(L, f, vecs)


@dataclass(frozen=True)
class Violation:
    receiver: int
    demand: int
    interference: tuple[int, ...]

    def __str__(self) -> str:
        return f"receiver {self.receiver}: V_{self.demand} lies in the span of {list(self.interference)}"


def verify_code(p: Problem, code: PrecodingAssignment) -> list[Violation]:
    """Every unresolved conflict ``V_k in span(V(Interf_k(j)))``; empty means decodable."""
    missing = [m for m in p.messages if m not in code.vectors]
    if missing:
        raise CoverageError(f"no vector for messages {missing}")
    out = []
    for h in p.hyperedges:
        span = gf.span_of([code[m] for m in sorted(h.interference)], code.L, code.field)
        if gf.in_span(code[h.demand], span):
            out.append(Violation(h.receiver, h.demand, tuple(sorted(h.interference))))
    return out
