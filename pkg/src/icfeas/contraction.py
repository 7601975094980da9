"""Contraction of alignment edges and lifting codes back to the original problem."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Mapping

from .code import PrecodingAssignment
from .errors import EndpointsInConflict, IndexMismatch, NotAlignmentEdge
from .model import Pair, Problem, Receiver, pair
from .structure import alignment_graph


@dataclass(frozen=True)
class ContractionMap:
    """``forward[k - 1]`` is the contracted vertex of original message ``k``.

    ``history`` lists the merged pairs in the labels current at each step.
    """

    forward: tuple[int, ...]
    history: tuple[Pair, ...]
    source_n: int
    target_n: int

    @classmethod
    def identity(cls, n: int) -> ContractionMap:
        return cls(tuple(range(1, n + 1)), (), n, n)

    def __call__(self, k: int) -> int:
        return self.forward[k - 1]

    def then(self, other: ContractionMap) -> ContractionMap:
        """Apply ``self`` and then ``other``."""
        if other.source_n != self.target_n:
            raise IndexMismatch(f"cannot chain a map onto {other.source_n} messages after one onto {self.target_n}")
        return ContractionMap(
            tuple(other(v) for v in self.forward),
            self.history + other.history,
            self.source_n,
            other.target_n,
        )

    def fibers(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, v in enumerate(self.forward, start=1):
            out.setdefault(v, []).append(k)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "forward": list(self.forward),
            "history": [list(h) for h in self.history],
            "source_n": self.source_n,
            "target_n": self.target_n,
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> ContractionMap:
        fwd = tuple(int(v) for v in raw["forward"])
        hist = tuple(pair(int(a), int(b)) for a, b in raw["history"])
        return cls(fwd, hist, len(fwd), int(raw.get("target_n", len(fwd) - len(hist))))


def contractible_edges(p: Problem) -> list[Pair]:
    """Alignment edges whose endpoints are not in conflict, ascending."""
    return sorted(e for e in alignment_graph(p).edges if e not in p.conflicts)


def contract_edge(p: Problem, a: int, b: int) -> tuple[Problem, ContractionMap]:
    """Merge ``a`` and ``b`` into the smaller label; labels above the larger shift down by one."""
    lo, hi = pair(a, b)
    if (lo, hi) not in alignment_graph(p).edges:
        raise NotAlignmentEdge(f"({lo},{hi}) is not an alignment edge")
    if (lo, hi) in p.conflicts:
        raise EndpointsInConflict(f"messages {lo} and {hi} are in conflict")

    def f(m: int) -> int:
        if m == hi:
            return lo
        return m - 1 if m > hi else m

    recs = []
    for r in p.receivers:
        d = frozenset(map(f, r.demands))
        s = {f(m) for m in r.side_info if m not in (lo, hi)}
        if lo in r.side_info and hi in r.side_info:
            s.add(lo)
        recs.append(Receiver(r.id, d, frozenset(s)))
    cm = ContractionMap(tuple(f(m) for m in p.messages), ((lo, hi),), p.n, p.n - 1)
    return Problem(p.n - 1, tuple(recs), p.field_hint), cm


def _chooser(policy: str):
    if policy == "lex":
        return lambda edges: edges[0]
    if policy.startswith("random:"):
        rng = random.Random(int(policy.split(":", 1)[1]))
        return lambda edges: edges[rng.randrange(len(edges))]
    raise ValueError(f"unknown contraction policy {policy!r}; use 'lex' or 'random:<seed>'")


def maximal_contraction(p: Problem, policy: str = "lex") -> tuple[Problem, ContractionMap]:
    """Contract until every alignment edge joins conflicting messages."""
    choose = _chooser(policy)
    cm = ContractionMap.identity(p.n)
    cur = p
    while True:
        edges = contractible_edges(cur)
        if not edges:
            return cur, cm
        cur, step = contract_edge(cur, *choose(edges))
        cm = cm.then(step)


def lift_code(code: PrecodingAssignment, cm: ContractionMap) -> PrecodingAssignment:
    """Give every original message the vector of its contracted vertex."""
    if set(code.vectors) != set(range(1, cm.target_n + 1)):
        raise IndexMismatch(f"code covers {sorted(code.vectors)}, expected messages 1..{cm.target_n}")
    return PrecodingAssignment(code.L, code.field, {k: code[cm(k)] for k in range(1, cm.source_n + 1)})
