"""Groupcast index coding problems: receivers, interfering sets, conflicts.

Messages are labelled ``1..n`` in the public API, as in instance files.
Receiver ids are labels too; :func:`build_problem` numbers them ``1..T`` in
input order and :func:`restrict` keeps the original ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Mapping, NamedTuple

from .errors import EmptySubset, InvariantError, SchemaError

Pair = tuple[int, int]


def pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Receiver:
    id: int
    demands: frozenset[int]
    side_info: frozenset[int]

    def __post_init__(self) -> None:
        if not self.demands:
            raise InvariantError(f"receiver {self.id} has an empty demand set")
        both = self.demands & self.side_info
        if both:
            raise InvariantError(f"receiver {self.id} demands side-information messages {sorted(both)}")


@dataclass(frozen=True)
class ConflictHyperedge:
    """Demand ``k`` at ``receiver`` together with its interfering set."""

    demand: int
    interference: frozenset[int]
    receiver: int


@dataclass(frozen=True)
class Problem:
    n: int
    receivers: tuple[Receiver, ...]
    field_hint: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvariantError("a problem needs at least one message")
        seen = set()
        for r in self.receivers:
            if r.id in seen:
                raise InvariantError(f"duplicate receiver id {r.id}")
            seen.add(r.id)
            for m in r.demands | r.side_info:
                if not 1 <= m <= self.n:
                    raise InvariantError(f"receiver {r.id} mentions message {m} outside 1..{self.n}")

    @property
    def messages(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _by_id(self) -> dict[int, Receiver]:
        return {r.id: r for r in self.receivers}

    def receiver(self, j: int) -> Receiver:
        try:
            return self._by_id[j]
        except KeyError:
            raise KeyError(f"no receiver with id {j}") from None

    @cached_property
    def hyperedges(self) -> tuple[ConflictHyperedge, ...]:
        """One hyperedge per (receiver, demanded message), in receiver order."""
        everything = frozenset(self.messages)
        out = []
        for r in self.receivers:
            for k in sorted(r.demands):
                out.append(ConflictHyperedge(k, everything - r.side_info - {k}, r.id))
        return tuple(out)

    @cached_property
    def conflicts(self) -> frozenset[Pair]:
        return frozenset(pair(a, h.demand) for h in self.hyperedges for a in h.interference)

    @cached_property
    def demanded(self) -> frozenset[int]:
        return frozenset(m for r in self.receivers for m in r.demands)

    def in_conflict(self, a: int, b: int) -> bool:
        return pair(a, b) in self.conflicts


def interfering_set(p: Problem, j: int, k: int) -> frozenset[int]:
    """Messages other than ``k`` unavailable at receiver ``j``; empty when ``j`` does not demand ``k``."""
    r = p.receiver(j)
    if not 1 <= k <= p.n:
        raise ValueError(f"message {k} outside 1..{p.n}")
    if k not in r.demands:
        return frozenset()
    return frozenset(p.messages) - r.side_info - {k}


def conflict_pairs(p: Problem) -> frozenset[Pair]:
    return p.conflicts


def conflicts_within(p: Problem, subset: Iterable[int]) -> list[Pair]:
    s = sorted(set(subset))
    return [ab for ab in combinations(s, 2) if ab in p.conflicts]


class Restriction(NamedTuple):
    problem: Problem
    labels: tuple[int, ...]  # labels[i - 1] is the original message behind restricted message i

    def to_original(self, m: int) -> int:
        return self.labels[m - 1]

    def from_original(self, m: int) -> int:
        return self.labels.index(m) + 1


def restrict(p: Problem, subset: Iterable[int]) -> Restriction:
    """Restricted problem on ``subset``, with messages renumbered in ascending order."""
    labels = tuple(sorted(set(subset)))
    if not labels:
        raise EmptySubset("cannot restrict to an empty message set")
    for m in labels:
        if not 1 <= m <= p.n:
            raise InvariantError(f"message {m} outside 1..{p.n}")
    new = {m: i + 1 for i, m in enumerate(labels)}
    receivers = []
    for r in p.receivers:
        d = r.demands & new.keys()
        if d:
            s = r.side_info & new.keys()
            receivers.append(Receiver(r.id, frozenset(new[m] for m in d), frozenset(new[m] for m in s)))
    return Restriction(Problem(len(labels), tuple(receivers), p.field_hint), labels)


def demanded_core(p: Problem) -> Restriction:
    """Restriction to demanded messages.

    A message nobody demands can always take the zero vector, which only
    shrinks interference spans; dropping it preserves every feasibility
    question about ``p``.
    """
    return restrict(p, p.demanded)


def relabel(p: Problem, perm: Mapping[int, int]) -> Problem:
    """Apply a message permutation ``old -> new``."""
    return Problem(
        p.n,
        tuple(
            Receiver(r.id, frozenset(perm[m] for m in r.demands), frozenset(perm[m] for m in r.side_info))
            for r in p.receivers
        ),
        p.field_hint,
    )


# -- instance files ---------------------------------------------------------

def _int_list(x: Any, where: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise SchemaError(f"{where} must be a list of integers")
    return x


def build_problem(raw: Mapping[str, Any]) -> Problem:
    """Validate an instance description (the JSON schema) and build a Problem."""
    if not isinstance(raw, Mapping):
        raise SchemaError("instance must be a JSON object")
    n = raw.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise SchemaError("'n' must be an integer")
    field_hint = None
    if "field" in raw and raw["field"] is not None:
        fld = raw["field"]
        if not isinstance(fld, Mapping):
            raise SchemaError("'field' must be an object")
        if "q" in fld:
            if not isinstance(fld["q"], int) or isinstance(fld["q"], bool):
                raise SchemaError("'field.q' must be an integer")
            field_hint = fld["q"]
    recs = raw.get("receivers")
    if not isinstance(recs, list):
        raise SchemaError("'receivers' must be a list")
    receivers = []
    for i, rr in enumerate(recs, start=1):
        if not isinstance(rr, Mapping) or "demands" not in rr:
            raise SchemaError(f"receiver #{i} must be an object with 'demands'")
        d = _int_list(rr["demands"], f"receivers[{i - 1}].demands")
        s = _int_list(rr.get("side_info", []), f"receivers[{i - 1}].side_info")
        receivers.append(Receiver(i, frozenset(d), frozenset(s)))
    return Problem(n, tuple(receivers), field_hint)


def problem_to_dict(p: Problem) -> dict[str, Any]:
    out: dict[str, Any] = {"n": p.n}
    if p.field_hint is not None:
        out["field"] = {"q": p.field_hint}
    out["receivers"] = [
        {"demands": sorted(r.demands), "side_info": sorted(r.side_info)} for r in p.receivers
    ]
    return out


def serialize(p: Problem) -> str:
    """Canonical JSON text: receivers in order, sets ascending."""
    return json.dumps(problem_to_dict(p), indent=2) + "\n"


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return build_problem(raw)


# -- builder used by fixtures and generators ---------------------------------

class ProblemBuilder:
    """Assemble problems by stating interfering sets instead of side information.

    Each call to :meth:`interfere` adds a receiver demanding ``demands`` whose
    side information is everything else except ``interference``; the final
    message count is only known at :meth:`build` time, so side information is
    resolved there.
    """

    def __init__(self, n: int = 0):
        self.n = n
        self._specs: list[tuple[frozenset[int], frozenset[int]]] = []
        self._dummies: dict[frozenset[int], int] = {}

    def new_message(self) -> int:
        self.n += 1
        return self.n

    def interfere(self, demands: int | Iterable[int], interference: Iterable[int]) -> None:
        d = frozenset([demands]) if isinstance(demands, int) else frozenset(demands)
        spec = (d, frozenset(interference))
        if spec not in self._specs:
            self._specs.append(spec)

    def dummy(self, interference: Iterable[int]) -> int:
        """Message demanded by a receiver at which ``interference`` interferes.

        Repeated requests for the same interfering set reuse the same dummy.
        """
        key = frozenset(interference)
        if key not in self._dummies:
            d = self.new_message()
            self._dummies[key] = d
            self.interfere(d, key)
        return self._dummies[key]

    def demanded(self) -> set[int]:
        return {m for d, _ in self._specs for m in d}

    def demand_everything(self) -> None:
        """Give every undemanded message a receiver holding all other messages."""
        for m in range(1, self.n + 1):
            if m not in self.demanded():
                self.interfere(m, ())

    def build(self, field_hint: int | None = None) -> Problem:
        everything = frozenset(range(1, self.n + 1))
        recs = tuple(
            Receiver(i, d, everything - d - inter) for i, (d, inter) in enumerate(self._specs, start=1)
        )
        return Problem(self.n, recs, field_hint)
