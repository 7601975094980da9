"""Exhaustive ground truth for scalar linear codes over small prime fields.

The search assigns one vector of GF(q)^L per message by backtracking.  Two
reductions keep it exact while making it fast enough for desk-scale work:

* Vectors are enumerated in canonical form under GL(L, q): whenever a message
  takes a vector outside the span of the vectors chosen so far, that vector
  is the next standard basis vector.  Validity and every subset dimension are
  invariant under GL(L, q), so feasibility and dimension statistics are
  unchanged.
* Each decoding constraint keeps the span of its already-assigned
  interfering vectors; a branch dies as soon as the demanded vector falls in
  that span, since spans only grow as more messages are assigned.

Subspaces are interned once per ``(q, L)`` so that span updates are table
lookups.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

from . import gf
from .code import PrecodingAssignment
from .errors import BudgetExceeded
from .model import Problem

SUPPORTED_Q = (2, 3, 5)
DEFAULT_BUDGET = 10**9


class _Space:
    """Interned subspaces of GF(q)^L with memoised ``span + vector``."""

    def __init__(self, q: int, L: int):
        self.q, self.L = q, L
        self.size = q**L
        self.coords = list(itertools.product(range(q), repeat=L))
        self.index = {c: i for i, c in enumerate(self.coords)}
        self.masks = [1]
        self.members = [[0]]
        self.dims = [0]
        self._ids = {1: 0}
        self._join: dict[int, int] = {}
        self.basis = [self.index[tuple(int(i == j) for j in range(L))] for i in range(L)]
        # members of span(e_1..e_r), i.e. vectors vanishing after coordinate r
        self.prefix = [
            [i for i, c in enumerate(self.coords) if not any(c[r:])] for r in range(L + 1)
        ]

    def join(self, s: int, v: int) -> int:
        key = s * self.size + v
        r = self._join.get(key)
        if r is not None:
            return r
        if self.masks[s] >> v & 1:
            r = s
        else:
            q, vc = self.q, self.coords[v]
            new = set()
            for x in self.members[s]:
                xc = self.coords[x]
                for c in range(q):
                    new.add(self.index[tuple((a + c * b) % q for a, b in zip(xc, vc))])
            mask = 0
            for i in new:
                mask |= 1 << i
            r = self._ids.get(mask)
            if r is None:
                r = len(self.masks)
                self._ids[mask] = r
                self.masks.append(mask)
                self.members.append(sorted(new))
                self.dims.append(self.dims[s] + 1)
        self._join[key] = r
        return r


@lru_cache(maxsize=None)
def _space(q: int, L: int) -> _Space:
    return _Space(q, L)


@dataclass
class OracleResult:
    feasible: bool
    witness: PrecodingAssignment | None
    nodes_explored: int
    L: int
    q: int
    achievable_dims: dict[frozenset[int], frozenset[int]] | None = None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def vacuous(self) -> bool:
        """True when dimension statistics were requested but no valid code exists."""
        return self.achievable_dims is not None and not self.feasible

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "L": self.L,
            "q": self.q,
            "feasible": self.feasible,
            "nodes_explored": self.nodes_explored,
            "witness": self.witness.to_dict() if self.witness else None,
        }
        if self.achievable_dims is not None:
            out["achievable_dims"] = [
                {"subset": sorted(s), "dims": sorted(d)}
                for s, d in sorted(self.achievable_dims.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            ]
            out["vacuous"] = self.vacuous
        if timing:
            out["wall_time_s"] = round(self.elapsed, 6)
        return out


def _check_args(L: int, q: int) -> None:
    if not 1 <= L <= gf.MAX_L:
        raise ValueError(f"L must be in 1..{gf.MAX_L}")
    if q not in SUPPORTED_Q:
        raise ValueError(f"oracle fields are GF(2), GF(3), GF(5); got q={q}")


class _Search:
    def __init__(self, p: Problem, L: int, q: int, order: Sequence[int], budget: int):
        self.space = _space(q, L)
        self.L = L
        n = p.n
        cons = sorted({(h.demand - 1, tuple(sorted(m - 1 for m in h.interference))) for h in p.hyperedges})
        self.ck = [k for k, _ in cons]
        self.cons_I: list[list[int]] = [[] for _ in range(n)]
        self.cons_k: list[list[int]] = [[] for _ in range(n)]
        for c, (k, inter) in enumerate(cons):
            self.cons_k[k].append(c)
            for m in inter:
                self.cons_I[m].append(c)
        self.nonzero = [m + 1 in p.demanded for m in range(n)]
        self.order = list(order)
        self.val = [-1] * n
        self.span = [0] * len(cons)
        self.nodes = 0
        self.budget = budget
        self.solution: list[int] | None = None

    # -- state updates -----------------------------------------------------
    def _assign(self, m: int, v: int) -> tuple[bool, list[tuple[int, int]]]:
        self.val[m] = v
        masks = self.space.masks
        undo: list[tuple[int, int]] = []
        for c in self.cons_k[m]:
            if masks[self.span[c]] >> v & 1:
                return False, undo
        join, span, val, ck = self.space.join, self.span, self.val, self.ck
        dims, full = self.space.dims, self.L
        for c in self.cons_I[m]:
            old = span[c]
            new = join(old, v)
            if new != old:
                undo.append((c, old))
                span[c] = new
                kv = val[ck[c]]
                # a full span leaves no room for the demand, assigned or not
                if dims[new] == full or (kv >= 0 and masks[new] >> kv & 1):
                    return False, undo
        return True, undo

    def _unassign(self, m: int, undo: list[tuple[int, int]]) -> None:
        for c, old in reversed(undo):
            self.span[c] = old
        self.val[m] = -1

    def _candidates(self, m: int, r: int) -> list[tuple[int, int]]:
        sp = self.space
        out = []
        if r < self.L:
            out.append((sp.basis[r], r + 1))
        for v in sp.prefix[r]:
            if v == 0 and self.nonzero[m]:
                continue
            out.append((v, r))
        return out

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded {self.budget} nodes", self.nodes)

    # -- drivers -------------------------------------------------------------
    def first(self, depth: int, r: int) -> bool:
        """Depth-first search for one completion; records it in ``solution``."""
        if depth == len(self.order):
            self.solution = list(self.val)
            return True
        m = self.order[depth]
        for v, nr in self._candidates(m, r):
            self._tick()
            ok, undo = self._assign(m, v)
            found = ok and self.first(depth + 1, nr)
            self._unassign(m, undo)
            if found:
                return True
        return False

    def classify(self, depth: int, r: int, stop: int, subsets: list[list[int]], found: set) -> None:
        if depth == stop:
            sig = tuple(self._dim(s) for s in subsets)
            if sig not in found and self.first(depth, r):
                found.add(sig)
            return
        m = self.order[depth]
        for v, nr in self._candidates(m, r):
            self._tick()
            ok, undo = self._assign(m, v)
            if ok:
                self.classify(depth + 1, nr, stop, subsets, found)
            self._unassign(m, undo)

    def _dim(self, subset: list[int]) -> int:
        s = 0
        for m in subset:
            s = self.space.join(s, self.val[m])
        return self.space.dims[s]

    def prefixes(self, depth: int, r: int, stop: int, acc: list, out: list) -> None:
        if depth == stop:
            out.append((tuple(acc), r))
            return
        m = self.order[depth]
        for v, nr in self._candidates(m, r):
            ok, undo = self._assign(m, v)
            if ok:
                acc.append(v)
                self.prefixes(depth + 1, nr, stop, acc, out)
                acc.pop()
            self._unassign(m, undo)


def search_order(p: Problem, first_block: Iterable[int] = ()) -> list[int]:
    """Static variable order (0-based): ``first_block`` messages first, each block greedy by constraint links."""
    n = p.n
    links = [[0] * n for _ in range(n)]
    degree = [0] * n
    for h in p.hyperedges:
        members = [h.demand - 1] + [m - 1 for m in h.interference]
        if len(members) < 2:
            continue
        k = members[0]
        degree[k] += 1
        for a in members[1:]:
            degree[a] += 1
            links[k][a] += 1
            links[a][k] += 1
    blocks = [sorted({m - 1 for m in first_block})]
    blocks.append([m for m in range(n) if m not in set(blocks[0])])
    order: list[int] = []
    for block in blocks:
        rest = set(block)
        while rest:
            best = max(rest, key=lambda m: (sum(links[m][o] for o in order), degree[m], -m))
            order.append(best)
            rest.remove(best)
    return order


def _to_code(val: Sequence[int], q: int, L: int) -> PrecodingAssignment:
    sp = _space(q, L)
    return PrecodingAssignment.from_coords({m + 1: sp.coords[v] for m, v in enumerate(val)}, q)


def _run_task(args: tuple) -> tuple[str, Any, int]:
    p, L, q, order, budget, mode, prefix, subsets, stop = args
    s = _Search(p, L, q, order, budget)
    r = _replay(s, prefix)
    if mode == "first":
        ok = s.first(len(prefix), r)
        return "first", (s.solution if ok else None), s.nodes
    found: set = set()
    s.classify(len(prefix), r, stop, subsets, found)
    return "classify", found, s.nodes


def _replay(s: _Search, prefix: Sequence[int]) -> int:
    r = 0
    for m, v in zip(s.order, prefix):
        ok, _ = s._assign(m, v)
        if not ok:
            raise AssertionError("replayed prefix must be consistent")
        if r < s.L and v == s.space.basis[r]:
            r += 1
    return r


def _split(p: Problem, L: int, q: int, order: list[int], workers: int, limit: int) -> list[tuple[tuple[int, ...], int]]:
    s = _Search(p, L, q, order, DEFAULT_BUDGET)
    depth = 0
    out: list = [((), 0)]
    while depth < limit and len(out) < 4 * workers:
        depth += 1
        out = []
        s.prefixes(0, 0, depth, [], out)
        if not out:
            break
    return out


def feasible_rate(
    p: Problem,
    L: int,
    field: gf.Field | int = 2,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> OracleResult:
    """Decide whether a rate-1/L scalar linear code exists over the field."""
    q = field.q if isinstance(field, gf.Field) else int(field)
    _check_args(L, q)
    t0 = time.perf_counter()
    order = search_order(p)
    if workers <= 1:
        s = _Search(p, L, q, order, budget)
        ok = s.first(0, 0)
        wit = _to_code(s.solution, q, L) if ok else None
        return OracleResult(ok, wit, s.nodes, L, q, elapsed=time.perf_counter() - t0)
    prefixes = _split(p, L, q, order, workers, len(order))
    tasks = [(p, L, q, order, budget, "first", pre, None, None) for pre, _ in prefixes]
    nodes = 0
    wit = None
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for _, sol, k in ex.map(_run_task, tasks):
            nodes += k
            if sol is not None and wit is None:
                wit = _to_code(sol, q, L)
    if nodes > budget:
        raise BudgetExceeded(f"search exceeded {budget} nodes", nodes)
    return OracleResult(wit is not None, wit, nodes, L, q, elapsed=time.perf_counter() - t0)


def classify_subset_dims(
    p: Problem,
    subsets: Sequence[Iterable[int]],
    L: int = 3,
    field: gf.Field | int = 2,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> OracleResult:
    """Dimensions attained by each subset over all valid rate-1/L codes.

    A subset is strictly rate 1/m exactly when its entry is ``{m}``.  If no
    valid code exists every entry is empty and the result is ``vacuous``.
    """
    q = field.q if isinstance(field, gf.Field) else int(field)
    _check_args(L, q)
    t0 = time.perf_counter()
    keys = [frozenset(s) for s in subsets]
    union = set().union(*keys) if keys else set()
    order = search_order(p, union)
    stop = len(union)
    subs0 = [sorted(m - 1 for m in k) for k in keys]
    found: set = set()
    if workers <= 1 or stop == 0:
        s = _Search(p, L, q, order, budget)
        s.classify(0, 0, stop, subs0, found)
        nodes = s.nodes
    else:
        prefixes = _split(p, L, q, order, workers, stop)
        tasks = [(p, L, q, order, budget, "classify", pre, subs0, stop) for pre, _ in prefixes]
        nodes = 0
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for _, fset, k in ex.map(_run_task, tasks):
                nodes += k
                found |= fset
        if nodes > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes", nodes)
    dims = {k: frozenset(sig[i] for sig in found) for i, k in enumerate(keys)}
    witness = None
    if found:
        w = feasible_rate(p, L, q, budget)
        witness = w.witness
    return OracleResult(bool(found), witness, nodes, L, q, dims, elapsed=time.perf_counter() - t0)


def minrank(
    p: Problem, field: gf.Field | int = 2, max_L: int = 4, budget: int = DEFAULT_BUDGET
) -> int | None:
    """Smallest L admitting a scalar linear code, or ``None`` when above ``max_L``."""
    for L in range(1, max_L + 1):
        if feasible_rate(p, L, field, budget).feasible:
            return L
    return None
