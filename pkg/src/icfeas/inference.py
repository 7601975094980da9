"""Strict-rate facts, their closure, and rate verdicts with certificates.

A fact ``(S, D)`` says that in every rate-1/3 code the span of the vectors of
``S`` has a dimension in ``D``.  All derivations assume nonzero vectors, so
:func:`quick_verdict` works on the demanded part of the problem and maps the
results back.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Callable, Iterable, Sequence

import networkx as nx

from .model import Pair, Problem, demanded_core, pair
from .structure import (
    SPIC_ALIGNMENT,
    TRIANGULAR,
    TYPE2,
    XTYPE2,
    Inventory,
    PatternMatch,
    Witness,
    alignment_sets,
    conflict_witness,
    internal_conflicts,
    inventory,
    restricted_internal_conflicts,
    spic_alignment_sets,
)

RATE1 = "Rate1Feasible"
RATE_HALF = "RateHalfFeasible"
RATE_THIRD_INFEASIBLE = "RateThirdInfeasible"
INCONCLUSIVE = "Inconclusive"

ALL_DIMS = frozenset({1, 2, 3})
TWO = frozenset({2})

# rule names
CONFLICT = "conflict"
INTERFERENCE = "interfering-set"
STIC_INNER = "stic-inner"
STIC_TRIANGLE = "stic-triangle"
SPIC_CORE = "spic-core"
SPIC_WHOLE = "spic-whole"
SPIC_DIAGONAL = "spic-diagonal"
SPIC_EDGE = "spic-edge"
STITCH = "stitch"
BOUND = "bound"

_PATTERN_RULE = {TRIANGULAR: "triangular", TYPE2: "type-2", XTYPE2: "xtype-2", SPIC_ALIGNMENT: "spic-alignment"}


@dataclass(frozen=True)
class StrictRateFact:
    subset: frozenset[int]
    allowed_dims: frozenset[int]
    rule: str
    match: PatternMatch | None = field(default=None, compare=False)
    witness: Witness | None = field(default=None, compare=False)
    premises: tuple[StrictRateFact, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.subset:
            raise ValueError("a fact needs a non-empty subset")
        if not self.allowed_dims <= ALL_DIMS:
            raise ValueError(f"allowed dims {sorted(self.allowed_dims)} outside 1..3")

    @property
    def lower(self) -> int:
        return min(self.allowed_dims, default=4)

    @property
    def upper(self) -> int:
        return max(self.allowed_dims, default=0)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "subset": sorted(self.subset),
            "allowed_dims": sorted(self.allowed_dims),
            "rule": self.rule,
        }
        if self.match is not None:
            out["match"] = self.match.to_dict()
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.premises:
            out["premises"] = [f.to_dict() for f in self.premises]
        return out

    def __str__(self) -> str:
        return f"{sorted(self.subset)} -> dims {sorted(self.allowed_dims)} [{self.rule}]"


@dataclass(frozen=True)
class Certificate:
    verdict: str
    reason: str
    facts_used: tuple[StrictRateFact, ...] = ()
    subset: frozenset[int] | None = None
    conflict: Pair | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"verdict": self.verdict, "reason": self.reason}
        if self.subset is not None:
            out["subset"] = sorted(self.subset)
        if self.conflict is not None:
            out["conflict"] = list(self.conflict)
        out["facts_used"] = [f.to_dict() for f in self.facts_used]
        return out


# -- seeding -------------------------------------------------------------------

def rate1_infeasible_pairs(p: Problem, spics: Sequence[PatternMatch] = ()) -> set[Pair]:
    """Conflicting pairs plus the SPIC diagonals, which can never share a vector."""
    out = set(p.conflicts)
    for m in spics:
        out.add(pair(*m.image((1, 4))))
        out.add(pair(*m.image((2, 5))))
    return out


def seed_facts(p: Problem, inv: Inventory | None = None) -> list[StrictRateFact]:
    """Facts read directly off conflicts, interfering sets and detected patterns."""
    if inv is None:
        inv = inventory(p)
    facts: list[StrictRateFact] = []
    for a, b in sorted(p.conflicts):
        facts.append(StrictRateFact(frozenset((a, b)), TWO, CONFLICT, witness=conflict_witness(p, a, b)))
    seen = set()
    for h in p.hyperedges:
        if len(h.interference) >= 2 and h.interference not in seen:
            seen.add(h.interference)
            w = Witness(tuple(sorted(h.interference)), h.receiver, h.demand)
            facts.append(StrictRateFact(h.interference, frozenset({1, 2}), INTERFERENCE, witness=w))
    for m in (*inv.triangular, *inv.type2, *inv.xtype2):
        facts.append(StrictRateFact(m.members, TWO, _PATTERN_RULE[m.kind], match=m))
    for m in inv.stic:
        facts.append(StrictRateFact(m.image((2, 3, 5)), frozenset({1, 3}), STIC_INNER, match=m))
        for t in ((1, 2, 3), (2, 4, 5), (3, 5, 6)):
            facts.append(StrictRateFact(m.image(t), TWO, STIC_TRIANGLE, match=m))
    for m in inv.spic:
        facts.append(StrictRateFact(m.image((1, 2, 3, 4)), TWO, SPIC_CORE, match=m))
        facts.append(StrictRateFact(m.members, TWO, SPIC_WHOLE, match=m))
        for r in ((1, 4), (2, 5)):
            facts.append(StrictRateFact(m.image(r), TWO, SPIC_DIAGONAL, match=m))
        for r in ((4, 5), (1, 2)):
            facts.append(StrictRateFact(m.image(r), frozenset({1}), SPIC_EDGE, match=m))
    sal = inv.spic_alignment or tuple(spic_alignment_sets(p, inv.spic, rate1_infeasible_pairs(p, inv.spic)))
    for m in sal:
        if len(m.parts) > 1:
            facts.append(StrictRateFact(m.members, TWO, _PATTERN_RULE[SPIC_ALIGNMENT], match=m))
    return facts


# -- closure ------------------------------------------------------------------------

def _lower_witness(facts: Iterable[StrictRateFact], within: frozenset[int]) -> StrictRateFact | None:
    """A fact on a subset of ``within`` forcing dimension at least 2."""
    best = None
    for f in facts:
        if f.lower >= 2 and f.subset <= within:
            if best is None or (len(f.subset), sorted(f.subset)) < (len(best.subset), sorted(best.subset)):
                best = f
    return best


def _maximal(sets: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    ss = sorted(set(sets), key=lambda s: (-len(s), sorted(s)))
    out: list[frozenset[int]] = []
    for s in ss:
        if not any(s <= t for t in out):
            out.append(s)
    return out


def stitch_closure(facts: Sequence[StrictRateFact], p: Problem | None = None) -> list[StrictRateFact]:
    """Close under stitching of two-dimensional sets and the monotone subset rule.

    Two sets that are both exactly two-dimensional and whose intersection
    cannot be one-dimensional have a two-dimensional union.  Every subset of a
    two-dimensional set that already carries a dimension-at-least-2 fact is
    itself exactly two-dimensional.
    """
    out = list(facts)
    known = {(f.subset, f.allowed_dims) for f in out}

    def add(f: StrictRateFact) -> bool:
        key = (f.subset, f.allowed_dims)
        if key in known:
            return False
        known.add(key)
        out.append(f)
        return True

    changed = True
    while changed:
        changed = False
        two = {}
        for f in out:
            if f.allowed_dims == TWO and f.subset not in two:
                two[f.subset] = f
        tops = _maximal(two)
        for a, b in combinations(tops, 2):
            inter = a & b
            if not inter:
                continue
            cut = _lower_witness(out, inter)
            if cut is None:
                continue
            if add(StrictRateFact(a | b, TWO, STITCH, premises=(two[a], two[b], cut))):
                changed = True
        if changed:
            continue
        tops = _maximal(f.subset for f in out if f.allowed_dims == TWO)
        for f in list(out):
            if f.lower < 2 or f.allowed_dims == TWO:
                continue
            for t in tops:
                if f.subset <= t:
                    top = next(g for g in out if g.subset == t and g.allowed_dims == TWO)
                    if add(StrictRateFact(f.subset, TWO, BOUND, premises=(top, f))):
                        changed = True
                    break
    return out


# -- contradictions ---------------------------------------------------------------

def _bounded(facts: Sequence[StrictRateFact]) -> list[tuple[frozenset[int], frozenset[int], tuple[StrictRateFact, ...]]]:
    """Per subset with facts: allowed dims after intersecting with monotone bounds."""
    by_subset: dict[frozenset[int], list[StrictRateFact]] = {}
    for f in facts:
        by_subset.setdefault(f.subset, []).append(f)
    rows = []
    for s in sorted(by_subset, key=lambda s: (len(s), sorted(s))):
        own = by_subset[s]
        clash = next(((f, g) for f, g in combinations(own, 2) if not f.allowed_dims & g.allowed_dims), None)
        if clash is not None:
            rows.append((s, frozenset(), clash))
            continue
        allowed = ALL_DIMS
        used: list[StrictRateFact] = []
        for f in own:
            if not allowed <= f.allowed_dims:
                allowed = allowed & f.allowed_dims
                used.append(f)
        # superset caps and subset floors
        for f in facts:
            if f.subset == s:
                continue
            if s < f.subset and max(allowed, default=0) > f.upper:
                allowed = frozenset(d for d in allowed if d <= f.upper)
                used.append(f)
            elif f.subset < s and min(allowed, default=4) < f.lower:
                allowed = frozenset(d for d in allowed if d >= f.lower)
                used.append(f)
            if not allowed:
                break
        rows.append((s, allowed, tuple(used)))
    return rows


def find_contradiction(facts: Sequence[StrictRateFact], p: Problem) -> Certificate | None:
    """An infeasibility certificate from clashing facts or a two-dimensional set with an internal conflict."""
    for s, allowed, used in _bounded(facts):
        if not allowed:
            dims = " and ".join(str(sorted(f.allowed_dims)) for f in used)
            reason = f"no dimension of {sorted(s)} is consistent with {dims}"
            return Certificate(RATE_THIRD_INFEASIBLE, reason, used, subset=s)
    two = sorted({f.subset: f for f in facts if f.allowed_dims == TWO}.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    for s, f in two:
        bad = restricted_internal_conflicts(p, s)
        if bad:
            reason = f"{sorted(s)} is two-dimensional but its restriction has the internal conflict {list(bad[0])}"
            return Certificate(RATE_THIRD_INFEASIBLE, reason, (f,), subset=s, conflict=bad[0])
    return None


# -- verdicts ------------------------------------------------------------------------

def _colorable(g: nx.Graph, k: int) -> bool:
    nodes = sorted(g.nodes, key=lambda v: -g.degree(v))
    color: dict[Any, int] = {}

    def go(i: int) -> bool:
        if i == len(nodes):
            return True
        v = nodes[i]
        taken = {color[u] for u in g.neighbors(v) if u in color}
        for c in range(k):
            if c not in taken:
                color[v] = c
                if go(i + 1):
                    return True
                del color[v]
        return False

    return go(0)


def half_rate_obstruction(p: Problem, q: int | None = None) -> str | None:
    """Why no rate-1/2 code exists for an all-demanded problem, or None if one does.

    Every interfering set at a conflicting demand must be one-dimensional, so
    alignment sets share a line; lines must differ across conflicts, and
    GF(q)^2 has q+1 lines.
    """
    inner = internal_conflicts(p)
    if inner:
        return f"conflict {list(inner[0])} inside an alignment set"
    if q is None:
        return None
    sets, _ = alignment_sets(p)
    where = {m: i for i, s in enumerate(sets) for m in s}
    g = nx.Graph()
    g.add_nodes_from(range(len(sets)))
    g.add_edges_from((where[a], where[b]) for a, b in p.conflicts)
    if not _colorable(g, q + 1):
        return f"alignment sets cannot be separated with the {q + 1} lines of GF({q})^2"
    return None


def _relabel_witness(w: Witness | None, f: Callable[[int], int]) -> Witness | None:
    if w is None:
        return None
    return Witness(tuple(sorted(f(m) for m in w.messages)), w.receiver, f(w.demand))


def _relabel_match(m: PatternMatch | None, f: Callable[[int], int]) -> PatternMatch | None:
    if m is None:
        return None
    return replace(
        m,
        members=frozenset(map(f, m.members)),
        role_map=tuple(map(f, m.role_map)) if m.role_map is not None else None,
        witnesses=tuple(_relabel_witness(w, f) for w in m.witnesses),
        parts=tuple(frozenset(map(f, x)) for x in m.parts),
    )


def _relabel_fact(x: StrictRateFact, f: Callable[[int], int]) -> StrictRateFact:
    return StrictRateFact(
        frozenset(map(f, x.subset)),
        x.allowed_dims,
        x.rule,
        _relabel_match(x.match, f),
        _relabel_witness(x.witness, f),
        tuple(_relabel_fact(y, f) for y in x.premises),
    )


def derive_facts(p: Problem) -> list[StrictRateFact]:
    """Seeded and stitched facts, in the labels of ``p``.

    Facts are derived on the demanded messages only, since an undemanded
    message may carry the zero vector.
    """
    if not p.demanded:
        return []
    core = demanded_core(p)
    if core.labels == tuple(p.messages):
        return stitch_closure(seed_facts(p, inventory(p)), p)
    c = core.problem
    return [_relabel_fact(x, core.to_original) for x in stitch_closure(seed_facts(c, inventory(c)), c)]


def quick_verdict(p: Problem, q: int | None = None) -> Certificate:
    """Rate verdict for ``p``.

    Without ``q`` the rate-1/2 answer is the large-field one; with ``q`` it is
    exact over GF(q).  Facts and certificates use the labels of ``p``.
    """
    if not p.receivers:
        return Certificate(RATE1, "no receivers")
    core = demanded_core(p)
    c = core.problem
    if not c.conflicts:
        return Certificate(RATE1, "no conflicts among demanded messages")
    why = half_rate_obstruction(c, q)
    if why is None:
        return Certificate(RATE_HALF, "every alignment set is free of internal conflicts")
    facts = derive_facts(c)
    cert = find_contradiction(facts, c)
    if cert is None:
        return Certificate(INCONCLUSIVE, f"not rate 1/2 feasible ({why}); no contradiction among {len(facts)} facts")
    f = core.to_original
    return Certificate(
        cert.verdict,
        cert.reason if core.labels == tuple(p.messages) else f"{cert.reason} (demanded messages renumbered)",
        tuple(_relabel_fact(x, f) for x in cert.facts_used),
        frozenset(map(f, cert.subset)) if cert.subset is not None else None,
        pair(f(cert.conflict[0]), f(cert.conflict[1])) if cert.conflict is not None else None,
    )


# -- certificate checking ------------------------------------------------------------

def check_fact(f: StrictRateFact, p: Problem) -> list[str]:
    """Problems found when re-deriving ``f`` from its witnesses and premises."""
    errs: list[str] = []
    tag = str(f)
    if f.witness is not None and not f.witness.holds(p):
        errs.append(f"{tag}: witness {f.witness} does not hold")
    if f.match is not None:
        for w in f.match.witnesses:
            if w is None or not w.holds(p):
                errs.append(f"{tag}: pattern witness {w} does not hold")
        if not f.subset <= f.match.members:
            errs.append(f"{tag}: subset outside the matched pattern")
    if f.rule == CONFLICT and (len(f.subset) != 2 or pair(*f.subset) not in p.conflicts):
        errs.append(f"{tag}: not a conflicting pair")
    if f.rule == INTERFERENCE and (f.witness is None or frozenset(f.witness.messages) != f.subset):
        errs.append(f"{tag}: interfering set not witnessed")
    if f.rule == STITCH:
        if len(f.premises) != 3:
            errs.append(f"{tag}: stitch needs two sets and a cut")
        else:
            a, b, cut = f.premises
            if a.allowed_dims != TWO or b.allowed_dims != TWO or f.subset != a.subset | b.subset:
                errs.append(f"{tag}: stitched sets are not both two-dimensional")
            if cut.lower < 2 or not cut.subset <= a.subset & b.subset:
                errs.append(f"{tag}: intersection not shown to exceed one dimension")
    if f.rule == BOUND:
        if len(f.premises) != 2:
            errs.append(f"{tag}: bound needs a cap and a floor")
        else:
            top, floor = f.premises
            if not (f.subset <= top.subset and top.upper <= 2 and floor.subset <= f.subset and floor.lower >= 2):
                errs.append(f"{tag}: bounds do not pin dimension 2")
    for g in f.premises:
        errs.extend(check_fact(g, p))
    return errs


def check_certificate(cert: Certificate, p: Problem) -> list[str]:
    """Re-validate every fact of an infeasibility certificate and its final step."""
    if cert.verdict != RATE_THIRD_INFEASIBLE:
        return []
    errs = [e for f in cert.facts_used for e in check_fact(f, p)]
    if cert.subset is None:
        return errs + ["certificate names no subset"]
    if cert.conflict is not None:
        if cert.conflict not in restricted_internal_conflicts(p, cert.subset):
            errs.append(f"{list(cert.conflict)} is not a restricted internal conflict of {sorted(cert.subset)}")
        if not any(f.subset == cert.subset and f.allowed_dims == TWO for f in cert.facts_used):
            errs.append("no two-dimensional fact on the certified subset")
    else:
        rows = _bounded(cert.facts_used)
        if not any(s == cert.subset and not allowed for s, allowed, _ in rows):
            errs.append(f"facts used leave a dimension available for {sorted(cert.subset)}")
    return errs
