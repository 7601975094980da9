"""Explicit rate-1/3 codes from a maximal contraction with well-behaved Xtype-2 sets.

The pipeline contracts the problem maximally, checks the three conditions on
its Xtype-2 sets, assigns vectors to the edges of their intersection graph so
that every set sees at most a plane, fills in the messages, verifies, and
lifts the code back through the contraction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Sequence

from . import gf
from .code import PrecodingAssignment, Violation, verify_code
from .contraction import ContractionMap, contractible_edges, lift_code, maximal_contraction
from .errors import ConditionViolation, InvariantError, NoQualifyingContraction, NotMaximal, RetryExhausted
from .model import Problem, conflicts_within
from .structure import (
    Etig,
    PatternMatch,
    alignment_sets,
    build_etig,
    fork_cycle_flags,
    restricted_internal_conflicts,
    type2_sets,
    xtype2_sets,
)

__all__ = [
    "ConditionReport",
    "ConstructionResult",
    "assign_etig_vectors",
    "assign_message_vectors",
    "check_theorem5_conditions",
    "construct_rate_third",
    "theorem2_predicate",
    "verify_code",
]

L3 = 3
DEFAULT_FIELD = gf.Field(101)


@dataclass(frozen=True)
class ConditionReport:
    xsets: tuple[PatternMatch, ...]
    violations: tuple[dict[str, Any], ...] = ()

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "xtype2_sets": [sorted(x.members) for x in self.xsets],
            "holds": self.holds,
            "violations": list(self.violations),
        }


def check_theorem5_conditions(pc: Problem) -> ConditionReport:
    """Conditions on the Xtype-2 sets of a maximal contraction.

    (a) no restricted internal conflicts, (b) no message in three sets,
    (c) no conflict inside a pairwise intersection.
    """
    loose = contractible_edges(pc)
    if loose:
        raise NotMaximal(f"alignment edge {list(loose[0])} joins messages that are not in conflict")
    xs = tuple(xtype2_sets(pc))
    out: list[dict[str, Any]] = []
    for i, x in enumerate(xs, start=1):
        bad = restricted_internal_conflicts(pc, x.members)
        if bad:
            out.append({"condition": "a", "sets": [i], "conflicts": [list(c) for c in bad]})
    for m in pc.messages:
        owners = [i for i, x in enumerate(xs, start=1) if m in x.members]
        if len(owners) >= 3:
            out.append({"condition": "b", "sets": owners, "message": m})
    for (i, a), (j, b) in combinations(enumerate(xs, start=1), 2):
        bad = conflicts_within(pc, a.members & b.members)
        if bad:
            out.append({"condition": "c", "sets": [i, j], "conflicts": [list(c) for c in bad]})
    return ConditionReport(xs, tuple(out))


# -- ETIG edge vectors -------------------------------------------------------------

def assign_etig_vectors(
    etig: Etig, field: gf.Field, rng: random.Random, order: Sequence[tuple[int, int]] | None = None
) -> Etig:
    """Assign a length-3 vector to every edge so that each vertex spans at most a plane.

    Edges are processed in ``order`` (default: ascending).  A vertex already
    spanning a plane forces the edge into that plane; two such vertices force
    it into the intersection of their planes.
    """
    edges = list(order) if order is not None else sorted(etig.edges)
    if sorted(edges) != sorted(etig.edges):
        raise ValueError("order must list every edge exactly once")
    vecs: dict[tuple[int, int], gf.FVector] = {}

    def span_at(i: int) -> gf.Subspace:
        return gf.span_of([v for e, v in vecs.items() if i in e], L3, field)

    for e in edges:
        si, sj = span_at(e[0]), span_at(e[1])
        if si.dim == 2 and sj.dim == 2:
            vecs[e] = gf.sample_nonzero(gf.intersect(si, sj), rng)
        elif si.dim == 2:
            vecs[e] = gf.sample_nonzero(si, rng)
        elif sj.dim == 2:
            vecs[e] = gf.sample_nonzero(sj, rng)
        else:
            vecs[e] = gf.random_vector(L3, field, rng)
    spans = {i: span_at(i) for i in etig.vertices}
    return Etig(etig.members, etig.edges, vecs, spans)


# -- message vectors ---------------------------------------------------------------

def assign_message_vectors(
    pc: Problem,
    xsets: Sequence[PatternMatch],
    etig: Etig,
    field: gf.Field,
    rng: random.Random,
    conditions: ConditionReport | None = None,
) -> PrecodingAssignment:
    """Vectors for every message of ``pc`` from an assigned ETIG."""
    if conditions is not None and not conditions.holds:
        raise ConditionViolation(f"conditions fail: {conditions.violations[0]}")
    if len(etig.edges) != len(etig.edge_vectors):
        raise ValueError("every ETIG edge needs a vector first")
    out: dict[int, gf.FVector] = {}
    # shared messages take their edge's vector
    for (i, j), v in sorted(etig.edge_vectors.items()):
        for m in sorted(etig.intersection(i, j)):
            out[m] = v
    for i in etig.vertices:
        members = xsets[i - 1].members if xsets else etig.members[i - 1]
        nbrs = etig.neighbors(i)
        if not nbrs:
            plane = gf.random_plane(L3, field, rng)
        else:
            s = etig.incident_span(i, L3, field)
            plane = s if s.dim == 2 else gf.random_plane(L3, field, rng, through=s.basis[0])
        for m in sorted(members):
            if m not in out:
                out[m] = gf.sample_nonzero(plane, rng)
    for m in pc.messages:
        if m not in out:
            out[m] = gf.random_vector(L3, field, rng)
    return PrecodingAssignment(L3, field, out)


# -- pipeline --------------------------------------------------------------------

@dataclass
class ConstructionResult:
    code: PrecodingAssignment
    seed: int
    policy: str
    retries_used: int
    contraction: ContractionMap
    conditions: ConditionReport
    attempts: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        out = self.code.to_dict()
        out.update(
            seed=self.seed,
            policy=self.policy,
            retries_used=self.retries_used,
            verified=True,
            contraction=self.contraction.to_dict(),
            conditions=self.conditions.to_dict(),
        )
        return out


def attempt_rng(seed: int, policy: str, attempt: int) -> random.Random:
    return random.Random(f"{seed}/{policy}/{attempt}")


def construct_rate_third(
    p: Problem,
    field: gf.Field | int = DEFAULT_FIELD,
    seed: int = 0,
    max_retries: int = 32,
    policies: Sequence[str] = ("lex",),
) -> ConstructionResult:
    """Verified rate-1/3 code for ``p`` through the first qualifying contraction policy.

    ``retries_used`` counts failed attempts before the successful one.
    """
    fld = field if isinstance(field, gf.Field) else gf.Field(int(field))
    report: list[dict[str, Any]] = []
    qualified = False
    for policy in policies:
        pc, cm = maximal_contraction(p, policy)
        cond = check_theorem5_conditions(pc)
        if not cond.holds:
            report.append({"policy": policy, "status": "conditions fail", **cond.to_dict()})
            continue
        qualified = True
        xs = cond.xsets
        base = build_etig(xs)
        last: list[Violation] = []
        for attempt in range(max_retries):
            rng = attempt_rng(seed, policy, attempt)
            etig = assign_etig_vectors(base, fld, rng)
            code_c = assign_message_vectors(pc, xs, etig, fld, rng)
            last = verify_code(pc, code_c)
            if last:
                continue
            code = lift_code(code_c, cm)
            if verify_code(p, code):
                raise InvariantError("a verified code of the contraction failed after lifting")
            return ConstructionResult(code, seed, policy, attempt, cm, cond)
        report.append({
            "policy": policy,
            "status": "retries exhausted",
            "retries": max_retries,
            "last_violations": [str(v) for v in last[:5]],
        })
    if qualified:
        raise RetryExhausted(f"no verified code within {max_retries} retries", report)
    raise NoQualifyingContraction("conditions fail on every explored maximal contraction", report)


# -- check-only predicate -------------------------------------------------------------

def theorem2_predicate(p: Problem) -> dict[str, Any]:
    """Per alignment set: not both fork and cycle, or a clean type-2 set."""
    sets, _ = alignment_sets(p)
    t2 = {m.members for m in type2_sets(p)}
    rows = []
    for s in sets:
        fc = fork_cycle_flags(p, s)
        c1 = not (fc.has_fork and fc.has_cycle)
        c2 = s in t2 and not restricted_internal_conflicts(p, s)
        rows.append({
            "alignment_set": sorted(s),
            "has_fork": fc.has_fork,
            "has_cycle": fc.has_cycle,
            "no_fork_and_cycle": c1,
            "clean_type2": c2,
            "satisfied": c1 or c2,
        })
    return {"holds": all(r["satisfied"] for r in rows), "sets": rows}
