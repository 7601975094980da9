"""Structural objects of an index coding problem.

Alignment graph and alignment sets, forks and cycles, triangular interfering
sets, type-2 and extended type-2 (Xtype-2) sets, exact matching of the STIC
and SPIC interference configurations, SPIC alignment sets, the Xtype-2
intersection graph (ETIG) and DOT export.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Any, Iterable, NamedTuple, Sequence

import networkx as nx

from . import gf
from .errors import NotAnAlignmentSet
from .fixtures import SPIC_PAIRS, SPIC_TRIPLES, STIC_PAIRS, STIC_TRIPLES
from .model import Pair, Problem, pair, restrict

TRIANGULAR = "Triangular"
TYPE2 = "Type2"
XTYPE2 = "Xtype2"
STIC = "STIC"
SPIC = "SPIC"
SPIC_ALIGNMENT = "SpicAlignment"


@dataclass(frozen=True)
class Witness:
    """``messages`` all lie in the interfering set of ``demand`` at ``receiver``."""

    messages: tuple[int, ...]
    receiver: int
    demand: int

    def holds(self, p: Problem) -> bool:
        r = p.receiver(self.receiver)
        if self.demand not in r.demands:
            return False
        return all(m != self.demand and m not in r.side_info for m in self.messages)

    def to_dict(self) -> dict[str, Any]:
        return {"messages": list(self.messages), "receiver": self.receiver, "demand": self.demand}


@dataclass(frozen=True)
class PatternMatch:
    kind: str
    members: frozenset[int]
    role_map: tuple[int, ...] | None = None
    witnesses: tuple[Witness, ...] = ()
    parts: tuple[frozenset[int], ...] = ()

    def image(self, roles: Iterable[int]) -> frozenset[int]:
        """Messages playing the given 1-based roles."""
        assert self.role_map is not None
        return frozenset(self.role_map[r - 1] for r in roles)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "members": sorted(self.members)}
        if self.role_map is not None:
            out["role_map"] = {str(i + 1): m for i, m in enumerate(self.role_map)}
        if self.parts:
            out["parts"] = [sorted(x) for x in self.parts]
        out["witnesses"] = [w.to_dict() for w in self.witnesses]
        return out


def _sorted_sets(sets: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    return sorted(sets, key=lambda s: (min(s), sorted(s)))


def find_witness(p: Problem, messages: Iterable[int], demand: int | None = None,
                 exclude: frozenset[int] = frozenset()) -> Witness | None:
    """First hyperedge whose interfering set holds ``messages``.

    With ``demand`` given the hyperedge must be for that demand; otherwise its
    demand must avoid ``exclude``.
    """
    ms = frozenset(messages)
    for h in p.hyperedges:
        if demand is not None and h.demand != demand:
            continue
        if demand is None and h.demand in exclude:
            continue
        if ms <= h.interference:
            return Witness(tuple(sorted(ms)), h.receiver, h.demand)
    return None


def conflict_witness(p: Problem, a: int, b: int) -> Witness | None:
    return find_witness(p, (b,), demand=a) or find_witness(p, (a,), demand=b)


# -- alignment graph -----------------------------------------------------------

@dataclass(frozen=True)
class AlignmentGraph:
    vertices: tuple[int, ...]
    edges: frozenset[Pair]

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def degree(self, v: int) -> int:
        return self.graph.degree(v)


def alignment_graph(p: Problem) -> AlignmentGraph:
    edges = set()
    for h in p.hyperedges:
        if len(h.interference) >= 2:
            edges.update(combinations(sorted(h.interference), 2))
    return AlignmentGraph(tuple(p.messages), frozenset(edges))


def alignment_sets(p: Problem) -> tuple[list[frozenset[int]], AlignmentGraph]:
    """Connected components of the alignment graph (isolated messages are singletons)."""
    g = alignment_graph(p)
    comps = [frozenset(c) for c in nx.connected_components(g.graph)]
    return _sorted_sets(comps), g


def internal_conflicts(p: Problem) -> list[Pair]:
    """Conflicting pairs lying inside a single alignment set."""
    sets, _ = alignment_sets(p)
    where = {m: i for i, s in enumerate(sets) for m in s}
    return sorted(ab for ab in p.conflicts if where[ab[0]] == where[ab[1]])


def restricted_internal_conflicts(p: Problem, subset: Iterable[int]) -> list[Pair]:
    """Conflicts of the problem restricted to ``subset`` that fall inside one of its alignment sets.

    Pairs are reported in the labels of ``p``.
    """
    sub = restrict(p, subset)
    return sorted(pair(sub.to_original(a), sub.to_original(b)) for a, b in internal_conflicts(sub.problem))


class ForkCycle(NamedTuple):
    has_fork: bool
    has_cycle: bool


def fork_cycle_flags(p: Problem, aset: Iterable[int]) -> ForkCycle:
    s = frozenset(aset)
    sets, g = alignment_sets(p)
    if s not in sets:
        raise NotAnAlignmentSet(f"{sorted(s)} is not an alignment set")
    sub = g.graph.subgraph(s)
    fork = any(d >= 3 for _, d in sub.degree())
    cycle = sub.number_of_edges() >= sub.number_of_nodes()
    return ForkCycle(fork, cycle)


# -- triangular, type-2, Xtype-2 ----------------------------------------------------

def triangular_sets(p: Problem) -> list[PatternMatch]:
    """3-sets interfering together at some receiver with a conflicting pair among them."""
    found: dict[frozenset[int], tuple[Witness, Witness]] = {}
    for h in p.hyperedges:
        inter = sorted(h.interference)
        if len(inter) < 3:
            continue
        for a, b in combinations(inter, 2):
            if (a, b) not in p.conflicts:
                continue
            for c in inter:
                if c == a or c == b:
                    continue
                t = frozenset((a, b, c))
                if t not in found:
                    found[t] = (
                        Witness(tuple(sorted(t)), h.receiver, h.demand),
                        conflict_witness(p, a, b),
                    )
    return [PatternMatch(TRIANGULAR, t, witnesses=found[t]) for t in _sorted_sets(found)]


def _adjacent_triangles(p: Problem, tris: Sequence[frozenset[int]]) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(len(tris)))
    by_pair: dict[Pair, list[int]] = {}
    for i, t in enumerate(tris):
        for ab in combinations(sorted(t), 2):
            if ab in p.conflicts:
                by_pair.setdefault(ab, []).append(i)
    for idx in by_pair.values():
        for i, j in combinations(idx, 2):
            g.add_edge(i, j)
    return g


def type2_sets(p: Problem, triangles: Sequence[PatternMatch] | None = None) -> list[PatternMatch]:
    """Unions of maximal classes of triangular sets connected through shared conflicting pairs."""
    if triangles is None:
        triangles = triangular_sets(p)
    tris = [t.members for t in triangles]
    g = _adjacent_triangles(p, tris)
    out = []
    for comp in nx.connected_components(g):
        parts = tuple(_sorted_sets(tris[i] for i in comp))
        wits = tuple(w for i in sorted(comp) for w in triangles[i].witnesses)
        out.append(PatternMatch(TYPE2, frozenset().union(*parts), witnesses=wits, parts=parts))
    return sorted(out, key=lambda m: (min(m.members), sorted(m.members)))


def xtype2_sets(p: Problem, type2: Sequence[PatternMatch] | None = None) -> list[PatternMatch]:
    """Maximal chains of type-2 sets whose running intersections contain a conflict."""
    if type2 is None:
        type2 = type2_sets(p)
    groups: list[tuple[frozenset[int], list[int], list[Witness]]] = [
        (t.members, [i], list(t.witnesses)) for i, t in enumerate(type2)
    ]
    merged = True
    while merged:
        merged = False
        for a, b in combinations(range(len(groups)), 2):
            inter = groups[a][0] & groups[b][0]
            hit = next((ab for ab in combinations(sorted(inter), 2) if ab in p.conflicts), None)
            if hit is None:
                continue
            w = conflict_witness(p, *hit)
            ua, ia, wa = groups[a]
            ub, ib, wb = groups[b]
            groups[a] = (ua | ub, ia + ib, wa + wb + ([w] if w else []))
            del groups[b]
            merged = True
            break
    out = []
    for members, idx, wits in groups:
        parts = tuple(_sorted_sets(type2[i].members for i in idx))
        out.append(PatternMatch(XTYPE2, members, witnesses=tuple(wits), parts=parts))
    return sorted(out, key=lambda m: (min(m.members), sorted(m.members)))


# -- STIC / SPIC configurations -----------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    """A fixed-size interference configuration over roles ``1..size``.

    ``triples`` interfere at receivers demanding messages outside the image,
    each ``(pair, target)`` interferes at a receiver demanding the target,
    ``extra_conflicts`` must be present, and the image carries no conflicts
    beyond those stated or implied.
    """

    name: str
    size: int
    triples: tuple[tuple[int, ...], ...]
    pairs: tuple[tuple[tuple[int, int], int], ...]
    extra_conflicts: tuple[tuple[int, int], ...] = ()

    @cached_property
    def allowed_conflicts(self) -> frozenset[Pair]:
        out = {pair(x, t) for (xy, t) in self.pairs for x in xy}
        out |= {pair(*ab) for ab in self.extra_conflicts}
        return frozenset(out)

    @cached_property
    def aligned(self) -> frozenset[Pair]:
        out = set()
        for t in self.triples:
            out.update(pair(a, b) for a, b in combinations(t, 2))
        for (a, b), _ in self.pairs:
            out.add(pair(a, b))
        return frozenset(out)

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """Role permutations (as 1-based tuples ``tau[i-1] = tau(i)``) preserving the pattern."""
        roles = range(1, self.size + 1)
        triples = {frozenset(t) for t in self.triples}
        pairs = {(frozenset(xy), t) for xy, t in self.pairs}
        out = []
        for perm in permutations(roles):
            tau = dict(zip(roles, perm))
            if {frozenset(tau[r] for r in t) for t in triples} != triples:
                continue
            if {(frozenset(tau[r] for r in xy), tau[t]) for xy, t in pairs} != pairs:
                continue
            if {pair(tau[a], tau[b]) for a, b in self.allowed_conflicts} != set(self.allowed_conflicts):
                continue
            out.append(perm)
        return tuple(out)

    def canonical(self, sigma: Sequence[int]) -> tuple[int, ...]:
        """Lexicographically smallest role map describing the same configuration."""
        return min(tuple(sigma[t - 1] for t in tau) for tau in self.automorphisms)

    @cached_property
    def role_order(self) -> tuple[int, ...]:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.size + 1))
        g.add_edges_from(self.aligned)
        order = [1]
        while len(order) < self.size:
            nxt = max(
                (r for r in g if r not in order),
                key=lambda r: (sum(1 for o in order if g.has_edge(r, o)), -r),
            )
            order.append(nxt)
        return tuple(order)


STIC_PATTERN = Pattern(STIC, 6, STIC_TRIPLES, STIC_PAIRS)
SPIC_PATTERN = Pattern(SPIC, 5, SPIC_TRIPLES, SPIC_PAIRS, ((1, 3),))


def pattern_witnesses(p: Problem, pat: Pattern, sigma: Sequence[int]) -> tuple[Witness, ...] | None:
    """Witnesses for every requirement of ``pat`` under role map ``sigma``, or None if one fails."""
    s = {i + 1: m for i, m in enumerate(sigma)}
    image = frozenset(sigma)
    if len(image) != pat.size:
        return None
    for a, b in combinations(range(1, pat.size + 1), 2):
        if p.in_conflict(s[a], s[b]) != (pair(a, b) in pat.allowed_conflicts):
            return None
    wits = []
    for t in pat.triples:
        w = find_witness(p, (s[r] for r in t), exclude=image)
        if w is None:
            return None
        wits.append(w)
    for (x, y), t in pat.pairs:
        w = find_witness(p, (s[x], s[y]), demand=s[t])
        if w is None:
            return None
        wits.append(w)
    for a, b in pat.extra_conflicts:
        w = conflict_witness(p, s[a], s[b])
        if w is None:
            return None
        wits.append(w)
    return tuple(wits)


def detect_pattern(p: Problem, pat: Pattern) -> list[PatternMatch]:
    """All occurrences of ``pat``, one canonical role map per automorphism orbit."""
    ag = alignment_graph(p).graph
    order = pat.role_order
    allowed = pat.allowed_conflicts
    aligned = pat.aligned
    sigma: dict[int, int] = {}
    out: list[PatternMatch] = []

    def extend(depth: int) -> None:
        if depth == len(order):
            roles = tuple(sigma[r] for r in range(1, pat.size + 1))
            if pat.canonical(roles) != roles:
                return
            wits = pattern_witnesses(p, pat, roles)
            if wits is not None:
                out.append(PatternMatch(pat.name, frozenset(roles), roles, wits))
            return
        r = order[depth]
        anchors = [sigma[o] for o in order[:depth] if pair(r, o) in aligned]
        if anchors:
            cands = set(ag.neighbors(anchors[0]))
            for a in anchors[1:]:
                cands &= set(ag.neighbors(a))
        else:
            cands = {v for v in ag.nodes if ag.degree(v) >= 2}
        used = set(sigma.values())
        for m in sorted(cands - used):
            ok = True
            for o in order[:depth]:
                if p.in_conflict(m, sigma[o]) != (pair(r, o) in allowed):
                    ok = False
                    break
            if ok:
                sigma[r] = m
                extend(depth + 1)
                del sigma[r]

    extend(0)
    return sorted(out, key=lambda m: m.role_map)


def detect_stic(p: Problem) -> list[PatternMatch]:
    return detect_pattern(p, STIC_PATTERN)


def detect_spic(p: Problem) -> list[PatternMatch]:
    return detect_pattern(p, SPIC_PATTERN)


def spic_alignment_sets(p: Problem, spics: Sequence[PatternMatch],
                        rate1_infeasible_pairs: Iterable[Pair]) -> list[PatternMatch]:
    """Maximal classes of SPIC sets connected through intersections holding a rate-1 infeasible pair."""
    bad = {pair(*ab) for ab in rate1_infeasible_pairs}
    g = nx.Graph()
    g.add_nodes_from(range(len(spics)))
    for i, j in combinations(range(len(spics)), 2):
        inter = spics[i].members & spics[j].members
        if any(ab in bad for ab in combinations(sorted(inter), 2)):
            g.add_edge(i, j)
    out = []
    for comp in nx.connected_components(g):
        idx = sorted(comp)
        parts = tuple(spics[i].members for i in idx)
        wits = tuple(w for i in idx for w in spics[i].witnesses)
        out.append(PatternMatch(SPIC_ALIGNMENT, frozenset().union(*parts), witnesses=wits, parts=parts))
    return sorted(out, key=lambda m: (min(m.members), sorted(m.members)))


# -- inventory -------------------------------------------------------------------

@dataclass(frozen=True)
class Inventory:
    """Everything the structure module can find in one problem."""

    alignment: AlignmentGraph
    alignment_sets: tuple[frozenset[int], ...]
    triangular: tuple[PatternMatch, ...]
    type2: tuple[PatternMatch, ...]
    xtype2: tuple[PatternMatch, ...]
    stic: tuple[PatternMatch, ...]
    spic: tuple[PatternMatch, ...]
    spic_alignment: tuple[PatternMatch, ...] = field(default=())

    def all_matches(self) -> list[PatternMatch]:
        return [*self.triangular, *self.type2, *self.xtype2, *self.stic, *self.spic, *self.spic_alignment]

    def counts(self) -> dict[str, int]:
        return {
            TRIANGULAR: len(self.triangular),
            TYPE2: len(self.type2),
            XTYPE2: len(self.xtype2),
            STIC: len(self.stic),
            SPIC: len(self.spic),
            SPIC_ALIGNMENT: len(self.spic_alignment),
        }


def inventory(p: Problem) -> Inventory:
    sets, g = alignment_sets(p)
    tri = triangular_sets(p)
    t2 = type2_sets(p, tri)
    x2 = xtype2_sets(p, t2)
    return Inventory(g, tuple(sets), tuple(tri), tuple(t2), tuple(x2),
                     tuple(detect_stic(p)), tuple(detect_spic(p)))


# -- ETIG ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Etig:
    """Intersection graph of Xtype-2 sets; vertices are numbered ``1..r``.

    ``edge_vectors`` and ``vertex_spans`` are filled by the vector-assignment
    step; a freshly built graph has neither.
    """

    members: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    edge_vectors: dict[tuple[int, int], gf.FVector] = field(default_factory=dict, compare=False)
    vertex_spans: dict[int, gf.Subspace] = field(default_factory=dict, compare=False)

    @property
    def vertices(self) -> range:
        return range(1, len(self.members) + 1)

    def neighbors(self, i: int) -> list[int]:
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b)})

    def intersection(self, i: int, j: int) -> frozenset[int]:
        return self.members[i - 1] & self.members[j - 1]

    def incident_span(self, i: int, L: int, field_: gf.Field) -> gf.Subspace:
        vs = [v for e, v in self.edge_vectors.items() if i in e]
        return gf.span_of(vs, L, field_)


def build_etig(xsets: Sequence[PatternMatch | frozenset[int]]) -> Etig:
    members = tuple(frozenset(x.members if isinstance(x, PatternMatch) else x) for x in xsets)
    if len(set(members)) != len(members):
        raise ValueError("Xtype-2 sets must be pairwise distinct")
    edges = tuple(
        (i + 1, j + 1) for i, j in combinations(range(len(members)), 2) if members[i] & members[j]
    )
    return Etig(members, edges)


# -- DOT export ------------------------------------------------------------------

def to_dot(p: Problem, name: str = "alignment") -> str:
    """Alignment graph (solid) plus one dashed star per nonempty conflict hyperedge."""
    g = alignment_graph(p)
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for m in p.messages:
        lines.append(f'  m{m} [label="W{m}"];')
    for a, b in sorted(g.edges):
        lines.append(f"  m{a} -- m{b};")
    stars = [h for h in p.hyperedges if h.interference]
    for i, h in enumerate(stars, start=1):
        lines.append(f'  h{i} [shape=point, xlabel="R{h.receiver}:W{h.demand}"];')
        lines.append(f'  h{i} -- m{h.demand} [style=dashed, penwidth=2];')
        for m in sorted(h.interference):
            lines.append(f"  h{i} -- m{m} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
