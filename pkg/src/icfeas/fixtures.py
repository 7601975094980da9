"""Canonical example problems.

Interference patterns are realised with dummy messages: a dummy ``d`` gets a
receiver demanding ``d`` whose side information is everything except ``d``
and the pattern's messages, so exactly those messages interfere there.
Every message that would otherwise be demanded by nobody gets a receiver
holding all other messages.  That receiver adds no conflict; it only rules
out the zero precoding vector, which the configurations implicitly assume.
"""

from __future__ import annotations

from typing import Sequence

from .model import Problem, ProblemBuilder, Receiver

# role -> role-relative patterns (1-based roles)
STIC_TRIPLES = ((1, 2, 3), (2, 4, 5), (3, 5, 6))
STIC_PAIRS = (((1, 2), 6), ((2, 4), 6), ((1, 3), 4), ((3, 6), 4), ((4, 5), 1), ((5, 6), 1))
SPIC_TRIPLES = ((1, 2, 3), (1, 3, 4), (3, 4, 5), (2, 3, 5))
SPIC_PAIRS = (((1, 2), 5), ((4, 5), 2))
SPIC_CONFLICTS = ((1, 3),)

FIG2_SECOND_STIC = (7, 4, 2, 8, 5, 9)
FIG4_SPICS = (
    (14, 1, 3, 15, 4),
    (2, 1, 3, 5, 4),
    (2, 6, 7, 5, 8),
    (9, 6, 10, 11, 8),
    (9, 12, 10, 11, 13),
)


def add_stic(b: ProblemBuilder, roles: Sequence[int]) -> None:
    s = {i + 1: m for i, m in enumerate(roles)}
    for t in STIC_TRIPLES:
        b.dummy(s[r] for r in t)
    for (x, y), at in STIC_PAIRS:
        b.interfere(s[at], (s[x], s[y]))


def add_spic(b: ProblemBuilder, roles: Sequence[int]) -> None:
    s = {i + 1: m for i, m in enumerate(roles)}
    for t in SPIC_TRIPLES:
        b.dummy(s[r] for r in t)
    for (x, y), at in SPIC_PAIRS:
        b.interfere(s[at], (s[x], s[y]))
    # W1-W3 conflict, realised at a receiver demanding the third role
    b.interfere(s[3], (s[1],))


def add_triangle(b: ProblemBuilder, tri: Sequence[int], conflicts: Sequence[tuple[int, int]]) -> None:
    """Triple interfering at a dummy, plus the listed conflicts (``a`` demanded, ``b`` interfering)."""
    b.dummy(tri)
    for a, c in conflicts:
        b.interfere(a, (c,))


def p_pair() -> Problem:
    return Problem(2, (Receiver(1, frozenset({1}), frozenset()), Receiver(2, frozenset({2}), frozenset())))


def p_tri() -> Problem:
    return Problem(3, tuple(Receiver(k, frozenset({k}), frozenset()) for k in (1, 2, 3)))


def p_stic() -> Problem:
    b = ProblemBuilder(6)
    add_stic(b, range(1, 7))
    b.demand_everything()
    return b.build()


def p_spic() -> Problem:
    b = ProblemBuilder(5)
    add_spic(b, range(1, 6))
    b.demand_everything()
    return b.build()


def p_2stic() -> Problem:
    b = ProblemBuilder(9)
    add_stic(b, range(1, 7))
    add_stic(b, FIG2_SECOND_STIC)
    b.demand_everything()
    return b.build()


def p_spic_chain() -> Problem:
    """The five-SPIC alignment set of messages 1..15."""
    b = ProblemBuilder(15)
    for roles in FIG4_SPICS:
        add_spic(b, roles)
    b.demand_everything()
    return b.build()


def p_no_conflict() -> Problem:
    return Problem(3, tuple(Receiver(k, frozenset({k}), frozenset({1, 2, 3}) - {k}) for k in (1, 2, 3)))


CANONICAL = {
    "P_PAIR": p_pair,
    "P_TRI": p_tri,
    "P_STIC": p_stic,
    "P_SPIC": p_spic,
    "P_2STIC": p_2stic,
    "P_SPIC_CHAIN": p_spic_chain,
    "P_NOCONFLICT": p_no_conflict,
}


# -- problems meeting the construction conditions ---------------------------------

def _conflict_all(b: ProblemBuilder, members: Sequence[int]) -> None:
    for i, x in enumerate(members):
        for y in members[i + 1:]:
            b.interfere(x, (y,))


def add_fan(b: ProblemBuilder, members: Sequence[int]) -> None:
    """Triangles ``(m0, mi, mi+1)``, each interfering at a dummy, all pairs inside them in conflict."""
    m0 = members[0]
    for x, y in zip(members[1:], members[2:]):
        tri = (m0, x, y)
        b.dummy(tri)
        _conflict_all(b, tri)


def add_twin(b: ProblemBuilder, tri: Sequence[int], c: int) -> int:
    """A copy of ``c`` that co-interferes with ``tri`` and shares the conflicts of ``c`` inside it.

    The copy and ``c`` are aligned but not in conflict, so a maximal
    contraction merges them.
    """
    t = b.new_message()
    b.dummy((*tri, t))
    for x in tri:
        if x != c:
            b.interfere(x, (t,))
    return t


FIG5_EDGES = ((1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 5), (3, 5))


def fig5_sets() -> list[list[int]]:
    """Six Xtype-2 member lists whose pairwise intersections are single messages along ``FIG5_EDGES``."""
    shared = {e: i for i, e in enumerate(FIG5_EDGES, start=1)}
    nxt = len(FIG5_EDGES) + 1
    sets = []
    for v in range(1, 7):
        own = [shared[e] for e in FIG5_EDGES if v in e]
        extra = 1 if len(own) >= 2 else 3 - len(own)
        own += list(range(nxt, nxt + extra))
        nxt += extra
        sets.append(own)
    return sets


def _suite_problem(n: int, fans: Sequence[Sequence[int]], twins: Sequence[tuple[int, int, int, int]] = (),
                   free: Sequence[tuple[int, tuple[int, ...]]] = ()) -> Problem:
    b = ProblemBuilder(n)
    for f in fans:
        add_fan(b, f)
    for a, x, y, c in twins:
        add_twin(b, (a, x, y), c)
    for k, inter in free:
        b.interfere(k, inter)
    b.demand_everything()
    return b.build()


def t5_fig5() -> Problem:
    sets = fig5_sets()
    n = max(max(s) for s in sets)
    return _suite_problem(n, sets)


def t5_fig5_twin() -> Problem:
    sets = fig5_sets()
    n = max(max(s) for s in sets)
    s6 = sets[5]
    return _suite_problem(n, sets, twins=[(s6[0], s6[1], s6[2], s6[2])])


def theorem5_suite() -> dict[str, Problem]:
    """Shipped problems on which the construction must succeed."""
    return {
        "triangle": _suite_problem(3, [[1, 2, 3]]),
        "fan4": _suite_problem(4, [[1, 2, 3, 4]]),
        "fan6": _suite_problem(6, [[1, 2, 3, 4, 5, 6]]),
        "two_sets_shared": _suite_problem(7, [[1, 2, 3, 4], [4, 5, 6, 7]]),
        "path3": _suite_problem(10, [[1, 2, 3, 4], [4, 5, 6, 7], [7, 8, 9, 10]]),
        "star": _suite_problem(12, [[1, 2, 3, 4], [2, 5, 6], [3, 7, 8, 9], [4, 10, 11, 12]]),
        "xtype2_merge": _suite_problem(6, [[3, 1, 4], [3, 4, 2], [5, 1, 6], [5, 6, 2]],
                                       free=[(1, (2,))]),
        "isolated_free": _suite_problem(9, [[1, 2, 3], [4, 5, 6, 7]],
                                        free=[(8, (1, 2)), (9, (4, 5)), (8, (9,)), (1, (8,))]),
        "twin_triangle": _suite_problem(3, [[1, 2, 3]], twins=[(1, 2, 3, 3)]),
        "twin_path": _suite_problem(7, [[1, 2, 3, 4], [4, 5, 6, 7]], twins=[(4, 5, 6, 6), (1, 2, 3, 2)]),
        "fig5": t5_fig5(),
        "fig5_twin": t5_fig5_twin(),
    }
