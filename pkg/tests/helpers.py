"""Random generators and naive reference implementations shared by the tests."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from icfeas import gf
from icfeas.fixtures import add_fan, add_spic, add_triangle
from icfeas.model import Problem, ProblemBuilder, Receiver, pair
from icfeas.structure import Pattern, pattern_witnesses


def rand_problem(rng: random.Random, n_max: int = 5, t_max: int = 6, n_min: int = 1) -> Problem:
    n = rng.randint(n_min, n_max)
    recs = []
    for j in range(rng.randint(1, t_max)):
        msgs = list(range(1, n + 1))
        rng.shuffle(msgs)
        d = rng.randint(1, min(2, n))
        side = [m for m in msgs[d:] if rng.random() < 0.5]
        recs.append(Receiver(j + 1, frozenset(msgs[:d]), frozenset(side)))
    return Problem(n, tuple(recs))


# -- naive references -----------------------------------------------------------

def naive_feasible(p: Problem, L: int, q: int) -> bool:
    """Try every assignment of GF(q)^L vectors; zero only for undemanded messages."""
    f = gf.Field(q)
    space = [gf.FVector(c, f) for c in itertools.product(range(q), repeat=L)]
    choices = [[v for v in space if not (v.is_zero() and m in p.demanded)] for m in p.messages]
    for combo in itertools.product(*choices):
        ok = True
        for h in p.hyperedges:
            s = gf.span_of([combo[m - 1] for m in sorted(h.interference)], L, f)
            if gf.in_span(combo[h.demand - 1], s):
                ok = False
                break
        if ok:
            return True
    return False


def naive_matches(p: Problem, pat: Pattern) -> set[tuple[int, ...]]:
    """Canonical role maps of every injection satisfying the pattern."""
    out = set()
    for sigma in itertools.permutations(p.messages, pat.size):
        if pattern_witnesses(p, pat, sigma) is not None:
            out.add(pat.canonical(sigma))
    return out


# -- gadget chains ------------------------------------------------------------------

SPIC_CONFLICT_ROLES = ((1, 3), (1, 5), (2, 5), (2, 4))
SPIC_DIAGONAL = (1, 4)


def random_gadget_chain(rng: random.Random, k: int, kinds: Sequence[str] = ("tri", "fan4", "spic"),
                        bad_prob: float = 0.0) -> tuple[Problem, list[str]]:
    """``k`` strictly two-dimensional gadgets, each meeting the union of the earlier ones in a linking pair.

    Links are conflicting pairs, or SPIC diagonals (pairs that can never share
    a vector).  With probability ``bad_prob`` a receiver is added that forces
    an internal conflict inside the chain.
    """
    b = ProblemBuilder(0)
    conflicts: set[tuple[int, int]] = set()
    diagonals: set[tuple[int, int]] = set()
    members: list[int] = []
    kinds_used = []

    def fresh(c: int) -> list[int]:
        return [b.new_message() for _ in range(c)]

    for step in range(k):
        kind = rng.choice(list(kinds))
        kinds_used.append(kind)
        link = None
        if step:
            pool = sorted(conflicts) + sorted(diagonals)
            if kind != "spic":
                pool = sorted(conflicts)
            link = rng.choice(pool)
            if rng.random() < 0.5:
                link = (link[1], link[0])
        if kind in ("tri", "fan4"):
            size = 3 if kind == "tri" else 4
            roles = list(link) + fresh(size - 2) if link else fresh(size)
            if kind == "tri":
                add_triangle(b, roles, [(roles[0], roles[1]), (roles[0], roles[2]), (roles[1], roles[2])])
                conflicts.update(pair(x, y) for x, y in itertools.combinations(roles, 2))
            else:
                order = [roles[0], roles[2], roles[1], roles[3]]
                add_fan(b, order)
                for x, y, z in ((order[0], order[1], order[2]), (order[0], order[2], order[3])):
                    conflicts.update(pair(u, v) for u, v in itertools.combinations((x, y, z), 2))
        else:
            if link is None:
                roles = fresh(5)
            else:
                rp = SPIC_DIAGONAL if pair(*link) in diagonals else rng.choice(SPIC_CONFLICT_ROLES)
                new = iter(fresh(3))
                roles = [0] * 5
                roles[rp[0] - 1], roles[rp[1] - 1] = link
                for i in range(5):
                    if roles[i] == 0:
                        roles[i] = next(new)
            add_spic(b, roles)
            s = {i + 1: m for i, m in enumerate(roles)}
            conflicts.update(pair(s[x], s[y]) for x, y in SPIC_CONFLICT_ROLES)
            diagonals.add(pair(s[1], s[4]))
        members.extend(m for m in roles if m not in members)
    if rng.random() < bad_prob:
        k_, x, y = rng.sample(members, 3)
        b.interfere(k_, (x, y))
    b.demand_everything()
    return b.build(), kinds_used


# -- random ETIGs ---------------------------------------------------------------------

def random_etig_sets(rng: random.Random, max_vertices: int = 8) -> list[frozenset[int]]:
    """Member sets whose intersection graph is a random graph; each edge shares one message."""
    r = rng.randint(1, max_vertices)
    p = rng.random()
    sets: list[set[int]] = [set() for _ in range(r)]
    nxt = 1
    for i, j in itertools.combinations(range(r), 2):
        if rng.random() < p:
            sets[i].add(nxt)
            sets[j].add(nxt)
            nxt += 1
    for s in sets:
        s.add(nxt)
        nxt += 1
    return [frozenset(s) for s in sets]

