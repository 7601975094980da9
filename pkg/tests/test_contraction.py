from __future__ import annotations

import random

import pytest
from helpers import rand_problem

from icfeas import fixtures as F
from icfeas import oracle as O
from icfeas.code import PrecodingAssignment, verify_code
from icfeas.contraction import (
    ContractionMap,
    contract_edge,
    contractible_edges,
    lift_code,
    maximal_contraction,
)
from icfeas.errors import EndpointsInConflict, IndexMismatch, NotAlignmentEdge
from icfeas.model import ProblemBuilder, pair
from icfeas.structure import alignment_graph


def _path(n):
    b = ProblemBuilder(n)
    for k in range(1, n):
        b.dummy((k, k + 1))
    b.demand_everything()
    return b.build()


def test_contract_stic_branch():
    p = F.p_stic()
    pc, cm = contract_edge(p, 2, 3)
    assert pc.n == p.n - 1
    assert cm(2) == cm(3) == 2 and cm(4) == 3 and cm(1) == 1
    assert cm.history == ((2, 3),)


def test_contract_rejects():
    with pytest.raises(EndpointsInConflict):
        contract_edge(F.p_tri(), 1, 2)
    with pytest.raises(NotAlignmentEdge):
        contract_edge(F.p_pair(), 1, 2)


def test_path_collapses():
    p = _path(4)
    pc, cm = maximal_contraction(p)
    # the dummy receivers keep their own messages apart from the path
    path_images = {cm(k) for k in range(1, 5)}
    assert len(path_images) == 1
    assert not contractible_edges(pc)


def test_triangle_is_already_maximal():
    p = F.p_tri()
    pc, cm = maximal_contraction(p)
    assert pc == p and cm == ContractionMap.identity(p.n)


def test_map_round_trip_and_chaining():
    p = _path(4)
    _, cm = maximal_contraction(p)
    assert ContractionMap.from_dict(cm.to_dict()) == cm
    with pytest.raises(IndexMismatch):
        cm.then(ContractionMap.identity(cm.source_n + 5))
    assert sorted(x for v in cm.fibers().values() for x in v) == list(range(1, cm.source_n + 1))


def test_lift_requires_matching_labels():
    _, cm = maximal_contraction(_path(3))
    code = PrecodingAssignment.from_coords({1: (1, 0)}, 2)
    with pytest.raises(IndexMismatch):
        lift_code(code, cm)


def test_policies():
    p = F.p_stic()
    a = maximal_contraction(p, "random:3")
    assert a == maximal_contraction(p, "random:3")
    assert maximal_contraction(p) == maximal_contraction(p, "lex")
    with pytest.raises(ValueError):
        maximal_contraction(p, "greedy")


def test_conflicts_map_forward():
    rng = random.Random(8)
    done = 0
    while done < 150:
        p = rand_problem(rng, n_max=6, t_max=7)
        edges = contractible_edges(p)
        if not edges:
            continue
        done += 1
        a, b = rng.choice(edges)
        pc, cm = contract_edge(p, a, b)
        image = {pair(cm(x), cm(y)) for x, y in p.conflicts if cm(x) != cm(y)}
        assert pc.conflicts == image
        aimage = {pair(cm(x), cm(y)) for x, y in alignment_graph(p).edges if cm(x) != cm(y)}
        assert set(alignment_graph(pc).edges) <= aimage


def test_lifted_codes_stay_valid():
    rng = random.Random(17)
    done = 0
    while done < 60:
        p = rand_problem(rng, n_max=6, t_max=7)
        pc, cm = maximal_contraction(p, f"random:{done}")
        mr = O.minrank(pc, 2, max_L=3)
        if mr is None:
            continue
        done += 1
        code = O.feasible_rate(pc, mr, 2).witness
        assert verify_code(p, lift_code(code, cm)) == []
