"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

from __future__ import annotations

import random
import statistics
import subprocess
import sys
import time
from pathlib import Path

import pytest
from helpers import rand_problem, random_etig_sets, random_gadget_chain

from icfeas import fixtures as F
from icfeas import gf
from icfeas import inference as I
from icfeas import oracle as O
from icfeas.code import verify_code
from icfeas.constructor import assign_etig_vectors, construct_rate_third
from icfeas.contraction import ContractionMap, contract_edge, contractible_edges, lift_code
from icfeas.errors import BudgetExceeded, ConstructionFailed
from icfeas.model import Problem, ProblemBuilder, restrict
from icfeas.structure import build_etig, restricted_internal_conflicts, type2_sets

DATA = Path(__file__).parent / "data"

# pinned limits
CLASSIFY_SECONDS = 60.0
EXAMPLE_BUDGET = 10**9
MAX_RETRIES = 32
MEDIAN_SECONDS = 1.0
SEEDS = range(100)
CHAINS = 100
CHAIN_CERT_MAX_N = 10
CHAIN_BUDGET = 2_000_000
LIFT_DRAWS = 200
QUICK_SAMPLES = 500
ETIG_DRAWS = 1000
F101 = gf.Field(101)


@pytest.fixture
def report(capsys):
    def emit(num: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
    return emit


def _dims(p, subsets, q):
    t0 = time.perf_counter()
    res = O.classify_subset_dims(p, subsets, 3, q)
    return res.achievable_dims, time.perf_counter() - t0


def test_c1_stic_inner_triangle(report):
    p = F.p_stic()
    tri = [frozenset(t) for t in F.STIC_TRIPLES]
    inner = frozenset({2, 3, 5})
    lines, ok = [], True
    for q in (2, 3):
        dims, secs = _dims(p, [inner, *tri], q)
        good = 2 not in dims[inner] and all(dims[t] == {2} for t in tri if t != inner) and secs < CLASSIFY_SECONDS
        good = good and dims[inner] != frozenset()
        ok &= good
        lines.append(f"GF({q}) inner={sorted(dims[inner])} {secs:.1f}s")
    report(1, ok, "; ".join(lines))
    assert ok


def test_c2_spic_dimensions(report):
    p = F.p_spic()
    want = {
        frozenset({1, 2, 3, 4}): {2},
        frozenset({1, 2, 3, 4, 5}): {2},
        frozenset({1, 4}): {2},
        frozenset({2, 5}): {2},
        frozenset({4, 5}): {1},
        frozenset({1, 2}): {1},
    }
    lines, ok = [], True
    for q in (2, 3):
        dims, secs = _dims(p, list(want), q)
        good = all(dims[s] == d for s, d in want.items()) and secs < CLASSIFY_SECONDS
        ok &= good
        lines.append(f"GF({q}) {'match' if good else dims} {secs:.1f}s")
    report(2, ok, "; ".join(lines))
    assert ok


def test_c3_example_certificate(report):
    p = F.p_2stic()
    cert = I.quick_verdict(p)
    dims = sorted(sorted(f.allowed_dims) for f in cert.facts_used)
    res = O.feasible_rate(p, 3, 2, budget=EXAMPLE_BUDGET)
    ok = (
        cert.verdict == I.RATE_THIRD_INFEASIBLE
        and cert.subset == {2, 4, 5}
        and dims == [[1, 3], [2]]
        and I.check_certificate(cert, p) == []
        and not res.feasible
    )
    report(3, ok, f"subset={sorted(cert.subset or [])} dims={dims} oracle feasible={res.feasible} nodes={res.nodes_explored}")
    assert ok


def _type2_fixtures() -> dict[str, Problem]:
    def fan(members, n, extra=()):
        b = ProblemBuilder(n)
        for m in members:
            F.add_fan(b, m)
        for k, inter in extra:
            b.interfere(k, inter)
        b.demand_everything()
        return b.build()

    return {
        "P_SPIC": F.p_spic(),
        "fan3": fan([(1, 2, 3)], 3),
        "fan4": fan([(1, 2, 3, 4)], 4),
        "fan5": fan([(1, 2, 3, 4, 5)], 5),
        "fan3_bad": fan([(1, 2, 3)], 3, [(3, (1, 2))]),
        "fan4_bad": fan([(1, 2, 3, 4)], 4, [(4, (1, 2))]),
        "fan5_bad": fan([(1, 2, 3, 4, 5)], 5, [(5, (1, 3))]),
        "fan5_aligned": fan([(1, 2, 3, 4, 5)], 5, [(3, (2, 4))]),
        "two_fans": fan([(1, 2, 3), (3, 4, 5)], 5),
        "two_fans_bad": fan([(1, 2, 3), (3, 4, 5)], 5, [(1, (4, 5))]),
        "fan_free": fan([(1, 2, 3, 4)], 6, [(5, (6,)), (6, (1,))]),
        "twin_triangle": F.theorem5_suite()["twin_triangle"],
    }


def test_c4_type2_restriction(report):
    fixtures = _type2_fixtures()
    checked, bad, clean, dirty = 0, [], 0, 0
    for name, p in fixtures.items():
        assert p.n <= 9 if name == "P_SPIC" else p.n <= 8
        for t in type2_sets(p):
            checked += 1
            no_internal = not restricted_internal_conflicts(p, t.members)
            clean += no_internal
            dirty += not no_internal
            feasible = O.feasible_rate(restrict(p, t.members).problem, 2, 2).feasible
            if no_internal != feasible:
                bad.append((name, sorted(t.members)))
    ok = not bad and len(fixtures) >= 10 and dirty > 0 and clean > 0
    report(4, ok, f"{len(fixtures)} fixtures, {checked} type-2 sets ({clean} clean, {dirty} with internal conflicts), mismatches={bad}")
    assert ok


def test_c5_stitching_sound(report):
    rng = random.Random(5)
    stitched = confirmed = certs = cert_ok = vacuous = 0
    undecided, failures = [], []
    for i in range(CHAINS):
        if i % 2:
            p, kinds = random_gadget_chain(rng, rng.randint(2, 3), kinds=("tri", "fan4"), bad_prob=0.6)
        else:
            p, kinds = random_gadget_chain(rng, rng.randint(2, 4), bad_prob=0.3)
        facts = I.derive_facts(p)
        st = sorted({f.subset for f in facts if f.rule == I.STITCH and f.allowed_dims == I.TWO}, key=sorted)
        if st:
            try:
                if not O.feasible_rate(p, 3, 2, budget=CHAIN_BUDGET).feasible:
                    vacuous += len(st)
                else:
                    dims = O.classify_subset_dims(p, st, 3, 2, budget=CHAIN_BUDGET).achievable_dims
                    for s in st:
                        stitched += 1
                        if dims[s] == I.TWO:
                            confirmed += 1
                        else:
                            failures.append((i, kinds, sorted(s)))
            except BudgetExceeded:
                undecided.append((i, p.n))
        cert = I.find_contradiction(facts, p)
        if cert is not None and cert.conflict is not None and p.n <= CHAIN_CERT_MAX_N:
            certs += 1
            if not O.feasible_rate(p, 3, 2).feasible:
                cert_ok += 1
            else:
                failures.append((i, kinds, "certificate"))
    ok = not failures and stitched > 0 and certs > 0
    report(5, ok, f"{CHAINS} chains: stitched {confirmed}/{stitched} confirmed, {vacuous} in code-free chains, "
                  f"undecided within {CHAIN_BUDGET} nodes {undecided}; rule-(b) certificates {cert_ok}/{certs} oracle-infeasible")
    assert ok


def test_c6_construction_suite(report):
    suite = F.theorem5_suite()
    worst, failures, slow = 0, [], []
    for name, p in suite.items():
        times = []
        for seed in SEEDS:
            t0 = time.perf_counter()
            try:
                res = construct_rate_third(p, F101, seed=seed, max_retries=MAX_RETRIES)
            except ConstructionFailed as exc:
                failures.append((name, seed, type(exc).__name__))
                continue
            times.append(time.perf_counter() - t0)
            if verify_code(p, res.code):
                failures.append((name, seed, "verify"))
            worst = max(worst, res.retries_used)
        if times and statistics.median(times) >= MEDIAN_SECONDS:
            slow.append(name)
    ok = len(suite) >= 10 and "fig5" in suite and not failures and not slow
    report(6, ok, f"{len(suite)} fixtures x {len(SEEDS)} seeds, max retries used {worst}, failures={failures[:3]}, slow={slow}")
    assert ok


def test_c7_lifting(report):
    rng = random.Random(7)
    lifted = failures = 0
    for d in range(LIFT_DRAWS):
        p = rand_problem(rng, n_max=6, t_max=7)
        pc, cm = p, ContractionMap.identity(p.n)
        while contractible_edges(pc):
            pc, step = contract_edge(pc, *rng.choice(contractible_edges(pc)))
            cm = cm.then(step)
        for L in (2, 3):
            res = O.feasible_rate(pc, L, 2)
            if res.feasible:
                lifted += 1
                if verify_code(p, lift_code(res.witness, cm)):
                    failures += 1
    ok = failures == 0 and lifted > 0
    report(7, ok, f"{LIFT_DRAWS} draws, {lifted} lifted codes, {failures} failures")
    assert ok


def test_c8_quick_verdict(report):
    rng = random.Random(8)
    disagree = []
    for i in range(QUICK_SAMPLES):
        p = rand_problem(rng, n_max=5)
        v = I.quick_verdict(p, q=2).verdict
        mr = O.minrank(p, 2, max_L=3)
        agree = (v == I.RATE1) == (mr == 1) and (v == I.RATE_HALF) == (mr == 2)
        if v == I.RATE_THIRD_INFEASIBLE:
            agree &= mr is None
        if not agree:
            disagree.append((i, v, mr))
    ok = not disagree
    report(8, ok, f"{QUICK_SAMPLES} instances, disagreements={disagree[:3]}")
    assert ok


def test_c9_etig_spans(report):
    rng = random.Random(9)
    failures = edges = 0
    for _ in range(ETIG_DRAWS):
        e = build_etig(random_etig_sets(rng))
        order = list(e.edges)
        rng.shuffle(order)
        out = assign_etig_vectors(e, F101, rng, order=order)
        edges += len(e.edges)
        failures += any(out.vertex_spans[i].dim > 2 for i in out.vertices)
    ok = failures == 0
    report(9, ok, f"{ETIG_DRAWS} graphs, {edges} edges, {failures} failures over GF(101)")
    assert ok


CLI_RUNS = [
    ["analyze", "p_2stic.json"],
    ["analyze", "p_spic_chain.json", "--q", "2"],
    ["analyze", "p_stic.json", "--text"],
    ["construct", "theorem5/fig5.json", "--seed", "5"],
    ["construct", "theorem5/fig5_twin.json", "--seed", "9", "--policies", "random:3,lex", "--text"],
    ["construct", "p_2stic.json"],
    ["oracle", "p_stic.json", "--subsets", "2,3,5;1,2,3"],
    ["oracle", "p_spic.json", "--L", "3", "--q", "3"],
    ["oracle", "p_tri.json"],
    ["contract", "p_stic.json", "--policy", "random:4"],
    ["export-dot", "p_spic.json"],
]


def test_c10_cli_determinism(report):
    mismatched = []
    for argv in CLI_RUNS:
        args = [argv[0], str(DATA / argv[1]), *argv[2:]]
        outs = [subprocess.run([sys.executable, "-m", "icfeas", *args], capture_output=True) for _ in range(2)]
        if outs[0].stdout != outs[1].stdout or outs[0].returncode != outs[1].returncode or not outs[0].stdout:
            mismatched.append(argv[0] + " " + argv[1])
    ok = not mismatched
    report(10, ok, f"{len(CLI_RUNS)} commands run twice, mismatches={mismatched}")
    assert ok
