"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python3 tests/test_acceptance.py`` for the summary alone.
"""

import itertools
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from idemval.algebra import LOWER, RepresentedValuation, check_axioms, random_triples  # noqa: E402
from idemval.cli import main as cli_main  # noqa: E402
from idemval.engine import answer_query, random_order, remove_subsumed  # noqa: E402
from idemval.finite import (ClauseCalculus, ClauseSystem, FrameSpec, Tuple, TupleSystem,  # noqa: E402
                            combine_upper, to_explicit)
from idemval.kb import parse_kb, run_query, serialize_kb, serialize_result  # noqa: E402
from idemval.polytope import (HalfSpaceCalculus, HalfSpaceSystem, cube, fm_delete,  # noqa: E402
                              h_intersection, hpolytope, marginalize_vertices, mc_combine,
                              vertex_enumerate)
from idemval.scope import IndexSet, union  # noqa: E402

from gen import (random_clause, random_clause_rep, random_frames, random_halfspace,  # noqa: E402
                 random_hpolytope, random_scope, random_tuple_rep, random_vpolytope)
from oracles import clause_dicts, models, project  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


def report(number, title, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    return ok


def chain_kb(n):
    lines = ["vbs finite"] + [f"frame p{i} 2" for i in range(1, n + 1)]
    lines += [f"clause !(p{i}=0, p{n}=1)" for i in range(1, n)]
    lines.append("clause !(" + ", ".join(f"p{i}=1" for i in range(1, n)) + f", p{n}=0)")
    lines.append("clause !(p2=1)")
    return "\n".join(lines) + "\n"


# 1 ------------------------------------------------------------------------------

def criterion_worked_example():
    ok, parts = True, []
    for n in (5, 20, 100):
        kb = parse_kb(chain_kb(n))
        t0 = time.perf_counter()
        r = run_query(kb, f"p{n}")
        dt = time.perf_counter() - t0
        text = serialize_result(r)
        good = text == f"clause !(p{n}=1)\n" and r.materialized <= 4 * n
        if n == 100:
            good = good and dt < 1.0
        ok &= good
        parts.append(f"n={n} -> {text.strip()!r}, materialized={r.materialized}<={4 * n}, {dt:.3f}s")
    return ok, "; ".join(parts)


# 2 ------------------------------------------------------------------------------

AXIOM_FRAMES = FrameSpec({"a": 2, "b": 3, "c": 2, "d": 3})


def criterion_axioms():
    ok, parts = True, []
    t_all = time.perf_counter()
    suites = [
        ("finite/clauses", ClauseSystem(AXIOM_FRAMES), lambda r: random_clause_rep(r, AXIOM_FRAMES)),
        ("finite/tuples", TupleSystem(AXIOM_FRAMES), lambda r: random_tuple_rep(r, AXIOM_FRAMES)),
        ("polytope/half-spaces", HalfSpaceSystem(),
         lambda r: random_hpolytope(r, ["x1", "x2", "x3"], 0, 2, 3)),
    ]
    for name, system, make in suites:
        t0 = time.perf_counter()
        triples = random_triples(make, random.Random(2024), 500)
        rep = check_axioms(system, triples, seed=2024)
        failed = sum(r.failed for r in rep.results.values())
        ok &= rep.ok
        parts.append(f"{name} 500 triples, {rep.checks} checks, {failed} failed, "
                     f"{time.perf_counter() - t0:.1f}s")
        if not rep.ok:
            parts += [line for line in rep.lines() if not line.endswith(" 0 failed")]
    total = time.perf_counter() - t_all
    ok &= total < 60
    parts.append(f"total {total:.1f}s < 60s")
    return ok, "; ".join(parts)


# 3 ------------------------------------------------------------------------------

def criterion_finite_oracle():
    rng = random.Random(3)
    queries = mismatches = 0
    for _ in range(200):
        frames = random_frames(rng, rng.randint(1, 5), max_card=3)
        clauses = [random_clause(rng, frames) for _ in range(rng.randint(0, 8))]
        vals = [RepresentedValuation(LOWER, c.scope, {c}) for c in clauses]
        scope = tuple(frames)
        all_models = models(clause_dicts(clauses), frames, scope)
        for target in scope:
            expected = project(all_models, scope, (target,))
            used = set(union(v.scope for v in vals)) | {target}
            for _ in range(3):
                order = random_order(used, target, rng)
                ans = answer_query(ClauseCalculus(frames), vals, target, order=order)
                got = to_explicit(ans.valuation, frames).members
                queries += 1
                if got != expected:
                    mismatches += 1
    return mismatches == 0, f"200 KBs, {queries} (query, order) runs, {mismatches} mismatches"


# 4 ------------------------------------------------------------------------------

def criterion_fm_vs_vertices():
    rng = random.Random(4)
    names = ["x1", "x2", "x3", "x4"]
    t0 = time.perf_counter()
    mismatches, dims = 0, []
    for _ in range(100):
        dim = rng.randint(2, 4)
        scope = IndexSet(rng.sample(names, dim))
        hs = set()
        for _ in range(rng.randint(1, 4)):
            h = random_halfspace(rng, random_scope(rng, scope, 1), -5, 5)
            if h is not None:
                hs.add(h)
        H = hs | cube(scope)
        k = rng.choice(scope)
        rest = scope - {k}
        via_fm = vertex_enumerate(hpolytope(rest, fm_delete(H, k)))
        via_v = marginalize_vertices(vertex_enumerate(hpolytope(scope, H)), rest)
        dims.append(dim)
        if {p.coords for p in via_fm.basics} != {p.coords for p in via_v.basics}:
            mismatches += 1
    dt = time.perf_counter() - t0
    spread = {d: dims.count(d) for d in (2, 3, 4)}
    return mismatches == 0 and dt < 60, f"100 polytopes {spread}, {mismatches} mismatches, {dt:.1f}s"


# 5 ------------------------------------------------------------------------------

def _nonempty_vpolytope(rng, names, dim):
    while True:
        P = random_vpolytope(rng, names, dim)
        if P.basics:
            return P


def criterion_mc_combine():
    rng = random.Random(5)
    t0 = time.perf_counter()
    mismatches, empty = 0, 0
    for dim, count in ((2, 50), (3, 10)):
        names = [f"x{i}" for i in range(1, dim + 1)]
        for _ in range(count):
            P1, P2 = _nonempty_vpolytope(rng, names, dim), _nonempty_vpolytope(rng, names, dim)
            mc = {p.coords for p in mc_combine(P1, P2).basics}
            h = {p.coords for p in h_intersection(P1, P2).basics}
            mismatches += mc != h
            empty += not h
    dt = time.perf_counter() - t0
    return mismatches == 0, f"50 pairs in 2-D, 10 in 3-D ({empty} empty), {mismatches} mismatches, {dt:.1f}s"


# 6 ------------------------------------------------------------------------------

def _upper_reps(frames):
    for scope in ((), ("a",), ("b",), ("a", "b")):
        omega = list(itertools.product(*(range(frames[v]) for v in scope)))
        for r in range(len(omega) + 1):
            for sub in itertools.combinations(omega, r):
                yield IndexSet(scope), frozenset(sub)


def criterion_distributivity():
    t0 = time.perf_counter()
    pairs = mismatches = 0
    for ca, cb in itertools.combinations_with_replacement((1, 2, 3), 2):
        frames = FrameSpec({"a": ca, "b": cb})
        full = ("a", "b")
        omega = list(itertools.product(range(ca), range(cb)))
        reps = list(_upper_reps(frames))
        for (s1, A), (s2, B) in itertools.product(reps, repeat=2):
            H1 = {Tuple(s1, x) for x in A}
            H2 = {Tuple(s2, x) for x in B}
            s = s1 | s2
            got = {t.values for t in combine_upper(H1, H2)}
            # explicit intersection of the cylinders, projected to the union scope
            both = {x for x in omega
                    if project({x}, full, s1) <= A and project({x}, full, s2) <= B}
            mismatches += got != project(both, full, s)
            pairs += 1
    dt = time.perf_counter() - t0
    return mismatches == 0, f"{pairs} pairs over 6 frame shapes, {mismatches} mismatches, {dt:.1f}s"


# 7 ------------------------------------------------------------------------------

def criterion_subsumption():
    rng = random.Random(7)
    bad_finite = bad_poly = 0
    for _ in range(200):
        frames = random_frames(rng, 4, max_card=3)
        H = {random_clause(rng, frames) for _ in range(rng.randint(0, 8))}
        kept = remove_subsumed(ClauseCalculus(frames), H)
        scope = tuple(frames)
        bad_finite += models(clause_dicts(kept), frames, scope) != models(clause_dicts(H), frames, scope)
    names = ["x1", "x2", "x3"]
    for _ in range(200):
        scope = IndexSet(names)
        H = set()
        for _ in range(rng.randint(0, 6)):
            sub = random_scope(rng, scope, 1, 2)
            h = random_halfspace(rng, sub, -3, 3)
            if h is not None:
                H.add(h)
                if rng.random() < 0.5:
                    # a parallel copy with a looser bound, so pruning has work to do
                    H.add(type(h).make(h.as_dict(), h.bound + rng.randint(0, 2)))
        kept = remove_subsumed(HalfSpaceCalculus(), H)
        a = vertex_enumerate(hpolytope(scope, H)).basics
        b = vertex_enumerate(hpolytope(scope, kept)).basics
        bad_poly += a != b or not kept <= H
    return bad_finite == bad_poly == 0, (f"200 clause sets ({bad_finite} changed), "
                                          f"200 half-space sets ({bad_poly} changed)")


# 8 ------------------------------------------------------------------------------

def _run_cli(argv):
    import contextlib
    import io
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main(argv)
    return code, out.getvalue(), err.getvalue()


def criterion_cli():
    ok, parts = True, []
    for case in ("chain4", "triangle"):
        kb_path = GOLDEN / f"{case}.kb"
        first = _run_cli(["query", "--kb", str(kb_path), "--trace"])
        second = _run_cli(["query", "--kb", str(kb_path), "--trace"])
        golden = (0, (GOLDEN / f"{case}.out").read_text(), (GOLDEN / f"{case}.trace").read_text())
        kb = parse_kb(kb_path.read_text())
        text = serialize_kb(kb)
        round_trip = parse_kb(text) == kb and serialize_kb(parse_kb(text)) == text
        good = first == second == golden and round_trip
        ok &= good
        parts.append(f"{case}: golden {'match' if first == golden else 'DIFF'}, "
                     f"repeat {'identical' if first == second else 'DIFFERENT'}, "
                     f"round-trip {'ok' if round_trip else 'BROKEN'}")
    return ok, "; ".join(parts)


CRITERIA = [
    (1, "worked chain example", criterion_worked_example),
    (2, "axiom suite", criterion_axioms),
    (3, "finite oracle equivalence", criterion_finite_oracle),
    (4, "FM vs vertex projection", criterion_fm_vs_vertices),
    (5, "minimal-consistent combination vs H-route", criterion_mc_combine),
    (6, "exhaustive distributivity of upper combination", criterion_distributivity),
    (7, "subsumption conservativity", criterion_subsumption),
    (8, "CLI golden files, determinism, round-trip", criterion_cli),
]


def _check(i):
    number, title, fn = CRITERIA[i]
    ok, detail = fn()
    assert report(number, title, ok, detail), detail


def test_1_worked_chain_example():
    _check(0)


def test_2_axiom_suite():
    _check(1)


def test_3_finite_oracle_equivalence():
    _check(2)


def test_4_fm_vs_vertex_projection():
    _check(3)


def test_5_mc_combine_vs_h_route():
    _check(4)


def test_6_exhaustive_distributivity():
    _check(5)


def test_7_subsumption_conservativity():
    _check(6)


def test_8_cli_golden_round_trip():
    _check(7)


if __name__ == "__main__":
    results = [report(n, title, *fn()) for n, title, fn in CRITERIA]
    sys.exit(0 if all(results) else 1)
