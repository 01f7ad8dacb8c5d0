import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idemval.algebra import CapacityError, ContractError
from idemval.linalg import in_convex_hull
from idemval.polytope import (FALSUM, HalfSpace, HalfSpaceSystem, Vertex, cube, extend_vertices,
                              extreme_points, facets, fm_delete, h_intersection, halfspace_leq,
                              hpolytope, hull_disjoin, marginalize_vertices, mc_combine,
                              resolve_pair, vertex_enumerate, vpolytope)

from gen import random_hpolytope
from oracles import grid, in_hull_2d_or_less, satisfies


def L(bound, **coeffs):
    return HalfSpace.make(coeffs, bound)


def pts(P):
    return {p.coords for p in P.basics}


SQUARE = vpolytope(["x1", "x2"], [(0, 0), (0, 1), (1, 0), (1, 1)])


# --- half-spaces --------------------------------------------------------------

def test_halfspace_canonical_form():
    assert L(2, x1=2, x2=2) == L(1, x1=1, x2=1)
    assert L(F(1, 2), x1=F(1, 2)) == L(1, x1=1)
    assert L(1, x1=3, x2=-6).coeffs == (1, -2)
    assert L(1, x1=3, x2=-6).bound == F(1, 3)
    assert str(L(F(1, 2), x1=1, x2=-1)) == "1*x1 - 1*x2 <= 1/2"


def test_halfspace_without_variables():
    assert HalfSpace.make({"x1": 0}, 3) is None
    assert HalfSpace.make({}, -1) == FALSUM


def test_vertex_outside_cube_rejected():
    with pytest.raises(ContractError):
        Vertex.of({"x1": F(3, 2)})


def test_halfspace_leq_examples():
    assert halfspace_leq(L(1, x1=1), L(0, x1=1))
    assert not halfspace_leq(L(0, x1=1), L(0, x2=1))
    assert halfspace_leq(L(2, x1=2, x2=2), L(1, x1=1, x2=1))
    assert halfspace_leq(L(0, x1=1), FALSUM)


# --- Fourier-Motzkin ----------------------------------------------------------

def test_fm_delete_single_pair():
    assert fm_delete({L(1, x1=1, x2=1), L(0, x2=-1)}, "x2") == {L(1, x1=1)}


def test_fm_delete_one_sided_constraint_vanishes():
    assert fm_delete({L(1, x2=1)}, "x2") == set()


def test_fm_delete_derived_region():
    H = {L(1, x1=1), L(0, x1=-1), L(0, x1=1, x2=-1), L(0, x2=1, x1=-2)}
    out = fm_delete(H, "x1")
    assert out == {L(2, x2=1), L(0, x2=-1)}
    # oracle: the region's corners lie on pairs of its lines; project them onto x2
    corners = [(0, 0), (1, 1), (1, 2)]
    for x1, x2 in corners:
        assert all(h.holds({"x1": F(x1), "x2": F(x2)}) for h in H)
    proj = {c[1] for c in corners}
    assert (min(proj), max(proj)) == (0, 2)


def test_fm_delete_infeasible():
    assert fm_delete({L(0, x1=1, x2=1), L(-1, x1=-1)}, "x1") != {FALSUM}
    assert fm_delete({L(0, x1=1), L(-1, x1=-1)}, "x1") == {FALSUM}


def test_resolve_pair_requires_opposite_signs():
    with pytest.raises(ContractError):
        resolve_pair(L(1, x1=1), L(1, x1=1), "x1")


def _interval_feasible(q, rest, k, H):
    """Exact oracle: is there x_k in [0, 1] extending ``q`` inside ``H``?"""
    point = dict(zip(rest, q))
    lo, hi = F(0), F(1)
    for h in H:
        a = h.coefficient(k)
        r = h.bound - sum((c * point[v] for v, c in h.as_dict().items() if v != k), F(0))
        if a == 0:
            if r < 0:
                return False
        elif a > 0:
            hi = min(hi, r / a)
        else:
            lo = max(lo, r / a)
    return lo <= hi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_fm_delete_matches_interval_oracle(seed):
    rng = random.Random(seed)
    P = random_hpolytope(rng, ["x1", "x2", "x3"], 2, 3, 4, with_cube=True)
    k = rng.choice(P.scope)
    rest = P.scope - {k}
    out = fm_delete(P.basics, k)
    for h in out:
        assert h == FALSUM or k not in h.scope
    for q in grid(len(rest), 4):
        assert satisfies(q, rest, out) == _interval_feasible(q, rest, k, P.basics)


def test_fm_is_scale_invariant():
    H = {L(1, x1=1, x2=1), L(0, x2=-1), L(F(1, 2), x2=1, x1=-1)}
    scaled = {HalfSpace.make({v: 7 * a for v, a in h.as_dict().items()}, 7 * h.bound) for h in H}
    assert fm_delete(H, "x2") == fm_delete(scaled, "x2")


# --- vertex enumeration and conversions ---------------------------------------

def test_vertex_enumerate_examples():
    assert pts(vertex_enumerate(hpolytope(["x1", "x2"], cube(["x1", "x2"])))) == pts(SQUARE)
    assert pts(vertex_enumerate(hpolytope(["x1", "x2"], {L(1, x1=1, x2=1)}))) == {(0, 0), (1, 0), (0, 1)}
    assert pts(vertex_enumerate(hpolytope(["x1"], {L(0, x1=1), L(0, x1=-1)}))) == {(0,)}


def test_vertex_enumerate_infeasible_and_limits():
    assert pts(vertex_enumerate(hpolytope(["x1"], {L(-1, x1=1)}))) == set()
    assert pts(vertex_enumerate(hpolytope(["x1"], {FALSUM}))) == set()
    big = [f"y{i}" for i in range(7)]
    with pytest.raises(CapacityError):
        vertex_enumerate(hpolytope(big, ()))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_vertex_enumerate_matches_grid_membership(seed):
    rng = random.Random(seed)
    P = random_hpolytope(rng, ["x1", "x2"], 2, 2, 4)
    V = vertex_enumerate(P)
    vs = list(pts(V))
    for v in vs:
        assert satisfies(v, P.scope, P.basics)
    for q in grid(2, 6):
        assert satisfies(q, P.scope, P.basics) == in_hull_2d_or_less(q, vs)


def test_marginalize_vertices_examples():
    assert pts(marginalize_vertices(SQUARE, ["x1"])) == {(0,), (1,)}
    tri = vpolytope(["x1", "x2"], [(0, 0), (1, 0), (F(1, 2), 1)])
    assert pts(marginalize_vertices(tri, ["x1"])) == {(0,), (1,)}
    with pytest.raises(ContractError):
        marginalize_vertices(tri, ["x9"])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_marginalize_vertices_matches_double_conversion(seed):
    rng = random.Random(seed)
    P = random_hpolytope(rng, ["x1", "x2", "x3"], 3, 3, 4, with_cube=True)
    k = rng.choice(P.scope)
    V = vertex_enumerate(P)
    via_v = marginalize_vertices(V, P.scope - {k})
    via_h = vertex_enumerate(hpolytope(P.scope - {k}, fm_delete(P.basics, k)))
    assert pts(via_v) == pts(via_h)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_facets_round_trip(seed):
    rng = random.Random(seed)
    P = random_hpolytope(rng, ["x1", "x2", "x3"], 1, 3, 4)
    V = vertex_enumerate(P)
    assert pts(vertex_enumerate(facets(V))) == pts(V)


def test_extend_vertices_takes_product_with_interval():
    P = vpolytope(["x1"], [(F(1, 2),)])
    assert pts(extend_vertices(P, ["x1", "x2"])) == {(F(1, 2), 0), (F(1, 2), 1)}


# --- disjunction and combination ------------------------------------------------

def test_hull_disjoin_examples():
    assert pts(hull_disjoin(SQUARE, SQUARE)) == pts(SQUARE)
    a, b = vpolytope(["x1", "x2"], [(0, 0)]), vpolytope(["x1", "x2"], [(1, 1)])
    assert pts(hull_disjoin(a, b)) == {(0, 0), (1, 1)}


def test_hull_disjoin_overlapping_squares():
    h = F(1, 2)
    s1 = vpolytope(["x1", "x2"], [(0, 0), (0, h), (h, 0), (h, h)])
    s2 = vpolytope(["x1", "x2"], [(F(1, 4), F(1, 4)), (F(1, 4), 1), (1, F(1, 4)), (1, 1)])
    pooled = list(pts(s1) | pts(s2))
    # brute-force filter: a point is extreme iff it is outside the hull of the others
    expected = {p for p in pooled if not in_hull_2d_or_less(p, [q for q in pooled if q != p])}
    assert pts(hull_disjoin(s1, s2)) == expected
    assert expected == {(0, 0), (0, h), (h, 0), (F(1, 4), 1), (1, F(1, 4)), (1, 1)}


def test_mc_combine_examples():
    assert pts(mc_combine(SQUARE, SQUARE)) == pts(SQUARE)
    right = vpolytope(["x1", "x2"], [(F(1, 2), 0), (F(1, 2), 1), (1, 0), (1, 1)])
    expected = {(F(1, 2), 0), (F(1, 2), 1), (1, 0), (1, 1)}
    assert pts(mc_combine(SQUARE, right)) == expected
    assert pts(h_intersection(SQUARE, right)) == expected
    seg1 = vpolytope(["x1"], [(0,), (F(1, 4),)])
    seg2 = vpolytope(["x1"], [(F(1, 2),), (1,)])
    assert pts(mc_combine(seg1, seg2)) == set()


def test_mc_combine_dimension_limit():
    P = vpolytope(["a", "b", "c", "d"], [(0, 0, 0, 0)])
    with pytest.raises(CapacityError):
        mc_combine(P, P)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_mc_combine_matches_h_route_2d(seed):
    rng = random.Random(seed)
    names = ["x1", "x2"]
    P1 = vertex_enumerate(random_hpolytope(rng, names, 1, 2, 3))
    P2 = vertex_enumerate(random_hpolytope(rng, names, 1, 2, 3))
    assert pts(mc_combine(P1, P2)) == pts(h_intersection(P1, P2))


def test_extreme_points_drops_interior():
    ps = [(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4)), (F(1, 2), F(1, 2))]
    assert set(extreme_points(ps)) == {(0, 0), (1, 0), (0, 1)}
    for p in ps:
        assert in_convex_hull(p, extreme_points(ps))


# --- system semantics -----------------------------------------------------------

def test_halfspace_system_reads_inside_cube():
    sysm = HalfSpaceSystem()
    P = hpolytope(["x1", "x2"], {L(1, x1=1, x2=1)})
    m = sysm.marginalize(P, ["x2"])
    assert pts(vertex_enumerate(m)) == {(0,), (1,)}
    assert sysm.is_contradiction(hpolytope(["x1"], {L(-1, x1=1)}))
    assert sysm.equal(sysm.neutral(["x1"]), hpolytope(["x1"], cube(["x1"])))
