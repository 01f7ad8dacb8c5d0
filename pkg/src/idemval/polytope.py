"""Polytopes over exact rationals.

Lower representations are sets of half-spaces ``sum(a_i x_i) <= b``;
deleting a variable is Fourier-Motzkin elimination, which only ever pairs
two constraints. Upper representations are vertex sets inside the unit
hypercube, which plays the neutral element there. Conversions in both
directions (vertex enumeration, facet recovery) make each side an oracle
for the other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .algebra import (LOWER, UPPER, CapacityError, ContractError, RepresentedValuation,
                      ValuationSystem)
from .engine import LowerCalculus, UpperCalculus, delete_basics, remove_subsumed
from .scope import EMPTY, IndexSet

DEFAULT_MAX_DIM = 6
MC_MAX_DIM = 3


def _rat(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_rational(x: Fraction) -> str:
    x = _rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class HalfSpace:
    """``sum(coeffs[i] * scope[i]) <= bound`` in canonical form.

    Coefficients are coprime integers (positive scaling is divided out), so
    two parallel constraints have identical coefficient tuples. The only
    admitted constraint without variables is :data:`FALSUM` (``0 <= -1``).
    """

    scope: IndexSet
    coeffs: tuple
    bound: Fraction

    @classmethod
    def make(cls, coeffs: Mapping[str, object], bound) -> "HalfSpace | None":
        """Canonical half-space; None when the constraint holds everywhere."""
        terms = {v: _rat(a) for v, a in coeffs.items() if _rat(a) != 0}
        bound = _rat(bound)
        if not terms:
            return None if bound >= 0 else FALSUM
        lcm = 1
        for a in terms.values():
            lcm = lcm * a.denominator // math.gcd(lcm, a.denominator)
        ints = {v: int(a * lcm) for v, a in terms.items()}
        g = 0
        for a in ints.values():
            g = math.gcd(g, a)
        scope = IndexSet(terms)
        return cls(scope, tuple(ints[v] // g for v in scope), bound * lcm / g)

    def coefficient(self, v: str) -> int:
        try:
            return self.coeffs[self.scope.index(v)]
        except ValueError:
            return 0

    def as_dict(self) -> dict:
        return dict(zip(self.scope, self.coeffs))

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        return sum((a * point[v] for v, a in zip(self.scope, self.coeffs)), Fraction(0)) <= self.bound

    def sort_key(self):
        return (len(self.scope), tuple(self.scope), self.coeffs, self.bound)

    def __str__(self):
        if not self.scope:
            return f"0 <= {format_rational(self.bound)}"
        parts = []
        for i, (v, a) in enumerate(zip(self.scope, self.coeffs)):
            if i == 0:
                parts.append(f"{a}*{v}")
            else:
                parts.append(f"{'-' if a < 0 else '+'} {abs(a)}*{v}")
        return " ".join(parts) + f" <= {format_rational(self.bound)}"


FALSUM = HalfSpace(EMPTY, (), Fraction(-1))


@dataclass(frozen=True)
class Vertex:
    """A point of the unit hypercube over ``scope``."""

    scope: IndexSet
    coords: tuple

    @classmethod
    def of(cls, coords: Mapping[str, object]) -> "Vertex":
        scope = IndexSet(coords)
        return cls(scope, tuple(_rat(coords[v]) for v in scope))

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_rat(x) for x in self.coords))
        if len(self.coords) != len(self.scope):
            raise ValueError("vertex scope and coordinates differ in length")
        for v, x in zip(self.scope, self.coords):
            if not 0 <= x <= 1:
                raise ContractError(f"coordinate {v}={x} lies outside [0, 1]")

    def as_dict(self) -> dict:
        return dict(zip(self.scope, self.coords))

    def sort_key(self):
        return (len(self.scope), tuple(self.scope), self.coords)

    def __str__(self):
        return "(" + ", ".join(f"{v}={format_rational(x)}" for v, x in zip(self.scope, self.coords)) + ")"


def hpolytope(scope, halfspaces: Iterable[HalfSpace]) -> RepresentedValuation:
    return RepresentedValuation(LOWER, scope, halfspaces)


def vpolytope(scope, points: Iterable) -> RepresentedValuation:
    scope = IndexSet(scope)
    return RepresentedValuation(UPPER, scope, {
        p if isinstance(p, Vertex) else Vertex(scope, tuple(p)) for p in points
    })


def cube(scope) -> set[HalfSpace]:
    """The facets ``0 <= x <= 1`` of the unit hypercube on ``scope``."""
    out = set()
    for v in IndexSet(scope):
        out.add(HalfSpace.make({v: 1}, 1))
        out.add(HalfSpace.make({v: -1}, 0))
    return out


# ---------------------------------------------------------------------------
# half-space representation


def halfspace_leq(a: HalfSpace, b: HalfSpace) -> bool:
    """True iff ``b``'s half-space lies inside ``a``'s.

    Decided for parallel constraints only; other pairs answer False.
    """
    if b == FALSUM:
        return True
    if a == FALSUM:
        return False
    return a.scope == b.scope and a.coeffs == b.coeffs and b.bound <= a.bound


def resolve_pair(li: HalfSpace, lj: HalfSpace, k: str) -> HalfSpace | None:
    """Combine a constraint with positive ``k`` coefficient and one with a
    negative coefficient so that ``k`` cancels."""
    ai, aj = li.coefficient(k), lj.coefficient(k)
    if not (ai > 0 > aj):
        raise ContractError(f"{li} and {lj} do not have opposite signs on {k}")
    coeffs: dict[str, int] = {}
    for v, a in li.as_dict().items():
        coeffs[v] = coeffs.get(v, 0) - aj * a
    for v, a in lj.as_dict().items():
        coeffs[v] = coeffs.get(v, 0) + ai * a
    assert coeffs[k] == 0, "Fourier-Motzkin pair left a nonzero coefficient"
    del coeffs[k]
    return HalfSpace.make(coeffs, -aj * li.bound + ai * lj.bound)


def _fm_pairs(H: Sequence[HalfSpace], k: str, alive: set | None = None):
    pos = [h for h in H if h.coefficient(k) > 0]
    neg = [h for h in H if h.coefficient(k) < 0]
    for li in pos:
        for lj in neg:
            if alive is not None and (li not in alive or lj not in alive):
                continue
            new = resolve_pair(li, lj, k)
            if new is not None:
                yield new, (li, lj)


def fm_delete(H: Iterable[HalfSpace], k: str) -> set[HalfSpace]:
    """Project the constraint set ``H`` along ``k``.

    Constraints without ``k`` pass through; every positive/negative pair on
    ``k`` contributes its resolvent. The result is deduplicated and pruned
    of parallel-dominated constraints; an infeasible resolvent collapses it
    to ``{FALSUM}``.
    """
    H = sorted(set(H), key=HalfSpace.sort_key)
    if FALSUM in H:
        return {FALSUM}
    out = {h for h in H if h.coefficient(k) == 0}
    for new, _ in _fm_pairs(H, k):
        if new == FALSUM:
            return {FALSUM}
        out.add(new)
    return remove_subsumed(HalfSpaceCalculus(), out)


class HalfSpaceCalculus(LowerCalculus):
    def leq(self, a, b):
        return halfspace_leq(a, b)

    def is_contradiction(self, b):
        return b == FALSUM

    def contradiction(self):
        return FALSUM

    def eliminate(self, basics, k, alive):
        return _fm_pairs(basics, k, alive)

    def answer_is_contradiction(self, rep: RepresentedValuation) -> bool:
        basics = set(rep.basics)
        for v in rep.scope:
            basics = fm_delete(basics, v)
        return FALSUM in basics


# ---------------------------------------------------------------------------
# vertex enumeration and facet recovery


def _rows(halfspaces: Iterable[HalfSpace], scope: IndexSet):
    pos = {v: i for i, v in enumerate(scope)}
    rows = []
    for h in halfspaces:
        row = [0] * len(scope)
        for v, a in zip(h.scope, h.coeffs):
            if v not in pos:
                raise ContractError(f"{h} mentions {v}, outside {scope}")
            row[pos[v]] = a
        rows.append((row, h.bound))
    return rows


def vertex_enumerate(P: RepresentedValuation, max_dim: int = DEFAULT_MAX_DIM) -> RepresentedValuation:
    """Extreme points of a half-space representation within the hypercube.

    Every ``d``-subset of constraints (hypercube facets included) is solved;
    solutions satisfying all constraints are basic feasible points and so
    already extreme.
    """
    scope = P.scope
    d = len(scope)
    if d > max_dim:
        raise CapacityError(f"vertex enumeration limited to dimension {max_dim}, got {d}")
    if FALSUM in P.basics:
        return vpolytope(scope, ())
    cons = remove_subsumed(HalfSpaceCalculus(), set(P.basics) | cube(scope))
    if FALSUM in cons:
        return vpolytope(scope, ())
    rows = _rows(sorted(cons, key=HalfSpace.sort_key), scope)
    if d == 0:
        return vpolytope(scope, [()])
    found = set()
    for subset in itertools.combinations(rows, d):
        x = linalg.solve_unique([r for r, _ in subset], [b for _, b in subset])
        if x is None or tuple(x) in found:
            continue
        if all(linalg.dot(r, x) <= b for r, b in rows):
            found.add(tuple(x))
    return vpolytope(scope, found)


def extreme_points(points: Iterable[Sequence]) -> list[tuple]:
    """The points that are not convex combinations of the others."""
    pts = sorted({tuple(_rat(x) for x in p) for p in points})
    keep = list(pts)
    for p in pts:
        others = [q for q in keep if q != p]
        if others and linalg.in_convex_hull(p, others):
            keep.remove(p)
    return keep


def marginalize_vertices(P: RepresentedValuation, J) -> RepresentedValuation:
    J = IndexSet(J)
    if not J <= P.scope:
        raise ContractError(f"{J} is not inside {P.scope}")
    idx = [P.scope.index(v) for v in J]
    projected = {tuple(p.coords[i] for i in idx) for p in P.basics}
    return vpolytope(J, extreme_points(projected))


def extend_vertices(P: RepresentedValuation, scope) -> RepresentedValuation:
    """Product with the unit interval on every new variable."""
    scope = IndexSet(scope)
    if not P.scope <= scope:
        raise ContractError(f"cannot extend {P.scope} to {scope}")
    extra = scope - P.scope
    out = set()
    for p in P.basics:
        for corner in itertools.product((0, 1), repeat=len(extra)):
            out.add(Vertex.of({**p.as_dict(), **dict(zip(extra, corner))}))
    return RepresentedValuation(UPPER, scope, out)


def hull_disjoin(P1: RepresentedValuation, P2: RepresentedValuation) -> RepresentedValuation:
    """Extreme points of the convex hull of the union."""
    scope = P1.scope | P2.scope
    a, b = extend_vertices(P1, scope), extend_vertices(P2, scope)
    pts = [p.coords for p in a.basics] + [p.coords for p in b.basics]
    return vpolytope(scope, extreme_points(pts))


def facets(P: RepresentedValuation) -> RepresentedValuation:
    """Half-space representation of a vertex set.

    Equalities of the affine hull come first (each as two half-spaces);
    inside the hull every hyperplane through ``m`` affinely independent
    vertices that leaves all vertices on one side is a facet.
    """
    scope = P.scope
    pts = sorted(p.coords for p in P.basics)
    if not pts:
        return hpolytope(scope, {FALSUM})
    d = len(scope)
    if d == 0:
        return hpolytope(scope, ())
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    basis = [row for row in linalg.rref(diffs)[0] if any(row)] if diffs else []
    m = len(basis)
    out: set[HalfSpace] = set()

    def add(c, beta):
        h = HalfSpace.make(dict(zip(scope, c)), beta)
        if h is not None:
            out.add(h)

    for n in (linalg.nullspace(basis, d) if basis else linalg.nullspace([], d)):
        beta = linalg.dot(n, p0)
        add(n, beta)
        add([-x for x in n], -beta)
    if m == 0:
        return hpolytope(scope, out)
    for combo in itertools.combinations(pts, m):
        q0 = combo[0]
        rels = [[a - b for a, b in zip(q, q0)] for q in combo[1:]]
        M = [[linalg.dot(B, r) for B in basis] for r in rels]
        t = linalg.nullspace(M, m) if M else linalg.nullspace([], m)
        if len(t) != 1:
            continue
        c = [sum((t[0][r] * basis[r][i] for r in range(m)), Fraction(0)) for i in range(d)]
        beta = linalg.dot(c, q0)
        vals = [linalg.dot(c, p) for p in pts]
        if all(v <= beta for v in vals):
            add(c, beta)
        elif all(v >= beta for v in vals):
            add([-x for x in c], -beta)
    return hpolytope(scope, out)


# ---------------------------------------------------------------------------
# combination of vertex sets


def _box(points):
    return [min(c) for c in zip(*points)], [max(c) for c in zip(*points)]


def mc_points(P1: RepresentedValuation, P2: RepresentedValuation) -> list[tuple]:
    """Intersection points of the minimal consistent vertex-subset pairs.

    A pair ``(R1, R2)`` is minimal consistent exactly when the system
    ``sum(l * R1) = sum(m * R2), sum(l) = sum(m) = 1`` has a unique
    solution and that solution is strictly positive: a smaller consistent
    pair would give a second solution with zeros.
    """
    d = len(P1.scope)
    H1 = sorted(p.coords for p in P1.basics)
    H2 = sorted(p.coords for p in P2.basics)
    found = set()
    for total in range(2, d + 3):
        for a in range(1, total):
            b = total - a
            if a > len(H1) or b > len(H2):
                continue
            boxes2 = [(R2, _box(R2)) for R2 in itertools.combinations(H2, b)]
            for R1 in itertools.combinations(H1, a):
                lo1, hi1 = _box(R1)
                for R2, (lo2, hi2) in boxes2:
                    # disjoint bounding boxes cannot meet
                    if any(l1 > h2 or l2 > h1 for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2)):
                        continue
                    A =[[p[i] for p in R1] + [-q[i] for q in R2] for i in range(d)]
                    A.append([1] * a + [0] * b)
                    A.append([0] * a + [1] * b)
                    sol = linalg.solve_unique(A, [0] * d + [1, 1])
                    if sol is None or any(x <= 0 for x in sol):
                        continue
                    found.add(tuple(
                        sum((sol[j] * R1[j][i] for j in range(a)), Fraction(0)) for i in range(d)
                    ))
    return sorted(found)


def mc_combine(P1: RepresentedValuation, P2: RepresentedValuation,
               max_dim: int | None = MC_MAX_DIM) -> RepresentedValuation:
    """Intersection of two vertex sets via minimal consistent pairs."""
    scope = P1.scope | P2.scope
    if max_dim is not None and len(scope) > max_dim:
        raise CapacityError(f"minimal-consistent combination limited to dimension {max_dim}")
    P1, P2 = extend_vertices(P1, scope), extend_vertices(P2, scope)
    if not P1.basics or not P2.basics:
        return vpolytope(scope, ())
    return vpolytope(scope, extreme_points(mc_points(P1, P2)))


def h_intersection(P1: RepresentedValuation, P2: RepresentedValuation) -> RepresentedValuation:
    """Intersection through the half-space route: pool facets, enumerate."""
    scope = P1.scope | P2.scope
    P1, P2 = extend_vertices(P1, scope), extend_vertices(P2, scope)
    pooled = facets(P1).basics | facets(P2).basics
    return vertex_enumerate(hpolytope(scope, pooled))


# ---------------------------------------------------------------------------
# valuation systems


class HalfSpaceSystem(ValuationSystem):
    """Half-space representations, read inside the hypercube of their scope."""

    value_type = RepresentedValuation

    def __init__(self, max_dim: int = DEFAULT_MAX_DIM):
        self.calc = HalfSpaceCalculus()
        self.max_dim = max_dim

    def _check(self, *vs):
        super()._check(*vs)
        for v in vs:
            if v.kind != LOWER:
                raise TypeError("HalfSpaceSystem needs lower representations")

    def combine(self, v1, v2):
        self._check(v1, v2)
        return hpolytope(v1.scope | v2.scope, v1.basics | v2.basics)

    def marginalize(self, v, scope):
        self._check(v)
        scope = IndexSet(scope)
        if not scope <= v.scope:
            raise ContractError(f"{scope} is not inside {v.scope}")
        basics = set(v.basics) | cube(v.scope)
        for k in v.scope - scope:
            if FALSUM in basics:
                break
            basics, _ = delete_basics(self.calc, basics, k)
        if FALSUM in basics:
            basics = {FALSUM}
        return hpolytope(scope, basics)

    def neutral(self, scope):
        return hpolytope(scope, ())

    def contradiction(self, scope):
        return hpolytope(scope, {FALSUM})

    def to_vertices(self, v):
        return vertex_enumerate(v, self.max_dim)

    def equal(self, v1, v2):
        self._check(v1, v2)
        return v1.scope == v2.scope and self.to_vertices(v1).basics == self.to_vertices(v2).basics

    def disjoin(self, v1, v2):
        self._check(v1, v2)
        return facets(hull_disjoin(self.to_vertices(v1), self.to_vertices(v2)))


class VertexCalculus(UpperCalculus):
    def __init__(self, max_dim: int | None = MC_MAX_DIM):
        self.max_dim = max_dim

    def combine(self, v1, v2):
        return mc_combine(v1, v2, self.max_dim)

    def marginalize(self, v, scope):
        return marginalize_vertices(v, scope)

    def neutral(self, scope):
        return extend_vertices(vpolytope(EMPTY, [()]), scope)

    def extend(self, v, scope):
        return extend_vertices(v, scope)

    def answer_is_contradiction(self, rep):
        return not rep.basics


class VertexSystem(ValuationSystem):
    """Minimal vertex sets inside the hypercube."""

    value_type = RepresentedValuation

    def __init__(self, max_dim: int | None = MC_MAX_DIM):
        self.calc = VertexCalculus(max_dim)

    def _check(self, *vs):
        super()._check(*vs)
        for v in vs:
            if v.kind != UPPER:
                raise TypeError("VertexSystem needs upper representations")

    def combine(self, v1, v2):
        self._check(v1, v2)
        return self.calc.combine(v1, v2)

    def marginalize(self, v, scope):
        self._check(v)
        return marginalize_vertices(v, scope)

    def neutral(self, scope):
        return self.calc.neutral(scope)

    def contradiction(self, scope):
        return vpolytope(scope, ())

    def equal(self, v1, v2):
        self._check(v1, v2)
        return v1.scope == v2.scope and v1.basics == v2.basics

    def extend(self, v, scope):
        self._check(v)
        return extend_vertices(v, scope)

    def disjoin(self, v1, v2):
        self._check(v1, v2)
        return hull_disjoin(v1, v2)
