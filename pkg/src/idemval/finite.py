"""Finite frames: valuations are subsets of a product of finite sets.

Lower representations are sets of generalized clauses (each forbids one
tuple); deleting a variable is generalized resolution, which takes one
clause per value of the deleted variable. Upper representations are sets
of tuples; combining two of them distributes over the pairs. Explicit sets
serve as the oracle for both.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .algebra import (LOWER, UPPER, CapacityError, ContractError, RepresentedValuation,
                      ValuationSystem, powerset)
from .engine import LowerCalculus, UpperCalculus, delete_basics, remove_subsumed
from .scope import EMPTY, IndexSet, union

DEFAULT_LIMIT = 2 ** 20


class FrameSpec(dict):
    """Variable name -> cardinality of its frame."""

    def __init__(self, sizes: Mapping[str, int] = (), **kw):
        super().__init__(sizes, **kw)
        for v, n in self.items():
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"frame of {v!r} must have a positive size, got {n!r}")

    def size(self, scope) -> int:
        n = 1
        for v in scope:
            n *= self.card(v)
        return n

    def card(self, v: str) -> int:
        try:
            return self[v]
        except KeyError:
            raise ContractError(f"variable {v!r} has no declared frame") from None

    def tuples(self, scope, limit: int = DEFAULT_LIMIT) -> Iterator[tuple]:
        if self.size(scope) > limit:
            raise CapacityError(f"frame of {IndexSet(scope)} has {self.size(scope)} tuples, limit {limit}")
        return itertools.product(*(range(self.card(v)) for v in scope))

    def check(self, scope, values: Sequence[int]):
        for v, x in zip(scope, values):
            if not 0 <= x < self.card(v):
                raise ContractError(f"value {x} out of range for {v} (size {self.card(v)})")


def _fmt(scope, values) -> str:
    return "(" + ", ".join(f"{v}={x}" for v, x in zip(scope, values)) + ")"


def _build(scope_values: Mapping[str, int]) -> tuple[IndexSet, tuple]:
    scope = IndexSet(scope_values)
    return scope, tuple(scope_values[v] for v in scope)


@dataclass(frozen=True)
class Clause:
    """The set of all tuples except one: ``!(v1=a, v2=b, ...)``.

    A clause on the empty scope forbids the only empty tuple and therefore
    denotes the contradiction.
    """

    scope: IndexSet
    forbidden: tuple

    @classmethod
    def of(cls, assignment: Mapping[str, int]) -> "Clause":
        return cls(*_build(assignment))

    def __post_init__(self):
        if len(self.scope) != len(self.forbidden):
            raise ValueError("clause scope and tuple differ in length")

    def as_dict(self) -> dict:
        return dict(zip(self.scope, self.forbidden))

    def sort_key(self):
        return (len(self.scope), tuple(self.scope), self.forbidden)

    def __str__(self):
        return "!" + _fmt(self.scope, self.forbidden)


@dataclass(frozen=True)
class Tuple:
    """A single element of a frame: ``(v1=a, v2=b, ...)``."""

    scope: IndexSet
    values: tuple

    @classmethod
    def of(cls, assignment: Mapping[str, int]) -> "Tuple":
        return cls(*_build(assignment))

    def __post_init__(self):
        if len(self.scope) != len(self.values):
            raise ValueError("tuple scope and values differ in length")

    def as_dict(self) -> dict:
        return dict(zip(self.scope, self.values))

    def project(self, scope) -> "Tuple":
        d = self.as_dict()
        scope = IndexSet(scope)
        return Tuple(scope, tuple(d[v] for v in scope))

    def sort_key(self):
        return (len(self.scope), tuple(self.scope), self.values)

    def __str__(self):
        return _fmt(self.scope, self.values)


CONTRADICTION_CLAUSE = Clause(EMPTY, ())


@dataclass(frozen=True)
class ExplicitSet:
    """A subset of a frame given by its members (tuples in scope order)."""

    scope: IndexSet
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "scope", IndexSet(self.scope))
        object.__setattr__(self, "members", frozenset(self.members))


def _project(scope: IndexSet, x: tuple, sub: Iterable[str]) -> tuple:
    pos = {v: i for i, v in enumerate(scope)}
    return tuple(x[pos[v]] for v in sub)


def _compatible(a: Mapping, b: Mapping) -> bool:
    return all(b[v] == x for v, x in a.items() if v in b)


# ---------------------------------------------------------------------------
# oracle


class ExplicitSetSystem(ValuationSystem):
    """Subsets of frames with intersection-combination and projection."""

    value_type = ExplicitSet

    def __init__(self, frames: FrameSpec, limit: int = DEFAULT_LIMIT, enumerate_limit: int = 6):
        self.frames = frames
        self.limit = limit
        self.enumerate_limit = enumerate_limit

    def combine(self, v1, v2):
        self._check(v1, v2)
        scope = v1.scope | v2.scope
        members = {
            x for x in self.frames.tuples(scope, self.limit)
            if _project(scope, x, v1.scope) in v1.members
            and _project(scope, x, v2.scope) in v2.members
        }
        return ExplicitSet(scope, members)

    def marginalize(self, v, scope):
        self._check(v)
        scope = IndexSet(scope)
        if not scope <= v.scope:
            raise ContractError(f"{scope} is not inside {v.scope}")
        return ExplicitSet(scope, {_project(v.scope, x, scope) for x in v.members})

    def neutral(self, scope):
        scope = IndexSet(scope)
        return ExplicitSet(scope, set(self.frames.tuples(scope, self.limit)))

    def contradiction(self, scope):
        return ExplicitSet(scope, ())

    def equal(self, v1, v2):
        self._check(v1, v2)
        return v1.scope == v2.scope and v1.members == v2.members

    def extend(self, v, scope):
        return super().extend(v, scope)

    def disjoin(self, v1, v2):
        scope = v1.scope | v2.scope
        a, b = self.extend(v1, scope), self.extend(v2, scope)
        return ExplicitSet(scope, a.members | b.members)

    def all_valuations(self, scope):
        size = self.frames.size(scope)
        if size > self.enumerate_limit:
            return None
        frame = list(self.frames.tuples(scope))
        return [ExplicitSet(scope, s) for s in powerset(frame)]


def to_explicit(rep: RepresentedValuation, frames: FrameSpec, limit: int = DEFAULT_LIMIT) -> ExplicitSet:
    """The set a represented valuation denotes, materialized."""
    scope = rep.scope
    frame = frames.tuples(scope, limit)
    if rep.kind == LOWER:
        checks = [(b.scope, b.forbidden) for b in rep.basics]
        members = {
            x for x in frame
            if not any(_project(scope, x, s) == f for s, f in checks)
        }
    else:
        wanted = [(b.scope, b.values) for b in rep.basics]
        members = {
            x for x in frame
            if any(_project(scope, x, s) == vals for s, vals in wanted)
        }
    return ExplicitSet(scope, members)


def lower_rep(s: ExplicitSet, frames: FrameSpec) -> frozenset:
    """Clauses forbidding each tuple outside ``s``."""
    return frozenset(
        Clause(s.scope, x) for x in frames.tuples(s.scope) if x not in s.members
    )


def upper_rep(s: ExplicitSet) -> frozenset:
    return frozenset(Tuple(s.scope, x) for x in s.members)


# ---------------------------------------------------------------------------
# lower representation: generalized resolution


def clause_leq(a: Clause, b: Clause) -> bool:
    """``a`` is less informative than ``b``: b's scope is inside a's and they agree there."""
    if not b.scope <= a.scope:
        return False
    da = a.as_dict()
    return all(da[v] == x for v, x in zip(b.scope, b.forbidden))


def _resolvents(H: Sequence[Clause], k: str, frames: FrameSpec, alive: set | None = None):
    card = frames.card(k)
    buckets: list[list[Clause]] = [[] for _ in range(card)]
    for c in H:
        d = c.as_dict()
        if k not in d:
            raise ContractError(f"clause {c} does not mention {k}")
        frames.check([k], [d[k]])
        buckets[d[k]].append(c)
    if any(not b for b in buckets):
        return

    def walk(value: int, merged: dict, parents: list):
        if value == card:
            yield Clause.of(merged), tuple(parents)
            return
        for c in buckets[value]:
            if alive is not None and c not in alive:
                continue
            d = c.as_dict()
            del d[k]
            if not _compatible(d, merged):
                continue
            yield from walk(value + 1, {**merged, **d}, parents + [c])

    yield from walk(0, {}, [])


def resolve_delete(H: Iterable[Clause], k: str, frames: FrameSpec) -> set[Clause]:
    """Clauses representing the deletion of ``k`` from the clauses ``H``.

    Each output merges one clause per value of ``k``, chosen so that they
    agree on every other shared variable. Every clause in ``H`` must
    mention ``k``.
    """
    H = sorted(set(H), key=Clause.sort_key)
    return {c for c, _ in _resolvents(H, k, frames)}


class ClauseCalculus(LowerCalculus):
    def __init__(self, frames: FrameSpec):
        self.frames = frames

    def leq(self, a, b):
        return clause_leq(a, b)

    def is_contradiction(self, b):
        return not b.scope

    def contradiction(self):
        return CONTRADICTION_CLAUSE

    def eliminate(self, basics, k, alive):
        return _resolvents(basics, k, self.frames, alive)

    def answer_is_contradiction(self, rep: RepresentedValuation) -> bool:
        if any(self.is_contradiction(b) for b in rep.basics):
            return True
        return not to_explicit(rep, self.frames).members


class ClauseSystem(ValuationSystem):
    """Lower representations by clauses, with resolution for marginals."""

    value_type = RepresentedValuation

    def __init__(self, frames: FrameSpec, limit: int = DEFAULT_LIMIT, enumerate_limit: int = 6):
        self.frames = frames
        self.calc = ClauseCalculus(frames)
        self.oracle = ExplicitSetSystem(frames, limit, enumerate_limit)
        self.limit = limit

    def _check(self, *vs):
        super()._check(*vs)
        for v in vs:
            if v.kind != LOWER:
                raise TypeError("ClauseSystem needs lower representations")

    def combine(self, v1, v2):
        self._check(v1, v2)
        return RepresentedValuation(LOWER, v1.scope | v2.scope, v1.basics | v2.basics)

    def marginalize(self, v, scope):
        self._check(v)
        scope = IndexSet(scope)
        if not scope <= v.scope:
            raise ContractError(f"{scope} is not inside {v.scope}")
        basics = set(v.basics)
        for k in v.scope - scope:
            if any(self.calc.is_contradiction(b) for b in basics):
                break
            basics, _ = delete_basics(self.calc, basics, k)
        if any(self.calc.is_contradiction(b) for b in basics):
            basics = {CONTRADICTION_CLAUSE}
        return RepresentedValuation(LOWER, scope, basics)

    def neutral(self, scope):
        return RepresentedValuation(LOWER, scope, ())

    def contradiction(self, scope):
        return RepresentedValuation(LOWER, scope, {CONTRADICTION_CLAUSE})

    def equal(self, v1, v2):
        self._check(v1, v2)
        return v1.scope == v2.scope and (
            to_explicit(v1, self.frames, self.limit) == to_explicit(v2, self.frames, self.limit)
        )

    def disjoin(self, v1, v2):
        """Union of the two sets, clause by clause.

        The union of two clauses is the clause forbidding the join of their
        forbidden tuples, or everything when those tuples disagree.
        """
        self._check(v1, v2)
        scope = v1.scope | v2.scope
        out = set()
        for a in v1.basics:
            for b in v2.basics:
                da, db = a.as_dict(), b.as_dict()
                if _compatible(da, db):
                    out.add(Clause.of({**da, **db}))
        return RepresentedValuation(LOWER, scope, remove_subsumed(self.calc, out))

    def all_valuations(self, scope):
        sets = self.oracle.all_valuations(scope)
        if sets is None:
            return None
        return [RepresentedValuation(LOWER, scope, lower_rep(s, self.frames)) for s in sets]


# ---------------------------------------------------------------------------
# upper representation: tuples


def combine_upper(H1: Iterable[Tuple], H2: Iterable[Tuple]) -> set[Tuple]:
    """Joins of every consistent pair of tuples from ``H1`` and ``H2``."""
    out = set()
    for a in H1:
        da = a.as_dict()
        for b in H2:
            db = b.as_dict()
            if _compatible(da, db):
                out.add(Tuple.of({**da, **db}))
    return out


def marginalize_upper(H: Iterable[Tuple], J) -> set[Tuple]:
    J = IndexSet(J)
    out = set()
    for t in H:
        if not J <= t.scope:
            raise ContractError(f"{J} is not inside {t.scope}")
        out.add(t.project(J))
    return out


def extend_tuples(H: Iterable[Tuple], scope, frames: FrameSpec) -> set[Tuple]:
    scope = IndexSet(scope)
    out = set()
    for t in H:
        extra = scope - t.scope
        for vals in frames.tuples(extra):
            out.add(Tuple.of({**t.as_dict(), **dict(zip(extra, vals))}))
    return out


class TupleCalculus(UpperCalculus):
    def __init__(self, frames: FrameSpec):
        self.frames = frames

    def combine(self, v1, v2):
        return RepresentedValuation(UPPER, v1.scope | v2.scope,
                                    combine_upper(self.homogeneous(v1).basics,
                                                  self.homogeneous(v2).basics))

    def homogeneous(self, v):
        if all(t.scope == v.scope for t in v.basics):
            return v
        return RepresentedValuation(UPPER, v.scope, extend_tuples(v.basics, v.scope, self.frames))

    def marginalize(self, v, scope):
        v = self.homogeneous(v)
        return RepresentedValuation(UPPER, scope, marginalize_upper(v.basics, scope))

    def neutral(self, scope):
        scope = IndexSet(scope)
        return RepresentedValuation(UPPER, scope, {Tuple(scope, x) for x in self.frames.tuples(scope)})

    def extend(self, v, scope):
        return RepresentedValuation(UPPER, scope, extend_tuples(v.basics, scope, self.frames))

    def answer_is_contradiction(self, rep):
        return not rep.basics


class TupleSystem(ValuationSystem):
    """Upper representations by tuples; combination distributes over pairs."""

    value_type = RepresentedValuation

    def __init__(self, frames: FrameSpec, limit: int = DEFAULT_LIMIT, enumerate_limit: int = 6):
        self.frames = frames
        self.calc = TupleCalculus(frames)
        self.oracle = ExplicitSetSystem(frames, limit, enumerate_limit)
        self.limit = limit

    def _check(self, *vs):
        super()._check(*vs)
        for v in vs:
            if v.kind != UPPER:
                raise TypeError("TupleSystem needs upper representations")

    def combine(self, v1, v2):
        self._check(v1, v2)
        return self.calc.combine(v1, v2)

    def marginalize(self, v, scope):
        self._check(v)
        scope = IndexSet(scope)
        if not scope <= v.scope:
            raise ContractError(f"{scope} is not inside {v.scope}")
        return self.calc.marginalize(v, scope)

    def neutral(self, scope):
        return self.calc.neutral(scope)

    def contradiction(self, scope):
        return RepresentedValuation(UPPER, scope, ())

    def equal(self, v1, v2):
        self._check(v1, v2)
        return v1.scope == v2.scope and (
            to_explicit(v1, self.frames, self.limit) == to_explicit(v2, self.frames, self.limit)
        )

    def disjoin(self, v1, v2):
        self._check(v1, v2)
        scope = v1.scope | v2.scope
        return RepresentedValuation(
            UPPER, scope,
            extend_tuples(v1.basics, scope, self.frames) | extend_tuples(v2.basics, scope, self.frames),
        )

    def all_valuations(self, scope):
        sets = self.oracle.all_valuations(scope)
        if sets is None:
            return None
        return [RepresentedValuation(UPPER, scope, upper_rep(s)) for s in sets]


# ---------------------------------------------------------------------------
# CNF import

_LITERAL = re.compile(r"^(!|¬|~|-)?([A-Za-z_][A-Za-z0-9_]*)$")


class CnfError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_cnf_clause(text: str, frames: FrameSpec | None = None, lineno: int = 1) -> Clause:
    """One disjunction of literals (``p1 | !p2 | p3``) as the clause forbidding
    its falsifying assignment."""
    tokens = [t for t in re.split(r"[\s|,∨]+", text.strip()) if t]
    if not tokens:
        raise CnfError(lineno, "empty clause")
    forbidden: dict[str, int] = {}
    for tok in tokens:
        m = _LITERAL.match(tok)
        if not m:
            raise CnfError(lineno, f"bad literal {tok!r}")
        neg, var = m.groups()
        if frames is not None:
            if var not in frames:
                raise CnfError(lineno, f"undeclared variable {var!r}")
            if frames[var] != 2:
                raise CnfError(lineno, f"variable {var!r} is not binary")
        value = 1 if neg else 0
        if forbidden.get(var, value) != value:
            raise CnfError(lineno, f"tautological clause: {var} occurs with both signs")
        forbidden[var] = value
    return Clause.of(forbidden)


def from_cnf(text: str, frames: FrameSpec | None = None) -> set[Clause]:
    """Clauses from a CNF listing, one disjunction per line (``#`` comments)."""
    out = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            out.add(parse_cnf_clause(line, frames, lineno))
    return out


def scope_of(basics: Iterable) -> IndexSet:
    return union(b.scope for b in basics)
