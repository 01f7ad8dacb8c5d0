"""The idempotent valuation system contract and an axiom-checking harness.

A :class:`ValuationSystem` bundles the operations of one instance
(combination, marginalization, neutral and contradiction per scope,
semantic equality and disjunction). The information order, extension and
the axiom harness are written once here against that contract.
"""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .scope import IndexSet

LOWER = "lower"
UPPER = "upper"


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class CapacityError(RuntimeError):
    """An oracle or brute-force routine was asked to exceed its size limit."""


@dataclass(frozen=True)
class RepresentedValuation:
    """A valuation given by a finite set of basic valuations.

    ``kind == "lower"`` denotes the combination of ``basics``;
    ``kind == "upper"`` denotes their disjunction. The scope is carried
    separately so that extension only rewrites it.
    """

    kind: str
    scope: IndexSet
    basics: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in (LOWER, UPPER):
            raise ValueError(f"unknown representation kind {self.kind!r}")
        object.__setattr__(self, "scope", IndexSet(self.scope))
        object.__setattr__(self, "basics", frozenset(self.basics))
        for b in self.basics:
            if not b.scope <= self.scope:
                raise ContractError(f"basic valuation {b} lies outside scope {self.scope}")

    def with_scope(self, scope) -> "RepresentedValuation":
        return RepresentedValuation(self.kind, scope, self.basics)


class ValuationSystem(ABC):
    """One instance of an idempotent valuation system."""

    #: the Python type of valuations handled by this system
    value_type: type = object

    def _check(self, *vs):
        for v in vs:
            if not isinstance(v, self.value_type):
                raise TypeError(
                    f"{type(self).__name__} cannot operate on {type(v).__name__}"
                )

    @abstractmethod
    def combine(self, v1, v2): ...

    @abstractmethod
    def marginalize(self, v, scope): ...

    @abstractmethod
    def neutral(self, scope): ...

    @abstractmethod
    def contradiction(self, scope): ...

    @abstractmethod
    def equal(self, v1, v2) -> bool: ...

    @abstractmethod
    def disjoin(self, v1, v2): ...

    def is_contradiction(self, v) -> bool:
        return self.equal(v, self.contradiction(v.scope))

    def all_valuations(self, scope) -> Iterable | None:
        """Every valuation on ``scope`` when that is enumerable, else None."""
        return None

    def extend(self, v, scope):
        """Extension to a larger scope: combination with the neutral element."""
        self._check(v)
        scope = IndexSet(scope)
        if not v.scope <= scope:
            raise ContractError(f"cannot extend scope {v.scope} to non-superset {scope}")
        if scope == v.scope:
            return v
        return self.combine(v, self.neutral(scope))

    def leq(self, v1, v2) -> bool:
        """True iff ``v1`` is less informative than ``v2``."""
        self._check(v1, v2)
        both = v1.scope | v2.scope
        return self.equal(self.combine(v1, v2), self.extend(v2, both))


# ---------------------------------------------------------------------------
# axiom harness


@dataclass
class AxiomResult:
    name: str
    passed: int = 0
    failed: int = 0
    witnesses: list = field(default_factory=list)

    def record(self, ok: bool, witness: Any):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.witnesses) < 5:
                self.witnesses.append(witness)


@dataclass
class AxiomReport:
    results: dict[str, AxiomResult]

    @property
    def ok(self) -> bool:
        return all(r.failed == 0 for r in self.results.values())

    @property
    def checks(self) -> int:
        return sum(r.passed + r.failed for r in self.results.values())

    def lines(self) -> list[str]:
        return [
            f"{r.name}: {r.passed} passed, {r.failed} failed"
            for r in self.results.values()
        ]


AXIOMS = (
    "commutativity",
    "associativity",
    "marginal-chain",
    "combination-marginal",
    "idempotence",
    "self-marginal",
    "partial-order",
    "monotone-marginal",
    "combination-supremum",
    "marginal-supremum",
    "disjunction-marginal",
)


def _random_subset(rng: random.Random, s: Sequence[str]) -> IndexSet:
    return IndexSet(v for v in s if rng.random() < 0.5)


def check_axioms(system: ValuationSystem, samples, seed: int = 0) -> AxiomReport:
    """Check the valuation axioms on ``samples``, a list of triples.

    Sub-scopes needed by the marginalization axioms are drawn with a
    seeded RNG. Failures are recorded with their witnesses and never raise.
    """
    rng = random.Random(seed)
    res = {name: AxiomResult(name) for name in AXIOMS}
    eq = system.equal
    for triple in samples:
        v1, v2, v3 = triple
        c12 = system.combine(v1, v2)

        res["commutativity"].record(eq(c12, system.combine(v2, v1)), triple)
        res["associativity"].record(
            eq(system.combine(c12, v3), system.combine(v1, system.combine(v2, v3))),
            triple,
        )

        J = _random_subset(rng, v1.scope)
        I = _random_subset(rng, J)
        res["marginal-chain"].record(
            eq(system.marginalize(system.marginalize(v1, J), I), system.marginalize(v1, I)),
            (triple, I, J),
        )

        I1 = v1.scope
        lhs = system.marginalize(c12, I1)
        rhs = system.combine(v1, system.marginalize(v2, I1 & v2.scope))
        res["combination-marginal"].record(eq(lhs, rhs), triple)

        res["idempotence"].record(eq(system.combine(system.marginalize(v1, I), v1), v1), (triple, I))
        res["self-marginal"].record(eq(system.marginalize(v1, v1.scope), v1), triple)

        # partial order on (v1, c12, c12 + v3), which is a chain, plus v2
        c123 = system.combine(c12, v3)
        ok = system.leq(v1, v1)
        ok &= system.leq(v1, c12) and system.leq(c12, c123) and system.leq(v1, c123)
        if system.leq(v1, v2) and system.leq(v2, v1):
            ok &= eq(system.extend(v1, v1.scope | v2.scope), system.extend(v2, v1.scope | v2.scope))
        if system.leq(v2, v3) and system.leq(v3, v1):
            ok &= system.leq(v2, v1)
        res["partial-order"].record(bool(ok), triple)

        # v1 is below c12; marginals to any K inside s(v1) keep the order
        K = _random_subset(rng, v1.scope)
        res["monotone-marginal"].record(
            system.leq(system.marginalize(v1, K), system.marginalize(c12, K)), (triple, K)
        )

        ok = system.leq(v1, c12) and system.leq(v2, c12) and system.leq(c12, c123)
        if system.leq(v1, v3) and system.leq(v2, v3):
            ok = ok and system.leq(c12, v3)
        res["combination-supremum"].record(bool(ok), triple)

        res["marginal-supremum"].record(_marginal_supremum(system, v1, J, v3), (triple, J))

        K = _random_subset(rng, v1.scope & v2.scope)
        lhs = system.marginalize(system.disjoin(v1, v2), K)
        rhs = system.disjoin(system.marginalize(v1, K), system.marginalize(v2, K))
        res["disjunction-marginal"].record(eq(lhs, rhs), (triple, K))
    return AxiomReport(res)


def _marginal_supremum(system: ValuationSystem, v, J: IndexSet, other) -> bool:
    m = system.marginalize(v, J)
    if not system.leq(m, v):
        return False
    candidates = system.all_valuations(J)
    if candidates is None:
        # without enumeration, probe with a few valuations on J
        candidates = [system.neutral(J), m]
        if J <= other.scope:
            candidates.append(system.marginalize(other, J))
            candidates.append(system.marginalize(system.combine(other, v), J))
    below = [c for c in candidates if system.leq(c, v)]
    # m dominates everything below v, and m is itself among them
    return all(system.leq(c, m) for c in below)


def random_triples(make, rng: random.Random, count: int) -> list[tuple]:
    """``count`` triples of valuations drawn with ``make(rng)``."""
    return [tuple(make(rng) for _ in range(3)) for _ in range(count)]


def powerset(items: Sequence) -> Iterable[tuple]:
    return itertools.chain.from_iterable(
        itertools.combinations(items, r) for r in range(len(items) + 1)
    )
