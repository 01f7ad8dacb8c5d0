"""The deletion algorithm over represented valuations.

A query ``(V1 x ... x Vm)`` marginalized to one variable is answered by
deleting every other variable in turn. With lower representations a
deletion only touches the basic valuations that mention the deleted
variable; the rest are carried over unchanged. With upper representations
the valuations that mention the variable are combined and then projected.

Instances plug in through a :class:`LowerCalculus` or :class:`UpperCalculus`.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .algebra import LOWER, UPPER, ContractError, RepresentedValuation
from .scope import IndexSet, natural_key, union


class QueryError(ValueError):
    """Bad query input: unknown variable, unknown heuristic, bad order."""


class LowerCalculus(ABC):
    """Per-instance operations on basic lower valuations."""

    kind = LOWER

    @abstractmethod
    def leq(self, a, b) -> bool:
        """``a`` is less informative than ``b`` (``a`` is subsumed by ``b``)."""

    @abstractmethod
    def is_contradiction(self, b) -> bool: ...

    @abstractmethod
    def eliminate(self, basics: Sequence, k: str, alive: set) -> Iterator[tuple]:
        """Yield ``(produced, parents)`` pairs representing the deletion of ``k``.

        Every member of ``basics`` mentions ``k``. Members dropped from
        ``alive`` while the generator runs may be skipped from then on.
        """

    def contradiction(self):
        raise NotImplementedError

    def sort_key(self, b):
        return b.sort_key()


class UpperCalculus(ABC):
    """Per-instance operations on upper representations."""

    kind = UPPER

    @abstractmethod
    def combine(self, v1: RepresentedValuation, v2: RepresentedValuation) -> RepresentedValuation: ...

    @abstractmethod
    def marginalize(self, v: RepresentedValuation, scope) -> RepresentedValuation: ...

    def leq(self, a, b) -> bool:
        return a == b

    def sort_key(self, b):
        return b.sort_key()


@dataclass
class Step:
    """One line of the deletion trace."""

    variable: str
    with_k: int
    without_k: int
    produced: int
    subsumed: int
    sources: list = field(default_factory=list)

    def line(self) -> str:
        return (
            f"delete {self.variable}: with={self.with_k} without={self.without_k} "
            f"produced={self.produced} subsumed={self.subsumed}"
        )


def remove_subsumed(calc, basics: Iterable) -> set:
    """Drop every basic valuation that is less informative than another one."""
    items = sorted(set(basics), key=calc.sort_key)
    keep = []
    for i, a in enumerate(items):
        if not any(j != i and calc.leq(a, b) for j, b in enumerate(items)):
            keep.append(a)
    return set(keep)


def delete_basics(calc: LowerCalculus, basics: Iterable, k: str) -> tuple[set, Step]:
    """Delete ``k`` from a set of basic lower valuations.

    Returns the new basic set, which mentions no ``k``, and the trace step.
    """
    basics = set(basics)
    pruned = remove_subsumed(calc, basics)
    removed = len(basics) - len(pruned)
    with_k = sorted((b for b in pruned if k in b.scope), key=calc.sort_key)
    without_k = {b for b in pruned if k not in b.scope}
    alive = set(with_k)
    produced: dict = {}
    for new, parents in calc.eliminate(with_k, k, alive):
        if new in produced or new in without_k:
            continue
        produced[new] = parents
        if calc.is_contradiction(new):
            break
        for b in [b for b in alive if calc.leq(b, new)]:
            alive.discard(b)
            removed += 1
    out = without_k | set(produced)
    final = remove_subsumed(calc, out)
    removed += len(out) - len(final)
    step = Step(
        k,
        len(with_k),
        len(without_k),
        len(produced),
        removed,
        sources=[(p, produced[p]) for p in sorted(produced, key=calc.sort_key)],
    )
    return final, step


# ---------------------------------------------------------------------------
# elimination orders

HEURISTICS = ("given", "min-degree", "min-fill")
_ALIASES = {"mindegree": "min-degree", "minfill": "min-fill", "min_degree": "min-degree",
            "min_fill": "min-fill"}


def normalize_heuristic(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in HEURISTICS:
        raise QueryError(f"unknown elimination heuristic {name!r}")
    return name


def interaction_graph(scopes: Iterable[Iterable[str]], variables: Iterable[str] = ()) -> dict:
    graph: dict[str, set] = {v: set() for v in variables}
    for s in scopes:
        s = list(s)
        for v in s:
            graph.setdefault(v, set()).update(u for u in s if u != v)
    return graph


def choose_order(scopes: Iterable[Iterable[str]], target: str, heuristic: str = "min-degree",
                 given: Sequence[str] = (), variables: Iterable[str] = ()) -> list[str]:
    """A deletion order over every variable except ``target``.

    ``scopes`` are the scopes of the basic valuations; two variables
    interact when some scope holds both. Ties break by canonical name order.
    """
    heuristic = normalize_heuristic(heuristic)
    graph = interaction_graph(scopes, variables)
    graph.setdefault(target, set())
    others = sorted((v for v in graph if v != target), key=natural_key)
    if heuristic == "given":
        seen = set()
        for v in given:
            if v == target:
                raise QueryError(f"the order must not contain the target {target!r}")
            if v not in graph:
                raise QueryError(f"unknown variable {v!r} in the order")
            if v in seen:
                raise QueryError(f"variable {v!r} repeated in the order")
            seen.add(v)
        return list(given) + [v for v in others if v not in seen]

    graph = {v: set(n) for v, n in graph.items()}
    order = []
    remaining = set(others)
    while remaining:
        def cost(v):
            nbrs = graph[v]
            if heuristic == "min-degree":
                return len(nbrs)
            nb = sorted(nbrs, key=natural_key)
            return sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in graph[a])

        best = min(sorted(remaining, key=natural_key), key=cost)
        nbrs = graph.pop(best)
        for a in nbrs:
            graph[a].discard(best)
            graph[a].update(n for n in nbrs if n != a)
        remaining.discard(best)
        order.append(best)
    return order


def random_order(variables: Iterable[str], target: str, rng: random.Random) -> list[str]:
    vs = sorted((v for v in set(variables) if v != target), key=natural_key)
    rng.shuffle(vs)
    return vs


# ---------------------------------------------------------------------------
# engine


@dataclass
class EngineState:
    """The pool of valuations during a query, plus the trace so far."""

    pool: list
    remaining: IndexSet
    query: str
    trace: list = field(default_factory=list)
    materialized: int = 0
    contradiction: bool = False


@dataclass
class Answer:
    valuation: RepresentedValuation
    contradiction: bool
    trace: list
    order: list
    materialized: int


def initial_state(valuations: Sequence[RepresentedValuation], query: str) -> EngineState:
    scope = union(v.scope for v in valuations) | IndexSet([query])
    pool = list(valuations)
    return EngineState(pool, scope, query, materialized=sum(len(v.basics) for v in pool))


def delete_index(calc, state: EngineState, k: str) -> EngineState:
    """One deletion step: replace the valuations mentioning ``k`` by their marginal."""
    if k not in state.remaining:
        raise ContractError(f"{k!r} is not among the remaining variables")
    if k == state.query:
        raise ContractError("cannot delete the query variable")
    if state.contradiction:
        return state
    touched = [v for v in state.pool if k in v.scope]
    rest = [v for v in state.pool if k not in v.scope]
    if not touched:
        return EngineState(rest, state.remaining - {k}, state.query, list(state.trace),
                           state.materialized, False)
    new_scope = union(v.scope for v in touched) - {k}
    if calc.kind == LOWER:
        basics = set().union(*(v.basics for v in touched))
        new_basics, step = delete_basics(calc, basics, k)
        produced = step.produced
        new = RepresentedValuation(LOWER, new_scope, new_basics)
        contra = any(calc.is_contradiction(b) for b in new_basics)
    else:
        acc = touched[0]
        for v in touched[1:]:
            acc = calc.combine(acc, v)
        combined_size = len(acc.basics)
        new = calc.marginalize(acc, new_scope)
        produced = len(new.basics)
        step = Step(k, sum(len(v.basics) for v in touched), 0, produced,
                    combined_size - produced)
        contra = not new.basics
    trace = list(state.trace) + [step]
    return EngineState(rest + [new], state.remaining - {k}, state.query, trace,
                       state.materialized + produced, contra)


def answer_query(calc, valuations: Sequence[RepresentedValuation], target: str,
                 order: Sequence[str] | None = None, heuristic: str = "min-degree") -> Answer:
    """Marginal of the combination of ``valuations`` on ``{target}``."""
    for v in valuations:
        if v.kind != calc.kind:
            raise ContractError(f"{v.kind} valuation given to a {calc.kind} engine")
    state = initial_state(valuations, target)
    if order is None:
        scopes = [b.scope for v in valuations for b in v.basics] + [v.scope for v in valuations]
        order = choose_order(scopes, target, heuristic, variables=state.remaining)
    else:
        order = list(order)
        if sorted(order, key=natural_key) != list(state.remaining - {target}):
            raise QueryError("the deletion order must list every variable except the target once")
    initial_contra = calc.kind == LOWER and any(
        calc.is_contradiction(b) for v in valuations for b in v.basics)
    state.contradiction = initial_contra or (calc.kind == UPPER and any(not v.basics for v in valuations))
    for k in order:
        if state.contradiction:
            break
        state = delete_index(calc, state, k)
    target_scope = IndexSet([target])
    if state.contradiction:
        result = calc_contradiction(calc, target_scope)
        return Answer(result, True, state.trace, list(order), state.materialized)
    if calc.kind == LOWER:
        basics = set().union(*(v.basics for v in state.pool)) if state.pool else set()
        result = RepresentedValuation(LOWER, target_scope, remove_subsumed(calc, basics))
    else:
        acc = None
        for v in state.pool:
            acc = v if acc is None else calc.combine(acc, v)
        if acc is None:
            acc = calc.neutral(target_scope)
        result = calc.marginalize(calc.extend(acc, target_scope), target_scope)
    result = calc.finalize(result) if hasattr(calc, "finalize") else result
    contra = calc.answer_is_contradiction(result)
    if contra:
        result = calc_contradiction(calc, target_scope)
    return Answer(result, contra, state.trace, list(order), state.materialized)


def calc_contradiction(calc, scope) -> RepresentedValuation:
    if calc.kind == LOWER:
        return RepresentedValuation(LOWER, scope, {calc.contradiction()})
    return RepresentedValuation(UPPER, scope, frozenset())
