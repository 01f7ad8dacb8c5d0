"""Index sets: the scopes valuations are defined on."""

from __future__ import annotations

import re
from typing import Iterable

_DIGITS = re.compile(r"(\d+)")


def natural_key(name: str):
    """Sort key that orders ``p2`` before ``p10``."""
    parts = _DIGITS.split(name)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


class IndexSet(tuple):
    """An immutable set of variable names kept in canonical (natural) order.

    Because iteration order is canonical, tuple equality is set equality.
    """

    def __new__(cls, items: Iterable[str] = ()):
        if isinstance(items, str):
            items = (items,)
        return super().__new__(cls, sorted(set(items), key=natural_key))

    def __or__(self, other):
        return IndexSet(tuple(self) + tuple(other))

    def __and__(self, other):
        other = set(other)
        return IndexSet(v for v in self if v in other)

    def __sub__(self, other):
        other = set(other)
        return IndexSet(v for v in self if v not in other)

    def __le__(self, other):
        return set(self) <= set(other)

    def __ge__(self, other):
        return set(self) >= set(other)

    def __lt__(self, other):
        return set(self) < set(other)

    def __gt__(self, other):
        return set(self) > set(other)

    # tuple.__hash__ is dropped when comparison operators are overridden
    __hash__ = tuple.__hash__
    __eq__ = tuple.__eq__
    __ne__ = tuple.__ne__

    def __repr__(self):
        return "{" + ", ".join(self) + "}"


EMPTY = IndexSet()


def union(scopes: Iterable[Iterable[str]]) -> IndexSet:
    out: list[str] = []
    for s in scopes:
        out.extend(s)
    return IndexSet(out)
