"""Inference with idempotent valuations over finite frames and polytopes."""

from .algebra import (LOWER, UPPER, CapacityError, ContractError, RepresentedValuation,
                      ValuationSystem, check_axioms)
from .engine import QueryError, answer_query, choose_order, delete_index, remove_subsumed
from .kb import KBError, KnowledgeBase, QueryResult, parse_kb, run_query, serialize_kb, serialize_result
from .scope import IndexSet

__version__ = "0.1.0"

__all__ = [
    "LOWER", "UPPER", "CapacityError", "ContractError", "RepresentedValuation",
    "ValuationSystem", "check_axioms", "QueryError", "answer_query", "choose_order",
    "delete_index", "remove_subsumed", "KBError", "KnowledgeBase", "QueryResult",
    "parse_kb", "run_query", "serialize_kb", "serialize_result", "IndexSet",
]
