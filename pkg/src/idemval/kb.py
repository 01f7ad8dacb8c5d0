"""Knowledge-base files: parsing, querying and canonical serialization.

One statement per line, ``#`` starts a comment::

    vbs finite|polytope
    frame <var> <cardinality>
    real <var>
    clause !(v1=a, v2=b, ...)
    cnf p1 | !p2 | p3
    tuple (v1=a, ...) [group=<name>]
    linear <rat>*<var> [+|-] ... <=|>=|= <rat>
    vertex (v1=<rat>, ...) [group=<name>]
    query <var> [rep=lower|upper] [order=mindegree|minfill|given:<v>,<v>,...]

Every ``clause``, ``cnf`` and ``linear`` line is one valuation. ``tuple``
and ``vertex`` lines sharing a group form one valuation, their disjunction;
without ``group=`` the group is the line's scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import finite, polytope
from .algebra import LOWER, UPPER, RepresentedValuation
from .engine import QueryError, answer_query, choose_order, normalize_heuristic
from .finite import Clause, CnfError, FrameSpec, Tuple
from .polytope import HalfSpace, Vertex
from .scope import IndexSet, union

FINITE = "finite"
POLYTOPE = "polytope"
EXPLICIT_TUPLE_CAP = 1024
EXPLICIT_VERTEX_CAP = 64


class KBError(ValueError):
    """One or more located diagnostics from parsing a knowledge base."""

    def __init__(self, diagnostics: Sequence[tuple[int, str]]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(f"line {n}: {m}" for n, m in self.diagnostics))


@dataclass(frozen=True)
class Query:
    target: str
    rep: str = "auto"
    heuristic: str = "min-degree"
    given: tuple = ()

    def text(self) -> str:
        out = f"query {self.target}"
        if self.rep != "auto":
            out += f" rep={self.rep}"
        if self.heuristic == "given":
            out += " order=given:" + ",".join(self.given)
        elif self.heuristic != "min-degree":
            out += " order=" + self.heuristic.replace("-", "")
        return out


@dataclass
class KnowledgeBase:
    kind: str
    frames: FrameSpec = field(default_factory=FrameSpec)
    reals: list = field(default_factory=list)
    valuations: list = field(default_factory=list)
    provenance: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    queries: list = field(default_factory=list)

    @property
    def variables(self) -> IndexSet:
        return IndexSet(self.frames) if self.kind == FINITE else IndexSet(self.reals)

    def __eq__(self, other):
        # provenance is where a statement came from, not what it says
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (self.kind == other.kind and dict(self.frames) == dict(other.frames)
                and sorted(self.reals) == sorted(other.reals)
                and _canon(self.valuations) == _canon(other.valuations)
                and self.queries == other.queries)


def _canon(vals):
    return sorted(((v.kind, tuple(v.scope), tuple(sorted(v.basics, key=lambda b: b.sort_key())))
                   for v in vals), key=repr)


# ---------------------------------------------------------------------------
# parsing

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_RAT = r"[+-]?\d+(?:/\d+)?"
_ASSIGN = re.compile(rf"^\s*({_NAME})\s*=\s*({_RAT})\s*$")
_TUPLE = re.compile(r"^\((.*)\)\s*(?:group=(\S+))?\s*$")
_TERM = re.compile(rf"^(?:(\d+(?:/\d+)?)\s*\*?\s*)?({_NAME})$")


def _rational(text: str) -> Fraction:
    return Fraction(text.replace(" ", ""))


def _assignments(body: str) -> list[tuple[str, str]]:
    body = body.strip()
    if not body:
        return []
    out = []
    for part in body.split(","):
        m = _ASSIGN.match(part)
        if not m:
            raise ValueError(f"bad assignment {part.strip()!r}")
        out.append(m.groups())
    return out


def parse_linear(text: str) -> tuple[dict[str, Fraction], str, Fraction]:
    """``2*x1 - 1/2*x2 <= 3`` as (coefficients, relation, bound)."""
    m = re.match(r"^(.*?)(<=|>=|=)(.*)$", text)
    if not m:
        raise ValueError("expected <=, >= or =")
    lhs, rel, rhs = m.groups()
    try:
        bound = _rational(rhs.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad bound {rhs.strip()!r}") from None
    lhs = lhs.strip()
    if not lhs:
        raise ValueError("empty left-hand side")
    coeffs: dict[str, Fraction] = {}
    for sign, term in re.findall(r"([+-]?)\s*([^+-]+)", lhs.replace(" ", "")):
        tm = _TERM.match(term)
        if not tm:
            raise ValueError(f"bad term {sign}{term!r}")
        coef = Fraction(tm.group(1)) if tm.group(1) else Fraction(1)
        if sign == "-":
            coef = -coef
        coeffs[tm.group(2)] = coeffs.get(tm.group(2), Fraction(0)) + coef
    if re.sub(r"[+-]?[^+-]+", "", lhs.replace(" ", "")):
        raise ValueError(f"bad expression {lhs!r}")
    return coeffs, rel, bound


def _parse_query(args: list[str]) -> Query:
    if not args:
        raise ValueError("query needs a target variable")
    target, rep, heuristic, given = args[0], "auto", "min-degree", ()
    for opt in args[1:]:
        key, _, val = opt.partition("=")
        if key == "rep" and val in (LOWER, UPPER, "auto"):
            rep = val
        elif key == "order":
            if val.startswith("given:"):
                heuristic = "given"
                given = tuple(v for v in val[len("given:"):].split(",") if v)
            else:
                heuristic = normalize_heuristic(val)
        else:
            raise ValueError(f"bad query option {opt!r}")
    return Query(target, rep, heuristic, given)


def parse_kb(text: str) -> KnowledgeBase:
    """Parse and validate a knowledge base; raise :class:`KBError` with every
    located diagnostic."""
    errors: list[tuple[int, str]] = []
    lines = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            head, _, rest = line.partition(" ")
            lines.append((n, head, rest.strip()))

    # declarations first, so statements may precede them
    kind = None
    kind_line = None
    frames: dict[str, int] = {}
    reals: list[str] = []

    def set_kind(k, n):
        nonlocal kind, kind_line
        if kind is None:
            kind, kind_line = k, n
        elif kind != k:
            errors.append((n, f"mixed instance kinds: {k} here, {kind} since line {kind_line}"))

    for n, head, rest in lines:
        if head == "vbs":
            if rest not in (FINITE, POLYTOPE):
                errors.append((n, f"unknown instance kind {rest!r}"))
            else:
                set_kind(rest, n)
        elif head == "frame":
            parts = rest.split()
            if len(parts) != 2 or not re.fullmatch(_NAME, parts[0]) or not parts[1].isdigit() \
                    or int(parts[1]) < 1:
                errors.append((n, "expected 'frame <var> <positive cardinality>'"))
                continue
            set_kind(FINITE, n)
            if parts[0] in frames:
                errors.append((n, f"variable {parts[0]!r} declared twice"))
            frames[parts[0]] = int(parts[1])
        elif head == "real":
            if not re.fullmatch(_NAME, rest):
                errors.append((n, "expected 'real <var>'"))
                continue
            set_kind(POLYTOPE, n)
            if rest in reals:
                errors.append((n, f"variable {rest!r} declared twice"))
            else:
                reals.append(rest)
    if kind is None:
        kind = FINITE
    frames = FrameSpec(frames)
    kb = KnowledgeBase(kind, frames, reals)
    declared = set(frames) | set(reals)

    def need(var, n):
        if var not in declared:
            raise ValueError(f"undeclared variable {var!r}")

    groups: dict[str, list] = {}
    group_lines: dict[str, list] = {}
    for n, head, rest in lines:
        try:
            if head in ("vbs", "frame", "real"):
                continue
            if head in ("clause", "cnf", "tuple") and kind != FINITE:
                raise ValueError(f"'{head}' belongs to finite knowledge bases")
            if head in ("linear", "vertex") and kind != POLYTOPE:
                raise ValueError(f"'{head}' belongs to polytope knowledge bases")
            if head == "clause":
                if not (rest.startswith("!(") and rest.endswith(")")):
                    raise ValueError("expected 'clause !(v=a, ...)'")
                values: dict[str, int] = {}
                for var, val in _assignments(rest[2:-1]):
                    need(var, n)
                    x = int(val)
                    if not 0 <= x < frames[var]:
                        raise ValueError(f"value {x} out of range for {var} (size {frames[var]})")
                    if values.get(var, x) != x:
                        raise ValueError(f"tautological clause: {var} given two values")
                    values[var] = x
                if not values:
                    c = finite.CONTRADICTION_CLAUSE
                else:
                    c = Clause.of(values)
                kb.valuations.append(RepresentedValuation(LOWER, c.scope, {c}))
                kb.provenance.append([n])
            elif head == "cnf":
                try:
                    c = finite.parse_cnf_clause(rest, frames, n)
                except CnfError as e:
                    raise ValueError(str(e).split(": ", 1)[1]) from None
                kb.valuations.append(RepresentedValuation(LOWER, c.scope, {c}))
                kb.provenance.append([n])
            elif head in ("tuple", "vertex"):
                m = _TUPLE.match(rest)
                if not m:
                    raise ValueError(f"expected '{head} (v=x, ...) [group=<name>]'")
                pairs = _assignments(m.group(1))
                coords = {}
                for var, val in pairs:
                    need(var, n)
                    if var in coords:
                        raise ValueError(f"variable {var!r} repeated")
                    if head == "tuple":
                        x = int(val) if re.fullmatch(r"[+-]?\d+", val) else None
                        if x is None or not 0 <= x < frames[var]:
                            raise ValueError(f"value {val} out of range for {var} (size {frames[var]})")
                        coords[var] = x
                    else:
                        x = _rational(val)
                        if not 0 <= x <= 1:
                            raise ValueError(f"coordinate {var}={val} lies outside [0, 1]")
                        coords[var] = x
                basic = Tuple.of(coords) if head == "tuple" else Vertex.of(coords)
                name = m.group(2) or "@" + ",".join(basic.scope)
                groups.setdefault(name, []).append(basic)
                group_lines.setdefault(name, []).append(n)
            elif head == "linear":
                coeffs, rel, bound = parse_linear(rest)
                for var in coeffs:
                    need(var, n)
                forms = {"<=": [(coeffs, bound)],
                         ">=": [({v: -a for v, a in coeffs.items()}, -bound)],
                         "=": [(coeffs, bound), ({v: -a for v, a in coeffs.items()}, -bound)]}[rel]
                basics = set()
                for cf, b in forms:
                    h = HalfSpace.make(cf, b)
                    if h is None:
                        raise ValueError("constraint holds everywhere (neutral)")
                    basics.add(h)
                scope = IndexSet(v for v, a in coeffs.items() if a != 0)
                kb.valuations.append(RepresentedValuation(LOWER, scope, basics))
                kb.provenance.append([n])
            elif head == "query":
                q = _parse_query(rest.split())
                if q.target not in declared:
                    raise ValueError(f"undeclared query variable {q.target!r}")
                for v in q.given:
                    need(v, n)
                kb.queries.append(q)
            else:
                raise ValueError(f"unknown statement {head!r}")
        except (ValueError, ZeroDivisionError, QueryError) as e:
            errors.append((n, str(e)))
    for name, basics in groups.items():
        scope = union(b.scope for b in basics)
        if kind == FINITE:
            members = finite.extend_tuples(basics, scope, frames)
        else:
            members = set()
            for b in basics:
                members |= polytope.extend_vertices(RepresentedValuation(UPPER, b.scope, {b}), scope).basics
            members = {Vertex(scope, p) for p in polytope.extreme_points(p.coords for p in members)}
        kb.valuations.append(RepresentedValuation(UPPER, scope, members))
        kb.provenance.append(group_lines[name])
        kb.groups.append(name)
    if errors:
        raise KBError(sorted(errors))
    return kb


# ---------------------------------------------------------------------------
# serialization of knowledge bases


def basic_line(b) -> str:
    if isinstance(b, Clause):
        return f"clause {b}"
    if isinstance(b, Tuple):
        return f"tuple {b}"
    if isinstance(b, HalfSpace):
        return f"linear {b}"
    if isinstance(b, Vertex):
        return f"vertex {b}"
    raise TypeError(f"no text form for {type(b).__name__}")


def serialize_kb(kb: KnowledgeBase) -> str:
    """Canonical text of a knowledge base; parsing it gives ``kb`` back."""
    out = [f"vbs {kb.kind}"]
    if kb.kind == FINITE:
        out += [f"frame {v} {kb.frames[v]}" for v in IndexSet(kb.frames)]
    else:
        out += [f"real {v}" for v in IndexSet(kb.reals)]
    lower = [v for v in kb.valuations if v.kind == LOWER]
    upper = [v for v in kb.valuations if v.kind == UPPER]
    for v in sorted(lower, key=lambda v: sorted(b.sort_key() for b in v.basics)):
        if len(v.basics) == 2 and all(isinstance(b, HalfSpace) for b in v.basics):
            a, b = sorted(v.basics, key=HalfSpace.sort_key)
            if a.scope == b.scope and a.coeffs == tuple(-c for c in b.coeffs) and a.bound == -b.bound:
                out.append("linear " + str(a).replace("<=", "="))
                continue
        for b in sorted(v.basics, key=lambda b: b.sort_key()):
            out.append(basic_line(b))
    for i, v in enumerate(sorted(upper, key=lambda v: (tuple(v.scope), sorted(b.sort_key() for b in v.basics)))):
        for b in sorted(v.basics, key=lambda b: b.sort_key()):
            out.append(f"{basic_line(b)} group=g{i + 1}")
    out += [q.text() for q in kb.queries]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# queries


@dataclass
class QueryResult:
    target: str
    rep: str
    valuation: RepresentedValuation
    status: str
    explicit: list | None = None
    trace: list = field(default_factory=list)
    order: list = field(default_factory=list)
    materialized: int = 0

    @property
    def basics(self) -> list:
        return sorted(self.valuation.basics, key=lambda b: b.sort_key())


def _calculus(kb: KnowledgeBase, rep: str):
    if kb.kind == FINITE:
        return finite.ClauseCalculus(kb.frames) if rep == LOWER else finite.TupleCalculus(kb.frames)
    return polytope.HalfSpaceCalculus() if rep == LOWER else polytope.VertexCalculus()


def _convert(kb: KnowledgeBase, v: RepresentedValuation, rep: str) -> RepresentedValuation:
    if v.kind == rep:
        return v
    if kb.kind == FINITE:
        s = finite.to_explicit(v, kb.frames)
        basics = finite.lower_rep(s, kb.frames) if rep == LOWER else finite.upper_rep(s)
        return RepresentedValuation(rep, v.scope, basics)
    if rep == UPPER:
        return polytope.vertex_enumerate(v)
    return polytope.facets(v)


def run_query(kb: KnowledgeBase, target: str, rep: str = "auto", heuristic: str = "min-degree",
              given: Sequence[str] = ()) -> QueryResult:
    """Answer one query through the deletion engine."""
    if target not in kb.variables:
        raise QueryError(f"unknown query variable {target!r}")
    if rep == "auto":
        rep = UPPER if kb.valuations and all(v.kind == UPPER for v in kb.valuations) else LOWER
    if rep not in (LOWER, UPPER):
        raise QueryError(f"unknown representation {rep!r}")
    heuristic = normalize_heuristic(heuristic)
    vals = [_convert(kb, v, rep) for v in kb.valuations]
    if kb.kind == POLYTOPE and rep == LOWER:
        # the hypercube bounds every real variable
        vals += [polytope.hpolytope([v], polytope.cube([v])) for v in kb.variables]
    calc = _calculus(kb, rep)
    order = None
    if heuristic == "given":
        unknown = [v for v in given if v not in kb.variables]
        if unknown:
            raise QueryError(f"unknown variable {unknown[0]!r} in the order")
        used = union(v.scope for v in vals) | {target}
        scopes = [v.scope for v in vals]
        order = choose_order(scopes, target, "given", [v for v in given if v in used],
                             variables=used)
    ans = answer_query(calc, vals, target, order=order, heuristic=heuristic)
    status = "contradiction" if ans.contradiction else "ok"
    result = QueryResult(target, rep, ans.valuation, status, None, ans.trace, ans.order,
                         ans.materialized)
    result.explicit = _explicit(kb, result)
    return result


def _explicit(kb: KnowledgeBase, r: QueryResult):
    if r.status == "contradiction":
        return []
    v = r.valuation
    if kb.kind == FINITE:
        if kb.frames.size(v.scope) > EXPLICIT_TUPLE_CAP:
            return None
        s = finite.to_explicit(v, kb.frames)
        return sorted((Tuple(v.scope, x) for x in s.members), key=Tuple.sort_key)
    vs = v if v.kind == UPPER else polytope.vertex_enumerate(v)
    if len(vs.basics) > EXPLICIT_VERTEX_CAP:
        return None
    return sorted(vs.basics, key=Vertex.sort_key)


def serialize_result(r: QueryResult, emit: str = "basic") -> str:
    """Canonical text for a query answer, in knowledge-base statement syntax."""
    if r.status == "contradiction":
        return "CONTRADICTION\n"
    if emit == "explicit" and r.explicit is not None:
        return "".join(basic_line(b) + "\n" for b in r.explicit)
    if r.valuation.kind == LOWER and not r.valuation.basics:
        return f"NEUTRAL on {r.target}\n"
    return "".join(basic_line(b) + "\n" for b in r.basics)


def parse_result(text: str, target: str | None = None, rep: str | None = None) -> QueryResult:
    """Read serialized answer text back.

    ``target`` is needed to give a contradiction a scope.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if lines == ["CONTRADICTION"]:
        scope = IndexSet([target] if target else [])
        rep = rep or LOWER
        basics = {finite.CONTRADICTION_CLAUSE} if rep == LOWER else ()
        return QueryResult(target or "", rep, RepresentedValuation(rep, scope, basics), "contradiction")
    if len(lines) == 1 and lines[0].startswith("NEUTRAL on "):
        var = lines[0][len("NEUTRAL on "):].strip()
        return QueryResult(var, LOWER, RepresentedValuation(LOWER, [var], ()), "ok")
    basics = []
    for n, line in enumerate(lines, 1):
        head, _, rest = line.partition(" ")
        if head == "clause":
            basics.append(Clause.of({v: int(x) for v, x in _assignments(rest.strip()[2:-1])}))
        elif head == "tuple":
            basics.append(Tuple.of({v: int(x) for v, x in _assignments(rest.strip()[1:-1])}))
        elif head == "vertex":
            basics.append(Vertex.of({v: _rational(x) for v, x in _assignments(rest.strip()[1:-1])}))
        elif head == "linear":
            coeffs, rel, bound = parse_linear(rest)
            if rel != "<=":
                raise KBError([(n, "answers use <= only")])
            basics.append(HalfSpace.make(coeffs, bound))
        else:
            raise KBError([(n, f"unknown statement {head!r}")])
    kind = LOWER if isinstance(basics[0], (Clause, HalfSpace)) else UPPER
    scope = union(b.scope for b in basics)
    if target:
        scope = scope | {target}
    return QueryResult(target or (scope[0] if scope else ""), kind,
                       RepresentedValuation(kind, scope, basics), "ok")


def trace_lines(r: QueryResult) -> list[str]:
    return [s.line() for s in r.trace]
