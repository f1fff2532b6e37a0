"""First-order finite elements: sequential monotone functions on flat naturals.

An element of fin at a first-order type with `arity` ground arguments and
grade i is a table over {bot,0..i}^arity (bot coded -1).  Sequentiality is
checked by the strict-argument recursion; enumeration builds sequential
decision trees and dedupes by table, which is complete at first order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .traces import BOTTOM_TRACE, Token, Trace, ground_trace, minimal_traces

Call = tuple[int, ...]  # argument vector, -1 = bottom


def all_calls(arity: int, grade: int) -> list[Call]:
    return list(itertools.product(range(-1, grade + 1), repeat=arity))


def call_le(a: Call, b: Call) -> bool:
    return all(x == -1 or x == y for x, y in zip(a, b))


def lowerings(c: Call) -> Iterator[Call]:
    """All vectors below c in the flat componentwise order."""
    choices = [(-1,) if v == -1 else (-1, v) for v in c]
    return itertools.product(*choices)


from typing import Iterator  # noqa: E402  (used in annotation above)


@dataclass(frozen=True)
class FOElement:
    arity: int
    grade: int
    table: tuple[int, ...] = field(compare=False)
    trace: Trace

    def __call__(self, call: Call) -> int:
        return self.table[_call_index(call, self.arity, self.grade)]

    def le(self, other: "FOElement") -> bool:
        return self.trace.le(other.trace)

    def __str__(self) -> str:
        return str(self.trace)


def _call_index(call: Call, arity: int, grade: int) -> int:
    idx = 0
    for v in call:
        if not (-1 <= v <= grade):
            v = -1  # grade filter: out-of-range inputs act as bottom
        idx = idx * (grade + 2) + (v + 1)
    return idx


def table_of_tokens(tokens: dict[Call, int], arity: int, grade: int) -> Optional[tuple[int, ...]]:
    """Total table from a token dict, or None if two tokens conflict."""
    vals = list(range(-1, grade + 1))
    table = []
    for call in itertools.product(vals, repeat=arity):
        res = -1
        for c, r in tokens.items():
            if call_le(c, call):
                if res != -1 and res != r:
                    return None
                res = r
        table.append(res)
    return tuple(table)


def is_monotone(table: tuple[int, ...], arity: int, grade: int) -> bool:
    calls = all_calls(arity, grade)
    get = dict(zip(calls, table))
    for c in calls:
        v = get[c]
        if v == -1:
            continue
        for j in range(arity):
            if c[j] == -1:
                for w in range(grade + 1):
                    up = c[:j] + (w,) + c[j + 1:]
                    if get[up] != v:
                        return False
    return True


def is_sequential(table: tuple[int, ...], arity: int, grade: int) -> bool:
    """Strict-argument recursion; assumes a monotone table."""
    calls = all_calls(arity, grade)
    get = dict(zip(calls, table))

    def seq(fixed: dict[int, int], free: tuple[int, ...]) -> bool:
        def at(assign: dict[int, int]) -> int:
            c = tuple(assign.get(j, fixed.get(j, -1)) for j in range(arity))
            return get[c]

        bot_val = at({})
        if bot_val != -1:
            return True  # monotone + flat: constant on this residual
        if all(at({j: v for j, v in zip(free, vs)}) == -1
               for vs in itertools.product(range(grade + 1), repeat=len(free))):
            return True  # constant bottom
        for j in free:
            # strict in j: every vector with j bottom maps to bottom
            rest = tuple(k for k in free if k != j)
            strict = True
            for vs in itertools.product(range(-1, grade + 1), repeat=len(rest)):
                assign = {k: v for k, v in zip(rest, vs)}
                if at(assign) != -1:
                    strict = False
                    break
            if strict and all(seq({**fixed, j: v}, rest) for v in range(grade + 1)):
                return True
        return False

    return seq({}, tuple(range(arity)))


def trace_of_table(table: tuple[int, ...], arity: int, grade: int) -> Trace:
    """Tokens = unique minimal argument vectors per converging call."""
    calls = all_calls(arity, grade)
    get = dict(zip(calls, table))
    tokens: set[Token] = set()
    for c in calls:
        r = get[c]
        if r == -1:
            continue
        mins = [low for low in lowerings(c)
                if get[low] == r and not any(
                    get[lower] == r for lower in lowerings(low) if lower != low)]
        assert len(mins) == 1, f"stability violation at {c}: minima {mins}"
        tokens.add(Token(tuple(ground_trace(v if v >= 0 else None) for v in mins[0]), r))
    return Trace(tuple(tokens))


def element_from_tokens(tokens: dict[Call, int], arity: int, grade: int) -> Optional[FOElement]:
    """The element behaving per the token dict, if that behavior is an element."""
    table = table_of_tokens(tokens, arity, grade)
    if table is None or not is_monotone(table, arity, grade):
        return None
    if not is_sequential(table, arity, grade):
        return None
    return FOElement(arity, grade, table, trace_of_table(table, arity, grade))


def element_from_trace(trace: Trace, arity: int, grade: int) -> Optional[FOElement]:
    toks: dict[Call, int] = {}
    for tok in trace.tokens:
        call = tuple(a.ground_value() if a.ground_value() is not None else -1
                     for a in tok.args)
        toks[call] = tok.result
    e = element_from_tokens(toks, arity, grade)
    if e is not None and e.trace == trace:
        return e
    return None


def bottom_element(arity: int, grade: int) -> FOElement:
    size = (grade + 2) ** arity
    return FOElement(arity, grade, (-1,) * size, BOTTOM_TRACE)


# ---------------------------------------------------------------------------
# Enumeration (sequential decision trees, deduped by table)


def enumerate_elements(arity: int, grade: int) -> list[FOElement]:
    """All elements of fin at (nat^arity -> nat, grade), canonically ordered."""
    tables = _enumerate_tables(arity, grade)
    out = [FOElement(arity, grade, tb, trace_of_table(tb, arity, grade))
           for tb in tables]
    out.sort(key=lambda e: e.trace.key())
    return out


@lru_cache(maxsize=None)
def _enumerate_tables(arity: int, grade: int) -> tuple[tuple[int, ...], ...]:
    calls = all_calls(arity, grade)
    seen: set[tuple[int, ...]] = set()

    def emit(fn) -> None:
        seen.add(tuple(fn(c) for c in calls))

    def build(free: tuple[int, ...]) -> list:
        """All sequential behaviors as closures over the free positions."""
        out = [lambda env: -1]
        out += [(lambda v: lambda env: v)(v) for v in range(grade + 1)]
        for j in free:
            rest = tuple(k for k in free if k != j)
            for residuals in itertools.product(build(rest), repeat=grade + 1):
                def node(env, j=j, residuals=residuals):
                    v = env.get(j, -1)
                    if v == -1:
                        return -1
                    return residuals[v](env)
                out.append(node)
        return out

    for fn in build(tuple(range(arity))):
        emit(lambda c: fn({j: v for j, v in enumerate(c)}))
    return tuple(sorted(seen))


@lru_cache(maxsize=None)
def count_elements(arity: int, grade: int) -> int:
    """Independent count by inclusion-exclusion over strict argument sets."""
    def strict_count(n: int, j: int) -> int:
        # functions of n args strict in (at least) the first j args
        if j == 0:
            return total(n)
        return strict_count(n - 1, j - 1) ** (grade + 1)

    def total(n: int) -> int:
        if n == 0:
            return grade + 2
        consts = grade + 1
        union = 0
        for k in range(1, n + 1):
            sign = 1 if k % 2 == 1 else -1
            from math import comb
            union += sign * comb(n, k) * strict_count(n, k)
        return consts + union

    return total(arity)


# ---------------------------------------------------------------------------
# Minimal satisfiers of call/response constraints


def minimal_satisfiers(constraints: dict[Call, int], arity: int, grade: int) -> list[FOElement]:
    """Stable-order-minimal elements g with g(c) = r for every constraint.

    A response -1 is a divergence requirement.  Candidate minima are unions
    of componentwise lowerings of the positive constraints (complete at
    first order: any subset of a first-order trace is again a trace).
    """
    positives = [(c, r) for c, r in constraints.items() if r >= 0]
    negatives = [c for c, r in constraints.items() if r == -1]
    if not positives:
        e = bottom_element(arity, grade)
        return [e]
    seen: dict[Trace, FOElement] = {}
    pools = [list(lowerings(c)) for c, _ in positives]
    for combo in itertools.product(*pools):
        toks: dict[Call, int] = {}
        ok = True
        for (c, r), low in zip(positives, combo):
            if toks.get(low, r) != r:
                ok = False
                break
            toks[low] = r
        if not ok:
            continue
        e = element_from_tokens(toks, arity, grade)
        if e is None:
            continue
        if any(e(c) != -1 for c in negatives):
            continue
        seen.setdefault(e.trace, e)
    mins = minimal_traces(seen.keys())
    return [seen[t] for t in mins]


def minimal_covers(traces: Iterable[Trace], arity: int, grade: int) -> list[FOElement]:
    """Minimal elements whose trace includes every given trace.

    At first order the union either is itself an element trace (the unique
    minimal cover) or no element covers it at all.
    """
    union: Trace = BOTTOM_TRACE
    for t in traces:
        union = union.union(t)
    e = element_from_trace(union, arity, grade)
    return [e] if e is not None else []
