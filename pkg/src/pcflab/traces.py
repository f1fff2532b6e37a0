"""Tokens and traces: the canonical finite representation of stable functions.

A token records the stable-order-minimal argument vector producing a ground
value; a trace is the canonically sorted set of all tokens.  Ground elements
are traces too: bottom is the empty trace, the value n the single nullary
token `n`.  Trace inclusion is exactly the stable order on finite elements.

Concrete syntax (cache files, goldens): ground `_` or `n`; token
`[t1,...,tk] => n`; trace `{ tok ; tok ; ... }` with tokens sorted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Optional


@total_ordering
@dataclass(frozen=True)
class Token:
    args: tuple["Trace", ...]
    result: int

    def key(self):
        return (self.result, tuple(a.key() for a in self.args))

    def __lt__(self, other: "Token") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return format_token(self)


@dataclass(frozen=True)
class Trace:
    tokens: tuple[Token, ...]
    _set: frozenset = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(sorted(set(self.tokens))))
        object.__setattr__(self, "_set", frozenset(self.tokens))

    def key(self):
        return tuple(t.key() for t in self.tokens)

    # ground views ---------------------------------------------------------

    @property
    def is_bottom(self) -> bool:
        return not self.tokens

    def ground_value(self) -> Optional[int]:
        """The value of a ground trace; None for bottom."""
        if not self.tokens:
            return None
        assert len(self.tokens) == 1 and not self.tokens[0].args, \
            "not a ground trace"
        return self.tokens[0].result

    # order ------------------------------------------------------------

    def le(self, other: "Trace") -> bool:
        """Stable order: token-set inclusion."""
        return self._set <= other._set

    def meet(self, other: "Trace") -> "Trace":
        return Trace(tuple(self._set & other._set))

    def union(self, other: "Trace") -> "Trace":
        return Trace(self.tokens + other.tokens)

    def __contains__(self, tok: Token) -> bool:
        return tok in self._set

    def __len__(self) -> int:
        return len(self.tokens)

    def __lt__(self, other: "Trace") -> bool:
        # lexicographic, for canonical sorting only; stable order is .le()
        return self.key() < other.key()

    def __str__(self) -> str:
        return format_trace(self)

    def __repr__(self) -> str:
        return format_trace(self)


BOTTOM_TRACE = Trace(())


def ground_trace(n: Optional[int]) -> Trace:
    """Trace of a ground value; None or a negative code means bottom."""
    if n is None or n < 0:
        return BOTTOM_TRACE
    return Trace((Token((), n),))


def token(args: Iterable[Trace], result: int) -> Token:
    return Token(tuple(args), result)


def is_ground_trace(t: Trace) -> bool:
    return not t.tokens or (len(t.tokens) == 1 and not t.tokens[0].args)


def max_number(t: Trace) -> int:
    """Largest integer mentioned anywhere in the trace; -1 for bottom."""
    best = -1
    for tok in t.tokens:
        best = max(best, tok.result, *(max_number(a) for a in tok.args), -1)
    return best


def minimal_traces(traces: Iterable[Trace]) -> list[Trace]:
    """Inclusion-minimal elements, canonically sorted."""
    items = sorted(set(traces))
    return [t for t in items if not any(o != t and o.le(t) for o in items)]


# ---------------------------------------------------------------------------
# Concrete syntax


def format_trace(t: Trace) -> str:
    if is_ground_trace(t):
        v = t.ground_value()
        return "_" if v is None else str(v)
    return "{ " + " ; ".join(format_token(tok) for tok in t.tokens) + " }"


def format_token(tok: Token) -> str:
    if not tok.args:
        return str(tok.result)
    inner = ",".join(format_trace(a) for a in tok.args)
    return f"[{inner}] => {tok.result}"


class TraceSyntaxError(ValueError):
    pass


def parse_trace(text: str) -> Trace:
    trace, pos = _parse_trace(text, 0)
    if text[pos:].strip():
        raise TraceSyntaxError(f"trailing input at {pos}: {text[pos:]!r}")
    return trace


def _skip_ws(s: str, i: int) -> int:
    while i < len(s) and s[i].isspace():
        i += 1
    return i


def _parse_trace(s: str, i: int) -> tuple[Trace, int]:
    i = _skip_ws(s, i)
    if i >= len(s):
        raise TraceSyntaxError("unexpected end of trace")
    if s[i] == "_":
        return BOTTOM_TRACE, i + 1
    if s[i].isdigit():
        j = i
        while j < len(s) and s[j].isdigit():
            j += 1
        return ground_trace(int(s[i:j])), j
    if s[i] == "{":
        i += 1
        toks: list[Token] = []
        i = _skip_ws(s, i)
        if i < len(s) and s[i] == "}":
            return Trace(()), i + 1
        while True:
            tok, i = _parse_token(s, i)
            toks.append(tok)
            i = _skip_ws(s, i)
            if i < len(s) and s[i] == ";":
                i += 1
                continue
            if i < len(s) and s[i] == "}":
                return Trace(tuple(toks)), i + 1
            raise TraceSyntaxError(f"expected ';' or '}}' at {i}")
    raise TraceSyntaxError(f"unexpected {s[i]!r} at {i}")


def _parse_token(s: str, i: int) -> tuple[Token, int]:
    i = _skip_ws(s, i)
    if s[i].isdigit():
        j = i
        while j < len(s) and s[j].isdigit():
            j += 1
        return Token((), int(s[i:j])), j
    if s[i] != "[":
        raise TraceSyntaxError(f"expected token at {i}")
    i += 1
    args: list[Trace] = []
    i = _skip_ws(s, i)
    if i < len(s) and s[i] == "]":
        i += 1
    else:
        while True:
            a, i = _parse_trace(s, i)
            args.append(a)
            i = _skip_ws(s, i)
            if i < len(s) and s[i] == ",":
                i += 1
                continue
            if i < len(s) and s[i] == "]":
                i += 1
                break
            raise TraceSyntaxError(f"expected ',' or ']' at {i}")
    i = _skip_ws(s, i)
    if not s.startswith("=>", i):
        raise TraceSyntaxError(f"expected '=>' at {i}")
    i = _skip_ws(s, i + 2)
    j = i
    while j < len(s) and s[j].isdigit():
        j += 1
    if j == i:
        raise TraceSyntaxError(f"expected result value at {i}")
    return Token(tuple(args), int(s[i:j])), j
