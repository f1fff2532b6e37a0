"""Semantic engine: elements, and trace computation by symbolic evaluation.

A closed term of a type with first-order parameters is evaluated against
symbolic arguments.  Every call a parameter receives branches over the
possible responses; a finished converging branch leaves, per parameter, a
set of call/response constraints whose stable-order-minimal satisfiers are
the token arguments.  The union of the per-branch tokens, minimized across
branches, is exactly the trace of the denotation.

The same evaluator run with concrete first-order elements in the
environment computes extensional tables, and it interprets `str` by its two
sub-evaluations, so pcf_str terms get traces in the extended model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import firstorder as fo
from .reduction import FuelExhausted
from .syntax import (
    NAT, App, Arrow, Case, Fst, Ground, If, IntConst, Lam, Omega, Pair,
    PcfError, PcfTypeError, Pre, Snd, Str, Suc, Term, Type, Var, Y, app,
    flatten, typecheck,
)
from .traces import Token, Trace, ground_trace, minimal_traces

DEFAULT_SEM_FUEL = 2_000


# ---------------------------------------------------------------------------
# Elements


@dataclass(frozen=True)
class Element:
    """A semantic equivalence class at (type, grade), keyed by its trace."""

    ty: Type
    grade: int
    trace: Trace
    rep: Optional[Term] = field(default=None, compare=False)

    @property
    def is_bottom(self) -> bool:
        return self.trace.is_bottom

    def value_at(self, args: tuple[Trace, ...]) -> int:
        """Ground result on an argument vector given by traces; -1 is bottom."""
        result = -1
        for tok in self.trace.tokens:
            if all(u.le(a) for u, a in zip(tok.args, args)):
                assert result in (-1, tok.result), "trace is not a function"
                result = tok.result
        return result

    def __str__(self) -> str:
        return str(self.trace)


def param_types(ty: Type) -> tuple[tuple[int, ...], Type]:
    """Arities of the flattened first-order parameters of a product-free type."""
    params, ground = flatten(ty)
    arities = []
    for p in params:
        inner, _ = flatten(p)
        for q in inner:
            if not isinstance(q, Ground):
                raise PcfTypeError(
                    f"parameter {p} is not first-order; traces are supported "
                    "only up to second-order types")
        arities.append(len(inner))
    return tuple(arities), ground


def fo_trace(e: fo.FOElement) -> Trace:
    return e.trace


def token_args_le(a: Token, b: Token) -> bool:
    return all(x.le(y) for x, y in zip(a.args, b.args))


def minimize_tokens(tokens) -> tuple[Token, ...]:
    toks = sorted(set(tokens))
    out = []
    for t in toks:
        dominated = False
        for o in toks:
            if o is t or o == t:
                continue
            if token_args_le(o, t):
                assert o.result == t.result, \
                    f"conflicting tokens {o} and {t}"
                dominated = True
                break
        if not dominated:
            out.append(t)
    return tuple(out)


# ---------------------------------------------------------------------------
# Runtime values


@dataclass(frozen=True, eq=False)
class Thunk:
    term: Term
    env: dict


@dataclass(frozen=True, eq=False)
class Closure:
    lam: Lam
    env: dict


@dataclass(frozen=True)
class SymF:
    param: int
    arity: int
    grade: int
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class ElemF:
    elem: fo.FOElement
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class PrimF:
    kind: str  # suc | pre | if | str
    args: tuple = ()


@dataclass(frozen=True)
class BotF:
    ty: Type


@dataclass(frozen=True, eq=False)
class PairV:
    left: Thunk
    right: Thunk


Store = tuple[dict, ...]  # one {call: response} dict per symbolic parameter


def _extend(store: Store, p: int, call, resp) -> Store:
    new = dict(store[p])
    new[call] = resp
    return store[:p] + (new,) + store[p + 1:]


class _Machine:
    def __init__(self, grade: int, nparams: int, fuel: int = DEFAULT_SEM_FUEL):
        self.grade = grade
        self.nparams = nparams
        self.fuel = fuel

    def empty_store(self) -> Store:
        return tuple({} for _ in range(self.nparams))

    # evaluation -----------------------------------------------------------

    def paths(self, t: Term, env: dict, store: Store) -> Iterator[tuple[object, Store]]:
        if isinstance(t, IntConst):
            yield t.n, store
            return
        if isinstance(t, Omega):
            yield self.bot_value(t.ty), store
            return
        if isinstance(t, Var):
            entry = env.get(t)
            if entry is None:
                raise PcfError(f"unbound variable {t.name} during evaluation")
            if isinstance(entry, Thunk):
                yield from self.paths(entry.term, entry.env, store)
            else:
                yield from self.resolve(entry, store)
            return
        if isinstance(t, Lam):
            yield Closure(t, env), store
            return
        if isinstance(t, (Suc, Pre, If, Str)):
            yield PrimF(t.__class__.__name__.lower()), store
            return
        if isinstance(t, App):
            for fv, s in self.paths(t.fn, env, store):
                yield from self.apply(fv, Thunk(t.arg, env), s)
            return
        if isinstance(t, Y):
            self.fuel -= 1
            if self.fuel < 0:
                raise FuelExhausted("fix unrolling budget exhausted")
            yield from self.paths(App(t.body, t), env, store)
            return
        if isinstance(t, Case):
            for v, s in self.paths(t.scrut, env, store):
                if v == -1 or v > t.arity:
                    yield -1, s
                else:
                    yield from self.paths(t.branches[v], env, s)
            return
        if isinstance(t, Pair):
            yield PairV(Thunk(t.left, env), Thunk(t.right, env)), store
            return
        if isinstance(t, Fst):
            for v, s in self.paths(t.body, env, store):
                if isinstance(v, PairV):
                    yield from self.paths(v.left.term, v.left.env, s)
                elif isinstance(v, BotF):
                    yield self.bot_value(v.ty.left), s
                else:
                    raise PcfError("fst of a non-pair")
            return
        if isinstance(t, Snd):
            for v, s in self.paths(t.body, env, store):
                if isinstance(v, PairV):
                    yield from self.paths(v.right.term, v.right.env, s)
                elif isinstance(v, BotF):
                    yield self.bot_value(v.ty.right), s
                else:
                    raise PcfError("snd of a non-pair")
            return
        raise TypeError(t)

    def bot_value(self, ty: Type):
        if isinstance(ty, Ground):
            return -1
        return BotF(ty)

    def resolve(self, v, store: Store) -> Iterator[tuple[object, Store]]:
        """Saturated symbolic applications branch into responses here."""
        if isinstance(v, SymF) and len(v.args) == v.arity:
            call = v.args
            known = store[v.param].get(call)
            if known is not None:
                yield known, store
                return
            for r in range(-1, self.grade + 1):
                yield r, _extend(store, v.param, call, r)
            return
        if isinstance(v, ElemF) and len(v.args) == v.elem.arity:
            yield v.elem(v.args), store
            return
        yield v, store

    def ground(self, thunk: Thunk, store: Store) -> Iterator[tuple[int, Store]]:
        for v, s in self.paths(thunk.term, thunk.env, store):
            if not isinstance(v, int):
                raise PcfError(f"expected a ground value, got {v!r}")
            yield v, s

    def apply(self, fv, arg: Thunk, store: Store) -> Iterator[tuple[object, Store]]:
        if isinstance(fv, Closure):
            env = dict(fv.env)
            env[fv.lam.var] = arg
            yield from self.paths(fv.lam.body, env, store)
            return
        if isinstance(fv, BotF):
            yield self.bot_value(fv.ty.cod), store
            return
        if isinstance(fv, SymF):
            for av, s in self.ground(arg, store):
                if av > self.grade:
                    av = -1  # the grade filter on inputs
                yield from self.resolve(SymF(fv.param, fv.arity, fv.grade, fv.args + (av,)), s)
            return
        if isinstance(fv, ElemF):
            for av, s in self.ground(arg, store):
                yield from self.resolve(ElemF(fv.elem, fv.args + (av,)), s)
            return
        if isinstance(fv, PrimF):
            yield from self.apply_prim(fv, arg, store)
            return
        raise PcfError(f"cannot apply {fv!r}")

    def apply_prim(self, fv: PrimF, arg: Thunk, store: Store):
        kind = fv.kind
        if kind == "suc":
            for v, s in self.ground(arg, store):
                yield (-1 if v == -1 else v + 1), s
            return
        if kind == "pre":
            for v, s in self.ground(arg, store):
                yield (-1 if v <= 0 else v - 1), s
            return
        if kind == "if":
            have = fv.args
            if len(have) < 2:
                yield PrimF("if", have + (arg,)), store
                return
            cond, then_ = have
            for v, s in self.ground(cond, store):
                if v == -1:
                    yield -1, s
                elif v == 0:
                    yield from self.paths(then_.term, then_.env, s)
                else:
                    yield from self.paths(arg.term, arg.env, s)
            return
        if kind == "str":
            for mv, s in self.paths(arg.term, arg.env, store):
                zero = Thunk(IntConst(0), {})
                bottom = Thunk(Omega(NAT), {})
                for v0, s0 in self.apply(mv, zero, s):
                    if v0 != 0:
                        yield -1, s0
                        continue
                    for vb, sb in self.apply(mv, bottom, s0):
                        yield (0 if vb == -1 else -1), sb
            return
        raise PcfError(f"unknown primitive {kind}")


# ---------------------------------------------------------------------------
# Traces of terms


def _param_vars(ty: Type) -> list[Var]:
    params, _ = flatten(ty)
    return [Var(f"_p{k}", p) for k, p in enumerate(params)]


def term_paths(t: Term, grade: int, mode: str = "pcf",
               fuel: int = DEFAULT_SEM_FUEL) -> list[tuple[int, Store]]:
    """All (ground result, constraint store) pairs of t against symbolic arguments."""
    ty = typecheck(t, mode)
    arities, _ = param_types(ty)
    pv = _param_vars(ty)
    machine = _Machine(grade, len(arities), fuel)
    env = {v: SymF(k, arities[k], grade) for k, v in enumerate(pv)}
    applied = app(t, *pv)
    out = []
    for v, s in machine.paths(applied, env, machine.empty_store()):
        assert isinstance(v, int)
        out.append((v, s))
    return out


def trace_of_term(t: Term, grade: int, mode: str = "pcf",
                  fuel: int = DEFAULT_SEM_FUEL) -> Trace:
    """The trace of the grade-filtered denotation of a closed term."""
    ty = typecheck(t, mode)
    arities, _ = param_types(ty)
    tokens: list[Token] = []
    for result, store in term_paths(t, grade, mode, fuel):
        if result == -1 or result > grade:
            continue  # the grade filter on the output
        per_param = []
        for k, arity in enumerate(arities):
            sats = fo.minimal_satisfiers(store[k], arity, grade)
            per_param.append([e.trace for e in sats])
        if any(not choices for choices in per_param):
            continue  # a branch whose constraints no element satisfies
        for combo in itertools.product(*per_param):
            tokens.append(Token(tuple(combo), result))
    return Trace(minimize_tokens(tokens))


def element_of_term(t: Term, grade: int, mode: str = "pcf",
                    fuel: int = DEFAULT_SEM_FUEL) -> Element:
    return Element(typecheck(t, mode), grade, trace_of_term(t, grade, mode, fuel), rep=t)


def eval_with_elements(t: Term, args: list[fo.FOElement], grade: int,
                       mode: str = "pcf", fuel: int = DEFAULT_SEM_FUEL) -> int:
    """Ground value of t applied to concrete first-order elements; -1 is bottom."""
    ty = typecheck(t, mode)
    pv = _param_vars(ty)
    if len(pv) != len(args):
        raise PcfError(f"expected {len(pv)} arguments, got {len(args)}")
    machine = _Machine(grade, 0, fuel)
    env = {v: ElemF(e) for v, e in zip(pv, args)}
    results = {v for v, _ in machine.paths(app(t, *pv), env, machine.empty_store())}
    assert len(results) == 1, f"concrete evaluation branched: {results}"
    v = results.pop()
    assert isinstance(v, int)
    return v if v <= grade else -1


# ---------------------------------------------------------------------------
# Element algebra


def apply_element(f: Element, d: Element) -> Element:
    """Application via traces: filter tokens by the argument, re-minimize."""
    if not isinstance(f.ty, Arrow):
        raise PcfTypeError("apply needs a function element")
    kept = []
    for tok in f.trace.tokens:
        if tok.args and tok.args[0].le(d.trace):
            kept.append(Token(tok.args[1:], tok.result))
    rep = None
    if f.rep is not None and d.rep is not None:
        rep = App(f.rep, d.rep)
    return Element(f.ty.cod, f.grade, Trace(minimize_tokens(kept)), rep=rep)


def ext_le(a: Element, b: Element) -> bool:
    """Extensional order: every token of a is matched by b's value there."""
    return all(b.value_at(tok.args) == tok.result for tok in a.trace.tokens)


def stable_le_elements(a: Element, b: Element) -> bool:
    return a.trace.le(b.trace)


def ground_element(n: Optional[int], grade: int) -> Element:
    return Element(NAT, grade, ground_trace(n),
                   rep=IntConst(n) if n is not None else Omega(NAT))


def bottom_like(e: Element) -> Element:
    return Element(e.ty, e.grade, Trace(()), rep=None)
