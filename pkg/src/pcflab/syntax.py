"""Abstract syntax of PCF with case-expressions, str, and the unary product fragment.

Provides types, terms, a bidirectional parser/printer for the line-oriented
concrete grammar, the syntactic order (Omega-match), and Stoughton-style
simultaneous capture-avoiding substitution with a deterministic fresh-name
choice.  Terms are immutable and hashable; alpha-equivalence goes through a
canonical de Bruijn form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

# ---------------------------------------------------------------------------
# Types

BOT = -1  # ground bottom, used as a value code throughout the package


class Type:
    __slots__ = ()

    def __str__(self) -> str:
        return format_type(self)

    def __repr__(self) -> str:
        return format_type(self)


@dataclass(frozen=True, repr=False)
class Ground(Type):
    __slots__ = ()


@dataclass(frozen=True, repr=False)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True, repr=False)
class Product(Type):
    left: Type
    right: Type


NAT = Ground()


def format_type(ty: Type) -> str:
    if isinstance(ty, Ground):
        return "nat"
    if isinstance(ty, Arrow):
        dom = format_type(ty.dom)
        if isinstance(ty.dom, Arrow):
            dom = f"({dom})"
        return f"{dom} -> {format_type(ty.cod)}"
    if isinstance(ty, Product):
        left = format_type(ty.left)
        right = format_type(ty.right)
        if isinstance(ty.left, (Arrow, Product)):
            left = f"({left})"
        if isinstance(ty.right, Arrow):
            right = f"({right})"
        return f"{left} * {right}"
    raise TypeError(ty)


def type_order(ty: Type) -> int:
    if isinstance(ty, Ground):
        return 0
    if isinstance(ty, Arrow):
        return max(type_order(ty.dom) + 1, type_order(ty.cod))
    if isinstance(ty, Product):
        return max(type_order(ty.left), type_order(ty.right))
    raise TypeError(ty)


def flatten(ty: Type) -> tuple[tuple[Type, ...], Type]:
    """Flatten a product-free type to (parameter types, ground codomain)."""
    params: list[Type] = []
    while isinstance(ty, Arrow):
        params.append(ty.dom)
        ty = ty.cod
    if not isinstance(ty, Ground):
        raise PcfTypeError(f"type is not product-free up to ground: {ty}")
    return tuple(params), ty


def arrow(*tys: Type) -> Type:
    ty = tys[-1]
    for dom in reversed(tys[:-1]):
        ty = Arrow(dom, ty)
    return ty


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)

    def __repr__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, repr=False)
class IntConst(Term):
    n: int


@dataclass(frozen=True, repr=False)
class Suc(Term):
    __slots__ = ()


@dataclass(frozen=True, repr=False)
class Pre(Term):
    __slots__ = ()


@dataclass(frozen=True, repr=False)
class If(Term):
    __slots__ = ()


@dataclass(frozen=True, repr=False)
class Str(Term):
    __slots__ = ()


@dataclass(frozen=True, repr=False)
class Omega(Term):
    ty: Type


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str
    ty: Type


@dataclass(frozen=True, repr=False)
class Lam(Term):
    var: Var
    body: Term


@dataclass(frozen=True, repr=False)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, repr=False)
class Y(Term):
    body: Term


@dataclass(frozen=True, repr=False)
class Case(Term):
    arity: int
    scrut: Term
    branches: tuple[Term, ...]


@dataclass(frozen=True, repr=False)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Fst(Term):
    body: Term


@dataclass(frozen=True, repr=False)
class Snd(Term):
    body: Term


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def lam(variables, body: Term) -> Term:
    for v in reversed(list(variables)):
        body = Lam(v, body)
    return body


def num(n: int) -> Term:
    return IntConst(n)


def ite(c: Term, t: Term, e: Term) -> Term:
    return app(If(), c, t, e)


def bot(ty: Type = NAT) -> Term:
    return Omega(ty)


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split nested applications into (head, argument list)."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, (Y, Fst, Snd)):
        return (t.body,)
    if isinstance(t, Case):
        return (t.scrut,) + t.branches
    if isinstance(t, Pair):
        return (t.left, t.right)
    return ()


def replace_child(t: Term, idx: int, new: Term) -> Term:
    if isinstance(t, Lam):
        return Lam(t.var, new)
    if isinstance(t, App):
        return App(new, t.arg) if idx == 0 else App(t.fn, new)
    if isinstance(t, Y):
        return Y(new)
    if isinstance(t, Fst):
        return Fst(new)
    if isinstance(t, Snd):
        return Snd(new)
    if isinstance(t, Case):
        if idx == 0:
            return Case(t.arity, new, t.branches)
        br = list(t.branches)
        br[idx - 1] = new
        return Case(t.arity, t.scrut, tuple(br))
    if isinstance(t, Pair):
        return Pair(new, t.right) if idx == 0 else Pair(t.left, new)
    raise ValueError(f"{t!r} has no child {idx}")


def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        t = children(t)[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    return replace_child(t, i, replace_at(children(t)[i], path[1:], new))


def subterms(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """All (path, subterm) pairs, preorder."""
    stack = [((), t)]
    while stack:
        path, s = stack.pop()
        yield path, s
        for i, c in enumerate(children(s)):
            stack.append((path + (i,), c))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in children(t))


def free_vars(t: Term) -> frozenset[Var]:
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    out: frozenset[Var] = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


# ---------------------------------------------------------------------------
# Type checking

MODES = ("pcf", "pcf_str", "unary")


class PcfError(Exception):
    pass


class PcfSyntaxError(PcfError):
    pass


class PcfTypeError(PcfError):
    pass


def typecheck(t: Term, mode: str = "pcf") -> Type:
    """Synthesize the principal type; raises PcfTypeError with the path on failure."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return _synth(t, mode, ())


def _fail(path, msg) -> Type:
    raise PcfTypeError(f"at path {list(path)}: {msg}")


def _synth(t: Term, mode: str, path) -> Type:
    unary = mode == "unary"
    if isinstance(t, IntConst):
        if t.n < 0:
            _fail(path, "negative constant")
        if unary and t.n != 0:
            _fail(path, "unary mode admits only the constant 0")
        return NAT
    if isinstance(t, Suc):
        if unary:
            _fail(path, "succ is not unary PCF")
        return arrow(NAT, NAT)
    if isinstance(t, Pre):
        if unary:
            _fail(path, "pred is not unary PCF")
        return arrow(NAT, NAT)
    if isinstance(t, If):
        if unary:
            _fail(path, "if is not unary PCF")
        return arrow(NAT, NAT, NAT, NAT)
    if isinstance(t, Str):
        if mode != "pcf_str":
            _fail(path, "str requires pcf_str mode")
        return arrow(arrow(NAT, NAT), NAT)
    if isinstance(t, Omega):
        return t.ty
    if isinstance(t, Var):
        return t.ty
    if isinstance(t, Lam):
        return Arrow(t.var.ty, _synth(t.body, mode, path + (0,)))
    if isinstance(t, App):
        fty = _synth(t.fn, mode, path + (0,))
        if not isinstance(fty, Arrow):
            _fail(path, f"applied a term of non-function type {fty}")
        aty = _synth(t.arg, mode, path + (1,))
        if aty != fty.dom:
            _fail(path + (1,), f"argument type {aty}, expected {fty.dom}")
        return fty.cod
    if isinstance(t, Y):
        if unary:
            _fail(path, "fix is not unary PCF")
        bty = _synth(t.body, mode, path + (0,))
        if not isinstance(bty, Arrow) or bty.dom != bty.cod:
            _fail(path, f"fix needs a term of type T -> T, got {bty}")
        return bty.dom
    if isinstance(t, Case):
        if unary and t.arity != 0:
            _fail(path, "unary mode admits only case0")
        if len(t.branches) != t.arity + 1:
            _fail(path, f"case{t.arity} needs {t.arity + 1} branches")
        if _synth(t.scrut, mode, path + (0,)) != NAT:
            _fail(path + (0,), "case scrutinee must be ground")
        for k, b in enumerate(t.branches):
            if _synth(b, mode, path + (k + 1,)) != NAT:
                _fail(path + (k + 1,), "case branch must be ground")
        return NAT
    if isinstance(t, Pair):
        if not unary:
            _fail(path, "pairs exist only in unary mode")
        return Product(_synth(t.left, mode, path + (0,)),
                       _synth(t.right, mode, path + (1,)))
    if isinstance(t, (Fst, Snd)):
        if not unary:
            _fail(path, "projections exist only in unary mode")
        bty = _synth(t.body, mode, path + (0,))
        if not isinstance(bty, Product):
            _fail(path, f"projection of non-product type {bty}")
        return bty.left if isinstance(t, Fst) else bty.right
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Alpha equivalence via canonical de Bruijn form


def canon(t: Term):
    """Canonical nested-tuple form; bound variables become de Bruijn indices."""
    return _canon(t, {})


def _canon(t: Term, env: dict[Var, int]):
    if isinstance(t, Var):
        if t in env:
            return ("b", len(env) - 1 - env[t])
        return ("f", t.name, format_type(t.ty))
    if isinstance(t, Lam):
        inner = dict(env)
        inner[t.var] = len(env)
        return ("lam", format_type(t.var.ty), _canon(t.body, inner))
    if isinstance(t, IntConst):
        return ("n", t.n)
    if isinstance(t, Omega):
        return ("bot", format_type(t.ty))
    if isinstance(t, (Suc, Pre, If, Str)):
        return (type(t).__name__.lower(),)
    if isinstance(t, Case):
        return ("case", t.arity, _canon(t.scrut, env),
                tuple(_canon(b, env) for b in t.branches))
    tag = type(t).__name__.lower()
    return (tag,) + tuple(_canon(c, env) for c in children(t))


def alpha_eq(a: Term, b: Term) -> bool:
    return canon(a) == canon(b)


# ---------------------------------------------------------------------------
# Stoughton substitution

Substitution = Mapping[Var, Term]

_NUM_SUFFIX = re.compile(r"\d+$")


def new_names(x: Var, m: Term, s: Substitution) -> frozenset[str]:
    """Names y such that binding y avoids capture: y not free in s(z) for z free in m, z != x."""
    forbidden: set[str] = set()
    for z in free_vars(m):
        if z == x:
            continue
        for w in free_vars(s.get(z, z)):
            forbidden.add(w.name)
    return frozenset({x.name} | {f"{_NUM_SUFFIX.sub('', x.name) or 'x'}{k}" for k in range(1, len(forbidden) + 2)}) - frozenset(forbidden)


def choice(x: Var, candidates: frozenset[str]) -> Var:
    """Deterministic pick: keep x when safe, else the lowest positively indexed variant."""
    if x.name in candidates:
        return x
    base = _NUM_SUFFIX.sub("", x.name) or "x"
    k = 1
    while f"{base}{k}" not in candidates:
        k += 1
    return Var(f"{base}{k}", x.ty)


def substitute(m: Term, s: Substitution) -> Term:
    """Simultaneous capture-avoiding substitution (Stoughton style)."""
    for v, t in s.items():
        if not isinstance(t, Term):
            raise PcfTypeError(f"substitution for {v.name} is not a term")
    if isinstance(m, Var):
        return s.get(m, m)
    if isinstance(m, Lam):
        x = m.var
        y = choice(x, new_names(x, m.body, s))
        inner = {v: t for v, t in s.items() if v != x}
        inner[x] = y
        return Lam(y, substitute(m.body, inner))
    if not children(m):
        return m
    out = m
    for i, c in enumerate(children(m)):
        out = replace_child(out, i, substitute(c, s))
    return out


def subst1(m: Term, x: Var, n: Term) -> Term:
    return substitute(m, {x: n})


_fresh_counter = [0]


def fresh_var(ty: Type, base: str = "x", avoid: frozenset[str] = frozenset()) -> Var:
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return Var(f"{base}{k}", ty)


# ---------------------------------------------------------------------------
# Syntactic order (Omega-match)


@dataclass(frozen=True)
class SynOrderWitness:
    source: Term
    target: Term
    filled: tuple[tuple[int, ...], ...]

    def apply(self) -> Term:
        """Fill the listed Omega positions of source from target; yields target."""
        out = self.source
        for path in self.filled:
            out = replace_at(out, path, subterm_at(self.target, path))
        return _pad_cases(out, self.target)


def _pad_cases(src: Term, tgt: Term) -> Term:
    """Widen case arities of src to match tgt (extra arms come from tgt)."""
    if isinstance(src, Case) and isinstance(tgt, Case) and src.arity < tgt.arity:
        scrut = _pad_cases(src.scrut, tgt.scrut)
        br = [_pad_cases(b, tb) for b, tb in zip(src.branches, tgt.branches)]
        br += list(tgt.branches[src.arity + 1:])
        return Case(tgt.arity, scrut, tuple(br))
    cs, ct = children(src), children(tgt)
    if type(src) is type(tgt) and len(cs) == len(ct):
        out = src
        for i, (a, b) in enumerate(zip(cs, ct)):
            out = replace_child(out, i, _pad_cases(a, b))
        return out
    return src


def syn_le(m: Term, n: Term, mode: str = "pcf") -> Optional[SynOrderWitness]:
    """Omega-match order: a witness iff n is m with some Omegas replaced.

    On case nodes the arity may grow (case_i vs case_j, i <= j), matching the
    order on the macro expansions.  Comparison is up to alpha.
    """
    if typecheck(m, mode) != typecheck(n, mode):
        raise PcfTypeError("syn_le requires terms of equal type")
    filled: list[tuple[int, ...]] = []
    if _syn_le(m, n, {}, {}, (), filled):
        return SynOrderWitness(m, n, tuple(filled))
    return None


def _syn_le(m: Term, n: Term, em: dict[Var, int], en: dict[Var, int],
            path: tuple[int, ...], filled: list) -> bool:
    if isinstance(m, Omega):
        if not (isinstance(n, Omega) and _canon(m, em) == _canon(n, en)):
            filled.append(path)
        return True
    if isinstance(m, Case) and isinstance(n, Case):
        if m.arity > n.arity:
            return False
        if not _syn_le(m.scrut, n.scrut, em, en, path + (0,), filled):
            return False
        for k in range(m.arity + 1):
            if not _syn_le(m.branches[k], n.branches[k], em, en, path + (k + 1,), filled):
                return False
        return True
    if type(m) is not type(n):
        return False
    if isinstance(m, Var):
        return _canon(m, em) == _canon(n, en)
    if isinstance(m, IntConst):
        return m.n == n.n
    if isinstance(m, Lam):
        if m.var.ty != n.var.ty:
            return False
        em2, en2 = dict(em), dict(en)
        em2[m.var] = len(em)
        en2[n.var] = len(en)
        return _syn_le(m.body, n.body, em2, en2, path + (0,), filled)
    cm, cn = children(m), children(n)
    if len(cm) != len(cn):
        return False
    return all(_syn_le(a, b, em, en, path + (i,), filled)
               for i, (a, b) in enumerate(zip(cm, cn)))


# ---------------------------------------------------------------------------
# Concrete syntax: lexer

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<case>case\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<arrow>->)
  | (?P<sym>[\\.():;,*<>])
""", re.VERBOSE)

_KEYWORDS = {"nat", "bot", "succ", "pred", "if", "then", "else", "fix",
             "str", "fst", "snd"}


def _lex(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise PcfSyntaxError(f"offset {pos}: unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            kind = m.lastgroup
            val = m.group()
            if kind == "id" and val in _KEYWORDS:
                kind = val
            toks.append((kind, val, pos))
        pos = m.end()
    toks.append(("eof", "", pos))
    return toks


class _Parser:
    def __init__(self, text: str, mode: str):
        self.toks = _lex(text)
        self.i = 0
        self.mode = mode

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> str:
        k, v, p = self.next()
        if k != kind:
            raise PcfSyntaxError(f"offset {p}: expected {kind!r}, found {v!r}")
        return v

    def fail(self, msg):
        _, v, p = self.peek()
        raise PcfSyntaxError(f"offset {p}: {msg} (at {v!r})")

    # types ---------------------------------------------------------------

    def type_(self) -> Type:
        ty = self.ptype()
        if self.peek()[0] == "arrow":
            self.next()
            return Arrow(ty, self.type_())
        return ty

    def ptype(self) -> Type:
        ty = self.atype()
        if self.peek()[0] == "sym" and self.peek()[1] == "*":
            if self.mode != "unary":
                self.fail("product types are unary-mode only")
            self.next()
            return Product(ty, self.ptype())
        return ty

    def atype(self) -> Type:
        k, v, p = self.next()
        if k == "nat":
            return NAT
        if k == "sym" and v == "(":
            ty = self.type_()
            self.expect_sym(")")
            return ty
        raise PcfSyntaxError(f"offset {p}: expected a type, found {v!r}")

    def expect_sym(self, s: str):
        k, v, p = self.next()
        if k != "sym" or v != s:
            raise PcfSyntaxError(f"offset {p}: expected {s!r}, found {v!r}")

    # terms ---------------------------------------------------------------

    def term(self, env: dict[str, Var]) -> "_Raw":
        k, v, _ = self.peek()
        if k == "sym" and v == "\\":
            self.next()
            name = self.expect("id")
            self.expect_sym(":")
            ty = self.type_()
            self.expect_sym(".")
            var = Var(name, ty)
            inner = dict(env)
            inner[name] = var
            body = self.term(inner)
            return _RLam(var, body)
        if k == "if":
            self.next()
            c = self.term_no_app(env)
            self.expect("then")
            t = self.term_no_app(env)
            self.expect("else")
            e = self.term(env)
            return _RApp(_RApp(_RApp(_RConst(If()), c), t), e)
        return self.application(env)

    def term_no_app(self, env) -> "_Raw":
        # an application chain that stops at then/else
        out = self.atom(env)
        while self.starts_atom():
            out = _RApp(out, self.atom(env))
        return out

    def application(self, env) -> "_Raw":
        out = self.atom(env)
        while self.starts_atom():
            out = _RApp(out, self.atom(env))
        return out

    def starts_atom(self) -> bool:
        k, v, _ = self.peek()
        if k in ("int", "id", "bot", "succ", "pred", "fix", "str", "fst",
                 "snd", "case"):
            return True
        return k == "sym" and v in ("(", "<")

    def atom(self, env) -> "_Raw":
        k, v, p = self.next()
        if k == "int":
            return _RConst(IntConst(int(v)))
        if k == "bot":
            return _ROmega(None)
        if k == "id":
            if v not in env:
                raise PcfSyntaxError(f"offset {p}: unbound variable {v!r}")
            return _RConst(env[v])
        if k == "succ":
            return _RApp(_RConst(Suc()), self.atom(env))
        if k == "pred":
            return _RApp(_RConst(Pre()), self.atom(env))
        if k == "fix":
            return _RFix(self.atom(env))
        if k == "str":
            if self.mode != "pcf_str":
                raise PcfSyntaxError(f"offset {p}: str requires pcf_str mode")
            return _RApp(_RConst(Str()), self.atom(env))
        if k == "fst":
            return _RFst(self.atom(env))
        if k == "snd":
            return _RSnd(self.atom(env))
        if k == "case":
            arity = int(v[4:])
            self.expect_sym("(")
            scrut = self.term(env)
            self.expect_sym(";")
            branches = [self.term(env)]
            while self.peek()[:2] == ("sym", ","):
                self.next()
                branches.append(self.term(env))
            self.expect_sym(")")
            if len(branches) != arity + 1:
                raise PcfSyntaxError(
                    f"offset {p}: case{arity} needs {arity + 1} branches, got {len(branches)}")
            return _RCase(arity, scrut, branches)
        if k == "sym" and v == "<":
            left = self.term(env)
            self.expect_sym(",")
            right = self.term(env)
            k2, v2, p2 = self.next()
            if (k2, v2) != ("sym", ">"):
                raise PcfSyntaxError(f"offset {p2}: expected '>', found {v2!r}")
            return _RPair(left, right)
        if k == "sym" and v == "(":
            t = self.term(env)
            if self.peek()[:2] == ("sym", ":"):
                self.next()
                ty = self.type_()
                t = _RAscribe(t, ty)
            self.expect_sym(")")
            return t
        raise PcfSyntaxError(f"offset {p}: expected a term, found {v!r}")


# Raw (pre-typing) tree: only bot needs inference, so keep it tiny.

class _Raw:
    pass


@dataclass
class _RConst(_Raw):
    t: Term


@dataclass
class _ROmega(_Raw):
    ty: Optional[Type]


@dataclass
class _RLam(_Raw):
    var: Var
    body: _Raw


@dataclass
class _RApp(_Raw):
    fn: _Raw
    arg: _Raw


@dataclass
class _RFix(_Raw):
    body: _Raw


@dataclass
class _RCase(_Raw):
    arity: int
    scrut: _Raw
    branches: list


@dataclass
class _RPair(_Raw):
    left: _Raw
    right: _Raw


@dataclass
class _RFst(_Raw):
    body: _Raw


@dataclass
class _RSnd(_Raw):
    body: _Raw


@dataclass
class _RAscribe(_Raw):
    body: _Raw
    ty: Type


def _elab(r: _Raw, expected: Optional[Type], mode: str) -> Term:
    """Bidirectional elaboration; the only checked holes are bot occurrences."""
    if isinstance(r, _ROmega):
        if r.ty is not None:
            return Omega(r.ty)
        if expected is None:
            raise PcfTypeError("cannot infer the type of this bot; annotate it as (bot : T)")
        return Omega(expected)
    if isinstance(r, _RAscribe):
        t = _elab(r.body, r.ty, mode)
        return t
    if isinstance(r, _RConst):
        return r.t
    if isinstance(r, _RLam):
        body_expected = None
        if isinstance(expected, Arrow) and expected.dom == r.var.ty:
            body_expected = expected.cod
        return Lam(r.var, _elab(r.body, body_expected, mode))
    if isinstance(r, _RApp):
        fn = _elab(r.fn, None, mode)
        fty = typecheck(fn, mode)
        if not isinstance(fty, Arrow):
            raise PcfTypeError(f"applied a term of non-function type {fty}")
        return App(fn, _elab(r.arg, fty.dom, mode))
    if isinstance(r, _RFix):
        body = _elab(r.body, None, mode)
        return Y(body)
    if isinstance(r, _RCase):
        return Case(r.arity, _elab(r.scrut, NAT, mode),
                    tuple(_elab(b, NAT, mode) for b in r.branches))
    if isinstance(r, _RPair):
        le = re_ = None
        if isinstance(expected, Product):
            le, re_ = expected.left, expected.right
        return Pair(_elab(r.left, le, mode), _elab(r.right, re_, mode))
    if isinstance(r, _RFst):
        return Fst(_elab(r.body, None, mode))
    if isinstance(r, _RSnd):
        return Snd(_elab(r.body, None, mode))
    raise TypeError(r)


def parse_term(text: str, mode: str = "pcf") -> Term:
    """Parse concrete syntax to a well-typed Term; bot types are inferred where checkable."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    p = _Parser(text, mode)
    raw = p.term({})
    if p.peek()[0] != "eof":
        p.fail("trailing input")
    t = _elab(raw, None, mode)
    typecheck(t, mode)
    return t


def parse_type(text: str) -> Type:
    p = _Parser(text, "unary")
    ty = p.type_()
    if p.peek()[0] != "eof":
        p.fail("trailing input")
    return ty


# ---------------------------------------------------------------------------
# Printer


def pretty(t: Term) -> str:
    """Concrete syntax; parse(pretty(t)) is alpha-equal to t."""
    return _pp(t, inferable=False)


def _atom_pp(t: Term, inferable: bool) -> str:
    s = _pp(t, inferable)
    if isinstance(t, (IntConst, Var, Pair)) or (isinstance(t, Omega) and inferable):
        return s
    if isinstance(t, (Suc, Pre, If, Str)):
        return s
    if isinstance(t, Case):
        return s
    return f"({s})"


def _pp(t: Term, inferable: bool) -> str:
    if isinstance(t, IntConst):
        return str(t.n)
    if isinstance(t, Suc):
        return "(\\s:nat. succ s)"  # bare succ exists only applied
    if isinstance(t, Pre):
        return "(\\s:nat. pred s)"
    if isinstance(t, If):
        return "(\\c:nat. \\t:nat. \\e:nat. if c then t else e)"
    if isinstance(t, Str):
        return "(\\s:nat -> nat. str s)"
    if isinstance(t, Omega):
        return "bot" if inferable else f"(bot : {format_type(t.ty)})"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.var.name}:{format_type(t.var.ty)}. {_pp(t.body, False)}"
    if isinstance(t, App):
        head, args = spine(t)
        if isinstance(head, If) and len(args) >= 3:
            c, th, el = args[0], args[1], args[2]
            base = (f"if {_atom_pp(c, True)} then {_atom_pp(th, True)} "
                    f"else {_atom_pp(el, True)}")
            rest = args[3:]
            if not rest:
                return base
            return " ".join([f"({base})"] + [_atom_pp(a, True) for a in rest])
        if isinstance(head, Suc) and len(args) == 1:
            return f"succ {_atom_pp(args[0], True)}"
        if isinstance(head, Pre) and len(args) == 1:
            return f"pred {_atom_pp(args[0], True)}"
        if isinstance(head, Str) and len(args) == 1:
            return f"str {_atom_pp(args[0], True)}"
        parts = [_atom_pp(head, False)] + [_atom_pp(a, True) for a in args]
        return " ".join(parts)
    if isinstance(t, Y):
        return f"fix {_atom_pp(t.body, False)}"
    if isinstance(t, Case):
        inner = ", ".join(_pp(b, True) for b in t.branches)
        return f"case{t.arity}({_pp(t.scrut, True)}; {inner})"
    if isinstance(t, Pair):
        return f"<{_pp(t.left, False)}, {_pp(t.right, False)}>"
    if isinstance(t, Fst):
        return f"fst {_atom_pp(t.body, False)}"
    if isinstance(t, Snd):
        return f"snd {_atom_pp(t.body, False)}"
    raise TypeError(t)
