"""Operational semantics: one-step and full reduction, ground evaluation,
the omega prefix map, the approx normalizer, and the str/unstr machinery.

Reduction is leftmost-outermost over the rules: beta, fix unrolling,
succ/pred/if on constants, and the case rule.  `str` has no rewrite rule;
eval_str evaluates it by its two sub-evaluations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .syntax import (
    NAT, App, Arrow, Case, Fst, Ground, If, IntConst, Lam, Omega, Pair,
    PcfError, Pre, Snd, Str, Suc, Term, Type, Var, Y, alpha_eq, app, arrow,
    children, ite, replace_child, spine, subst1, syn_le, typecheck,
)

DEFAULT_FUEL = 100_000


class FuelExhausted(PcfError):
    """Raised when normalize runs out of steps (possible divergence)."""


@dataclass(frozen=True)
class EvalResult:
    value: Optional[int]  # None encodes bottom

    @property
    def is_bottom(self) -> bool:
        return self.value is None


BOTTOM = EvalResult(None)


def value(n: int) -> EvalResult:
    return EvalResult(n)


# ---------------------------------------------------------------------------
# Single step


def _root_step(t: Term) -> Optional[Term]:
    if isinstance(t, App):
        head, args = spine(t)
        if isinstance(head, Lam) and args:
            reduced = subst1(head.body, head.var, args[0])
            return app(reduced, *args[1:])
        if isinstance(head, Suc) and args and isinstance(args[0], IntConst):
            return app(IntConst(args[0].n + 1), *args[1:]) if len(args) == 1 else None
        if isinstance(head, Pre) and args and isinstance(args[0], IntConst):
            n = args[0].n
            if n >= 1:
                return app(IntConst(n - 1), *args[1:]) if len(args) == 1 else None
            return None
        if isinstance(head, If) and len(args) >= 3 and isinstance(args[0], IntConst):
            picked = args[1] if args[0].n == 0 else args[2]
            return app(picked, *args[3:])
    if isinstance(t, Y):
        return App(t.body, t)
    if isinstance(t, Case) and isinstance(t.scrut, IntConst):
        n = t.scrut.n
        if 0 <= n <= t.arity:
            return t.branches[n]
        return None
    if isinstance(t, Fst) and isinstance(t.body, Pair):
        return t.body.left
    if isinstance(t, Snd) and isinstance(t.body, Pair):
        return t.body.right
    return None


def step(t: Term) -> Optional[Term]:
    """Leftmost-outermost single reduction step, or None if t is normal."""
    r = _root_step(t)
    if r is not None:
        return r
    for i, c in enumerate(children(t)):
        r = step(c)
        if r is not None:
            return replace_child(t, i, r)
    return None


def redex_positions(t: Term) -> list[tuple[int, ...]]:
    """All redex paths, for randomized-strategy confluence tests."""
    out = []
    stack: list[tuple[tuple[int, ...], Term]] = [((), t)]
    while stack:
        path, s = stack.pop()
        if _root_step(s) is not None:
            out.append(path)
        for i, c in enumerate(children(s)):
            stack.append((path + (i,), c))
    return sorted(out)


def step_at(t: Term, path: tuple[int, ...]) -> Term:
    from .syntax import replace_at, subterm_at
    red = _root_step(subterm_at(t, path))
    assert red is not None, "step_at called on a non-redex"
    return replace_at(t, path, red)


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Iterated leftmost-outermost reduction to normal form within fuel steps."""
    for _ in range(fuel):
        r = step(t)
        if r is None:
            return t
        t = r
    if step(t) is None:
        return t
    raise FuelExhausted(f"no normal form within {fuel} steps")


def eval_ground(t: Term, fuel: int = DEFAULT_FUEL) -> EvalResult:
    """Value(n) iff the closed ground term normalizes to the numeral n, else Bottom."""
    n = normalize(t, fuel)
    if isinstance(n, IntConst):
        return EvalResult(n.n)
    return BOTTOM


# ---------------------------------------------------------------------------
# The omega prefix map


def omega_prefix(t: Term) -> Term:
    """Immediate syntactic value: keep the head-normal prefix, Omega elsewhere.

    Case nodes survive only when the scrutinee prefix is variable- or
    case-headed, mirroring the unary nf map; this keeps the map monotone
    under beta/fix reduction.
    """
    ty = typecheck(t, _mode_of(t))
    vars_: list[Var] = []
    body = t
    while isinstance(body, Lam):
        vars_.append(body.var)
        body = body.body
    if isinstance(body, Case):
        s = omega_prefix(body.scrut)
        if isinstance(s, (Omega, IntConst)):
            return Omega(ty)
        out: Term = Case(body.arity, s, tuple(omega_prefix(b) for b in body.branches))
        for v in reversed(vars_):
            out = Lam(v, out)
        return out
    head, args = spine(body)
    if isinstance(head, (Var, IntConst, Suc, Pre, If, Str)):
        out = app(head, *[omega_prefix(a) for a in args])
        for v in reversed(vars_):
            out = Lam(v, out)
        return out
    return Omega(ty)


def _mode_of(t: Term) -> str:
    from .syntax import subterms
    for _, s in subterms(t):
        if isinstance(s, Str):
            return "pcf_str"
        if isinstance(s, (Pair, Fst, Snd)):
            return "unary"
        if isinstance(s, Case) and s.arity == 0:
            return "unary"
    return "pcf"


def beta_y_step_positions(t: Term) -> list[tuple[int, ...]]:
    """Redexes of the beta/fix sub-relation only (the omega-monotone fragment)."""
    from .syntax import subterm_at
    out = []
    for path in redex_positions(t):
        s = subterm_at(t, path)
        if isinstance(s, Y):
            out.append(path)
        elif isinstance(s, App):
            head, args = spine(s)
            if isinstance(head, Lam) and args:
                out.append(path)
    return out


# ---------------------------------------------------------------------------
# approx

EquivOracle = Callable[[Term, Term], bool]


def approx(t: Term, oracle: EquivOracle, fuel: int = DEFAULT_FUEL) -> Term:
    """Least Omega-prefix of the normal form that the oracle deems equivalent.

    Normalizes (fix unrolling consumes fuel), takes the omega prefix, then
    greedily prunes subterms to Omega, largest first in a deterministic
    post-order sweep, keeping a candidate only if oracle(t, candidate).
    A final audit asserts no single further pruning is accepted.
    """
    from .syntax import replace_at, subterm_at, subterms, term_size
    base = omega_prefix(normalize(t, fuel))
    if not oracle(t, base):
        raise PcfError("omega prefix of the normal form is not equivalent; "
                       "term is not finite at this grade")
    current = base
    changed = True
    while changed:
        changed = False
        cand_paths = sorted(
            (p for p, s in subterms(current) if not isinstance(s, Omega)),
            key=lambda p: (-term_size(subterm_at(current, p)), p))
        for p in cand_paths:
            s = subterm_at(current, p)
            if isinstance(s, Omega):
                continue
            pruned = replace_at(current, p, Omega(typecheck(s, _mode_of(current))))
            if oracle(t, pruned):
                current = pruned
                changed = True
                break
    for p, s in subterms(current):
        if isinstance(s, Omega):
            continue
        pruned = replace_at(current, p, Omega(typecheck(s, _mode_of(current))))
        assert not oracle(t, pruned), "approx pruning missed a least prefix"
    return current


# ---------------------------------------------------------------------------
# Case macro expansion (the paper's filter term)


def expand_cases(t: Term) -> Term:
    """Rewrite every case_i node to its if/pred chain; pure PCF output."""
    if isinstance(t, Case):
        scrut = expand_cases(t.scrut)
        out: Term = Omega(NAT)
        for k in range(t.arity, -1, -1):
            test = scrut
            for _ in range(k):
                test = App(Pre(), test)
            out = ite(test, expand_cases(t.branches[k]), out)
        return out
    res = t
    for i, c in enumerate(children(t)):
        res = replace_child(res, i, expand_cases(c))
    return res


# ---------------------------------------------------------------------------
# str evaluation and erasure


def eval_str(t: Term, fuel: int = DEFAULT_FUEL) -> EvalResult:
    """Evaluate a closed ground pcf_str term.

    `str M` yields 0 iff M 0 evaluates to 0 and M bot diverges; otherwise
    the application is stuck and the result is bottom.
    """
    budget = [fuel]

    def ev(u: Term) -> EvalResult:
        while True:
            if budget[0] <= 0:
                raise FuelExhausted(f"no value within {fuel} steps")
            if isinstance(u, App):
                head, args = spine(u)
                if isinstance(head, Str) and len(args) == 1:
                    e0 = ev(App(args[0], IntConst(0)))
                    if e0 == EvalResult(0):
                        eb = ev(App(args[0], Omega(NAT)))
                        if eb.is_bottom:
                            return EvalResult(0)
                    return BOTTOM
            r = step(u)
            if r is None:
                break
            budget[0] -= 1
            u = r
        # normal, str-free at the root by now
        if isinstance(u, IntConst):
            return EvalResult(u.n)
        # a stuck str may hide below a head constant; give inner strs a chance
        head, args = spine(u)
        if isinstance(head, (Suc, Pre)) and len(args) == 1:
            inner = ev(args[0])
            if inner.is_bottom:
                return BOTTOM
            budget[0] -= 1
            return ev(app(head, IntConst(inner.value)))
        if isinstance(head, If) and len(args) >= 3:
            c = ev(args[0])
            if c.is_bottom:
                return BOTTOM
            budget[0] -= 1
            return ev(app(If(), IntConst(c.value), *args[1:]))
        if isinstance(u, Case):
            s = ev(u.scrut)
            if s.is_bottom:
                return BOTTOM
            budget[0] -= 1
            return ev(Case(u.arity, IntConst(s.value), u.branches))
        return BOTTOM

    return ev(t)


def unstr(t: Term) -> Term:
    """Replace every str by \\f. if f 0 then 0 else bot; a pure PCF term."""
    if isinstance(t, Str):
        f = Var("f", arrow(NAT, NAT))
        return Lam(f, ite(App(f, IntConst(0)), IntConst(0), Omega(NAT)))
    out = t
    for i, c in enumerate(children(t)):
        out = replace_child(out, i, unstr(c))
    return out


def strictify(n: int) -> Term:
    """strictify_n : (nat^n -> nat) -> nat^n -> nat, built from str.

    strictify_n g x1..xn returns g x1..xn when that converges while
    g bot..bot diverges, and bot otherwise.
    """
    if n < 1:
        raise ValueError("strictify needs n >= 1")
    gty = arrow(*([NAT] * (n + 1)))
    g = Var("g", gty)
    xs = [Var(f"x{k}", NAT) for k in range(1, n + 1)]
    z = Var("z", NAT)
    guarded = app(g, *[ite(z, x, Omega(NAT)) for x in xs])
    probe = Lam(z, ite(guarded, IntConst(0), IntConst(0)))
    body = ite(App(Str(), probe), app(g, *xs), Omega(NAT))
    out: Term = body
    for v in reversed(xs):
        out = Lam(v, out)
    return Lam(g, out)


# ---------------------------------------------------------------------------
# fix unrolling helper


def unroll_fix(t: Term, depth: int) -> Term:
    """Replace each fix M by its depth-fold unrolling with an Omega seed."""
    if isinstance(t, Y):
        body = unroll_fix(t.body, depth)
        ty = typecheck(t, _mode_of(t))
        out: Term = Omega(ty)
        for _ in range(depth):
            out = App(body, out)
        return out
    out = t
    for i, c in enumerate(children(t)):
        out = replace_child(out, i, unroll_fix(c, depth))
    return out
