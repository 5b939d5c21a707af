"""Checker for explicit derivations of the declarative LF judgments.

A :class:`Derivation` names its rule, states its conclusion, lists its
premises and, for rules that open a binder, carries the fresh variable used
to open it. :func:`check_derivation` verifies every node is an instance of
its rule. Conclusions that involve substitution are recomputed with
``open_term``/``subst_free`` and compared structurally.

Binder rules demand that the witness be absent from the free names of the
context and of every term the rule relates, so opening with it is faithful.
There is no type-level extensionality rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .errors import CheckError, Diagnostic
from .syntax import (
    TYPE,
    AConst,
    Context,
    FamilyExpr,
    FApp,
    Free,
    Ident,
    KindExpr,
    Lam,
    Name,
    OApp,
    OConst,
    ObjectExpr,
    PiF,
    PiK,
    Signature,
    fi,
    fv,
    is_kind,
    locally_closed,
    open_term,
    subst_free,
)

# -- judgments ----------------------------------------------------------------


@dataclass(frozen=True)
class SigOk:
    sig: Signature


@dataclass(frozen=True)
class CtxOk:
    sig: Signature
    ctx: Context


@dataclass(frozen=True)
class ObjTy:
    sig: Signature
    ctx: Context
    obj: ObjectExpr
    fam: FamilyExpr


@dataclass(frozen=True)
class FamKi:
    sig: Signature
    ctx: Context
    fam: FamilyExpr
    kind: KindExpr


@dataclass(frozen=True)
class KindOk:
    sig: Signature
    ctx: Context
    kind: KindExpr


@dataclass(frozen=True)
class ObjEq:
    sig: Signature
    ctx: Context
    left: ObjectExpr
    right: ObjectExpr
    fam: FamilyExpr


@dataclass(frozen=True)
class FamEq:
    sig: Signature
    ctx: Context
    left: FamilyExpr
    right: FamilyExpr
    kind: KindExpr


@dataclass(frozen=True)
class KindEq:
    sig: Signature
    ctx: Context
    left: KindExpr
    right: KindExpr


Judgment = Union[SigOk, CtxOk, ObjTy, FamKi, KindOk, ObjEq, FamEq, KindEq]


@dataclass(frozen=True, eq=False)
class Derivation:
    """One inference step. Equality is identity: derivations are DAGs."""

    rule: str
    conclusion: Judgment
    premises: tuple[Derivation, ...] = ()
    fresh_witness: Name | None = None


# -- rule schemas ----------------------------------------------------------------


class _Reject(Exception):
    def __init__(self, slot: str, message: str):
        super().__init__(message)
        self.slot = slot


def _need(cond: bool, slot: str, message: str) -> None:
    if not cond:
        raise _Reject(slot, message)


def _form(j, cls, slot: str = "conclusion"):
    _need(isinstance(j, cls), slot, f"expected a {cls.__name__} judgment, found {type(j).__name__}")
    return j


def _arity(node: Derivation, n: int) -> tuple[Judgment, ...]:
    _need(len(node.premises) == n, "premises", f"rule {node.rule} takes {n} premises, found {len(node.premises)}")
    return tuple(p.conclusion for p in node.premises)


def _same(actual, expected, slot: str) -> None:
    _need(actual == expected, slot, f"{slot} does not match the rule schema")


def _fresh(node: Derivation, ctx: Context, *terms) -> Free:
    x = node.fresh_witness
    _need(x is not None, "fresh", f"rule {node.rule} needs a fresh witness")
    _need(x not in fv(ctx, *terms), "fresh", f"witness {x} is not fresh")
    return Free(x)


def _no_witness(node: Derivation) -> None:
    _need(node.fresh_witness is None, "fresh", f"rule {node.rule} takes no fresh witness")


def _opened(body, x: Free):
    return open_term(body, 0, x)


def _member_ctx(ctx: Context, x: Name, a) -> bool:
    return any(y == x and b == a for y, b in ctx.entries)


def _member_sig(sig: Signature, c: Ident, d) -> bool:
    return any(e == c and b == d for e, b in sig.entries)


# Each checker receives the node and raises _Reject on a schema violation.

def _sig_empty(node):
    j = _form(node.conclusion, SigOk)
    _arity(node, 0)
    _need(len(j.sig) == 0, "conclusion", "signature is not empty")


def _sig_decl(kind_decl: bool):
    def check(node):
        j = _form(node.conclusion, SigOk)
        _need(len(j.sig) > 0, "conclusion", "signature is empty")
        (c, d), tail = j.sig.entries[0], j.sig.tail()
        _need(is_kind(d) == kind_decl, "conclusion", "declaration has the wrong sort for this rule")
        p1, p2 = _arity(node, 2)
        _same(p1, SigOk(tail), "premise 1")
        if kind_decl:
            _same(p2, KindOk(tail, Context(), d), "premise 2")
        else:
            _same(p2, FamKi(tail, Context(), d, TYPE), "premise 2")
        _need(c not in fi(tail), "conclusion", f"identifier {c} is not fresh for the signature")

    return check


def _ctx_empty(node):
    j = _form(node.conclusion, CtxOk)
    _need(len(j.ctx) == 0, "conclusion", "context is not empty")
    (p1,) = _arity(node, 1)
    _same(p1, SigOk(j.sig), "premise 1")


def _ctx_cons(node):
    j = _form(node.conclusion, CtxOk)
    _need(len(j.ctx) > 0, "conclusion", "context is empty")
    (x, a), tail = j.ctx.entries[0], j.ctx.tail()
    p1, p2 = _arity(node, 2)
    _same(p1, CtxOk(j.sig, tail), "premise 1")
    _same(p2, FamKi(j.sig, tail, a, TYPE), "premise 2")
    _need(x not in fv(tail), "conclusion", f"variable {x} is not fresh for the context")


def _leaf_var(cls):
    def check(node):
        j = _form(node.conclusion, cls)
        (p1,) = _arity(node, 1)
        _same(p1, CtxOk(j.sig, j.ctx), "premise 1")
        if cls is ObjTy:
            m, a = j.obj, j.fam
        else:
            _need(j.left == j.right, "conclusion", "sides differ")
            m, a = j.left, j.fam
        _need(isinstance(m, Free), "conclusion", "subject is not a variable")
        _need(_member_ctx(j.ctx, m.name, a), "conclusion", f"({m.name}, A) is not in the context")

    return check


def _leaf_const(cls):
    def check(node):
        j = _form(node.conclusion, cls)
        (p1,) = _arity(node, 1)
        _same(p1, CtxOk(j.sig, j.ctx), "premise 1")
        if cls is ObjTy:
            m, a = j.obj, j.fam
        elif cls is FamKi:
            m, a = j.fam, j.kind
        elif cls is ObjEq:
            _need(j.left == j.right, "conclusion", "sides differ")
            m, a = j.left, j.fam
        else:
            _need(j.left == j.right, "conclusion", "sides differ")
            m, a = j.left, j.kind
        want = AConst if cls in (FamKi, FamEq) else OConst
        _need(isinstance(m, want), "conclusion", "subject is not a constant of the right level")
        _need(_member_sig(j.sig, m.ident, a), "conclusion", f"({m.ident}, _) is not in the signature")

    return check


def _ty_app(node):
    _no_witness(node)
    j = _form(node.conclusion, ObjTy)
    _need(isinstance(j.obj, OApp), "conclusion", "subject is not an application")
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, ObjTy, "premise 1")
    p2 = _form(p2, ObjTy, "premise 2")
    _need(isinstance(p1.fam, PiF), "premise 1", "function type is not a Pi type")
    _same(p1, ObjTy(j.sig, j.ctx, j.obj.fun, p1.fam), "premise 1")
    _same(p2, ObjTy(j.sig, j.ctx, j.obj.arg, p1.fam.domain), "premise 2")
    _same(j.fam, open_term(p1.fam.body, 0, j.obj.arg), "conclusion")


def _ty_lam(node):
    j = _form(node.conclusion, ObjTy)
    _need(isinstance(j.obj, Lam) and isinstance(j.fam, PiF), "conclusion", "expected lam x:A1. M2 : pi x:A1. A2")
    a1 = j.obj.domain
    _same(j.fam.domain, a1, "conclusion")
    x = _fresh(node, j.ctx, a1, j.obj.body, j.fam.body)
    p1, p2 = _arity(node, 2)
    _same(p1, FamKi(j.sig, j.ctx, a1, TYPE), "premise 1")
    _same(p2, ObjTy(j.sig, j.ctx.extend(x.name, a1), _opened(j.obj.body, x), _opened(j.fam.body, x)), "premise 2")


def _ty_conv(node):
    _no_witness(node)
    j = _form(node.conclusion, ObjTy)
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, ObjTy, "premise 1")
    _same(p1, ObjTy(j.sig, j.ctx, j.obj, p1.fam), "premise 1")
    _same(p2, FamEq(j.sig, j.ctx, p1.fam, j.fam, TYPE), "premise 2")


def _ki_app(node):
    _no_witness(node)
    j = _form(node.conclusion, FamKi)
    _need(isinstance(j.fam, FApp), "conclusion", "subject is not an application")
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, FamKi, "premise 1")
    _need(isinstance(p1.kind, PiK), "premise 1", "family kind is not a Pi kind")
    _same(p1, FamKi(j.sig, j.ctx, j.fam.fun, p1.kind), "premise 1")
    _same(p2, ObjTy(j.sig, j.ctx, j.fam.arg, p1.kind.domain), "premise 2")
    _same(j.kind, open_term(p1.kind.body, 0, j.fam.arg), "conclusion")


def _ki_pi(node):
    j = _form(node.conclusion, FamKi)
    _need(isinstance(j.fam, PiF) and j.kind == TYPE, "conclusion", "expected pi x:A1. A2 : type")
    a1, a2 = j.fam.domain, j.fam.body
    x = _fresh(node, j.ctx, a1, a2)
    p1, p2 = _arity(node, 2)
    _same(p1, FamKi(j.sig, j.ctx, a1, TYPE), "premise 1")
    _same(p2, FamKi(j.sig, j.ctx.extend(x.name, a1), _opened(a2, x), TYPE), "premise 2")


def _ki_conv(node):
    _no_witness(node)
    j = _form(node.conclusion, FamKi)
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, FamKi, "premise 1")
    _same(p1, FamKi(j.sig, j.ctx, j.fam, p1.kind), "premise 1")
    _same(p2, KindEq(j.sig, j.ctx, p1.kind, j.kind), "premise 2")


def _kind_type(node):
    _no_witness(node)
    j = _form(node.conclusion, KindOk)
    _need(j.kind == TYPE, "conclusion", "kind is not type")
    (p1,) = _arity(node, 1)
    _same(p1, CtxOk(j.sig, j.ctx), "premise 1")


def _kind_pi(node):
    j = _form(node.conclusion, KindOk)
    _need(isinstance(j.kind, PiK), "conclusion", "kind is not a Pi kind")
    a, k = j.kind.domain, j.kind.body
    x = _fresh(node, j.ctx, a, k)
    p1, p2 = _arity(node, 2)
    _same(p1, FamKi(j.sig, j.ctx, a, TYPE), "premise 1")
    _same(p2, KindOk(j.sig, j.ctx.extend(x.name, a), _opened(k, x)), "premise 2")


def _eq_app(node):
    _no_witness(node)
    j = _form(node.conclusion, ObjEq)
    _need(isinstance(j.left, OApp) and isinstance(j.right, OApp), "conclusion", "sides are not applications")
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, ObjEq, "premise 1")
    _need(isinstance(p1.fam, PiF), "premise 1", "function type is not a Pi type")
    _same(p1, ObjEq(j.sig, j.ctx, j.left.fun, j.right.fun, p1.fam), "premise 1")
    _same(p2, ObjEq(j.sig, j.ctx, j.left.arg, j.right.arg, p1.fam.domain), "premise 2")
    _same(j.fam, open_term(p1.fam.body, 0, j.left.arg), "conclusion")


def _eq_lam(node):
    j = _form(node.conclusion, ObjEq)
    _need(
        isinstance(j.left, Lam) and isinstance(j.right, Lam) and isinstance(j.fam, PiF),
        "conclusion",
        "expected lam = lam : pi",
    )
    a1, a2 = j.fam.domain, j.fam.body
    x = _fresh(node, j.ctx, j.left, j.right, j.fam)
    p1, p2, p3, p4 = _arity(node, 4)
    _same(p1, FamEq(j.sig, j.ctx, j.left.domain, a1, TYPE), "premise 1")
    _same(p2, FamEq(j.sig, j.ctx, j.right.domain, a1, TYPE), "premise 2")
    _same(p3, FamKi(j.sig, j.ctx, a1, TYPE), "premise 3")
    _same(
        p4,
        ObjEq(j.sig, j.ctx.extend(x.name, a1), _opened(j.left.body, x), _opened(j.right.body, x), _opened(a2, x)),
        "premise 4",
    )


def _eq_ext(node):
    j = _form(node.conclusion, ObjEq)
    _need(isinstance(j.fam, PiF), "conclusion", "type is not a Pi type")
    a1, a2 = j.fam.domain, j.fam.body
    x = _fresh(node, j.ctx, j.left, j.right, j.fam)
    p1, p2, p3, p4 = _arity(node, 4)
    _same(p1, ObjTy(j.sig, j.ctx, j.left, j.fam), "premise 1")
    _same(p2, ObjTy(j.sig, j.ctx, j.right, j.fam), "premise 2")
    _same(p3, FamKi(j.sig, j.ctx, a1, TYPE), "premise 3")
    _same(p4, ObjEq(j.sig, j.ctx.extend(x.name, a1), OApp(j.left, x), OApp(j.right, x), _opened(a2, x)), "premise 4")


def _eq_beta(node):
    j = _form(node.conclusion, ObjEq)
    _need(
        isinstance(j.left, OApp) and isinstance(j.left.fun, Lam),
        "conclusion",
        "left side is not a beta-redex",
    )
    a1, m2, m1 = j.left.fun.domain, j.left.fun.body, j.left.arg
    p1, p2, p3 = _arity(node, 3)
    p2 = _form(p2, ObjEq, "premise 2")
    p3 = _form(p3, ObjEq, "premise 3")
    n1 = p3.right
    x = _fresh(node, j.ctx, a1, m2, m1, n1)
    _same(p1, FamKi(j.sig, j.ctx, a1, TYPE), "premise 1")
    _same(p2, ObjEq(j.sig, j.ctx.extend(x.name, a1), _opened(m2, x), p2.right, p2.fam), "premise 2")
    _same(p3, ObjEq(j.sig, j.ctx, m1, n1, a1), "premise 3")
    _need(locally_closed(p2.right) and locally_closed(p2.fam), "premise 2", "premise has a loose index")
    _same(j.right, subst_free(p2.right, x.name, n1), "conclusion")
    _same(j.fam, subst_free(p2.fam, x.name, m1), "conclusion")


def _sym(cls, *, typed: str | None):
    def check(node):
        _no_witness(node)
        j = _form(node.conclusion, cls)
        (p1,) = _arity(node, 1)
        args = (j.sig, j.ctx, j.right, j.left) + ((getattr(j, typed),) if typed else ())
        _same(p1, cls(*args), "premise 1")

    return check


def _trans(cls, *, typed: str | None):
    def check(node):
        _no_witness(node)
        j = _form(node.conclusion, cls)
        p1, p2 = _arity(node, 2)
        p1 = _form(p1, cls, "premise 1")
        extra = (getattr(j, typed),) if typed else ()
        _same(p1, cls(j.sig, j.ctx, j.left, p1.right, *extra), "premise 1")
        _same(p2, cls(j.sig, j.ctx, p1.right, j.right, *extra), "premise 2")

    return check


def _eq_conv(node):
    _no_witness(node)
    j = _form(node.conclusion, ObjEq)
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, ObjEq, "premise 1")
    _same(p1, ObjEq(j.sig, j.ctx, j.left, j.right, p1.fam), "premise 1")
    _same(p2, FamEq(j.sig, j.ctx, p1.fam, j.fam, TYPE), "premise 2")


def _feq_app(node):
    _no_witness(node)
    j = _form(node.conclusion, FamEq)
    _need(isinstance(j.left, FApp) and isinstance(j.right, FApp), "conclusion", "sides are not applications")
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, FamEq, "premise 1")
    _need(isinstance(p1.kind, PiK), "premise 1", "family kind is not a Pi kind")
    _same(p1, FamEq(j.sig, j.ctx, j.left.fun, j.right.fun, p1.kind), "premise 1")
    _same(p2, ObjEq(j.sig, j.ctx, j.left.arg, j.right.arg, p1.kind.domain), "premise 2")
    _same(j.kind, open_term(p1.kind.body, 0, j.left.arg), "conclusion")


def _feq_pi(node):
    j = _form(node.conclusion, FamEq)
    _need(
        isinstance(j.left, PiF) and isinstance(j.right, PiF) and j.kind == TYPE,
        "conclusion",
        "expected pi = pi : type",
    )
    x = _fresh(node, j.ctx, j.left, j.right)
    p1, p2, p3 = _arity(node, 3)
    a1 = j.left.domain
    _same(p1, FamEq(j.sig, j.ctx, a1, j.right.domain, TYPE), "premise 1")
    _same(p2, FamKi(j.sig, j.ctx, a1, TYPE), "premise 2")
    _same(
        p3,
        FamEq(j.sig, j.ctx.extend(x.name, a1), _opened(j.left.body, x), _opened(j.right.body, x), TYPE),
        "premise 3",
    )


def _feq_conv(node):
    _no_witness(node)
    j = _form(node.conclusion, FamEq)
    p1, p2 = _arity(node, 2)
    p1 = _form(p1, FamEq, "premise 1")
    _same(p1, FamEq(j.sig, j.ctx, j.left, j.right, p1.kind), "premise 1")
    _same(p2, KindEq(j.sig, j.ctx, p1.kind, j.kind), "premise 2")


def _keq_type(node):
    _no_witness(node)
    j = _form(node.conclusion, KindEq)
    _need(j.left == TYPE and j.right == TYPE, "conclusion", "expected type = type")
    (p1,) = _arity(node, 1)
    _same(p1, CtxOk(j.sig, j.ctx), "premise 1")


def _keq_pi(node):
    j = _form(node.conclusion, KindEq)
    _need(isinstance(j.left, PiK) and isinstance(j.right, PiK), "conclusion", "expected pi = pi : kind")
    x = _fresh(node, j.ctx, j.left, j.right)
    p1, p2, p3 = _arity(node, 3)
    a = j.left.domain
    _same(p1, FamEq(j.sig, j.ctx, a, j.right.domain, TYPE), "premise 1")
    _same(p2, FamKi(j.sig, j.ctx, a, TYPE), "premise 2")
    _same(p3, KindEq(j.sig, j.ctx.extend(x.name, a), _opened(j.left.body, x), _opened(j.right.body, x)), "premise 3")


def _plain(check):
    def wrapped(node):
        _no_witness(node)
        check(node)

    return wrapped


RULES: dict[str, Callable[[Derivation], None]] = {
    "sig_empty": _plain(_sig_empty),
    "sig_fam": _plain(_sig_decl(kind_decl=True)),
    "sig_obj": _plain(_sig_decl(kind_decl=False)),
    "ctx_empty": _plain(_ctx_empty),
    "ctx_cons": _plain(_ctx_cons),
    "ty_var": _plain(_leaf_var(ObjTy)),
    "ty_const": _plain(_leaf_const(ObjTy)),
    "ty_app": _ty_app,
    "ty_lam": _ty_lam,
    "ty_conv": _ty_conv,
    "ki_const": _plain(_leaf_const(FamKi)),
    "ki_app": _ki_app,
    "ki_pi": _ki_pi,
    "ki_conv": _ki_conv,
    "kind_type": _kind_type,
    "kind_pi": _kind_pi,
    "eq_var": _plain(_leaf_var(ObjEq)),
    "eq_const": _plain(_leaf_const(ObjEq)),
    "eq_app": _eq_app,
    "eq_lam": _eq_lam,
    "eq_ext": _eq_ext,
    "eq_beta": _eq_beta,
    "eq_sym": _sym(ObjEq, typed="fam"),
    "eq_trans": _trans(ObjEq, typed="fam"),
    "eq_conv": _eq_conv,
    "feq_const": _plain(_leaf_const(FamEq)),
    "feq_app": _feq_app,
    "feq_pi": _feq_pi,
    "feq_sym": _sym(FamEq, typed="kind"),
    "feq_trans": _trans(FamEq, typed="kind"),
    "feq_conv": _feq_conv,
    "keq_type": _keq_type,
    "keq_pi": _keq_pi,
    "keq_sym": _sym(KindEq, typed=None),
    "keq_trans": _trans(KindEq, typed=None),
}

# Rules that open a binder and therefore carry a fresh witness.
BINDER_RULES = frozenset({"ty_lam", "ki_pi", "kind_pi", "eq_lam", "eq_ext", "eq_beta", "feq_pi", "keq_pi"})


def _terms_closed(j) -> bool:
    terms = [v for v in vars(j).values() if not isinstance(v, (Signature, Context))]
    terms += [d for _, d in j.sig.entries]
    if hasattr(j, "ctx"):
        terms += [a for _, a in j.ctx.entries]
    return all(locally_closed(t) for t in terms)


def check_derivation(root: Derivation, goal: Judgment | None = None) -> None:
    """Accept ``root`` or raise :class:`CheckError` naming the failing node.

    The diagnostic path lists rule names from the root down to the failing
    node; its last element names the violated schema slot. When ``goal`` is
    given the root must conclude exactly that judgment.
    """
    if goal is not None and root.conclusion != goal:
        raise CheckError("derivation does not conclude the goal", code="GoalMismatch", path=(root.rule, "conclusion"))
    verified: set[int] = set()
    closed_ok: dict[int, bool] = {}
    # explicit stack of (node, path, expanded) so deep derivations do not recurse
    stack: list[tuple[Derivation, tuple[str, ...], bool]] = [(root, (), False)]
    while stack:
        node, path, expanded = stack.pop()
        if id(node) in verified:
            continue
        here = path + (node.rule,)
        if not expanded:
            stack.append((node, path, True))
            for i, p in reversed(list(enumerate(node.premises))):
                stack.append((p, here + (f"premise {i + 1}",), False))
            continue
        check = RULES.get(node.rule)
        if check is None:
            raise CheckError(f"unknown rule {node.rule!r}", code="UnknownRule", path=here)
        j = node.conclusion
        key = id(j)
        if key not in closed_ok:
            closed_ok[key] = _terms_closed(j)
        if not closed_ok[key]:
            raise CheckError("judgment has a loose de Bruijn index", code="LooseIndex", path=here)
        try:
            check(node)
        except _Reject as r:
            raise CheckError(
                f"{node.rule}: {r}", code="RuleMismatch", path=here + (r.slot,), subterm=j
            ) from None
        verified.add(id(node))


def derivation_ok(root: Derivation, goal: Judgment | None = None) -> Diagnostic | None:
    try:
        check_derivation(root, goal)
    except CheckError as exc:
        return exc.diagnostic
    return None


__all__ = [
    "SigOk", "CtxOk", "ObjTy", "FamKi", "KindOk", "ObjEq", "FamEq", "KindEq", "Judgment",
    "Derivation", "RULES", "BINDER_RULES", "check_derivation", "derivation_ok",
]
