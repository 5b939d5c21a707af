"""Algorithmic typechecking over locally nameless terms.

Synthesis follows the syntax: variables and constants are looked up, an
application needs a syntactic Pi type for its function and compares the
domain with the argument's type using :func:`fam_equiv` at ``type-``, and
binders are opened with ``maxi`` of the free names in scope.

Signature and context validity is established once at the query boundary
(see :class:`Checker`); pass ``recheck_leaves=True`` to re-validate the
context at every variable and constant leaf instead.
"""

from __future__ import annotations

from contextlib import contextmanager

from .equivalence import Equal, OutOfFuel, fam_equiv
from .erasure import STYPE, erase_ctx, erase_sig
from .errors import CheckError, Fuel, FuelExhausted, LooseIndexError, as_fuel
from .syntax import (
    TYPE,
    AConst,
    Bound,
    Context,
    FamilyExpr,
    FApp,
    Free,
    Ident,
    KindExpr,
    Lam,
    OApp,
    OConst,
    ObjectExpr,
    PiF,
    PiK,
    Signature,
    TypeK,
    close_term,
    fi,
    fv,
    is_kind,
    locally_closed,
    maxi,
    open_term,
)


def _show(t) -> str:
    from .surface import print_term

    try:
        return print_term(t)
    except Exception:
        return repr(t)


class _Engine:
    """Synthesis against one fixed signature and one shared fuel budget."""

    def __init__(self, sig: Signature, fuel: Fuel, recheck_leaves: bool = False):
        self.sig = sig
        self.ssig = erase_sig(sig)
        self.fuel = fuel
        self.recheck_leaves = recheck_leaves
        self.path: list[str] = []

    @contextmanager
    def rule(self, name: str):
        self.path.append(name)
        try:
            yield
        finally:
            self.path.pop()

    def fail(self, code: str, message: str, subterm=None):
        raise CheckError(message, code=code, path=tuple(self.path), subterm=subterm)

    def same_type(self, gamma: Context, a: FamilyExpr, b: FamilyExpr, code: str, what):
        verdict = fam_equiv(self.ssig, erase_ctx(gamma), a, b, STYPE, self.fuel)
        if isinstance(verdict, OutOfFuel):
            raise FuelExhausted(
                verdict.reason.message if verdict.reason else "step budget exhausted",
                path=tuple(self.path) + (verdict.reason.path if verdict.reason else ()),
            )
        if not isinstance(verdict, Equal):
            self.fail(code, f"expected {_show(a)} but found {_show(b)}", what)

    # contexts

    def ctx(self, gamma: Context) -> None:
        with self.rule("ctx"):
            for depth in range(len(gamma) - 1, -1, -1):
                (x, a), tail = gamma.entries[depth], Context(gamma.entries[depth + 1:])
                if x in fv(tail):
                    self.fail("DuplicateName", f"variable {x} is declared twice", Free(x))
                if not locally_closed(a):
                    raise LooseIndexError(f"type of {x} has a loose index", subterm=a)
                if self.fam(tail, a) != TYPE:
                    self.fail("IllKinded", f"type of {x} is not a type", a)

    def leaf(self, gamma: Context) -> None:
        if self.recheck_leaves:
            self.ctx(gamma)

    # objects

    def obj(self, gamma: Context, m: ObjectExpr) -> FamilyExpr:
        match m:
            case Free(x):
                with self.rule("obj-var"):
                    self.leaf(gamma)
                    a = gamma.lookup(x)
                    if a is None:
                        self.fail("UnboundVariable", f"variable {x} is not in the context", m)
                    return a
            case OConst(c):
                with self.rule("obj-const"):
                    self.leaf(gamma)
                    a = self.sig.lookup(c)
                    if a is None or is_kind(a):
                        self.fail("UnboundConstant", f"no object constant {c} in the signature", m)
                    return a
            case OApp(m1, m2):
                with self.rule("obj-app"):
                    a = self.obj(gamma, m1)
                    if not isinstance(a, PiF):
                        self.fail("NotAFunction", f"{_show(m1)} has type {_show(a)}, not a Pi type", m1)
                    b = self.obj(gamma, m2)
                    self.same_type(gamma, a.domain, b, "DomainMismatch", m2)
                    return open_term(a.body, 0, m2)
            case Lam(a1, m2):
                with self.rule("obj-lam"):
                    if self.fam(gamma, a1) != TYPE:
                        self.fail("IllKinded", f"{_show(a1)} is not a type", a1)
                    x = maxi(fv(gamma, m2, a1))
                    a2 = self.obj(gamma.extend(x, a1), open_term(m2, 0, Free(x)))
                    return PiF(a1, close_term(a2, x, 0))
            case Bound(i):
                raise LooseIndexError(f"loose de Bruijn index {i}", subterm=m, path=tuple(self.path))
        raise TypeError(f"not an object: {m!r}")

    # families

    def fam(self, gamma: Context, a: FamilyExpr) -> KindExpr:
        match a:
            case AConst(c):
                with self.rule("fam-const"):
                    self.leaf(gamma)
                    k = self.sig.lookup(c)
                    if k is None or not is_kind(k):
                        self.fail("UnboundConstant", f"no family constant {c} in the signature", a)
                    return k
            case FApp(a1, m):
                with self.rule("fam-app"):
                    k = self.fam(gamma, a1)
                    if not isinstance(k, PiK):
                        self.fail("NotAFunction", f"{_show(a1)} has kind {_show(k)}, not a Pi kind", a1)
                    b = self.obj(gamma, m)
                    self.same_type(gamma, k.domain, b, "DomainMismatch", m)
                    return open_term(k.body, 0, m)
            case PiF(a1, a2):
                with self.rule("fam-pi"):
                    if self.fam(gamma, a1) != TYPE:
                        self.fail("IllKinded", f"{_show(a1)} is not a type", a1)
                    x = maxi(fv(gamma, a1, a2))
                    if self.fam(gamma.extend(x, a1), open_term(a2, 0, Free(x))) != TYPE:
                        self.fail("IllKinded", f"body of {_show(a)} is not a type", a2)
                    return TYPE
        raise TypeError(f"not a type family: {a!r}")

    # kinds

    def kind(self, gamma: Context, k: KindExpr) -> None:
        match k:
            case TypeK():
                with self.rule("kind-type"):
                    self.leaf(gamma)
                    return
            case PiK(a, body):
                with self.rule("kind-pi"):
                    if self.fam(gamma, a) != TYPE:
                        self.fail("IllKinded", f"{_show(a)} is not a type", a)
                    x = maxi(fv(gamma, a, body))
                    self.kind(gamma.extend(x, a), open_term(body, 0, Free(x)))
                    return
        raise TypeError(f"not a kind: {k!r}")


def _closed(*terms) -> None:
    for t in terms:
        if not locally_closed(t):
            raise LooseIndexError(f"term has a loose de Bruijn index: {t!r}", subterm=t)


def check_sig(sig: Signature, fuel: int | Fuel | None = None) -> None:
    """Validate ``sig`` declaration by declaration, oldest first.

    Each declaration is checked against the signature that precedes it.
    Raises :class:`CheckError` or :class:`FuelExhausted`.
    """
    budget = as_fuel(fuel)
    for depth in range(len(sig) - 1, -1, -1):
        c, decl = sig.entries[depth]
        prefix = Signature(sig.entries[depth + 1:])
        engine = _Engine(prefix, budget)
        try:
            with engine.rule(f"sig {c}"):
                if c in fi(prefix):
                    engine.fail("DuplicateIdent", f"identifier {c} is already declared", c)
                _closed(decl)
                if is_kind(decl):
                    engine.kind(Context(), decl)
                elif engine.fam(Context(), decl) != TYPE:
                    engine.fail("IllKinded", f"type of {c} is not a type", decl)
        except (CheckError, LooseIndexError, FuelExhausted) as exc:
            exc.diagnostic = _at_decl(exc.diagnostic, c)
            raise


def _at_decl(diagnostic, c: Ident):
    from dataclasses import replace

    return replace(diagnostic, decl=c)


class Checker:
    """A signature validated once, against which many queries run.

    Construction raises exactly as :func:`check_sig` does. Every query gets a
    fresh fuel budget of ``fuel`` steps unless an explicit :class:`Fuel` is
    passed to it.
    """

    def __init__(self, sig: Signature, fuel: int | Fuel | None = None, *, recheck_leaves: bool = False):
        self.sig = sig
        self.limit = fuel if isinstance(fuel, int) else None
        self.recheck_leaves = recheck_leaves
        check_sig(sig, fuel)

    def _engine(self, fuel) -> _Engine:
        if fuel is None and self.limit is not None:
            fuel = self.limit
        return _Engine(self.sig, as_fuel(fuel), self.recheck_leaves)

    def check_ctx(self, gamma: Context, fuel: int | Fuel | None = None) -> None:
        self._engine(fuel).ctx(gamma)

    def synth_obj(self, gamma: Context, m: ObjectExpr, fuel: int | Fuel | None = None) -> FamilyExpr:
        _closed(m)
        engine = self._engine(fuel)
        engine.ctx(gamma)
        return engine.obj(gamma, m)

    def synth_fam(self, gamma: Context, a: FamilyExpr, fuel: int | Fuel | None = None) -> KindExpr:
        _closed(a)
        engine = self._engine(fuel)
        engine.ctx(gamma)
        return engine.fam(gamma, a)

    def check_kind(self, gamma: Context, k: KindExpr, fuel: int | Fuel | None = None) -> None:
        _closed(k)
        engine = self._engine(fuel)
        engine.ctx(gamma)
        engine.kind(gamma, k)


def check_ctx(sig: Signature, gamma: Context, fuel: int | Fuel | None = None) -> None:
    budget = as_fuel(fuel)
    Checker(sig, budget).check_ctx(gamma, budget)


def synth_obj(sig: Signature, gamma: Context, m: ObjectExpr, fuel: int | Fuel | None = None) -> FamilyExpr:
    budget = as_fuel(fuel)
    return Checker(sig, budget).synth_obj(gamma, m, budget)


def synth_fam(sig: Signature, gamma: Context, a: FamilyExpr, fuel: int | Fuel | None = None) -> KindExpr:
    budget = as_fuel(fuel)
    return Checker(sig, budget).synth_fam(gamma, a, budget)


def check_kind(sig: Signature, gamma: Context, k: KindExpr, fuel: int | Fuel | None = None) -> None:
    budget = as_fuel(fuel)
    Checker(sig, budget).check_kind(gamma, k, budget)


__all__ = ["Checker", "check_sig", "check_ctx", "synth_obj", "synth_fam", "check_kind"]
