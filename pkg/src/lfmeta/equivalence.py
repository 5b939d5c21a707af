"""Type-directed algorithmic equivalence for objects, families and kinds.

The algorithmic judgment (``obj_equiv``/``fam_equiv``/``kind_equiv``) is
kind- or type-directed and uses extensionality at arrow types; the structural
judgment (``obj_struct``/``fam_struct``) is syntax-directed and synthesizes a
simple type or kind. Fresh variables for extensionality and for opening
binders are always ``maxi`` of the free names in scope.

Every public entry point runs one query against one shared step budget.
Running out of fuel is reported as :class:`OutOfFuel`, never as
:class:`NotEqual`.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Union

from .erasure import (
    STYPE,
    SArrow,
    SBase,
    SimpleContext,
    SimpleKind,
    SimpleSignature,
    SimpleType,
    SKArrow,
    SType,
    erase_family,
    sctx_valid,
    ssig_valid,
)
from .errors import Diagnostic, Fuel, FuelExhausted, LooseIndexError, as_fuel
from .reduction import whnf
from .syntax import (
    AConst,
    Bound,
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
    TypeK,
    fv,
    locally_closed,
    maxi,
    open_term,
)

# -- outcomes ---------------------------------------------------------------


@dataclass(frozen=True)
class Equal:
    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NotEqual:
    reason: Diagnostic

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class OutOfFuel:
    reason: Diagnostic | None = None

    def __bool__(self) -> bool:
        return False


EquivOutcome = Union[Equal, NotEqual, OutOfFuel]

# -- quasicanonical forms ---------------------------------------------------


@dataclass(frozen=True)
class QVar:
    name: Name


@dataclass(frozen=True)
class QConst:
    ident: Ident


@dataclass(frozen=True)
class QBound:
    index: int


@dataclass(frozen=True)
class QApp:
    head: QAtom
    arg: QCan


@dataclass(frozen=True)
class QAt:
    atom: QAtom


@dataclass(frozen=True)
class QLam:
    body: QCan  # binds index 0


QAtom = Union[QVar, QConst, QBound, QApp]
QCan = Union[QAt, QLam]


def close_q(q, x: Name, n: int = 0):
    """Abstract ``QVar(x)`` into index ``n`` in a quasicanonical/quasiatomic form."""
    match q:
        case QVar(y):
            return QBound(n) if y == x else q
        case QConst() | QBound():
            return q
        case QApp(h, a):
            return QApp(close_q(h, x, n), close_q(a, x, n))
        case QAt(a):
            return QAt(close_q(a, x, n))
        case QLam(b):
            return QLam(close_q(b, x, n + 1))
    raise TypeError(f"not a quasicanonical form: {q!r}")


def open_q(q, n: int, v):
    """Replace index ``n`` by the quasiatomic form ``v``."""
    match q:
        case QBound(i):
            return v if i == n else q
        case QVar() | QConst():
            return q
        case QApp(h, a):
            return QApp(open_q(h, n, v), open_q(a, n, v))
        case QAt(a):
            return QAt(open_q(a, n, v))
        case QLam(b):
            return QLam(open_q(b, n + 1, v))
    raise TypeError(f"not a quasicanonical form: {q!r}")


def q_fv(q) -> list[Name]:
    out: set[Name] = set()
    stack = [q]
    while stack:
        u = stack.pop()
        match u:
            case QVar(y):
                out.add(y)
            case QApp(h, a):
                stack += [h, a]
            case QAt(a) | QLam(a):
                stack.append(a)
    return sorted(out)


class NotQuasicanonical(ValueError):
    pass


def erase_labels(m: ObjectExpr) -> QCan:
    """Drop type labels: ``lam x:A. M`` becomes ``\\x. M`` and atoms map through."""
    if isinstance(m, Lam):
        return QLam(erase_labels(m.body))
    return QAt(_erase_atom(m))


def _erase_atom(m: ObjectExpr) -> QAtom:
    match m:
        case Free(x):
            return QVar(x)
        case OConst(c):
            return QConst(c)
        case Bound(i):
            return QBound(i)
        case OApp(f, a):
            return QApp(_erase_atom(f), erase_labels(a))
        case Lam():
            raise NotQuasicanonical("a beta-redex has no label-erased form")
    raise TypeError(f"not an object: {m!r}")


# -- the algorithm ----------------------------------------------------------


class _Mismatch(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _shown(t) -> str:
    from .surface import print_term  # deferred: surface depends on this module

    try:
        return print_term(t)
    except Exception:
        return repr(t)


class _Algorithm:
    def __init__(self, sig: SimpleSignature, fuel: Fuel):
        self.sig = sig
        self.fuel = fuel
        self.path: list[str] = []

    @contextmanager
    def rule(self, name: str):
        self.path.append(name)
        try:
            yield
        finally:
            self.path.pop()

    def fail(self, code: str, message: str, left=None, right=None):
        raise _Mismatch(Diagnostic(code, message, tuple(self.path), (left, right)))

    def whnf(self, m: ObjectExpr) -> ObjectExpr:
        try:
            return whnf(m, self.fuel)[0]
        except FuelExhausted as exc:
            raise FuelExhausted(exc.diagnostic.message, term=exc.term, path=tuple(self.path)) from None

    # objects

    def obj(self, delta: SimpleContext, m, n, tau: SimpleType) -> None:
        if isinstance(tau, SArrow):
            with self.rule("obj-ext"):
                x = maxi(fv(delta, m, n))
                self.obj(delta.extend(x, tau.dom), OApp(m, Free(x)), OApp(n, Free(x)), tau.cod)
            return
        with self.rule("obj-base"):
            m, n = self.whnf(m), self.whnf(n)
            got = self.obj_struct(delta, m, n)
            if got != tau:
                self.fail("TypeMismatch", f"atoms have simple type {got}, expected {tau}", m, n)

    def obj_struct(self, delta: SimpleContext, m, n) -> SimpleType:
        match (m, n):
            case (Free(x), Free(y)) if x == y:
                with self.rule("struct-var"):
                    tau = delta.lookup(x)
                    if tau is None:
                        self.fail("UnboundVariable", f"variable {x} not in the simple context", m, n)
                    return tau
            case (OConst(c), OConst(d)) if c == d:
                with self.rule("struct-const"):
                    tau = self.sig.lookup_type(c)
                    if tau is None:
                        self.fail("UnboundConstant", f"no object constant {c} in the signature", m, n)
                    return tau
            case (OApp(m1, m2), OApp(n1, n2)):
                with self.rule("struct-app"):
                    tau = self.obj_struct(delta, m1, n1)
                    if not isinstance(tau, SArrow):
                        self.fail("NotAFunction", f"head has simple type {tau}", m1, n1)
                    self.obj(delta, m2, n2, tau.dom)
                    return tau.cod
        self.fail("HeadMismatch", f"{_shown(m)} and {_shown(n)} differ", m, n)

    # families

    def fam(self, delta: SimpleContext, a, b, kappa: SimpleKind) -> None:
        if isinstance(kappa, SKArrow):
            with self.rule("fam-ext"):
                x = maxi(fv(delta, a, b))
                self.fam(delta.extend(x, kappa.dom), FApp(a, Free(x)), FApp(b, Free(x)), kappa.cod)
            return
        if isinstance(a, PiF) and isinstance(b, PiF):
            with self.rule("fam-pi"):
                self.fam(delta, a.domain, b.domain, STYPE)
                x = maxi(fv(delta, a, b))
                self.fam(
                    delta.extend(x, erase_family(a.domain)),
                    open_term(a.body, 0, Free(x)),
                    open_term(b.body, 0, Free(x)),
                    STYPE,
                )
            return
        with self.rule("fam-base"):
            got = self.fam_struct(delta, a, b)
            if got != STYPE:
                self.fail("KindMismatch", f"families have simple kind {got}, expected {STYPE}", a, b)

    def fam_struct(self, delta: SimpleContext, a, b) -> SimpleKind:
        match (a, b):
            case (AConst(c), AConst(d)) if c == d:
                with self.rule("struct-fconst"):
                    kappa = self.sig.lookup_kind(c)
                    if kappa is None:
                        self.fail("UnboundConstant", f"no family constant {c} in the signature", a, b)
                    return kappa
            case (FApp(a1, m), FApp(b1, n)):
                with self.rule("struct-fapp"):
                    kappa = self.fam_struct(delta, a1, b1)
                    if not isinstance(kappa, SKArrow):
                        self.fail("NotAFunction", f"family head has simple kind {kappa}", a1, b1)
                    self.obj(delta, m, n, kappa.dom)
                    return kappa.cod
        self.fail("HeadMismatch", f"{_shown(a)} and {_shown(b)} differ", a, b)

    def fam_weak(self, delta: SimpleContext, a, b) -> SimpleKind:
        match (a, b):
            case (AConst(c), AConst(d)) if c == d:
                with self.rule("weak-const"):
                    kappa = self.sig.lookup_kind(c)
                    if kappa is None:
                        self.fail("UnboundConstant", f"no family constant {c} in the signature", a, b)
                    return kappa
            case (FApp(a1, m), FApp(b1, n)):
                with self.rule("weak-app"):
                    kappa = self.fam_weak(delta, a1, b1)
                    if not isinstance(kappa, SKArrow):
                        self.fail("NotAFunction", f"family head has simple kind {kappa}", a1, b1)
                    self.obj(delta, m, n, kappa.dom)
                    return kappa.cod
            case (PiF(a1, a2), PiF(b1, b2)):
                with self.rule("weak-pi"):
                    if self.fam_weak(delta, a1, b1) != STYPE:
                        self.fail("KindMismatch", "Pi domains are not types", a1, b1)
                    x = maxi(fv(delta, a, b))
                    inner = delta.extend(x, erase_family(a1))
                    if self.fam_weak(inner, open_term(a2, 0, Free(x)), open_term(b2, 0, Free(x))) != STYPE:
                        self.fail("KindMismatch", "Pi bodies are not types", a2, b2)
                    return STYPE
        self.fail("HeadMismatch", f"{_shown(a)} and {_shown(b)} differ", a, b)

    # kinds

    def kind(self, delta: SimpleContext, k, l) -> None:
        match (k, l):
            case (TypeK(), TypeK()):
                return
            case (PiK(a, k2), PiK(b, l2)):
                with self.rule("kind-pi"):
                    self.fam(delta, a, b, STYPE)
                    x = maxi(fv(delta, k, l))
                    self.kind(
                        delta.extend(x, erase_family(a)),
                        open_term(k2, 0, Free(x)),
                        open_term(l2, 0, Free(x)),
                    )
                    return
        self.fail("HeadMismatch", f"{_shown(k)} and {_shown(l)} differ", k, l)

    # instrumented object judgments; mirror obj/obj_struct rule for rule

    def obj_q(self, delta: SimpleContext, m, n, tau: SimpleType) -> QCan:
        if isinstance(tau, SArrow):
            with self.rule("obj-ext"):
                x = maxi(fv(delta, m, n))
                body = self.obj_q(delta.extend(x, tau.dom), OApp(m, Free(x)), OApp(n, Free(x)), tau.cod)
                return QLam(close_q(body, x))
        with self.rule("obj-base"):
            m, n = self.whnf(m), self.whnf(n)
            got, atom = self.struct_q(delta, m, n)
            if got != tau:
                self.fail("TypeMismatch", f"atoms have simple type {got}, expected {tau}", m, n)
            return QAt(atom)

    def struct_q(self, delta: SimpleContext, m, n) -> tuple[SimpleType, QAtom]:
        match (m, n):
            case (Free(x), Free(y)) if x == y and delta.lookup(x) is not None:
                return delta.lookup(x), QVar(x)
            case (OConst(c), OConst(d)) if c == d and self.sig.lookup_type(c) is not None:
                return self.sig.lookup_type(c), QConst(c)
            case (OApp(m1, m2), OApp(n1, n2)):
                with self.rule("struct-app"):
                    tau, head = self.struct_q(delta, m1, n1)
                    if not isinstance(tau, SArrow):
                        self.fail("NotAFunction", f"head has simple type {tau}", m1, n1)
                    arg = self.obj_q(delta, m2, n2, tau.dom)
                    return tau.cod, QApp(head, arg)
        self.fail("HeadMismatch", f"{_shown(m)} and {_shown(n)} differ", m, n)


# -- public entry points ----------------------------------------------------


def _boundary(sig: SimpleSignature, delta: SimpleContext, *terms) -> Diagnostic | None:
    for t in terms:
        if not locally_closed(t):
            raise LooseIndexError(f"term has a loose de Bruijn index: {t!r}", subterm=t)
    if not ssig_valid(sig):
        return Diagnostic("InvalidSignature", "simple signature repeats an identifier")
    if not sctx_valid(delta):
        return Diagnostic("InvalidContext", "simple context repeats a variable")
    return None


def _run(sig, delta, terms, fuel, thunk) -> EquivOutcome:
    bad = _boundary(sig, delta, *terms)
    if bad is not None:
        return NotEqual(bad)
    algo = _Algorithm(sig, as_fuel(fuel))
    try:
        thunk(algo)
    except _Mismatch as exc:
        return NotEqual(exc.diagnostic)
    except FuelExhausted as exc:
        return OutOfFuel(exc.diagnostic)
    return Equal()


def obj_equiv(sig: SimpleSignature, delta: SimpleContext, m: ObjectExpr, n: ObjectExpr,
              tau: SimpleType, fuel: int | Fuel | None = None) -> EquivOutcome:
    """Decide ``delta |- m <=> n : tau``."""
    return _run(sig, delta, (m, n), fuel, lambda algo: algo.obj(delta, m, n, tau))


def fam_equiv(sig: SimpleSignature, delta: SimpleContext, a: FamilyExpr, b: FamilyExpr,
              kappa: SimpleKind, fuel: int | Fuel | None = None) -> EquivOutcome:
    """Decide ``delta |- a <=> b : kappa``."""
    return _run(sig, delta, (a, b), fuel, lambda algo: algo.fam(delta, a, b, kappa))


def fam_equiv_weak(sig: SimpleSignature, delta: SimpleContext, a: FamilyExpr, b: FamilyExpr,
                   kappa: SimpleKind, fuel: int | Fuel | None = None) -> EquivOutcome:
    """Decide the syntax-directed weak judgment (no extensionality rule)."""

    def go(algo):
        got = algo.fam_weak(delta, a, b)
        if got != kappa:
            algo.fail("KindMismatch", f"families have simple kind {got}, expected {kappa}", a, b)

    return _run(sig, delta, (a, b), fuel, go)


def kind_equiv(sig: SimpleSignature, delta: SimpleContext, k: KindExpr, l: KindExpr,
               fuel: int | Fuel | None = None) -> EquivOutcome:
    """Decide ``delta |- k <=> l : kind-``."""
    return _run(sig, delta, (k, l), fuel, lambda algo: algo.kind(delta, k, l))


def _struct(sig, delta, terms, fuel, thunk):
    if _boundary(sig, delta, *terms) is not None:
        return None
    algo = _Algorithm(sig, as_fuel(fuel))
    try:
        return thunk(algo)
    except _Mismatch:
        return None


def obj_struct(sig: SimpleSignature, delta: SimpleContext, m: ObjectExpr, n: ObjectExpr,
               fuel: int | Fuel | None = None) -> SimpleType | None:
    """The simple type synthesized by ``delta |- m <-> n``, or None.

    Raises :class:`FuelExhausted` when the budget runs out.
    """
    return _struct(sig, delta, (m, n), fuel, lambda algo: algo.obj_struct(delta, m, n))


def fam_struct(sig: SimpleSignature, delta: SimpleContext, a: FamilyExpr, b: FamilyExpr,
               fuel: int | Fuel | None = None) -> SimpleKind | None:
    return _struct(sig, delta, (a, b), fuel, lambda algo: algo.fam_struct(delta, a, b))


def obj_equiv_q(sig: SimpleSignature, delta: SimpleContext, m: ObjectExpr, n: ObjectExpr,
                tau: SimpleType, fuel: int | Fuel | None = None) -> QCan | None:
    """The quasicanonical witness of ``delta |- m <=> n : tau``, or None."""
    return _struct(sig, delta, (m, n), fuel, lambda algo: algo.obj_q(delta, m, n, tau))


def obj_struct_q(sig: SimpleSignature, delta: SimpleContext, m: ObjectExpr, n: ObjectExpr,
                 fuel: int | Fuel | None = None) -> tuple[SimpleType, QAtom] | None:
    return _struct(sig, delta, (m, n), fuel, lambda algo: algo.struct_q(delta, m, n))


__all__ = [
    "Equal", "NotEqual", "OutOfFuel", "EquivOutcome",
    "QVar", "QConst", "QBound", "QApp", "QAt", "QLam", "QAtom", "QCan",
    "close_q", "open_q", "q_fv", "erase_labels", "NotQuasicanonical",
    "obj_equiv", "obj_struct", "fam_equiv", "fam_struct", "fam_equiv_weak", "kind_equiv",
    "obj_equiv_q", "obj_struct_q", "SType", "SBase",
]
