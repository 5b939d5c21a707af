"""First-order logic syntax, its LF encoding over a fixed signature, and back.

Terms are variables and a single binary function symbol ``f``; formulas are
equations, conjunctions and universal quantification. Encodings are
quasicanonical forms over :data:`SIGMA_FO`; :func:`elaborate` reinserts the
type labels to get a typed LF object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .equivalence import (
    Equal,
    QApp,
    QAt,
    QBound,
    QConst,
    QLam,
    QVar,
    close_q,
    fam_equiv,
    open_q,
    q_fv,
)
from .erasure import STYPE, erase_ctx, erase_sig
from .errors import LFError, ParseError
from .syntax import (
    Context,
    FamilyExpr,
    Free,
    Ident,
    Lam,
    Name,
    OApp,
    OConst,
    ObjectExpr,
    PiF,
    Signature,
    close_term,
    fv,
    maxi,
    open_term,
)
from .surface import parse_name, parse_signature


class FolError(LFError):
    code = "NotInImage"


# -- syntax -------------------------------------------------------------------


@dataclass(frozen=True)
class FVar:
    name: Name


@dataclass(frozen=True)
class FApp2:
    left: FolTerm
    right: FolTerm


@dataclass(frozen=True)
class FEq:
    left: FolTerm
    right: FolTerm


@dataclass(frozen=True)
class FAnd:
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class FForall:
    bound: Name
    body: FolFormula


FolTerm = Union[FVar, FApp2]
FolFormula = Union[FEq, FAnd, FForall]

# -- the signature --------------------------------------------------------------

SIGMA_FO_SOURCE = """\
% first-order terms and formulas with one binary function symbol
i : type.
o : type.
c_f : i -> i -> i.
c_eq : i -> i -> o.
c_and : o -> o -> o.
c_all : (i -> o) -> o.
"""

SIGMA_FO: Signature = parse_signature(SIGMA_FO_SOURCE)[0]

IOTA, OMICRON = Ident("i"), Ident("o")
C_F, C_EQ, C_AND, C_ALL = Ident("c_f"), Ident("c_eq"), Ident("c_and"), Ident("c_all")


def _app2(c: Ident, a, b) -> QAt:
    return QAt(QApp(QApp(QConst(c), a), b))


# -- encoding -------------------------------------------------------------------


def encode_term(names: Iterable[Name], t: FolTerm) -> QAt:
    names = list(names)
    match t:
        case FVar(x):
            if x not in names:
                raise FolError(f"variable {x} is not in scope", code="UnboundFolVariable", subterm=t)
            return QAt(QVar(x))
        case FApp2(a, b):
            return _app2(C_F, encode_term(names, a), encode_term(names, b))
    raise TypeError(f"not a first-order term: {t!r}")


def encode_formula(names: Iterable[Name], phi: FolFormula):
    names = list(names)
    match phi:
        case FEq(a, b):
            return _app2(C_EQ, encode_term(names, a), encode_term(names, b))
        case FAnd(a, b):
            return _app2(C_AND, encode_formula(names, a), encode_formula(names, b))
        case FForall(x, body):
            inner = encode_formula([x] + names, body)
            return QAt(QApp(QConst(C_ALL), QLam(close_q(inner, x))))
    raise TypeError(f"not a first-order formula: {phi!r}")


# -- decoding -------------------------------------------------------------------


def _spine(q) -> tuple[object, list]:
    if not isinstance(q, QAt):
        raise FolError("expected an atomic form", subterm=q)
    args = []
    a = q.atom
    while isinstance(a, QApp):
        args.append(a.arg)
        a = a.head
    return a, args[::-1]


def decode_term(names: Iterable[Name], q) -> FolTerm:
    names = list(names)
    head, args = _spine(q)
    match head, args:
        case QVar(x), []:
            if x not in names:
                raise FolError(f"variable {x} is not in scope", subterm=q)
            return FVar(x)
        case QConst(c), [a, b] if c == C_F:
            return FApp2(decode_term(names, a), decode_term(names, b))
    raise FolError("not the encoding of a first-order term", subterm=q)


def decode_formula(names: Iterable[Name], q) -> FolFormula:
    """Inverse of :func:`encode_formula`; bound names are chosen with ``maxi``."""
    names = list(names)
    head, args = _spine(q)
    match head, args:
        case QConst(c), [a, b] if c == C_EQ:
            return FEq(decode_term(names, a), decode_term(names, b))
        case QConst(c), [a, b] if c == C_AND:
            return FAnd(decode_formula(names, a), decode_formula(names, b))
        case QConst(c), [QLam(body)] if c == C_ALL:
            x = maxi(names + q_fv(body))
            return FForall(x, decode_formula([x] + names, open_q(body, 0, QVar(x))))
    raise FolError("not the encoding of a first-order formula", subterm=q)


def alpha_equal(phi: FolFormula, psi: FolFormula) -> bool:
    """Equality up to renaming of quantified variables."""

    def go(a, b, env_a: list[Name], env_b: list[Name]) -> bool:
        match a, b:
            case FVar(x), FVar(y):
                ia = env_a.index(x) if x in env_a else None
                ib = env_b.index(y) if y in env_b else None
                return ia == ib and (ia is not None or x == y)
            case (FApp2(a1, a2), FApp2(b1, b2)) | (FEq(a1, a2), FEq(b1, b2)) | (FAnd(a1, a2), FAnd(b1, b2)):
                return go(a1, b1, env_a, env_b) and go(a2, b2, env_a, env_b)
            case FForall(x, a1), FForall(y, b1):
                return go(a1, b1, [x] + env_a, [y] + env_b)
        return False

    return go(phi, psi, [], [])


def free_vars(phi) -> list[Name]:
    match phi:
        case FVar(x):
            return [x]
        case FApp2(a, b) | FEq(a, b) | FAnd(a, b):
            return sorted(set(free_vars(a)) | set(free_vars(b)))
        case FForall(x, body):
            return [y for y in free_vars(body) if y != x]
    raise TypeError(f"not first-order syntax: {phi!r}")


# -- elaboration ----------------------------------------------------------------


def elaborate(q, expected: FamilyExpr, sig: Signature = SIGMA_FO, ctx: Context = Context()) -> ObjectExpr:
    """Insert type labels so the result erases to ``q`` and has type ``expected``.

    Raises :class:`FolError` with code ``CannotElaborate`` otherwise.
    """
    ssig = erase_sig(sig)

    def fail(message: str, subterm=None):
        raise FolError(message, code="CannotElaborate", subterm=subterm)

    def check(gamma: Context, q, a: FamilyExpr) -> ObjectExpr:
        if isinstance(q, QLam):
            if not isinstance(a, PiF):
                fail("a lambda cannot have a non-Pi type", q)
            x = maxi(fv(gamma, a) + q_fv(q.body))
            body = check(gamma.extend(x, a.domain), open_q(q.body, 0, QVar(x)), open_term(a.body, 0, Free(x)))
            return Lam(a.domain, close_term(body, x, 0))
        m, b = synth(gamma, q.atom)
        if not isinstance(fam_equiv(ssig, erase_ctx(gamma), b, a, STYPE), Equal):
            fail("atom does not have the expected type", q)
        return m

    def synth(gamma: Context, atom) -> tuple[ObjectExpr, FamilyExpr]:
        match atom:
            case QVar(x):
                a = gamma.lookup(x)
                if a is None:
                    fail(f"variable {x} is not in the context", atom)
                return Free(x), a
            case QConst(c):
                a = sig.lookup_obj(c)
                if a is None:
                    fail(f"no object constant {c} in the signature", atom)
                return OConst(c), a
            case QApp(h, arg):
                m, a = synth(gamma, h)
                if not isinstance(a, PiF):
                    fail("head is applied but does not have a Pi type", atom)
                n = check(gamma, arg, a.domain)
                return OApp(m, n), open_term(a.body, 0, n)
            case QBound():
                fail("loose index in a quasicanonical form", atom)
        raise TypeError(f"not a quasiatomic form: {atom!r}")

    return check(ctx, q, expected)


# -- concrete syntax ----------------------------------------------------------------

_FOL_TOKEN = re.compile(r"\s+|(?P<name>[A-Za-z_][\w']*(?:\$\d+)?)|(?P<sym>[(),.&=])")


def _fol_tokens(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while pos < len(text):
        m = _FOL_TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.lastgroup:
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _FolParser:
    def __init__(self, text: str):
        self.toks = _fol_tokens(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][1]

    def take(self, want: str | None = None) -> str:
        kind, text, pos = self.toks[self.i]
        if want is not None and text != want:
            raise ParseError(f"expected {want!r} at offset {pos}, found {text or 'end of input'!r}")
        self.i += 1
        return text

    def name(self) -> str:
        kind, text, pos = self.toks[self.i]
        if kind != "name" or text in ("forall", "f"):
            raise ParseError(f"expected a variable at offset {pos}, found {text or 'end of input'!r}")
        self.i += 1
        return text

    def formula(self) -> FolFormula:
        if self.peek() == "forall":
            self.take()
            x = parse_name(self.name())
            self.take(".")
            return FForall(x, self.formula())
        left = self.conjunct()
        if self.peek() == "&":
            self.take()
            return FAnd(left, self.formula())
        return left

    def conjunct(self) -> FolFormula:
        if self.peek() == "(":
            save = self.i
            self.take()
            try:
                inner = self.formula()
                self.take(")")
                return inner
            except ParseError:
                self.i = save  # a parenthesized term such as (f(x,y)) = z
        left = self.term()
        self.take("=")
        return FEq(left, self.term())

    def term(self) -> FolTerm:
        if self.peek() == "f" and self.toks[self.i + 1][1] == "(":
            self.take()
            self.take("(")
            a = self.term()
            self.take(",")
            b = self.term()
            self.take(")")
            return FApp2(a, b)
        if self.peek() == "(":
            self.take()
            inner = self.term()
            self.take(")")
            return inner
        return FVar(parse_name(self.name()))

    def done(self):
        if self.toks[self.i][0] != "eof":
            raise ParseError(f"unexpected {self.peek()!r} at offset {self.toks[self.i][2]}")


def parse_fol_formula(text: str) -> FolFormula:
    p = _FolParser(text)
    phi = p.formula()
    p.done()
    return phi


def parse_fol_term(text: str) -> FolTerm:
    p = _FolParser(text)
    t = p.term()
    p.done()
    return t


def print_fol(phi) -> str:
    """Canonical text: ``&`` is right-associative and binds looser than ``=``."""
    match phi:
        case FVar(x):
            return str(x)
        case FApp2(a, b):
            return f"f({print_fol(a)}, {print_fol(b)})"
        case FEq(a, b):
            return f"{print_fol(a)} = {print_fol(b)}"
        case FAnd(a, b):
            left = print_fol(a)
            if isinstance(a, (FAnd, FForall)):
                left = f"({left})"
            return f"{left} & {print_fol(b)}"
        case FForall(x, body):
            return f"forall {x}. {print_fol(body)}"
    raise TypeError(f"not first-order syntax: {phi!r}")


__all__ = [
    "FVar", "FApp2", "FEq", "FAnd", "FForall", "FolTerm", "FolFormula", "FolError",
    "SIGMA_FO", "SIGMA_FO_SOURCE", "IOTA", "OMICRON", "C_F", "C_EQ", "C_AND", "C_ALL",
    "encode_term", "encode_formula", "decode_term", "decode_formula", "alpha_equal", "free_vars",
    "elaborate", "parse_fol_formula", "parse_fol_term", "print_fol",
]
