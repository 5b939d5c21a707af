"""Concrete syntax for signatures, contexts, terms and derivations.

Terms are written ASCII-first::

    type        pi x : A. B        lam x : A. M        A -> B        f a b

``Π`` and ``λ`` are accepted for ``pi`` and ``lam``. Declarations end with
``.`` and ``%`` starts a comment running to the end of the line. A name
``base$k`` always denotes the variable ``Name(base, k)``; a bare name is a
bound variable if a binder is in scope, a constant if the signature declares
it, and a free variable otherwise.

Parsing goes text -> raw tree -> named term -> locally nameless term. Binders
are renamed apart before the final step, so :func:`to_ln` never needs to
check its freshness proviso. Printing goes the other way with binder names
chosen by :func:`from_ln`; the printers are canonical, so
``parse(print(v)) == v``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import LooseIndexError, ParseError, SourceSpan
from .syntax import (
    AConst,
    Bound,
    Context,
    FApp,
    Free,
    Ident,
    Lam,
    Name,
    OApp,
    OConst,
    PiF,
    PiK,
    Signature,
    Term,
    TypeK,
    fv,
    is_family,
    is_kind,
    is_object,
    locally_closed,
    maxi,
)

KEYWORDS = frozenset({"type", "pi", "lam"})

# -- lexing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow>->)
  | (?P<pi>Π)
  | (?P<lam>λ)
  | (?P<name>(?:(?![λΠ])[\w'])+(?:\$\d+)?)
  | (?P<sym>[:.(),\\&=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # name | kw | sym | eof
    text: str
    span: SourceSpan


class _Source:
    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, begin: int, end: int) -> SourceSpan:
        line = _bisect(self._line_starts, begin)
        column = begin - self._line_starts[line]
        return SourceSpan(
            len(self.text[:begin].encode()), len(self.text[:end].encode()), line + 1, column + 1
        )


def _bisect(starts: list[int], pos: int) -> int:
    lo, hi = 0, len(starts)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if starts[mid] <= pos:
            lo = mid
        else:
            hi = mid
    return lo


def tokenize(text: str) -> list[Token]:
    src = _Source(text)
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span=src.span(pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            word = m.group()
            if kind == "pi":
                kind, word = "kw", "pi"
            elif kind == "lam":
                kind, word = "kw", "lam"
            elif kind == "arrow":
                kind = "sym"
            elif kind == "name" and word in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, word, src.span(m.start(), m.end())))
        pos = m.end()
    out.append(Token("eof", "", src.span(len(text), len(text))))
    return out


# -- raw trees ----------------------------------------------------------------


@dataclass(frozen=True)
class RName:
    text: str
    span: SourceSpan


@dataclass(frozen=True)
class RType:
    span: SourceSpan


@dataclass(frozen=True)
class RBind:
    binder: str  # "pi" | "lam"
    name: RName
    domain: Raw
    body: Raw
    span: SourceSpan


@dataclass(frozen=True)
class RArrow:
    domain: Raw
    body: Raw
    span: SourceSpan


@dataclass(frozen=True)
class RApp:
    fun: Raw
    arg: Raw
    span: SourceSpan


Raw = Union[RName, RType, RBind, RArrow, RApp]


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.begin, b.end, a.line, a.column)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str, what: str | None = None) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {what or repr(text)}, found {found!r}", span=self.tok.span)
        return self.advance()

    def name(self) -> RName:
        if self.tok.kind != "name":
            found = self.tok.text or "end of input"
            raise ParseError(f"expected a name, found {found!r}", span=self.tok.span)
        t = self.advance()
        return RName(t.text, t.span)

    def term(self) -> Raw:
        if self.at("pi") or self.at("lam"):
            start = self.advance()
            x = self.name()
            self.expect(":")
            dom = self.term()
            self.expect(".", "'.' after the binder's type")
            body = self.term()
            return RBind(start.text, x, dom, body, _join(start.span, _span(body)))
        left = self.app()
        if self.at("->"):
            self.advance()
            right = self.term()
            return RArrow(left, right, _join(_span(left), _span(right)))
        return left

    def app(self) -> Raw:
        head = self.atom()
        while self.tok.kind == "name" or self.at("(") or self.at("type") or self.at("pi") or self.at("lam"):
            if self.at("pi") or self.at("lam"):
                arg = self.term()  # a trailing binder extends as far right as possible
            else:
                arg = self.atom()
            head = RApp(head, arg, _join(_span(head), _span(arg)))
        return head

    def atom(self) -> Raw:
        t = self.tok
        if t.kind == "name":
            return self.name()
        if self.at("type"):
            self.advance()
            return RType(t.span)
        if self.at("("):
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        found = t.text or "end of input"
        raise ParseError(f"expected a term, found {found!r}", span=t.span)

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", span=self.tok.span)


def _span(r: Raw) -> SourceSpan:
    return r.span


def parse_raw(text: str) -> Raw:
    p = _Parser(text)
    t = p.term()
    p.done()
    return t


# -- named terms ---------------------------------------------------------------


@dataclass(frozen=True)
class NType:
    pass


@dataclass(frozen=True)
class NPiK:
    name: Name | None  # None: non-dependent, printed as an arrow
    domain: NamedFam
    body: NamedKind


@dataclass(frozen=True)
class NFConst:
    ident: Ident


@dataclass(frozen=True)
class NPiF:
    name: Name | None
    domain: NamedFam
    body: NamedFam


@dataclass(frozen=True)
class NFApp:
    fun: NamedFam
    arg: NamedObj


@dataclass(frozen=True)
class NConst:
    ident: Ident


@dataclass(frozen=True)
class NVar:
    name: Name


@dataclass(frozen=True)
class NLam:
    name: Name
    domain: NamedFam
    body: NamedObj


@dataclass(frozen=True)
class NApp:
    fun: NamedObj
    arg: NamedObj


NamedKind = Union[NType, NPiK]
NamedFam = Union[NFConst, NPiF, NFApp]
NamedObj = Union[NConst, NVar, NLam, NApp]
NamedTerm = Union[NamedKind, NamedFam, NamedObj]


def parse_name(text: str) -> Name:
    base, sep, index = text.partition("$")
    return Name(base, int(index)) if sep else Name(base, 0)


class _Scope:
    """Resolution info: declared identifiers and which of them are families."""

    def __init__(self, sig: Signature | None = None, idents: Iterable[Ident] = (), families: Iterable[Ident] = ()):
        self.idents = set(idents)
        self.families = set(families)
        if sig is not None:
            for c, d in sig.entries:
                self.idents.add(c)
                if is_kind(d):
                    self.families.add(c)


def _is_kind_shape(r: Raw) -> bool:
    while True:
        match r:
            case RType():
                return True
            case RBind("pi", _, _, body, _) | RArrow(_, body, _):
                r = body
            case _:
                return False


def _head(r: Raw) -> Raw:
    while isinstance(r, RApp):
        r = r.fun
    return r


def _level_of(r: Raw, scope: _Scope, bound: frozenset[str]) -> str:
    if _is_kind_shape(r):
        return "kind"
    match r:
        case RBind(binder="pi") | RArrow():
            return "fam"
        case RBind(binder="lam"):
            return "obj"
    h = _head(r)
    if isinstance(h, RName) and h.text not in bound and "$" not in h.text and Ident(h.text) in scope.families:
        return "fam"
    return "obj"


class _Resolver:
    def __init__(self, scope: _Scope):
        self.scope = scope

    def binder(self, r: RName) -> Name:
        return parse_name(r.text)

    def kind(self, r: Raw, bound: frozenset[str]) -> NamedKind:
        match r:
            case RType():
                return NType()
            case RBind("pi", x, dom, body, _):
                return NPiK(self.binder(x), self.fam(dom, bound), self.kind(body, bound | {x.text}))
            case RArrow(dom, body, _):
                return NPiK(None, self.fam(dom, bound), self.kind(body, bound))
        raise ParseError("expected a kind", span=r.span)

    def fam(self, r: Raw, bound: frozenset[str]) -> NamedFam:
        match r:
            case RName(text, span):
                if text in bound or "$" in text:
                    raise ParseError(f"variable {text} cannot be used as a type family", span=span)
                return NFConst(Ident(text))
            case RBind("pi", x, dom, body, _):
                return NPiF(self.binder(x), self.fam(dom, bound), self.fam(body, bound | {x.text}))
            case RArrow(dom, body, _):
                return NPiF(None, self.fam(dom, bound), self.fam(body, bound))
            case RApp(f, a, _):
                return NFApp(self.fam(f, bound), self.obj(a, bound))
            case RBind("lam", _, _, _, span):
                raise ParseError("type families cannot be lambda abstractions", span=span)
            case RType(span):
                raise ParseError("'type' is a kind, not a type family", span=span)
        raise ParseError("expected a type family", span=r.span)

    def obj(self, r: Raw, bound: frozenset[str]) -> NamedObj:
        match r:
            case RName(text, _):
                if text in bound or "$" in text:
                    return NVar(parse_name(text))
                if Ident(text) in self.scope.idents:
                    return NConst(Ident(text))
                return NVar(parse_name(text))
            case RBind("lam", x, dom, body, _):
                return NLam(self.binder(x), self.fam(dom, bound), self.obj(body, bound | {x.text}))
            case RApp(f, a, _):
                return NApp(self.obj(f, bound), self.obj(a, bound))
        raise ParseError("expected an object", span=r.span)

    def at(self, level: str, r: Raw) -> NamedTerm:
        return {"kind": self.kind, "fam": self.fam, "obj": self.obj}[level](r, frozenset())


# -- named <-> locally nameless ------------------------------------------------

_MACHINE = "%b"  # '%' never survives lexing, so these names cannot clash


def rename_binders(t: NamedTerm) -> NamedTerm:
    """Alpha-rename every binder to a distinct machine-fresh name."""
    counter = iter(range(1 << 62))

    def go(t, env: dict[Name, Name]):
        match t:
            case NType() | NFConst() | NConst():
                return t
            case NVar(x):
                return NVar(env.get(x, x))
            case NApp(f, a):
                return NApp(go(f, env), go(a, env))
            case NFApp(f, a):
                return NFApp(go(f, env), go(a, env))
        fresh = None if t.name is None else Name(_MACHINE, next(counter))
        inner = env if t.name is None else {**env, t.name: fresh}
        return type(t)(fresh, go(t.domain, env), go(t.body, inner))

    return go(t, {})


def index(x: Name, xs: list, n: int = 0) -> int | None:
    for y in xs:
        if x == y:
            return n
        n += 1
    return None


def to_ln(t: NamedTerm, xs: list | tuple = ()) -> Term:
    """Translate a named term; names in ``xs`` become indices by position."""
    xs = list(xs)
    match t:
        case NType():
            return TypeK()
        case NFConst(c):
            return AConst(c)
        case NConst(c):
            return OConst(c)
        case NVar(x):
            i = index(x, xs)
            return Free(x) if i is None else Bound(i)
        case NApp(f, a):
            return OApp(to_ln(f, xs), to_ln(a, xs))
        case NFApp(f, a):
            return FApp(to_ln(f, xs), to_ln(a, xs))
        case NLam(x, a, m):
            return Lam(to_ln(a, xs), to_ln(m, [x] + xs))
        case NPiF(x, a, b):
            return PiF(to_ln(a, xs), to_ln(b, [x] + xs))
        case NPiK(x, a, k):
            return PiK(to_ln(a, xs), to_ln(k, [x] + xs))
    raise TypeError(f"not a named term: {t!r}")


def _mentions(t: Term, n: int) -> bool:
    """True iff index ``n`` (shifted under binders) occurs in ``t``."""
    match t:
        case Bound(i):
            return i == n
        case Free() | OConst() | AConst() | TypeK():
            return False
        case Lam(a, m) | PiF(a, m) | PiK(a, m):
            return _mentions(a, n) or _mentions(m, n + 1)
        case OApp(a, m) | FApp(a, m):
            return _mentions(a, n) or _mentions(m, n)
    raise TypeError(f"not an LF term: {t!r}")


def from_ln(t: Term, hints: Iterable[Name] = (), avoid: Iterable[Name] = ()) -> NamedTerm:
    """Name the binders of a locally closed term.

    A binder takes the first hint not already in use, otherwise ``maxi`` of
    the names in use; names in use are the free names of ``t``, ``avoid``,
    and the names of enclosing binders. Pi binders whose bodies ignore them
    get no name and print as arrows.
    """
    if not locally_closed(t):
        raise LooseIndexError("cannot name a term with a loose de Bruijn index", subterm=t)
    hints = list(hints)
    used0 = set(fv(t)) | set(avoid)

    def pick(used: set[Name]) -> Name:
        for h in hints:
            if h not in used:
                return h
        return maxi(used)

    def go(t, env: list[Name], used: set[Name]):
        match t:
            case TypeK():
                return NType()
            case AConst(c):
                return NFConst(c)
            case OConst(c):
                return NConst(c)
            case Free(x):
                return NVar(x)
            case Bound(i):
                return NVar(env[i])
            case OApp(f, a):
                return NApp(go(f, env, used), go(a, env, used))
            case FApp(f, a):
                return NFApp(go(f, env, used), go(a, env, used))
        ctor = {Lam: NLam, PiF: NPiF, PiK: NPiK}[type(t)]
        dom = go(t.domain, env, used)
        if ctor is not NLam and not _mentions(t.body, 0):
            return ctor(None, dom, go(t.body, [None] + env, used))
        x = pick(used)
        return ctor(x, dom, go(t.body, [x] + env, used | {x}))

    return go(t, [], used0)


# -- printing -----------------------------------------------------------------


class _Printer:
    def __init__(self, idents: set[Ident]):
        self.idents = {c.label for c in idents}

    def name(self, x: Name) -> str:
        if x.index == 0 and (x.base in self.idents or x.base in KEYWORDS):
            return f"{x.base}$0"
        return str(x)

    def term(self, t: NamedTerm) -> str:
        match t:
            case NLam(x, a, m):
                return f"lam {self.name(x)} : {self.term(a)}. {self.term(m)}"
            case NPiF(None, a, b) | NPiK(None, a, b):
                return f"{self.left(a)} -> {self.term(b)}"
            case NPiF(x, a, b) | NPiK(x, a, b):
                return f"pi {self.name(x)} : {self.term(a)}. {self.term(b)}"
        return self.app(t)

    def left(self, t: NamedTerm) -> str:
        if isinstance(t, (NLam, NPiF, NPiK)):
            return f"({self.term(t)})"
        return self.app(t)

    def app(self, t: NamedTerm) -> str:
        match t:
            case NApp(f, a) | NFApp(f, a):
                head = self.app(f) if isinstance(f, (NApp, NFApp)) else self.atom(f)
                return f"{head} {self.atom(a)}"
        return self.atom(t)

    def atom(self, t: NamedTerm) -> str:
        match t:
            case NType():
                return "type"
            case NFConst(c) | NConst(c):
                return c.label
            case NVar(x):
                return self.name(x)
        return f"({self.term(t)})"


def _idents(sig: Signature | None, extra: Iterable[Ident] = ()) -> set[Ident]:
    out = set(extra)
    if sig is not None:
        out.update(sig.idents())
    return out


def print_named(t: NamedTerm, sig: Signature | None = None) -> str:
    return _Printer(_idents(sig)).term(t)


def print_term(t: Term, sig: Signature | None = None, hints: Iterable[Name] = ()) -> str:
    """Canonical text of a locally closed term.

    With ``sig`` given, free variables whose names collide with declared
    identifiers print as ``name$0`` so that they read back as variables.
    """
    return _Printer(_idents(sig)).term(from_ln(t, hints))


def print_signature(sig: Signature) -> str:
    lines = []
    printer = _Printer(_idents(sig))
    for c, d in sig.decls():
        lines.append(f"{c.label} : {printer.term(from_ln(d))}.")
    return "".join(line + "\n" for line in lines)


def print_context(gamma: Context, sig: Signature | None = None) -> str:
    printer = _Printer(_idents(sig))
    return ", ".join(f"{printer.name(x)} : {printer.term(from_ln(a))}" for x, a in gamma.decls())


# -- parsing entry points -----------------------------------------------------


def _ln(named: NamedTerm) -> Term:
    return to_ln(rename_binders(named), [])


def parse_term(text: str, sig: Signature | None = None, level: str | None = None) -> Term:
    """Parse one term; ``level`` is ``obj``, ``fam``, ``kind`` or None to infer it."""
    scope = _Scope(sig)
    raw = parse_raw(text)
    if level is None:
        level = _level_of(raw, scope, frozenset())
    return _ln(_Resolver(scope).at(level, raw))


def parse_obj(text: str, sig: Signature | None = None):
    return parse_term(text, sig, "obj")


def parse_fam(text: str, sig: Signature | None = None):
    return parse_term(text, sig, "fam")


def parse_kind(text: str, sig: Signature | None = None):
    return parse_term(text, sig, "kind")


def parse_signature(text: str) -> tuple[Signature, dict[Ident, SourceSpan]]:
    """Parse ``c : A.`` / ``a : K.`` declarations in source order.

    Every declared identifier resolves as a constant anywhere in the file, so
    forward references are reported by the checker rather than the parser.
    Duplicates are also left to the checker; the span table maps each
    identifier to its last declaration.
    """
    p = _Parser(text)
    raw_decls: list[tuple[RName, Raw, SourceSpan]] = []
    while p.tok.kind != "eof":
        c = p.name()
        if "$" in c.text:
            raise ParseError(f"'$' is reserved for variable names: {c.text}", span=c.span)
        p.expect(":")
        body = p.term()
        end = p.expect(".", "'.' ending the declaration")
        raw_decls.append((c, body, _join(c.span, end.span)))
    scope = _Scope(idents=[Ident(c.text) for c, _, _ in raw_decls])
    scope.families = {Ident(c.text) for c, body, _ in raw_decls if _is_kind_shape(body)}
    resolver = _Resolver(scope)
    decls, spans = [], {}
    for c, body, span in raw_decls:
        level = "kind" if _is_kind_shape(body) else "fam"
        decls.append((Ident(c.text), _ln(resolver.at(level, body))))
        spans[Ident(c.text)] = span
    return Signature.from_decls(decls), spans


def parse_context(text: str, sig: Signature | None = None) -> Context:
    """Parse ``x : A, y : B`` (oldest entry first)."""
    p = _Parser(text)
    resolver = _Resolver(_Scope(sig))
    decls = []
    if p.tok.kind != "eof":
        while True:
            x = p.name()
            p.expect(":")
            a = p.term()
            decls.append((parse_name(x.text), _ln(resolver.fam(a, frozenset()))))
            if not p.at(","):
                break
            p.advance()
    p.done()
    return Context.from_decls(decls)


# -- quasicanonical forms -----------------------------------------------------


def print_qcan(q, sig: Signature | None = None, idents: Iterable[Ident] = ()) -> str:
    """Text of a quasicanonical form, e.g. ``c_all (\\x. c_eq x x)``."""
    from .equivalence import QApp, QAt, QBound, QConst, QLam, QVar, q_fv

    printer = _Printer(_idents(sig, idents))
    used0 = set(q_fv(q))

    def can(q, env, used) -> str:
        if isinstance(q, QLam):
            x = maxi(used)
            return f"\\{printer.name(x)}. {can(q.body, [x] + env, used | {x})}"
        return atom(q.atom, env, used)

    def atom(a, env, used) -> str:
        match a:
            case QVar(x):
                return printer.name(x)
            case QConst(c):
                return c.label
            case QBound(i):
                if i >= len(env):
                    raise LooseIndexError(f"loose index {i} in a quasicanonical form")
                return printer.name(env[i])
            case QApp(h, arg):
                inner = can(arg, env, used)
                if not (isinstance(arg, QAt) and isinstance(arg.atom, (QVar, QConst, QBound))):
                    inner = f"({inner})"
                return f"{atom(h, env, used)} {inner}"
        raise TypeError(f"not a quasiatomic form: {a!r}")

    return can(q, [], used0)


def parse_qcan(text: str, sig: Signature | None = None, idents: Iterable[Ident] = ()):
    from .equivalence import QApp, QAt, QBound, QConst, QLam, QVar

    known = _idents(sig, idents)
    p = _Parser(text)

    def can(env: list[str]):
        if p.at("\\"):
            p.advance()
            x = p.name()
            p.expect(".")
            return QLam(can([x.text] + env))
        return QAt(spine(env))

    def head(env):
        t = p.tok
        if t.kind != "name":
            found = t.text or "end of input"
            raise ParseError(f"expected a variable or constant head, found {found!r}", span=t.span)
        p.advance()
        if t.text in env:
            return QBound(env.index(t.text))
        if "$" not in t.text and Ident(t.text) in known:
            return QConst(Ident(t.text))
        return QVar(parse_name(t.text))

    def spine(env):
        if p.at("("):
            p.advance()
            h = spine(env)
            p.expect(")")
        else:
            h = head(env)
        while p.tok.kind == "name" or p.at("(") or p.at("\\"):
            if p.at("("):
                p.advance()
                arg = can(env)
                p.expect(")")
            elif p.at("\\"):
                arg = can(env)
            else:
                arg = QAt(head(env))
            h = QApp(h, arg)
        return h

    q = can([])
    p.done()
    return q


# -- derivations --------------------------------------------------------------

_SEXP = re.compile(r'\s+|;[^\n]*|%[^\n]*|(?P<open>\()|(?P<close>\))|(?P<str>"(?:[^"\\]|\\.)*")|(?P<atom>[^\s()"]+)')


def _sexps(text: str) -> list:
    src = _Source(text)
    stack: list[list] = [[]]
    pos = 0
    while pos < len(text):
        m = _SEXP.match(text, pos)
        if m is None:
            raise ParseError("unterminated string", span=src.span(pos, len(text)))
        if m.lastgroup == "open":
            stack.append([])
        elif m.lastgroup == "close":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", span=src.span(m.start(), m.end()))
            done = stack.pop()
            stack[-1].append(done)
        elif m.lastgroup == "str":
            stack[-1].append(_Str(json.loads(m.group())))
        elif m.lastgroup == "atom":
            stack[-1].append(m.group())
        pos = m.end()
    if len(stack) != 1:
        raise ParseError("unbalanced '('", span=src.span(len(text), len(text)))
    return stack[0]


class _Str(str):
    """A quoted string, as opposed to a bare atom."""


_JUDGMENT_SLOTS = {
    "sigok": (),
    "ctxok": (),
    "objty": ("obj", "fam"),
    "famki": ("fam", "kind"),
    "kindok": ("kind",),
    "objeq": ("obj", "obj", "fam"),
    "fameq": ("fam", "fam", "kind"),
    "kindeq": ("kind", "kind"),
}


def _judgment_classes():
    from . import declarative as d

    return {
        "sigok": d.SigOk, "ctxok": d.CtxOk, "objty": d.ObjTy, "famki": d.FamKi,
        "kindok": d.KindOk, "objeq": d.ObjEq, "fameq": d.FamEq, "kindeq": d.KindEq,
    }


def _tag_of(j) -> str:
    for tag, cls in _judgment_classes().items():
        if isinstance(j, cls):
            return tag
    raise TypeError(f"not a judgment: {j!r}")


def _judgment_terms(j) -> tuple:
    from . import declarative as d

    match j:
        case d.SigOk():
            return ()
        case d.CtxOk():
            return ()
        case d.ObjTy(_, _, m, a) | d.FamKi(_, _, m, a) | d.KindEq(_, _, m, a):
            return (m, a)
        case d.KindOk(_, _, k):
            return (k,)
        case d.ObjEq(_, _, m, n, a) | d.FamEq(_, _, m, n, a):
            return (m, n, a)
    raise TypeError(f"not a judgment: {j!r}")


def print_derivation(root) -> str:
    """Serialize a derivation DAG; shared subderivations are written once.

    Output lists signatures, then nodes in premise-first order, then
    ``(root ID)``. Identifiers are assigned in a fixed traversal order, so
    the text is canonical for a given DAG.
    """
    sig_ids: dict[Signature, str] = {}
    sig_lines: list[str] = []
    node_ids: dict[int, str] = {}
    node_lines: list[str] = []

    def sig_id(s: Signature) -> str:
        if s not in sig_ids:
            sig_ids[s] = f"S{len(sig_ids)}"
            sig_lines.append(f"(sig {sig_ids[s]} {json.dumps(print_signature(s), ensure_ascii=False)})")
        return sig_ids[s]

    def judgment(j) -> str:
        parts = [_tag_of(j), sig_id(j.sig)]
        if hasattr(j, "ctx"):
            parts.append(json.dumps(print_context(j.ctx, j.sig), ensure_ascii=False))
        for t in _judgment_terms(j):
            parts.append(json.dumps(print_term(t, j.sig), ensure_ascii=False))
        return "(" + " ".join(parts) + ")"

    # iterative post-order so very deep derivations do not hit the recursion limit
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in node_ids:
            continue
        if not expanded:
            stack.append((node, True))
            for p in reversed(node.premises):
                if id(p) not in node_ids:
                    stack.append((p, False))
            continue
        nid = f"d{len(node_ids)}"
        node_ids[id(node)] = nid
        parts = ["node", nid, node.rule, judgment(node.conclusion)]
        if node.fresh_witness is not None:
            parts.append(f"(fresh {_Printer(set()).name(node.fresh_witness)})")
        parts.extend(node_ids[id(p)] for p in node.premises)
        node_lines.append("(" + " ".join(parts) + ")")
    return "\n".join(sig_lines + node_lines + [f"(root {node_ids[id(root)]})"]) + "\n"


def parse_derivation(text: str):
    """Read the format written by :func:`print_derivation`."""
    from .declarative import Derivation

    classes = _judgment_classes()
    sigs: dict[str, Signature] = {}
    nodes: dict[str, Derivation] = {}
    root = None
    for form in _sexps(text):
        if not isinstance(form, list) or not form:
            raise ParseError(f"expected a top-level form, found {form!r}")
        head = form[0]
        if head == "sig" and len(form) == 3 and isinstance(form[2], _Str):
            sigs[form[1]] = parse_signature(form[2])[0]
        elif head == "node" and len(form) >= 4:
            nid, rule, jform, rest = form[1], form[2], form[3], form[4:]
            witness = None
            if rest and isinstance(rest[0], list):
                if len(rest[0]) != 2 or rest[0][0] != "fresh":
                    raise ParseError(f"malformed fresh witness in node {nid}")
                witness = parse_name(rest[0][1])
                rest = rest[1:]
            premises = []
            for pid in rest:
                if pid not in nodes:
                    raise ParseError(f"node {nid} cites undefined node {pid}")
                premises.append(nodes[pid])
            if nid in nodes:
                raise ParseError(f"node {nid} is defined twice")
            nodes[nid] = Derivation(str(rule), _read_judgment(jform, sigs, classes), tuple(premises), witness)
        elif head == "root" and len(form) == 2:
            if form[1] not in nodes:
                raise ParseError(f"root cites undefined node {form[1]}")
            root = nodes[form[1]]
        else:
            raise ParseError(f"unknown form {head!r}")
    if root is None:
        raise ParseError("derivation has no (root ...) form")
    return root


def _read_judgment(form, sigs, classes):
    if not isinstance(form, list) or len(form) < 2 or form[0] not in classes:
        raise ParseError(f"malformed judgment {form!r}")
    tag, sid, args = form[0], form[1], form[2:]
    if sid not in sigs:
        raise ParseError(f"judgment cites undefined signature {sid}")
    sig = sigs[sid]
    slots = _JUDGMENT_SLOTS[tag]
    if tag == "sigok":
        if args:
            raise ParseError("sigok takes only a signature")
        return classes[tag](sig)
    if len(args) != 1 + len(slots) or not all(isinstance(a, _Str) for a in args):
        raise ParseError(f"{tag} expects a context and {len(slots)} term strings")
    ctx = parse_context(args[0], sig)
    terms = [parse_term(a, sig, level) for a, level in zip(args[1:], slots)]
    return classes[tag](sig, ctx, *terms)


def iter_nodes(root) -> Iterator:
    """Each distinct node of a derivation DAG once, premises first."""
    seen: set[int] = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for p in reversed(node.premises):
            stack.append((p, False))


__all__ = [
    "Token", "tokenize", "parse_raw", "parse_name",
    "NType", "NPiK", "NFConst", "NPiF", "NFApp", "NConst", "NVar", "NLam", "NApp", "NamedTerm",
    "rename_binders", "index", "to_ln", "from_ln",
    "print_named", "print_term", "print_signature", "print_context",
    "parse_term", "parse_obj", "parse_fam", "parse_kind", "parse_signature", "parse_context",
    "print_qcan", "parse_qcan", "print_derivation", "parse_derivation", "iter_nodes",
    "is_object", "is_family",
]
