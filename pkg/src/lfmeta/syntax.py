"""Locally nameless LF syntax: kinds, type families and objects.

Bound variables are de Bruijn indices, free variables are :class:`Name` values.
Structural equality of locally closed terms coincides with alpha-equivalence.
Signatures and contexts are cons-lists stored most-recent-first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

FRESH_BASE = "v"


@dataclass(frozen=True, order=True)
class Name:
    base: str
    index: int = 0

    def __str__(self) -> str:
        return self.base if self.index == 0 else f"{self.base}${self.index}"


@dataclass(frozen=True, order=True)
class Ident:
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("identifier label must be nonempty")

    def __str__(self) -> str:
        return self.label


# -- kinds ------------------------------------------------------------------


@dataclass(frozen=True)
class TypeK:
    pass


@dataclass(frozen=True)
class PiK:
    domain: FamilyExpr
    body: KindExpr  # binds index 0


# -- type families ----------------------------------------------------------


@dataclass(frozen=True)
class AConst:
    ident: Ident


@dataclass(frozen=True)
class PiF:
    domain: FamilyExpr
    body: FamilyExpr  # binds index 0


@dataclass(frozen=True)
class FApp:
    fun: FamilyExpr
    arg: ObjectExpr


# -- objects ----------------------------------------------------------------


@dataclass(frozen=True)
class OConst:
    ident: Ident


@dataclass(frozen=True)
class Free:
    name: Name


@dataclass(frozen=True)
class Bound:
    index: int


@dataclass(frozen=True)
class Lam:
    domain: FamilyExpr
    body: ObjectExpr  # binds index 0


@dataclass(frozen=True)
class OApp:
    fun: ObjectExpr
    arg: ObjectExpr


KindExpr = Union[TypeK, PiK]
FamilyExpr = Union[AConst, PiF, FApp]
ObjectExpr = Union[OConst, Free, Bound, Lam, OApp]
Term = Union[KindExpr, FamilyExpr, ObjectExpr]

TYPE = TypeK()


def arrow(dom: FamilyExpr, cod: FamilyExpr) -> PiF:
    """Non-dependent function family ``dom -> cod``."""
    return PiF(dom, cod)


def apps(head: ObjectExpr, *args: ObjectExpr) -> ObjectExpr:
    for a in args:
        head = OApp(head, a)
    return head


# -- signatures and contexts ------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Declarations ``(c, A)`` and ``(a, K)``, most recent first."""

    entries: tuple[tuple[Ident, Union[FamilyExpr, KindExpr]], ...] = ()

    @classmethod
    def from_decls(cls, decls: Iterable[tuple[Ident, Union[FamilyExpr, KindExpr]]]) -> Signature:
        """Build from declarations listed oldest first (source order)."""
        return cls(tuple(reversed(list(decls))))

    def extend(self, ident: Ident, decl: Union[FamilyExpr, KindExpr]) -> Signature:
        return Signature(((ident, decl),) + self.entries)

    def decls(self) -> list[tuple[Ident, Union[FamilyExpr, KindExpr]]]:
        """Declarations oldest first."""
        return list(reversed(self.entries))

    def lookup(self, ident: Ident) -> Union[FamilyExpr, KindExpr, None]:
        for c, d in self.entries:
            if c == ident:
                return d
        return None

    def lookup_obj(self, ident: Ident) -> FamilyExpr | None:
        d = self.lookup(ident)
        return None if is_kind(d) else d

    def lookup_fam(self, ident: Ident) -> KindExpr | None:
        d = self.lookup(ident)
        return d if is_kind(d) else None

    def idents(self) -> list[Ident]:
        return [c for c, _ in self.entries]

    def tail(self) -> Signature:
        return Signature(self.entries[1:])

    def __iter__(self) -> Iterator[tuple[Ident, Union[FamilyExpr, KindExpr]]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Context:
    """Variable declarations ``(x, A)``, most recent first."""

    entries: tuple[tuple[Name, FamilyExpr], ...] = ()

    @classmethod
    def from_decls(cls, decls: Iterable[tuple[Name, FamilyExpr]]) -> Context:
        return cls(tuple(reversed(list(decls))))

    def extend(self, name: Name, fam: FamilyExpr) -> Context:
        return Context(((name, fam),) + self.entries)

    def decls(self) -> list[tuple[Name, FamilyExpr]]:
        return list(reversed(self.entries))

    def lookup(self, name: Name) -> FamilyExpr | None:
        for x, a in self.entries:
            if x == name:
                return a
        return None

    def names(self) -> list[Name]:
        return [x for x, _ in self.entries]

    def tail(self) -> Context:
        return Context(self.entries[1:])

    def __iter__(self) -> Iterator[tuple[Name, FamilyExpr]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


NamedSubst = list[tuple[Name, ObjectExpr]]


def is_kind(t) -> bool:
    return isinstance(t, (TypeK, PiK))


def is_family(t) -> bool:
    return isinstance(t, (AConst, PiF, FApp))


def is_object(t) -> bool:
    return isinstance(t, (OConst, Free, Bound, Lam, OApp))


# -- generic traversal ------------------------------------------------------


def _map(t: Term, on_obj, depth: int) -> Term:
    """Rebuild ``t`` applying ``on_obj(leaf, depth)`` to Free/Bound leaves."""
    match t:
        case Free() | Bound():
            return on_obj(t, depth)
        case OConst() | AConst() | TypeK():
            return t
        case Lam(a, m):
            return Lam(_map(a, on_obj, depth), _map(m, on_obj, depth + 1))
        case OApp(m, n):
            return OApp(_map(m, on_obj, depth), _map(n, on_obj, depth))
        case PiF(a, b):
            return PiF(_map(a, on_obj, depth), _map(b, on_obj, depth + 1))
        case FApp(a, m):
            return FApp(_map(a, on_obj, depth), _map(m, on_obj, depth))
        case PiK(a, k):
            return PiK(_map(a, on_obj, depth), _map(k, on_obj, depth + 1))
    raise TypeError(f"not an LF term: {t!r}")


def open_term(t: Term, n: int, v: ObjectExpr) -> Term:
    """Replace index ``n`` (shifted under binders) by the locally closed ``v``."""

    def leaf(x, depth):
        if isinstance(x, Bound) and x.index == n + depth:
            return v
        return x

    return _map(t, leaf, 0)


def close_term(t: Term, x: Name, n: int) -> Term:
    """Abstract every ``Free(x)`` into index ``n`` (shifted under binders)."""

    def leaf(y, depth):
        if isinstance(y, Free) and y.name == x:
            return Bound(n + depth)
        return y

    return _map(t, leaf, 0)


def subst_free(t: Term, x: Name, v: ObjectExpr) -> Term:
    """Capture-free ``t[x := v]`` for locally closed ``v``."""

    def leaf(y, depth):
        if isinstance(y, Free) and y.name == x:
            return v
        return y

    return _map(t, leaf, 0)


def lookup(sigma: NamedSubst, x: Name) -> ObjectExpr:
    for y, m in sigma:
        if x == y:
            return m
    return Free(x)


def subst_multi(t: Term, sigma: NamedSubst) -> Term:
    """Simultaneous substitution; the first binding for a name wins."""

    def leaf(y, depth):
        if isinstance(y, Free):
            return lookup(sigma, y.name)
        return y

    return _map(t, leaf, 0)


# The per-level names below keep call sites self-documenting.
open_obj = open_fam = open_kind = open_term
close_obj = close_fam = close_kind = close_term
subst_free_obj = subst_free_fam = subst_free_kind = subst_free
subst_multi_obj = subst_multi_fam = subst_multi_kind = subst_multi


def _walk(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        match u:
            case Lam(a, m) | OApp(a, m) | PiF(a, m) | FApp(a, m) | PiK(a, m):
                stack.append(m)
                stack.append(a)


def locally_closed(t: Term, level: int = 0) -> bool:
    """True iff every ``Bound(n)`` sits under more than ``n - level`` binders."""
    match t:
        case Bound(i):
            return i < level
        case Free() | OConst() | AConst() | TypeK():
            return True
        case Lam(a, m) | PiF(a, m) | PiK(a, m):
            return locally_closed(a, level) and locally_closed(m, level + 1)
        case OApp(m, n) | FApp(m, n):
            return locally_closed(m, level) and locally_closed(n, level)
    raise TypeError(f"not an LF term: {t!r}")


def fv(*things) -> list[Name]:
    """Free names of terms, contexts or simple contexts, sorted and deduplicated."""
    out: set[Name] = set()
    for thing in things:
        _collect_fv(thing, out)
    return sorted(out)


def _collect_fv(thing, out: set[Name]) -> None:
    if isinstance(thing, Context):
        for x, a in thing.entries:
            out.add(x)
            _collect_fv(a, out)
        return
    if isinstance(thing, Name):
        out.add(thing)
        return
    if isinstance(thing, (list, tuple)):
        # simple contexts and plain association lists
        for item in thing:
            _collect_fv(item, out)
        return
    if hasattr(thing, "entries") and not is_kind(thing):
        for x, _ in thing.entries:
            if isinstance(x, Name):
                out.add(x)
        return
    if is_kind(thing) or is_family(thing) or is_object(thing):
        for u in _walk(thing):
            if isinstance(u, Free):
                out.add(u.name)


def fi(*things) -> list[Ident]:
    """Identifiers declared in signatures or occurring in terms, sorted."""
    out: set[Ident] = set()
    for thing in things:
        if isinstance(thing, Signature):
            for c, d in thing.entries:
                out.add(c)
                out.update(fi(d))
        elif isinstance(thing, Context):
            for _, a in thing.entries:
                out.update(fi(a))
        else:
            for u in _walk(thing):
                if isinstance(u, (OConst, AConst)):
                    out.add(u.ident)
    return sorted(out)


def maxi(names: Iterable[Name]) -> Name:
    """A name strictly greater than every name in ``names``.

    Uses the greatest base label present and bumps the largest index seen
    with that base. The empty list yields ``v``.
    """
    names = list(names)
    if not names:
        return Name(FRESH_BASE, 0)
    base = max(n.base for n in names)
    return Name(base, max(n.index for n in names if n.base == base) + 1)
