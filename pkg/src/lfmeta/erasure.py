"""Simple types and kinds, and erasure of dependent families onto them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .syntax import (
    AConst,
    Context,
    FamilyExpr,
    FApp,
    Ident,
    KindExpr,
    Name,
    PiF,
    PiK,
    Signature,
    TypeK,
    is_kind,
)


@dataclass(frozen=True)
class SBase:
    ident: Ident

    def __str__(self) -> str:
        return f"{self.ident}-"


@dataclass(frozen=True)
class SArrow:
    dom: SimpleType
    cod: SimpleType

    def __str__(self) -> str:
        d = f"({self.dom})" if isinstance(self.dom, SArrow) else str(self.dom)
        return f"{d} -> {self.cod}"


@dataclass(frozen=True)
class SType:
    def __str__(self) -> str:
        return "type-"


@dataclass(frozen=True)
class SKArrow:
    dom: SimpleType
    cod: SimpleKind

    def __str__(self) -> str:
        d = f"({self.dom})" if isinstance(self.dom, SArrow) else str(self.dom)
        return f"{d} -> {self.cod}"


SimpleType = Union[SBase, SArrow]
SimpleKind = Union[SType, SKArrow]

STYPE = SType()


@dataclass(frozen=True)
class SimpleContext:
    entries: tuple[tuple[Name, SimpleType], ...] = ()

    def extend(self, name: Name, tau: SimpleType) -> SimpleContext:
        return SimpleContext(((name, tau),) + self.entries)

    def lookup(self, name: Name) -> SimpleType | None:
        for x, t in self.entries:
            if x == name:
                return t
        return None

    def names(self) -> list[Name]:
        return [x for x, _ in self.entries]

    def __iter__(self) -> Iterator[tuple[Name, SimpleType]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SimpleSignature:
    entries: tuple[tuple[Ident, Union[SimpleType, SimpleKind]], ...] = ()

    def lookup_type(self, ident: Ident) -> SimpleType | None:
        for c, t in self.entries:
            if c == ident:
                return t if isinstance(t, (SBase, SArrow)) else None
        return None

    def lookup_kind(self, ident: Ident) -> SimpleKind | None:
        for c, k in self.entries:
            if c == ident:
                return k if isinstance(k, (SType, SKArrow)) else None
        return None

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def erase_family(a: FamilyExpr) -> SimpleType:
    # total on raw trees: indices never reach a family head
    match a:
        case AConst(c):
            return SBase(c)
        case FApp(f, _):
            return erase_family(f)
        case PiF(dom, body):
            return SArrow(erase_family(dom), erase_family(body))
    raise TypeError(f"not a type family: {a!r}")


def erase_kind(k: KindExpr) -> SimpleKind:
    match k:
        case TypeK():
            return STYPE
        case PiK(dom, body):
            return SKArrow(erase_family(dom), erase_kind(body))
    raise TypeError(f"not a kind: {k!r}")


def erase_ctx(ctx: Context) -> SimpleContext:
    return SimpleContext(tuple((x, erase_family(a)) for x, a in ctx.entries))


def erase_sig(sig: Signature) -> SimpleSignature:
    return SimpleSignature(
        tuple((c, erase_kind(d) if is_kind(d) else erase_family(d)) for c, d in sig.entries)
    )


def sctx_valid(delta: SimpleContext) -> bool:
    names = [x for x, _ in delta.entries]
    return len(names) == len(set(names))


def ssig_valid(sigma: SimpleSignature) -> bool:
    idents = [c for c, _ in sigma.entries]
    return len(idents) == len(set(idents))
