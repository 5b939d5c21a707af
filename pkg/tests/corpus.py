"""Seeded corpora of LF terms and an independent beta-eta oracle.

Everything here is deterministic for a given seed so failures reproduce.
The oracle works on label-free de Bruijn tuples and shares no code with the
kernel's reduction or equivalence modules.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from lfmeta.syntax import (
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
    Signature,
    close_term,
    is_family,
    locally_closed,
    open_term,
)
from lfmeta.surface import parse_context, parse_fam, parse_obj, parse_signature

DATA = Path(__file__).parent / "data"


def load_sig(stem: str) -> Signature:
    return parse_signature((DATA / f"{stem}.lf").read_text(encoding="utf-8"))[0]


FO = load_sig("sigma_fo")
NV = load_sig("nat_vec")
STLC = load_sig("stlc")
FO_CTX = parse_context("x : i, y : i, p : o, g : i -> i, h : i -> o", FO)
NV_CTX = parse_context("n : nat, m : nat, k : nat -> nat, w : vec n", NV)


@dataclass(frozen=True)
class Sample:
    sig: Signature
    ctx: Context
    obj: object
    fam: object


# -- typed generation ---------------------------------------------------------


def _non_dependent(a) -> bool:
    while isinstance(a, PiF):
        if not locally_closed(a.body):
            return False
        a = a.body
    return True


def _arities(a, target) -> list[int]:
    """Numbers of arguments after which a head of type ``a`` has type ``target``."""
    out, k = [], 0
    while True:
        if a == target:
            out.append(k)
        if not isinstance(a, PiF):
            return out
        a, k = a.body, k + 1


def _domains(a, k: int) -> list:
    doms = []
    for _ in range(k):
        doms.append(a.domain)
        a = a.body
    return doms


class TypedGen:
    """Random well-typed objects over a signature whose constants used here are simply typed."""

    def __init__(self, sig: Signature, ctx: Context, domains: list, rng: random.Random):
        self.sig, self.ctx, self.rng = sig, ctx, rng
        self.domains = domains
        self.heads = [(Free(x), a) for x, a in ctx.decls()]
        self.heads += [(OConst(c), a) for c, a in sig.decls() if is_family(a) and _non_dependent(a)]
        self.counter = itertools.count(1)

    def obj(self, a, depth: int, env: tuple = ()):
        rng = self.rng
        heads = self.heads + [(Free(z), b) for z, b in env]
        usable = [(h, b, k) for h, b in heads for k in _arities(b, a) if depth > 0 or k == 0]
        options = ["head"] * 3 if usable else []
        if isinstance(a, PiF):
            options += ["lam"] * 2
        if depth > 0:
            options += ["redex"]
        choice = rng.choice(options)
        if choice == "lam":
            z = Name("z", next(self.counter))
            body = self.obj(a.body, max(depth - 1, 0), env + ((z, a.domain),))
            return Lam(a.domain, close_term(body, z, 0))
        if choice == "redex":
            s = rng.choice(self.domains)
            z = Name("z", next(self.counter))
            body = self.obj(a, depth - 1, env + ((z, s),))
            return OApp(Lam(s, close_term(body, z, 0)), self.obj(s, depth - 1, env))
        h, b, k = rng.choice(usable)
        m = h
        for d in _domains(b, k):
            m = OApp(m, self.obj(d, depth - 1, env))
        return m


# -- untyped generation ------------------------------------------------------------


NAMES = [Name("x"), Name("y"), Name("u", 1), Name("u", 2), Name("v")]
CONSTS = [Ident("c"), Ident("d")]
FAMS = [Ident("a"), Ident("b")]


class RawGen:
    """Random locally closed terms with no typing discipline; redexes are common."""

    def __init__(self, rng: random.Random, names=NAMES):
        self.rng, self.names = rng, names

    def obj(self, depth: int, binders: int = 0):
        rng = self.rng
        leaves = ["free", "const"] + (["bound"] * 2 if binders else [])
        if depth <= 0:
            kind = rng.choice(leaves)
        else:
            kind = rng.choice(leaves + ["lam", "app", "app", "redex"])
        if kind == "free":
            return Free(rng.choice(self.names))
        if kind == "const":
            return OConst(rng.choice(CONSTS))
        if kind == "bound":
            return Bound(rng.randrange(binders))
        if kind == "lam":
            return Lam(self.fam(depth - 1, binders), self.obj(depth - 1, binders + 1))
        if kind == "app":
            return OApp(self.obj(depth - 1, binders), self.obj(depth - 1, binders))
        return OApp(Lam(self.fam(depth - 2, binders), self.obj(depth - 1, binders + 1)), self.obj(depth - 1, binders))

    def fam(self, depth: int, binders: int = 0):
        rng = self.rng
        kind = rng.choice(["const"] if depth <= 0 else ["const", "pi", "app", "app"])
        if kind == "const":
            return AConst(rng.choice(FAMS))
        if kind == "pi":
            return PiF(self.fam(depth - 1, binders), self.fam(depth - 1, binders + 1))
        return FApp(self.fam(depth - 1, binders), self.obj(depth - 1, binders))


def raw_objects(count: int, seed: int, depth: int = 5) -> list:
    gen = RawGen(random.Random(seed))
    return [gen.obj(depth) for _ in range(count)]


def raw_families(count: int, seed: int, depth: int = 4) -> list:
    gen = RawGen(random.Random(seed))
    return [gen.fam(depth) for _ in range(count)]


# -- independent beta-eta oracle ------------------------------------------------------
# Terms are tuples: ("b", i), ("f", name), ("c", ident), ("lam", body), ("app", fun, arg).


def to_db(m):
    match m:
        case Bound(i):
            return ("b", i)
        case Free(x):
            return ("f", x)
        case OConst(c):
            return ("c", c)
        case Lam(_, body):
            return ("lam", to_db(body))
        case OApp(f, a):
            return ("app", to_db(f), to_db(a))
    raise TypeError(m)


def _shift(t, d: int, cutoff: int = 0):
    tag = t[0]
    if tag == "b":
        return ("b", t[1] + d) if t[1] >= cutoff else t
    if tag == "lam":
        return ("lam", _shift(t[1], d, cutoff + 1))
    if tag == "app":
        return ("app", _shift(t[1], d, cutoff), _shift(t[2], d, cutoff))
    return t


def _subst(t, j: int, s):
    tag = t[0]
    if tag == "b":
        return s if t[1] == j else t
    if tag == "lam":
        return ("lam", _subst(t[1], j + 1, _shift(s, 1)))
    if tag == "app":
        return ("app", _subst(t[1], j, s), _subst(t[2], j, s))
    return t


def _beta(body, arg):
    return _shift(_subst(body, 0, _shift(arg, 1)), -1)


def beta_nf(t, budget: list | None = None):
    """Full normal-order beta normal form; ``budget`` is a one-element step counter."""
    budget = budget if budget is not None else [10_000]
    tag = t[0]
    if tag == "lam":
        return ("lam", beta_nf(t[1], budget))
    if tag != "app":
        return t
    f = beta_nf(t[1], budget)
    if f[0] == "lam":
        budget[0] -= 1
        if budget[0] < 0:
            raise RecursionError("oracle budget exhausted")
        return beta_nf(_beta(f[1], t[2]), budget)
    return ("app", f, beta_nf(t[2], budget))


def _occurs(t, j: int) -> bool:
    tag = t[0]
    if tag == "b":
        return t[1] == j
    if tag == "lam":
        return _occurs(t[1], j + 1)
    if tag == "app":
        return _occurs(t[1], j) or _occurs(t[2], j)
    return False


def eta_reduce(t):
    tag = t[0]
    if tag == "app":
        return ("app", eta_reduce(t[1]), eta_reduce(t[2]))
    if tag != "lam":
        return t
    body = eta_reduce(t[1])
    if body[0] == "app" and body[2] == ("b", 0) and not _occurs(body[1], 0):
        return _shift(body[1], -1)
    return ("lam", body)


def oracle_nf(m):
    return eta_reduce(beta_nf(to_db(m)))


def oracle_equal(m, n) -> bool:
    return oracle_nf(m) == oracle_nf(n)


# -- labelled rewriting used to build related pairs --------------------------------


def redex_positions(m, path=()):
    if isinstance(m, OApp):
        if isinstance(m.fun, Lam):
            yield path
        yield from redex_positions(m.fun, path + ("fun",))
        yield from redex_positions(m.arg, path + ("arg",))
    elif isinstance(m, Lam):
        yield from redex_positions(m.body, path + ("body",))


_OPENER = itertools.count(1)


def _rewrite(m, path, f):
    if not path:
        return f(m)
    step, rest = path[0], path[1:]
    if step == "fun":
        return OApp(_rewrite(m.fun, rest, f), m.arg)
    if step == "arg":
        return OApp(m.fun, _rewrite(m.arg, rest, f))
    # open the binder so the rewritten subterm stays locally closed
    x = Name("open", next(_OPENER))
    return Lam(m.domain, close_term(_rewrite(open_term(m.body, 0, Free(x)), rest, f), x, 0))


def contract(m, path):
    return _rewrite(m, path, lambda r: open_term(r.fun.body, 0, r.arg))


def beta_step_somewhere(m, rng: random.Random):
    spots = list(redex_positions(m))
    return contract(m, rng.choice(spots)) if spots else m


def labelled_nf(m, limit: int = 10_000):
    for _ in range(limit):
        spot = next(redex_positions(m), None)
        if spot is None:
            return m
        m = contract(m, spot)
    raise RuntimeError("no normal form within the limit")


def eta_expand(m, a):
    """``lam x:A1. M x`` for ``M : pi x:A1. A2``; M is locally closed so no shifting is needed."""
    return Lam(a.domain, OApp(m, Bound(0)))


# -- corpora ---------------------------------------------------------------------------


def _fo_types():
    i, o = AConst(Ident("i")), AConst(Ident("o"))
    ar = lambda a, b: PiF(a, b)  # noqa: E731
    return i, o, [i, o, ar(i, i), ar(i, o), ar(i, ar(i, i)), ar(ar(i, o), o), ar(o, ar(o, o))]


@lru_cache(maxsize=None)
def fo_samples(count: int = 400, seed: int = 20240611, max_depth: int = 4) -> tuple[Sample, ...]:
    i, o, types = _fo_types()
    rng = random.Random(seed)
    gen = TypedGen(FO, FO_CTX, [i, o, PiF(i, i)], rng)
    out = []
    for n in range(count):
        a = types[n % len(types)]
        out.append(Sample(FO, FO_CTX, gen.obj(a, rng.randint(0, max_depth)), a))
    # head redexes, for subject reduction
    for n in range(count // 4):
        a = types[n % len(types)]
        z = Name("z", 10_000 + n)
        s = rng.choice([i, o])
        body = gen.obj(a, 2, ((z, s),))
        out.append(Sample(FO, FO_CTX, OApp(Lam(s, close_term(body, z, 0)), gen.obj(s, 2)), a))
    return tuple(out)


NV_HAND_OBJECTS = [
    ("cons ((lam n : nat. n) z) z nil", "vec (s z)"),
    ("(lam m : nat. cons z m nil) (s z)", "vec (s z)"),
    ("(lam n : nat. lam v : vec n. cons n z v) z nil", "vec (s z)"),
    ("(lam v : vec n. cons n m v) w", "vec (s n)"),
    ("lam q : nat. cons n q w", "nat -> vec (s n)"),
    ("cons n (plus n m) w", "vec (s n)"),
    ("have", "need (cons z z nil)"),
    ("(lam f : nat -> nat. f (k n)) (lam q : nat. s q)", "nat"),
    ("append n z w nil", "vec (plus n z)"),
]

FO_HAND_PAIRS = [
    ("(lam u : i. g u) y", "g y", "i"),
    ("lam u : i. g u", "g", "i -> i"),
    ("c_all (lam u : i. h u)", "c_all h", "o"),
    ("(lam f : i -> i. f x) g", "g x", "i"),
    ("(lam f : i -> i -> i. f) c_f", "lam a : i. lam b : i. c_f a b", "i -> i -> i"),
    ("c_and p p", "(lam q : o. c_and q q) p", "o"),
    ("c_eq x y", "c_eq y x", "o"),
    ("g x", "g y", "i"),
    ("lam u : i. c_f u x", "lam u : i. c_f x u", "i -> i"),
    ("c_all (lam u : i. c_eq u u)", "c_all (lam v : i. (lam t : i. c_eq t t) v)", "o"),
]


@lru_cache(maxsize=None)
def nv_samples(count: int = 120, seed: int = 7) -> tuple[Sample, ...]:
    nat = AConst(Ident("nat"))
    rng = random.Random(seed)
    gen = TypedGen(NV, NV_CTX, [nat, PiF(nat, nat)], rng)
    out = [Sample(NV, NV_CTX, parse_obj(m, NV), parse_fam(a, NV)) for m, a in NV_HAND_OBJECTS]
    for _ in range(count):
        out.append(Sample(NV, NV_CTX, gen.obj(nat, rng.randint(0, 4)), nat))
    return tuple(out)


def all_samples() -> tuple[Sample, ...]:
    return fo_samples() + nv_samples()


@dataclass(frozen=True)
class Pair:
    sig: Signature
    ctx: Context
    left: object
    right: object
    fam: object


@lru_cache(maxsize=None)
def fo_pairs(seed: int = 99) -> tuple[Pair, ...]:
    """Related and unrelated same-type pairs; roughly half are equivalent."""
    rng = random.Random(seed)
    samples = fo_samples()
    by_type: dict = {}
    for s in samples:
        by_type.setdefault(s.fam, []).append(s)
    gen = TypedGen(FO, FO_CTX, [AConst(Ident("i")), AConst(Ident("o"))], rng)
    out = [Pair(FO, FO_CTX, parse_obj(m, FO), parse_obj(n, FO), parse_fam(a, FO)) for m, n, a in FO_HAND_PAIRS]
    for s in samples[:150]:
        mk = lambda r: Pair(FO, FO_CTX, s.obj, r, s.fam)  # noqa: E731
        out.append(mk(beta_step_somewhere(s.obj, rng)))
        out.append(mk(labelled_nf(s.obj)))
        if isinstance(s.fam, PiF):
            out.append(mk(eta_expand(s.obj, s.fam)))
        out.append(mk(rng.choice(by_type[s.fam]).obj))
        out.append(mk(gen.obj(s.fam, 1)))
    return tuple(out)


NV_FAMILY_PAIRS = [
    ("vec z", "vec ((lam q : nat. q) z)"),
    ("vec (s n)", "vec ((lam q : nat. s q) n)"),
    ("vec (s n)", "vec (s m)"),
    ("vec (k n)", "vec ((lam f : nat -> nat. f n) k)"),
    ("vec (k n)", "vec ((lam f : nat -> nat. f n) (lam q : nat. k q))"),
    ("need (cons z z nil)", "need (cons ((lam q : nat. q) z) z nil)"),
    ("need (cons z z nil)", "need (cons z (s z) nil)"),
    ("pi v : vec n. vec (s n)", "vec n -> vec ((lam q : nat. s q) n)"),
    ("pi q : nat. vec q", "pi r : nat. vec ((lam t : nat. t) r)"),
    ("pi q : nat. vec q", "pi r : nat. vec n"),
    ("nat -> nat", "nat -> nat"),
    ("nat", "vec z"),
    ("nat -> vec z", "vec z -> nat"),
    ("vec (plus n m)", "vec (plus m n)"),
]


@lru_cache(maxsize=None)
def family_pairs(seed: int = 5) -> tuple[Pair, ...]:
    rng = random.Random(seed)
    out = [Pair(NV, NV_CTX, parse_fam(a, NV), parse_fam(b, NV), None) for a, b in NV_FAMILY_PAIRS]
    vec = AConst(Ident("vec"))
    nats = [s.obj for s in nv_samples() if s.fam == AConst(Ident("nat"))]
    for _ in range(60):
        t, u = rng.choice(nats), rng.choice(nats)
        if rng.random() < 0.5:
            u = labelled_nf(t)
        left, right = FApp(vec, t), FApp(vec, u)
        if rng.random() < 0.3:
            left, right = PiF(AConst(Ident("nat")), left), PiF(AConst(Ident("nat")), right)
        out.append(Pair(NV, NV_CTX, left, right, None))
    _, _, types = _fo_types()
    for a, b in itertools.product(types, repeat=2):
        out.append(Pair(FO, FO_CTX, a, b, None))
    return tuple(out)


# -- first-order formulas -------------------------------------------------------------


def fol_terms(names, height: int) -> list:
    """Every first-order term of height at most ``height``; a variable has height 0."""
    from lfmeta.fol import FApp2, FVar

    level = [FVar(x) for x in names]
    for _ in range(height):
        level = [FVar(x) for x in names] + [FApp2(a, b) for a in level for b in level]
    return level


def fol_formulas(names, height: int, bound_pool=(Name("u"), Name("x"))) -> list:
    """Every formula of height at most ``height`` over free variables ``names``.

    An equation is one level above its taller side; each connective and
    quantifier adds a level. Quantifiers bind names from ``bound_pool``,
    so shadowing a free variable is included.
    """
    from lfmeta.fol import FAnd, FEq, FForall

    @lru_cache(maxsize=None)
    def go(scope: tuple, h: int) -> tuple:
        if h <= 0:
            return ()
        terms = fol_terms(scope, h - 1)
        out = [FEq(a, b) for a in terms for b in terms]
        smaller = go(scope, h - 1)
        out += [FAnd(a, b) for a in smaller for b in smaller]
        for z in bound_pool:
            inner = tuple(sorted(set(scope) | {z}))
            out += [FForall(z, phi) for phi in go(inner, h - 1)]
        return tuple(out)

    return list(go(tuple(sorted(set(names))), height))
