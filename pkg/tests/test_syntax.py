from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import families, names, objects, terms

from lfmeta.syntax import (
    TYPE,
    AConst,
    Bound,
    Context,
    Free,
    Ident,
    Lam,
    Name,
    OApp,
    OConst,
    PiF,
    Signature,
    apps,
    arrow,
    close_term,
    fi,
    fv,
    is_family,
    is_kind,
    is_object,
    locally_closed,
    maxi,
    open_term,
    subst_free,
    subst_multi,
)

I = AConst(Ident("i"))


def test_name_printing():
    assert str(Name("x")) == "x"
    assert str(Name("x", 3)) == "x$3"


def test_ident_must_be_nonempty():
    with pytest.raises(ValueError):
        Ident("")


def test_maxi_empty_gives_default():
    assert maxi([]) == Name("v", 0)


def test_maxi_uses_greatest_base_then_bumps_its_index():
    assert maxi([Name("x", 2), Name("y", 0), Name("x", 7)]) == Name("y", 1)
    assert maxi([Name("a", 4), Name("a", 1)]) == Name("a", 5)


@given(st.lists(names, max_size=8))
def test_maxi_is_fresh_and_greater(ns):
    x = maxi(ns)
    assert x not in ns
    assert all(x > n for n in ns)


def test_levels():
    assert is_kind(TYPE) and is_family(I) and is_object(OConst(Ident("c")))
    assert not is_object(I)


def test_arrow_and_apps():
    f = OConst(Ident("f"))
    assert arrow(I, I) == PiF(I, I)
    assert apps(f, Free(Name("x")), Free(Name("y"))) == OApp(OApp(f, Free(Name("x"))), Free(Name("y")))


def test_open_replaces_only_the_matching_index():
    body = Lam(I, OApp(Bound(0), Bound(1)))
    x = Free(Name("x"))
    assert open_term(body, 0, x) == Lam(I, OApp(Bound(0), x))


def test_close_abstracts_under_binders():
    x = Name("x")
    t = Lam(I, OApp(Bound(0), Free(x)))
    assert close_term(t, x, 0) == Lam(I, OApp(Bound(0), Bound(1)))


@given(objects(), names)
def test_open_close_inverse_on_locally_closed(m, x):
    assert open_term(close_term(m, x, 0), 0, Free(x)) == m


@given(objects(binders=1), names)
def test_close_open_inverse_with_fresh_name(body, x):
    if x in fv(body):
        return
    assert close_term(open_term(body, 0, Free(x)), x, 0) == body


@given(objects(), names, objects())
def test_subst_free_matches_close_then_open(m, x, v):
    assert subst_free(m, x, v) == open_term(close_term(m, x, 0), 0, v)


@given(terms, names)
def test_subst_absent_name_is_identity(t, x):
    if x not in fv(t):
        assert subst_free(t, x, OConst(Ident("c"))) == t


def test_subst_multi_is_simultaneous():
    x, y = Name("x"), Name("y")
    t = OApp(Free(x), Free(y))
    swapped = subst_multi(t, [(x, Free(y)), (y, Free(x))])
    assert swapped == OApp(Free(y), Free(x))


def test_locally_closed():
    assert locally_closed(Lam(I, Bound(0)))
    assert not locally_closed(Lam(I, Bound(1)))
    assert locally_closed(Bound(0), level=1)


@given(families())
def test_generated_families_are_locally_closed(a):
    assert locally_closed(a)


def test_fv_and_fi_are_sorted_and_cover_contexts():
    x, y = Name("x"), Name("y")
    ctx = Context.from_decls([(y, I)])
    assert fv(OApp(Free(y), Free(x)), ctx) == [x, y]
    sig = Signature.from_decls([(Ident("i"), TYPE), (Ident("c"), I)])
    assert fi(sig) == [Ident("c"), Ident("i")]


def test_signature_and_context_are_newest_first():
    sig = Signature.from_decls([(Ident("i"), TYPE), (Ident("c"), I)])
    assert sig.entries[0][0] == Ident("c")
    assert sig.decls()[0][0] == Ident("i")
    assert sig.lookup_obj(Ident("c")) == I and sig.lookup_fam(Ident("i")) == TYPE
    assert sig.lookup_obj(Ident("i")) is None
    ctx = Context().extend(Name("x"), I).extend(Name("x"), PiF(I, I))
    assert ctx.lookup(Name("x")) == PiF(I, I)
    assert len(ctx.tail()) == 1
