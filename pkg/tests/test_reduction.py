from __future__ import annotations

import pytest
from hypothesis import given
from strategies import objects

from lfmeta.errors import Fuel, FuelExhausted
from lfmeta.reduction import whnf, whr_step
from lfmeta.surface import parse_obj, parse_signature
from lfmeta.syntax import Lam, OApp, fv

SIG, _ = parse_signature("a : type. c : a. d : a -> a.")


def obj(text):
    return parse_obj(text, SIG)


def test_beta_at_the_head():
    assert whr_step(obj("(lam x : a. d x) c")) == obj("d c")


def test_reduces_head_of_a_spine():
    assert whr_step(obj("(lam x : a. lam y : a. x) c d")) == obj("(lam y : a. c) d")


def test_no_step_under_lambda_or_in_arguments():
    assert whr_step(obj("lam x : a. (lam y : a. y) x")) is None
    assert whr_step(obj("d ((lam y : a. y) c)")) is None


def test_whnf_counts_steps():
    m, steps = whnf(obj("(lam f : a -> a. f c) (lam y : a. d y)"))
    assert m == obj("d c") and steps == 2


def test_whnf_out_of_fuel_is_distinct_and_carries_the_term():
    omega = obj("(lam x : a. x x) (lam x : a. x x)")
    with pytest.raises(FuelExhausted) as info:
        whnf(omega, 10)
    assert info.value.diagnostic.code == "OutOfFuel"
    assert info.value.diagnostic.subterm == omega


def test_shared_fuel_is_consumed_across_calls():
    fuel = Fuel(3)
    whnf(obj("(lam x : a. x) c"), fuel)
    whnf(obj("(lam x : a. x) c"), fuel)
    assert fuel.remaining == 1


def test_zero_fuel_allows_normal_terms():
    assert whnf(obj("d c"), 0) == (obj("d c"), 0)


@given(objects())
def test_step_is_unique_and_does_not_add_free_names(m):
    beta = isinstance(m, OApp) and isinstance(m.fun, Lam)
    congruence = isinstance(m, OApp) and whr_step(m.fun) is not None
    assert not (beta and congruence)
    nxt = whr_step(m)
    if nxt is not None:
        assert set(fv(nxt)) <= set(fv(m))
