from __future__ import annotations

import pytest
from corpus import DATA, NV, fo_samples
from derivations import builder

from lfmeta.declarative import check_derivation
from lfmeta.errors import CheckError, Fuel, FuelExhausted, LooseIndexError
from lfmeta.surface import parse_context, parse_fam, parse_kind, parse_obj, parse_signature
from lfmeta.syntax import TYPE, AConst, Bound, Context, Ident, Lam, OConst, PiK, Signature
from lfmeta.typecheck import Checker, check_ctx, check_kind, check_sig, synth_fam, synth_obj


def sig_of(text: str) -> Signature:
    return parse_signature(text)[0]


def code_of(thunk) -> str:
    with pytest.raises(CheckError) as info:
        thunk()
    return info.value.diagnostic.code


def test_synthesized_types_match_checked_derivations():
    # an independent witness: the declarative checker accepts a derivation with the same type
    for s in fo_samples()[:150]:
        d = builder(s.sig).obj_ty(s.ctx, s.obj)
        check_derivation(d)
        assert synth_obj(s.sig, s.ctx, s.obj) == d.conclusion.fam


def test_dependent_application_substitutes_the_argument():
    assert synth_obj(NV, Context(), parse_obj("cons z z nil", NV)) == parse_fam("vec (s z)", NV)
    assert synth_obj(NV, Context(), parse_obj("append z z nil nil", NV)) == parse_fam("vec (plus z z)", NV)


def test_lambda_synthesizes_a_pi_type():
    ctx = parse_context("w : vec z", NV)
    got = synth_obj(NV, ctx, parse_obj("lam q : nat. cons z q w", NV))
    assert got == parse_fam("nat -> vec (s z)", NV)


def test_argument_types_are_compared_up_to_equivalence():
    # cons's third argument must have type vec ((lam n. s n) z), which is vec (s z)
    a = synth_obj(NV, Context(), parse_obj("have", NV))
    assert a == parse_fam("need (cons z z nil)", NV)
    assert synth_fam(NV, Context(), parse_fam("need (cons ((lam n : nat. n) z) z nil)", NV)) == TYPE


def test_family_kinds():
    assert synth_fam(NV, Context(), parse_fam("vec", NV)) == parse_kind("nat -> type", NV)
    check_kind(NV, Context(), parse_kind("pi n : nat. vec n -> type", NV))


def test_sample_signatures_check():
    for stem in ("sigma_fo", "nat_vec", "stlc", "deep", "worked"):
        check_sig(parse_signature((DATA / f"{stem}.lf").read_text())[0])


def test_failure_codes():
    base = "nat : type. z : nat. s : nat -> nat. vec : nat -> type."
    assert code_of(lambda: check_sig(sig_of("nat : type. nat : type."))) == "DuplicateIdent"
    assert code_of(lambda: check_sig(sig_of(base + " bad : vec."))) == "IllKinded"
    assert code_of(lambda: check_sig(sig_of(base + " bad : vec (z z)."))) == "NotAFunction"
    # an undeclared name in a signature file reads as a variable
    assert code_of(lambda: check_sig(sig_of(base + " bad : vec (s vec_z)."))) == "UnboundVariable"
    assert code_of(lambda: check_sig(sig_of(base + " b : type. t : b. bad : vec t."))) == "DomainMismatch"
    sig = sig_of(base)
    assert code_of(lambda: synth_obj(sig, Context(), parse_obj("s q", sig))) == "UnboundVariable"
    assert code_of(lambda: check_ctx(sig, parse_context("x : nat, x : nat", sig))) == "DuplicateName"
    assert code_of(lambda: check_kind(sig, Context(), PiK(AConst(Ident("nope")), TYPE))) == "UnboundConstant"
    assert code_of(lambda: synth_obj(sig, Context(), OConst(Ident("nope")))) == "UnboundConstant"


def test_failures_name_the_declaration_and_rule_path():
    with pytest.raises(CheckError) as info:
        check_sig(sig_of("nat : type. bool : type. t : bool. f : nat -> type. bad : f t."))
    d = info.value.diagnostic
    assert d.decl == Ident("bad")
    assert d.code == "DomainMismatch"
    assert d.path == ("sig bad", "fam-app")


def test_loose_indices_are_rejected_up_front():
    with pytest.raises(LooseIndexError):
        synth_obj(NV, Context(), Lam(parse_fam("nat", NV), Bound(1)))


def test_fuel_is_shared_and_reported():
    deep = parse_signature((DATA / "deep.lf").read_text())[0]
    with pytest.raises(FuelExhausted):
        check_sig(deep, 50)
    fuel = Fuel(10_000)
    check_sig(deep, fuel)
    assert 50 < fuel.used < 10_000


def test_checker_reuses_a_validated_signature():
    checker = Checker(NV)
    ctx = parse_context("n : nat, w : vec n", NV)
    assert checker.synth_obj(ctx, parse_obj("cons n z w", NV)) == parse_fam("vec (s n)", NV)
    with pytest.raises(CheckError):
        checker.check_ctx(parse_context("w : vec q, q : nat", NV))


def test_rechecking_leaves_gives_the_same_answers():
    plain, eager = Checker(NV), Checker(NV, recheck_leaves=True)
    ctx = parse_context("n : nat, m : nat", NV)
    for text in ("cons n m nil", "plus ((lam q : nat. q) n) m", "lam v : vec n. cons n z v"):
        try:
            want = plain.synth_obj(ctx, parse_obj(text, NV))
        except CheckError as exc:
            want = exc.diagnostic.code
        try:
            got = eager.synth_obj(ctx, parse_obj(text, NV))
        except CheckError as exc:
            got = exc.diagnostic.code
        assert got == want


def test_binders_open_with_fresh_names():
    # the bound name q must not capture the free q in the context
    ctx = parse_context("q : nat", NV)
    got = synth_obj(NV, ctx, parse_obj("lam r : nat. cons z (plus q r) nil", NV))
    assert got == parse_fam("nat -> vec (s z)", NV)
    got = synth_obj(NV, ctx, parse_obj("lam v : vec q. lam q : nat. v", NV))
    assert got == parse_fam("vec q -> nat -> vec q", NV)
