"""LF typechecking and equivalence kernel over locally nameless terms."""

from .declarative import Derivation, check_derivation
from .equivalence import (
    Equal,
    NotEqual,
    OutOfFuel,
    erase_labels,
    fam_equiv,
    fam_equiv_weak,
    fam_struct,
    kind_equiv,
    obj_equiv,
    obj_equiv_q,
    obj_struct,
    obj_struct_q,
)
from .erasure import erase_ctx, erase_family, erase_kind, erase_sig, sctx_valid, ssig_valid
from .errors import FUEL_DEFAULT, CheckError, Diagnostic, Fuel, FuelExhausted, LFError, LooseIndexError, ParseError
from .reduction import whnf, whr_step
from .surface import (
    from_ln,
    parse_context,
    parse_derivation,
    parse_signature,
    parse_term,
    print_context,
    print_derivation,
    print_signature,
    print_term,
    to_ln,
)
from .syntax import Context, Ident, Name, Signature
from .typecheck import Checker, check_ctx, check_kind, check_sig, synth_fam, synth_obj

__version__ = "0.1.0"

__all__ = [
    "Derivation",
    "check_derivation",
    "Equal",
    "NotEqual",
    "OutOfFuel",
    "erase_labels",
    "fam_equiv",
    "fam_equiv_weak",
    "fam_struct",
    "kind_equiv",
    "obj_equiv",
    "obj_equiv_q",
    "obj_struct",
    "obj_struct_q",
    "erase_ctx",
    "erase_family",
    "erase_kind",
    "erase_sig",
    "sctx_valid",
    "ssig_valid",
    "FUEL_DEFAULT",
    "CheckError",
    "Diagnostic",
    "Fuel",
    "FuelExhausted",
    "LFError",
    "LooseIndexError",
    "ParseError",
    "whnf",
    "whr_step",
    "from_ln",
    "parse_context",
    "parse_derivation",
    "parse_signature",
    "parse_term",
    "print_context",
    "print_derivation",
    "print_signature",
    "print_term",
    "to_ln",
    "Context",
    "Ident",
    "Name",
    "Signature",
    "Checker",
    "check_ctx",
    "check_kind",
    "check_sig",
    "synth_fam",
    "synth_obj",
]
