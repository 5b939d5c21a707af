"""Weak head reduction and fuel-bounded weak head normalization."""

from __future__ import annotations

from .errors import Fuel, as_fuel
from .syntax import Lam, OApp, ObjectExpr, open_obj


def whr_step(m: ObjectExpr) -> ObjectExpr | None:
    """The unique weak head reduct of ``m``, or None if ``m`` is weak head normal."""
    spine = []
    head = m
    while isinstance(head, OApp):
        spine.append(head.arg)
        head = head.fun
    if not (isinstance(head, Lam) and spine):
        return None
    reduct = open_obj(head.body, 0, spine.pop())
    for arg in reversed(spine):
        reduct = OApp(reduct, arg)
    return reduct


def whnf(m: ObjectExpr, fuel: int | Fuel | None = None) -> tuple[ObjectExpr, int]:
    """Reduce ``m`` to weak head normal form.

    Returns the normal form and the number of steps taken. Raises
    :class:`FuelExhausted` (carrying the last term reached) if a further step
    is possible once the budget is spent.
    """
    budget = as_fuel(fuel)
    steps = 0
    while True:
        nxt = whr_step(m)
        if nxt is None:
            return m, steps
        budget.consume(m)
        m = nxt
        steps += 1
