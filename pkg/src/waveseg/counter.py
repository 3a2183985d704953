"""Operation-level multiply-add and activation accounting.

One FLOP unit equals one multiply-add; elementwise passes are charged one
unit per output element.  ``peak_live_elements`` is the largest per-op
working set (input elements + output elements) seen inside the scope, a
proxy for peak activation memory of the counted computation.
"""

from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class OpCounter:
    mul_adds: int = 0
    peak_live_elements: int = 0

    def reset(self):
        self.mul_adds = 0
        self.peak_live_elements = 0


_ACTIVE: list[OpCounter] = []


def record(mul_adds, live_elements=0):
    """Charge every active counter. Nested scopes compose additively."""
    if not _ACTIVE:
        return
    for c in _ACTIVE:
        c.mul_adds += mul_adds
        if live_elements > c.peak_live_elements:
            c.peak_live_elements = live_elements


@contextmanager
def counting():
    c = OpCounter()
    _ACTIVE.append(c)
    try:
        yield c
    finally:
        _ACTIVE.remove(c)


def counter_scope(f):
    """Run ``f()`` with a fresh counter; return (result, counter)."""
    with counting() as c:
        result = f()
    return result, c
