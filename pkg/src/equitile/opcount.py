"""Scalar multiply counting for cost assertions.

Rank-one applications report the number of scalar multiplications their
vector operations perform. Counting is off unless a `counting()` context
is active, so the hot path stays a single list check.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class OpCounter:
    multiplies: int = 0


_active: list[OpCounter] = []


def add(n: int) -> None:
    for c in _active:
        c.multiplies += n


@contextmanager
def counting():
    c = OpCounter()
    _active.append(c)
    try:
        yield c
    finally:
        _active.remove(c)
