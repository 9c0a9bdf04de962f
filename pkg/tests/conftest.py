import numpy as np
import pytest

from cbhe.algebra import make_rng


@pytest.fixture
def rng():
    return make_rng(20240517)


def galois_field(F):
    """Independent galois.GF instance with the same modulus as ``F``."""
    galois = pytest.importorskip("galois")
    if F.m == 1:
        return galois.GF(F.p)
    poly = galois.Poly(list(reversed(F.modulus)), field=galois.GF(F.p))
    return galois.GF(F.p**F.m, irreducible_poly=poly)


def as_galois(GFo, F, a):
    """Our integer encoding -> galois integer encoding (both base-p digits, lowest first)."""
    return GFo(np.asarray(a, dtype=np.int64))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
