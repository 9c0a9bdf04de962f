"""Symmetric somewhat-homomorphic encryption over Reed-Solomon-style evaluation codes.

A plaintext ``m`` is hidden as ``p(y)`` for a random polynomial ``p`` of
degree below ``kC``; the ciphertext is ``(p(x_1), ..., p(x_n))`` with errors
written only outside a secret index set ``I``.  Sums and coordinate-wise
products of ciphertexts are evaluations of sums and products of the hidden
polynomials, so as long as the degree stays below ``|I|`` the values at ``I``
still interpolate to the right polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from cbhe import poly
from cbhe.algebra import GF, Field


class BudgetExceededError(ValueError):
    """A ciphertext's multiplication counter would exceed the degree bound."""


@dataclass(frozen=True, eq=False)
class EvalCodePair:
    x: np.ndarray  # evaluation points of the code
    y: int  # message support, not among x
    kC: int
    mu: int
    I: np.ndarray  # sorted clean index set
    field: Field

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def C_dimension(self) -> int:
        return self.kC

    @property
    def Cprime_dimension(self) -> int:
        """Dimension of C' ⊇ C^mu: polynomials of degree below mu(kC - 1) + 1."""
        return self.mu * (self.kC - 1) + 1


@dataclass(frozen=True, eq=False)
class ArmknechtKey:
    pair: EvalCodePair
    error_budget: int
    security: int = 0  # recorded only; parameters here are desk-scale

    @property
    def field(self) -> Field:
        return self.pair.field

    @property
    def mu(self) -> int:
        return self.pair.mu


@dataclass(frozen=True, eq=False)
class EcCiphertext:
    c: np.ndarray
    gamma: int
    mu: int
    field: Field


def clean_set_size(mu: int, kC: int) -> int:
    return mu * (kC - 1) + 1


def ec_keygen(
    s: int,
    mu: int,
    L: int,
    rng: np.random.Generator,
    *,
    q: int = 17,
    n: int = 12,
    kC: int = 3,
    error_budget: Optional[int] = None,
) -> ArmknechtKey:
    """Sample ``(x, y, I)``; ``L`` only has to fit within the code length."""
    if mu < 1:
        raise ValueError("mu must be >= 1")
    if kC < 1:
        raise ValueError("kC must be >= 1")
    F = GF(q)
    if q <= n:
        raise ValueError(f"need q > n for n distinct points plus y (q={q}, n={n})")
    size = clean_set_size(mu, kC)
    if size > n:
        raise ValueError(f"|I| = {size} exceeds n = {n}")
    if L > n:
        raise ValueError(f"codeword length n = {n} is below the expected encryption count L = {L}")
    if error_budget is None:
        error_budget = n - size
    if not 0 <= error_budget <= n - size:
        raise ValueError(f"error budget must lie in [0, {n - size}]")
    pts = rng.choice(F.order, size=n + 1, replace=False)
    x, y = pts[:n].astype(np.int64), int(pts[n])
    I = np.sort(rng.choice(n, size=size, replace=False))
    return ArmknechtKey(EvalCodePair(x, y, kC, mu, I, F), error_budget, s)


def _evaluate_all(F: Field, p, pts) -> np.ndarray:
    acc = np.zeros(len(pts), dtype=np.int64)
    for coef in reversed(p):
        acc = F.add(F.mul(acc, pts), coef)
    return acc


def random_encoding(key: ArmknechtKey, m: int, rng: np.random.Generator) -> list:
    """Uniform polynomial of degree < kC with p(y) = m."""
    F, pair = key.field, key.pair
    h = [int(v) for v in F.random(pair.kC - 1, rng)]
    # p(z) = m + (z - y) h(z)
    p = poly.add(F, [int(m) % F.order], poly.mul(F, [F.sneg(pair.y), 1], poly.trim(h)))
    return p


def ec_encrypt(m: int, key: ArmknechtKey, rng: np.random.Generator) -> EcCiphertext:
    F, pair = key.field, key.pair
    p = random_encoding(key, m, rng)
    c = _evaluate_all(F, p, pair.x)
    if key.error_budget:
        outside = np.setdiff1d(np.arange(pair.n), pair.I)
        where = rng.choice(outside, size=key.error_budget, replace=False)
        c[where] = F.add(c[where], F.random(key.error_budget, rng))
    return EcCiphertext(c, 1, pair.mu, F)


def _check_budget(gamma: int, mu: int):
    if gamma > mu:
        raise BudgetExceededError(f"multiplication budget exceeded (gamma={gamma} > mu={mu})")


def clean_polynomial(ct: EcCiphertext, key: ArmknechtKey) -> list:
    """Interpolating polynomial through the clean coordinates of ``ct``."""
    F, pair = key.field, key.pair
    return poly.interpolate(F, pair.x[pair.I].tolist(), ct.c[pair.I].tolist())


def ec_decrypt(ct: EcCiphertext, key: ArmknechtKey) -> int:
    _check_budget(ct.gamma, key.mu)
    F, pair = key.field, key.pair
    p = clean_polynomial(ct, key)
    if poly.degree(p) > ct.gamma * (pair.kC - 1):
        raise ValueError("clean coordinates do not lie on a codeword of C^gamma")
    return poly.evaluate(F, p, pair.y)


def _pair_check(ct1: EcCiphertext, ct2: EcCiphertext):
    if ct1.c.shape != ct2.c.shape:
        raise ValueError(f"length mismatch: {ct1.c.shape[0]} vs {ct2.c.shape[0]}")
    if ct1.field is not ct2.field or ct1.mu != ct2.mu:
        raise ValueError("ciphertexts come from different keys")


def ec_add(ct1: EcCiphertext, ct2: EcCiphertext) -> EcCiphertext:
    _pair_check(ct1, ct2)
    return EcCiphertext(ct1.field.add(ct1.c, ct2.c), max(ct1.gamma, ct2.gamma), ct1.mu, ct1.field)


def ec_mult(ct1: EcCiphertext, ct2: EcCiphertext) -> EcCiphertext:
    _pair_check(ct1, ct2)
    _check_budget(ct1.gamma + ct2.gamma, ct1.mu)
    return EcCiphertext(ct1.field.mul(ct1.c, ct2.c), ct1.gamma + ct2.gamma, ct1.mu, ct1.field)


def ec_scale(ct: EcCiphertext, a: int) -> EcCiphertext:
    return EcCiphertext(ct.field.mul(ct.c, int(a) % ct.field.order), ct.gamma, ct.mu, ct.field)


def ec_constant(a: int, like: EcCiphertext) -> EcCiphertext:
    """``a`` times the all-ones codeword: a noiseless encryption of ``a``."""
    c = np.full(like.c.shape, int(a) % like.field.order, dtype=np.int64)
    return EcCiphertext(c, 1, like.mu, like.field)


def ec_eval_poly(polynomial: Mapping[Sequence[int], int], cts: Sequence[EcCiphertext]) -> EcCiphertext:
    """Evaluate ``{exponents: coefficient}`` on ciphertexts.

    ``{(1, 1, 0): 1, (0, 0, 1): 1}`` is ``x1*x2 + x3``; the empty-degree key
    ``(0, 0, 0)`` is the constant term.
    """
    if not cts:
        raise ValueError("need at least one ciphertext")
    mu = cts[0].mu
    result: Optional[EcCiphertext] = None
    for exps, coef in polynomial.items():
        exps = tuple(int(e) for e in exps)
        if len(exps) != len(cts):
            raise ValueError(f"monomial {exps} has {len(exps)} exponents for {len(cts)} ciphertexts")
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be non-negative")
        degree = sum(e * ct.gamma for e, ct in zip(exps, cts))
        _check_budget(degree, mu)
        term: Optional[EcCiphertext] = None
        for e, ct in zip(exps, cts):
            for _ in range(e):
                term = ct if term is None else ec_mult(term, ct)
        term = ec_constant(coef, cts[0]) if term is None else ec_scale(term, coef)
        result = term if result is None else ec_add(result, term)
    if result is None:
        return ec_constant(0, cts[0])
    return result
