"""Rank-metric additively (and once-multiplicatively) homomorphic encryption.

Everything lives in GF(q^m)^n.  The secret key fixes a basis
``b = (f_1..f_w, g_1..g_{m-w})`` of GF(q^m) over GF(q) and a secret vector
``s`` whose coordinates lie in ``F = span(f)``.  A ciphertext is
``(u, s*u + e + g_1*m)`` with ``e`` drawn from ``F``; the dual-basis vector
``D(1)`` annihilates ``F`` and reads off the ``g_1`` coefficient.

Decrypting a product needs more: ``D(2)`` must kill the cross terms ``f_i f_j``
and ``f_i g_1`` and read ``g_1^2`` with coefficient one.  Product-valid keys are
built so that ``g_2 = g_1^2`` and those cross terms lie in the span of the other
basis vectors; keygen rejects samples where that is impossible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from cbhe.algebra import GF, Field, ext_expand, inverse, matmul, rank

KEYGEN_RETRIES = 2000


@dataclass(frozen=True)
class RankParams:
    q: int = 2
    m: int = 6
    n: int = 8
    w: int = 2

    def __post_init__(self):
        if not 1 <= self.w < self.m:
            raise ValueError(f"need 1 <= w < m (w={self.w}, m={self.m})")
        if self.n < 1:
            raise ValueError("need n >= 1")
        base = GF(self.q)
        if base.m != 1:
            raise ValueError("q must be prime")

    @property
    def field(self) -> Field:
        return GF(self.q, self.m)


@dataclass(frozen=True, eq=False)
class RankSecretKey:
    params: RankParams
    field: Field
    f: np.ndarray
    g: np.ndarray
    D: np.ndarray  # m x (m - w), dual vectors of g_1..g_{m-w}
    s: np.ndarray
    product_valid: bool

    @property
    def basis(self) -> np.ndarray:
        return np.concatenate([self.f, self.g])

    def d(self, j: int) -> np.ndarray:
        """Column ``D(j)`` (1-based)."""
        return self.D[:, j - 1]


@dataclass(frozen=True, eq=False)
class RankCiphertext:
    u: np.ndarray
    v: np.ndarray
    field: Field


@dataclass(frozen=True, eq=False)
class RankMulCiphertext:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    field: Field


@dataclass(frozen=True, eq=False)
class KeySwitchMaterial:
    sk2: RankSecretKey
    ksk: tuple
    projk: tuple


def dual_extract(F: Field, d, x) -> np.ndarray:
    """``d^T Mat(x)``: apply the base-field functional ``d`` to every coordinate."""
    return matmul(F.base, np.asarray(d, dtype=np.int64), ext_expand(F, x))


def _span_rank(F: Field, elems) -> int:
    elems = np.asarray(elems, dtype=np.int64).ravel()
    if elems.size == 0:
        return 0
    return rank(F.base, ext_expand(F, elems))


def _extend_to_basis(F: Field, start, candidates) -> list:
    """Greedily append candidates that raise the GF(q)-rank until it is m."""
    basis = list(int(v) for v in start)
    r = _span_rank(F, basis)
    for c in candidates:
        if r == F.m:
            break
        c = int(c)
        if _span_rank(F, basis + [c]) > r:
            basis.append(c)
            r += 1
    return basis


def _random_candidates(F: Field, rng):
    while True:
        yield int(F.random((), rng))


def _sample_independent(F: Field, w: int, rng) -> np.ndarray:
    for _ in range(KEYGEN_RETRIES):
        f = F.random(w, rng)
        if _span_rank(F, f) == w:
            return f
    raise ValueError("could not sample independent elements")


def _product_valid_basis(F: Field, params: RankParams, rng):
    """Try once: return the full basis with g_2 = g_1^2, or None."""
    w = params.w
    if params.m - w < 2:
        return None
    f = _sample_independent(F, w, rng)
    g1 = int(F.random_nonzero((), rng))
    gens = [int(x) for x in f] + [g1]
    gens += [F.smul(int(a), int(b)) for i, a in enumerate(f) for b in f[i:]]
    gens += [F.smul(int(a), g1) for a in f]
    rU = _span_rank(F, gens)
    if _span_rank(F, list(f) + [g1]) != w + 1 or rU > F.m - 1:
        return None
    g2 = F.smul(g1, g1)
    if _span_rank(F, gens + [g2]) == rU:
        return None
    head = [int(x) for x in f] + [g1, g2]
    basis = _extend_to_basis(F, head, gens[w + 1 :])
    basis = _extend_to_basis(F, basis, _random_candidates(F, rng))
    return np.array(basis, dtype=np.int64)


def _plain_basis(F: Field, params: RankParams, rng):
    f = _sample_independent(F, params.w, rng)
    return np.array(_extend_to_basis(F, f, _random_candidates(F, rng)), dtype=np.int64)


def check_product_validity(sk: RankSecretKey) -> bool:
    """Numerically confirm that ``D(2)`` kills f*f and f*g_1 and extracts g_1^2."""
    F = sk.field
    if sk.D.shape[1] < 2:
        return False
    d2 = sk.d(2)
    g1 = int(sk.g[0])
    cross = [F.smul(int(a), int(b)) for a in sk.f for b in sk.f]
    cross += [F.smul(int(a), g1) for a in sk.f]
    if np.any(dual_extract(F, d2, cross)):
        return False
    return int(dual_extract(F, d2, [F.smul(g1, g1)])[0]) == 1


def rk_keygen(params: RankParams, rng: np.random.Generator, product_valid: bool = True) -> RankSecretKey:
    F = params.field
    for _ in range(KEYGEN_RETRIES):
        basis = _product_valid_basis(F, params, rng) if product_valid else _plain_basis(F, params, rng)
        if basis is not None:
            break
    else:
        raise ValueError(f"no product-valid key found for {params} after {KEYGEN_RETRIES} attempts")
    w = params.w
    f, g = basis[:w], basis[w:]
    B = ext_expand(F, basis)
    D = inverse(F.base, B).T[:, w:].copy()
    coeffs = F.base.random((params.n, w), rng)
    s = _combine(F, f, coeffs.T)
    sk = RankSecretKey(params, F, f, g, D, s, product_valid)
    if product_valid and not check_product_validity(sk):
        raise AssertionError("product-valid construction failed its own check")
    return sk


def _combine(F: Field, elems, R) -> np.ndarray:
    """``elems @ R``: rows of the base-field matrix ``R`` weight the ``elems``."""
    R = np.asarray(R, dtype=np.int64)
    out = np.zeros(R.shape[1], dtype=np.int64)
    for e, row in zip(elems, R):
        out = F.add(out, F.mul(int(e), row))
    return out


def rk_encrypt(sk: RankSecretKey, m, rng: Optional[np.random.Generator] = None, *, r1=None, R2=None) -> RankCiphertext:
    F, params = sk.field, sk.params
    m = np.asarray(m, dtype=np.int64)
    if m.shape != (params.n,):
        raise ValueError(f"message must have length n = {params.n}")
    if np.any((m < 0) | (m >= params.q)):
        raise ValueError("message coordinates must lie in the base field")
    u = F.random(params.n, rng) if r1 is None else np.asarray(r1, dtype=np.int64)
    if R2 is None:
        R2 = F.base.random((params.w, params.n), rng)
    e = _combine(F, sk.f, R2)
    mhat = F.mul(int(sk.g[0]), m)
    v = F.add(F.add(F.mul(sk.s, u), e), mhat)
    return RankCiphertext(u, v, F)


def rk_decrypt(sk: RankSecretKey, ct: RankCiphertext) -> np.ndarray:
    F = sk.field
    return dual_extract(F, sk.d(1), F.sub(ct.v, F.mul(sk.s, ct.u)))


def _same_shape(*vecs):
    shapes = {np.shape(v) for v in vecs}
    if len(shapes) != 1:
        raise ValueError(f"shape mismatch: {sorted(shapes)}")


def rk_add(ct1: RankCiphertext, ct2: RankCiphertext) -> RankCiphertext:
    _same_shape(ct1.u, ct2.u, ct1.v, ct2.v)
    F = ct1.field
    return RankCiphertext(F.add(ct1.u, ct2.u), F.add(ct1.v, ct2.v), F)


def rk_scale(ct: RankCiphertext, a) -> RankCiphertext:
    """Coordinate-wise product with a base-field vector (or scalar)."""
    F = ct.field
    a = np.asarray(a, dtype=np.int64)
    return RankCiphertext(F.mul(ct.u, a), F.mul(ct.v, a), F)


def rk_mul(ct1: RankCiphertext, ct2: RankCiphertext) -> RankMulCiphertext:
    _same_shape(ct1.u, ct2.u, ct1.v, ct2.v)
    F = ct1.field
    a = F.mul(ct1.v, ct2.v)
    b = F.neg(F.add(F.mul(ct1.u, ct2.v), F.mul(ct2.u, ct1.v)))
    c = F.mul(ct1.u, ct2.u)
    return RankMulCiphertext(a, b, c, F)


def rk_mul_add(x: RankMulCiphertext, y: RankMulCiphertext) -> RankMulCiphertext:
    _same_shape(x.a, y.a)
    F = x.field
    return RankMulCiphertext(F.add(x.a, y.a), F.add(x.b, y.b), F.add(x.c, y.c), F)


def rk_decrypt_mul(sk: RankSecretKey, mct: RankMulCiphertext) -> np.ndarray:
    if not sk.product_valid:
        raise ValueError("key was not generated product-valid; products cannot be decrypted")
    F = sk.field
    s = sk.s
    total = F.add(F.add(mct.a, F.mul(s, mct.b)), F.mul(F.mul(s, s), mct.c))
    return dual_extract(F, sk.d(2), total)


def digit_rows(F: Field, x) -> np.ndarray:
    """Base-field rows ``x_i`` with ``x = sum_i X^(i-1) * x_i``."""
    return ext_expand(F, x)


def rk_keyswitch_keygen(sk1: RankSecretKey, params: Optional[RankParams], rng: np.random.Generator) -> KeySwitchMaterial:
    params = params or sk1.params
    sk2 = rk_keygen(params, rng, product_valid=sk1.product_valid)
    F = sk1.field
    d = sk1.d(1)
    ksk, projk = [], []
    for i in range(F.m):
        gamma_i = F.p**i  # X^i: a single digit 1 in position i
        s1_i = dual_extract(F, d, F.mul(gamma_i, sk1.s))
        p_i = np.full(params.n, int(d[i]), dtype=np.int64)
        ksk.append(rk_encrypt(sk2, s1_i, rng))
        projk.append(rk_encrypt(sk2, p_i, rng))
    return KeySwitchMaterial(sk2, tuple(ksk), tuple(projk))


def rk_homomorphic_decrypt(ct: RankCiphertext, ksm: KeySwitchMaterial) -> RankCiphertext:
    F = ct.field
    if len(ksm.ksk) != F.m or len(ksm.projk) != F.m:
        raise ValueError(f"key-switching material must hold {F.m} entries each")
    U, V = digit_rows(F, ct.u), digit_rows(F, ct.v)
    zero = np.zeros_like(ct.u)
    acc = RankCiphertext(zero, zero, F)
    for i in range(F.m):
        acc = rk_add(acc, rk_scale(ksm.projk[i], V[i]))
        acc = rk_add(acc, rk_scale(ksm.ksk[i], F.base.neg(U[i])))
    return acc
