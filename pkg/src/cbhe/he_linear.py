"""Bogdanov-Lee linearly homomorphic encryption over a prime field.

The secret is a planted set ``S'`` of rows of ``M`` that only use the first
``s/3`` powers of their evaluation point.  A vector ``y`` supported on ``S'``
kills every column of ``M`` (so every column of ``P = M R``) and sums to one,
which makes ``<y, P x + m 1 + e> = m + <y, e>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from cbhe.algebra import GF, Field, determinant, matmul, solve_linear

KEYGEN_RETRIES = 100


@dataclass(frozen=True)
class BlParams:
    q: int = 31
    n: int = 12
    r: int = 5
    s: int = 6
    rho: float = 0.05  # per-coordinate probability that the noise is nonzero

    def __post_init__(self):
        if self.s > self.n:
            raise ValueError("need s <= n")
        if self.s % 3 or self.s <= 0:
            raise ValueError("s must be a positive multiple of 3")
        if self.r < self.s // 3 + 1:
            raise ValueError("need r >= s/3 + 1")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        F = GF(self.q)  # raises for non-prime q
        if F.m != 1:
            raise ValueError("q must be prime")
        if self.q <= self.n:
            raise ValueError(f"need q > n for distinct evaluation points (q={self.q}, n={self.n})")

    @property
    def field(self) -> Field:
        return GF(self.q)


@dataclass(frozen=True, eq=False)
class BlPublicKey:
    params: BlParams
    P: np.ndarray


@dataclass(frozen=True, eq=False)
class BlSecretKey:
    params: BlParams
    S: np.ndarray  # sorted planted index set
    M: np.ndarray
    R: np.ndarray
    y: np.ndarray
    points: np.ndarray


@dataclass(frozen=True, eq=False)
class BlKeyPair:
    public: BlPublicKey
    secret: BlSecretKey


@dataclass(frozen=True, eq=False)
class BlCiphertext:
    c: np.ndarray
    params: BlParams = field(default_factory=BlParams)


def _unimodular(F: Field, r: int, rng) -> np.ndarray:
    """Product of 3r random elementary (row-addition) matrices: determinant one."""
    R = np.eye(r, dtype=np.int64)
    for _ in range(3 * r):
        i, j = rng.choice(r, size=2, replace=False)
        c = int(rng.integers(1, F.order))
        R[i] = F.add(R[i], F.mul(c, R[j]))
    return R


def _build_M(F: Field, points, S, r: int, s: int) -> np.ndarray:
    n = len(points)
    M = np.zeros((n, r), dtype=np.int64)
    for i, a in enumerate(points):
        width = s // 3 if i in S else r
        for j in range(width):
            M[i, j] = F.spow(int(a), j + 1)
    return M


def decrypt_vector(F: Field, M, S, s: int) -> Optional[np.ndarray]:
    """Solve sum_{i in S} y_i M_i = 0, sum y_i = 1 with free variables zero."""
    S = np.asarray(S)
    A = np.vstack([M[S, : s // 3].T, np.ones((1, len(S)), dtype=np.int64)])
    b = np.zeros(A.shape[0], dtype=np.int64)
    b[-1] = 1
    sol = solve_linear(F, A, b)
    if sol is None:
        return None
    y = np.zeros(M.shape[0], dtype=np.int64)
    y[S] = sol
    return y


def bl_keygen(params: BlParams, rng: np.random.Generator) -> BlKeyPair:
    F = params.field
    for _ in range(KEYGEN_RETRIES):
        points = 1 + rng.choice(F.order - 1, size=params.n, replace=False)
        S = np.sort(rng.choice(params.n, size=params.s, replace=False))
        M = _build_M(F, points, set(S.tolist()), params.r, params.s)
        y = decrypt_vector(F, M, S, params.s)
        if y is not None:
            break
    else:
        raise ValueError(f"no solvable decryption system after {KEYGEN_RETRIES} attempts")
    R = _unimodular(F, params.r, rng)
    assert determinant(F, R) == 1
    P = matmul(F, M, R)
    return BlKeyPair(BlPublicKey(params, P), BlSecretKey(params, S, M, R, y, points))


def sample_noise(params: BlParams, rng: np.random.Generator) -> np.ndarray:
    """Each coordinate nonzero with probability rho, uniform over the nonzero elements."""
    mask = rng.random(params.n) < params.rho
    vals = rng.integers(1, params.q, size=params.n)
    return np.where(mask, vals, 0).astype(np.int64)


def bl_encrypt(pk: BlPublicKey, m: int, rng: Optional[np.random.Generator] = None, *, x=None, e=None) -> BlCiphertext:
    params = pk.params
    F = params.field
    if x is None:
        x = F.random(params.r, rng)
    if e is None:
        e = sample_noise(params, rng)
    m = int(m) % params.q
    c = F.add(F.add(matmul(F, pk.P, np.asarray(x, dtype=np.int64)), m), np.asarray(e, dtype=np.int64))
    return BlCiphertext(c, params)


def bl_decrypt(sk: BlSecretKey, ct) -> int:
    c = ct.c if isinstance(ct, BlCiphertext) else np.asarray(ct, dtype=np.int64)
    return int(matmul(sk.params.field, sk.y, c))


def bl_add(ct1: BlCiphertext, ct2: BlCiphertext) -> BlCiphertext:
    if ct1.c.shape != ct2.c.shape:
        raise ValueError(f"length mismatch: {ct1.c.shape[0]} vs {ct2.c.shape[0]}")
    if ct1.params != ct2.params:
        raise ValueError("ciphertexts belong to different parameter sets")
    return BlCiphertext(ct1.params.field.add(ct1.c, ct2.c), ct1.params)
