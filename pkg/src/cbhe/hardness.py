"""Exhaustive solvers for the hard problems behind code-based schemes.

These are certified-complete search routines for tiny instances, used as test
oracles for the decoders and as teaching aids, plus a plain Prange
work-factor estimate for real parameter sizes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from cbhe.algebra import GF, Field, ext_expand, kernel_basis, matmul, rank, solve_linear
from cbhe.codes import count_errors, iter_error_patterns, rank_weight

SEARCH_LIMIT = 10**7
MINRANK_LIMIT = 10**6
PEP_MAX_N = 8
_CACHE_LIMIT = 1 << 20


class SearchTooLargeError(ValueError):
    """The requested exhaustive search exceeds its size guard."""


@dataclass(frozen=True, eq=False)
class SdpInstance:
    field: Field
    H: np.ndarray
    s: np.ndarray
    t: int

    def __post_init__(self):
        H = np.array(self.H, dtype=np.int64, ndmin=2)
        s = np.asarray(self.s, dtype=np.int64).ravel()
        if s.shape[0] != H.shape[0]:
            raise ValueError(f"syndrome length {s.shape[0]} != number of parity checks {H.shape[0]}")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return self.H.shape[1]


@dataclass(frozen=True, eq=False)
class PepInstance:
    field: Field
    G: np.ndarray
    Gp: np.ndarray

    def __post_init__(self):
        if np.shape(self.G) != np.shape(self.Gp):
            raise ValueError("G and G' must have equal shapes")


@dataclass(frozen=True, eq=False)
class MinRankInstance:
    field: Field
    Gs: tuple
    R: np.ndarray
    t: int

    def __post_init__(self):
        shapes = {np.shape(M) for M in self.Gs} | {np.shape(self.R)}
        if len(shapes) != 1:
            raise ValueError(f"all matrices must share one shape, got {sorted(shapes)}")


# ---------------------------------------------------------------------------
# Hamming-metric problems
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _all_patterns(q: int, n: int, t: int) -> np.ndarray:
    F = GF(q)
    rows = [b for w in range(t + 1) for b in iter_error_patterns(F, n, w)]
    out = np.vstack(rows)
    out.setflags(write=False)
    return out


def _pattern_batches(F: Field, n: int, t: int, exact: bool = False):
    lo = t if exact else 0
    if count_errors(F.order, n, t) <= _CACHE_LIMIT and F.m == 1 and not exact:
        yield _all_patterns(F.order, n, t)
        return
    for w in range(lo, t + 1):
        yield from iter_error_patterns(F, n, w)


def _guard(F: Field, n: int, t: int):
    total = count_errors(F.order, n, t)
    if total > SEARCH_LIMIT:
        raise SearchTooLargeError(f"{total} candidate vectors exceed the limit {SEARCH_LIMIT}")


def sdp_bruteforce(inst: SdpInstance) -> list[np.ndarray]:
    """Every ``e`` with ``e H^T = s`` and ``wt(e) <= t``, sorted lexicographically."""
    F, n = inst.field, inst.n
    _guard(F, n, inst.t)
    found = []
    for batch in _pattern_batches(F, n, inst.t):
        S = matmul(F, batch, inst.H.T)
        hits = np.flatnonzero(np.all(S == inst.s, axis=1))
        found.extend(batch[i].copy() for i in hits)
    found.sort(key=lambda e: tuple(e.tolist()))
    return found


def dp_to_sdp(F: Field, G, r, t: int) -> SdpInstance:
    """Recast decoding ``r`` in the code spanned by ``G`` as a syndrome problem.

    The parity check is read off the systematic form of ``G``; solutions of the
    returned instance are exactly the error vectors ``r - mG`` of weight <= t.
    """
    G = np.array(G, dtype=np.int64, ndmin=2)
    if rank(F, G) != G.shape[0]:
        raise ValueError("generator matrix is rank deficient")
    H = kernel_basis(F, G)
    r = np.asarray(r, dtype=np.int64)
    return SdpInstance(F, H, matmul(F, H, r), t)


def dp_bruteforce(F: Field, G, r, t: int) -> list[np.ndarray]:
    """All ``m`` with ``wt(r - mG) <= t``, by enumerating every message."""
    G = np.array(G, dtype=np.int64, ndmin=2)
    k = G.shape[0]
    q = F.order
    if q**k > SEARCH_LIMIT:
        raise SearchTooLargeError(f"q^k = {q**k} exceeds the limit {SEARCH_LIMIT}")
    msgs = np.array(list(itertools.product(range(q), repeat=k)), dtype=np.int64).reshape(-1, k)
    errs = F.sub(np.asarray(r, dtype=np.int64)[None, :], matmul(F, msgs, G))
    ok = np.count_nonzero(errs, axis=1) <= t
    return [m.copy() for m in msgs[ok]]


def gwcp_bruteforce(F: Field, H, w: int) -> tuple[bool, Optional[np.ndarray]]:
    """Is there a codeword of weight exactly ``w``?  Returns ``(answer, witness)``."""
    H = np.array(H, dtype=np.int64, ndmin=2)
    n = H.shape[1]
    if not 0 <= w <= n:
        return False, None
    _guard(F, n, w)
    for batch in _pattern_batches(F, n, w, exact=True):
        hits = np.flatnonzero(~np.any(matmul(F, batch, H.T), axis=1))
        if hits.size:
            return True, batch[hits[0]].copy()
    return False, None


def pep_bruteforce(inst: PepInstance) -> Optional[np.ndarray]:
    """A permutation ``perm`` with ``<G[:, perm]> = <G'>``, or None.

    Column ``j`` of the permuted matrix is column ``perm[j]`` of ``G``.
    """
    F = inst.field
    G = np.array(inst.G, dtype=np.int64, ndmin=2)
    Gp = np.array(inst.Gp, dtype=np.int64, ndmin=2)
    k, n = G.shape
    if n > PEP_MAX_N:
        raise SearchTooLargeError(f"n = {n} exceeds the permutation search bound {PEP_MAX_N}")
    if rank(F, G) != rank(F, Gp):
        return None
    Hp = kernel_basis(F, Gp)
    if Hp.shape[0] == 0:
        return np.arange(n)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    for start in range(0, len(perms), 4096):
        chunk = perms[start : start + 4096]
        Gperm = G[:, chunk]  # (k, P, n)
        if F.m == 1:
            prod = np.einsum("kpn,bn->pkb", Gperm, Hp) % F.p
        else:
            prod = np.stack([matmul(F, G[:, p], Hp.T) for p in chunk])
        ok = np.flatnonzero(~np.any(prod, axis=(1, 2)))
        if ok.size:
            return chunk[ok[0]].copy()
    return None


def same_row_space(F: Field, A, B) -> bool:
    A = np.array(A, dtype=np.int64, ndmin=2)
    B = np.array(B, dtype=np.int64, ndmin=2)
    ra = rank(F, A)
    return ra == rank(F, B) == rank(F, np.vstack([A, B]))


# ---------------------------------------------------------------------------
# Rank-metric problems
# ---------------------------------------------------------------------------


def minrank_bruteforce(inst: MinRankInstance) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """``(lambda, E)`` with ``R = sum lambda_i G_i + E`` and ``rank(E) <= t``, or None."""
    F = inst.field
    k = len(inst.Gs)
    if F.order**k > MINRANK_LIMIT:
        raise SearchTooLargeError(f"q^k = {F.order**k} exceeds the limit {MINRANK_LIMIT}")
    Gs = np.array(inst.Gs, dtype=np.int64)
    R = np.asarray(inst.R, dtype=np.int64)
    for lam in itertools.product(range(F.order), repeat=k):
        lam = np.array(lam, dtype=np.int64)
        combo = np.zeros_like(R)
        for c, Gi in zip(lam, Gs):
            if c:
                combo = F.add(combo, F.mul(int(c), Gi))
        E = F.sub(R, combo)
        if rank(F, E) <= inst.t:
            return lam, E
    return None


def gaussian_binomial(m: int, t: int, q: int) -> int:
    """Number of t-dimensional subspaces of GF(q)^m."""
    if not 0 <= t <= m:
        return 0
    num = den = 1
    for i in range(t):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _rref_subspaces(q: int, m: int, t: int):
    """Yield a t x m RREF basis matrix for every t-dimensional subspace of GF(q)^m."""
    for pivots in itertools.combinations(range(m), t):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, m) if j not in pivots]
        for vals in itertools.product(range(q), repeat=len(free)):
            B = np.zeros((t, m), dtype=np.int64)
            for i, p in enumerate(pivots):
                B[i, p] = 1
            for (i, j), v in zip(free, vals):
                B[i, j] = v
            yield B


def rank_sdp_bruteforce(F: Field, H, s, t: int) -> Optional[np.ndarray]:
    """Some ``e`` over GF(q^m) with ``e H^T = s`` and rank weight <= t, or None.

    Each candidate support (a t-dimensional subspace of GF(q)^m) turns the
    problem into a linear system over GF(q) for the coordinates of ``e``.
    """
    H = np.array(H, dtype=np.int64, ndmin=2)
    s = np.asarray(s, dtype=np.int64).ravel()
    r, n = H.shape
    q, m = F.p, F.m
    if s.shape[0] != r:
        raise ValueError("syndrome length does not match H")
    t = min(int(t), m)
    if t <= 0:
        return np.zeros(n, dtype=np.int64) if not np.any(s) else None
    work = gaussian_binomial(m, t, q) * q ** (t * n)
    if work > SEARCH_LIMIT:
        raise SearchTooLargeError(f"{work} candidate (support, coordinate) pairs exceed the limit {SEARCH_LIMIT}")
    target = ext_expand(F, s).T.ravel()  # r*m digits, syndrome-major
    base = F.base
    for B in _rref_subspaces(q, m, t):
        betas = F.from_digits(B)
        # unknown (j, l): coefficient of betas[l] in e_j
        cols = []
        for j in range(n):
            for l in range(t):
                contrib = F.mul(int(betas[l]), H[:, j])
                cols.append(ext_expand(F, contrib).T.ravel())
        A = np.array(cols, dtype=np.int64).T
        sol = solve_linear(base, A, target)
        if sol is None:
            continue
        coeffs = sol.reshape(n, t)
        e = np.zeros(n, dtype=np.int64)
        for l in range(t):
            e = F.add(e, F.mul(int(betas[l]), coeffs[:, l]))
        assert rank_weight(F, e) <= t
        return e
    return None


# ---------------------------------------------------------------------------
# Work factor
# ---------------------------------------------------------------------------


def prange_iterations(n: int, k: int, t: int) -> Fraction:
    """Expected number of information sets drawn before one avoids all t errors."""
    if not (0 <= k <= n and 0 <= t <= n - k):
        raise ValueError(f"need 0 <= k <= n and 0 <= t <= n - k (n={n}, k={k}, t={t})")
    return Fraction(math.comb(n, t), math.comb(n - k, t))


def prange_workfactor(n: int, k: int, t: int, q: int = 2) -> tuple[float, float]:
    """``(expected iterations, log2 of iterations * (n-k)^3)``."""
    if q < 2:
        raise ValueError("q must be at least 2")
    it = prange_iterations(n, k, t)
    per_iter = max(n - k, 1) ** 3
    return float(it), math.log2(it * per_iter)
