"""Linear codes, weights, and bounded-distance decoders.

Every code is a :class:`LinearCode` with a generator ``G`` (k x n), a
parity check ``H`` ((n-k) x n) and a decoding radius ``t``.  Subclasses
attach algebraic decoders:

* :class:`GoppaCode` - binary Goppa codes, Patterson decoding
* :class:`GRSCode` - generalized Reed-Solomon codes, Berlekamp-Welch for
  received words and Berlekamp-Massey/Forney for syndromes
* :class:`BinaryRSCode` - binary image of an RS code over GF(2^b)
* :class:`RepetitionCode` - plurality vote

The base class decodes any small code with an exhaustive syndrome table.
Syndromes are row vectors ``s = r H^T``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from cbhe import poly
from cbhe.algebra import (
    GF,
    Field,
    ext_expand,
    inverse,
    kernel_basis,
    matmul,
    rank,
    rref,
    solve_linear,
)

TABLE_LIMIT = 1 << 20
ENUMERATION_LIMIT = 1 << 20


class DecodingError(Exception):
    """No codeword within the decoding radius."""


def hamming_weight(v) -> int:
    return int(np.count_nonzero(np.asarray(v)))


def rank_weight(F: Field, v) -> int:
    """Rank of the m x n coordinate matrix of a vector over GF(q^m)."""
    return rank(F.base, ext_expand(F, v))


def star_power(F: Field, c1, c2) -> np.ndarray:
    """Coordinate-wise product of two vectors."""
    c1 = np.asarray(c1, dtype=np.int64)
    c2 = np.asarray(c2, dtype=np.int64)
    if c1.shape != c2.shape:
        raise ValueError(f"length mismatch: {c1.shape} vs {c2.shape}")
    return F.mul(c1, c2)


def iter_error_patterns(F: Field, n: int, w: int) -> Iterator[np.ndarray]:
    """Batches (one per support set) of all vectors of Hamming weight exactly ``w``."""
    if w == 0:
        yield np.zeros((1, n), dtype=np.int64)
        return
    values = np.array(list(itertools.product(range(1, F.order), repeat=w)), dtype=np.int64)
    for support in itertools.combinations(range(n), w):
        batch = np.zeros((len(values), n), dtype=np.int64)
        batch[:, support] = values
        yield batch


def count_errors(q: int, n: int, t: int) -> int:
    return sum(math.comb(n, i) * (q - 1) ** i for i in range(t + 1))


class LinearCode:
    """An [n, k] code over ``field`` with decoding radius ``t``.

    Decoding uses an exhaustive syndrome table; it is only available when
    ``q^(n-k) <= 2^20``.
    """

    decoder = "syndrome_table"

    def __init__(self, field: Field, G, t: int, H=None):
        F = field
        G = np.array(G, dtype=np.int64, ndmin=2)
        k, n = G.shape
        if rank(F, G) != k:
            raise ValueError("generator matrix is not full rank")
        if H is None:
            H = kernel_basis(F, G)
        H = np.array(H, dtype=np.int64, ndmin=2).reshape(-1, n)
        if H.shape[0] != n - k or rank(F, H) != n - k:
            raise ValueError("parity check has the wrong rank")
        if np.any(matmul(F, G, H.T)):
            raise ValueError("G H^T != 0")
        self.field = F
        self.G = G
        self.H = H
        self.n = n
        self.k = k
        self.t = int(t)
        _, piv = rref(F, G)
        self._info = np.array(piv, dtype=np.int64)
        self._info_inv = inverse(F, G[:, piv])
        self._table = None

    def __repr__(self):
        return f"{type(self).__name__}[{self.n}, {self.k}, t={self.t}] over {self.field}"

    def encode(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        if m.shape[-1] != self.k:
            raise ValueError(f"message length {m.shape[-1]} != k = {self.k}")
        return matmul(self.field, m, self.G)

    def syndrome(self, r) -> np.ndarray:
        return matmul(self.field, np.asarray(r, dtype=np.int64), self.H.T)

    def is_codeword(self, r) -> bool:
        return not np.any(self.syndrome(r))

    def message_of(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=np.int64)
        return matmul(self.field, c[..., self._info], self._info_inv)

    # -- decoding -----------------------------------------------------------
    def _syndrome_key(self, S) -> np.ndarray:
        q = self.field.order
        powers = np.array([q**i for i in range(S.shape[-1])], dtype=np.int64)
        return S @ powers

    def _build_table(self):
        q, r = self.field.order, self.n - self.k
        if q**r > TABLE_LIMIT:
            raise DecodingError(f"syndrome table needs q^(n-k) <= 2^20, got {q}^{r}")
        table = {}
        for w in range(self.t, -1, -1):
            for batch in iter_error_patterns(self.field, self.n, w):
                keys = self._syndrome_key(matmul(self.field, batch, self.H.T))
                for key, e in zip(keys.tolist(), batch):
                    table[key] = e
        self._table = table

    def _table_lookup(self, s) -> np.ndarray:
        if self._table is None:
            self._build_table()
        key = int(self._syndrome_key(np.asarray(s, dtype=np.int64)))
        e = self._table.get(key)
        if e is None:
            raise DecodingError("syndrome not within the decoding radius")
        return e.copy()

    def locate_error(self, r) -> np.ndarray:
        """Error vector e with r - e a codeword and wt(e) <= t."""
        return self._table_lookup(self.syndrome(r))

    def syndrome_decode(self, s) -> np.ndarray:
        """Error vector of weight <= t with the given syndrome."""
        s = np.asarray(s, dtype=np.int64)
        if type(self).locate_error is LinearCode.locate_error:
            return self._table_lookup(s)
        r0 = solve_linear(self.field, self.H, s)
        return self.locate_error(r0)

    def _within_radius(self, e) -> bool:
        return hamming_weight(e) <= self.t

    def decode(self, r) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(message, error)``; raises :class:`DecodingError`."""
        r = np.asarray(r, dtype=np.int64)
        if r.shape != (self.n,):
            raise ValueError(f"received word must have length {self.n}")
        e = self.locate_error(r)
        c = self.field.sub(r, e)
        if not self._within_radius(e) or not self.is_codeword(c):
            raise DecodingError("decoder output failed the re-encode check")
        return self.message_of(c), e

    def codewords(self) -> Iterator[np.ndarray]:
        """All codewords in batches; guarded by q^k <= 2^20."""
        q, k = self.field.order, self.k
        if q**k > ENUMERATION_LIMIT:
            raise ValueError(f"q^k = {q}^{k} exceeds the enumeration bound 2^20")
        total = q**k
        powers = np.array([q**i for i in range(k)], dtype=np.int64)
        for start in range(0, total, 1 << 14):
            idx = np.arange(start, min(total, start + (1 << 14)), dtype=np.int64)
            msgs = (idx[:, None] // powers) % q
            yield matmul(self.field, msgs, self.G)

    def min_distance(self) -> int:
        best = self.n + 1
        for batch in self.codewords():
            w = np.count_nonzero(batch, axis=1)
            w = w[w > 0]
            if w.size:
                best = min(best, int(w.min()))
        return best if best <= self.n else 0


def encode(code: LinearCode, m) -> np.ndarray:
    return code.encode(m)


def decode_bounded(code: LinearCode, r) -> tuple[np.ndarray, np.ndarray]:
    return code.decode(r)


def min_distance_bruteforce(code: LinearCode) -> int:
    return code.min_distance()


# ---------------------------------------------------------------------------
# Goppa codes
# ---------------------------------------------------------------------------


class GoppaCode(LinearCode):
    """Binary Goppa code Gamma(L, g) with an irreducible Goppa polynomial."""

    decoder = "patterson"

    def __init__(self, field: Field, support, g):
        F = field
        if F.p != 2:
            raise ValueError("Goppa codes here are binary: field must be GF(2^m)")
        support = np.asarray(support, dtype=np.int64)
        g = poly.trim(g)
        t = poly.degree(g)
        if t < 1:
            raise ValueError("Goppa polynomial must have degree >= 1")
        if len(set(support.tolist())) != len(support):
            raise ValueError("support points must be distinct")
        g_at = np.array([poly.evaluate(F, g, int(a)) for a in support], dtype=np.int64)
        if np.any(g_at == 0):
            raise ValueError("Goppa polynomial vanishes on the support")
        n = len(support)
        scale = F.inv(g_at)
        H_ext = np.array([F.mul(F.power(support, j), scale) for j in range(t)])
        H_bin = np.vstack([ext_expand(F, row) for row in H_ext])
        B = GF(2)
        R, piv = rref(B, H_bin)
        H = R[: len(piv)]
        self.ext_field = F
        self.support = support
        self.goppa_poly = g
        self._inv_polys = [poly.inverse_mod(F, [int(a), 1], g) for a in support]
        if n - len(piv) < 1:
            raise ValueError("parameters leave no room for a message (k < 1)")
        super().__init__(B, kernel_basis(B, H), t, H=H)

    def _sqrt_mod(self, a):
        F, g = self.ext_field, self.goppa_poly
        for _ in range(F.m * self.t - 1):
            a = poly.mulmod(F, a, a, g)
        return a

    def locate_error(self, r) -> np.ndarray:
        F, g, t = self.ext_field, self.goppa_poly, self.t
        r = np.asarray(r, dtype=np.int64)
        S: list = []
        for i in np.flatnonzero(r):
            S = poly.add(F, S, self._inv_polys[i])
        e = np.zeros(self.n, dtype=np.int64)
        if not S:
            return e
        T = poly.inverse_mod(F, S, g)
        tau = self._sqrt_mod(poly.add(F, T, [0, 1]))
        r0, r1 = list(g), tau
        b0, b1 = [], [1]
        while poly.degree(r1) > t // 2:
            q, rem = poly.divmod_(F, r0, r1)
            r0, r1 = r1, rem
            b0, b1 = b1, poly.sub(F, b0, poly.mul(F, q, b1))
        sigma = poly.add(F, poly.mul(F, r1, r1), poly.mul(F, [0, 1], poly.mul(F, b1, b1)))
        acc = np.zeros(self.n, dtype=np.int64)
        for c in reversed(sigma):
            acc = F.add(F.mul(acc, self.support), c)
        e[acc == 0] = 1
        if int(e.sum()) != poly.degree(sigma):
            raise DecodingError("error locator does not split over the support")
        return e


def goppa_keygen(m: int, n: int, t: int, rng: np.random.Generator) -> GoppaCode:
    """Random binary Goppa code of length n with an irreducible degree-t polynomial."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 1 <= n <= 2**m:
        raise ValueError(f"n must satisfy 1 <= n <= 2^m = {2**m}")
    if n - m * t < 1:
        raise ValueError("need n - m*t >= 1")
    F = GF(2, m)
    while True:
        support = rng.choice(F.order, size=n, replace=False).astype(np.int64)
        g = F.random(t, rng).tolist() + [1]
        if not poly.is_irreducible(F, g):
            continue
        if any(poly.evaluate(F, g, int(a)) == 0 for a in support):
            continue
        return GoppaCode(F, support, g)


# ---------------------------------------------------------------------------
# Generalized Reed-Solomon codes
# ---------------------------------------------------------------------------


class GRSCode(LinearCode):
    """GRS code {(v_i f(a_i)) : deg f < k} with radius floor((n-k)/2).

    The parity check is the dual GRS matrix ``H[j, i] = u_i a_i^j`` so that
    syndromes are weighted power sums of the error.
    """

    decoder = "grs"

    def __init__(self, field: Field, points, k: int, multipliers=None):
        F = field
        a = np.asarray(points, dtype=np.int64)
        n = len(a)
        if len(set(a.tolist())) != n:
            raise ValueError("evaluation points must be distinct")
        if not 1 <= k <= n:
            raise ValueError("need 1 <= k <= n")
        v = np.ones(n, dtype=np.int64) if multipliers is None else np.asarray(multipliers, dtype=np.int64)
        if np.any(v == 0):
            raise ValueError("column multipliers must be nonzero")
        G = np.array([F.mul(v, F.power(a, i)) for i in range(k)])
        u = np.empty(n, dtype=np.int64)
        for i in range(n):
            d = int(v[i])
            for l in range(n):
                if l != i:
                    d = F.smul(d, F.ssub(int(a[i]), int(a[l])))
            u[i] = F.sinv(d)
        H = np.array([F.mul(u, F.power(a, j)) for j in range(n - k)]).reshape(n - k, n)
        self.points = a
        self.multipliers = v
        self.dual_multipliers = u
        super().__init__(F, G, (n - k) // 2, H=H)

    def locate_error(self, r) -> np.ndarray:
        """Berlekamp-Welch rational interpolation."""
        F, n, k, t = self.field, self.n, self.k, self.t
        r = np.asarray(r, dtype=np.int64)
        y = F.div(r, self.multipliers)
        a = self.points
        cols = [F.power(a, j) for j in range(k + t)]
        cols += [F.neg(F.mul(y, F.power(a, j))) for j in range(t)]
        A = np.stack(cols, axis=1)
        rhs = F.mul(y, F.power(a, t))
        x = solve_linear(F, A, rhs)
        if x is None:
            raise DecodingError("Berlekamp-Welch system is inconsistent")
        Q = poly.trim(x[: k + t])
        E = poly.trim(list(x[k + t :]) + [1])
        f, rem = poly.divmod_(F, Q, E)
        if rem or poly.degree(f) >= k:
            raise DecodingError("error locator does not divide the interpolant")
        fa = np.zeros(n, dtype=np.int64)
        for c in reversed(f):
            fa = F.add(F.mul(fa, a), c)
        return F.sub(r, F.mul(self.multipliers, fa))

    def syndrome_decode(self, s) -> np.ndarray:
        """Berlekamp-Massey on the power-sum syndrome, Chien search, Forney."""
        F, t = self.field, self.t
        if np.any(self.points == 0):
            return super().syndrome_decode(s)
        s = [int(x) for x in np.asarray(s).ravel()]
        e = np.zeros(self.n, dtype=np.int64)
        if not any(s):
            return e
        S = s[: 2 * t]
        C, B = [1], [1]
        L, shift, b = 0, 1, 1
        for i in range(len(S)):
            d = S[i]
            for j in range(1, L + 1):
                if j < len(C):
                    d = F.sadd(d, F.smul(C[j], S[i - j]))
            if d == 0:
                shift += 1
                continue
            coef = F.smul(d, F.sinv(b))
            upd = poly.sub(F, C, [0] * shift + poly.scale(F, B, coef))
            if 2 * L <= i:
                B, L, b, shift = C, i + 1 - L, d, 1
            else:
                shift += 1
            C = upd
        if L > t or poly.degree(C) != L:
            raise DecodingError("syndrome is not within the decoding radius")
        omega = poly.trim(poly.mul(F, S, C)[: 2 * t])
        deriv = poly.trim([F.smul(C[i], i % F.p) for i in range(1, len(C))])
        found = 0
        for i, (X, u) in enumerate(zip(self.points.tolist(), self.dual_multipliers.tolist())):
            Xinv = F.sinv(X)
            if poly.evaluate(F, C, Xinv) != 0:
                continue
            den = poly.evaluate(F, deriv, Xinv)
            if den == 0:
                raise DecodingError("repeated root in error locator")
            Y = F.sneg(F.smul(X, F.smul(poly.evaluate(F, omega, Xinv), F.sinv(den))))
            e[i] = F.smul(Y, F.sinv(u))
            found += 1
        if found != L:
            raise DecodingError("error locator does not split over the points")
        if list(self.syndrome(e)) != s:
            raise DecodingError("syndrome mismatch after correction")
        return e


class BinaryRSCode(LinearCode):
    """Binary image of RS[N, K] over GF(2^b), symbols laid out low bit first."""

    decoder = "rs_binary"

    def __init__(self, b: int, N: int, K: int):
        Fe = GF(2, b)
        if N > Fe.order:
            raise ValueError(f"RS length {N} exceeds field size {Fe.order}")
        inner = GRSCode(Fe, np.arange(N, dtype=np.int64), K)
        rows = []
        for i in range(K):
            for j in range(b):
                sym = Fe.mul(1 << j, inner.G[i])
                rows.append(Fe.to_digits(sym).reshape(-1))
        self.inner = inner
        self.symbol_bits = b
        super().__init__(GF(2), np.array(rows), inner.t)

    def _within_radius(self, e) -> bool:
        sym = np.asarray(e).reshape(-1, self.symbol_bits).any(axis=1)
        return int(sym.sum()) <= self.t

    def locate_error(self, r) -> np.ndarray:
        Fe, b = self.inner.field, self.symbol_bits
        r = np.asarray(r, dtype=np.int64)
        sym = Fe.from_digits(r.reshape(-1, b))
        e_sym = self.inner.locate_error(sym)
        c_bits = Fe.to_digits(Fe.sub(sym, e_sym)).reshape(-1)
        return r ^ c_bits


class RepetitionCode(LinearCode):
    decoder = "repetition"

    def __init__(self, field: Field, n: int):
        super().__init__(field, np.ones((1, n), dtype=np.int64), (n - 1) // 2)

    def locate_error(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.int64)
        counts = np.bincount(r, minlength=self.field.order)
        winner = int(np.argmax(counts))
        return self.field.sub(r, np.full(self.n, winner, dtype=np.int64))


def hamming_code(r: int, n: Optional[int] = None) -> LinearCode:
    """Binary Hamming code with r check bits, shortened to length n."""
    full = 2**r - 1
    n = full if n is None else n
    if not r <= n <= full:
        raise ValueError(f"shortened length must lie in [{r}, {full}]")
    B = GF(2)
    # unit columns first so H has full rank for every shortening
    cols = [1 << i for i in range(r)] + [c for c in range(1, full + 1) if c & (c - 1)]
    cols = cols[:n]
    H = np.array([[(c >> i) & 1 for c in cols] for i in range(r)], dtype=np.int64)
    return LinearCode(B, kernel_basis(B, H), 1, H=H)


def identity_code(field: Field, n: int) -> LinearCode:
    return LinearCode(field, np.eye(n, dtype=np.int64), 0, H=np.zeros((0, n), dtype=np.int64))


# ---------------------------------------------------------------------------
# Binary symmetric channel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BscChannel:
    transition_probability: Fraction

    def __post_init__(self):
        p = self.transition_probability
        p = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
        if not 0 <= p < Fraction(1, 2):
            raise ValueError("transition probability must lie in [0, 1/2)")
        object.__setattr__(self, "transition_probability", p)

    def transmit(self, v, rng: np.random.Generator) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        flips = rng.random(v.shape) < float(self.transition_probability)
        return v ^ flips.astype(np.int64)


def _bsc_candidates(n0: int):
    B = GF(2)
    yield ("repetition", (n0 - 1) // 2, 1, lambda: RepetitionCode(B, n0))
    r = max(2, math.ceil(math.log2(n0 + 1)))
    if r <= n0 - 1 and 2**r - 1 >= n0:
        yield ("hamming", 1, n0 - r, lambda: hamming_code(r, n0))
    for b in range(2, 9):
        if n0 % b:
            continue
        N = n0 // b
        if N > 2**b:
            continue
        for K in range(N - 1, 0, -1):
            yield (f"rs_gf2^{b}", (N - K) // 2, K * b, lambda b=b, N=N, K=K: BinaryRSCode(b, N, K))


def bsc_capable_code(p, n0: int) -> LinearCode:
    """Highest-dimension length-n0 binary code with radius >= ceil(2 p n0)."""
    p = BscChannel(p).transition_probability
    if p == 0:
        return identity_code(GF(2), n0)
    need = math.ceil(2 * p * n0)
    best = None
    feasible = []
    for name, t, k, build in _bsc_candidates(n0):
        if best is None or t > best[1]:
            best = (name, t, k)
        if t >= need:
            feasible.append((k, t, name, build))
    if not feasible:
        raise ValueError(
            f"no built-in length-{n0} code corrects {need} errors; best is {best[0]} with t={best[1]}"
        )
    k, t, name, build = max(feasible, key=lambda c: (c[0], c[1]))
    return build()


def random_error(F: Field, n: int, t: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform vector of exact Hamming weight t."""
    e = np.zeros(n, dtype=np.int64)
    pos = rng.choice(n, size=t, replace=False)
    e[pos] = F.random_nonzero(t, rng)
    return e
