"""Finite-field arithmetic and dense linear algebra.

Elements of GF(p^m) are stored as non-negative integers whose base-p digits
are the coordinates over the polynomial basis ``1, X, ..., X^(m-1)``
(lowest digit first).  Base-field elements therefore embed into the
extension unchanged, and expanding a vector over the base field is a pure
digit split.

Vectors and matrices are ``numpy`` int64 arrays; every routine takes the
field as its first argument.
"""

from __future__ import annotations

import functools
from typing import Optional, Sequence

import numpy as np

from cbhe import poly

# Irreducible moduli for GF(2^m), bit i = coefficient of X^i.
BINARY_MODULI = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

MAX_TABLE_ORDER = 1 << 20


class IncompatibleFieldsError(ValueError):
    """Raised when operands live in different fields."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@functools.lru_cache(maxsize=None)
def _default_modulus(p: int, m: int) -> tuple:
    if p == 2 and m in BINARY_MODULI:
        bits = BINARY_MODULI[m]
        return tuple((bits >> i) & 1 for i in range(m + 1))
    base = GF(p)
    # first monic irreducible in lexicographic order of the low coefficients
    for code in range(p**m):
        low = [(code // p**i) % p for i in range(m)]
        cand = low + [1]
        if low[0] != 0 and poly.is_irreducible(base, cand):
            return tuple(cand)
    raise ValueError(f"no irreducible polynomial of degree {m} over GF({p})")


class Field:
    """GF(p^m) with a fixed polynomial basis.

    Use :func:`GF` rather than instantiating directly; it caches instances
    so that identical fields compare by identity.
    """

    def __init__(self, p: int, m: int = 1, modulus: Optional[Sequence[int]] = None):
        if not _is_prime(p):
            raise ValueError(f"base characteristic must be prime, got {p}")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.m = m
        self.order = p**m
        self.bits = max(1, (p - 1).bit_length())
        if m == 1:
            self.modulus = (0, 1)
            self.base = self
        else:
            if modulus is None:
                modulus = _default_modulus(p, m)
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            self.base = GF(p)
            if not poly.is_irreducible(self.base, list(modulus)):
                raise ValueError(f"modulus {modulus} is reducible over GF({p})")
            self.modulus = modulus
            if self.order > MAX_TABLE_ORDER:
                raise ValueError("extension fields are limited to order 2^20")
            self._build_tables()
        self._powers = np.array([p**i for i in range(m)], dtype=np.int64)
        self._inv_table = None

    # -- construction helpers --------------------------------------------
    def _polymul_int(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        if p == 2:
            mod_bits = sum(c << i for i, c in enumerate(self.modulus))
            out = 0
            while b:
                if b & 1:
                    out ^= a
                b >>= 1
                a <<= 1
                if a >> m & 1:
                    a ^= mod_bits
            return out
        da = [(a // p**i) % p for i in range(m)]
        db = [(b // p**i) % p for i in range(m)]
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for i in range(2 * m - 2, m - 1, -1):
            c = prod[i]
            if c:
                for j in range(m + 1):
                    prod[i - m + j] = (prod[i - m + j] - c * self.modulus[j]) % p
        return sum(c * p**i for i, c in enumerate(prod[:m]))

    def _build_tables(self):
        n = self.order - 1
        for g in range(2, self.order):
            exp = [1] * n
            x = 1
            ok = True
            for i in range(1, n):
                x = self._polymul_int(x, g)
                if x == 1:
                    ok = False
                    break
                exp[i] = x
            if ok:
                break
        self._exp_l = exp + exp
        log = [0] * self.order
        for i, v in enumerate(exp):
            log[v] = i
        self._log_l = log
        self._exp = np.array(self._exp_l, dtype=np.int64)
        self._log = np.array(log, dtype=np.int64)

    # -- identity -----------------------------------------------------------
    def __repr__(self):
        return f"GF({self.p})" if self.m == 1 else f"GF({self.p}^{self.m})"

    def __reduce__(self):
        return (GF, (self.p, self.m, self.modulus if self.m > 1 else None))

    @property
    def characteristic(self) -> int:
        return self.p

    def element(self, value) -> "FieldElement":
        if isinstance(value, (list, tuple)):
            if len(value) > self.m or any(not 0 <= int(c) < self.p for c in value):
                raise ValueError(f"{value} is not a coordinate vector of {self}")
            digits = np.zeros(self.m, dtype=np.int64)
            digits[: len(value)] = value
            value = self.from_digits(digits)
        return FieldElement(self, int(value))

    # -- scalar arithmetic on Python ints -------------------------------------
    def sadd(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return int(self.add(a, b))

    def ssub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        return int(self.sub(a, b))

    def sneg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return int(self.neg(a))

    def smul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp_l[self._log_l[a] + self._log_l[b]]

    def sinv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("division by zero")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp_l[(self.order - 1 - self._log_l[a]) % (self.order - 1)]

    def spow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        if self.m == 1:
            return pow(a, e, self.p)
        return self._exp_l[(self._log_l[a] * e) % (self.order - 1)]

    # -- vectorised arithmetic -------------------------------------------------
    def to_digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._powers) % self.p

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64)
        return (d % self.p) @ self._powers

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits(self.to_digits(a) + self.to_digits(b))

    def sub(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits(self.to_digits(a) - self.to_digits(b))

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a.copy()
        return self.from_digits(-self.to_digits(a))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            if self.p == 2:
                return a & b
            return (a * b) % self.p
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("division by zero")
        if self.m > 1:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        if self.p == 2:
            return a.copy()
        if self._inv_table is None and self.p <= MAX_TABLE_ORDER:
            t = np.zeros(self.p, dtype=np.int64)
            t[1:] = [pow(x, self.p - 2, self.p) for x in range(1, self.p)]
            self._inv_table = t
        if self._inv_table is not None:
            return self._inv_table[a]
        flat = [pow(int(x), self.p - 2, self.p) for x in a.ravel()]
        return np.array(flat, dtype=np.int64).reshape(a.shape)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        out = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                out = self.mul(out, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return out

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.order, size=shape, dtype=np.int64)

    def random_nonzero(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(1, self.order, size=shape, dtype=np.int64)


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, m: int, modulus: Optional[tuple]) -> Field:
    return Field(p, m, modulus)


def GF(p: int, m: int = 1, modulus: Optional[Sequence[int]] = None) -> Field:
    """Return the (cached) field GF(p^m).

    ``modulus`` lists the coefficients of a monic irreducible polynomial of
    degree ``m``, lowest degree first.  When omitted a built-in default is
    used (the binary table above, otherwise the lexicographically first
    irreducible polynomial).
    """
    if m > 1 and modulus is None:
        modulus = _default_modulus(p, m)
    if modulus is not None:
        modulus = tuple(int(c) for c in modulus)
        if m == 1:
            modulus = None
    return _cached_field(p, m, modulus)


class FieldElement:
    """A single element of a :class:`Field`, with operator overloads."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        if not 0 <= value < field.order:
            raise ValueError(f"{value} is not an element of {field}")
        self.field = field
        self.value = value

    @property
    def coeffs(self) -> tuple:
        F = self.field
        return tuple(int(d) for d in F.to_digits(self.value))

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return FieldElement(self.field, other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field is not self.field:
            raise IncompatibleFieldsError(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.sadd(self.value, other.value))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.ssub(self.value, other.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.sneg(self.value))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.smul(self.value, other.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(self.field, self.field.spow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.sinv(self.value))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other
        return isinstance(other, FieldElement) and other.field is self.field and other.value == self.value

    def __hash__(self):
        return hash((id(self.field), self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.field}({self.value})"


def ff_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.field is not b.field:
        raise IncompatibleFieldsError(f"cannot multiply {a.field} and {b.field} elements")
    return a * b


def ff_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------

RNG_ALGORITHM = "PCG64"


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator; same seed, same stream."""
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------


def _as2d(M) -> np.ndarray:
    return np.array(M, dtype=np.int64, ndmin=2)


def matmul(F: Field, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim == 1:
        return matmul(F, A[None, :], B)[0]
    if B.ndim == 1:
        return matmul(F, A, B[:, None])[:, 0]
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    if F.m == 1:
        if F.p == 2:
            return (A @ B) & 1
        return (A @ B) % F.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for i in range(A.shape[1]):
        out = F.add(out, F.mul(A[:, i : i + 1], B[i : i + 1, :]))
    return out


def rref(F: Field, M) -> tuple[np.ndarray, list]:
    """Reduced row echelon form and the pivot columns.

    Pivots are the first nonzero entry found scanning each column top-down.
    """
    R = _as2d(M).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = F.mul(R[r], F.sinv(lead))
        others = np.flatnonzero(R[:, c])
        others = others[others != r]
        if others.size:
            if F.order == 2:
                R[others] ^= R[r]
            else:
                R[others] = F.sub(R[others], F.mul(R[others, c][:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: Field, M) -> int:
    M = _as2d(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def rref_systematic(F: Field, M) -> tuple[np.ndarray, np.ndarray, int]:
    """RREF, the column permutation putting it in ``[I | A]`` form, and the rank.

    ``R[:, perm]`` has the identity in its first ``rank`` columns.
    """
    R, pivots = rref(F, M)
    cols = R.shape[1]
    rest = [c for c in range(cols) if c not in set(pivots)]
    perm = np.array(pivots + rest, dtype=np.int64)
    return R, perm, len(pivots)


def kernel_basis(F: Field, A) -> np.ndarray:
    """Rows spanning ``{x : A x^T = 0}``."""
    A = _as2d(A)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = rref(F, A)
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    K = np.zeros((len(free), cols), dtype=np.int64)
    for j, f in enumerate(free):
        K[j, f] = 1
        for i, pc in enumerate(pivots):
            K[j, pc] = F.sneg(int(R[i, f]))
    return K


def solve_linear(F: Field, A, b) -> Optional[np.ndarray]:
    """One solution of ``A x = b`` (free variables zero), or None if inconsistent."""
    A = _as2d(A)
    b = np.asarray(b, dtype=np.int64).ravel()
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape[0]} equations, {b.shape[0]} right-hand sides")
    cols = A.shape[1]
    R, pivots = rref(F, np.hstack([A, b[:, None]]))
    if pivots and pivots[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, cols]
    return x


def inverse(F: Field, M) -> np.ndarray:
    M = _as2d(M)
    k = M.shape[0]
    if M.shape != (k, k):
        raise ValueError("matrix is not square")
    R, pivots = rref(F, np.hstack([M, np.eye(k, dtype=np.int64)]))
    if pivots[:k] != list(range(k)):
        raise ValueError("matrix is singular")
    return R[:, k:]


def determinant(F: Field, M) -> int:
    R = _as2d(M).copy()
    k = R.shape[0]
    det = 1
    for c in range(k):
        nz = np.flatnonzero(R[c:, c])
        if nz.size == 0:
            return 0
        piv = c + nz[0]
        if piv != c:
            R[[c, piv]] = R[[piv, c]]
            det = F.sneg(det)
        lead = int(R[c, c])
        det = F.smul(det, lead)
        below = np.arange(c + 1, k)
        if below.size:
            factors = F.mul(R[below, c], F.sinv(lead))
            R[below] = F.sub(R[below], F.mul(factors[:, None], R[c][None, :]))
    return det


def sample_invertible(F: Field, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of GL_k(F) by rejection."""
    if k < 1:
        raise ValueError("k must be >= 1")
    while True:
        S = F.random((k, k), rng)
        if rank(F, S) == k:
            return S


def sample_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform n x n permutation matrix (row i has its 1 in column perm[i])."""
    if n < 1:
        raise ValueError("n must be >= 1")
    P = np.zeros((n, n), dtype=np.int64)
    P[np.arange(n), rng.permutation(n)] = 1
    return P


def ext_expand(F: Field, v) -> np.ndarray:
    """m x n matrix over the base field; column j holds the coordinates of v_j."""
    v = np.asarray(v, dtype=np.int64).ravel()
    return F.to_digits(v).T.copy()


def ext_collapse(F: Field, M) -> np.ndarray:
    M = _as2d(M)
    if M.shape[0] != F.m:
        raise ValueError(f"expected {F.m} coordinate rows, got {M.shape[0]}")
    return F.from_digits(M.T)
