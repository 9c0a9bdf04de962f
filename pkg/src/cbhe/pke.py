"""Code-based public-key encryption: McEliece, Niederreiter, Alekhnovich.

All four frameworks share one interface::

    kp = pke_keygen(PkeScheme("mceliece"), rng)
    ct = pke_encrypt(kp.public, m, rng)
    m2 = pke_decrypt(kp.secret, ct)

Decryption re-encodes its result and raises :class:`DecryptionError` rather
than returning a miscorrected plaintext.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from cbhe.algebra import (
    GF,
    Field,
    inverse,
    kernel_basis,
    matmul,
    rank,
    sample_invertible,
    sample_permutation,
    solve_linear,
)
from cbhe.codes import (
    DecodingError,
    GRSCode,
    LinearCode,
    bsc_capable_code,
    goppa_keygen,
    hamming_weight,
    random_error,
)

SCHEMES = ("mceliece", "niederreiter", "alekhnovich1", "alekhnovich2")

CODE_DEFAULTS = {
    "goppa": {"m": 4, "n": 16, "t": 2},
    "grs": {"q": 13, "n": 12, "k": 6},
}

DEFAULT_PARAMS = {
    "mceliece": {"code": "goppa", **CODE_DEFAULTS["goppa"]},
    "niederreiter": {"code": "grs", **CODE_DEFAULTS["grs"]},
    "alekhnovich1": {"n": 64, "k": 16, "t": 4},
    "alekhnovich2": {"n": 64, "t": 1},
}

M_RETRIES = 100


class DecryptionError(Exception):
    """Ciphertext could not be decrypted (decoder failure or re-encode mismatch)."""


@dataclass(frozen=True)
class PkeScheme:
    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in SCHEMES:
            raise ValueError(f"unknown scheme {self.tag!r}; expected one of {SCHEMES}")
        merged = dict(DEFAULT_PARAMS[self.tag])
        if "code" in self.params and self.params["code"] != merged.get("code"):
            kind = self.params["code"]
            if kind not in CODE_DEFAULTS:
                raise ValueError(f"unknown code family {kind!r}")
            merged = {"code": kind, **CODE_DEFAULTS[kind]}
        merged.update(self.params)
        object.__setattr__(self, "params", merged)


def _perm_columns(P: np.ndarray) -> np.ndarray:
    """cols[i] = column of the 1 in row i."""
    return np.argmax(P, axis=1)


def build_code(params: dict, rng: np.random.Generator) -> LinearCode:
    kind = params.get("code", "goppa")
    if kind == "goppa":
        return goppa_keygen(int(params["m"]), int(params["n"]), int(params["t"]), rng)
    if kind == "grs":
        q, n, k = int(params["q"]), int(params["n"]), int(params["k"])
        if n > q - 1:
            raise ValueError(f"GRS length n={n} needs n <= q - 1 = {q - 1}")
        F = GF(q)
        points = 1 + rng.choice(q - 1, size=n, replace=False)
        return GRSCode(F, points, k, F.random_nonzero(n, rng))
    raise ValueError(f"unknown code family {kind!r}")


# ---------------------------------------------------------------------------
# Key and ciphertext containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PkeCiphertext:
    scheme: str
    field: Field
    c: np.ndarray


@dataclass(frozen=True, eq=False)
class McEliecePublicKey:
    G_pub: np.ndarray
    t: int
    field: Field
    scheme: str = "mceliece"


@dataclass(frozen=True, eq=False)
class McElieceSecretKey:
    code: LinearCode
    S: np.ndarray
    P: np.ndarray
    scheme: str = "mceliece"

    def __post_init__(self):
        F = self.code.field
        object.__setattr__(self, "_S_inv", inverse(F, self.S))
        object.__setattr__(self, "_cols", _perm_columns(self.P))
        object.__setattr__(self, "_G_pub", matmul(F, matmul(F, self.S, self.code.G), self.P))

    @property
    def G(self) -> np.ndarray:
        return self.code.G


@dataclass(frozen=True, eq=False)
class NiederreiterPublicKey:
    H_pub: np.ndarray
    t: int
    field: Field
    scheme: str = "niederreiter"


@dataclass(frozen=True, eq=False)
class NiederreiterSecretKey:
    code: LinearCode
    S: np.ndarray
    P: np.ndarray
    scheme: str = "niederreiter"

    def __post_init__(self):
        object.__setattr__(self, "_S_inv", inverse(self.code.field, self.S))
        object.__setattr__(self, "_cols", _perm_columns(self.P))

    @property
    def H(self) -> np.ndarray:
        return self.code.H


@dataclass(frozen=True, eq=False)
class Alekhnovich1PublicKey:
    G: np.ndarray
    t: int
    scheme: str = "alekhnovich1"

    @property
    def field(self) -> Field:
        return GF(2)


@dataclass(frozen=True, eq=False)
class Alekhnovich1SecretKey:
    e: np.ndarray
    scheme: str = "alekhnovich1"


@dataclass(frozen=True, eq=False)
class Alekhnovich2PublicKey:
    G: np.ndarray
    t: int
    scheme: str = "alekhnovich2"

    @property
    def field(self) -> Field:
        return GF(2)

    @property
    def message_length(self) -> int:
        return self.G.shape[0] // 2


@dataclass(frozen=True, eq=False)
class Alekhnovich2SecretKey:
    E: np.ndarray
    M: np.ndarray
    G: np.ndarray
    t: int
    scheme: str = "alekhnovich2"

    def __post_init__(self):
        B = GF(2)
        n = self.M.shape[0]
        object.__setattr__(self, "_M_inv", inverse(B, self.M))
        object.__setattr__(self, "C0", bsc_capable_code(Fraction(self.t**2, n), n))

    def phi(self, x) -> np.ndarray:
        return matmul(GF(2), self.M, np.asarray(x))

    def phi_inv(self, z) -> np.ndarray:
        return matmul(GF(2), self._M_inv, np.asarray(z))


@dataclass(frozen=True, eq=False)
class PkeKeyPair:
    scheme: PkeScheme
    public: Any
    secret: Any
    # keygen transcript kept for inspection; never serialized
    aux: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Key generation
# ---------------------------------------------------------------------------


def _keygen_mceliece(params, rng):
    code = build_code(params, rng)
    F = code.field
    S = sample_invertible(F, code.k, rng)
    P = sample_permutation(code.n, rng)
    G_pub = matmul(F, matmul(F, S, code.G), P)
    return McEliecePublicKey(G_pub, code.t, F), McElieceSecretKey(code, S, P), {}


def _keygen_niederreiter(params, rng):
    code = build_code(params, rng)
    F = code.field
    S = sample_invertible(F, code.n - code.k, rng)
    P = sample_permutation(code.n, rng)
    H_pub = matmul(F, matmul(F, S, code.H), P)
    return NiederreiterPublicKey(H_pub, code.t, F), NiederreiterSecretKey(code, S, P), {}


def _keygen_alekhnovich1(params, rng):
    n, k, t = int(params["n"]), int(params["k"]), int(params["t"])
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    if not 1 <= t <= math.isqrt(n) // 2:
        raise ValueError(f"t must satisfy 1 <= t <= floor(sqrt(n)/2) = {math.isqrt(n) // 2}")
    B = GF(2)
    A = B.random((k, n), rng)
    e = random_error(B, n, t, rng)
    x = B.random(k, rng)
    y = B.add(matmul(B, x, A), e)
    H = np.vstack([A, y])
    G = kernel_basis(B, H)
    aux = {"A": A, "x": x, "y": y, "H": H}
    return Alekhnovich1PublicKey(G, t), Alekhnovich1SecretKey(e), aux


def _keygen_alekhnovich2(params, rng):
    n, t = int(params["n"]), int(params["t"])
    if n < 2 or n % 2:
        raise ValueError("n must be even")
    if not 1 <= t <= n:
        raise ValueError("need 1 <= t <= n")
    B = GF(2)
    C0 = bsc_capable_code(Fraction(t * t, n), n)
    for _ in range(M_RETRIES):
        A = B.random((n // 2, n), rng)
        X = B.random((n, n // 2), rng)
        E = np.zeros((n, n), dtype=np.int64)
        for row in E:
            row[rng.choice(n, size=t, replace=False)] = 1
        M = B.add(matmul(B, X, A), E)
        if rank(B, M) == n:
            break
    else:
        raise ValueError(f"no invertible M = XA + E after {M_RETRIES} attempts")
    G = kernel_basis(B, np.vstack([matmul(B, C0.H, M), A]))
    if G.shape[0] < 2:
        raise ValueError(f"code C has dimension {G.shape[0]}; C0 = {C0} leaves no message space")
    aux = {"A": A, "X": X, "C0": C0}
    return Alekhnovich2PublicKey(G, t), Alekhnovich2SecretKey(E, M, G, t), aux


_KEYGEN = {
    "mceliece": _keygen_mceliece,
    "niederreiter": _keygen_niederreiter,
    "alekhnovich1": _keygen_alekhnovich1,
    "alekhnovich2": _keygen_alekhnovich2,
}


def pke_keygen(scheme: PkeScheme, rng: np.random.Generator) -> PkeKeyPair:
    public, secret, aux = _KEYGEN[scheme.tag](scheme.params, rng)
    return PkeKeyPair(scheme, public, secret, aux)


# ---------------------------------------------------------------------------
# Encryption / decryption
# ---------------------------------------------------------------------------


def pke_encrypt(pk, m, rng: Optional[np.random.Generator] = None, *, e=None) -> PkeCiphertext:
    """Encrypt ``m`` under ``pk``.

    ``e`` overrides the sampled error vector (McEliece and Alekhnovich 2);
    it exists for tests.
    """
    if isinstance(pk, McEliecePublicKey):
        F = pk.field
        m = np.asarray(m, dtype=np.int64)
        if m.shape != (pk.G_pub.shape[0],):
            raise ValueError(f"message must have length k = {pk.G_pub.shape[0]}")
        if e is None:
            e = random_error(F, pk.G_pub.shape[1], pk.t, rng)
        return PkeCiphertext(pk.scheme, F, F.add(matmul(F, m, pk.G_pub), e))

    if isinstance(pk, NiederreiterPublicKey):
        F = pk.field
        m = np.asarray(m, dtype=np.int64)
        if m.shape != (pk.H_pub.shape[1],):
            raise ValueError(f"message must have length n = {pk.H_pub.shape[1]}")
        if hamming_weight(m) > pk.t:
            raise ValueError("message weight exceeds t")
        return PkeCiphertext(pk.scheme, F, matmul(F, pk.H_pub, m))

    if isinstance(pk, Alekhnovich1PublicKey):
        B = GF(2)
        bit = int(np.asarray(m).ravel()[0]) if np.ndim(m) else int(m)
        if bit not in (0, 1):
            raise ValueError("Alekhnovich first variant encrypts a single bit")
        n = pk.G.shape[1]
        if bit == 1:
            return PkeCiphertext(pk.scheme, B, B.random(n, rng))
        a = B.random(pk.G.shape[0], rng)
        if e is None:
            e = random_error(B, n, pk.t, rng)
        return PkeCiphertext(pk.scheme, B, B.add(matmul(B, a, pk.G), e))

    if isinstance(pk, Alekhnovich2PublicKey):
        B = GF(2)
        k, n = pk.G.shape
        half = k // 2
        m = np.asarray(m, dtype=np.int64)
        if m.shape != (half,):
            raise ValueError(f"message must have length floor(k/2) = {half}")
        r = B.random(k - half, rng)
        x = np.concatenate([m, r])
        if e is None:
            e = random_error(B, n, pk.t, rng)
        return PkeCiphertext(pk.scheme, B, B.add(matmul(B, x, pk.G), e))

    raise TypeError(f"not a public key: {type(pk).__name__}")


def _decrypt_mceliece(sk: McElieceSecretKey, c):
    F, code = sk.code.field, sk.code
    c_unperm = c[sk._cols]
    try:
        mS, _ = code.decode(c_unperm)
    except DecodingError as exc:
        raise DecryptionError(str(exc)) from exc
    m = matmul(F, mS, sk._S_inv)
    if hamming_weight(F.sub(c, matmul(F, m, sk._G_pub))) > code.t:
        raise DecryptionError("re-encode check failed")
    return m


def _decrypt_niederreiter(sk: NiederreiterSecretKey, c):
    F, code = sk.code.field, sk.code
    s = matmul(F, sk._S_inv, c)
    try:
        e_perm = code.syndrome_decode(s)
    except DecodingError as exc:
        raise DecryptionError(str(exc)) from exc
    m = np.zeros(code.n, dtype=np.int64)
    m[sk._cols] = e_perm
    if hamming_weight(m) > code.t or np.any(matmul(F, code.H, e_perm) != s):
        raise DecryptionError("re-encode check failed")
    return m


def _decrypt_alekhnovich1(sk: Alekhnovich1SecretKey, c) -> int:
    return int(np.dot(sk.e, c) & 1)


def _decrypt_alekhnovich2(sk: Alekhnovich2SecretKey, c):
    B = GF(2)
    y = matmul(B, sk.E, c)
    try:
        _, err = sk.C0.decode(y)
    except DecodingError as exc:
        raise DecryptionError(str(exc)) from exc
    w = sk.phi_inv(B.sub(y, err))
    x = solve_linear(B, sk.G.T, w)
    if x is None:
        raise DecryptionError("decoded word is not in the public code")
    if hamming_weight(B.sub(c, matmul(B, x, sk.G))) > sk.t:
        raise DecryptionError("re-encode check failed")
    return x[: sk.G.shape[0] // 2]


_DECRYPT = {
    McElieceSecretKey: _decrypt_mceliece,
    NiederreiterSecretKey: _decrypt_niederreiter,
    Alekhnovich1SecretKey: _decrypt_alekhnovich1,
    Alekhnovich2SecretKey: _decrypt_alekhnovich2,
}


def pke_decrypt(sk, ct: PkeCiphertext):
    c = ct.c if isinstance(ct, PkeCiphertext) else np.asarray(ct, dtype=np.int64)
    if isinstance(ct, PkeCiphertext) and ct.scheme != sk.scheme:
        raise ValueError(f"{ct.scheme} ciphertext given to a {sk.scheme} key")
    try:
        fn = _DECRYPT[type(sk)]
    except KeyError:
        raise TypeError(f"not a secret key: {type(sk).__name__}") from None
    return fn(sk, np.asarray(c, dtype=np.int64))


def encrypt_bit_repeated(pk: Alekhnovich1PublicKey, bit: int, copies: int, rng) -> list:
    """Encrypt one bit as ``copies`` independent Alekhnovich ciphertexts."""
    return [pke_encrypt(pk, bit, rng) for _ in range(copies)]


def decrypt_bit_repeated(sk: Alekhnovich1SecretKey, cts) -> int:
    """OR of the per-copy decryptions: a 1 is missed with probability 2^-copies."""
    return int(any(pke_decrypt(sk, ct) for ct in cts))
