"""Benchmark harness: serialized sizes, ciphertext expansion and timings.

``bench_run`` builds each requested scheme at desk-scale parameters, measures
payload sizes from the wire format and reports median wall-clock times over
repeated trials (after discarded warm-up runs).  A scheme that cannot be
built or run is recorded with its error instead of aborting the report.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from cbhe.algebra import make_rng
from cbhe.codes import random_error
from cbhe.he_evalcode import ec_add, ec_decrypt, ec_encrypt, ec_keygen, ec_mult
from cbhe.he_linear import BlParams, bl_add, bl_decrypt, bl_encrypt, bl_keygen
from cbhe.he_rank import RankParams, rk_add, rk_decrypt, rk_decrypt_mul, rk_encrypt, rk_keygen, rk_mul
from cbhe.pke import PkeScheme, pke_decrypt, pke_encrypt, pke_keygen
from cbhe.wire import payload_size, row_bytes, serialize

MIN_TRIALS = 30
WARMUP = 3
REPORT_FORMAT = "cbhe-bench"
REPORT_VERSION = 1

# Classic-McEliece-sized binary Goppa code used for the size extrapolation.
EXTRAPOLATION_N = 3488
EXTRAPOLATION_K = 2720

ALL_SCHEMES = ("mceliece", "niederreiter", "alekhnovich1", "alekhnovich2", "bogdanov-lee", "armknecht", "rank")
OPS = ("keygen", "encrypt", "decrypt", "add", "mul")

_size = {"type": "integer", "minimum": 0}
_time = {"type": ["number", "null"], "minimum": 0}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "seed", "trials", "warmup", "schemes", "extrapolation"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "version": {"const": REPORT_VERSION},
        "seed": {"type": "integer"},
        "trials": {"type": "integer", "minimum": MIN_TRIALS},
        "warmup": {"type": "integer", "minimum": 0},
        "schemes": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["params", "seed", "error"],
                "properties": {
                    "params": {"type": "object"},
                    "seed": {"type": "integer"},
                    "error": {"type": ["string", "null"]},
                    "symmetric": {"type": "boolean"},
                    "publicKeyBytes": _size,
                    "secretKeyBytes": _size,
                    "ciphertextBytes": _size,
                    "plaintextBytes": {"type": "integer", "minimum": 1},
                    "expansionRatio": {"type": "number", "minimum": 0},
                    "envelopeBytes": {"type": "object", "additionalProperties": _size},
                    "timings": {"type": "object", "properties": {op: _time for op in OPS}},
                },
            },
        },
        "extrapolation": {
            "type": "object",
            "required": ["scheme", "n", "k", "publicKeyBytes", "megabytes"],
        },
    },
}


@dataclass
class _Driver:
    """One scheme instance plus closures for each timed operation."""

    params: dict
    public: object
    secret: object
    sample_ct: object
    plaintext_bytes: int
    keygen: Callable[[np.random.Generator], object]
    encrypt: Callable[[np.random.Generator], object]
    decrypt: Callable[[], object]
    add: Optional[Callable[[], object]] = None
    mul: Optional[Callable[[], object]] = None
    symmetric: bool = False
    extra: dict = field(default_factory=dict)


def _pke_driver(tag: str, params: dict, rng) -> _Driver:
    scheme = PkeScheme(tag, params)
    kp = pke_keygen(scheme, rng)
    pk, sk = kp.public, kp.secret
    if tag == "mceliece":
        F = pk.field
        k = pk.G_pub.shape[0]
        message = lambda r: F.random(k, r)  # noqa: E731
        pt_bytes = row_bytes(F, k)
    elif tag == "niederreiter":
        F = pk.field
        n = pk.H_pub.shape[1]
        message = lambda r: random_error(F, n, pk.t, r)  # noqa: E731
        pt_bytes = row_bytes(F, n)
    elif tag == "alekhnovich1":
        message = lambda r: int(r.integers(2))  # noqa: E731
        pt_bytes = 1
    else:
        half = pk.message_length
        message = lambda r: r.integers(0, 2, size=half)  # noqa: E731
        pt_bytes = (half + 7) // 8
    ct = pke_encrypt(pk, message(rng), rng)

    def decrypt():
        try:
            return pke_decrypt(sk, ct)
        except Exception as exc:  # decryption failures are part of the scheme's behaviour
            return exc

    return _Driver(
        dict(scheme.params), pk, sk, ct, pt_bytes,
        keygen=lambda r: pke_keygen(scheme, r),
        encrypt=lambda r: pke_encrypt(pk, message(r), r),
        decrypt=decrypt,
    )


def _bl_driver(params: dict, rng) -> _Driver:
    bp = BlParams(**params)
    kp = bl_keygen(bp, rng)
    ct = bl_encrypt(kp.public, 1, rng)
    ct2 = bl_encrypt(kp.public, 2, rng)
    return _Driver(
        {"q": bp.q, "n": bp.n, "r": bp.r, "s": bp.s, "rho": bp.rho}, kp.public, kp.secret, ct, 1,
        keygen=lambda r: bl_keygen(bp, r),
        encrypt=lambda r: bl_encrypt(kp.public, int(r.integers(bp.q)), r),
        decrypt=lambda: bl_decrypt(kp.secret, ct),
        add=lambda: bl_add(ct, ct2),
    )


def _armknecht_driver(params: dict, rng) -> _Driver:
    p = {"s": 80, "mu": 2, "L": 10, "q": 17, "n": 12, "kC": 3}
    p.update(params)
    opts = {k: p[k] for k in ("q", "n", "kC") if k in p}
    if "error_budget" in p:
        opts["error_budget"] = p["error_budget"]
    keygen = lambda r: ec_keygen(p["s"], p["mu"], p["L"], r, **opts)  # noqa: E731
    key = keygen(rng)
    ct, ct2 = ec_encrypt(3, key, rng), ec_encrypt(5, key, rng)
    return _Driver(
        p, None, key, ct, 1,
        keygen=keygen,
        encrypt=lambda r: ec_encrypt(int(r.integers(key.field.order)), key, r),
        decrypt=lambda: ec_decrypt(ct, key),
        add=lambda: ec_add(ct, ct2),
        mul=lambda: ec_mult(ct, ct2),
        symmetric=True,
    )


def _rank_driver(params: dict, rng) -> _Driver:
    rp = RankParams(**params)
    sk = rk_keygen(rp, rng)
    B = sk.field.base
    ct = rk_encrypt(sk, B.random(rp.n, rng), rng)
    ct2 = rk_encrypt(sk, B.random(rp.n, rng), rng)
    mct = rk_mul(ct, ct2)
    return _Driver(
        {"q": rp.q, "m": rp.m, "n": rp.n, "w": rp.w}, None, sk, ct, row_bytes(B, rp.n),
        keygen=lambda r: rk_keygen(rp, r),
        encrypt=lambda r: rk_encrypt(sk, B.random(rp.n, r), r),
        decrypt=lambda: rk_decrypt(sk, ct),
        add=lambda: rk_add(ct, ct2),
        mul=lambda: rk_decrypt_mul(sk, rk_mul(ct, ct2)),
        symmetric=True,
        extra={"mulCiphertextBytes": payload_size(mct)},
    )


def build_driver(tag: str, params: Optional[dict], rng) -> _Driver:
    params = dict(params or {})
    if tag in ("mceliece", "niederreiter", "alekhnovich1", "alekhnovich2"):
        return _pke_driver(tag, params, rng)
    if tag == "bogdanov-lee":
        return _bl_driver(params, rng)
    if tag == "armknecht":
        return _armknecht_driver(params, rng)
    if tag == "rank":
        return _rank_driver(params, rng)
    raise ValueError(f"unknown scheme {tag!r}; expected one of {ALL_SCHEMES}")


def _median_time(fn: Callable[[], object], trials: int, warmup: int = WARMUP) -> float:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def measure_sizes(drv: _Driver) -> dict:
    pk = payload_size(drv.public) if drv.public is not None else 0
    sk = payload_size(drv.secret)
    ct = payload_size(drv.sample_ct)
    out = {
        "publicKeyBytes": pk,
        "secretKeyBytes": sk,
        "ciphertextBytes": ct,
        "plaintextBytes": drv.plaintext_bytes,
        "expansionRatio": ct / drv.plaintext_bytes,
        "envelopeBytes": {
            "publicKey": len(serialize(drv.public)) if drv.public is not None else 0,
            "secretKey": len(serialize(drv.secret)),
            "ciphertext": len(serialize(drv.sample_ct)),
        },
    }
    out.update(drv.extra)
    return out


def mceliece_extrapolation(n: int = EXTRAPOLATION_N, k: int = EXTRAPOLATION_K) -> dict:
    """Public-key size of a binary [n, k] McEliece generator matrix, k*n bits."""
    nbytes = k * n // 8
    return {
        "scheme": "mceliece",
        "n": n,
        "k": k,
        "publicKeyBytes": nbytes,
        "megabytes": nbytes / 1e6,
        "mebibytes": nbytes / 2**20,
    }


def bench_scheme(tag: str, params: Optional[dict], seed: int, trials: int, timings: bool = True) -> dict:
    entry: dict = {"params": dict(params or {}), "seed": seed, "error": None}
    try:
        rng = make_rng(seed)
        drv = build_driver(tag, params, rng)
        entry["params"] = drv.params
        entry["symmetric"] = drv.symmetric
        entry.update(measure_sizes(drv))
        if timings:
            t_rng = make_rng(seed + 1)
            entry["timings"] = {
                "keygen": _median_time(lambda: drv.keygen(t_rng), trials),
                "encrypt": _median_time(lambda: drv.encrypt(t_rng), trials),
                "decrypt": _median_time(drv.decrypt, trials),
                "add": _median_time(drv.add, trials) if drv.add else None,
                "mul": _median_time(drv.mul, trials) if drv.mul else None,
            }
    except Exception as exc:  # recorded, not fatal
        entry["error"] = f"{type(exc).__name__}: {exc}"
    return entry


def bench_run(
    schemes: Sequence[str] = ALL_SCHEMES,
    *,
    trials: int = MIN_TRIALS,
    seed: int = 0,
    params: Optional[dict] = None,
    timings: bool = True,
) -> dict:
    """Build the report; ``params`` maps a scheme tag to its parameter overrides."""
    if trials < MIN_TRIALS:
        raise ValueError(f"medians need at least {MIN_TRIALS} trials, got {trials}")
    params = params or {}
    report = {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "seed": seed,
        "trials": trials,
        "warmup": WARMUP,
        "schemes": {},
        "extrapolation": mceliece_extrapolation(),
    }
    for tag in schemes:
        report["schemes"][tag] = bench_scheme(tag, params.get(tag), seed, trials, timings)
    return report
