"""Command-line front end: ``cbhe keygen|encrypt|decrypt|eval|estimate|bench``.

Keys and ciphertexts are files in the wire format.  Messages travel as hex
strings holding the packed plaintext vector (the same element packing the
wire format uses for one row).  Exit status is 0 on success, 1 for usage or
input errors and 2 when a cryptographic operation fails.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from cbhe import bench, hardness, wire
from cbhe.algebra import GF, make_rng
from cbhe.codes import DecodingError
from cbhe.he_evalcode import ArmknechtKey, BudgetExceededError, EcCiphertext, ec_add, ec_decrypt, ec_encrypt, ec_eval_poly, ec_keygen, ec_mult
from cbhe.he_linear import BlCiphertext, BlParams, BlPublicKey, BlSecretKey, bl_add, bl_decrypt, bl_encrypt, bl_keygen
from cbhe.he_rank import (
    RankCiphertext,
    RankMulCiphertext,
    RankParams,
    RankSecretKey,
    rk_add,
    rk_decrypt,
    rk_decrypt_mul,
    rk_encrypt,
    rk_keygen,
    rk_mul,
    rk_mul_add,
)
from cbhe.pke import SCHEMES as PKE_SCHEMES
from cbhe.pke import (
    Alekhnovich1PublicKey,
    Alekhnovich2PublicKey,
    DecryptionError,
    McEliecePublicKey,
    NiederreiterPublicKey,
    PkeCiphertext,
    PkeScheme,
    pke_decrypt,
    pke_encrypt,
    pke_keygen,
)

EXIT_OK, EXIT_USAGE, EXIT_CRYPTO = 0, 1, 2
SCHEMES = PKE_SCHEMES + ("bogdanov-lee", "armknecht", "rank")
SEED_ENV = "CBHE_SEED"
_CRYPTO_ERRORS = (DecryptionError, DecodingError, BudgetExceededError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def parse_params(text: Optional[str]) -> dict:
    """``"n=16,t=2,code=goppa"`` -> ``{"n": 16, "t": 2, "code": "goppa"}``."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"bad parameter {item!r}; expected key=value")
        value = value.strip()
        for conv in (int, float):
            try:
                out[key.strip()] = conv(value)
                break
            except ValueError:
                continue
        else:
            out[key.strip()] = {"true": True, "false": False}.get(value.lower(), value)
    return out


def resolve_seed(seed: Optional[int]) -> Optional[int]:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return seed


def _load(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return wire.deserialize(data)
    except wire.WireError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str, obj) -> None:
    Path(path).write_bytes(wire.serialize(obj))


def message_layout(key) -> tuple:
    """``(field, length)`` of the plaintext vector for a key (public or secret)."""
    if isinstance(key, McEliecePublicKey):
        return key.field, key.G_pub.shape[0]
    if isinstance(key, NiederreiterPublicKey):
        return key.field, key.H_pub.shape[1]
    if isinstance(key, Alekhnovich1PublicKey):
        return GF(2), 1
    if isinstance(key, Alekhnovich2PublicKey):
        return GF(2), key.message_length
    if isinstance(key, (BlPublicKey, BlSecretKey)):
        return key.params.field, 1
    if isinstance(key, ArmknechtKey):
        return key.field, 1
    if isinstance(key, RankSecretKey):
        return key.field.base, key.params.n
    if hasattr(key, "code"):  # McEliece / Niederreiter secret keys
        if key.scheme == "mceliece":
            return key.code.field, key.code.k
        return key.code.field, key.code.n
    if getattr(key, "scheme", None) == "alekhnovich1":
        return GF(2), 1
    if getattr(key, "scheme", None) == "alekhnovich2":
        return GF(2), key.G.shape[0] // 2
    raise UsageError(f"{type(key).__name__} is not a key")


def encode_message(F, vec) -> str:
    return wire.pack_elements(F, np.atleast_1d(np.asarray(vec, dtype=np.int64))).hex()


def decode_message(F, length: int, text: str) -> np.ndarray:
    text = re.sub(r"\s+", "", text)
    if text.startswith(("0x", "0X")):
        text = text[2:]
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise UsageError(f"message {text!r} is not hex") from None
    need = wire.row_bytes(F, length)
    if len(raw) != need:
        raise UsageError(f"message must be {need} byte(s) ({length} element(s) of {F}), got {len(raw)}")
    try:
        return wire.unpack_elements(F, raw, (length,), "message")
    except wire.WireError as exc:
        raise UsageError(f"message: {exc}") from None


def _read_msg(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        return Path(arg).read_text()
    return arg


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_keygen(args) -> int:
    if args.scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {args.scheme!r}; choose from {', '.join(SCHEMES)}")
    params = parse_params(args.params)
    rng = make_rng(resolve_seed(args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.scheme in PKE_SCHEMES:
            kp = pke_keygen(PkeScheme(args.scheme, params), rng)
            public, secret = kp.public, kp.secret
        elif args.scheme == "bogdanov-lee":
            kp = bl_keygen(BlParams(**params), rng)
            public, secret = kp.public, kp.secret
        elif args.scheme == "armknecht":
            p = {"s": 80, "mu": 2, "L": 10}
            p.update(params)
            public, secret = None, ec_keygen(p.pop("s"), p.pop("mu"), p.pop("L"), rng, **p)
        else:
            public, secret = None, rk_keygen(RankParams(**params), rng)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {args.scheme}: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if public is not None:
        _write(str(out / "public.key"), public)
        print(out / "public.key")
    _write(str(out / "secret.key"), secret)
    print(out / "secret.key")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    key = _load(args.pk)
    F, length = message_layout(key)
    m = decode_message(F, length, _read_msg(args.msg))
    rng = make_rng(resolve_seed(args.seed))
    try:
        if isinstance(key, (BlPublicKey,)):
            ct = bl_encrypt(key, int(m[0]), rng)
        elif isinstance(key, ArmknechtKey):
            ct = ec_encrypt(int(m[0]), key, rng)
        elif isinstance(key, RankSecretKey):
            ct = rk_encrypt(key, m, rng)
        elif wire.role_of(key) == "publicKey":
            ct = pke_encrypt(key, int(m[0]) if isinstance(key, Alekhnovich1PublicKey) else m, rng)
        else:
            raise UsageError(f"{type(key).__name__} cannot encrypt; pass a public key")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, ct)
    return EXIT_OK


def decrypt_object(key, ct):
    """Plaintext vector of ``ct`` under ``key``."""
    if isinstance(ct, PkeCiphertext):
        return np.atleast_1d(pke_decrypt(key, ct))
    if isinstance(ct, BlCiphertext) and isinstance(key, BlSecretKey):
        return np.array([bl_decrypt(key, ct)])
    if isinstance(ct, EcCiphertext) and isinstance(key, ArmknechtKey):
        return np.array([ec_decrypt(ct, key)])
    if isinstance(ct, RankCiphertext) and isinstance(key, RankSecretKey):
        return rk_decrypt(key, ct)
    if isinstance(ct, RankMulCiphertext) and isinstance(key, RankSecretKey):
        return rk_decrypt_mul(key, ct)
    raise UsageError(f"cannot decrypt a {type(ct).__name__} with a {type(key).__name__}")


def cmd_decrypt(args) -> int:
    key, ct = _load(args.sk), _load(args.ct)
    if wire.role_of(key) != "secretKey":
        raise UsageError("decrypt needs a secret key")
    F, _ = message_layout(key)
    print(encode_message(F, decrypt_object(key, ct)))
    return EXIT_OK


_TERM = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, nvars: int) -> dict:
    """``"x1*x2 + 3*x3^2 + 7"`` -> ``{exponent tuple: coefficient}``."""
    out: dict = {}
    for term in text.replace("-", "+-").split("+"):
        term = term.strip().replace(" ", "")
        if not term:
            continue
        coef, exps = 1, [0] * nvars
        for factor in term.split("*"):
            if factor.lstrip("-").isdigit():
                coef *= int(factor)
                continue
            neg = factor.startswith("-")
            match = _TERM.match(factor.lstrip("-"))
            if not match:
                raise UsageError(f"cannot parse polynomial factor {factor!r}")
            idx, power = int(match.group(1)), int(match.group(2) or 1)
            if not 1 <= idx <= nvars:
                raise UsageError(f"x{idx} given but only {nvars} ciphertext(s)")
            exps[idx - 1] += power
            coef *= -1 if neg else 1
        key = tuple(exps)
        out[key] = out.get(key, 0) + coef
    return out


def cmd_eval(args) -> int:
    key = _load(args.key)
    cts = [_load(p) for p in args.ct]
    if not cts:
        raise UsageError("eval needs at least one ciphertext")
    kinds = {type(c) for c in cts}
    if len(kinds) != 1:
        raise UsageError("ciphertexts must be of one kind")
    kind = kinds.pop()
    try:
        if args.op == "poly":
            if kind is not EcCiphertext or not isinstance(key, ArmknechtKey):
                raise UsageError("poly evaluation is available for the armknecht scheme")
            if not args.poly:
                raise UsageError("--poly is required for --op poly")
            result = ec_eval_poly(parse_poly(args.poly, len(cts)), cts)
        else:
            if len(cts) < 2:
                raise UsageError(f"{args.op} needs at least two ciphertexts")
            table = {
                ("add", BlCiphertext): bl_add,
                ("add", EcCiphertext): ec_add,
                ("mul", EcCiphertext): ec_mult,
                ("add", RankCiphertext): rk_add,
                ("add", RankMulCiphertext): rk_mul_add,
            }
            if args.op == "mul" and kind is RankCiphertext:
                if len(cts) != 2:
                    raise UsageError("rank ciphertexts support a single multiplication")
                result = rk_mul(*cts)
            else:
                fn = table.get((args.op, kind))
                if fn is None:
                    raise UsageError(f"{args.op} is not supported for {kind.__name__}")
                result = cts[0]
                for ct in cts[1:]:
                    result = fn(result, ct)
    except ValueError as exc:
        if isinstance(exc, BudgetExceededError):
            raise
        raise UsageError(str(exc)) from None
    _write(args.out, result)
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        iters, log2cost = hardness.prange_workfactor(args.n, args.k, args.t, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"iterations {iters:.3f}")
    print(f"log2_cost {log2cost:.3f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()] if args.schemes else list(bench.ALL_SCHEMES)
    unknown = [s for s in schemes if s not in bench.ALL_SCHEMES]
    if unknown:
        raise UsageError(f"unknown scheme(s) {', '.join(unknown)}; choose from {', '.join(bench.ALL_SCHEMES)}")
    seed = resolve_seed(args.seed)
    try:
        report = bench.bench_run(schemes, trials=args.trials, seed=0 if seed is None else seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cbhe", description="Code-based encryption and homomorphic encryption toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("keygen", help="generate a key pair (or a symmetric key)")
    k.add_argument("--scheme", required=True, help=", ".join(SCHEMES))
    k.add_argument("--params", default="", help="comma-separated key=value overrides")
    k.add_argument("--seed", type=int, default=None)
    k.add_argument("--out", required=True, help="output directory")
    k.set_defaults(func=cmd_keygen)

    e = sub.add_parser("encrypt", help="encrypt a hex message")
    e.add_argument("--pk", required=True, help="public key (secret key for symmetric schemes)")
    e.add_argument("--msg", required=True, help="hex string, a file holding one, or - for stdin")
    e.add_argument("--out", required=True)
    e.add_argument("--seed", type=int, default=None)
    e.set_defaults(func=cmd_encrypt)

    d = sub.add_parser("decrypt", help="decrypt to a hex message on stdout")
    d.add_argument("--sk", required=True)
    d.add_argument("--ct", required=True)
    d.set_defaults(func=cmd_decrypt)

    v = sub.add_parser("eval", help="homomorphic evaluation")
    v.add_argument("--op", required=True, choices=("add", "mul", "poly"))
    v.add_argument("--key", required=True, help="key file identifying the scheme instance")
    v.add_argument("--ct", required=True, nargs="+")
    v.add_argument("--poly", default=None, help='e.g. "x1*x2 + x3 + 7"')
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_eval)

    s = sub.add_parser("estimate", help="Prange information-set decoding work factor")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--q", type=int, default=2)
    s.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bench", help="size and timing report as JSON")
    b.add_argument("--schemes", default=None, help="comma-separated list (default: all)")
    b.add_argument("--trials", type=int, default=bench.MIN_TRIALS)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cbhe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _CRYPTO_ERRORS as exc:
        print(f"cbhe: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CRYPTO


if __name__ == "__main__":
    sys.exit(main())
