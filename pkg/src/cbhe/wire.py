"""Binary envelope for keys and ciphertexts.

Layout::

    b"CBHE1" | u32 header length | header (UTF-8 key=value lines) | blocks

Each block is ``u32 length | bytes``.  Field-element blocks store every
element as its m base-p digits, each in ``ceil(log2 p)`` bits, packed
little-endian; matrices are row-major and each row is padded to a whole
byte.  Index blocks (planted sets and the like) are plain little-endian u32.

The header lists ``type``, ``scheme``, ``version``, ``role``, scalar
parameters as ``param.<name>=<json>`` and one ``block.<name>=...`` line per
block, in payload order.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from cbhe.algebra import GF, Field
from cbhe.codes import GoppaCode, GRSCode
from cbhe.he_evalcode import ArmknechtKey, EcCiphertext, EvalCodePair
from cbhe.he_linear import BlCiphertext, BlParams, BlPublicKey, BlSecretKey
from cbhe.he_rank import (
    KeySwitchMaterial,
    RankCiphertext,
    RankMulCiphertext,
    RankParams,
    RankSecretKey,
)
from cbhe.pke import (
    Alekhnovich1PublicKey,
    Alekhnovich1SecretKey,
    Alekhnovich2PublicKey,
    Alekhnovich2SecretKey,
    McEliecePublicKey,
    McElieceSecretKey,
    NiederreiterPublicKey,
    NiederreiterSecretKey,
    PkeCiphertext,
)

MAGIC = b"CBHE1"
VERSION = 1
ROLES = ("publicKey", "secretKey", "ciphertext", "keySwitch")
INDEX = "u32"


class WireError(ValueError):
    """Malformed envelope.  ``kind`` is one of bad-magic, bad-header,
    bad-shape, bad-payload, trailing-bytes; ``block`` names the offending block."""

    def __init__(self, kind: str, message: str, block: Optional[str] = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.block = block


# ---------------------------------------------------------------------------
# Element packing
# ---------------------------------------------------------------------------


def _rows(shape: tuple) -> tuple[int, int]:
    if len(shape) == 0:
        raise ValueError("scalars are carried as header parameters, not blocks")
    cols = shape[-1]
    rows = int(np.prod(shape[:-1])) if len(shape) > 1 else 1
    return rows, cols


def row_bytes(F: Field, cols: int) -> int:
    return (cols * F.m * F.bits + 7) // 8


def block_size(F: Optional[Field], shape: tuple) -> int:
    """Bytes taken by a block of the given shape (``F`` None for index blocks)."""
    rows, cols = _rows(shape)
    if F is None:
        return 4 * rows * cols
    return rows * row_bytes(F, cols)


def pack_elements(F: Field, A) -> bytes:
    A = np.asarray(A, dtype=np.int64)
    rows, cols = _rows(A.shape)
    if rows * cols == 0:
        return b""
    if np.any((A < 0) | (A >= F.order)):
        raise ValueError(f"values outside {F}")
    digits = F.to_digits(A.reshape(rows, cols))  # rows, cols, m
    bits = (digits[..., None] >> np.arange(F.bits)) & 1
    bits = bits.reshape(rows, cols * F.m * F.bits).astype(np.uint8)
    return np.packbits(bits, axis=1, bitorder="little").tobytes()


def unpack_elements(F: Field, data: bytes, shape: tuple, name: str = "?") -> np.ndarray:
    rows, cols = _rows(shape)
    if rows * cols == 0:
        return np.zeros(shape, dtype=np.int64)
    nbits = cols * F.m * F.bits
    raw = np.frombuffer(data, dtype=np.uint8).reshape(rows, row_bytes(F, cols))
    bits = np.unpackbits(raw, axis=1, bitorder="little")
    if np.any(bits[:, nbits:]):
        raise WireError("bad-payload", f"nonzero row padding in block {name!r}", name)
    bits = bits[:, :nbits].reshape(rows, cols, F.m, F.bits).astype(np.int64)
    digits = (bits << np.arange(F.bits)).sum(axis=-1)
    if np.any(digits >= F.p):
        raise WireError("bad-payload", f"digit out of range for GF({F.p}) in block {name!r}", name)
    return F.from_digits(digits).reshape(shape)


# ---------------------------------------------------------------------------
# Codecs
# ---------------------------------------------------------------------------


@dataclass
class _Block:
    name: str
    field: Optional[Field]  # None for index blocks
    array: np.ndarray


@dataclass
class _Codec:
    cls: type
    role: str
    scheme: Callable[[Any], str]
    encode: Callable[[Any], tuple[dict, list]]
    decode: Callable[[dict, dict, dict], Any]


_CODECS: dict[str, _Codec] = {}


def _register(cls, role, scheme, encode, decode):
    _CODECS[cls.__name__] = _Codec(cls, role, scheme if callable(scheme) else (lambda _o, s=scheme: s), encode, decode)


def _code_parts(code) -> tuple[dict, list]:
    if isinstance(code, GoppaCode):
        F = code.ext_field
        return {"code": "goppa"}, [
            _Block("support", F, code.support),
            _Block("goppa_poly", F, np.asarray(code.goppa_poly, dtype=np.int64)),
        ]
    if isinstance(code, GRSCode):
        F = code.field
        return {"code": "grs", "k": code.k}, [
            _Block("points", F, code.points),
            _Block("multipliers", F, code.multipliers),
        ]
    raise TypeError(f"cannot serialize a {type(code).__name__}")


def _code_from(params, blocks, fields):
    if params["code"] == "goppa":
        return GoppaCode(fields["support"], blocks["support"], blocks["goppa_poly"].tolist())
    if params["code"] == "grs":
        return GRSCode(fields["points"], blocks["points"], int(params["k"]), blocks["multipliers"])
    raise WireError("bad-header", f"unknown code family {params['code']!r}")


def _enc_gen_pk(attr):
    def enc(pk):
        return {"t": pk.t}, [_Block(attr, pk.field, getattr(pk, attr))]

    return enc


def _enc_scrambled_sk(sk):
    params, blocks = _code_parts(sk.code)
    F = sk.code.field
    return params, blocks + [_Block("S", F, sk.S), _Block("P", F, sk.P)]


def _dec_scrambled_sk(cls):
    def dec(params, blocks, fields):
        return cls(_code_from(params, blocks, fields), blocks["S"], blocks["P"])

    return dec


_register(
    McEliecePublicKey, "publicKey", "mceliece", _enc_gen_pk("G_pub"),
    lambda p, b, f: McEliecePublicKey(b["G_pub"], int(p["t"]), f["G_pub"]),
)
_register(McElieceSecretKey, "secretKey", "mceliece", _enc_scrambled_sk, _dec_scrambled_sk(McElieceSecretKey))
_register(
    NiederreiterPublicKey, "publicKey", "niederreiter", _enc_gen_pk("H_pub"),
    lambda p, b, f: NiederreiterPublicKey(b["H_pub"], int(p["t"]), f["H_pub"]),
)
_register(NiederreiterSecretKey, "secretKey", "niederreiter", _enc_scrambled_sk, _dec_scrambled_sk(NiederreiterSecretKey))
_register(
    Alekhnovich1PublicKey, "publicKey", "alekhnovich1", _enc_gen_pk("G"),
    lambda p, b, f: Alekhnovich1PublicKey(b["G"], int(p["t"])),
)
_register(
    Alekhnovich1SecretKey, "secretKey", "alekhnovich1",
    lambda sk: ({}, [_Block("e", GF(2), sk.e)]),
    lambda p, b, f: Alekhnovich1SecretKey(b["e"]),
)
_register(
    Alekhnovich2PublicKey, "publicKey", "alekhnovich2", _enc_gen_pk("G"),
    lambda p, b, f: Alekhnovich2PublicKey(b["G"], int(p["t"])),
)
_register(
    Alekhnovich2SecretKey, "secretKey", "alekhnovich2",
    lambda sk: ({"t": sk.t}, [_Block("E", GF(2), sk.E), _Block("M", GF(2), sk.M), _Block("G", GF(2), sk.G)]),
    lambda p, b, f: Alekhnovich2SecretKey(b["E"], b["M"], b["G"], int(p["t"])),
)
_register(
    PkeCiphertext, "ciphertext", lambda ct: ct.scheme,
    lambda ct: ({}, [_Block("c", ct.field, ct.c)]),
    lambda p, b, f: PkeCiphertext(p["__scheme__"], f["c"], b["c"]),
)


def _bl_params(params: BlParams) -> dict:
    return {"q": params.q, "n": params.n, "r": params.r, "s": params.s, "rho": params.rho}


def _bl_from(p) -> BlParams:
    return BlParams(q=int(p["q"]), n=int(p["n"]), r=int(p["r"]), s=int(p["s"]), rho=float(p["rho"]))


_register(
    BlPublicKey, "publicKey", "bogdanov-lee",
    lambda pk: (_bl_params(pk.params), [_Block("P", pk.params.field, pk.P)]),
    lambda p, b, f: BlPublicKey(_bl_from(p), b["P"]),
)
_register(
    BlSecretKey, "secretKey", "bogdanov-lee",
    lambda sk: (
        _bl_params(sk.params),
        [
            _Block("S", None, sk.S),
            _Block("M", sk.params.field, sk.M),
            _Block("R", sk.params.field, sk.R),
            _Block("y", sk.params.field, sk.y),
            _Block("points", sk.params.field, sk.points),
        ],
    ),
    lambda p, b, f: BlSecretKey(_bl_from(p), b["S"], b["M"], b["R"], b["y"], b["points"]),
)
_register(
    BlCiphertext, "ciphertext", "bogdanov-lee",
    lambda ct: (_bl_params(ct.params), [_Block("c", ct.params.field, ct.c)]),
    lambda p, b, f: BlCiphertext(b["c"], _bl_from(p)),
)

_register(
    ArmknechtKey, "secretKey", "armknecht",
    lambda k: (
        {"y": k.pair.y, "kC": k.pair.kC, "mu": k.pair.mu, "error_budget": k.error_budget, "security": k.security},
        [_Block("x", k.field, k.pair.x), _Block("I", None, k.pair.I)],
    ),
    lambda p, b, f: ArmknechtKey(
        EvalCodePair(b["x"], int(p["y"]), int(p["kC"]), int(p["mu"]), b["I"], f["x"]),
        int(p["error_budget"]),
        int(p["security"]),
    ),
)
_register(
    EcCiphertext, "ciphertext", "armknecht",
    lambda ct: ({"gamma": ct.gamma, "mu": ct.mu}, [_Block("c", ct.field, ct.c)]),
    lambda p, b, f: EcCiphertext(b["c"], int(p["gamma"]), int(p["mu"]), f["c"]),
)


def _rank_sk_parts(sk: RankSecretKey, prefix: str = "") -> tuple[dict, list]:
    P, F = sk.params, sk.field
    params = {f"{prefix}q": P.q, f"{prefix}m": P.m, f"{prefix}n": P.n, f"{prefix}w": P.w,
              f"{prefix}product_valid": sk.product_valid}
    blocks = [
        _Block(f"{prefix}f", F, sk.f),
        _Block(f"{prefix}g", F, sk.g),
        _Block(f"{prefix}D", F.base, sk.D),
        _Block(f"{prefix}s", F, sk.s),
    ]
    return params, blocks


def _rank_sk_from(p, b, f, prefix: str = "") -> RankSecretKey:
    params = RankParams(int(p[f"{prefix}q"]), int(p[f"{prefix}m"]), int(p[f"{prefix}n"]), int(p[f"{prefix}w"]))
    F = f[f"{prefix}f"]
    return RankSecretKey(params, F, b[f"{prefix}f"], b[f"{prefix}g"], b[f"{prefix}D"], b[f"{prefix}s"],
                         bool(p[f"{prefix}product_valid"]))


def _ksm_parts(ksm: KeySwitchMaterial):
    params, blocks = _rank_sk_parts(ksm.sk2, "sk2.")
    params["count"] = len(ksm.ksk)
    for label, cts in (("ksk", ksm.ksk), ("projk", ksm.projk)):
        for i, ct in enumerate(cts):
            blocks += [_Block(f"{label}.{i}.u", ct.field, ct.u), _Block(f"{label}.{i}.v", ct.field, ct.v)]
    return params, blocks


def _ksm_from(p, b, f):
    sk2 = _rank_sk_from(p, b, f, "sk2.")
    count = int(p["count"])
    F = sk2.field

    def cts(label):
        return tuple(RankCiphertext(b[f"{label}.{i}.u"], b[f"{label}.{i}.v"], F) for i in range(count))

    return KeySwitchMaterial(sk2, cts("ksk"), cts("projk"))


_register(RankSecretKey, "secretKey", "rank", _rank_sk_parts, _rank_sk_from)
_register(
    RankCiphertext, "ciphertext", "rank",
    lambda ct: ({}, [_Block("u", ct.field, ct.u), _Block("v", ct.field, ct.v)]),
    lambda p, b, f: RankCiphertext(b["u"], b["v"], f["u"]),
)
_register(
    RankMulCiphertext, "ciphertext", "rank",
    lambda ct: ({}, [_Block("a", ct.field, ct.a), _Block("b", ct.field, ct.b), _Block("c", ct.field, ct.c)]),
    lambda p, b, f: RankMulCiphertext(b["a"], b["b"], b["c"], f["a"]),
)
_register(KeySwitchMaterial, "keySwitch", "rank", _ksm_parts, _ksm_from)


# ---------------------------------------------------------------------------
# Envelope
# ---------------------------------------------------------------------------


def _describe(block: _Block) -> str:
    shape = "x".join(str(d) for d in block.array.shape)
    if block.field is None:
        return f"dtype:{INDEX};shape:{shape}"
    F = block.field
    modulus = ",".join(str(c) for c in F.modulus)
    return f"p:{F.p};m:{F.m};modulus:{modulus};shape:{shape}"


def _codec_for(obj) -> _Codec:
    codec = _CODECS.get(type(obj).__name__)
    if codec is None or not isinstance(obj, codec.cls):
        raise TypeError(f"no wire format for {type(obj).__name__}")
    return codec


def _encode_parts(obj):
    codec = _codec_for(obj)
    params, blocks = codec.encode(obj)
    for b in blocks:
        b.array = np.asarray(b.array, dtype=np.int64)
    return codec, params, blocks


def _block_bytes(block: _Block) -> bytes:
    if block.field is None:
        if np.any(block.array < 0) or np.any(block.array >= 2**32):
            raise ValueError(f"index block {block.name!r} out of u32 range")
        return block.array.astype("<u4").tobytes()
    return pack_elements(block.field, block.array)


def serialize(obj) -> bytes:
    codec, params, blocks = _encode_parts(obj)
    lines = [
        f"type={type(obj).__name__}",
        f"scheme={codec.scheme(obj)}",
        f"version={VERSION}",
        f"role={codec.role}",
    ]
    lines += [f"param.{k}={json.dumps(v)}" for k, v in params.items()]
    lines += [f"block.{b.name}={_describe(b)}" for b in blocks]
    header = ("\n".join(lines) + "\n").encode("utf-8")
    out = [MAGIC, struct.pack("<I", len(header)), header]
    for b in blocks:
        data = _block_bytes(b)
        out += [struct.pack("<I", len(data)), data]
    return b"".join(out)


def payload_size(obj) -> int:
    """Bytes of packed key/ciphertext material, excluding header and framing."""
    _, _, blocks = _encode_parts(obj)
    return sum(block_size(b.field, b.array.shape) for b in blocks)


def _parse_descriptor(name: str, text: str):
    try:
        items = dict(part.split(":", 1) for part in text.split(";"))
        shape = tuple(int(d) for d in items["shape"].split("x")) if items["shape"] else ()
        if items.get("dtype") == INDEX:
            return None, shape
        p, m = int(items["p"]), int(items["m"])
        modulus = tuple(int(c) for c in items["modulus"].split(","))
        F = GF(p, m, modulus if m > 1 else None)
    except (KeyError, ValueError) as exc:
        raise WireError("bad-header", f"unreadable descriptor for block {name!r}: {exc}", name) from None
    return F, shape


def parse_header(data: bytes) -> tuple[dict, int]:
    """Header fields and the offset where the payload starts."""
    if data[: len(MAGIC)] != MAGIC:
        raise WireError("bad-magic", f"expected {MAGIC!r}, got {bytes(data[:len(MAGIC)])!r}")
    if len(data) < len(MAGIC) + 4:
        raise WireError("bad-header", "missing header length")
    (hlen,) = struct.unpack_from("<I", data, len(MAGIC))
    start = len(MAGIC) + 4
    if len(data) < start + hlen:
        raise WireError("bad-header", "header truncated")
    try:
        text = data[start : start + hlen].decode("utf-8")
    except UnicodeDecodeError:
        raise WireError("bad-header", "header is not UTF-8") from None
    header: dict = {"params": {}, "blocks": []}
    for line in text.splitlines():
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise WireError("bad-header", f"malformed header line {line!r}")
        if key.startswith("param."):
            try:
                header["params"][key[6:]] = json.loads(value)
            except json.JSONDecodeError:
                raise WireError("bad-header", f"unreadable parameter {key!r}") from None
        elif key.startswith("block."):
            name = key[6:]
            header["blocks"].append((name, *_parse_descriptor(name, value)))
        else:
            header[key] = value
    for required in ("type", "scheme", "version", "role"):
        if required not in header:
            raise WireError("bad-header", f"missing {required!r}")
    if header["role"] not in ROLES:
        raise WireError("bad-header", f"unknown role {header['role']!r}")
    if header["version"] != str(VERSION):
        raise WireError("bad-header", f"unsupported version {header['version']}")
    return header, start + hlen


def deserialize(data: bytes):
    data = bytes(data)
    header, pos = parse_header(data)
    codec = _CODECS.get(header["type"])
    if codec is None:
        raise WireError("bad-header", f"unknown object type {header['type']!r}")
    if codec.role != header["role"]:
        raise WireError("bad-header", f"role {header['role']!r} does not match type {header['type']!r}")
    blocks, fields = {}, {}
    for name, F, shape in header["blocks"]:
        if len(data) < pos + 4:
            raise WireError("bad-shape", f"payload truncated before block {name!r}", name)
        (length,) = struct.unpack_from("<I", data, pos)
        pos += 4
        try:
            expected = block_size(F, shape)
        except ValueError as exc:
            raise WireError("bad-shape", f"block {name!r}: {exc}", name) from None
        if length != expected:
            raise WireError("bad-shape", f"block {name!r} declares {length} bytes, shape {shape} needs {expected}", name)
        if len(data) < pos + length:
            raise WireError("bad-shape", f"block {name!r} truncated: {len(data) - pos} of {length} bytes", name)
        chunk = data[pos : pos + length]
        pos += length
        if F is None:
            blocks[name] = np.frombuffer(chunk, dtype="<u4").astype(np.int64).reshape(shape)
        else:
            blocks[name] = unpack_elements(F, chunk, shape, name)
        fields[name] = F
    if pos != len(data):
        raise WireError("trailing-bytes", f"{len(data) - pos} bytes after the last block")
    params = dict(header["params"])
    params["__scheme__"] = header["scheme"]
    try:
        obj = codec.decode(params, blocks, fields)
    except WireError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise WireError("bad-header", f"header and payload disagree: {exc}") from None
    if codec.scheme(obj) != header["scheme"]:
        raise WireError("bad-header", f"scheme {header['scheme']!r} does not match the payload")
    return obj


def role_of(obj) -> str:
    return _codec_for(obj).role
