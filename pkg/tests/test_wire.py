import struct

import numpy as np
import pytest

from cbhe.algebra import GF, make_rng
from cbhe.he_evalcode import EcCiphertext, ec_decrypt, ec_encrypt, ec_keygen
from cbhe.he_linear import BlCiphertext, BlParams, bl_decrypt, bl_encrypt, bl_keygen
from cbhe.he_rank import (
    RankCiphertext,
    RankParams,
    rk_decrypt,
    rk_encrypt,
    rk_keygen,
    rk_keyswitch_keygen,
    rk_mul,
)
from cbhe.pke import PkeCiphertext, PkeScheme, pke_decrypt, pke_encrypt, pke_keygen
from cbhe.wire import (
    MAGIC,
    WireError,
    block_size,
    deserialize,
    pack_elements,
    parse_header,
    payload_size,
    role_of,
    serialize,
    unpack_elements,
)

PKE = [
    ("mceliece", {}),
    ("mceliece", {"code": "grs"}),
    ("niederreiter", {}),
    ("niederreiter", {"code": "goppa"}),
    ("alekhnovich1", {}),
    ("alekhnovich2", {}),
]


def _arrays(obj):
    return {k: v for k, v in vars(obj).items() if isinstance(v, np.ndarray)}


def _same(a, b):
    assert type(a) is type(b)
    A, B = _arrays(a), _arrays(b)
    assert A.keys() == B.keys()
    for k in A:
        assert A[k].shape == B[k].shape and np.array_equal(A[k], B[k]), k


def roundtrip(obj):
    data = serialize(obj)
    back = deserialize(data)
    _same(obj, back)
    assert serialize(back) == data
    return back


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (13, 1), (31, 1), (2, 6), (3, 2), (2, 8)])
def test_pack_roundtrip_fuzz(p, m):
    F = GF(p, m)
    rng = make_rng(p * 100 + m)
    for shape in [(1,), (7,), (3, 5), (4, 13)]:
        for _ in range(50):
            A = F.random(shape, rng)
            data = pack_elements(F, A)
            assert len(data) == block_size(F, shape)
            assert np.array_equal(unpack_elements(F, data, shape), A)


def test_unpack_rejects_noncanonical():
    F = GF(3)
    data = bytearray(pack_elements(F, np.array([2, 1, 0])))
    data[0] |= 0x03  # digit value 3 is out of range for GF(3)
    with pytest.raises(WireError):
        unpack_elements(F, bytes(data), (3,))
    with pytest.raises(WireError):
        unpack_elements(GF(2), b"\x80", (3,))  # padding bit set


@pytest.mark.parametrize("tag,params", PKE, ids=lambda v: str(v))
def test_pke_roundtrip(tag, params):
    rng = make_rng(501)
    for _ in range(3):
        kp = pke_keygen(PkeScheme(tag, params), rng)
        pk, sk = roundtrip(kp.public), roundtrip(kp.secret)
        assert role_of(pk) == "publicKey" and role_of(sk) == "secretKey"
        if tag == "niederreiter":
            m = np.zeros(pk.H_pub.shape[1], dtype=np.int64)
            m[0] = 1
        elif tag == "alekhnovich1":
            m = 1
        elif tag == "alekhnovich2":
            m = np.zeros(pk.message_length, dtype=np.int64)
        else:
            m = np.ones(pk.G_pub.shape[0], dtype=np.int64)
        ct = roundtrip(pke_encrypt(pk, m, rng, **({"e": np.zeros(64, dtype=np.int64)} if tag.startswith("alek") else {})))
        assert ct.scheme == tag
        assert np.array_equal(pke_decrypt(sk, ct), pke_decrypt(kp.secret, ct))


def test_pke_ciphertext_fuzz():
    rng = make_rng(502)
    for tag, F, n in [("mceliece", GF(2), 16), ("niederreiter", GF(13), 6), ("alekhnovich1", GF(2), 64)]:
        for _ in range(2000):
            roundtrip(PkeCiphertext(tag, F, F.random(n, rng)))


def test_linear_roundtrip():
    rng = make_rng(503)
    kp = bl_keygen(BlParams(), rng)
    pk, sk = roundtrip(kp.public), roundtrip(kp.secret)
    assert pk.params == kp.public.params
    ct = roundtrip(bl_encrypt(pk, 17, rng, e=np.zeros(12, dtype=np.int64)))
    assert bl_decrypt(sk, ct) == 17
    F = GF(31)
    for _ in range(2000):
        roundtrip(BlCiphertext(F.random(12, rng), BlParams()))


def test_evalcode_roundtrip():
    rng = make_rng(504)
    key = ec_keygen(80, 2, 12, rng)
    k2 = roundtrip(key)
    assert k2.pair.y == key.pair.y and k2.error_budget == key.error_budget
    ct = roundtrip(ec_encrypt(5, key, rng))
    assert ec_decrypt(ct, k2) == 5
    F = GF(17)
    for _ in range(2000):
        roundtrip(EcCiphertext(F.random(12, rng), int(rng.integers(1, 3)), 2, F))


def test_rank_roundtrip():
    rng = make_rng(505)
    P = RankParams()
    sk = rk_keygen(P, rng)
    sk2 = roundtrip(sk)
    assert sk2.product_valid and sk2.params == P
    m = rng.integers(0, 2, 8)
    ct = roundtrip(rk_encrypt(sk, m, rng))
    assert np.array_equal(rk_decrypt(sk2, ct), m)
    roundtrip(rk_mul(ct, ct))
    ksm = rk_keyswitch_keygen(sk, P, rng)
    back = deserialize(serialize(ksm))
    assert serialize(back) == serialize(ksm) and role_of(ksm) == "keySwitch"
    assert len(back.ksk) == len(back.projk) == 6
    F = P.field
    for _ in range(2000):
        roundtrip(RankCiphertext(F.random(8, rng), F.random(8, rng), F))


def test_mceliece_payload_formula():
    kp = pke_keygen(PkeScheme("mceliece"), make_rng(506))
    k, n = kp.public.G_pub.shape
    assert payload_size(kp.public) == k * ((n + 7) // 8)
    kp = pke_keygen(PkeScheme("mceliece", {"code": "grs"}), make_rng(506))
    k, n = kp.public.G_pub.shape
    assert payload_size(kp.public) == k * ((n * 4 + 7) // 8)  # 4 bits per GF(13) digit


def test_header_is_readable():
    kp = pke_keygen(PkeScheme("mceliece"), make_rng(507))
    header, _ = parse_header(serialize(kp.public))
    assert header["scheme"] == "mceliece" and header["role"] == "publicKey"
    assert header["params"]["t"] == 2
    assert header["blocks"][0][0] == "G_pub" and header["blocks"][0][2] == (8, 16)


@pytest.fixture(scope="module")
def blob():
    return serialize(pke_keygen(PkeScheme("mceliece"), make_rng(508)).public)


def test_bad_magic(blob):
    with pytest.raises(WireError) as info:
        deserialize(b"XXXXX" + blob[5:])
    assert info.value.kind == "bad-magic"


def test_truncation_names_block(blob):
    with pytest.raises(WireError) as info:
        deserialize(blob[:-3])
    assert info.value.kind == "bad-shape" and "G_pub" in str(info.value)


def test_trailing_bytes(blob):
    with pytest.raises(WireError) as info:
        deserialize(blob + b"\x00")
    assert info.value.kind == "trailing-bytes"


def test_header_payload_mismatch(blob):
    hlen = struct.unpack_from("<I", blob, len(MAGIC))[0]
    header = blob[9 : 9 + hlen].replace(b"shape:8x16", b"shape:8x24")
    with pytest.raises(WireError) as info:
        deserialize(MAGIC + struct.pack("<I", len(header)) + header + blob[9 + hlen :])
    assert info.value.kind == "bad-shape"
    bad_role = blob[9 : 9 + hlen].replace(b"role=publicKey", b"role=ciphertext")
    with pytest.raises(WireError):
        deserialize(MAGIC + struct.pack("<I", len(bad_role)) + bad_role + blob[9 + hlen :])


def test_unknown_object():
    with pytest.raises(TypeError):
        serialize(object())
