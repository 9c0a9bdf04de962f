import itertools

import numpy as np
import pytest

from cbhe.algebra import ext_expand, make_rng, matmul, rank
from cbhe.codes import rank_weight
from cbhe.he_rank import (
    RankCiphertext,
    RankParams,
    check_product_validity,
    digit_rows,
    dual_extract,
    rk_add,
    rk_decrypt,
    rk_decrypt_mul,
    rk_encrypt,
    rk_homomorphic_decrypt,
    rk_keygen,
    rk_keyswitch_keygen,
    rk_mul,
    rk_mul_add,
)

P = RankParams()
F = P.field


@pytest.fixture(scope="module")
def sk():
    return rk_keygen(P, make_rng(401))


def _msg(rng, n=8):
    return rng.integers(0, 2, size=n)


def _span(sk):
    """All q^w elements of span(f)."""
    return [
        int(np.bitwise_xor.reduce([int(a) * c for a, c in zip(sk.f, coeffs)]))
        for coeffs in itertools.product((0, 1), repeat=len(sk.f))
    ]


def test_params_guard():
    with pytest.raises(ValueError):
        RankParams(w=6)
    with pytest.raises(ValueError):
        RankParams(n=0)
    with pytest.raises(ValueError):
        RankParams(q=4)


def test_basis_and_dual(sk):
    B = ext_expand(F, sk.basis)
    assert rank(F.base, B) == 6 and sk.D.shape == (6, 4)
    # columns of D are the dual vectors of g_1..g_4
    assert np.array_equal(matmul(F.base, sk.D.T, ext_expand(F, sk.g)), np.eye(4, dtype=np.int64))
    assert not matmul(F.base, sk.D.T, ext_expand(F, sk.f)).any()
    assert np.all(dual_extract(F, sk.d(1), F.mul(int(sk.g[0]), np.ones(8, dtype=np.int64))) == 1)


def test_annihilation_exhaustive(sk):
    span = _span(sk)
    assert len(set(span)) == 4
    assert not dual_extract(F, sk.d(1), span).any()
    rng = make_rng(402)
    for _ in range(100):
        a = _msg(rng)
        for fi in sk.f:
            assert not dual_extract(F, sk.d(1), F.mul(int(fi), a)).any()


def test_extraction_exhaustive(sk):
    g1 = int(sk.g[0])
    for a in itertools.product((0, 1), repeat=8):
        a = np.array(a)
        assert np.array_equal(dual_extract(F, sk.d(1), F.mul(g1, a)), a)
        assert np.array_equal(dual_extract(F, sk.d(2), F.mul(F.smul(g1, g1), a)), a)


def test_secret_in_span(sk):
    S = ext_expand(F, sk.s)
    Fm = ext_expand(F, sk.f)
    assert rank(F.base, np.hstack([Fm, S])) == rank(F.base, Fm) == 2
    assert set(sk.s.tolist()) <= set(_span(sk))


def test_product_validity(sk, rng):
    assert sk.product_valid and check_product_validity(sk)
    assert sk.g[1] == F.smul(int(sk.g[0]), int(sk.g[0]))
    plain = rk_keygen(P, rng, product_valid=False)
    ct = rk_encrypt(plain, _msg(rng), rng)
    with pytest.raises(ValueError, match="product-valid"):
        rk_decrypt_mul(plain, rk_mul(ct, ct))


def test_zero_hooks(sk, rng):
    u = F.random(8, rng)
    ct = rk_encrypt(sk, np.zeros(8, dtype=np.int64), r1=u, R2=np.zeros((2, 8), dtype=np.int64))
    assert np.array_equal(ct.v, F.mul(sk.s, u))
    for _ in range(50):
        assert not rk_decrypt(sk, rk_encrypt(sk, np.zeros(8, dtype=np.int64), rng)).any()


def test_error_rank_weight(sk, rng):
    for _ in range(1000):
        m = _msg(rng)
        ct = rk_encrypt(sk, m, rng)
        e = F.sub(F.sub(ct.v, F.mul(sk.s, ct.u)), F.mul(int(sk.g[0]), m))
        assert rank_weight(F, e) <= 2


def test_message_guard(sk, rng):
    with pytest.raises(ValueError, match="length"):
        rk_encrypt(sk, np.zeros(7, dtype=np.int64), rng)
    with pytest.raises(ValueError, match="base field"):
        rk_encrypt(sk, np.full(8, 2), rng)


def test_roundtrip(sk, rng):
    for _ in range(1000):
        m = _msg(rng)
        assert np.array_equal(rk_decrypt(sk, rk_encrypt(sk, m, rng)), m)


def test_determinism(sk):
    m = np.array([1, 0, 1, 1, 0, 0, 1, 0])
    a, b = rk_encrypt(sk, m, make_rng(5)), rk_encrypt(sk, m, make_rng(5))
    assert a.u.tobytes() == b.u.tobytes() and a.v.tobytes() == b.v.tobytes()
    assert rk_decrypt(sk, a).tobytes() == rk_decrypt(sk, b).tobytes()
    assert rk_keygen(P, make_rng(9)).s.tobytes() == rk_keygen(P, make_rng(9)).s.tobytes()


def test_add_exhaustive_small(rng):
    small = RankParams(n=4)
    k = rk_keygen(small, rng)
    msgs = [np.array(a) for a in itertools.product((0, 1), repeat=4)]
    for m1, m2 in itertools.product(msgs, repeat=2):
        ct = rk_add(rk_encrypt(k, m1, rng), rk_encrypt(k, m2, rng))
        assert np.array_equal(rk_decrypt(k, ct), m1 ^ m2)


def test_iterated_sums(sk, rng):
    ms = rng.integers(0, 2, size=(50, 8))
    acc = rk_encrypt(sk, ms[0], rng)
    for m in ms[1:]:
        acc = rk_add(acc, rk_encrypt(sk, m, rng))
    assert np.array_equal(rk_decrypt(sk, acc), ms.sum(axis=0) % 2)
    z = rk_encrypt(sk, np.zeros(8, dtype=np.int64), rng)
    assert np.array_equal(rk_decrypt(sk, rk_add(acc, z)), ms.sum(axis=0) % 2)


def test_add_shape_mismatch(sk, rng):
    ct = rk_encrypt(sk, _msg(rng), rng)
    with pytest.raises(ValueError, match="shape"):
        rk_add(ct, RankCiphertext(ct.u[:-1], ct.v[:-1], F))


def test_mul_algebra(sk, rng):
    zero = RankCiphertext(np.zeros(8, dtype=np.int64), np.zeros(8, dtype=np.int64), F)
    ct = rk_encrypt(sk, _msg(rng), rng)
    z = rk_mul(ct, zero)
    assert not (z.a.any() or z.b.any() or z.c.any())
    s = sk.s
    for _ in range(100):
        c1, c2 = rk_encrypt(sk, _msg(rng), rng), rk_encrypt(sk, _msg(rng), rng)
        x, y = rk_mul(c1, c2), rk_mul(c2, c1)
        assert all(np.array_equal(getattr(x, k), getattr(y, k)) for k in "abc")
        lhs = F.add(F.add(x.a, F.mul(s, x.b)), F.mul(F.mul(s, s), x.c))
        rhs = F.mul(F.sub(c1.v, F.mul(s, c1.u)), F.sub(c2.v, F.mul(s, c2.u)))
        assert np.array_equal(lhs, rhs)


def test_mul_decrypt(sk, rng):
    for _ in range(1000):
        m1, m2 = _msg(rng), _msg(rng)
        mct = rk_mul(rk_encrypt(sk, m1, rng), rk_encrypt(sk, m2, rng))
        assert np.array_equal(rk_decrypt_mul(sk, mct), m1 & m2)
    zero = np.zeros(8, dtype=np.int64)
    mct = rk_mul(rk_encrypt(sk, zero, rng), rk_encrypt(sk, _msg(rng), rng))
    assert not rk_decrypt_mul(sk, mct).any()


def test_mul_ciphertext_additivity(sk, rng):
    for _ in range(100):
        m = [_msg(rng) for _ in range(4)]
        c = [rk_encrypt(sk, x, rng) for x in m]
        total = rk_mul_add(rk_mul(c[0], c[1]), rk_mul(c[2], c[3]))
        assert np.array_equal(rk_decrypt_mul(sk, total), (m[0] & m[1]) ^ (m[2] & m[3]))


def test_digit_recomposition(rng):
    for _ in range(100):
        u = F.random(8, rng)
        rows = digit_rows(F, u)
        acc = np.zeros(8, dtype=np.int64)
        for i, row in enumerate(rows):
            acc = F.add(acc, F.mul(F.p**i, row))
        assert np.array_equal(acc, u)


def test_keyswitch_material(sk, rng):
    ksm = rk_keyswitch_keygen(sk, P, rng)
    assert len(ksm.ksk) == len(ksm.projk) == 6
    d = sk.d(1)
    for i, ct in enumerate(ksm.ksk):
        assert np.array_equal(rk_decrypt(ksm.sk2, ct), dual_extract(F, d, F.mul(F.p**i, sk.s)))
    for i, ct in enumerate(ksm.projk):
        assert np.all(rk_decrypt(ksm.sk2, ct) == d[i])


def test_keyswitch_roundtrip_and_chain(sk, rng):
    k12 = rk_keyswitch_keygen(sk, P, rng)
    k23 = rk_keyswitch_keygen(k12.sk2, P, rng)
    for _ in range(200):
        m = _msg(rng)
        ct2 = rk_homomorphic_decrypt(rk_encrypt(sk, m, rng), k12)
        assert np.array_equal(rk_decrypt(k12.sk2, ct2), m)
        assert np.array_equal(rk_decrypt(k23.sk2, rk_homomorphic_decrypt(ct2, k23)), m)
    z = rk_homomorphic_decrypt(rk_encrypt(sk, np.zeros(8, dtype=np.int64), rng), k12)
    assert not rk_decrypt(k12.sk2, z).any()


def test_keyswitch_length_guard(sk, rng):
    ksm = rk_keyswitch_keygen(sk, P, rng)
    bad = type(ksm)(ksm.sk2, ksm.ksk[:-1], ksm.projk)
    with pytest.raises(ValueError, match="6 entries"):
        rk_homomorphic_decrypt(rk_encrypt(sk, _msg(rng), rng), bad)
