import numpy as np
import pytest

from cbhe.algebra import determinant, make_rng, matmul, rank, solve_linear
from cbhe.he_linear import (
    BlCiphertext,
    BlParams,
    bl_add,
    bl_decrypt,
    bl_encrypt,
    bl_keygen,
    sample_noise,
)


@pytest.fixture(scope="module")
def keys():
    return bl_keygen(BlParams(), make_rng(201))


def test_params_guard():
    with pytest.raises(ValueError, match="q > n"):
        BlParams(q=11, n=12)
    with pytest.raises(ValueError):
        BlParams(q=32)
    with pytest.raises(ValueError):
        BlParams(s=4)
    with pytest.raises(ValueError):
        BlParams(r=2)


def test_key_structure(keys):
    pk, sk = keys.public, keys.secret
    F = pk.params.field
    assert pk.P.shape == (12, 5)
    assert determinant(F, sk.R) == 1
    assert np.array_equal(pk.P, matmul(F, sk.M, sk.R))
    assert set(np.flatnonzero(sk.y)) <= set(sk.S.tolist())
    assert F.smul(1, int(sk.y.sum() % F.p)) == 1
    assert not matmul(F, sk.y, sk.M).any()
    assert len(set(sk.points.tolist())) == 12 and 0 not in sk.points


def test_y_annihilates_column_span(keys, rng):
    pk, sk = keys.public, keys.secret
    F = pk.params.field
    for _ in range(1000):
        x = F.random(5, rng)
        assert matmul(F, sk.y, matmul(F, pk.P, x)) == 0


def test_zero_hooks(keys):
    ct = bl_encrypt(keys.public, 0, x=np.zeros(5, dtype=np.int64), e=np.zeros(12, dtype=np.int64))
    assert not ct.c.any()


def test_ciphertext_offset_in_column_span(keys, rng):
    pk = keys.public
    F = pk.params.field
    for m in range(0, 31, 5):
        ct = bl_encrypt(pk, m, rng, e=np.zeros(12, dtype=np.int64))
        assert solve_linear(F, pk.P, F.sub(ct.c, m)) is not None
    assert rank(F, pk.P) == 5


def test_noiseless_always_decrypts(rng):
    kp = bl_keygen(BlParams(rho=0.0), rng)
    for _ in range(1000):
        m = int(rng.integers(0, 31))
        assert bl_decrypt(kp.secret, bl_encrypt(kp.public, m, rng)) == m


def test_noise_distribution(rng):
    p = BlParams(rho=0.25)
    E = np.stack([sample_noise(p, rng) for _ in range(4000)])
    assert abs((E != 0).mean() - 0.25) < 0.01
    assert E.min() >= 0 and E.max() < 31
    assert not sample_noise(BlParams(rho=0.0), rng).any()


def test_success_rate(keys):
    rng = make_rng(202)
    pk, sk = keys.public, keys.secret
    ms = rng.integers(0, 31, size=10_000)
    ok = sum(bl_decrypt(sk, bl_encrypt(pk, int(m), rng)) == m for m in ms) / ms.size
    assert ok >= 0.95**6 - 0.02


def test_decryption_depends_on_noise_only_through_S(keys, rng):
    pk, sk = keys.public, keys.secret
    outside = np.setdiff1d(np.arange(12), sk.S)
    for _ in range(300):
        m = int(rng.integers(0, 31))
        e = sample_noise(BlParams(rho=0.5), rng)
        out = bl_decrypt(sk, bl_encrypt(pk, m, rng, e=e))
        if not e[sk.S].any():
            assert out == m
        # noise outside the planted set never matters
        e2 = np.zeros(12, dtype=np.int64)
        e2[outside] = e[outside]
        assert bl_decrypt(sk, bl_encrypt(pk, m, rng, e=e2)) == m


def test_additive_homomorphism(rng):
    kp = bl_keygen(BlParams(rho=0.0), rng)
    for L in (1, 2, 10, 50):
        ms = rng.integers(0, 31, size=L)
        acc = bl_encrypt(kp.public, int(ms[0]), rng)
        for m in ms[1:]:
            acc = bl_add(acc, bl_encrypt(kp.public, int(m), rng))
        assert bl_decrypt(kp.secret, acc) == int(ms.sum()) % 31


def test_add_rejects_mismatch(keys, rng):
    ct = bl_encrypt(keys.public, 1, rng)
    with pytest.raises(ValueError, match="length"):
        bl_add(ct, BlCiphertext(ct.c[:-1], ct.params))
    other = BlParams(q=37)
    with pytest.raises(ValueError):
        bl_add(ct, BlCiphertext(ct.c.copy(), other))


def test_sum_noise_is_sum_of_noises(keys, rng):
    pk, sk = keys.public, keys.secret
    F = pk.params.field
    e1, e2 = sample_noise(pk.params, rng), sample_noise(pk.params, rng)
    c = bl_add(bl_encrypt(pk, 3, rng, e=e1), bl_encrypt(pk, 4, rng, e=e2))
    assert bl_decrypt(sk, c) == F.sadd(7, int(matmul(F, sk.y, F.add(e1, e2))))
