import itertools

import numpy as np
import pytest

from cbhe import poly
from cbhe.algebra import GF, make_rng
from cbhe.he_evalcode import (
    BudgetExceededError,
    EcCiphertext,
    clean_polynomial,
    clean_set_size,
    ec_add,
    ec_constant,
    ec_decrypt,
    ec_encrypt,
    ec_eval_poly,
    ec_keygen,
    ec_mult,
    ec_scale,
)

F = GF(17)


@pytest.fixture(scope="module")
def key():
    return ec_keygen(128, 2, 12, make_rng(301))


def _corrupt_outside(ct, key, rng):
    outside = np.setdiff1d(np.arange(key.pair.n), key.pair.I)
    c = ct.c.copy()
    c[outside] = rng.integers(0, 17, size=outside.size)
    return EcCiphertext(c, ct.gamma, ct.mu, ct.field)


def test_clean_set_size():
    assert clean_set_size(1, 3) == 3
    assert clean_set_size(2, 3) == 5


def test_keygen_shape(key):
    pair = key.pair
    assert len(pair.I) == 5 and key.error_budget == 7
    assert len(set(pair.x.tolist())) == 12 and pair.y not in pair.x
    assert pair.Cprime_dimension == 5 and pair.C_dimension == 3


def test_keygen_guards(rng):
    with pytest.raises(ValueError, match="q > n"):
        ec_keygen(0, 2, 12, rng, q=11, n=12)
    with pytest.raises(ValueError):
        ec_keygen(0, 0, 12, rng)
    with pytest.raises(ValueError, match="exceeds"):
        ec_keygen(0, 6, 12, rng)
    with pytest.raises(ValueError):
        ec_keygen(0, 2, 13, rng)


def test_clean_set_is_uniform():
    rng = make_rng(302)
    counts = np.zeros(8)
    N = 10_000
    for _ in range(N):
        k = ec_keygen(0, 2, 8, rng, n=8)
        counts[k.pair.I] += 1
    assert np.all(np.abs(counts / N - 5 / 8) < 0.02)


def test_clean_encryption_is_codeword(rng):
    k = ec_keygen(0, 2, 12, rng, error_budget=0)
    ct = ec_encrypt(9, k, rng)
    p = poly.interpolate(F, k.pair.x[:3].tolist(), ct.c[:3].tolist())
    assert all(poly.evaluate(F, p, int(a)) == int(v) for a, v in zip(k.pair.x, ct.c))
    assert poly.evaluate(F, p, k.pair.y) == 9


def test_errors_only_outside_I(key, rng):
    outside = np.setdiff1d(np.arange(12), key.pair.I)
    for _ in range(200):
        m = int(rng.integers(0, 17))
        ct = ec_encrypt(m, key, rng)
        p = clean_polynomial(ct, key)
        assert poly.degree(p) < 3 and poly.evaluate(F, p, key.pair.y) == m
        clean = np.array([poly.evaluate(F, p, int(a)) for a in key.pair.x])
        assert set(np.flatnonzero(clean != ct.c)) <= set(outside.tolist())


def test_encryptions_are_randomized(key, rng):
    same = sum(np.array_equal(ec_encrypt(5, key, rng).c, ec_encrypt(5, key, rng).c) for _ in range(500))
    assert same <= 5  # collision probability is at most 17^-2


@pytest.mark.parametrize("m", range(17))
def test_full_message_sweep(key, rng, m):
    assert ec_decrypt(ec_encrypt(m, key, rng), key) == m


def test_worst_case_corruption(key, rng):
    for m in range(17):
        for _ in range(20):
            ct = _corrupt_outside(ec_encrypt(m, key, rng), key, rng)
            assert ec_decrypt(ct, key) == m


def test_budget_guard(key, rng):
    a = ec_encrypt(1, key, rng)
    with pytest.raises(BudgetExceededError, match="multiplication budget exceeded"):
        ec_decrypt(EcCiphertext(a.c, 3, a.mu, a.field), key)
    sq = ec_mult(a, a)
    with pytest.raises(BudgetExceededError):
        ec_mult(sq, a)
    with pytest.raises(BudgetExceededError):
        ec_eval_poly({(3,): 1}, [a])


def test_counters(key, rng):
    a, b = ec_encrypt(2, key, rng), ec_encrypt(3, key, rng)
    ab = ec_mult(a, b)
    assert (a.gamma, ab.gamma) == (1, 2)
    assert ec_add(ab, a).gamma == 2 and ec_add(a, b).gamma == 1
    assert ec_scale(ab, 4).gamma == 2


def test_homomorphism_exhaustive(key):
    rng = make_rng(303)
    for m1, m2 in itertools.product(range(17), repeat=2):
        a, b = ec_encrypt(m1, key, rng), ec_encrypt(m2, key, rng)
        assert ec_decrypt(ec_add(a, b), key) == (m1 + m2) % 17
        assert ec_decrypt(ec_mult(a, b), key) == (m1 * m2) % 17


def test_identities(key, rng):
    a = ec_encrypt(11, key, rng)
    assert ec_decrypt(ec_add(a, ec_encrypt(0, key, rng)), key) == 11
    assert ec_decrypt(ec_mult(a, ec_encrypt(1, key, rng)), key) == 11
    assert ec_decrypt(ec_eval_poly({(1,): 1}, [a]), key) == 11
    assert ec_decrypt(ec_eval_poly({(0,): 7}, [a]), key) == 7
    assert ec_decrypt(ec_constant(7, a), key) == 7


def test_eval_poly_matches_plaintext(key, rng):
    f = {(1, 1, 0): 1, (0, 0, 1): 1}
    for _ in range(100):
        ms = rng.integers(0, 17, size=3)
        cts = [ec_encrypt(int(m), key, rng) for m in ms]
        assert ec_decrypt(ec_eval_poly(f, cts), key) == (ms[0] * ms[1] + ms[2]) % 17


def test_clean_set_invariant_and_error_closure(key, rng):
    outside = set(np.setdiff1d(np.arange(12), key.pair.I).tolist())
    a, b, c = (ec_encrypt(int(v), key, rng) for v in rng.integers(0, 17, 3))
    for ct in (ec_add(a, b), ec_mult(a, b), ec_add(ec_mult(a, c), b), ec_scale(a, 5)):
        p = clean_polynomial(ct, key)
        assert poly.degree(p) <= ct.gamma * (key.pair.kC - 1)
        clean = np.array([poly.evaluate(F, p, int(x)) for x in key.pair.x])
        assert set(np.flatnonzero(clean != ct.c).tolist()) <= outside


def test_mismatched_ciphertexts(key, rng):
    a = ec_encrypt(1, key, rng)
    with pytest.raises(ValueError, match="length"):
        ec_add(a, EcCiphertext(a.c[:-1], 1, a.mu, a.field))
    with pytest.raises(ValueError, match="exponents"):
        ec_eval_poly({(1, 1): 1}, [a])
