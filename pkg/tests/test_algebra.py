import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from cbhe.algebra import (
    BINARY_MODULI,
    GF,
    IncompatibleFieldsError,
    determinant,
    ext_collapse,
    ext_expand,
    ff_inv,
    ff_mul,
    inverse,
    kernel_basis,
    make_rng,
    matmul,
    rank,
    rref,
    rref_systematic,
    sample_invertible,
    sample_permutation,
    solve_linear,
)
from cbhe.codes import hamming_code
from conftest import galois_field

SMALL_FIELDS = [(2, 1), (13, 1), (2, 3), (3, 2), (2, 8)]


def test_gf8_product_and_inverse_examples():
    F = GF(2, 3)
    assert F.modulus == (1, 1, 0, 1)
    X, X2 = F.element([0, 1]), F.element([0, 0, 1])
    assert ff_mul(X, X2).coeffs == (1, 1, 0)
    assert ff_inv(X).coeffs == (1, 0, 1)


def test_prime_field_inverse_example():
    assert int(ff_inv(GF(5).element(2))) == 3
    assert int(ff_inv(GF(13).element(2))) == 7


def test_identity_and_annihilator():
    F = GF(2, 4)
    for a in range(16):
        x = F.element(a)
        assert x * 1 == x
        assert x * 0 == 0
    assert ff_inv(F.element(1)) == 1


def test_zero_inverse_raises():
    with pytest.raises(ZeroDivisionError, match="division by zero"):
        ff_inv(GF(7).element(0))
    with pytest.raises(ZeroDivisionError):
        GF(2, 5).inv(np.array([3, 0]))


def test_mismatched_fields_rejected():
    with pytest.raises(IncompatibleFieldsError):
        ff_mul(GF(2, 3).element(3), GF(2, 4).element(3))


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError, match="reducible"):
        GF(2, 4, modulus=(1, 0, 1, 0, 1))
    with pytest.raises(ValueError):
        GF(4)


def test_fields_are_cached():
    assert GF(2, 6) is GF(2, 6)
    assert GF(2, 6).base is GF(2)


@pytest.mark.parametrize("m", sorted(BINARY_MODULI))
def test_binary_moduli_irreducible(m):
    galois = pytest.importorskip("galois")
    bits = BINARY_MODULI[m]
    coeffs = [(bits >> i) & 1 for i in range(m + 1)]
    assert galois.Poly(list(reversed(coeffs)), field=galois.GF(2)).is_irreducible()


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_arithmetic_matches_galois(p, m):
    F = GF(p, m)
    G = galois_field(F)
    a = np.repeat(np.arange(F.order), F.order)
    b = np.tile(np.arange(F.order), F.order)
    if F.order > 64:
        sel = make_rng(1).choice(a.size, 4096, replace=False)
        a, b = a[sel], b[sel]
    assert np.array_equal(F.mul(a, b), (G(a) * G(b)).view(np.ndarray))
    assert np.array_equal(F.add(a, b), (G(a) + G(b)).view(np.ndarray))
    assert np.array_equal(F.sub(a, b), (G(a) - G(b)).view(np.ndarray))
    nz = np.arange(1, F.order)
    assert np.array_equal(F.inv(nz), (G(nz) ** -1).view(np.ndarray))


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4)])
def test_field_axioms_exhaustive(p, m):
    F = GF(p, m)
    e = F.elements()
    a, b, c = (x.ravel() for x in np.meshgrid(e, e, e, indexing="ij"))
    assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
    assert np.array_equal(F.add(F.add(a, b), c), F.add(a, F.add(b, c)))
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))
    assert np.array_equal(F.mul(a, b), F.mul(b, a))
    nz = e[1:]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    assert np.all(F.add(e, F.neg(e)) == 0)


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_gf256_distributes(a, b, c):
    F = GF(2, 8)
    assert F.smul(a, F.sadd(b, c)) == F.sadd(F.smul(a, b), F.smul(a, c))


def test_ext_expand_examples():
    F = GF(2, 2)
    assert np.array_equal(ext_expand(F, [1, 2]), np.eye(2, dtype=np.int64))
    assert not ext_expand(GF(2, 5), np.zeros(7, dtype=np.int64)).any()
    assert ext_expand(GF(2, 5), np.zeros(7, dtype=np.int64)).shape == (5, 7)


def test_ext_roundtrip_and_linearity(rng):
    F = GF(3, 4)
    for _ in range(100):
        v, w = F.random(9, rng), F.random(9, rng)
        assert np.array_equal(ext_collapse(F, ext_expand(F, v)), v)
        lhs = ext_expand(F, F.add(v, w))
        rhs = F.base.add(ext_expand(F, v), ext_expand(F, w))
        assert np.array_equal(lhs, rhs)


def test_rref_systematic_examples(rng):
    B = GF(2)
    I = np.eye(4, dtype=np.int64)
    R, perm, r = rref_systematic(B, I)
    assert np.array_equal(R, I) and list(perm) == [0, 1, 2, 3] and r == 4
    R, _, r = rref_systematic(B, np.zeros((3, 5), dtype=np.int64))
    assert r == 0 and not R.any()
    r1, r2 = B.random(5, rng), B.random(5, rng)
    while rank(B, np.vstack([r1, r2])) < 2:
        r2 = B.random(5, rng)
    M = np.vstack([r1, r2, r1 ^ r2])
    # span enumeration: 2 independent rows give exactly 4 distinct combinations
    span = {tuple(matmul(B, np.array(c), M)) for c in itertools.product((0, 1), repeat=3)}
    assert len(span) == 4
    assert rref_systematic(B, M)[2] == 2


def test_rref_systematic_gives_identity_block(rng):
    F = GF(7)
    M = F.random((4, 9), rng)
    R, perm, r = rref_systematic(F, M)
    assert np.array_equal(R[:r][:, perm[:r]], np.eye(r, dtype=np.int64))


@pytest.mark.parametrize("p,m", [(7, 1), (2, 3), (3, 2)])
def test_rank_inverse_det_match_galois(p, m, rng):
    F = GF(p, m)
    G = galois_field(F)
    for _ in range(20):
        M = F.random((5, 5), rng)
        gm = G(M)
        assert rank(F, M) == np.linalg.matrix_rank(gm)
        assert determinant(F, M) == int(np.linalg.det(gm))
        if rank(F, M) == 5:
            assert np.array_equal(inverse(F, M), np.linalg.inv(gm).view(np.ndarray))
        N = F.random((4, 7), rng)
        assert np.array_equal(rref(F, N)[0], G(N).row_reduce().view(np.ndarray))


def test_sample_invertible_examples():
    B = GF(2)
    assert np.array_equal(sample_invertible(B, 1, make_rng(0)), [[1]])
    # all 16 binary 2x2 matrices, 6 invertible
    mats = [np.array(c).reshape(2, 2) for c in itertools.product((0, 1), repeat=4)]
    gl2 = {tuple(M.ravel()) for M in mats if rank(B, M) == 2}
    assert len(gl2) == 6
    rng = make_rng(3)
    seen = {tuple(sample_invertible(B, 2, rng).ravel()) for _ in range(300)}
    assert seen == gl2


def test_sample_invertible_rank_and_inverse():
    F = GF(5)
    rng = make_rng(9)
    for _ in range(1000):
        S = sample_invertible(F, 3, rng)
        assert rank(F, S) == 3
    S = sample_invertible(F, 6, rng)
    assert np.array_equal(matmul(F, S, inverse(F, S)), np.eye(6, dtype=np.int64))


def test_sample_permutation_properties():
    assert np.array_equal(sample_permutation(1, make_rng(0)), [[1]])
    rng = make_rng(4)
    for _ in range(100):
        P = sample_permutation(7, rng)
        assert np.array_equal(P @ P.T, np.eye(7, dtype=np.int64))
        assert np.all(P.sum(0) == 1) and np.all(P.sum(1) == 1)


def test_sample_permutation_uniform_on_s3():
    rng = make_rng(5)
    counts = Counter(tuple(np.argmax(sample_permutation(3, rng), axis=1)) for _ in range(6000))
    assert len(counts) == 6
    assert chisquare(list(counts.values())).pvalue > 0.001


def test_solve_linear_examples(rng):
    F = GF(7)
    b = F.random(4, rng)
    assert np.array_equal(solve_linear(F, np.eye(4, dtype=np.int64), b), b)
    assert solve_linear(F, np.zeros((3, 3), dtype=np.int64), [1, 0, 0]) is None
    for _ in range(50):
        A = F.random((4, 6), rng)
        x0 = F.random(6, rng)
        rhs = matmul(F, A, x0)
        x = solve_linear(F, A, rhs)
        assert np.array_equal(matmul(F, A, x), rhs)
    with pytest.raises(ValueError, match="dimension"):
        solve_linear(F, np.eye(3, dtype=np.int64), [1, 2])


def test_kernel_basis_examples(rng):
    F = GF(3)
    assert kernel_basis(F, np.eye(4, dtype=np.int64)).shape == (0, 4)
    assert kernel_basis(F, np.zeros((2, 3), dtype=np.int64)).shape == (3, 3)
    H = hamming_code(3).H
    K = kernel_basis(GF(2), H)
    assert K.shape == (4, 7)
    assert not matmul(GF(2), K, H.T).any()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 8))
def test_kernel_rank_nullity(seed, rows, cols):
    F = GF(5)
    M = F.random((rows, cols), make_rng(seed))
    K = kernel_basis(F, M)
    assert rank(F, M) + K.shape[0] == cols
    if K.shape[0]:
        assert not matmul(F, K, M.T).any()
        assert rank(F, K) == K.shape[0]


def test_rng_is_reproducible():
    a = make_rng(42).integers(0, 1 << 30, 10)
    b = make_rng(42).integers(0, 1 << 30, 10)
    assert np.array_equal(a, b)
