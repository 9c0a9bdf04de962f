"""Rank-metric scheme: sums, one product, and a two-hop key switch."""

import numpy as np

from cbhe.algebra import make_rng
from cbhe.he_rank import (
    RankParams,
    rk_add,
    rk_decrypt,
    rk_decrypt_mul,
    rk_encrypt,
    rk_homomorphic_decrypt,
    rk_keygen,
    rk_keyswitch_keygen,
    rk_mul,
)

rng = make_rng(3)
P = RankParams()
sk = rk_keygen(P, rng)
print("basis f =", sk.f.tolist(), "g =", sk.g.tolist())

a, b = np.array([1, 0, 1, 1, 0, 1, 0, 0]), np.array([1, 1, 0, 1, 0, 0, 1, 1])
ca, cb = rk_encrypt(sk, a, rng), rk_encrypt(sk, b, rng)
print("a + b =", rk_decrypt(sk, rk_add(ca, cb)), "expected", a ^ b)
print("a * b =", rk_decrypt_mul(sk, rk_mul(ca, cb)), "expected", a & b)

k12 = rk_keyswitch_keygen(sk, P, rng)
k23 = rk_keyswitch_keygen(k12.sk2, P, rng)
hop = rk_homomorphic_decrypt(rk_homomorphic_decrypt(ca, k12), k23)
print("a after sk1 -> sk2 -> sk3:", rk_decrypt(k23.sk2, hop))
