"""Degree-2 polynomial evaluation over evaluation-code ciphertexts, with corruption."""

import numpy as np

from cbhe.algebra import make_rng
from cbhe.he_evalcode import BudgetExceededError, EcCiphertext, ec_decrypt, ec_encrypt, ec_eval_poly, ec_keygen

rng = make_rng(11)
key = ec_keygen(80, 2, 12, rng)
print("clean set I =", key.pair.I.tolist())

xs = [4, 9, 13]
cts = [ec_encrypt(x, key, rng) for x in xs]
f = {(1, 1, 0): 1, (0, 0, 1): 2, (0, 0, 0): 7}  # x1*x2 + 2*x3 + 7
out = ec_eval_poly(f, cts)
print("x1*x2 + 2*x3 + 7 =", ec_decrypt(out, key), "expected", (4 * 9 + 2 * 13 + 7) % 17, "gamma", out.gamma)

outside = np.setdiff1d(np.arange(12), key.pair.I)
c = out.c.copy()
c[outside] = rng.integers(0, 17, outside.size)
print("after overwriting every coordinate outside I:", ec_decrypt(EcCiphertext(c, out.gamma, out.mu, out.field), key))

try:
    ec_eval_poly({(1, 1, 1): 1}, cts)
except BudgetExceededError as exc:
    print("degree 3:", exc)
