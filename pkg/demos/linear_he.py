"""Additively homomorphic sums with the planted-subset (Bogdanov-Lee) scheme."""

from cbhe.algebra import make_rng
from cbhe.he_linear import BlParams, bl_add, bl_decrypt, bl_encrypt, bl_keygen

rng = make_rng(7)
kp = bl_keygen(BlParams(rho=0.0), rng)
values = [3, 14, 15, 9, 26]
acc = bl_encrypt(kp.public, values[0], rng)
for v in values[1:]:
    acc = bl_add(acc, bl_encrypt(kp.public, v, rng))
print("sum of", values, "mod 31 =", bl_decrypt(kp.secret, acc))

noisy = bl_keygen(BlParams(), rng)
trials = 2000
ok = sum(bl_decrypt(noisy.secret, bl_encrypt(noisy.public, 5, rng)) == 5 for _ in range(trials))
print(f"with rho=0.05 noise: {ok}/{trials} fresh ciphertexts decrypt")
