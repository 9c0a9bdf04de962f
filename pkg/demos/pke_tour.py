"""McEliece, Niederreiter and both Alekhnovich schemes on desk-sized parameters."""

import numpy as np

from cbhe.algebra import make_rng
from cbhe.codes import random_error
from cbhe.pke import DecryptionError, PkeScheme, pke_decrypt, pke_encrypt, pke_keygen

rng = make_rng(2024)

kp = pke_keygen(PkeScheme("mceliece"), rng)
m = np.array([1, 0, 1, 1, 0, 0, 1, 0])
ct = pke_encrypt(kp.public, m, rng)
print("McEliece  G_pub", kp.public.G_pub.shape, "ct", ct.c, "->", pke_decrypt(kp.secret, ct))

kp = pke_keygen(PkeScheme("niederreiter"), rng)
F = kp.public.field
e = random_error(F, 12, 3, rng)
ct = pke_encrypt(kp.public, e)
print("Niederreiter  message", e, "syndrome", ct.c, "->", pke_decrypt(kp.secret, ct))

kp = pke_keygen(PkeScheme("alekhnovich1"), rng)
hits = [pke_decrypt(kp.secret, pke_encrypt(kp.public, 0, rng)) == 0 for _ in range(2000)]
print(f"Alekhnovich I  public G {kp.public.G.shape}, Pr[Dec(Enc(0)) = 0] ~ {np.mean(hits):.3f}")

kp = pke_keygen(PkeScheme("alekhnovich2"), rng)
ok = fail = 0
for _ in range(200):
    m = rng.integers(0, 2, kp.public.message_length)
    try:
        ok += np.array_equal(pke_decrypt(kp.secret, pke_encrypt(kp.public, m, rng)), m)
    except DecryptionError:
        fail += 1
print(f"Alekhnovich II  {ok} decrypted, {fail} reported failure out of 200")
