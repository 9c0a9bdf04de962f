"""Brute-force oracles for the underlying problems and the Prange estimate."""

import numpy as np

from cbhe.algebra import GF, matmul
from cbhe.codes import hamming_code
from cbhe.hardness import SdpInstance, dp_bruteforce, dp_to_sdp, gwcp_bruteforce, prange_workfactor, sdp_bruteforce

B = GF(2)
ham = hamming_code(3)
r = ham.encode([1, 0, 1, 1])
r[5] ^= 1
print("DP messages:", [m.tolist() for m in dp_bruteforce(B, ham.G, r, 1)])
print("SDP errors: ", [e.tolist() for e in sdp_bruteforce(dp_to_sdp(B, ham.G, r, 1))])
print("weight-3 codeword:", gwcp_bruteforce(B, ham.H, 3)[1], " weight 1:", gwcp_bruteforce(B, ham.H, 1)[0])

e = np.array([0, 1, 0, 0, 0, 0, 1])
print("t=2 solutions for a weight-2 syndrome:", len(sdp_bruteforce(SdpInstance(B, ham.H, matmul(B, ham.H, e), 2))))

for n, k, t in [(16, 8, 2), (1024, 524, 50), (3488, 2720, 64)]:
    it, cost = prange_workfactor(n, k, t)
    print(f"Prange [{n},{k}] t={t}: {it:.4g} iterations, 2^{cost:.1f} operations")
