"""Serialized sizes and a short benchmark report."""

from cbhe.algebra import make_rng
from cbhe.bench import bench_run
from cbhe.pke import PkeScheme, pke_keygen
from cbhe.wire import deserialize, parse_header, serialize

kp = pke_keygen(PkeScheme("mceliece"), make_rng(0))
blob = serialize(kp.public)
header, start = parse_header(blob)
print(f"McEliece public key: {len(blob)} bytes, payload starts at {start}")
print(blob[9:start].decode().strip())
assert serialize(deserialize(blob)) == blob

report = bench_run(trials=30, seed=1)
print(f"\n{'scheme':14}{'pk':>7}{'sk':>7}{'ct':>6}{'pt':>4}{'ratio':>7}{'enc us':>9}")
for tag, e in report["schemes"].items():
    enc = e["timings"]["encrypt"] * 1e6
    print(f"{tag:14}{e['publicKeyBytes']:7}{e['secretKeyBytes']:7}{e['ciphertextBytes']:6}{e['plaintextBytes']:4}{e['expansionRatio']:7.1f}{enc:9.1f}")
ex = report["extrapolation"]
print(f"\nMcEliece pk at [{ex['n']},{ex['k']}]: {ex['publicKeyBytes']} bytes = {ex['megabytes']:.3f} MB")
