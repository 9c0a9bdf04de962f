"""Dense univariate polynomials over a finite field.

Polynomials are plain Python lists of field integers, lowest degree first,
with no trailing zeros (the zero polynomial is ``[]``).  Every function takes
the field as its first argument and only uses its scalar methods
(``sadd``, ``ssub``, ``smul``, ``sinv``), so the helpers work for any
:class:`cbhe.algebra.Field`, including the prime fields used while a field's
own modulus is being validated.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence

Poly = List[int]


def trim(a: Iterable[int]) -> Poly:
    a = [int(x) for x in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a: Sequence[int]) -> int:
    """Degree of a trimmed polynomial; -1 for the zero polynomial."""
    return len(a) - 1


def add(F, a: Sequence[int], b: Sequence[int]) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.sadd(out[i], c)
    return trim(out)


def sub(F, a: Sequence[int], b: Sequence[int]) -> Poly:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = F.ssub(out[i], c)
    return trim(out)


def scale(F, a: Sequence[int], c: int) -> Poly:
    if c == 0:
        return []
    return trim(F.smul(x, c) for x in a)


def mul(F, a: Sequence[int], b: Sequence[int]) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = F.sadd(out[i + j], F.smul(x, y))
    return trim(out)


def divmod_(F, a: Sequence[int], b: Sequence[int]) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    lead_inv = F.sinv(b[-1])
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c == 0:
            continue
        c = F.smul(c, lead_inv)
        q[i - db] = c
        for j, y in enumerate(b):
            if y:
                r[i - db + j] = F.ssub(r[i - db + j], F.smul(c, y))
    return trim(q), trim(r[:db])


def mod(F, a: Sequence[int], b: Sequence[int]) -> Poly:
    return divmod_(F, a, b)[1]


def monic(F, a: Sequence[int]) -> Poly:
    if not a:
        return []
    return scale(F, a, F.sinv(a[-1]))


def evaluate(F, a: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.sadd(F.smul(acc, x), c)
    return acc


def gcd(F, a: Sequence[int], b: Sequence[int]) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, mod(F, a, b)
    return monic(F, a)


def inverse_mod(F, a: Sequence[int], g: Sequence[int]) -> Poly:
    """Inverse of ``a`` modulo ``g``; raises ZeroDivisionError if not a unit."""
    r0, r1 = list(g), mod(F, a, g)
    s0, s1 = [], [1]
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("polynomial is not invertible modulo g")
    return scale(F, s0, F.sinv(r0[0]))


def mulmod(F, a, b, g) -> Poly:
    return mod(F, mul(F, a, b), g)


def powmod(F, a: Sequence[int], e: int, g: Sequence[int]) -> Poly:
    result: Poly = [1]
    base = mod(F, a, g)
    while e:
        if e & 1:
            result = mulmod(F, result, base, g)
        e >>= 1
        if e:
            base = mulmod(F, base, base, g)
    return result


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(F, f: Sequence[int]) -> bool:
    """Root check followed by Rabin's test over the field ``F``."""
    f = trim(f)
    d = degree(f)
    if d < 1:
        return False
    if d == 1:
        return True
    if any(evaluate(F, f, x) == 0 for x in range(F.order)):
        return False
    if d <= 3:
        return True
    Q = F.order
    x = [0, 1]

    def frob(h, times):
        for _ in range(times):
            h = powmod(F, h, Q, f)
        return h

    if frob(x, d) != mod(F, x, f):
        return False
    for r in _prime_factors(d):
        h = sub(F, frob(x, d // r), x)
        if degree(gcd(F, h, f)) != 0:
            return False
    return True


def interpolate(F, xs: Sequence[int], ys: Sequence[int]) -> Poly:
    """Lagrange interpolation through distinct points ``xs``."""
    result: Poly = []
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        num: Poly = [1]
        den = 1
        for j, xj in enumerate(xs):
            if j != i:
                num = mul(F, num, [F.sneg(xj), 1])
                den = F.smul(den, F.ssub(xi, xj))
        result = add(F, result, scale(F, num, F.smul(yi, F.sinv(den))))
    return result
