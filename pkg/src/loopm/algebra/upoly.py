"""Dense univariate polynomials as coefficient lists, lowest degree first."""

from sympy import QQ


def _inverse(x):
    return QQ(1, x) if isinstance(x, int) else 1 / x


def trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def degree(a):
    return len(trim(a)) - 1


def add(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a, b):
    return add(a, [-x for x in b])


def mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return trim(out)


def divmod_(a, b):
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv = _inverse(b[-1])
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        c = r[-1] * inv
        q[shift] = c
        for i, y in enumerate(b):
            r[i + shift] = r[i + shift] - c * y
        r = trim(r[:-1]) if not r[-1] else trim(r)
    return trim(q), r


def rem(a, b):
    return divmod_(a, b)[1]


def monic(a):
    a = trim(a)
    inv = _inverse(a[-1])
    return [x * inv for x in a]


def gcdex(a, b):
    """Return (s, t, g) with s*a + t*b = g = monic gcd(a, b)."""
    r0, r1 = trim(a), trim(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    inv = _inverse(r0[-1])
    return [x * inv for x in s0], [x * inv for x in t0], [x * inv for x in r0]


def power(a, k):
    out = [1]
    for _ in range(k):
        out = mul(out, a)
    return out


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc
