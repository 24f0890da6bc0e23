"""Dense integer polynomial kernels (pure Python reference implementation).

A polynomial is a tuple of Python ints, lowest degree first, with no
trailing zeros; the zero polynomial is the empty tuple. ``_kernels.pyx``
mirrors every function here with the same semantics.
"""

from math import gcd, isqrt

ZERO = ()
ONE = (1,)


def trim(a):
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return tuple(a[:n])


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    if len(a) == len(b):
        return trim(out)
    return tuple(out)


def psub(a, b):
    n = max(len(a), len(b))
    out = list(a) + [0] * (n - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return trim(out)


def pneg(a):
    return tuple(-c for c in a)


def pscale(a, c):
    if not c:
        return ZERO
    return tuple(x * c for x in a)


def pshift(a, k):
    """Multiply by s**k, k >= 0."""
    if not a or not k:
        return a
    return (0,) * k + a


def pmul(a, b):
    if not a or not b:
        return ZERO
    if len(a) == 1:
        return pscale(b, a[0])
    if len(b) == 1:
        return pscale(a, b[0])
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def pcontent(a):
    g = 0
    for c in a:
        g = gcd(g, c)
        if g == 1:
            break
    return g


def pdivexact(a, b):
    """Return a / b if b divides a over Z[s], else None."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return ZERO
    db = len(b) - 1
    da = len(a) - 1
    if da < db:
        return None
    if db == 0:
        c = b[0]
        out = []
        for x in a:
            qq, r = divmod(x, c)
            if r:
                return None
            out.append(qq)
        return tuple(out)
    rem = list(a)
    lb = b[-1]
    quo = [0] * (da - db + 1)
    for k in range(da - db, -1, -1):
        top = rem[k + db]
        if top:
            qq, r = divmod(top, lb)
            if r:
                return None
            quo[k] = qq
            for j in range(db + 1):
                rem[k + j] -= qq * b[j]
    for x in rem[:db]:
        if x:
            return None
    return tuple(quo)


def _maxnorm(a):
    return max(abs(c) for c in a)


def _interpolate(h, x):
    out = []
    half = x // 2
    while h:
        g = h % x
        if g > half:
            g -= x
        out.append(g)
        h = (h - g) // x
    return trim(out)


def _peval(a, x):
    r = 0
    for c in reversed(a):
        r = r * x + c
    return r


def _primitive_part(a):
    c = pcontent(a)
    if a[-1] < 0:
        c = -c
    if c == 1:
        return a
    return tuple(x // c for x in a)


def _prem(a, b):
    """Pseudo-remainder of a by b."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        d = len(r) - 1 - db
        top = r[-1]
        r = [x * lb for x in r]
        for j in range(db + 1):
            r[d + j] -= top * b[j]
        r = list(trim(r))
    return tuple(r)


def _gcd_prs(a, b):
    a = _primitive_part(a)
    b = _primitive_part(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, (_primitive_part(r) if r else ZERO)
    return _primitive_part(a)


def _gcd_primitive(a, b):
    """gcd of two primitive polynomials with positive leading coefficient."""
    if len(a) == 1 or len(b) == 1:
        return ONE
    if a == b:
        return a
    na, nb = _maxnorm(a), _maxnorm(b)
    # xi >= 2*min(|a|,|b|) + 2 makes a dividing candidate the true gcd
    x = max(2 * min(na, nb) + 29,
            2 * min(na // abs(a[-1]), nb // abs(b[-1])) + 2)
    for _ in range(6):
        h = gcd(_peval(a, x), _peval(b, x))
        if h:
            cand = _interpolate(h, x)
            if cand:
                cand = _primitive_part(cand)
                if pdivexact(a, cand) is not None and pdivexact(b, cand) is not None:
                    return cand
        x = 73794 * x * isqrt(isqrt(x)) // 27011
    return _gcd_prs(a, b)


def pgcd(a, b):
    """gcd over Z[s], normalised to a positive leading coefficient."""
    if not a:
        return _sign_fix(b)
    if not b:
        return _sign_fix(a)
    c = gcd(pcontent(a), pcontent(b))
    if len(a) == 1 or len(b) == 1:
        return (c,)
    g = _gcd_primitive(_primitive_part(a), _primitive_part(b))
    if c == 1:
        return g
    return tuple(x * c for x in g)


def _sign_fix(a):
    if a and a[-1] < 0:
        return pneg(a)
    return a


def peval_one(a):
    return sum(a)
