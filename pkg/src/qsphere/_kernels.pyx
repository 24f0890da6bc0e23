# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled mirror of ``_kernels_py``; same tuple-of-int polynomial semantics.

Coefficients stay Python ints (they grow beyond machine words during
reduction), so the speedup comes from typed loops and fewer temporaries.
"""

from math import gcd, isqrt

ZERO = ()
ONE = (1,)


cpdef tuple trim(a):
    cdef Py_ssize_t n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return tuple(a[:n])


cpdef tuple padd(tuple a, tuple b):
    cdef Py_ssize_t i, la, lb
    if len(a) < len(b):
        a, b = b, a
    la = len(a)
    lb = len(b)
    cdef list out = list(a)
    for i in range(lb):
        out[i] = out[i] + b[i]
    if la == lb:
        return trim(out)
    return tuple(out)


cpdef tuple psub(tuple a, tuple b):
    cdef Py_ssize_t i, n = max(len(a), len(b))
    cdef list out = list(a) + [0] * (n - len(a))
    for i in range(len(b)):
        out[i] = out[i] - b[i]
    return trim(out)


cpdef tuple pneg(tuple a):
    return tuple([-c for c in a])


cpdef tuple pscale(tuple a, c):
    if not c:
        return ZERO
    return tuple([x * c for x in a])


cpdef tuple pshift(tuple a, Py_ssize_t k):
    if not a or not k:
        return a
    return (0,) * k + a


cpdef tuple pmul(tuple a, tuple b):
    cdef Py_ssize_t i, j, la = len(a), lb = len(b)
    if not la or not lb:
        return ZERO
    if la == 1:
        return pscale(b, a[0])
    if lb == 1:
        return pscale(a, b[0])
    cdef list out = [0] * (la + lb - 1)
    for i in range(la):
        x = a[i]
        if x:
            for j in range(lb):
                out[i + j] = out[i + j] + x * b[j]
    return tuple(out)


cpdef pcontent(tuple a):
    g = 0
    for c in a:
        g = gcd(g, c)
        if g == 1:
            break
    return g


cpdef pdivexact(tuple a, tuple b):
    """Return a / b if b divides a over Z[s], else None."""
    cdef Py_ssize_t da, db, k, j
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
    cdef list rem = list(a)
    lb = b[db]
    cdef list quo = [0] * (da - db + 1)
    for k in range(da - db, -1, -1):
        top = rem[k + db]
        if top:
            qq, r = divmod(top, lb)
            if r:
                return None
            quo[k] = qq
            for j in range(db + 1):
                rem[k + j] = rem[k + j] - qq * b[j]
    for k in range(db):
        if rem[k]:
            return None
    return tuple(quo)


cdef _maxnorm(tuple a):
    m = 0
    for c in a:
        if c < 0:
            c = -c
        if c > m:
            m = c
    return m


cdef tuple _interpolate(h, x):
    out = []
    half = x // 2
    while h:
        g = h % x
        if g > half:
            g -= x
        out.append(g)
        h = (h - g) // x
    return trim(out)


cdef _peval(tuple a, x):
    r = 0
    cdef Py_ssize_t i
    for i in range(len(a) - 1, -1, -1):
        r = r * x + a[i]
    return r


cdef tuple _primitive_part(tuple a):
    c = pcontent(a)
    if a[len(a) - 1] < 0:
        c = -c
    if c == 1:
        return a
    return tuple([x // c for x in a])


cdef tuple _prem(tuple a, tuple b):
    cdef Py_ssize_t db = len(b) - 1, d, j
    cdef list r = list(a)
    lb = b[db]
    while r and len(r) - 1 >= db:
        d = len(r) - 1 - db
        top = r[len(r) - 1]
        r = [x * lb for x in r]
        for j in range(db + 1):
            r[d + j] = r[d + j] - top * b[j]
        r = list(trim(r))
    return tuple(r)


cdef tuple _gcd_prs(tuple a, tuple b):
    a = _primitive_part(a)
    b = _primitive_part(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, (_primitive_part(r) if r else ZERO)
    return _primitive_part(a)


cdef tuple _gcd_primitive(tuple a, tuple b):
    if len(a) == 1 or len(b) == 1:
        return ONE
    if a == b:
        return a
    na = _maxnorm(a)
    nb = _maxnorm(b)
    x = max(2 * min(na, nb) + 29,
            2 * min(na // abs(a[len(a) - 1]), nb // abs(b[len(b) - 1])) + 2)
    cdef int attempt
    for attempt in range(6):
        h = gcd(_peval(a, x), _peval(b, x))
        if h:
            cand = _interpolate(h, x)
            if cand:
                cand = _primitive_part(cand)
                if pdivexact(a, cand) is not None and pdivexact(b, cand) is not None:
                    return cand
        x = 73794 * x * isqrt(isqrt(x)) // 27011
    return _gcd_prs(a, b)


cdef tuple _sign_fix(tuple a):
    if a and a[len(a) - 1] < 0:
        return pneg(a)
    return a


cpdef tuple pgcd(tuple a, tuple b):
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
    return tuple([x * c for x in g])


cpdef peval_one(tuple a):
    return sum(a)
