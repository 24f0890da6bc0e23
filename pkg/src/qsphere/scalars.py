"""Exact scalars: rational functions of s = q**(1/2) over the rationals.

All coefficient arithmetic of the engine goes through :class:`Scalar`.
Values are immutable and kept in a canonical form, so equality and
hashing are structural.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .kernels import (padd, pcontent, pdivexact, peval_one, pgcd, pmul,
                      pneg, pscale, pshift)


class DivisionByZero(ZeroDivisionError):
    pass


class PoleAtOne(ArithmeticError):
    """A rational function has a non-removable pole at q = 1."""


Rational = Union[int, Fraction]


def _lowzeros(a):
    k = 0
    while a[k] == 0:
        k += 1
    return k


class LaurentPoly:
    """Sparse Laurent polynomial in s with rational coefficients.

    ``coefficients`` maps an s-exponent to a non-zero Fraction.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Optional[Mapping[int, Rational]] = None):
        coeffs = {}
        for e, c in (coefficients or {}).items():
            c = Fraction(c)
            if c:
                coeffs[int(e)] = c
        self.coefficients: Dict[int, Fraction] = coeffs

    @classmethod
    def monomial(cls, exponent: int, coefficient: Rational = 1) -> "LaurentPoly":
        return cls({exponent: coefficient})

    def is_zero(self) -> bool:
        return not self.coefficients

    def valuation(self) -> int:
        return min(self.coefficients)

    def degree(self) -> int:
        return max(self.coefficients)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coefficients)
        for e, c in other.coefficients.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coefficients.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: Dict[int, Fraction] = {}
        for e1, c1 in self.coefficients.items():
            for e2, c2 in other.coefficients.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(frozenset(self.coefficients.items()))

    def __repr__(self):
        return f"LaurentPoly({dict(sorted(self.coefficients.items()))})"

    def _integer_form(self) -> Tuple[Tuple[int, ...], int, int]:
        """(dense integer coefficients, valuation, common denominator)."""
        if not self.coefficients:
            return (), 0, 1
        lo, hi = self.valuation(), self.degree()
        den = 1
        for c in self.coefficients.values():
            den = den * c.denominator // gcd(den, c.denominator)
        dense = [0] * (hi - lo + 1)
        for e, c in self.coefficients.items():
            dense[e - lo] = int(c * den)
        return tuple(dense), lo, den


def _poly_to_laurent(p, shift, scale):
    return LaurentPoly({i + shift: Fraction(c) / scale for i, c in enumerate(p) if c})


class Scalar:
    """Element of Q(s), s = q**(1/2).

    Internally ``num * s**val / den`` with ``num`` and ``den`` integer
    polynomials (dense tuples), both with non-zero constant term,
    coprime over Z[s], and ``den`` with positive leading coefficient.
    """

    __slots__ = ("_n", "_d", "_v", "_h")

    def __init__(self, value: Union[int, Fraction, "Scalar"] = 0):
        if isinstance(value, Scalar):
            self._n, self._d, self._v = value._n, value._d, value._v
        else:
            fr = Fraction(value)
            if fr:
                self._n, self._d = (fr.numerator,), (fr.denominator,)
            else:
                self._n, self._d = (), (1,)
            self._v = 0
        self._h = None

    @classmethod
    def _raw(cls, n, d, v) -> "Scalar":
        obj = cls.__new__(cls)
        obj._n, obj._d, obj._v, obj._h = n, d, v, None
        return obj

    @classmethod
    def _make(cls, n, d, v) -> "Scalar":
        """Canonicalise an arbitrary integer-polynomial quotient."""
        if not d:
            raise DivisionByZero("zero denominator")
        if not n:
            return ZERO
        k = _lowzeros(n)
        if k:
            n = n[k:]
            v += k
        k = _lowzeros(d)
        if k:
            d = d[k:]
            v -= k
        if len(d) == 1 and len(n) == 1:
            a, b = n[0], d[0]
            g = gcd(a, b)
            if b < 0:
                g = -g
            return cls._raw((a // g,), (b // g,), v)
        g = pgcd(n, d)
        if g != (1,):
            n = pdivexact(n, g)
            d = pdivexact(d, g)
        if d[-1] < 0:
            n, d = pneg(n), pneg(d)
        return cls._raw(n, d, v)

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "Scalar":
        dense, lo, den = p._integer_form()
        return cls._make(dense, (den,), lo)

    @classmethod
    def s_power(cls, k: int, coefficient: Rational = 1) -> "Scalar":
        c = Fraction(coefficient)
        if not c:
            return ZERO
        return cls._raw((c.numerator,), (c.denominator,), k)

    @classmethod
    def q_power(cls, k: Rational, coefficient: Rational = 1) -> "Scalar":
        twice = Fraction(k) * 2
        if twice.denominator != 1:
            raise ValueError(f"q exponent {k} is not a multiple of 1/2")
        return cls.s_power(int(twice), coefficient)

    # ---- views ---------------------------------------------------------
    @property
    def denominator(self) -> LaurentPoly:
        """Denominator in the documented canonical form: monic, valuation 0."""
        lead = self._d[-1]
        return _poly_to_laurent(self._d, 0, lead)

    @property
    def numerator(self) -> LaurentPoly:
        lead = self._d[-1]
        return _poly_to_laurent(self._n, self._v, lead)

    def is_laurent(self) -> bool:
        return len(self._d) == 1

    def is_monomial(self) -> bool:
        return len(self._n) == 1 and len(self._d) == 1

    # ---- arithmetic ----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._n)

    def __neg__(self) -> "Scalar":
        if not self._n:
            return self
        return Scalar._raw(pneg(self._n), self._d, self._v)

    def __add__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if not other._n:
            return self
        if not self._n:
            return other
        n1, d1, v1 = self._n, self._d, self._v
        n2, d2, v2 = other._n, other._d, other._v
        if v1 > v2:
            n1 = pshift(n1, v1 - v2)
            v = v2
        else:
            n2 = pshift(n2, v2 - v1)
            v = v1
        if d1 == d2:
            if len(d1) == 1 and d1[0] == 1:
                n = padd(n1, n2)
                if not n:
                    return ZERO
                k = _lowzeros(n)
                if k:
                    n = n[k:]
                return Scalar._raw(n, d1, v + k)
            return Scalar._make(padd(n1, n2), d1, v)
        if len(d1) == 1 and len(d2) == 1:
            a, b = d1[0], d2[0]
            g = gcd(a, b)
            return Scalar._make(padd(pscale(n1, b // g), pscale(n2, a // g)),
                                (a // g * b,), v)
        g = pgcd(d1, d2)
        if g == (1,):
            return Scalar._make(padd(pmul(n1, d2), pmul(n2, d1)), pmul(d1, d2), v)
        d1g = pdivexact(d1, g)
        d2g = pdivexact(d2, g)
        return Scalar._make(padd(pmul(n1, d2g), pmul(n2, d1g)), pmul(d1g, d2), v)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return (-self) + other

    def __mul__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if not self._n or not other._n:
            return ZERO
        n1, d1 = self._n, self._d
        n2, d2 = other._n, other._d
        v = self._v + other._v
        if len(d1) == 1 and len(d2) == 1:
            if d1[0] == 1 and d2[0] == 1:
                return Scalar._raw(pmul(n1, n2), d1, v)
            if len(n1) == 1 and len(n2) == 1:
                return Scalar._make((n1[0] * n2[0],), (d1[0] * d2[0],), v)
        g1 = pgcd(n1, d2)
        g2 = pgcd(n2, d1)
        if g1 != (1,):
            n1 = pdivexact(n1, g1)
            d2 = pdivexact(d2, g1)
        if g2 != (1,):
            n2 = pdivexact(n2, g2)
            d1 = pdivexact(d1, g2)
        n = pmul(n1, n2)
        d = pmul(d1, d2)
        if d[-1] < 0:
            n, d = pneg(n), pneg(d)
        return Scalar._raw(n, d, v)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self._n:
            raise DivisionByZero("inverse of zero scalar")
        n, d = self._d, self._n
        if d[-1] < 0:
            n, d = pneg(n), pneg(d)
        return Scalar._raw(n, d, -self._v)

    def __truediv__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar(other) * self.inverse()

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # ---- comparison ----------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return (self._v == other._v and self._n == other._n
                    and self._d == other._d)
        if isinstance(other, (int, Fraction)):
            return self == Scalar(other)
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash((self._n, self._d, self._v))
        return self._h

    # ---- evaluation ----------------------------------------------------
    def limit_q1(self) -> Fraction:
        return limit_q1(self)

    def evaluate(self, s_value: Rational) -> Fraction:
        """Value at s = s_value (exact)."""
        x = Fraction(s_value)

        def ev(p):
            r = Fraction(0)
            for c in reversed(p):
                r = r * x + c
            return r

        den = ev(self._d)
        if not den:
            raise DivisionByZero(f"pole at s = {x}")
        return ev(self._n) * x ** self._v / den

    def sqrt(self) -> Optional["Scalar"]:
        """Square root in Q(s), or None if this is not a square."""
        if not self._n:
            return ZERO
        if self._v % 2:
            return None
        r = _poly_sqrt(pmul(self._n, self._d))
        if r is None:
            return None
        return Scalar._make(r, self._d, self._v // 2)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _poly_sqrt(p):
    """Integer polynomial square root (positive leading coefficient) or None."""
    if (len(p) - 1) % 2:
        return None
    c = pcontent(p)
    if p[-1] < 0:
        return None
    rc = isqrt(c)
    if rc * rc != c:
        return None
    pp = tuple(x // c for x in p)
    m = (len(pp) - 1) // 2
    lead = isqrt(pp[-1])
    if lead * lead != pp[-1]:
        return None
    # top-down coefficient recursion over Q
    r = [Fraction(0)] * (m + 1)
    r[m] = Fraction(lead)
    for k in range(m - 1, -1, -1):
        # coefficient of s^(m+k) in r^2 is sum_{i+j=m+k} r_i r_j
        acc = Fraction(pp[m + k])
        for i in range(k + 1, m):
            j = m + k - i
            if k < j <= m:
                acc -= r[i] * r[j]
        r[k] = acc / (2 * r[m])
    den = 1
    for x in r:
        den = den * x.denominator // gcd(den, x.denominator)
    ri = tuple(int(x * den) for x in r)
    if pmul(ri, ri) != tuple(x * den * den for x in pp):
        return None
    g = pcontent(ri)
    ri = tuple(x // g for x in ri)
    return pscale(ri, rc)


ZERO = Scalar._raw((), (1,), 0)
ONE = Scalar._raw((1,), (1,), 0)
S = Scalar._raw((1,), (1,), 1)
Q = Scalar._raw((1,), (1,), 2)
QINV = Scalar._raw((1,), (1,), -2)


def q_pow(k: Rational) -> Scalar:
    return Scalar.q_power(k)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar(x)


def normalize(num: LaurentPoly, den: LaurentPoly) -> Scalar:
    """Canonical scalar num/den; raises DivisionByZero for a zero denominator."""
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    return Scalar.from_laurent(num) / Scalar.from_laurent(den)


def limit_q1(x: Scalar) -> Fraction:
    """Value at q = 1 after cancellation."""
    x = as_scalar(x)
    d1 = peval_one(x._d)
    if d1 == 0:
        raise PoleAtOne(f"{x} has a pole at q = 1")
    return Fraction(peval_one(x._n), d1)


def equals(a: Scalar, b: Scalar) -> bool:
    return not (as_scalar(a) - as_scalar(b))


# ---- printing --------------------------------------------------------------

def _format_q_exponent(e: int) -> str:
    if e % 2:
        return f"q^({e}/2)"
    k = e // 2
    if k == 1:
        return "q"
    return f"q^{k}" if k > 0 else f"q^({k})"


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_laurent(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.coefficients):
        c = p.coefficients[e]
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = _format_rational(a)
        elif a == 1:
            body = _format_q_exponent(e)
        else:
            body = f"{_format_rational(a)}*{_format_q_exponent(e)}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def format_scalar(x: Scalar) -> str:
    num, den = x.numerator, x.denominator
    ns = _format_laurent(num)
    if den.coefficients == {0: Fraction(1)}:
        return ns
    if len(num.coefficients) > 1:
        ns = f"({ns})"
    return f"{ns}/({_format_laurent(den)})"


def scalar_factor_str(x: Scalar) -> str:
    """Printed form safe to use as the left factor of a product."""
    text = format_scalar(x)
    return text if x.is_monomial() else f"({text})"


# ---- the a-unknown layer ---------------------------------------------------

Monomial = Tuple[int, ...]
NVARS = 4


class MultiPoly:
    """Polynomial in the unknowns a1..a4 with Scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.terms: Dict[Monomial, Scalar] = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def variable(cls, index: int) -> "MultiPoly":
        """The unknown a_{index+1} (index is 0-based)."""
        mono = tuple(1 if k == index else 0 for k in range(NVARS))
        return cls({mono: ONE})

    @classmethod
    def constant(cls, c) -> "MultiPoly":
        return cls({(0,) * NVARS: as_scalar(c)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other) -> Optional["MultiPoly"]:
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return MultiPoly.constant(other)
        return None

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (Scalar, int, Fraction)):
            c = as_scalar(other)
            if not c:
                return MultiPoly()
            return MultiPoly({m: v * c for m, v in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        out: Dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                prev = out.get(m)
                out[m] = c1 * c2 if prev is None else prev + c1 * c2
        return MultiPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def variables(self) -> set:
        return {k for m in self.terms for k, e in enumerate(m) if e}

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * NVARS, ZERO)

    def substitute(self, values: Mapping[int, Union[Scalar, "MultiPoly"]]) -> "MultiPoly":
        """Replace unknown ``k`` (0-based) by ``values[k]``."""
        out = MultiPoly()
        for m, c in self.terms.items():
            term = MultiPoly({tuple(0 if k in values else e for k, e in enumerate(m)): c})
            for k, e in enumerate(m):
                if e and k in values:
                    v = values[k]
                    for _ in range(e):
                        term = term * v
            out = out + term
        return out

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(m), [-e for e in m])):
            c = self.terms[m]
            mono = "*".join(
                f"a{k + 1}" if e == 1 else f"a{k + 1}^{e}" for k, e in enumerate(m) if e)
            if not mono:
                parts.append(f"({c})")
            elif c == ONE:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def univariate_coefficients(p: MultiPoly, var: int) -> Dict[int, Scalar]:
    """Coefficients of a polynomial that involves only unknown ``var``."""
    out: Dict[int, Scalar] = {}
    for m, c in p.terms.items():
        if any(e for k, e in enumerate(m) if k != var):
            raise ValueError("polynomial is not univariate in the requested unknown")
        out[m[var]] = c
    return out


def poly_gcd_univariate(a: Dict[int, Scalar], b: Dict[int, Scalar]) -> Dict[int, Scalar]:
    """Monic gcd of univariate polynomials over Q(s) (dicts degree -> coefficient)."""

    def deg(p):
        return max(p) if p else -1

    a = {k: v for k, v in a.items() if v}
    b = {k: v for k, v in b.items() if v}
    while b:
        db, lb = deg(b), b[deg(b)]
        r = dict(a)
        while r and deg(r) >= db:
            dr = deg(r)
            f = r[dr] / lb
            for k, v in b.items():
                nv = r.get(k + dr - db, ZERO) - f * v
                if nv:
                    r[k + dr - db] = nv
                else:
                    r.pop(k + dr - db, None)
        a, b = b, r
    if not a:
        return {}
    lead = a[deg(a)]
    return {k: v / lead for k, v in a.items()}


def quadratic_roots(coeffs: Dict[int, Scalar]) -> Optional[list]:
    """Roots in Q(s) of a polynomial of degree <= 2; None if they are not rational."""
    d = max(coeffs) if coeffs else -1
    if d <= 0:
        return []
    if d == 1:
        return [-coeffs.get(0, ZERO) / coeffs[1]]
    a, b, c = coeffs[2], coeffs.get(1, ZERO), coeffs.get(0, ZERO)
    if d > 2:
        raise ValueError("degree > 2")
    disc = b * b - Scalar(4) * a * c
    r = disc.sqrt()
    if r is None:
        return None
    two_a = Scalar(2) * a
    roots = {(-b + r) / two_a, (-b - r) / two_a}
    return sorted(roots, key=lambda x: (x.limit_q1() if _finite_at_one(x) else 0, str(x)))


def _finite_at_one(x: Scalar) -> bool:
    try:
        x.limit_q1()
    except PoleAtOne:
        return False
    return True
