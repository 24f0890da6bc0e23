"""The first order calculi on X: one-forms, right multiplication, d, theta, * and the gamma bases.

A one-form is a dict ``(word, l) -> coefficient`` meaning sum coeff * word * beta_l,
where beta is dx, g+ (gamma plus) or g- (gamma minus). Coefficients are
Scalars, or MultiPolys when the bimodule coefficients are left symbolic.
Right-module expressions are dicts ``(l, word) -> coefficient`` meaning
sum coeff * dx_l . word.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

from .algebra import (AlgebraElement, SphereAlgebra, Word, add_into, format_terms,
                      sphere_algebra, word_key, word_str)
from .scalars import ONE, Q, QINV, ZERO, Scalar, as_scalar, q_pow
from .tensors import structure

FormKey = Tuple[Word, int]
FormTerms = Dict[FormKey, object]

BASES = ("dx", "g+", "g-")


class InvalidParameter(ValueError):
    pass


def sign_value(sign) -> int:
    """Accept +1/-1, '+'/'-', 'plus'/'minus'."""
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise InvalidParameter(f"sign must be plus or minus, got {sign!r}")


def form_key(k: FormKey):
    w, l = k
    return (len(w),) + w + (l,)


def form_str(terms: FormTerms, basis: str = "dx") -> str:
    def show(k):
        w, l = k
        b = f"{basis}{l}" if basis == "dx" else f"{basis}{l}"
        return b if not w else f"{word_str(w)}*{b}"
    return format_terms(terms, show, form_key)


def add_form(acc: FormTerms, terms: FormTerms, c=ONE) -> None:
    add_into(acc, terms, c)


def scale_form(terms: FormTerms, c) -> FormTerms:
    c = as_scalar(c) if not hasattr(c, "terms") else c
    out = {}
    for k, v in terms.items():
        nv = v * c
        if nv:
            out[k] = nv
    return out


def sub_forms(a: FormTerms, b: FormTerms) -> FormTerms:
    out = dict(a)
    add_into(out, b, -ONE)
    return out


class OneForm:
    """Left-module element sum coeff * word * beta_l with a basis tag."""

    __slots__ = ("terms", "basis")

    def __init__(self, terms: Optional[FormTerms] = None, basis: str = "dx"):
        if basis not in BASES:
            raise InvalidParameter(f"unknown basis {basis!r}")
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        self.basis = basis

    def _check(self, other):
        if not isinstance(other, OneForm) or other.basis != self.basis:
            raise TypeError("one-forms must share a basis")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        add_into(out, other.terms)
        return OneForm(out, self.basis)

    def __neg__(self):
        return OneForm({k: -v for k, v in self.terms.items()}, self.basis)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return OneForm(scale_form(self.terms, c), self.basis)

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.basis == other.basis and self.terms == other.terms

    def __hash__(self):
        return hash((self.basis, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return form_str(self.terms, self.basis)

    def __repr__(self):
        return f"OneForm({str(self)!r})"


# ---- coefficient sets ------------------------------------------------------

def calculus_coefficients(N: int, sign) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
    """(a1, a2, a3, a4) of the bimodule structure of the calculus with the given sign."""
    e = sign_value(sign)
    qN1 = q_pow(N - 1)
    a1 = Scalar(e)
    a2 = e * Q - ONE
    a3 = (q_pow(N) - q_pow(N - 2)) / (ONE - e * qN1)
    a4 = (ONE - e * Q) * (ONE + q_pow(N - 2)) / (ONE - e * qN1)
    return a1, a2, a3, a4


def theta_commutator_coefficient(N: int, sign) -> Scalar:
    """c with theta*x_i - x_i*theta = c dx_i."""
    e = sign_value(sign)
    return e * QINV * (ONE - e * Q) * (ONE - e * q_pow(N - 1)) / (ONE + q_pow(N - 2))


def theta_prime_factor(N: int, sign) -> Scalar:
    e = sign_value(sign)
    return e * Q * (ONE + q_pow(N - 2)) / ((ONE - e * Q) * (ONE - e * q_pow(N - 1)))


def gamma_alphas(N: int, sign) -> Dict[str, Scalar]:
    e = sign_value(sign)
    den = ONE - e * q_pow(N - 1)
    base = ONE + q_pow(N - 2)
    return {"+": -base / den, "-": e * Q * base / den}


LIMIT_TERMS = ("x_j dx_i", "x_i dx_j", "(i=j')theta", "x_i x_j theta")


def classical_limit_table(sign, N: int) -> Dict[str, object]:
    """q -> 1 limits of the bimodule rule, read per structure.

    At q = 1, Rinv^{kl}_{ij} x_k dx_l = x_j dx_i, K^{kl}_{ij} x_k dx_l = (i=j') theta
    and C^{kl} x_i x_j x_k dx_l = x_i x_j theta, so the four coefficients map
    one-to-one onto LIMIT_TERMS.
    """
    coeffs = [c.limit_q1() for c in calculus_coefficients(N, sign)]
    terms = dict(zip(LIMIT_TERMS, coeffs))
    commutative = {"x_j dx_i": 1, "x_i dx_j": 0, "(i=j')theta": 0, "x_i x_j theta": 0}
    return {
        "terms": terms,
        "theta_commutator": theta_commutator_coefficient(N, sign).limit_q1(),
        "noncommutative": terms != commutative,
    }


def limit_str(table: Dict[str, object]) -> str:
    out = ""
    for name, c in table["terms"].items():
        if not c:
            continue
        body = name if abs(c) == 1 else f"{abs(c)} {name}"
        if not out:
            out = body if c > 0 else f"-{body}"
        else:
            out += f" {'+' if c > 0 else '-'} {body}"
    return f"dx_i . x_j = {out or '0'}"


class FirstOrderCalculus:
    """Bimodule dx_i . x_j = a1 Rinv x dx + a2 x_i dx_j + a3 K x dx + a4 C^{kl} x_i x_j x_k dx_l."""

    def __init__(self, N: int, sign=1, coefficients: Optional[Sequence] = None,
                 algebra: Optional[SphereAlgebra] = None):
        self.N = N
        self.sign = sign_value(sign)
        self.algebra = algebra or sphere_algebra(N)
        self.data = structure(N)
        if coefficients is None:
            coefficients = calculus_coefficients(N, self.sign)
        self.coefficients = tuple(coefficients)
        self._basic: Dict[Tuple[int, int], FormTerms] = {}
        self._rm_cache: Dict[Tuple[Word, int, int], FormTerms] = {}
        self._right_cache: Dict[FormKey, Dict] = {}

    @property
    def indices(self):
        return self.data.indices

    # right multiplication ------------------------------------------------------
    def basic_product(self, i: int, j: int) -> FormTerms:
        """Left-module expression of dx_i . x_j."""
        key = (i, j)
        hit = self._basic.get(key)
        if hit is not None:
            return hit
        a1, a2, a3, a4 = self.coefficients
        d = self.data
        out: FormTerms = {}
        for k, l, v in d.Rinv.column(i, j):
            add_into(out, {((k,), l): a1 * v})
        add_into(out, {((i,), j): a2 * ONE})
        for k, l, v in d.K.column(i, j):
            add_into(out, {((k,), l): a3 * v})
        for (k, l), c in d.C.entries.items():
            for w, cw in self.algebra.word_product((), (i, j, k)).items():
                add_into(out, {(w, l): a4 * (c * cw)})
        self._basic[key] = out
        return out

    def _right_letter(self, u: Word, i: int, a: int) -> FormTerms:
        key = (u, i, a)
        hit = self._rm_cache.get(key)
        if hit is not None:
            return hit
        out: FormTerms = {}
        wp = self.algebra.word_product
        for (w, l), c in self.basic_product(i, a).items():
            for x, cx in wp(u, w).items():
                add_into(out, {(x, l): c * cx})
        self._rm_cache[key] = out
        return out

    def right_mult_word(self, terms: FormTerms, v: Word) -> FormTerms:
        cur = terms
        for a in v:
            nxt: FormTerms = {}
            for (u, i), c in cur.items():
                for k, cv in self._right_letter(u, i, a).items():
                    add_into(nxt, {k: c * cv})
            cur = nxt
        return cur

    def right_mult(self, terms: FormTerms, element: Dict[Word, Scalar]) -> FormTerms:
        out: FormTerms = {}
        for v, c in element.items():
            add_into(out, self.right_mult_word(terms, v), c)
        return out

    def left_mult(self, element: Dict[Word, Scalar], terms: FormTerms) -> FormTerms:
        out: FormTerms = {}
        wp = self.algebra.word_product
        for (u, l), c in terms.items():
            for v, cv in element.items():
                for x, cx in wp(v, u).items():
                    add_into(out, {(x, l): c * (cv * cx)})
        return out

    def normalize(self, terms: FormTerms) -> FormTerms:
        """Bring the algebra coefficients of a one-form into normal form."""
        out: FormTerms = {}
        wp = self.algebra.word_product
        for (u, l), c in terms.items():
            for x, cx in wp((), u).items():
                add_into(out, {(x, l): c * cx})
        return out

    # differentiation ---------------------------------------------------------
    def differentiate_word(self, w: Word) -> FormTerms:
        out: FormTerms = {}
        wp = self.algebra.word_product
        for p in range(len(w)):
            pre = {(u, w[p]): c for u, c in wp((), w[:p]).items()}
            add_into(out, self.right_mult_word(pre, w[p + 1:]))
        return out

    def differentiate(self, element: Dict[Word, Scalar]) -> FormTerms:
        out: FormTerms = {}
        for w, c in element.items():
            add_into(out, self.differentiate_word(w), c)
        return out

    def dx(self, i: int) -> FormTerms:
        return {((), i): ONE}

    # theta -------------------------------------------------------------------
    def theta(self) -> FormTerms:
        return {((k,), l): c for (k, l), c in self.data.C.entries.items()}

    def theta_commutator(self, i: int) -> FormTerms:
        """theta . x_i - x_i . theta."""
        th = self.theta()
        return sub_forms(self.right_mult_word(th, (i,)), self.left_mult({(i,): ONE}, th))

    # right-module form (dx . x) ----------------------------------------------
    def _right_expansion(self, i: int, j: int) -> Dict[Tuple[int, Word], Scalar]:
        """Right-module expression of x_i dx_j by the mirrored bimodule rule."""
        a1, a2, a3, a4 = self.coefficients
        d = self.data
        out: Dict = {}
        for k, l, v in d.Rinv.column(i, j):
            add_into(out, {(k, (l,)): a1 * v})
        add_into(out, {(i, (j,)): a2})
        for k, l, v in d.K.column(i, j):
            add_into(out, {(k, (l,)): a3 * v})
        for (k, l), c in d.C.entries.items():
            for w, cw in self.algebra.word_product((), (l, i, j)).items():
                add_into(out, {(k, w): a4 * c * cw})
        return out

    def _to_right_basic(self, u: Word, j: int) -> Dict:
        key = (u, j)
        hit = self._right_cache.get(key)
        if hit is not None:
            return hit
        if not u:
            res = {(j, ()): ONE}
        else:
            head, i = u[:-1], u[-1]
            res = {}
            wp = self.algebra.word_product
            for (k, w), c in self._right_expansion(i, j).items():
                for (m, v), cv in self._to_right_basic(head, k).items():
                    for x, cx in wp(v, w).items():
                        add_into(res, {(m, x): c * cv * cx})
        self._right_cache[key] = res
        return res

    def to_right_module(self, terms: FormTerms) -> Dict[Tuple[int, Word], Scalar]:
        out: Dict = {}
        for (u, j), c in terms.items():
            add_into(out, self._to_right_basic(u, j), c)
        return out

    def to_left_module(self, rterms: Dict[Tuple[int, Word], Scalar]) -> FormTerms:
        out: FormTerms = {}
        for (l, w), c in rterms.items():
            add_into(out, self.right_mult_word({((), l): ONE}, w), c)
        return out

    # star ----------------------------------------------------------------------
    def star_form(self, terms: FormTerms) -> FormTerms:
        """(w dx_l)* = C^{lj} dx_j . w*, returned in left-module form."""
        C = self.data.C
        out: FormTerms = {}
        for (w, l), c in terms.items():
            wstar = self.algebra.star_terms({w: ONE})
            for (ll, j), clj in C.entries.items():
                if ll != l:
                    continue
                add_into(out, self.right_mult({((), j): clj}, wstar), c)
        return out

    # gamma bases -----------------------------------------------------------------
    def gamma(self, variant: str, alpha: Optional[Scalar] = None) -> "GammaBasis":
        return GammaBasis(self, variant, alpha)


class GammaBasis:
    """gamma_i = dx_i + alpha x_i theta for one of the two distinguished alphas."""

    def __init__(self, calc: FirstOrderCalculus, variant: str, alpha: Optional[Scalar] = None):
        if variant not in ("+", "-"):
            raise InvalidParameter(f"gamma variant must be + or -, got {variant!r}")
        self.calc = calc
        self.variant = variant
        self.alpha = alpha if alpha is not None else gamma_alphas(calc.N, calc.sign)[variant]
        if self.alpha == -ONE:
            raise InvalidParameter("alpha = -1 gives no basis")
        self.tag = "g" + variant
        d = calc.data
        # the linear rule carries the calculus sign: +-Rhat for g+, +-Rhat^{-1} for g-
        T = d.R if variant == "+" else d.Rinv
        self.T = T if calc.sign == 1 else T.scale(-ONE)

    def from_gamma(self, gterms: FormTerms) -> FormTerms:
        """gamma_l -> dx_l + alpha C^{km} x_l x_k dx_m."""
        calc = self.calc
        out: FormTerms = {}
        for (u, l), c in gterms.items():
            add_into(out, {(u, l): c})
            for (k, m), ckm in calc.data.C.entries.items():
                for x, cx in calc.algebra.word_product(u, (l, k)).items():
                    add_into(out, {(x, m): c * self.alpha * ckm * cx})
        return out

    def to_gamma(self, terms: FormTerms) -> FormTerms:
        """dx_l -> gamma_l - alpha/(alpha+1) C^{km} x_l x_k gamma_m."""
        calc = self.calc
        beta = self.alpha / (self.alpha + ONE)
        out: FormTerms = {}
        for (u, l), c in terms.items():
            add_into(out, {(u, l): c})
            for (k, m), ckm in calc.data.C.entries.items():
                for x, cx in calc.algebra.word_product(u, (l, k)).items():
                    add_into(out, {(x, m): -c * beta * ckm * cx})
        return out

    def right_mult_letter(self, gterms: FormTerms, j: int) -> FormTerms:
        """(u gamma_i) x_j = T^{kl}_{ij} (u x_k) gamma_l with T = +-Rhat or +-Rhat^{-1}."""
        out: FormTerms = {}
        wp = self.calc.algebra.word_product
        for (u, i), c in gterms.items():
            for k, l, v in self.T.column(i, j):
                for x, cx in wp(u, (k,)).items():
                    add_into(out, {(x, l): c * v * cx})
        return out

    def right_mult_word(self, gterms: FormTerms, w: Word) -> FormTerms:
        for a in w:
            gterms = self.right_mult_letter(gterms, a)
        return gterms

    def commutation_holds(self) -> bool:
        """Conjugating the dx rule by the basis change reproduces the linear gamma rule."""
        calc = self.calc
        for i in calc.indices:
            gi = self.from_gamma({((), i): ONE})
            for j in calc.indices:
                direct = self.to_gamma(calc.right_mult_word(gi, (j,)))
                if direct != self.right_mult_letter({((), i): ONE}, j):
                    return False
        return True


@lru_cache(maxsize=None)
def calculus(N: int, sign: int) -> FirstOrderCalculus:
    return FirstOrderCalculus(N, sign)


# ---- compatibility conditions --------------------------------------------------

CONDITIONS = ("d-sphere", "d-quadratic", "right-sphere", "right-quadratic")


def _d_of_product(calc: FirstOrderCalculus, i: int, j: int) -> FormTerms:
    """dx_i . x_j + x_i dx_j, i.e. d(x_i x_j) before any use of the relations."""
    f = calc.right_mult_word(calc.dx(i), (j,))
    add_into(f, {((i,), j): ONE})
    return f


def compatibility_conditions(calc: FirstOrderCalculus, literal_quadratic: bool = False,
                             which=CONDITIONS) -> Dict[str, list]:
    """Left-module forms that must vanish for the bimodule rule to define a calculus.

    The first two conditions come from differentiating the sphere relation and the
    quadratic relations, the last two from right-multiplying dx_i by them.
    The quadratic relation reads Rhat x x - q x x = (K-part) or equivalently
    Rinv x x - q^{-1} x x = (K-part); ``literal_quadratic`` pairs Rinv with q
    instead, which is not implied by the relations and serves as a control.
    """
    d = calc.data
    out: Dict[str, list] = {}
    if "d-sphere" in which:
        e1: FormTerms = {}
        for (i, j), c in d.C.entries.items():
            add_into(e1, _d_of_product(calc, i, j), c)
        out["d-sphere"] = [e1]
    if "d-quadratic" in which:
        T = d.Rinv if literal_quadratic else d.R
        e2 = []
        dprods = {(i, j): _d_of_product(calc, i, j) for i in d.indices for j in d.indices}
        for i in d.indices:
            for j in d.indices:
                f: FormTerms = {}
                for k, l, v in T.column(i, j):
                    add_into(f, dprods[(k, l)], v)
                add_into(f, dprods[(i, j)], -Q)
                e2.append(f)
        out["d-quadratic"] = e2
    if "right-sphere" in which:
        e3 = []
        for i in d.indices:
            f = {}
            for (k, l), c in d.C.entries.items():
                add_into(f, calc.right_mult_word(calc.dx(i), (k, l)), c)
            add_into(f, calc.dx(i), -ONE)
            e3.append(f)
        out["right-sphere"] = e3
    if "right-quadratic" in which:
        e4 = []
        coef = (Q - QINV) / (ONE + q_pow(calc.N - 2))
        for i in d.indices:
            prods = {(s, t): calc.right_mult_word(calc.dx(i), (s, t))
                     for s in d.indices for t in d.indices}
            for k in d.indices:
                for l in d.indices:
                    f = {}
                    for s, t, v in d.R.column(k, l):
                        add_into(f, prods[(s, t)], v)
                    add_into(f, prods[(k, l)], -Q)
                    ckl = d.C(k, l)
                    if ckl:
                        add_into(f, calc.dx(i), coef * ckl)
                    e4.append(f)
        out["right-quadratic"] = e4
    return out
