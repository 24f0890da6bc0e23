"""Expression language for algebra elements, one-forms, tensors and wedge forms.

Grammar (left associative, ``*`` and ``/`` bind tighter than ``(x)`` and ``^``)::

    sum    := term (('+' | '-') term)*
    term   := prod (('(x)' | '^') prod)*
    prod   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := INT | 'q' ['^' exponent] | 'x'INT | 'dx'INT | 'g+'INT | 'g-'INT
              | 'g'INT | 'theta' | 'sphere' | '(' sum ')'
    exponent := INT | '-' INT | '(' ['-'] INT ['/' INT] ')'

``gINT`` is shorthand for ``g-INT``. A ``^`` directly after ``q`` is an
exponent; everywhere else it is the wedge product. Implicit summation over
repeated indices is not supported; the contractions C^{kl} x_k x_l and
C^{kl} x_k dx_l are available as ``sphere`` and ``theta``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import DegreeExceeded, Word, add_into, format_terms, sphere_algebra, word_key, word_str
from .first_order import calculus, form_str, sign_value
from .higher_order import tensor_space, tensor_str, wedge_algebra
from .scalars import ONE, ZERO, Scalar, q_pow
from .tensors import check_dimension, structure


class ParseError(ValueError):
    """Malformed input; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class IndexOutOfRange(ValueError):
    pass


class ExpressionError(ValueError):
    """Well-formed input whose operations are not defined (e.g. dx1 * dx2)."""


# sphere and theta are named contractions; the literal spellings are accepted as aliases
ALIASES = {"C^{kl}x_kx_l": "sphere", "C^{kl}x_kdx_l": "theta"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<tensor>\(x\))
  | (?P<gen>dx|g\+|g-|x|g)(?P<idx>\d+)
  | (?P<name>theta|sphere|q)
  | (?P<int>\d+)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int
    value: Optional[int] = None


def tokenize(text: str) -> List[Token]:
    stripped = re.sub(r"\s+", "", text)
    if stripped in ALIASES:
        return [Token("name", ALIASES[stripped], 0), Token("end", "", len(text))]
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            if m.group("gen"):
                out.append(Token(m.group("gen"), m.group(0), pos, int(m.group("idx"))))
            elif m.lastgroup == "int":
                out.append(Token("int", m.group(0), pos, int(m.group(0))))
            elif m.lastgroup == "tensor":
                out.append(Token("(x)", m.group(0), pos))
            elif m.lastgroup == "name":
                out.append(Token("name", m.group(0), pos))
            else:
                out.append(Token(m.group(0), m.group(0), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# ---- values ------------------------------------------------------------------

@dataclass
class Value:
    """rank 0: {word: c}; rank 1: {(word, l): c}; rank >= 2: {(word, idx): c}.

    ``basis`` is None for rank 0, one of dx/g+/g- otherwise; ``op`` is
    "(x)" or "^" for rank >= 2.
    """
    rank: int
    terms: dict
    basis: Optional[str] = None
    op: Optional[str] = None

    def is_zero(self) -> bool:
        return not self.terms


def _degree(terms: dict, rank: int) -> int:
    return max((len(k if rank == 0 else k[0]) for k in terms), default=0)


class Evaluator:
    def __init__(self, N: int, sign=1, max_degree: int = 4):
        check_dimension(N)
        self.N = N
        self.sign = sign_value(sign)
        self.max_degree = max_degree
        self.algebra = sphere_algebra(N)
        self.calc = calculus(N, self.sign)
        self.data = structure(N)

    # helpers -----------------------------------------------------------------
    def _check_index(self, tok: Token) -> int:
        if not 1 <= tok.value <= self.N:
            raise IndexOutOfRange(f"index {tok.value} of {tok.text} outside 1..{self.N}")
        return tok.value

    def _check_degree(self, terms: dict, rank: int) -> None:
        d = _degree(terms, rank)
        if d > self.max_degree:
            raise DegreeExceeded(f"degree {d} exceeds max degree {self.max_degree}")

    def scalar(self, c) -> Value:
        c = c if isinstance(c, Scalar) else Scalar(c)
        return Value(0, {(): c} if c else {})

    def generator(self, tok: Token) -> Value:
        i = self._check_index(tok)
        if tok.kind == "x":
            return Value(0, {(i,): ONE})
        basis = {"dx": "dx", "g+": "g+", "g-": "g-", "g": "g-"}[tok.kind]
        return Value(1, {((), i): ONE}, basis)

    def named(self, name: str) -> Value:
        if name == "sphere":
            t: Dict[Word, Scalar] = {}
            for (k, l), c in self.data.C.entries.items():
                add_into(t, {(k, l): c})
            return Value(0, self.algebra.nf_terms(t))
        if name == "theta":
            return Value(1, self.calc.theta(), "dx")
        raise ExpressionError(f"unknown name {name}")

    def _gamma(self, variant: str):
        return self.calc.gamma(variant)

    def _convert_form(self, v: Value, basis: str) -> Value:
        if v.basis == basis:
            return v
        terms = v.terms
        if v.basis != "dx":
            terms = self._gamma(v.basis[1]).from_gamma(terms)
        if basis != "dx":
            terms = self._gamma(basis[1]).to_gamma(terms)
        return Value(1, terms, basis)

    def _as_tensor(self, v: Value, basis: str) -> Value:
        """Rank >= 1 value in the gamma basis ``basis`` keyed (word, idx)."""
        if v.rank >= 2:
            if v.basis != basis:
                raise ExpressionError(f"cannot combine {v.basis} and {basis} tensors")
            return v
        f = self._convert_form(v, basis)
        return Value(1, {(w, (l,)): c for (w, l), c in f.terms.items()}, basis)

    # arithmetic ----------------------------------------------------------------
    def add(self, a: Value, b: Value, c=ONE) -> Value:
        if a.is_zero() and not (a.rank or a.basis):
            return self.scale(b, c)
        if b.is_zero() and not (b.rank or b.basis):
            return a
        if a.rank != b.rank or (a.rank >= 2 and a.op != b.op):
            raise ExpressionError("cannot add terms of different kinds")
        if a.rank == 1 and a.basis != b.basis:
            a, b = self._convert_form(a, "dx"), self._convert_form(b, "dx")
        if a.rank >= 2 and a.basis != b.basis:
            raise ExpressionError(f"cannot add {a.basis} and {b.basis} tensors")
        out = dict(a.terms)
        add_into(out, b.terms, c)
        return Value(a.rank, out, a.basis, a.op)

    def scale(self, v: Value, c) -> Value:
        out = {k: x * c for k, x in v.terms.items()}
        return Value(v.rank, {k: x for k, x in out.items() if x}, v.basis, v.op)

    def mul(self, a: Value, b: Value) -> Value:
        if a.rank and b.rank:
            raise ExpressionError("products of forms need (x) or ^")
        self._check_degree({(0,) * (_degree(a.terms, a.rank) + _degree(b.terms, b.rank)): ONE}, 0)
        if not a.rank and not b.rank:
            res = Value(0, self.algebra.multiply(a.terms, b.terms))
        elif not a.rank:
            res = self._left(a.terms, b)
        else:
            res = self._right(a, b.terms)
        return res

    def _left(self, element: Dict[Word, Scalar], v: Value) -> Value:
        if v.rank == 1:
            return Value(1, self.calc.left_mult(self.algebra.nf_terms(element), v.terms), v.basis)
        sp = tensor_space(self.N, v.basis[1])
        return Value(v.rank, sp.left_mult(element, v.terms), v.basis, v.op)

    def _right(self, v: Value, element: Dict[Word, Scalar]) -> Value:
        if v.rank == 1:
            if v.basis == "dx":
                return Value(1, self.calc.right_mult(v.terms, element), "dx")
            g = self._gamma(v.basis[1])
            out: dict = {}
            for w, c in element.items():
                add_into(out, g.right_mult_word(v.terms, w), c)
            return Value(1, out, v.basis)
        sp = tensor_space(self.N, v.basis[1])
        res = sp.right_mult(v.terms, element)
        if v.op == "^":
            res = wedge_algebra(self.N).normal_form(res)
        return Value(v.rank, res, v.basis, v.op)

    def div(self, a: Value, b: Value) -> Value:
        if b.rank or set(b.terms) - {()}:
            raise ExpressionError("division only by scalars")
        c = b.terms.get((), ZERO)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(a, ONE / c)

    def product(self, a: Value, b: Value, op: str) -> Value:
        """Tensor (op = "(x)") or wedge (op = "^") product."""
        if not a.rank or not b.rank:
            return self.mul(a, b)
        for v in (a, b):
            if v.rank >= 2 and v.op != op:
                raise ExpressionError("cannot mix (x) and ^ in one product")
        if self.sign != 1:
            raise ExpressionError("tensors and wedge forms are implemented over the plus calculus only")
        bases = {v.basis for v in (a, b) if v.basis != "dx"}
        if len(bases) > 1:
            raise ExpressionError("cannot combine g+ and g- factors")
        basis = bases.pop() if bases else "g-"
        ta, tb = self._as_tensor(a, basis), self._as_tensor(b, basis)
        self._check_degree({(0,) * (_degree(ta.terms, 2) + _degree(tb.terms, 2)): ONE}, 0)
        sp = tensor_space(self.N, basis[1])
        res = sp.tensor(ta.terms, tb.terms)
        if op == "^":
            res = wedge_algebra(self.N).normal_form(res)
        return Value(a.rank + b.rank, res, basis, op)


class Parser:
    def __init__(self, text: str, evaluator: Evaluator):
        self.text = text
        self.ev = evaluator
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.advance()

    def parse(self) -> Value:
        v = self.sum()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return v

    def sum(self) -> Value:
        v = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            v = self.ev.add(v, self.term(), ONE if op == "+" else -ONE)
        return v

    def term(self) -> Value:
        v = self.prod()
        while self.tok.kind in ("(x)", "^"):
            op = self.advance().kind
            v = self.ev.product(v, self.prod(), op)
        return v

    def prod(self) -> Value:
        v = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            v = self.ev.mul(v, rhs) if op == "*" else self.ev.div(v, rhs)
        return v

    def unary(self) -> Value:
        if self.tok.kind == "-":
            self.advance()
            return self.ev.scale(self.unary(), -ONE)
        return self.factor()

    def factor(self) -> Value:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return self.ev.scalar(t.value)
        if t.kind == "name" and t.text == "q":
            self.advance()
            e = self.exponent() if self._exponent_follows() else Fraction(1)
            return self.ev.scalar(q_pow(e))
        if t.kind == "name":
            self.advance()
            return self.ev.named(t.text)
        if t.kind in ("x", "dx", "g+", "g-", "g"):
            self.advance()
            return self.ev.generator(t)
        if t.kind == "(":
            self.advance()
            v = self.sum()
            self.expect(")")
            return v
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def _exponent_follows(self) -> bool:
        if self.tok.kind != "^":
            return False
        nxt = self.tokens[self.i + 1]
        return nxt.kind in ("int", "-") or (nxt.kind == "(" and self.tokens[self.i + 2].kind in ("int", "-"))

    def exponent(self) -> Fraction:
        self.expect("^")
        if self.tok.kind == "(":
            self.advance()
            e = self._signed_int()
            if self.tok.kind == "/":
                self.advance()
                den = self.expect("int")
                if not den.value:
                    raise ParseError("zero denominator in exponent", den.pos)
                e = Fraction(e, den.value)
            self.expect(")")
        else:
            e = self._signed_int()
        e = Fraction(e)
        if (2 * e).denominator != 1:
            raise ParseError("exponents must be multiples of 1/2", self.tok.pos)
        return e

    def _signed_int(self) -> int:
        neg = self.tok.kind == "-"
        if neg:
            self.advance()
        value = self.expect("int").value
        return -value if neg else value


def parse(text: str, N: int, sign=1, max_degree: int = 4) -> Value:
    """Parse and evaluate ``text``; the result is already in normal form."""
    return Parser(text, Evaluator(N, sign, max_degree)).parse()


def wedge(value: Value, N: int) -> Value:
    """Reinterpret a rank >= 2 tensor as a wedge form and normalise it."""
    if value.rank < 2:
        return value
    return Value(value.rank, wedge_algebra(N).normal_form(value.terms), value.basis, "^")


def to_text(value: Value) -> str:
    """Canonical printed form; parsing it again gives back the same value."""
    if value.rank == 0:
        return format_terms(value.terms, word_str, word_key)
    if value.rank == 1:
        return form_str(value.terms, value.basis)
    return tensor_str(value.terms, label=value.basis, sep=" (x) " if value.op == "(x)" else " ^ ")
