"""The sphere algebra X generated by x_1..x_N.

Words are tuples of generator indices; elements are dicts ``word -> Scalar``.
Words are ordered degree-lexicographically with x_1 < ... < x_N.

Normal forms come from a rewriting system obtained by completing the
row-reduced quadratic relations (overlap resolution). The bounded-degree
linear reduction in :class:`ReductionTable` is kept as an independent check
of the same quotient.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb
from typing import Dict, Iterable, List, Optional, Tuple

from .linalg import RowReducer
from .scalars import ONE, Q, QINV, ZERO, Scalar, as_scalar, q_pow
from .tensors import check_dimension, structure

Word = Tuple[int, ...]
Terms = Dict[Word, Scalar]


class DegreeExceeded(ValueError):
    pass


class CompletionFailed(RuntimeError):
    pass


def word_key(w: Word) -> Tuple[int, ...]:
    return (len(w),) + w


def add_into(acc: Terms, terms: Terms, c=ONE) -> None:
    for w, v in terms.items():
        nv = acc.get(w, ZERO) + c * v
        if nv:
            acc[w] = nv
        else:
            acc.pop(w, None)


def word_str(w: Word) -> str:
    return "*".join(f"x{i}" for i in w) if w else "1"


class AlgebraElement:
    """Linear combination of words; ``algebra`` set means normal form."""

    __slots__ = ("terms", "algebra")

    def __init__(self, terms: Optional[Terms] = None, algebra: "SphereAlgebra" = None):
        self.terms = {w: as_scalar(c) for w, c in (terms or {}).items() if c}
        self.algebra = algebra

    @property
    def normalized(self) -> bool:
        return self.algebra is not None

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def _wrap(self, terms):
        return AlgebraElement(terms, self.algebra)

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement({(): as_scalar(other)})
        out = dict(self.terms)
        add_into(out, other.terms)
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            alg = self.algebra or other.algebra
            if alg is not None:
                return AlgebraElement(alg.multiply(self.terms, other.terms), alg)
            out: Terms = {}
            for u, a in self.terms.items():
                for v, b in other.terms.items():
                    add_into(out, {u + v: a * b})
            return AlgebraElement(out)
        c = as_scalar(other)
        return self._wrap({w: v * c for w, v in self.terms.items()})

    def __rmul__(self, other):
        c = as_scalar(other)
        return self._wrap({w: c * v for w, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement({(): as_scalar(other)})
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return format_terms(self.terms, word_str, word_key)

    def __repr__(self):
        return f"AlgebraElement({str(self)!r})"


def _signed(c: Scalar):
    """Split a leading minus off monomial coefficients for printing."""
    if c.is_monomial() and next(iter(c.numerator.coefficients.values())) < 0:
        return "-", -c
    return "+", c


def format_terms(terms: dict, key_str, key_order=None) -> str:
    """Print ``sum c * key`` with keys in decreasing order."""
    from .scalars import scalar_factor_str
    if not terms:
        return "0"
    keys = sorted(terms, key=key_order or (lambda k: k), reverse=True)
    parts = []
    for k in keys:
        sign, coeff = _signed(terms[k])
        base = key_str(k)
        if base == "1":
            body = scalar_factor_str(coeff)
        elif coeff == ONE:
            body = base
        else:
            body = f"{scalar_factor_str(coeff)}*{base}"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def relation_tail_coefficient(N: int) -> Scalar:
    """(q^{N-1} - q^{N-3}) / (1 + q^{N-2})."""
    return (q_pow(N - 1) - q_pow(N - 3)) / (ONE + q_pow(N - 2))


def defining_relations(N: int) -> List[AlgebraElement]:
    """N^2 quadratic relations (one per (i, j)) followed by the sphere relation."""
    check_dimension(N)
    data = structure(N)
    tail = relation_tail_coefficient(N)
    rels = []
    for i, j in product(data.indices, data.indices):
        terms: Terms = {}
        for k, l, v in data.Rinv.column(i, j):
            add_into(terms, {(k, l): v})
        add_into(terms, {(i, j): -QINV})
        for k, l, v in data.K.column(i, j):
            add_into(terms, {(k, l): -tail * v})
        rels.append(AlgebraElement(terms))
    sphere: Terms = {(k, l): v for (k, l), v in data.C.entries.items()}
    sphere[()] = -ONE
    rels.append(AlgebraElement(sphere))
    return rels


def sphere_element(N: int) -> AlgebraElement:
    data = structure(N)
    return AlgebraElement({(k, l): v for (k, l), v in data.C.entries.items()})


# ---- rewriting system -------------------------------------------------------

def _reduce_with(terms: Terms, rules: Dict[Word, Terms], lengths: List[int]) -> Terms:
    """Full reduction by an arbitrary rule set (used during completion)."""
    work = dict(terms)
    out: Terms = {}
    while work:
        w = max(work, key=word_key)
        c = work.pop(w)
        hit = None
        for ln in lengths:
            for pos in range(len(w) - ln + 1):
                if w[pos:pos + ln] in rules:
                    hit = (pos, ln)
                    break
            if hit:
                break
        if hit is None:
            out[w] = c
            continue
        pos, ln = hit
        pre, post = w[:pos], w[pos + ln:]
        for r, cr in rules[w[pos:pos + ln]].items():
            nw = pre + r + post
            nv = work.get(nw, ZERO) + c * cr
            if nv:
                work[nw] = nv
            else:
                work.pop(nw, None)
    return out


def _overlaps(a: Word, b: Word):
    """Proper overlaps: suffix of a equal to prefix of b."""
    for k in range(1, min(len(a), len(b))):
        if a[-k:] == b[:k]:
            yield k


def _concat_terms(prefix: Word, terms: Terms, suffix: Word) -> Terms:
    return {prefix + w + suffix: c for w, c in terms.items()}


def complete_rules(relations: Iterable[Terms], max_word: int = 8):
    """Overlap completion of a rule set whose leading words are order-maximal.

    Returns ``rules`` (leading word -> right-hand side). Raises
    CompletionFailed if a new rule longer than ``max_word`` would be needed.
    """
    red = RowReducer(word_key)
    for r in relations:
        red.add(r)
    rules: Dict[Word, Terms] = {}
    for piv, row in red.interreduced().items():
        rules[piv] = {w: -c for w, c in row.items() if w != piv}
    processed = set()
    while True:
        lengths = sorted({len(w) for w in rules})
        new = None
        for a, b in product(sorted(rules, key=word_key), repeat=2):
            for k in _overlaps(a, b):
                tag = (a, b, k)
                if tag in processed:
                    continue
                processed.add(tag)
                # a.t == h.b with t = b[k:], h = a[:-k]
                t, h = b[k:], a[:-k]
                s: Terms = {}
                add_into(s, _concat_terms((), rules[a], t))
                add_into(s, _concat_terms(h, rules[b], ()), -ONE)
                s = _reduce_with(s, rules, lengths)
                if s:
                    new = s
                    break
            if new:
                break
        if new is None:
            return rules
        lead = max(new, key=word_key)
        if len(lead) > max_word:
            raise CompletionFailed(f"completion needs a rule with leading word of length {len(lead)}")
        inv = ONE / new[lead]
        rhs = {w: -c * inv for w, c in new.items() if w != lead}
        # drop rules whose leading word contains the new one; their content is re-added
        readd = []
        for L in list(rules):
            if any(L[p:p + len(lead)] == lead for p in range(len(L) - len(lead) + 1)):
                body = dict(rules.pop(L))
                add_into(body, {L: -ONE})
                readd.append(body)
        rules[lead] = rhs
        lengths = sorted({len(w) for w in rules})
        for L in list(rules):
            rules[L] = _reduce_with(rules[L], rules, lengths)
        for body in readd:
            rest = _reduce_with(body, rules, lengths)
            if rest:
                raise CompletionFailed("re-added relation did not reduce; restart needed")
        processed = {p for p in processed if p[0] in rules and p[1] in rules}


def check_confluence(rules: Dict[Word, Terms]) -> bool:
    """Diamond-lemma check: every overlap ambiguity resolves to zero."""
    lengths = sorted({len(w) for w in rules})
    for a, b in product(rules, repeat=2):
        for k in _overlaps(a, b):
            s: Terms = {}
            add_into(s, _concat_terms((), rules[a], b[k:]))
            add_into(s, _concat_terms(a[:-k], rules[b], ()), -ONE)
            if _reduce_with(s, rules, lengths):
                return False
        if a != b and len(b) < len(a) and any(
                a[p:p + len(b)] == b for p in range(len(a) - len(b) + 1)):
            return False
    return True


class SphereAlgebra:
    """Normal forms, products and * in X for a fixed N."""

    def __init__(self, N: int, max_degree: int = 12):
        check_dimension(N)
        self.N = N
        self.max_degree = max_degree
        self.data = structure(N)
        self.relations = defining_relations(N)
        self.rules = complete_rules(r.terms for r in self.relations)
        self._lengths = sorted({len(w) for w in self.rules})
        self._append_cache: Dict[Tuple[Word, int], Terms] = {}
        self._prod_cache: Dict[Tuple[Word, Word], Terms] = {}
        self._normal_words: Dict[int, List[Word]] = {0: [()]}

    # words -----------------------------------------------------------------
    def is_normal(self, w: Word) -> bool:
        for ln in self._lengths:
            for pos in range(len(w) - ln + 1):
                if w[pos:pos + ln] in self.rules:
                    return False
        return True

    def normal_words(self, k: int) -> List[Word]:
        """Normal words of length exactly k, in increasing order."""
        if k not in self._normal_words:
            prev = self.normal_words(k - 1)
            out = [w + (a,) for w in prev for a in range(1, self.N + 1)
                   if self.is_normal(w + (a,))]
            self._normal_words[k] = sorted(out, key=word_key)
        return self._normal_words[k]

    def graded_dimension(self, k: int) -> int:
        return len(self.normal_words(k))

    def _check_degree(self, d: int) -> None:
        if d > self.max_degree:
            raise DegreeExceeded(f"degree {d} exceeds max_degree {self.max_degree}")

    # products ----------------------------------------------------------------
    def append(self, v: Word, a: int) -> Terms:
        """Normal form of v * x_a with v a normal word."""
        key = (v, a)
        hit = self._append_cache.get(key)
        if hit is not None:
            return hit
        w = v + (a,)
        self._check_degree(len(w))
        res = None
        for ln in self._lengths:
            if ln <= len(w) and w[-ln:] in self.rules:
                pre = w[:-ln]
                res = {}
                for r, cr in self.rules[w[-ln:]].items():
                    add_into(res, self.word_product(pre, r), cr)
                break
        if res is None:
            res = {w: ONE}
        self._append_cache[key] = res
        return res

    def word_product(self, u: Word, v: Word) -> Terms:
        """Normal form of u * v with u normal."""
        if not v:
            return {u: ONE}
        key = (u, v)
        hit = self._prod_cache.get(key)
        if hit is not None:
            return hit
        cur: Terms = {u: ONE}
        for a in v:
            nxt: Terms = {}
            for w, c in cur.items():
                add_into(nxt, self.append(w, a), c)
            cur = nxt
        self._prod_cache[key] = cur
        return cur

    def multiply(self, a: Terms, b: Terms) -> Terms:
        """Product of two normal-form term dicts."""
        out: Terms = {}
        for u, cu in a.items():
            for v, cv in b.items():
                add_into(out, self.word_product(u, v), cu * cv)
        return out

    def nf_terms(self, terms: Terms) -> Terms:
        out: Terms = {}
        for w, c in terms.items():
            self._check_degree(len(w))
            add_into(out, self.word_product((), w), c)
        return out

    def normal_form(self, e) -> AlgebraElement:
        if not isinstance(e, AlgebraElement):
            e = AlgebraElement({(): as_scalar(e)})
        return AlgebraElement(self.nf_terms(e.terms), self)

    def element(self, terms: Terms) -> AlgebraElement:
        return AlgebraElement(self.nf_terms(terms), self)

    def x(self, i: int) -> AlgebraElement:
        return AlgebraElement({(i,): ONE}, self)

    def one(self) -> AlgebraElement:
        return AlgebraElement({(): ONE}, self)

    # star --------------------------------------------------------------------
    def star_terms(self, terms: Terms) -> Terms:
        C = self.data.C
        img = {i: {(j,): C(i, j)} for i, j in C.entries}
        out: Terms = {}
        for w, c in terms.items():
            acc: Terms = {(): c}
            for i in reversed(w):
                acc = {u + v: cu * cv for u, cu in acc.items() for v, cv in img[i].items()}
            add_into(out, self.nf_terms(acc))
        return out

    def star(self, e: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.star_terms(e.terms), self)


@lru_cache(maxsize=None)
def sphere_algebra(N: int) -> SphereAlgebra:
    return SphereAlgebra(N)


def normal_form(e: AlgebraElement, N: int, maxdeg: int = 4) -> AlgebraElement:
    alg = sphere_algebra(N)
    if e.degree() > maxdeg:
        raise DegreeExceeded(f"degree {e.degree()} exceeds maxdeg {maxdeg}")
    return alg.normal_form(e)


def star(e: AlgebraElement, N: int) -> AlgebraElement:
    return sphere_algebra(N).star(e)


def graded_dimension(k: int, N: int) -> int:
    return sphere_algebra(N).graded_dimension(k)


def classical_dimension(k: int, N: int) -> int:
    low = comb(N + k - 3, k - 2) if k >= 2 else 0
    return comb(N + k - 1, k) - low


# ---- bounded-degree linear reduction (independent oracle) -------------------

class ReductionTable:
    """Quotient by the relation span in the free algebra, truncated at maxdeg.

    Every product u * r * v of a defining relation r with free words of total
    degree <= maxdeg is row-reduced; basis words are the non-pivot words.
    """

    def __init__(self, N: int, maxdeg: int = 4):
        check_dimension(N)
        self.N = N
        self.maxdeg = maxdeg
        self.reducer = RowReducer(word_key)
        rels = defining_relations(N)
        words_by_len = {0: [()]}
        for d in range(1, maxdeg + 1):
            words_by_len[d] = [w + (a,) for w in words_by_len[d - 1] for a in range(1, N + 1)]
        for d in range(2, maxdeg + 1):
            room = d - 2
            for lu in range(room + 1):
                lv = room - lu
                for r in rels:
                    for u in words_by_len[lu]:
                        for v in words_by_len[lv]:
                            self.reducer.add(_concat_terms(u, r.terms, v))
        self.words_by_len = words_by_len

    def reduce(self, terms: Terms) -> Terms:
        for w in terms:
            if len(w) > self.maxdeg:
                raise DegreeExceeded(f"degree {len(w)} exceeds table degree {self.maxdeg}")
        return self.reducer.reduce(terms)

    def basis_words(self, k: int) -> List[Word]:
        return [w for w in self.words_by_len[k] if w not in self.reducer.pivots]

    def graded_dimension(self, k: int) -> int:
        return len(self.basis_words(k))
