"""Independent numeric oracle: everything evaluated at s = q^(1/2) = 2 and
row-reduced with plain Fractions, sharing no code with the symbolic reducer."""

from fractions import Fraction
from itertools import product

S_POINT = Fraction(2)


def ev(c):
    return c.evaluate(S_POINT)


class NumericSpan:
    def __init__(self):
        self.rows = {}  # pivot column -> row with 1 at the pivot

    def reduce(self, vec):
        vec = {k: v for k, v in vec.items() if v}
        for piv, row in self.rows.items():
            c = vec.get(piv)
            if c:
                for k, v in row.items():
                    nv = vec.get(k, 0) - c * v
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
        return vec

    def add(self, vec):
        vec = self.reduce(vec)
        if not vec:
            return False
        piv = max(vec, key=lambda w: (len(w), w))
        inv = 1 / vec[piv]
        row = {k: v * inv for k, v in vec.items()}
        for p, r in self.rows.items():
            c = r.get(piv)
            if c:
                for k, v in row.items():
                    nv = r.get(k, 0) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        self.rows[piv] = row
        return True

    @property
    def rank(self):
        return len(self.rows)


def relation_ideal(relations, N, maxdeg):
    """Numeric span of u * r * v for free words u, v with total degree <= maxdeg."""
    span = NumericSpan()
    rels = [{w: ev(c) for w, c in r.items()} for r in relations]
    for d in range(2, maxdeg + 1):
        for lu in range(d - 1):
            lv = d - 2 - lu
            for u in product(range(1, N + 1), repeat=lu):
                for v in product(range(1, N + 1), repeat=lv):
                    for r in rels:
                        span.add({u + w + v: c for w, c in r.items()})
    return span
