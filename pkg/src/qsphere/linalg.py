"""Sparse exact row reduction over Q(s).

Vectors are dicts ``column -> coefficient``. Columns are ordered by a
caller-supplied key returning a flat tuple of ints; the pivot of a row
is its largest column.
"""

from heapq import heapify, heappop, heappush
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple

from .scalars import ZERO, Scalar

Vector = Dict[Hashable, object]


class RowReducer:
    """Incremental echelon basis with pivots at the order-maximal column."""

    def __init__(self, key: Callable[[Hashable], Tuple[int, ...]]):
        self._keyfn = key
        self._neg: Dict[Hashable, Tuple[int, ...]] = {}
        self.pivots: Dict[Hashable, Vector] = {}

    def _negkey(self, col):
        k = self._neg.get(col)
        if k is None:
            k = tuple(-x for x in self._keyfn(col))
            self._neg[col] = k
        return k

    def leading(self, vec: Vector) -> Hashable:
        return min(vec, key=self._negkey)

    def reduce(self, vec: Vector) -> Vector:
        """Remainder of ``vec`` modulo the span; contains no pivot column."""
        pivots = self.pivots
        out = dict(vec)
        heap = [(self._negkey(c), c) for c in out if c in pivots]
        if not heap:
            return out
        queued = {c for _, c in heap}
        heapify(heap)
        while heap:
            _, col = heappop(heap)
            coef = out.pop(col, None)
            if coef is None or not coef:
                continue
            for c2, v2 in pivots[col].items():
                if c2 == col:
                    continue
                prev = out.get(c2)
                nv = -(coef * v2) if prev is None else prev - coef * v2
                if nv:
                    out[c2] = nv
                    if c2 in pivots and c2 not in queued:
                        queued.add(c2)
                        heappush(heap, (self._negkey(c2), c2))
                elif prev is not None:
                    del out[c2]
        return out

    def add(self, vec: Vector) -> Optional[Hashable]:
        """Insert ``vec``; return its new pivot column, or None if dependent."""
        r = self.reduce(vec)
        if not r:
            return None
        piv = self.leading(r)
        lead = r[piv]
        if lead != 1:
            inv = lead.inverse() if isinstance(lead, Scalar) else 1 / lead
            r = {c: v * inv for c, v in r.items()}
        r[piv] = Scalar(1)
        self.pivots[piv] = r
        return piv

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def interreduced(self) -> Dict[Hashable, Vector]:
        """Reduced row echelon form: each row has only its own pivot among pivots."""
        done: Dict[Hashable, Vector] = {}
        helper = RowReducer(self._keyfn)
        helper._neg = self._neg
        for piv in sorted(self.pivots, key=self._keyfn):
            row = dict(self.pivots[piv])
            one = row.pop(piv)
            row = helper.reduce(row)
            row[piv] = one
            done[piv] = row
            helper.pivots[piv] = row
        return done


def solve_linear(equations: Iterable[Vector], unknowns: List[Hashable],
                 constant: Hashable = None) -> Tuple[Optional[Dict[Hashable, object]], List[Hashable]]:
    """Solve sum_u e[u] * u + e[constant] = 0 for every equation e.

    Returns ``(solution, free)``: ``solution`` maps each determined unknown
    to its value (``None`` if inconsistent); ``free`` lists unknowns left
    undetermined.
    """
    order = {u: i + 1 for i, u in enumerate(unknowns)}
    red = RowReducer(lambda c: (0,) if c == constant else (order[c],))
    for e in equations:
        red.add(e)
    rows = red.interreduced()
    if constant in rows:
        return None, []
    sol = {}
    free = [u for u in unknowns if u not in rows]
    for piv, row in rows.items():
        if any(c not in (piv, constant) for c in row):
            continue
        sol[piv] = -row.get(constant, ZERO)
    return sol, free
