"""Structure data of O_q(N): the metric C, identity, K, R-hat and its inverse.

Index conventions: a four-index tensor ``T`` is stored as a dict keyed by
``(k, l, i, j)`` holding ``T^{kl}_{ij}``; composition is
``(A o B)^{kl}_{ij} = sum_{mn} A^{kl}_{mn} B^{mn}_{ij}``. Generator indices
run over 1..N.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Tuple

from .linalg import RowReducer
from .scalars import ONE, Q, QINV, ZERO, Scalar, as_scalar, q_pow


class InvalidDimension(ValueError):
    pass


class SpectralError(ArithmeticError):
    pass


def check_dimension(N: int) -> None:
    if not isinstance(N, int) or N < 3:
        raise InvalidDimension(f"N must be an integer >= 3, got {N!r}")


def prime(i: int, N: int) -> int:
    return N + 1 - i


def rho(i: int, N: int) -> Fraction:
    half = Fraction(N + 1, 2)
    if i < half:
        return Fraction(N, 2) - i
    if i == half:
        return Fraction(0)
    return Fraction(N, 2) - i + 1


class Metric:
    """C^{ij} = C_{ij} = q^{-rho_i} (i = j')."""

    def __init__(self, N: int):
        check_dimension(N)
        self.N = N
        self.entries: Dict[Tuple[int, int], Scalar] = {
            (i, prime(i, N)): q_pow(-rho(i, N)) for i in range(1, N + 1)}

    def __call__(self, i: int, j: int) -> Scalar:
        return self.entries.get((i, j), ZERO)

    def items(self):
        return sorted(self.entries.items())


class FourTensor:
    """Sparse four-index tensor of scalars."""

    def __init__(self, N: int, entries: Dict[Tuple[int, int, int, int], Scalar]):
        self.N = N
        self.entries = {k: v for k, v in entries.items() if v}
        self._by_lower = None

    def __call__(self, k, l, i, j) -> Scalar:
        return self.entries.get((k, l, i, j), ZERO)

    def by_lower(self) -> Dict[Tuple[int, int], List[Tuple[int, int, Scalar]]]:
        """(i, j) -> [(k, l, T^{kl}_{ij})]."""
        if self._by_lower is None:
            out: Dict[Tuple[int, int], list] = {}
            for (k, l, i, j), v in sorted(self.entries.items()):
                out.setdefault((i, j), []).append((k, l, v))
            self._by_lower = out
        return self._by_lower

    def column(self, i, j):
        return self.by_lower().get((i, j), [])

    def compose(self, other: "FourTensor") -> "FourTensor":
        out: Dict[tuple, Scalar] = {}
        for (i, j), col in other.by_lower().items():
            for m, n, v in col:
                for k, l, w in self.column(m, n):
                    key = (k, l, i, j)
                    out[key] = out.get(key, ZERO) + w * v
        return FourTensor(self.N, out)

    def __matmul__(self, other):
        return self.compose(other)

    def __add__(self, other: "FourTensor") -> "FourTensor":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, ZERO) + v
        return FourTensor(self.N, out)

    def __neg__(self):
        return FourTensor(self.N, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FourTensor":
        c = as_scalar(c)
        return FourTensor(self.N, {k: v * c for k, v in self.entries.items()})

    def __eq__(self, other):
        return isinstance(other, FourTensor) and self.entries == other.entries

    def with_entry(self, key, value) -> "FourTensor":
        out = dict(self.entries)
        out[key] = as_scalar(value)
        return FourTensor(self.N, out)

    def records(self):
        """Lexicographically ordered (indices, coefficient-string) records."""
        return [{"indices": list(k), "coefficient": str(v)}
                for k, v in sorted(self.entries.items())]


def _kron(a, b) -> int:
    return 1 if a == b else 0


def build_metric(N: int) -> Metric:
    return Metric(N)


def build_identity(N: int) -> FourTensor:
    check_dimension(N)
    return FourTensor(N, {(i, j, i, j): ONE
                          for i in range(1, N + 1) for j in range(1, N + 1)})


def build_K(N: int) -> FourTensor:
    C = Metric(N)
    out = {}
    for (i, j), cij in C.entries.items():
        for (k, l), ckl in C.entries.items():
            out[(k, l, i, j)] = cij * ckl
    return FourTensor(N, out)


def build_Rhat(N: int) -> FourTensor:
    check_dimension(N)
    K = build_K(N)
    qq = Q - QINV
    out = {}
    rng = range(1, N + 1)
    for k, l, i, j in product(rng, rng, rng, rng):
        v = ZERO
        if i == l and j == k:
            v = q_pow(_kron(k, l) - _kron(k, prime(l, N)))
        if i < l:
            v = v + qq * (Scalar(_kron(i, k) * _kron(j, l)) - K(k, l, i, j))
        if v:
            out[(k, l, i, j)] = v
    return FourTensor(N, out)


def build_Rhat_inv(N: int) -> FourTensor:
    """R-hat minus (q - q^{-1}) (I - K)."""
    qq = Q - QINV
    return build_Rhat(N) - (build_identity(N) - build_K(N)).scale(qq)


_BUILDERS = {
    "C": build_metric,
    "I": build_identity,
    "K": build_K,
    "Rhat": build_Rhat,
    "RhatInv": build_Rhat_inv,
}


def build_structure_tensor(kind: str, N: int):
    check_dimension(N)
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown tensor kind {kind!r}; expected one of {sorted(_BUILDERS)}")
    return builder(N)


class StructureData:
    """All structure tensors for one N, built once."""

    def __init__(self, N: int):
        check_dimension(N)
        self.N = N
        self.C = Metric(N)
        self.I = build_identity(N)
        self.K = build_K(N)
        self.R = build_Rhat(N)
        self.Rinv = build_Rhat_inv(N)
        self.tau = sum((q_pow(-2 * rho(i, N)) for i in range(1, N + 1)), ZERO)

    @property
    def indices(self):
        return range(1, self.N + 1)


@lru_cache(maxsize=None)
def structure(N: int) -> StructureData:
    return StructureData(N)


# ---- spectral data ---------------------------------------------------------

def _flatten(T: FourTensor):
    return {k: v for k, v in T.entries.items()}


def minimal_polynomial(T: FourTensor, max_degree: int = 6) -> List[Scalar]:
    """Monic minimal polynomial coefficients [c_0, ..., c_{d-1}, 1] of T."""
    N = T.N
    identity = build_identity(N)
    powers = [identity]
    for d in range(1, max_degree + 1):
        powers.append(powers[-1].compose(T))
        # try to write T^d as a combination of lower powers
        tags = [("tag", m) for m in range(d + 1)]
        red = RowReducer(lambda c: (1,) + c if c[0] != "tag" else (0, c[1]))
        keyed = []
        for m, P in enumerate(powers):
            vec = {(a, b, c, e): v for (a, b, c, e), v in P.entries.items()}
            vec[("tag", m)] = ONE
            keyed.append(vec)
        rel = None
        for vec in keyed:
            red.add(vec)
        for piv, row in red.interreduced().items():
            if piv[0] == "tag" and all(c[0] == "tag" for c in row):
                rel = row
        if rel is not None:
            top = rel.get(("tag", d))
            if not top:
                continue
            return [rel.get(("tag", m), ZERO) / top for m in range(d + 1)]
    raise SpectralError("no minimal polynomial found up to the degree bound")


def _poly_eval(coeffs: List[Scalar], x: Scalar) -> Scalar:
    r = ZERO
    for c in reversed(coeffs):
        r = r * x + c
    return r


def find_roots(coeffs: List[Scalar], search: int) -> List[Scalar]:
    """Roots of the form +-s^k, |k| <= search, of a polynomial over Q(s)."""
    roots = []
    for k in range(-search, search + 1):
        for sign in (1, -1):
            cand = Scalar.s_power(k, sign)
            if not _poly_eval(coeffs, cand):
                roots.append(cand)
    return roots


def spectral_projectors(N: int):
    """(P_plus, P_minus, P_zero) together with their eigenvalues.

    The eigenvalues come from the minimal polynomial of R-hat; P_0 is K/tau,
    P_+ and P_- are Lagrange interpolation polynomials in R-hat.
    """
    data = structure(N)
    R = data.R
    minpoly = minimal_polynomial(R)
    degree = len(minpoly) - 1
    roots = find_roots(minpoly, search=4 * N)
    if degree != 3 or len(set(roots)) != 3:
        raise SpectralError(f"expected three distinct eigenvalues, got {roots}")
    # identify the eigenvalue carried by K: R o K = lambda_0 K
    RK = R.compose(data.K)
    lam0 = None
    for lam in roots:
        if RK == data.K.scale(lam):
            lam0 = lam
    if lam0 is None:
        raise SpectralError("K is not an eigenvector of R-hat")
    others = [r for r in roots if r != lam0]
    # P_+ has rank N(N+1)/2 - 1, P_- has rank N(N-1)/2; the trace decides
    proj = {}
    for lam in roots:
        P = data.I
        acc = None
        for mu in roots:
            if mu == lam:
                continue
            factor = (R - data.I.scale(mu)).scale(ONE / (lam - mu))
            acc = factor if acc is None else acc.compose(factor)
        proj[lam] = acc
    P0 = data.K.scale(ONE / data.tau)
    if proj[lam0] != P0:
        raise SpectralError("Lagrange projector for lambda_0 differs from K/tau")
    ranks = {lam: _trace(proj[lam]) for lam in others}
    lam_plus = max(others, key=lambda lam: ranks[lam])
    lam_minus = min(others, key=lambda lam: ranks[lam])
    return {
        "P+": proj[lam_plus], "P-": proj[lam_minus], "P0": P0,
        "eigenvalues": {"+": lam_plus, "-": lam_minus, "0": lam0},
        "minimal_polynomial": minpoly,
    }


def _trace(T: FourTensor) -> Fraction:
    tr = ZERO
    for (k, l, i, j), v in T.entries.items():
        if (k, l) == (i, j):
            tr = tr + v
    return tr.limit_q1()


# ---- three-factor operators for the braid relation -------------------------

def _leg(T: FourTensor, position: int):
    """T acting on tensor legs (position, position+1) of V x V x V, column-major."""
    N = T.N
    cols = {}
    for (i, j), col in T.by_lower().items():
        for m in range(1, N + 1):
            src = (i, j, m) if position == 0 else (m, i, j)
            cols[src] = [(((k, l, m) if position == 0 else (m, k, l)), v) for k, l, v in col]
    return cols


def _apply(op, vec):
    out = {}
    for c, x in vec.items():
        for r, v in op.get(c, ()):
            out[r] = out.get(r, ZERO) + v * x
    return {k: v for k, v in out.items() if v}


def braid_relation_holds(T: FourTensor) -> bool:
    """(T x id)(id x T)(T x id) == (id x T)(T x id)(id x T) on every basis vector."""
    N = T.N
    A = _leg(T, 0)
    B = _leg(T, 1)
    rng = range(1, N + 1)
    for basis in product(rng, rng, rng):
        v = {basis: ONE}
        left = _apply(A, _apply(B, _apply(A, v)))
        right = _apply(B, _apply(A, _apply(B, v)))
        if left != right:
            return False
    return True


def metric_compatibility_holds(N: int) -> bool:
    """Rinv^{kl}_{ij} C^{ks} C^{lt} == C^{ik} C^{jl} Rinv^{ts}_{lk} for all i, j, s, t."""
    data = structure(N)
    C, Rinv = data.C, data.Rinv
    rng = data.indices
    for i, j, s, t in product(rng, rng, rng, rng):
        lhs = ZERO
        for k, l, v in Rinv.column(i, j):
            lhs = lhs + v * C(k, s) * C(l, t)
        rhs = ZERO
        for k in rng:
            for l in rng:
                c = C(i, k) * C(j, l)
                if c:
                    rhs = rhs + c * Rinv(t, s, l, k)
        if lhs != rhs:
            return False
    return True
