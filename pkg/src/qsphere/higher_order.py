"""Second order structure over the calculus Gamma^+: tensors, the braiding and wedge forms.

Everything is computed in the gamma^- basis, where right multiplication by
x_k is linear: gamma_b x_k = Rinv^{pl}_{bk} x_p gamma_l. A tensor of rank m
is a dict ``(word, (i_1, ..., i_m)) -> Scalar`` meaning
sum coeff * word * gamma_{i_1} (x) ... (x) gamma_{i_m}. Relations that the
literature writes in the dx basis are converted factor by factor.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Word, add_into, format_terms, sphere_algebra, word_str
from .first_order import FirstOrderCalculus, FormTerms, GammaBasis, InvalidParameter
from .linalg import RowReducer
from .scalars import ONE, Q, QINV, ZERO, Scalar, as_scalar, q_pow
from .tensors import FourTensor, braid_relation_holds, structure

Idx = Tuple[int, ...]
TKey = Tuple[Word, Idx]
TTerms = Dict[TKey, Scalar]


def tensor_key(k: TKey):
    w, idx = k
    return (len(idx), len(w)) + w + idx


def tensor_str(terms: TTerms, label: str = "g", sep: str = " (x) ") -> str:
    def show(k):
        w, idx = k
        body = sep.join(f"{label}{i}" for i in idx) if idx else "1"
        return body if not w else f"{word_str(w)}*{body}"
    return format_terms(terms, show, tensor_key)


class TensorSpace:
    """Left X-module tensors over Gamma^+ written in a gamma basis."""

    def __init__(self, N: int, variant: str = "-"):
        self.N = N
        self.data = structure(N)
        self.algebra = sphere_algebra(N)
        self.calc = FirstOrderCalculus(N, 1, algebra=self.algebra)
        self.gamma = GammaBasis(self.calc, variant)
        self.variant = variant
        self.T = self.gamma.T
        self._move: Dict[Tuple[Idx, int], List[Tuple[int, Idx, Scalar]]] = {}
        self._dx_cache: Dict[int, FormTerms] = {}

    @property
    def indices(self):
        return self.data.indices

    # right multiplication ---------------------------------------------------
    def _move_letter(self, idx: Idx, k: int) -> List[Tuple[int, Idx, Scalar]]:
        """gamma_idx . x_k = sum c x_r gamma_idx'."""
        key = (idx, k)
        hit = self._move.get(key)
        if hit is not None:
            return hit
        if not idx:
            res = [(k, (), ONE)]
        else:
            acc: Dict[Tuple[int, Idx], Scalar] = {}
            for p, l, v in self.T.column(idx[-1], k):
                for r, rest, c in self._move_letter(idx[:-1], p):
                    key2 = (r, rest + (l,))
                    nv = acc.get(key2, ZERO) + c * v
                    if nv:
                        acc[key2] = nv
                    else:
                        acc.pop(key2, None)
            res = [(r, i2, c) for (r, i2), c in sorted(acc.items())]
        self._move[key] = res
        return res

    def right_mult_letter(self, t: TTerms, k: int) -> TTerms:
        out: TTerms = {}
        wp = self.algebra.word_product
        for (u, idx), c in t.items():
            for r, idx2, v in self._move_letter(idx, k):
                for x, cx in wp(u, (r,)).items():
                    add_into(out, {(x, idx2): c * v * cx})
        return out

    def right_mult_word(self, t: TTerms, w: Word) -> TTerms:
        for a in w:
            t = self.right_mult_letter(t, a)
        return t

    def right_mult(self, t: TTerms, element: Dict[Word, Scalar]) -> TTerms:
        out: TTerms = {}
        for w, c in element.items():
            add_into(out, self.right_mult_word(t, w), c)
        return out

    def left_mult(self, element: Dict[Word, Scalar], t: TTerms) -> TTerms:
        """element * t; ``element`` may contain words that are not normal."""
        wp = self.algebra.word_product
        normal: Dict[Word, Scalar] = {}
        for v, cv in element.items():
            add_into(normal, wp((), v), cv)
        out: TTerms = {}
        for (u, idx), c in t.items():
            for v, cv in normal.items():
                for x, cx in wp(v, u).items():
                    add_into(out, {(x, idx): c * cv * cx})
        return out

    def tensor(self, a: TTerms, b: TTerms) -> TTerms:
        """(u gamma_I) (x) (v gamma_J) = u (gamma_I . v) gamma_J."""
        out: TTerms = {}
        wp = self.algebra.word_product
        for (v, J), cb in b.items():
            for (u, I), ca in a.items():
                moved = self.right_mult_word({((), I): ONE}, v)
                for (y, I2), cm in moved.items():
                    for x, cx in wp(u, y).items():
                        add_into(out, {(x, I2 + J): ca * cb * cm * cx})
        return out

    # one-forms --------------------------------------------------------------
    @staticmethod
    def from_form(f: FormTerms) -> TTerms:
        return {(w, (l,)): c for (w, l), c in f.items()}

    def dx_form(self, f: FormTerms) -> TTerms:
        """A dx-basis one-form as a rank-one gamma tensor."""
        return self.from_form(self.gamma.to_gamma(f))

    def dx(self, i: int) -> TTerms:
        hit = self._dx_cache.get(i)
        if hit is None:
            hit = self.dx_form({((), i): ONE})
            self._dx_cache[i] = hit
        return hit

    def dxdx(self, coeff: Dict[Word, Scalar], i: int, j: int) -> TTerms:
        """coeff * dx_i (x) dx_j."""
        return self.left_mult(coeff, self.tensor(self.dx(i), self.dx(j)))

    def theta_dx(self, coeff: Dict[Word, Scalar], j: int) -> TTerms:
        """coeff * theta (x) dx_j."""
        th = self.dx_form(self.calc.theta())
        return self.left_mult(coeff, self.tensor(th, self.dx(j)))

    def d_theta(self) -> TTerms:
        """d(x)theta = C^{ij} dx_i (x) dx_j."""
        out: TTerms = {}
        for (i, j), c in self.data.C.entries.items():
            add_into(out, self.tensor(self.dx(i), self.dx(j)), c)
        return out

    def to_dx(self, t: TTerms) -> Dict[Tuple[Word, int, int], Scalar]:
        """Rank-two gamma tensor back in the dx (x) dx basis."""
        calc = self.calc
        out: Dict = {}
        wp = self.algebra.word_product
        for (u, (a, b)), c in t.items():
            fa = self.gamma.from_gamma({(u, a): ONE})
            fb = self.gamma.from_gamma({((), b): ONE})
            for (w, n), cb in fb.items():
                for (v, m), ca in fa.items():
                    moved = calc.right_mult_word({(v, m): ONE}, w)
                    for (y, m2), cm in moved.items():
                        add_into(out, {(y, m2, n): c * ca * cb * cm})
        return out

    # braiding ---------------------------------------------------------------
    def sigma(self, t: TTerms, alpha, inverse: bool = False, tensor: Optional[FourTensor] = None) -> TTerms:
        """sigma(gamma_i (x) gamma_j) = alpha Rinv^{kl}_{ij} gamma_k (x) gamma_l; inverse uses Rhat / alpha."""
        alpha = as_scalar(alpha)
        if not alpha:
            raise InvalidParameter("alpha must be nonzero")
        if tensor is None:
            tensor = self.data.R if inverse else self.data.Rinv
        f = ONE / alpha if inverse else alpha
        out: TTerms = {}
        for (u, idx), c in t.items():
            if len(idx) != 2:
                raise ValueError("sigma acts on rank-two tensors")
            for k, l, v in tensor.column(*idx):
                add_into(out, {(u, (k, l)): c * f * v})
        return out

    def basis_pair(self, i: int, j: int) -> TTerms:
        return {((), (i, j)): ONE}


@lru_cache(maxsize=None)
def tensor_space(N: int, variant: str = "-") -> TensorSpace:
    return TensorSpace(N, variant)


# ---- Theorem-level checks on sigma -------------------------------------------

def sigma_bimodule_check(N: int, alpha=Q, variant: str = "-", words: Sequence[Word] = ()) -> bool:
    """sigma(t . x) == sigma(t) . x on basis pairs and extra algebra words."""
    sp = tensor_space(N, variant)
    tests = [(k,) for k in sp.indices] + list(words)
    for i, j in product(sp.indices, sp.indices):
        t = sp.basis_pair(i, j)
        for w in tests:
            if sp.sigma(sp.right_mult_word(t, w), alpha) != sp.right_mult_word(sp.sigma(t, alpha), w):
                return False
    return True


def sigma_inverse_check(N: int, alpha=Q) -> bool:
    sp = tensor_space(N, "-")
    for i, j in product(sp.indices, sp.indices):
        t = sp.basis_pair(i, j)
        if sp.sigma(sp.sigma(t, alpha, inverse=True), alpha) != t:
            return False
        if sp.sigma(sp.sigma(t, alpha), alpha, inverse=True) != t:
            return False
    return True


def braid_check(alpha, N: int, tensor: Optional[FourTensor] = None) -> bool:
    """Braid relation for sigma on all triple basis tensors."""
    base = tensor if tensor is not None else structure(N).Rinv
    return braid_relation_holds(base.scale(as_scalar(alpha)))


def perturbed_tensor(N: int) -> FourTensor:
    """Rinv with one entry changed; the braid relation must then fail."""
    Rinv = structure(N).Rinv
    return Rinv.with_entry((1, 2, 2, 1), Rinv(1, 2, 2, 1) + ONE)


def convert_pair(src: TensorSpace, dst: TensorSpace, t: TTerms) -> TTerms:
    """Re-express a rank-two tensor from one gamma basis in the other."""
    out: TTerms = {}
    for (u, (a, b)), c in t.items():
        fa = dst.from_form(dst.gamma.to_gamma(src.gamma.from_gamma({(u, a): ONE})))
        fb = dst.from_form(dst.gamma.to_gamma(src.gamma.from_gamma({((), b): ONE})))
        add_into(out, dst.tensor(fa, fb), c)
    return out


def sigma_basis_independence_check(N: int, alpha=Q, tensor_name: str = "Rinv") -> bool:
    """sigma built on gamma^+ pairs agrees with sigma built on gamma^- pairs."""
    plus, minus = tensor_space(N, "+"), tensor_space(N, "-")
    tensor = structure(N).Rinv if tensor_name == "Rinv" else structure(N).R
    for i, j in product(plus.indices, plus.indices):
        t = plus.basis_pair(i, j)
        via_plus = convert_pair(plus, minus, plus.sigma(t, alpha, tensor=tensor))
        via_minus = minus.sigma(convert_pair(plus, minus, t), alpha, tensor=tensor)
        if via_plus != via_minus:
            return False
    return True


def gamma_plus_in_minus(N: int, i: int) -> FormTerms:
    """gamma^+_i in the gamma^- basis."""
    sp = tensor_space(N, "-")
    plus = tensor_space(N, "+")
    return sp.gamma.to_gamma(plus.gamma.from_gamma({((), i): ONE}))


# ---- second order relations -------------------------------------------------------

def _c(N: int) -> Scalar:
    return (ONE - Q) * (ONE + q_pow(N - 2)) / (ONE - q_pow(N - 1))


def T_value(N: int) -> Scalar:
    return Scalar(2) * Q * (ONE + q_pow(N - 2)) / ((ONE - Q) * (ONE - q_pow(N - 1)))


def leibniz_relation(sp: TensorSpace, i: int, j: int) -> TTerms:
    """Graded Leibniz derivative of the bimodule rule for dx_i . x_j.

    d(dx_i . x_j) = -dx_i ^ dx_j, and the right-hand side differentiates
    term by term, giving
    0 = dx_i dx_j + a1 Rinv dx dx + a2 dx_i dx_j + a3 K dx dx + a4 C^{kl} d(x_i x_j x_k) dx_l.
    """
    d = sp.data
    a1, a2, a3, a4 = sp.calc.coefficients
    out: TTerms = {}
    add_into(out, sp.dxdx({(): ONE}, i, j), ONE + a2)
    for k, l, v in d.Rinv.column(i, j):
        add_into(out, sp.dxdx({(): ONE}, k, l), a1 * v)
    for k, l, v in d.K.column(i, j):
        add_into(out, sp.dxdx({(): ONE}, k, l), a3 * v)
    for (k, l), c in d.C.entries.items():
        dform = sp.dx_form(sp.calc.differentiate_word((i, j, k)))
        add_into(out, sp.tensor(dform, sp.dx(l)), a4 * c)
    return out


def relation_R(sp: TensorSpace, i: int, j: int, literal: bool = False) -> TTerms:
    """The simplified second order relation [R_ij] with d(x)theta kept.

    The commonly printed form carries the opposite sign on every term after
    the two dx (x) dx terms; that form is not a consequence of the Leibniz
    relations. ``literal=True`` builds it anyway for comparison.
    """
    N = sp.N
    d = sp.data
    c = _c(N)
    head: TTerms = {}
    for k, l, v in d.Rinv.column(i, j):
        add_into(head, sp.dxdx({(): ONE}, k, l), v)
    add_into(head, sp.dxdx({(): ONE}, i, j), Q)
    tail: TTerms = {}
    for k, l, v in d.Rinv.column(i, j):
        add_into(tail, sp.theta_dx({(k,): ONE}, l), c * v)
    add_into(tail, sp.theta_dx({(i,): ONE}, j), Q * c)
    dth = sp.d_theta()
    add_into(tail, sp.left_mult({(i, j): ONE}, dth), -QINV * c * (ONE - Q + Q * Q))
    cij = d.C(i, j)
    if cij:
        add_into(tail, dth, q_pow(N - 3) * (ONE - Q) * (ONE + q_pow(3)) / (ONE - q_pow(N - 1)) * cij)
    for (k, l), ckl in d.C.entries.items():
        add_into(tail, sp.theta_dx({(i, j, k): ONE}, l), -c * c * ckl)
    kcoef = q_pow(N - 2) * (ONE - Q) ** 2 * (ONE + Q) * (ONE + q_pow(N - 2)) / (ONE - q_pow(N - 1)) ** 2
    for k, l, v in d.K.column(i, j):
        add_into(tail, sp.theta_dx({(k,): ONE}, l), kcoef * v)
    add_into(head, tail, ONE if literal else -ONE)
    return head


def relation_I(sp: TensorSpace, i: int, j: int) -> TTerms:
    """[I]: the relation with d(x)theta eliminated."""
    N = sp.N
    d = sp.data
    c = _c(N)
    den = (ONE - q_pow(N - 1)) ** 2
    b = ONE + q_pow(N - 2)
    out: TTerms = {}
    for k, l, v in d.Rinv.column(i, j):
        add_into(out, sp.dxdx({(): ONE}, k, l), v)
        add_into(out, sp.theta_dx({(k,): ONE}, l), -c * v)
    add_into(out, sp.dxdx({(): ONE}, i, j), Q)
    add_into(out, sp.theta_dx({(i,): ONE}, j), -Q * c)
    for (k, l), ckl in d.C.entries.items():
        add_into(out, sp.theta_dx({(i, j, k): ONE}, l), -(ONE + Q * Q) * b * b / den * ckl)
    kcoef = q_pow(N - 2) * (ONE + Q) * (ONE + Q * Q) * b / den
    for k, l, v in d.K.column(i, j):
        add_into(out, sp.theta_dx({(k,): ONE}, l), kcoef * v)
    return out


def relation_II(sp: TensorSpace) -> TTerms:
    """[II] = d(x)theta + T C^{kl} x_k theta (x) dx_l."""
    out = dict(sp.d_theta())
    T = T_value(sp.N)
    for (k, l), ckl in sp.data.C.entries.items():
        add_into(out, sp.theta_dx({(k,): ONE}, l), T * ckl)
    return out


def relation_II_gamma_display(sp: TensorSpace) -> TTerms:
    """-q^{N-1} C^{ij} g_i g_j + q (1+q^{N-2})(1-q^N)/(1-q^2) C^{ij} C^{mn} x_i x_m g_n g_j."""
    N = sp.N
    d = sp.data
    out: TTerms = {}
    for (i, j), c in d.C.entries.items():
        add_into(out, {((), (i, j)): -q_pow(N - 1) * c})
    coef = Q * (ONE + q_pow(N - 2)) * (ONE - q_pow(N)) / (ONE - Q * Q)
    for (i, j), c in d.C.entries.items():
        for (m, n), c2 in d.C.entries.items():
            for x, cx in sp.algebra.word_product((), (i, m)).items():
                add_into(out, {(x, (n, j)): coef * c * c2 * cx})
    return out


def d_theta_gamma_display(sp: TensorSpace) -> TTerms:
    """C^{ij} dx_i (x) dx_j written in gamma^-: (2 - q^{N-1} + q^N)/(1+q) C g g - q(1+q^{N-2})(1+q^N)/(1+q)^2 C C x x g g."""
    N = sp.N
    d = sp.data
    out: TTerms = {}
    c1 = (Scalar(2) - q_pow(N - 1) + q_pow(N)) / (ONE + Q)
    c2 = -Q * (ONE + q_pow(N - 2)) * (ONE + q_pow(N)) / (ONE + Q) ** 2
    for (i, j), c in d.C.entries.items():
        add_into(out, {((), (i, j)): c1 * c})
        for (m, n), cmn in d.C.entries.items():
            for x, cx in sp.algebra.word_product((), (i, m)).items():
                add_into(out, {(x, (n, j)): c2 * c * cmn * cx})
    return out


def annihilation_check(alpha, N: int) -> bool:
    """(id - sigma_alpha) kills [I]_ij for all i, j and [II]."""
    sp = tensor_space(N, "-")
    rels = [relation_I(sp, i, j) for i, j in product(sp.indices, sp.indices)]
    rels.append(relation_II(sp))
    for r in rels:
        diff = dict(r)
        add_into(diff, sp.sigma(r, alpha), -ONE)
        if diff:
            return False
    return True


# ---- module membership with bounded multipliers ------------------------------------

class SubmoduleSpan:
    """Echelon basis of span{u * g : g in generators, u normal word, len(u) <= degree}."""

    def __init__(self, sp: TensorSpace, generators: List[TTerms], degree: int):
        self.sp = sp
        self.degree = degree
        self.red = RowReducer(tensor_key)
        for k in range(degree + 1):
            for u in sp.algebra.normal_words(k):
                for g in generators:
                    self.red.add(sp.left_mult({u: ONE}, g))

    def reduce(self, t: TTerms) -> TTerms:
        return self.red.reduce(t)

    def contains(self, t: TTerms) -> bool:
        return not self.red.reduce(t)


def second_order_structures(sp: TensorSpace, i: int, j: int, k: int) -> List[TTerms]:
    """The eight structures multiplying A_1..A_8 in [R'_ijk]."""
    d = sp.data
    dth = sp.d_theta()
    thdx: TTerms = {}
    for (m, n), cmn in d.C.entries.items():
        add_into(thdx, sp.theta_dx({(m,): ONE}, n), cmn)
    prefactors = structure_prefactors(sp, i, j, k)
    out = [sp.left_mult(p, dth) for p in prefactors]
    out += [sp.left_mult(p, thdx) for p in prefactors]
    return out


def structure_prefactors(sp: TensorSpace, i: int, j: int, k: int) -> List[Dict[Word, Scalar]]:
    """x_i x_j x_k, C_ij x_k, C_jk x_i, C_tk Rinv^{st}_{ij} x_s as normal-form elements."""
    d = sp.data
    alg = sp.algebra
    p1 = alg.word_product((), (i, j, k))
    p2 = {(k,): d.C(i, j)} if d.C(i, j) else {}
    p3 = {(i,): d.C(j, k)} if d.C(j, k) else {}
    p4: Dict[Word, Scalar] = {}
    for s, t, v in d.Rinv.column(i, j):
        ctk = d.C(t, k)
        if ctk:
            add_into(p4, {(s,): ctk * v})
    return [p1, p2, p3, p4]


def leibniz_display(sp: TensorSpace, i: int, j: int) -> TTerms:
    """The Leibniz derivative written out term by term, as printed before elimination."""
    N = sp.N
    d = sp.data
    b = ONE + q_pow(N - 2)
    e = ONE - q_pow(N - 1)
    den = e * e
    out: TTerms = {}
    for k, l, v in d.Rinv.column(i, j):
        add_into(out, sp.dxdx({(): ONE}, k, l), v)
        add_into(out, sp.theta_dx({(k,): ONE}, l), -q_pow(N - 2) * (ONE - Q) ** 2 * (ONE + Q) * b / den * v)
    add_into(out, sp.dxdx({(): ONE}, i, j), Q)
    add_into(out, sp.theta_dx({(i,): ONE}, j), -q_pow(N - 1) * (ONE - Q) ** 2 * (ONE + Q) * b / den)
    add_into(out, sp.left_mult({(i, j): ONE}, sp.d_theta()), Q * Q * (ONE - Q) * b / e)
    for k in d.indices:
        for s, t, v in d.Rinv.column(j, k):
            for (k2, l), ckl in d.C.entries.items():
                if k2 == k:
                    add_into(out, sp.dxdx({(i, s): ONE}, t, l), Q * (ONE - Q) * b / e * v * ckl)
    for s, k, v1 in d.Rinv.column(i, j):
        for (l, w), clw in d.C.entries.items():
            for t, u, v2 in d.Rinv.column(k, l):
                add_into(out, sp.dxdx({(s, t): ONE}, u, w), (ONE - Q) * b / e * v1 * v2 * clw)
    if d.C(i, j):
        add_into(out, sp.d_theta(), -q_pow(N - 2) * (ONE + Q) * (ONE - Q) / e * d.C(i, j))
    for (k, l), c in d.C.entries.items():
        add_into(out, sp.theta_dx({(i, j, k): ONE}, l), (ONE - Q) * (ONE - Q ** 3) * b * b / (Q * den) * c)
    for k, l, v in d.K.column(i, j):
        add_into(out, sp.theta_dx({(k,): ONE}, l), -q_pow(N - 3) * (ONE - Q) ** 2 * (ONE + Q) * b / den * v)
    return out


def resolved_identity(sp: TensorSpace, i: int, j: int) -> TTerms:
    """Rinv^{st}_{jk} C^{kl} x_i x_s dx_t dx_l minus its resolved right-hand side."""
    N = sp.N
    d = sp.data
    e = ONE - q_pow(N - 1)
    out: TTerms = {}
    for k in d.indices:
        for s, t, v in d.Rinv.column(j, k):
            for (k2, l), ckl in d.C.entries.items():
                if k2 == k:
                    add_into(out, sp.dxdx({(i, s): ONE}, t, l), v * ckl)
    add_into(out, sp.theta_dx({(i,): ONE}, j), (ONE - q_pow(N - 2) - q_pow(N - 1) + q_pow(N)) / e)
    add_into(out, sp.left_mult({(i, j): ONE}, sp.d_theta()), -(ONE - Q))
    for (k, l), c in d.C.entries.items():
        add_into(out, sp.theta_dx({(i, j, k): ONE}, l), _c(N) * c)
    return out


def stated_A(N: int) -> List[Scalar]:
    """A_1..A_8 as printed: A_5, A_6, A_7 explicitly, A_8 = A_7/q, A_m = A_{m+4}/T."""
    b = ONE + q_pow(N - 2)
    e = ONE - q_pow(N - 1)
    p5 = (ONE - 2 * Q + 2 * Q ** 2 - 2 * Q ** 3 + 2 * Q ** 4 - 2 * Q ** 5 + Q ** 6
          - q_pow(N - 1) + 2 * q_pow(N) - 2 * q_pow(N + 1) + q_pow(N + 2)
          + 2 * q_pow(N + 4) - 3 * q_pow(N + 5) + q_pow(N + 6))
    p6 = (ONE - 2 * Q + 2 * Q ** 3 - Q ** 5 - Q ** 6 + Q ** 7 - q_pow(N - 1) + 2 * q_pow(N)
          - 3 * q_pow(N + 2) + q_pow(N + 3) + 3 * q_pow(N + 4) - q_pow(N + 5)
          - 2 * q_pow(N + 6) + q_pow(N + 7))
    A5 = Scalar(-2) * q_pow(-3) * b * b * p5 / e ** 3
    A6 = Scalar(2) * q_pow(N - 5) * b * p6 / e ** 3
    A7 = Scalar(2) * q_pow(N - 3) * (ONE - Q) ** 4 * (ONE + Q) ** 2 * b / e ** 2
    A8 = A7 * QINV
    T = T_value(N)
    return [A5 / T, A6 / T, A7 / T, A8 / T, A5, A6, A7, A8]


def S_value(sp: TensorSpace, A: Sequence[Scalar]) -> Optional[Scalar]:
    """S with C^{ij}(A1 x_i x_j x_k + A2 C_ij x_k + A3 C_jk x_i + A4 C_tk Rinv^{st}_ij x_s) = S x_k.

    Returns None when the contraction is not a common multiple of x_k.
    """
    S = None
    for k in sp.indices:
        acc: Dict[Word, Scalar] = {}
        for (i, j), cij in sp.data.C.entries.items():
            for m, p in enumerate(structure_prefactors(sp, i, j, k)):
                add_into(acc, p, cij * A[m])
        if set(acc) - {(k,)}:
            return None
        val = acc.get((k,), ZERO)
        if S is None:
            S = val
        elif S != val:
            return None
    return S


A_NAMES = tuple(f"A{m}" for m in range(1, 9))


class SecondOrderRelations:
    """[I], [II], [R_ij], [R'_ijk] and the coefficients A_1..A_8, T, S.

    ``degree`` bounds the multipliers u in the certificate span
    {u [R_ab]}; degree 3 suffices for N = 3, 4.
    """

    def __init__(self, N: int, degree: int = 3):
        self.N = N
        self.sp = tensor_space(N, "-")
        sp = self.sp
        self.T = T_value(N)
        pairs = list(product(sp.indices, sp.indices))
        self.R = {p: relation_R(sp, *p) for p in pairs}
        self.I = {p: relation_I(sp, *p) for p in pairs}
        self.II = relation_II(sp)
        self.degree = degree
        self._span: Optional[SubmoduleSpan] = None
        self._leibniz: Optional[Dict] = None
        self.offending: List[Tuple[int, int, int]] = []

    def span(self) -> SubmoduleSpan:
        if self._span is None:
            self._span = SubmoduleSpan(self.sp, list(self.R.values()), self.degree)
        return self._span

    def leibniz(self) -> Dict[Tuple[int, int], TTerms]:
        if self._leibniz is None:
            self._leibniz = {p: leibniz_relation(self.sp, *p) for p in self.R}
        return self._leibniz

    def R_prime(self, i, j, k) -> TTerms:
        return self.sp.right_mult_letter(self.R[(i, j)], k)

    # checks ------------------------------------------------------------------
    def leibniz_matches_display(self) -> bool:
        return all(self.leibniz()[p] == leibniz_display(self.sp, *p) for p in self.R)

    def equivalence(self, degree: int = 2) -> Dict[str, bool]:
        """Mutual membership of the Leibniz relations and the simplified relations."""
        sp = self.sp
        L = list(self.leibniz().values())
        span_L = SubmoduleSpan(sp, L, degree)
        span_LII = SubmoduleSpan(sp, L + [self.II], degree)
        span_R = SubmoduleSpan(sp, list(self.R.values()), degree)
        span_I = SubmoduleSpan(sp, list(self.I.values()) + [self.II], degree)
        literal = [relation_R(sp, i, j, literal=True) for i, j in self.R]
        return {
            "R in span L": all(span_L.contains(r) for r in self.R.values()),
            "L in span R": all(span_R.contains(l) for l in L),
            "II in span L": span_L.contains(self.II),
            "I in span L+II": all(span_LII.contains(r) for r in self.I.values()),
            "L in span I+II": all(span_I.contains(l) for l in L),
            "resolved identity in span L": all(span_L.contains(resolved_identity(sp, *p)) for p in self.R),
            "printed R in span L": all(span_L.contains(r) for r in literal),
        }

    def I_from_R(self) -> bool:
        """[I]_ij equals [R_ij] with the d(x)theta terms removed by multiples of [II]."""
        sp, N = self.sp, self.N
        c = _c(N)
        for (i, j), R in self.R.items():
            acc = dict(R)
            add_into(acc, sp.left_mult({(i, j): ONE}, self.II), -QINV * c * (ONE - Q + Q * Q))
            cij = sp.data.C(i, j)
            if cij:
                add_into(acc, self.II, q_pow(N - 3) * (ONE - Q) * (ONE + q_pow(3)) / (ONE - q_pow(N - 1)) * cij)
            if acc != self.I[(i, j)]:
                return False
        return True

    def II_contraction(self) -> Optional[Scalar]:
        """r with C^{ij} [R_ij] = r [II], or None if not proportional."""
        acc: TTerms = {}
        for (i, j), c in self.sp.data.C.entries.items():
            add_into(acc, self.R[(i, j)], c)
        key = next(iter(self.II))
        r = acc.get(key, ZERO) / self.II[key]
        scaled = {k: r * v for k, v in self.II.items()}
        return r if acc == scaled and r else None

    def bimodule_closure(self) -> bool:
        """[R_ij] x_k lies in the certificate span for every i, j, k."""
        span = self.span()
        self.offending = [t for t in product(self.sp.indices, repeat=3) if not span.contains(self.R_prime(*t))]
        return not self.offending

    def solution_space(self) -> Optional[Dict[str, Dict[str, Scalar]]]:
        """Echelon rows of all A with [R'_ijk] = sum A_m B_m modulo the certificate span.

        Returns None if no A works. A pivot A_m maps to its row
        {name: coefficient}; unknowns that never appear as pivots are free.
        """
        sp = self.sp
        span = self.span()
        order = {n: m + 1 for m, n in enumerate(A_NAMES)}
        red = RowReducer(lambda c: (0,) if c == "const" else (order[c],))
        for t in product(sp.indices, repeat=3):
            target = span.reduce(self.R_prime(*t))
            structs = [span.reduce(b) for b in second_order_structures(sp, *t)]
            keys = set(target)
            for b in structs:
                keys |= set(b)
            for key in keys:
                e = {A_NAMES[m]: structs[m][key] for m in range(8) if key in structs[m]}
                if key in target:
                    e["const"] = -target[key]
                if e:
                    red.add(e)
        rows = red.interreduced()
        if "const" in rows:
            return None
        return rows

    def ratio_family(self) -> Dict[str, Dict[str, Scalar]]:
        """Rows A_{m+4} - T A_m = 0 for m = 1..4, in the same echelon form."""
        order = {n: m + 1 for m, n in enumerate(A_NAMES)}
        red = RowReducer(lambda c: (0,) if c == "const" else (order[c],))
        for m in range(4):
            red.add({A_NAMES[m + 4]: ONE, A_NAMES[m]: -self.T})
        return red.interreduced()

    def ratio_identities_hold(self) -> bool:
        """The admissible A's are exactly those with A_{m+4} = T A_m."""
        rows = self.solution_space()
        return rows is not None and rows == self.ratio_family()

    def admits(self, A: Sequence[Scalar]) -> bool:
        rows = self.solution_space()
        if rows is None:
            return False
        vals = dict(zip(A_NAMES, A))
        vals["const"] = ONE
        return all(sum((c * vals[n] for n, c in row.items()), ZERO) == ZERO for row in rows.values())

    def factorized_form_holds(self, A: Sequence[Scalar]) -> bool:
        """[R'_ijk] - P_ijk ([II]) lies in the certificate span, P from A_1..A_4."""
        sp = self.sp
        span = self.span()
        for t in product(sp.indices, repeat=3):
            acc = dict(self.R_prime(*t))
            for m, p in enumerate(structure_prefactors(sp, *t)):
                add_into(acc, sp.left_mult(p, self.II), -A[m])
            if not span.contains(acc):
                self.offending = [t]
                return False
        return True

    def S(self, A: Optional[Sequence[Scalar]] = None) -> Optional[Scalar]:
        return S_value(self.sp, A if A is not None else stated_A(self.N))


# ---- wedge algebra of Gamma^{sigma 0} ------------------------------------------------

class WedgeAlgebra:
    """Scalar exterior relations on gamma_1..gamma_N:
    Rinv^{kl}_{ij} g_k g_l + q g_i g_j = 0, plus C^{ij} g_i g_j = 0 (implied, kept explicit).

    Pairs are rewritten within each index-sum class; words are normalised
    by repeatedly fixing the leftmost position with i_r >= i_{r+1}.
    """

    def __init__(self, N: int, include_metric: bool = True):
        self.N = N
        self.data = structure(N)
        self.include_metric = include_metric
        self.rules = self._pair_rules(self.pair_relations(include_metric))

    def pair_relations(self, include_metric=True) -> List[Dict[Idx, Scalar]]:
        d = self.data
        rels = []
        for i, j in product(d.indices, d.indices):
            r: Dict[Idx, Scalar] = {}
            for k, l, v in d.Rinv.column(i, j):
                add_into(r, {(k, l): v})
            add_into(r, {(i, j): Q})
            if r:
                rels.append(r)
        if include_metric:
            rels.append({(i, j): c for (i, j), c in d.C.entries.items()})
        return rels

    @staticmethod
    def _pair_order(p: Idx):
        k, l = p
        # non-increasing pairs rank above increasing ones so they become pivots
        return (1, k, -l) if k >= l else (0, -k, l)

    def _pair_rules(self, rels) -> Dict[Idx, Dict[Idx, Scalar]]:
        red = RowReducer(self._pair_order)
        for r in rels:
            red.add(r)
        rules = {}
        for piv, row in red.interreduced().items():
            if piv[0] < piv[1]:
                raise ArithmeticError(f"relation leaves increasing pair {piv} as leading term")
            rules[piv] = {p: -c for p, c in row.items() if p != piv}
        for i, j in product(self.data.indices, repeat=2):
            if i >= j and (i, j) not in rules:
                raise ArithmeticError(f"pair {(i, j)} cannot be rewritten to increasing pairs")
        return rules

    def rewrite_pair(self, i: int, j: int) -> Dict[Idx, Scalar]:
        if i < j:
            return {(i, j): ONE}
        return self.rules[(i, j)]

    def normal_form(self, terms: TTerms, trace: Optional[list] = None) -> TTerms:
        """Rewrite to strictly increasing index sequences; X coefficients ride along.

        ``trace`` collects (before, after, position) for each rewriting step.
        """
        out: TTerms = {}
        work = dict(terms)
        while work:
            key = next(iter(work))
            c = work.pop(key)
            u, w = key
            r = next((p for p in range(len(w) - 1) if w[p] >= w[p + 1]), None)
            if r is None:
                add_into(out, {key: c})
                continue
            for (k, l), v in self.rewrite_pair(w[r], w[r + 1]).items():
                nw = w[:r] + (k, l) + w[r + 2:]
                if trace is not None:
                    trace.append((w, nw, r))
                add_into(work, {(u, nw): c * v})
        return out

    def normal_form_scalar(self, terms: Dict[Idx, Scalar]) -> Dict[Idx, Scalar]:
        res = self.normal_form({((), w): c for w, c in terms.items()})
        return {w: c for (_u, w), c in res.items()}

    def graded_dimension(self, s: int) -> int:
        """Spanning-set rank in grade s, by linear algebra on all words of length s."""
        N = self.N
        if s <= 1:
            return 1 if s == 0 else N
        red = grade_reducer(N, s, self.pair_relations(self.include_metric))
        return N ** s - red.rank


def grade_reducer(N: int, s: int, rels: List[Dict[Idx, Scalar]]) -> RowReducer:
    """Echelon span of all V^a (x) rel (x) V^b in tensor grade s."""
    red = RowReducer(lambda w: w)
    letters = range(1, N + 1)
    for a in range(s - 1):
        for pre in product(letters, repeat=a):
            for post in product(letters, repeat=s - 2 - a):
                for r in rels:
                    red.add({pre + p + post: c for p, c in r.items()})
    return red


def measure_decreases(trace) -> bool:
    """Each step lowers i_1 + ... + i_r at the rewritten position r."""
    return all(sum(after[:r + 1]) < sum(before[:r + 1]) for before, after, r in trace)


@lru_cache(maxsize=None)
def wedge_algebra(N: int) -> WedgeAlgebra:
    return WedgeAlgebra(N)


def wedge_normal_form(terms, N: int):
    """Normal form of a wedge form; keys are (word, indices) or bare index tuples."""
    W = wedge_algebra(N)
    if terms and all(isinstance(k[0], int) for k in terms if k):
        return W.normal_form_scalar(terms)
    return W.normal_form(terms)


def graded_wedge_dimension(s: int, N: int) -> int:
    """Spanning-set rank in grade s; no increasing word exists above grade N."""
    if s > N:
        return 0
    return wedge_algebra(N).graded_dimension(s)


# ---- Gamma^sigma: the ideal generated by ker(id - sigma) ---------------------------

def sigma_kernel(N: int, alpha=Q) -> List[Dict[Idx, Scalar]]:
    """Basis of ker(id - sigma) on scalar pairs, by row reduction.

    sigma is left linear with a scalar matrix in the gamma basis, so the
    kernel with X coefficients is X times this scalar kernel.
    """
    d = structure(N)
    alpha = as_scalar(alpha)
    pairs = list(product(d.indices, repeat=2))
    # columns of (id - sigma)^T: row p lists the image coefficients of pair p
    cols = {}
    for p in pairs:
        img: Dict[Idx, Scalar] = {p: ONE}
        for k, l, v in d.Rinv.column(*p):
            add_into(img, {(k, l): -alpha * v})
        cols[p] = img
    # kernel vectors v with sum_p v_p img_p = 0: reduce augmented rows [img_p | e_p]
    red = RowReducer(lambda c: (1,) + c[1] if c[0] == "img" else (0,) + c[1])
    for p in pairs:
        row = {("img", k): c for k, c in cols[p].items()}
        row[("tag", p)] = ONE
        red.add(row)
    kernel = []
    for piv, row in red.interreduced().items():
        if piv[0] == "tag":
            kernel.append({k[1]: c for k, c in row.items()})
    return kernel


def sigma_kernel_rank(N: int, alpha=Q) -> int:
    return len(sigma_kernel(N, alpha))


def kernel_matches_wedge_relations(N: int) -> bool:
    """ker(id - sigma) at alpha = q together with C^{ij} g_i g_j spans the same pairs as the exterior relations."""
    d = structure(N)
    a = RowReducer(lambda w: w)
    for r in sigma_kernel(N, Q):
        a.add(r)
    a.add({p: c for p, c in d.C.entries.items()})
    b = RowReducer(lambda w: w)
    for r in wedge_algebra(N).pair_relations(True):
        b.add(r)
    return a.interreduced() == b.interreduced()


def d_theta_power_witness(N: int, power: int = 2) -> TTerms:
    """(d theta)^power in Gamma^sigma reduced modulo the sigma ideal in its grade.

    A nonzero result is bounded-degree evidence that the form survives.
    """
    sp = tensor_space(N, "-")
    form = sp.d_theta()
    acc = form
    for _ in range(power - 1):
        acc = sp.tensor(acc, form)
    red = grade_reducer(N, 2 * power, sigma_kernel(N, Q))
    groups: Dict[Word, Dict[Idx, Scalar]] = {}
    for (u, idx), c in acc.items():
        groups.setdefault(u, {})[idx] = c
    out: TTerms = {}
    for u, vec in groups.items():
        for idx, c in red.reduce(vec).items():
            out[(u, idx)] = c
    return out
