import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsphere.algebra import DegreeExceeded
from qsphere.parser import (ExpressionError, IndexOutOfRange, ParseError, Value, parse, to_text,
                            tokenize, wedge)
from qsphere.scalars import ONE, Q, Scalar, q_pow


def same(a: Value, b: Value) -> bool:
    if not a.terms and not b.terms:
        return True
    return (a.rank, a.terms, a.basis, a.op) == (b.rank, b.terms, b.basis, b.op)


def roundtrip(text, N=3, sign=1):
    v = parse(text, N, sign)
    out = to_text(v)
    assert same(parse(out, N, sign), v), out
    return out


def test_product_node():
    v = parse("x1*dx2", 3)
    assert v.rank == 1 and v.basis == "dx"
    assert v.terms == {((1,), 2): ONE}
    assert to_text(v) == "x1*dx2"


def test_scaled_wedge():
    v = parse("(1-q)/(1-q^2) * g+1 ^ g+2", 3)
    assert v.rank == 2 and v.op == "^" and v.basis == "g+"
    assert v.terms == {((), (1, 2)): ONE / (ONE + Q)}


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        parse("dx4", 3)
    with pytest.raises(IndexOutOfRange):
        parse("x0", 3)


def test_syntax_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse("x1 + * x2", 3)
    assert info.value.position == 5
    with pytest.raises(ParseError):
        parse("x1 $ x2", 3)
    with pytest.raises(ParseError):
        parse("(x1 + x2", 3)


def test_precedence_star_binds_tighter():
    a = parse("x1*g1 (x) g2", 3)
    b = parse("(x1*g1) (x) g2", 3)
    assert a.terms == b.terms


def test_q_exponents():
    assert parse("q^2", 3).terms == {(): q_pow(2)}
    assert parse("q^(-1)", 3).terms == {(): q_pow(-1)}
    assert parse("q^(1/2)", 3).terms == {(): Scalar.s_power(1)}
    assert parse("q^-3", 3).terms == {(): q_pow(-3)}
    with pytest.raises(ParseError):
        parse("q^(1/3)", 3)


def test_sphere_and_aliases():
    assert to_text(parse("sphere", 3)) == "1"
    assert to_text(parse("C^{kl} x_k x_l", 4)) == "1"
    assert parse("theta", 3).terms == parse("C^{kl} x_k dx_l", 3).terms


def test_g_alias_is_g_minus():
    assert parse("g2", 3).terms == parse("g-2", 3).terms
    assert parse("g2", 3).basis == "g-"


def test_form_products_need_tensor():
    with pytest.raises(ExpressionError):
        parse("dx1*dx2", 3)
    with pytest.raises(ExpressionError):
        parse("g+1 ^ g-2", 3)
    with pytest.raises(ExpressionError):
        parse("g1 (x) g2 + g1 ^ g2", 3)
    with pytest.raises(ExpressionError):
        parse("x1 / x2", 3)


def test_tensors_only_over_plus_calculus():
    with pytest.raises(ExpressionError):
        parse("dx1 (x) dx2", 3, sign=-1)


def test_degree_bound():
    with pytest.raises(DegreeExceeded):
        parse("x1*x2*x3*x1*x2", 3)
    assert parse("x1*x2*x3*x1*x2", 3, max_degree=6).rank == 0


def test_mixed_bases_are_added_in_dx():
    v = parse("g+1 - dx1", 3)
    assert v.basis == "dx"
    alpha = parse("g+1", 3)
    assert v.terms  # gamma_1 - dx_1 = alpha x_1 theta, nonzero
    assert alpha.basis == "g+"


def test_wedge_of_tensor():
    v = wedge(parse("g2 (x) g2", 3), 3)
    assert to_text(v) == "(-q^(-1/2) + q^(1/2))*g-1 ^ g-3"


def test_tokenizer_tensor_token():
    kinds = [t.kind for t in tokenize("g1 (x) g2")]
    assert kinds == ["g", "(x)", "g", "end"]


@pytest.mark.parametrize("text", [
    "x1*dx2", "dx1*x1", "x2*x1", "theta", "q^(1/2)*x1 - 2*q^(-1)", "g1 (x) x1*g2",
    "x1*g1 ^ g2", "g3 ^ g2 ^ g1", "dx1 (x) dx2", "g+2*x3 - x1*g+1", "(1 + q)/(2 - q)*x3*x3",
])
def test_roundtrip_examples(text):
    roundtrip(text)


def test_roundtrip_minus_calculus():
    roundtrip("dx2*x1 + x3*dx1", sign=-1)
    roundtrip("g+2*x1", sign=-1)


atoms = st.sampled_from(["x1", "x2", "x3", "q", "2", "q^(-1/2)", "(1 - q)"])


@st.composite
def expressions(draw):
    parts = []
    for _ in range(draw(st.integers(1, 3))):
        coeff = "*".join(draw(st.lists(atoms, min_size=1, max_size=2)))
        if draw(st.booleans()):
            parts.append(coeff)
        else:
            parts.append(f"{coeff}*dx{draw(st.integers(1, 3))}*{draw(atoms)}")
    return " - ".join(parts) if draw(st.booleans()) else " + ".join(parts)


@settings(max_examples=40, deadline=None)
@given(expressions())
def test_parse_print_roundtrip(text):
    try:
        v = parse(text, 3, max_degree=8)
    except ExpressionError:
        return
    assert same(parse(to_text(v), 3, max_degree=8), v)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(["g1", "g2", "g3", "x1*g2", "q*g3"]), min_size=2, max_size=3))
def test_wedge_roundtrip(factors):
    v = parse(" ^ ".join(factors), 3)
    assert same(parse(to_text(v), 3), v)
