import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsphere import _kernels_py as py
from qsphere import kernels

polys = st.lists(st.integers(-20, 20), max_size=6).map(py.trim)

try:
    from qsphere import _kernels as cy
except ImportError:  # extension not built
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


@settings(max_examples=80, deadline=None)
@given(polys, polys)
def test_gcd_divides_both(a, b):
    g = py.pgcd(a, b)
    if a or b:
        assert py.pdivexact(a, g) is not None
        assert py.pdivexact(b, g) is not None


@settings(max_examples=80, deadline=None)
@given(polys, polys, polys)
def test_gcd_of_multiples(a, b, c):
    if not c or not (a or b):
        return
    g = py.pgcd(py.pmul(a, c), py.pmul(b, c))
    assert py.pdivexact(g, py.pgcd(c, c)) is not None


@needs_cython
@settings(max_examples=120, deadline=None)
@given(polys, polys)
def test_backends_agree(a, b):
    for name in ("padd", "psub", "pmul", "pgcd"):
        assert getattr(py, name)(a, b) == getattr(cy, name)(a, b), name
    if b:
        assert py.pdivexact(a, b) == cy.pdivexact(a, b)
    assert py.pcontent(a) == cy.pcontent(a)


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    env = dict(os.environ, QSPHERE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from qsphere import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True).stdout
    assert out.strip() == "python"


def test_pure_python_backend_gives_same_scalars():
    code = ("from qsphere.scalars import Q, ONE, q_pow, format_scalar;"
            "print(format_scalar((ONE - q_pow(5)) / (ONE - Q * Q) + ONE / (ONE + Q)))")
    env = dict(os.environ, QSPHERE_PURE_PYTHON="1")
    a = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True).stdout
    b = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
    assert a == b
