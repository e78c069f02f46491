import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polydual import FenchelProblem, parse_problem
from polydual import generators as gen
from polydual.coderivative import SetValuedMap
from polydual.lagrange import ConeProgram
from polydual.problemfile import ParseError, ProblemFile, format_problem

MINIMAL = """\
version 1
kind fenchel
phi (maxaffine ((1) 0) ((-1) 0))   # |x|
psi (indicator (poly 1 (le (-1) -1)))
A (matrix (1))
"""


def test_minimal_fenchel_file():
    pf = parse_problem(MINIMAL)
    assert pf.kind == "fenchel"
    prob = pf.problem()
    assert isinstance(prob, FenchelProblem)
    assert prob.objective((1,)) == 1 and prob.objective((0,)) == float("inf")


def test_zero_denominator_diagnostic():
    text = MINIMAL.replace("A (matrix (1))", "A (matrix (1/0))")
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert (info.value.line, info.value.column) == (5, 12)
    assert "zero denominator" in info.value.message


def test_matrix_shape_diagnostic():
    with pytest.raises(ParseError) as info:
        parse_problem(MINIMAL.replace("A (matrix (1))", "A (matrix (1 2))"))
    assert info.value.line == 5


@pytest.mark.parametrize("text, line", [
    ("kind fenchel\n", 1),
    ("version 2\nkind fenchel\n", 1),
    ("version 1\nkind nonsense\n", 2),
    ("version 1\nkind fenchel\nphi (maxaffine ((1) 0)\n", 3),
    ("version 1\nkind fenchel\nphi (maxaffine ((0.5) 0))\n", 3),
    ("version 1\nkind fenchel\ncolour (matrix (1))\n", 3),
    ("version 1\nkind fenchel\nphi (affine (1) 0)\n", 1),
])
def test_diagnostics_carry_locations(text, line):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert info.value.line == line and info.value.column >= 1


def test_other_kinds_parse():
    lag = parse_problem("version 1\nkind lagrange\nphi (maxaffine ((1) -2) ((-1) 2))\npsi (affine (1) -1)\n"
                        "point (1)\n")
    assert isinstance(lag.problem(), ConeProgram) and lag.fields["point"] == (1,)
    cod = parse_problem("version 1\nkind coderivative\nmap (map 1 1 (poly 2 (le (1 -1) 0)))\n"
                        "a (0)\nb (0)\nh (1)\n")
    assert isinstance(cod.problem(), SetValuedMap)
    conj = parse_problem("version 1\nkind conjugate\nf (sum (maxaffine ((1) 0)) (indicator (poly 1 (le (1) 1))))\n"
                         "at (1/2)\nat (3)\n")
    assert conj.fields["at"] == [(Fraction(1, 2),), (3,)]


def test_round_trip_examples():
    pf = parse_problem(MINIMAL)
    text = format_problem(pf)
    assert parse_problem(text) == pf
    assert format_problem(parse_problem(text)) == text


@given(st.integers(0, 10 ** 6))
def test_round_trip_random_programs(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 3), rng.randint(1, 3)
    phi, psi, A = gen.fenchel_any(rng, n, m)
    pf = ProblemFile("fenchel", {"phi": phi, "psi": psi, "A": A})
    again = parse_problem(format_problem(pf))
    assert again == pf
    prog = gen.cone_program(rng, n, m)
    lf = ProblemFile("lagrange", {"phi": prog.phi, "psi": list(prog.psi), "region": prog.region})
    assert parse_problem(format_problem(lf)) == lf
