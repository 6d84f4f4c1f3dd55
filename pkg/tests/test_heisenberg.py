import random
from fractions import Fraction

import pytest

from drspolar.clifford import CliffordClass, CliffordModule, parse_class
from drspolar.exactla import ExactMatrix, dot
from drspolar.heisenberg import (
    HeisenbergAlgebra,
    algebra_to_json,
    bracket_v,
    build_heisenberg,
    j_of,
    verify_heisenberg_axioms,
)


def test_build_dimensions():
    n11 = build_heisenberg(CliffordClass(1, 1))
    assert (n11.v_dim, n11.z_dim) == (2, 1)  # the 3-dimensional Heisenberg algebra
    n310 = build_heisenberg(parse_class("N(3,1,0)"))
    assert (n310.v_dim, n310.z_dim) == (4, 3)
    n0k = build_heisenberg(CliffordClass(0, 4))
    assert (n0k.v_dim, n0k.z_dim) == (4, 0)


def test_heisenberg_n11_brackets():
    alg = build_heisenberg(CliffordClass(1, 1))
    # G_1 = [[0,-1],[1,0]]: [e1, e2] = <G_1 e1, e2> = 1
    assert bracket_v(alg, [1, 0], [0, 1]) == (Fraction(1),)
    assert bracket_v(alg, [1, 0], [1, 0]) == (Fraction(0),)
    # [U, J_X U] = <U,U> X for unit X
    rng = random.Random(0)
    for _ in range(20):
        U = [rng.randint(-10, 10), rng.randint(-10, 10)]
        JU = j_of(alg, [1]).apply(U)
        assert bracket_v(alg, U, JU) == (dot(U, U),)


def test_j_of_linearity_and_square():
    alg = build_heisenberg(CliffordClass(2, 1))
    assert j_of(alg, [0, 0]).is_zero()
    assert j_of(alg, [1, 0]) == alg.module.generators[0]
    J = j_of(alg, [1, 1])
    assert J == alg.module.generators[0] + alg.module.generators[1]
    assert J @ J == ExactMatrix.identity(alg.v_dim).scale(-2)


def test_defining_relation_random_sweep():
    rng = random.Random(42)
    for name in ["N(1,1)", "N(2,2)", "N(3,1,1)", "N(5,1)", "N(7,1,0)"]:
        alg = build_heisenberg(parse_class(name))
        for _ in range(100):
            U = [rng.randint(-10, 10) for _ in range(alg.v_dim)]
            V = [rng.randint(-10, 10) for _ in range(alg.v_dim)]
            Z = [rng.randint(-10, 10) for _ in range(alg.z_dim)]
            assert dot(j_of(alg, Z).apply(U), V) == dot(bracket_v(alg, U, V), Z)


def test_n0k_abelian():
    alg = build_heisenberg(CliffordClass(0, 3))
    assert bracket_v(alg, [1, 2, 3], [4, 5, 6]) == ()
    report = verify_heisenberg_axioms(alg, seed=1)
    assert all(r.passed for r in report)


@pytest.mark.parametrize("name", ["N(1,1)", "N(2,1)", "N(3,1,1)", "N(4,1)", "N(8,1)"])
def test_axiom_suite_passes(name):
    alg = build_heisenberg(parse_class(name))
    report = verify_heisenberg_axioms(alg, seed=0, samples=50)
    assert all(r.passed for r in report), [r.axiom for r in report if not r.passed]


def test_axiom_suite_detects_fault_injection():
    """Flipping one generator entry must break J^2 (and more) with a witness."""
    alg = build_heisenberg(CliffordClass(3, (1, 0)))
    g0 = [list(row) for row in alg.module.generators[0].entries]
    g0[0][1] = -g0[0][1]
    tampered_gens = (ExactMatrix(g0),) + alg.module.generators[1:]
    tampered = HeisenbergAlgebra(
        CliffordModule(alg.cls, alg.v_dim, tampered_gens), alg.v_dim, alg.z_dim
    )
    report = verify_heisenberg_axioms(tampered, seed=0)
    failed = {r.axiom for r in report if not r.passed}
    assert failed, "tampering was not detected"
    for r in report:
        if not r.passed and r.axiom in ("j_squared", "defining_relation"):
            assert r.witness is not None


def test_report_json_shape():
    alg = build_heisenberg(CliffordClass(1, 1))
    report = verify_heisenberg_axioms(alg, seed=0)
    data = [r.to_json() for r in report]
    assert all(set(d) >= {"axiom", "pass"} for d in data)
    dump = algebra_to_json(alg)
    assert dump["v_dim"] == 2 and dump["module"]["m"] == 1
