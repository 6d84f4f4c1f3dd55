import random

import pytest

from drspolar.clifford import (
    CliffordClass,
    SpecParseError,
    build_generators,
    build_module,
    clifford_group_perms,
    commutant_complex_structure,
    extended_spin_generators,
    irreducible_dimension,
    module_to_json,
    parse_class,
    skew_commutant_basis,
    skew_commutant_dimension,
)
from drspolar.exactla import ExactMatrix, rank, solve_matrix_equation


def test_irreducible_dimension_table():
    assert [irreducible_dimension(m) for m in range(9)] == [1, 2, 4, 4, 8, 8, 8, 8, 16]
    assert irreducible_dimension(7) == 8
    assert irreducible_dimension(9) == 32  # periodicity: Cl_9 = C(16) on R^32
    assert irreducible_dimension(12) == 16 * irreducible_dimension(4)


@pytest.mark.parametrize("m", range(1, 11))
def test_clifford_relations(m):
    gens = build_generators(m)
    d = gens[0].rows
    assert d == irreducible_dimension(m)
    eye = ExactMatrix.identity(d)
    for i in range(m):
        assert gens[i].transpose() == -gens[i]
        assert gens[i].transpose() @ gens[i] == eye
        for j in range(i, m):
            anti = gens[i] @ gens[j] + gens[j] @ gens[i]
            assert anti == (eye.scale(-2) if i == j else ExactMatrix.zeros(d, d))


def test_m1_is_rotation_generator():
    assert build_generators(1) == [ExactMatrix([[0, -1], [1, 0]])]


def _volume(gens):
    out = ExactMatrix.identity(gens[0].rows)
    for g in gens:
        out = out @ g
    return out


@pytest.mark.parametrize("m,sign", [(3, 1), (3, -1), (7, 1), (7, -1), (11, 1), (11, -1)])
def test_volume_sign_control(m, sign):
    gens = build_generators(m, sign)
    assert _volume(gens) == ExactMatrix.identity(gens[0].rows).scale(sign)


@pytest.mark.parametrize("m", [1, 2, 5, 6, 9])
def test_volume_squares_minus_one(m):
    gens = build_generators(m)
    vol = _volume(gens)
    d = gens[0].rows
    assert vol @ vol == ExactMatrix.identity(d).scale(-1)


@pytest.mark.parametrize("m", [4, 8])
def test_volume_m0mod4_squares_plus_one_anticommutes(m):
    gens = build_generators(m)
    vol = _volume(gens)
    d = gens[0].rows
    assert vol @ vol == ExactMatrix.identity(d)
    for g in gens:
        assert vol @ g == -(g @ vol)


def test_build_module_block_structure():
    # one generator of size 4 made of two 2x2 blocks
    mod = build_module(CliffordClass(1, 2))
    assert len(mod.generators) == 1
    assert mod.generators[0].rows == 4
    g = mod.generators[0]
    assert g[0, 1] == -1 and g[2, 3] == -1 and g[0, 2] == 0

    mod = build_module(CliffordClass(3, (1, 1)))
    assert mod.v_dim == 8
    vol = _volume(list(mod.generators))
    expect = ExactMatrix(
        [[(1 if i == j and i < 4 else (-1 if i == j else 0)) for j in range(8)] for i in range(8)]
    )
    assert vol == expect

    mod = build_module(CliffordClass(0, 5))
    assert mod.v_dim == 5 and mod.generators == ()


def test_parse_class_grammar():
    assert parse_class("N(1,2)") == CliffordClass(1, 2)
    assert parse_class("N(3,1,0)") == CliffordClass(3, (1, 0))
    assert parse_class("S(7,0,2)", "S") == CliffordClass(7, (0, 2))
    with pytest.raises(SpecParseError):
        parse_class("N(3,1)")  # pair form required
    with pytest.raises(SpecParseError):
        parse_class("N(2,1,1)")  # single multiplicity required
    with pytest.raises(SpecParseError):
        parse_class("X(1,1)")


@pytest.mark.parametrize("m,count", [(4, 10), (8, 36)])
def test_extended_spin_generators(m, count):
    mod = build_module(CliffordClass(m, 1))
    ext = extended_spin_generators(mod)
    assert len(ext) == count  # dim spin(m+1)
    for M in ext:
        assert M.transpose() == -M
    flat = ExactMatrix([[x for row in M.entries for x in row] for M in ext])
    assert rank(flat) == count


@pytest.mark.parametrize("m", [4, 8])
def test_extended_spin_sphere_transitivity(m):
    mod = build_module(CliffordClass(m, 1))
    ext = extended_spin_generators(mod)
    rng = random.Random(11)
    for _ in range(3):
        x = [rng.randint(-10, 10) for _ in range(mod.v_dim)]
        if all(v == 0 for v in x):
            continue
        omat = ExactMatrix.from_columns([M.apply(x) for M in ext])
        assert rank(omat) == mod.v_dim - 1


def test_extended_spin_rejects_unsupported():
    with pytest.raises(ValueError):
        extended_spin_generators(build_module(CliffordClass(3, (1, 0))))
    with pytest.raises(ValueError):
        extended_spin_generators(build_module(CliffordClass(4, 2)))


@pytest.mark.parametrize(
    "cls,expected",
    [
        (CliffordClass(0, 3), 3),      # so(3)
        (CliffordClass(1, 2), 4),      # u(2)
        (CliffordClass(2, 2), 10),     # sp(2)
        (CliffordClass(3, (2, 1)), 13),  # sp(2) + sp(1)
        (CliffordClass(5, 2), 4),      # u(2)
        (CliffordClass(6, 3), 3),      # so(3)
        (CliffordClass(7, (2, 2)), 2),   # so(2) + so(2)
        (CliffordClass(8, 2), 1),      # so(2)
        (CliffordClass(9, 2), 4),      # u(2)
    ],
)
def test_skew_commutant_dimension(cls, expected):
    assert skew_commutant_dimension(build_module(cls)) == expected


def test_skew_commutant_basis_members_commute():
    mod = build_module(CliffordClass(5, 2))
    basis = skew_commutant_basis(mod, random.Random(3))
    assert len(basis) == 4
    for C in basis:
        assert C.transpose() == -C
        for g in mod.generators:
            assert C @ g == g @ C


def test_skew_commutant_matches_generic_solver():
    """Dual route: group-averaging basis vs the generic linear-system solver."""
    for cls in [CliffordClass(1, 2), CliffordClass(2, 1), CliffordClass(3, (1, 1))]:
        mod = build_module(cls)
        sol = solve_matrix_equation(
            [(g, g) for g in mod.generators], size=mod.v_dim, skew=True
        )
        basis = skew_commutant_basis(mod, random.Random(7))
        assert sol.dim == len(basis) == skew_commutant_dimension(mod)
        # every averaged element lies in the solver's solution space
        flat_cols = [list(col) for col in sol.basis.columns()]
        for C in basis:
            flat = [x for row in C.entries for x in row]
            aug = ExactMatrix.from_columns(flat_cols + [flat])
            assert rank(aug) == sol.dim


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 9, 10])
def test_commutant_complex_structure(m):
    J = commutant_complex_structure(m)
    gens = build_generators(m)
    d = gens[0].rows
    assert J.transpose() == -J
    assert J @ J == ExactMatrix.identity(d).scale(-1)
    for g in gens:
        assert J @ g == g @ J


@pytest.mark.parametrize("m", [0, 6, 7, 8])
def test_commutant_complex_structure_real_cases(m):
    assert commutant_complex_structure(m) is None


def test_clifford_group_size_and_orthogonality():
    import numpy as np

    mod = build_module(CliffordClass(3, (1, 0)))
    perms = clifford_group_perms(mod)
    assert len(perms) == 8
    for g in perms:
        M = g.to_dense()
        assert (M.T @ M == np.eye(4, dtype=np.int64)).all()


def test_module_json_dump():
    mod = build_module(CliffordClass(1, 1))
    data = module_to_json(mod)
    assert data["v_dim"] == 2 and data["m"] == 1
    assert data["generators"] == [[[0, -1], [1, 0]]]
