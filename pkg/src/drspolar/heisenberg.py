"""Generalized Heisenberg algebras n = v + z built from Clifford modules.

The bracket on v is defined through the adjoint relation <J_Z U, V> =
<[U,V], Z>; with the generators G_i of the module, the z-coordinates of
[U,V] are <G_i U, V>.  Verification routines re-check every defining
axiom by direct evaluation and report witnesses on failure.  The public
operations are exact over Q; the verifier works on int64 arrays, which
is exact as well since all sampled vectors and generator entries are
small integers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clifford import CliffordClass, CliffordModule, build_module
from .exactla import ExactMatrix, dot, rank, rat_to_str


@dataclass(frozen=True)
class HeisenbergAlgebra:
    module: CliffordModule
    v_dim: int
    z_dim: int

    @property
    def n_dim(self) -> int:
        return self.v_dim + self.z_dim

    @property
    def cls(self) -> CliffordClass:
        return self.module.cls


def build_heisenberg(cls: CliffordClass) -> HeisenbergAlgebra:
    module = build_module(cls)
    return HeisenbergAlgebra(module, module.v_dim, cls.m)


def j_of(algebra: HeisenbergAlgebra, Z: Sequence) -> ExactMatrix:
    """J_Z = sum_i Z_i G_i acting on v."""
    Z = [Fraction(x) for x in Z]
    if len(Z) != algebra.z_dim:
        raise ValueError("Z has wrong length")
    out = ExactMatrix.zeros(algebra.v_dim, algebra.v_dim)
    for zi, g in zip(Z, algebra.module.generators):
        if zi != 0:
            out = out + g.scale(zi)
    return out


def bracket_v(algebra: HeisenbergAlgebra, U: Sequence, V: Sequence) -> tuple[Fraction, ...]:
    """[U, V] as a z-vector; i-th coordinate is <G_i U, V>."""
    U = [Fraction(x) for x in U]
    V = [Fraction(x) for x in V]
    if len(U) != algebra.v_dim or len(V) != algebra.v_dim:
        raise ValueError("v-vector has wrong length")
    return tuple(dot(g.apply(U), V) for g in algebra.module.generators)


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "pass": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _vec_json(v) -> list[str]:
    return [rat_to_str(Fraction(x)) for x in v]


def generators_int(module: CliffordModule) -> list[np.ndarray]:
    """Generators as int64 arrays; raises if any entry is not an integer."""
    out = []
    for g in module.generators:
        arr = np.empty((g.rows, g.cols), dtype=np.int64)
        for i, row in enumerate(g.entries):
            for j, x in enumerate(row):
                if x.denominator != 1:
                    raise ValueError("generator entries must be integers")
                arr[i, j] = x.numerator
        out.append(arr)
    return out


def _rand_vec(rng, n: int) -> np.ndarray:
    return np.array([rng.randint(-10, 10) for _ in range(n)], dtype=np.int64)


def verify_heisenberg_axioms(
    algebra: HeisenbergAlgebra, seed: int = 0, samples: int = 100
) -> list[AxiomResult]:
    """Exact pass/fail per defining axiom, with a witness on failure."""
    rng = random.Random(seed)
    gens = generators_int(algebra.module)
    m = algebra.z_dim if gens else 0
    n = algebra.v_dim
    eye = np.eye(n, dtype=np.int64)
    results = []

    # Clifford relations G_i G_j + G_j G_i = -2 delta_ij I (vacuous when v = 0)
    witness = None
    for i in range(m):
        for j in range(i, m):
            anti = gens[i] @ gens[j] + gens[j] @ gens[i]
            expect = -2 * eye if i == j else 0 * eye
            if (anti != expect).any():
                witness = {"i": i, "j": j}
                break
        if witness:
            break
    results.append(AxiomResult("clifford_relations", witness is None, witness))

    # skewness and orthogonality of each generator
    witness = None
    for i, g in enumerate(gens):
        if (g.T != -g).any() or (g.T @ g != eye).any():
            witness = {"i": i}
            break
    results.append(AxiomResult("generators_skew_orthogonal", witness is None, witness))

    # defining relation <J_Z U, V> = <[U,V], Z> on random integer triples
    witness = None
    for _ in range(samples if n and m else 0):
        U, V = _rand_vec(rng, n), _rand_vec(rng, n)
        Z = _rand_vec(rng, m)
        JZ = sum(int(z) * g for z, g in zip(Z, gens))
        lhs = int((JZ @ U) @ V)
        rhs = int(sum(int((g @ U) @ V) * int(z) for g, z in zip(gens, Z)))
        if lhs != rhs:
            witness = {"U": _vec_json(U), "V": _vec_json(V), "Z": _vec_json(Z)}
            break
    results.append(AxiomResult("defining_relation", witness is None, witness))

    # J_Z^2 = -<Z,Z> I for basis Z and random Z
    witness = None
    if n:
        z_samples = [np.eye(m, dtype=np.int64)[k] for k in range(m)]
        z_samples += [_rand_vec(rng, m) for _ in range(10)]
        for Z in z_samples:
            JZ = sum(int(z) * g for z, g in zip(Z, gens)) if m else np.zeros((n, n), dtype=np.int64)
            if (JZ @ JZ != -int(Z @ Z) * eye).any():
                witness = {"Z": _vec_json(Z)}
                break
    results.append(AxiomResult("j_squared", witness is None, witness))

    # antisymmetry of the bracket, and [U,U] = 0
    def br(U, V):
        return np.array([int((g @ U) @ V) for g in gens], dtype=np.int64)

    witness = None
    for _ in range(20 if n and m else 0):
        U, V = _rand_vec(rng, n), _rand_vec(rng, n)
        if br(U, U).any():
            witness = {"U": _vec_json(U)}
            break
        if (br(U, V) != -br(V, U)).any():
            witness = {"U": _vec_json(U), "V": _vec_json(V)}
            break
    results.append(AxiomResult("bracket_antisymmetric", witness is None, witness))

    # Jacobi on n: brackets land in the center, so all double brackets vanish
    def bracket_n(x, y):
        return (np.zeros(n, dtype=np.int64), br(x[0], y[0]))

    witness = None
    for _ in range(samples if n and m else 0):
        xs = [(_rand_vec(rng, n), _rand_vec(rng, m)) for _ in range(3)]
        total_v = np.zeros(n, dtype=np.int64)
        total_z = np.zeros(m, dtype=np.int64)
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            inner_v, _inner_z = bracket_n(xs[a], xs[b])
            tv, tz = bracket_n((inner_v, _inner_z), xs[c])
            total_v += tv
            total_z += tz
        if total_v.any() or total_z.any():
            witness = {"triple": [[_vec_json(u), _vec_json(x)] for u, x in xs]}
            break
    results.append(AxiomResult("jacobi_two_step", witness is None, witness))

    # center of n equals z when v != 0 and m >= 1 (adjoint map has full rank);
    # rank is monotone under adding rows, so a full-rank first block suffices
    witness = None
    if n and m:
        r = rank(ExactMatrix.from_numpy(gens[0]))
        if r != n:
            r = rank(ExactMatrix.from_numpy(np.vstack(gens)))
        if r != n:
            witness = {"adjoint_rank": r}
    results.append(AxiomResult("center_equals_z", witness is None, witness))

    return results


def algebra_to_json(algebra: HeisenbergAlgebra) -> dict:
    from .clifford import module_to_json

    return {
        "v_dim": algebra.v_dim,
        "z_dim": algebra.z_dim,
        "module": module_to_json(algebra.module),
    }
