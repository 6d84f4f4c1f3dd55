"""Damek-Ricci solvable extensions s = a + v + z and their connection oracles.

Coordinates on s: index 0 is the A-direction, then the v-block, then the
z-block.  The bracket extends the Heisenberg bracket by [A,U] = U/2 on v
and [A,X] = X on z; the inner product is the standard dot product in
these coordinates.

Two independent oracles for the Levi-Civita connection at the identity:

* ``nabla_left_invariant`` evaluates the Koszul formula for left-invariant
  fields, 2<nabla_x y, e> = <[x,y],e> - <[y,e],x> + <[e,x],y>.
* ``killing_koszul_at_e`` evaluates the Killing-field identity for
  right-invariant fields, using [xi,eta](e) = -[xi(e),eta(e)], which gives
  2<nabla_xi eta, zeta>(e) = -<[xi,eta],zeta> - <[xi,zeta],eta> - <xi,[eta,zeta]>.

Sign conventions are pinned by the torsion-freeness check in the axiom
suite rather than trusted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .clifford import CliffordClass, parse_class
from .exactla import dot, rat_to_str
from .heisenberg import (
    AxiomResult,
    HeisenbergAlgebra,
    build_heisenberg,
    generators_int,
    verify_heisenberg_axioms,
)


@dataclass(frozen=True)
class SVector:
    """An element rA + U + X of s."""

    a_part: Fraction
    v_part: tuple[Fraction, ...]
    z_part: tuple[Fraction, ...]

    @staticmethod
    def make(a, v: Sequence, z: Sequence) -> "SVector":
        return SVector(
            Fraction(a),
            tuple(Fraction(x) for x in v),
            tuple(Fraction(x) for x in z),
        )

    def coords(self) -> tuple[Fraction, ...]:
        return (self.a_part,) + self.v_part + self.z_part

    def __add__(self, other: "SVector") -> "SVector":
        return SVector(
            self.a_part + other.a_part,
            tuple(a + b for a, b in zip(self.v_part, other.v_part)),
            tuple(a + b for a, b in zip(self.z_part, other.z_part)),
        )

    def __sub__(self, other: "SVector") -> "SVector":
        return self + other.scale(-1)

    def scale(self, c) -> "SVector":
        c = Fraction(c)
        return SVector(
            c * self.a_part,
            tuple(c * x for x in self.v_part),
            tuple(c * x for x in self.z_part),
        )

    def is_zero(self) -> bool:
        return (
            self.a_part == 0
            and all(x == 0 for x in self.v_part)
            and all(x == 0 for x in self.z_part)
        )

    def to_json(self) -> list[str]:
        return [rat_to_str(x) for x in self.coords()]


@dataclass(frozen=True)
class DamekRicciSpace:
    heis: HeisenbergAlgebra
    s_dim: int

    @property
    def v_dim(self) -> int:
        return self.heis.v_dim

    @property
    def z_dim(self) -> int:
        return self.heis.z_dim

    @property
    def cls(self) -> CliffordClass:
        return self.heis.cls

    def name(self) -> str:
        return self.cls.name("S")

    def vector(self, a, v: Sequence, z: Sequence) -> SVector:
        x = SVector.make(a, v, z)
        if len(x.v_part) != self.v_dim or len(x.z_part) != self.z_dim:
            raise ValueError("component dimensions do not match the space")
        return x

    def from_coords(self, coords: Sequence) -> SVector:
        coords = list(coords)
        if len(coords) != self.s_dim:
            raise ValueError("coordinate length mismatch")
        return SVector.make(
            coords[0], coords[1 : 1 + self.v_dim], coords[1 + self.v_dim :]
        )

    def basis_vector(self, i: int) -> SVector:
        coords = [Fraction(0)] * self.s_dim
        coords[i] = Fraction(1)
        return self.from_coords(coords)

    def zero(self) -> SVector:
        return self.from_coords([0] * self.s_dim)


def build_space(cls: CliffordClass, verify: bool = False) -> DamekRicciSpace:
    """Construct the solvable extension; verify=True runs the axiom suite."""
    heis = build_heisenberg(cls)
    space = DamekRicciSpace(heis, 1 + heis.v_dim + heis.z_dim)
    if verify:
        bad = [r.axiom for r in verify_space_axioms(space) if not r.passed]
        if bad:
            raise ArithmeticError(f"axioms failed at build time: {bad}")
    return space


def parse_space(text: str) -> DamekRicciSpace:
    return build_space(parse_class(text, "S"))


def bracket_s(space: DamekRicciSpace, x: SVector, y: SVector) -> SVector:
    """[rA+U+X, sA+V+Y] = (r/2)V - (s/2)U + rY - sX + [U,V]."""
    from .heisenberg import bracket_v

    r, s = x.a_part, y.a_part
    half = Fraction(1, 2)
    v = tuple(half * (r * b - s * a) for a, b in zip(x.v_part, y.v_part))
    if space.v_dim and space.z_dim:
        vv = bracket_v(space.heis, x.v_part, y.v_part)
    else:
        vv = (Fraction(0),) * space.z_dim
    z = tuple(r * b - s * a + c for a, b, c in zip(x.z_part, y.z_part, vv))
    return SVector(Fraction(0), v, z)


def inner(space: DamekRicciSpace, x: SVector, y: SVector) -> Fraction:
    """<rA+U+X, sA+V+Y> = rs + <U,V> + <X,Y>."""
    return (
        x.a_part * y.a_part
        + sum((a * b for a, b in zip(x.v_part, y.v_part)), Fraction(0))
        + sum((a * b for a, b in zip(x.z_part, y.z_part)), Fraction(0))
    )


def _j_apply(space: DamekRicciSpace, Z: Sequence, V: Sequence) -> tuple[Fraction, ...]:
    """J_Z V = sum_i Z_i (G_i V) without forming the matrix."""
    out = [Fraction(0)] * space.v_dim
    for zi, g in zip(Z, space.heis.module.generators):
        if zi:
            gv = g.apply(V)
            out = [o + zi * t for o, t in zip(out, gv)]
    return tuple(out)


def _ad_transpose(space: DamekRicciSpace, y: SVector, x: SVector) -> SVector:
    """The metric adjoint of ad_y applied to x: <[y,w],x> = <w, ad_y^T x>."""
    half = Fraction(1, 2)
    a = -half * dot(y.v_part, x.v_part) - dot(y.z_part, x.z_part)
    jv = _j_apply(space, x.z_part, y.v_part)
    v = tuple(half * y.a_part * u + j for u, j in zip(x.v_part, jv))
    z = tuple(y.a_part * t for t in x.z_part)
    return SVector(a, v, z)


def nabla_left_invariant(space: DamekRicciSpace, x: SVector, y: SVector) -> SVector:
    """Levi-Civita connection of left-invariant fields at e.

    Evaluates the Koszul identity 2<nabla_x y, z> = <[x,y],z> - <[y,z],x>
    + <[z,x],y> in its adjoint form nabla_x y = ([x,y] - ad_y^T x - ad_x^T y)/2.
    """
    out = bracket_s(space, x, y) - _ad_transpose(space, y, x) - _ad_transpose(space, x, y)
    return out.scale(Fraction(1, 2))


def nabla_koszul_reference(space: DamekRicciSpace, x: SVector, y: SVector) -> SVector:
    """Literal basis-summed Koszul evaluation; slow cross-check oracle."""
    coords = []
    xy = bracket_s(space, x, y)
    for i in range(space.s_dim):
        e = space.basis_vector(i)
        val = (
            inner(space, xy, e)
            - inner(space, bracket_s(space, y, e), x)
            + inner(space, bracket_s(space, e, x), y)
        )
        coords.append(val / 2)
    return space.from_coords(coords)


def killing_koszul_at_e(
    space: DamekRicciSpace, xi: SVector, eta: SVector, zeta: SVector
) -> Fraction:
    """2<nabla_xi eta, zeta> at e for right-invariant Killing fields.

    All three arguments are the values at e; the vector-field brackets of
    right-invariant fields at e are the negated algebra brackets.
    """
    return (
        -inner(space, bracket_s(space, xi, eta), zeta)
        - inner(space, bracket_s(space, xi, zeta), eta)
        - inner(space, xi, bracket_s(space, eta, zeta))
    )


# -- exhaustive Jacobi check -------------------------------------------


def _pair_bracket_table(space: DamekRicciSpace) -> dict:
    """Sparse bracket table on basis indices, {(i, j): {k: coeff}} for i < j."""
    n, m = space.v_dim, space.z_dim
    gens = generators_int(space.heis.module)
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    half = Fraction(1, 2)
    for a in range(n):
        table[(0, 1 + a)] = {1 + a: half}
    for i in range(m):
        table[(0, 1 + n + i)] = {1 + n + i: Fraction(1)}
    for a in range(n):
        for b in range(a + 1, n):
            entry = {}
            for k, g in enumerate(gens):
                # <G_k e_a, e_b> = (G_k)[b][a]
                c = int(g[b, a])
                if c:
                    entry[1 + n + k] = Fraction(c)
            if entry:
                table[(1 + a, 1 + b)] = entry
    return table


def jacobi_defect(space: DamekRicciSpace) -> tuple[int, int, int] | None:
    """First basis triple violating Jacobi, or None.

    The table is checked to be graded (v-v brackets land in z; brackets
    involving z vanish), which makes triples with all three indices in
    the v-block identically zero; those are skipped, everything else is
    evaluated exhaustively.
    """
    n, m = space.v_dim, space.z_dim
    s = space.s_dim
    table = _pair_bracket_table(space)
    z_lo = 1 + n

    # grading hypotheses, verified exhaustively over the table
    for (i, j), entry in table.items():
        if 1 <= i < z_lo and 1 <= j < z_lo:
            if any(k < z_lo for k in entry):
                return (i, j, -1)
        if i >= z_lo or j >= z_lo:
            if i != 0 and j != 0:
                return (i, j, -2)

    def sb(i, j):
        if i < j:
            return table.get((i, j)), 1
        return table.get((j, i)), -1

    def term(entry_sign, k, acc):
        entry, sign = entry_sign
        if not entry:
            return
        for idx, c in entry.items():
            inner_entry = table.get((idx, k)) if idx < k else (
                table.get((k, idx)) if k < idx else None
            )
            if not inner_entry:
                continue
            s2 = 1 if idx < k else -1
            for idx2, c2 in inner_entry.items():
                acc[idx2] = acc.get(idx2, Fraction(0)) + sign * s2 * c * c2

    for i in range(s):
        for j in range(i + 1, s):
            # pure-v triples vanish by the verified grading
            j_pure_v = 1 <= i < z_lo and 1 <= j < z_lo
            for k in range(j + 1, s):
                if j_pure_v and k < z_lo:
                    continue
                acc: dict[int, Fraction] = {}
                term(sb(i, j), k, acc)
                term(sb(j, k), i, acc)
                term(sb(k, i), j, acc)
                if any(v != 0 for v in acc.values()):
                    return (i, j, k)
    return None


def verify_space_axioms(
    space: DamekRicciSpace, seed: int = 0, samples: int = 100
) -> list[AxiomResult]:
    """Axioms of s: bracket weights, Jacobi, torsion-freeness, metric symmetry."""
    rng = random.Random(seed)
    results = list(verify_heisenberg_axioms(space.heis, seed=seed, samples=samples))
    A = space.basis_vector(0)

    # [A, U] = U/2 on v and [A, X] = X on z
    witness = None
    for i in range(1, space.s_dim):
        e = space.basis_vector(i)
        expect = e.scale(Fraction(1, 2)) if i <= space.v_dim else e
        if bracket_s(space, A, e) != expect:
            witness = {"index": i}
            break
    results.append(AxiomResult("a_weights", witness is None, witness))

    # Jacobi identity on s, exhaustive over basis triples
    bad = jacobi_defect(space)
    results.append(
        AxiomResult(
            "jacobi_s", bad is None, None if bad is None else {"triple": list(bad)}
        )
    )

    def rand_svec():
        return space.from_coords(
            [rng.randint(-10, 10) for _ in range(space.s_dim)]
        )

    # torsion-freeness pins the Koszul sign conventions
    witness = None
    for _ in range(min(samples, 25)):
        x, y = rand_svec(), rand_svec()
        lhs = nabla_left_invariant(space, x, y) - nabla_left_invariant(space, y, x)
        if lhs != bracket_s(space, x, y):
            witness = {"x": x.to_json(), "y": y.to_json()}
            break
    results.append(AxiomResult("torsion_free", witness is None, witness))

    # metric compatibility for constant fields: <nabla_x y, z> = -<y, nabla_x z>
    witness = None
    for _ in range(min(samples, 25)):
        x, y, z = rand_svec(), rand_svec(), rand_svec()
        if inner(space, nabla_left_invariant(space, x, y), z) != -inner(
            space, y, nabla_left_invariant(space, x, z)
        ):
            witness = {"x": x.to_json(), "y": y.to_json(), "z": z.to_json()}
            break
    results.append(AxiomResult("metric_compatible", witness is None, witness))

    return results


def structure_constants_json(space: DamekRicciSpace) -> dict:
    table = _pair_bracket_table(space)
    return {
        "space": space.name(),
        "s_dim": space.s_dim,
        "layout": {"a": [0], "v": [1, 1 + space.v_dim], "z": [1 + space.v_dim, space.s_dim]},
        "brackets": {
            f"{i},{j}": {str(k): rat_to_str(c) for k, c in sorted(entry.items())}
            for (i, j), entry in sorted(table.items())
        },
    }
